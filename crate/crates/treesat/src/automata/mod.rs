//! Tree automata over ranked alphabets, in two flavors.
//!
//! [`Afta`] is the working representation: bottom-up transitions whose child
//! constraints are *sets* of states, all of which must accept the child
//! (empty set = no requirement), plus deep transitions that match a whole
//! control-rooted pattern at once and constrain the subtrees bound by its
//! variables. Saturation wants exactly this shape: conjunction absorbs
//! right-side duplication, deep transitions absorb rule left sides.
//!
//! [`Nfta`] is the standard form: singleton constraints, no deep
//! transitions. [`dealternate`](Afta::dealternate) converts, so emptiness and
//! product run on familiar ground.
//!
//! Acceptance needs no fixpoint iteration: control symbols cannot occur below
//! the root of a well-sorted term and no constraint can mention a
//! configuration-sorted state, so one bottom-up pass settles every query.

mod dealternate;
mod dot;

pub use dealternate::{DealternationBudget, DEFAULT_DEALTERNATION_BUDGET};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::alphabet::{is_identifier, RankedAlphabet, SortId, SymbolId};
use crate::term::{enumerate_terms, match_root, Pattern, Term, TermError};

/// Index into an automaton's state table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Where a transition came from. Acceptance can be restricted to the
/// `Original` part, which is how the saturated automaton still answers
/// membership in the target set it started from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// Present in the input automaton.
    Original,
    /// Deep transition added by saturation for the rule with this label.
    Saturated { rule: String },
    /// Plain transition materializing a derived or loop state.
    Derived,
}

impl Provenance {
    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }
}

/// Which transitions an acceptance query may use.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum View {
    All,
    OriginalOnly,
}

impl View {
    fn keeps(self, p: &Provenance) -> bool {
        match self {
            View::All => true,
            View::OriginalOnly => p.is_original(),
        }
    }
}

/// Bottom-up transition `f(C_1 … C_k) -> target`: applies to `f(t_1 … t_k)`
/// when every state in `C_i` accepts `t_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlainTransition {
    pub sym: SymbolId,
    pub constraints: Vec<BTreeSet<StateId>>,
    pub target: StateId,
    pub provenance: Provenance,
}

/// Pattern transition `π [θ] -> target`: applies to `t = πσ` when for every
/// variable `x` of `π`, every state in `θ(x)` accepts `σ(x)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeepTransition {
    pub pattern: Pattern,
    pub theta: BTreeMap<String, BTreeSet<StateId>>,
    pub target: StateId,
    pub provenance: Provenance,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("state name `{0}` is not an identifier")]
    BadStateName(String),
    #[error("state name `{0}` uses the reserved `__` prefix")]
    ReservedStateName(String),
    #[error("state `{0}` already exists")]
    DuplicateState(String),
    #[error("state id out of range for this automaton")]
    ForeignState,
    #[error("final state `{0}` is not configuration-sorted")]
    NonConfFinal(String),
    #[error("transition on `{symbol}` has {got} constraint slots, the symbol has arity {expected}")]
    ConstraintArity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("constraint {index} of a `{symbol}` transition holds state `{state}` of sort `{got}`, expected `{expected}`")]
    ConstraintSort {
        symbol: String,
        index: usize,
        state: String,
        expected: String,
        got: String,
    },
    #[error("transition on `{symbol}` targets state `{state}` of sort `{got}`, expected `{expected}`")]
    TargetSort {
        symbol: String,
        state: String,
        expected: String,
        got: String,
    },
    #[error("deep pattern is not rooted by a control symbol")]
    DeepNotControlRooted,
    #[error("deep pattern repeats variable `?{0}`")]
    DeepNonLinear(String),
    #[error("deep pattern is ill-sorted: {0}")]
    DeepIllSorted(TermError),
    #[error("deep constraint map mentions `?{0}`, which the pattern does not bind")]
    ThetaUnknownVariable(String),
    #[error("deep constraint for `?{var}` holds state `{state}` of sort `{got}`, expected `{expected}`")]
    ThetaSort {
        var: String,
        state: String,
        expected: String,
        got: String,
    },
    #[error("the two automata are over different alphabets")]
    AlphabetMismatch,
}

/// Alternating finite tree automaton. See the module documentation for the
/// acceptance semantics.
#[derive(Clone, Debug)]
pub struct Afta {
    alphabet: RankedAlphabet,
    state_names: Vec<String>,
    state_sorts: Vec<SortId>,
    state_ids: BTreeMap<String, StateId>,
    finals: BTreeSet<StateId>,
    plains: Vec<PlainTransition>,
    plains_by_sym: BTreeMap<SymbolId, Vec<usize>>,
    plains_by_sym_target: BTreeMap<(SymbolId, StateId), Vec<usize>>,
    deeps: Vec<DeepTransition>,
}

impl Afta {
    pub fn new(alphabet: RankedAlphabet) -> Afta {
        Afta {
            alphabet,
            state_names: Vec::new(),
            state_sorts: Vec::new(),
            state_ids: BTreeMap::new(),
            finals: BTreeSet::new(),
            plains: Vec::new(),
            plains_by_sym: BTreeMap::new(),
            plains_by_sym_target: BTreeMap::new(),
            deeps: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    /// Adds a state. The `__` prefix belongs to machine-generated states;
    /// [`Afta::add_reserved_state`] is the only way in.
    pub fn add_state(&mut self, name: &str, sort: SortId) -> Result<StateId, AutomatonError> {
        if name.starts_with("__") {
            return Err(AutomatonError::ReservedStateName(name.to_string()));
        }
        self.add_reserved_state(name, sort)
    }

    /// Adds a state without the reserved-prefix check. Used by the saturation
    /// engine and by deserialization of files this library wrote.
    pub fn add_reserved_state(
        &mut self,
        name: &str,
        sort: SortId,
    ) -> Result<StateId, AutomatonError> {
        if !is_identifier(name) {
            return Err(AutomatonError::BadStateName(name.to_string()));
        }
        if self.state_ids.contains_key(name) {
            return Err(AutomatonError::DuplicateState(name.to_string()));
        }
        let id = StateId(self.state_names.len() as u32);
        self.state_names.push(name.to_string());
        self.state_sorts.push(sort);
        self.state_ids.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_ids.get(name).copied()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.state_names[id.index()]
    }

    pub fn state_sort(&self, id: StateId) -> SortId {
        self.state_sorts[id.index()]
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn set_final(&mut self, id: StateId) -> Result<(), AutomatonError> {
        self.check_state(id)?;
        if self.state_sort(id) != self.alphabet.conf_sort() {
            return Err(AutomatonError::NonConfFinal(self.state_name(id).to_string()));
        }
        self.finals.insert(id);
        Ok(())
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    fn check_state(&self, id: StateId) -> Result<(), AutomatonError> {
        if id.index() < self.state_names.len() {
            Ok(())
        } else {
            Err(AutomatonError::ForeignState)
        }
    }

    /// Adds a plain transition after sort-checking it. Returns false when an
    /// identical transition (ignoring provenance) is already present.
    pub fn add_plain(
        &mut self,
        sym: SymbolId,
        constraints: Vec<BTreeSet<StateId>>,
        target: StateId,
        provenance: Provenance,
    ) -> Result<bool, AutomatonError> {
        let symbol = self.alphabet.symbol(sym);
        if symbol.arity() != constraints.len() {
            return Err(AutomatonError::ConstraintArity {
                symbol: symbol.name.clone(),
                expected: symbol.arity(),
                got: constraints.len(),
            });
        }
        for (i, (set, &want)) in constraints.iter().zip(&symbol.args).enumerate() {
            for &s in set {
                self.check_state(s)?;
                if self.state_sort(s) != want {
                    return Err(AutomatonError::ConstraintSort {
                        symbol: symbol.name.clone(),
                        index: i,
                        state: self.state_name(s).to_string(),
                        expected: self.alphabet.sort_name(want).to_string(),
                        got: self.alphabet.sort_name(self.state_sort(s)).to_string(),
                    });
                }
            }
        }
        self.check_state(target)?;
        if self.state_sort(target) != symbol.result {
            return Err(AutomatonError::TargetSort {
                symbol: symbol.name.clone(),
                state: self.state_name(target).to_string(),
                expected: self.alphabet.sort_name(symbol.result).to_string(),
                got: self.alphabet.sort_name(self.state_sort(target)).to_string(),
            });
        }
        let dup = self
            .plains_by_sym_target
            .get(&(sym, target))
            .map(|v| {
                v.iter()
                    .any(|&i| self.plains[i].constraints == constraints)
            })
            .unwrap_or(false);
        if dup {
            return Ok(false);
        }
        let idx = self.plains.len();
        self.plains.push(PlainTransition {
            sym,
            constraints,
            target,
            provenance,
        });
        self.plains_by_sym.entry(sym).or_default().push(idx);
        self.plains_by_sym_target
            .entry((sym, target))
            .or_default()
            .push(idx);
        Ok(true)
    }

    /// Adds a deep transition after validating the pattern and constraint
    /// map. Missing variables are filled in as unconstrained, so `theta`
    /// always ends up covering exactly the pattern's variables. Returns false
    /// on an exact duplicate (ignoring provenance).
    pub fn add_deep(
        &mut self,
        pattern: Pattern,
        mut theta: BTreeMap<String, BTreeSet<StateId>>,
        target: StateId,
        provenance: Provenance,
    ) -> Result<bool, AutomatonError> {
        let root = pattern
            .root_symbol()
            .ok_or(AutomatonError::DeepNotControlRooted)?;
        if !self.alphabet.is_control(root) {
            return Err(AutomatonError::DeepNotControlRooted);
        }
        pattern
            .check(&self.alphabet)
            .map_err(AutomatonError::DeepIllSorted)?;
        if !pattern.is_linear() {
            let occ = pattern.var_occurrences();
            let mut seen = BTreeSet::new();
            let dup = occ
                .iter()
                .find(|v| !seen.insert(v.name.clone()))
                .expect("non-linear pattern has a repeated variable");
            return Err(AutomatonError::DeepNonLinear(dup.name.clone()));
        }
        let vars = pattern.variables();
        for key in theta.keys() {
            if !vars.iter().any(|v| &v.name == key) {
                return Err(AutomatonError::ThetaUnknownVariable(key.clone()));
            }
        }
        for v in &vars {
            let entry = theta.entry(v.name.clone()).or_default();
            for &s in entry.iter() {
                self.check_state(s)?;
                if self.state_sort(s) != v.sort {
                    return Err(AutomatonError::ThetaSort {
                        var: v.name.clone(),
                        state: self.state_name(s).to_string(),
                        expected: self.alphabet.sort_name(v.sort).to_string(),
                        got: self.alphabet.sort_name(self.state_sort(s)).to_string(),
                    });
                }
            }
        }
        self.check_state(target)?;
        if self.state_sort(target) != self.alphabet.conf_sort() {
            return Err(AutomatonError::TargetSort {
                symbol: self.alphabet.symbol(root).name.clone(),
                state: self.state_name(target).to_string(),
                expected: "conf".to_string(),
                got: self.alphabet.sort_name(self.state_sort(target)).to_string(),
            });
        }
        let dup = self
            .deeps
            .iter()
            .any(|d| d.pattern == pattern && d.theta == theta && d.target == target);
        if dup {
            return Ok(false);
        }
        self.deeps.push(DeepTransition {
            pattern,
            theta,
            target,
            provenance,
        });
        Ok(true)
    }

    pub fn plain_transitions(&self) -> &[PlainTransition] {
        &self.plains
    }

    /// Deep transitions in the order they were added, which for a saturated
    /// automaton is creation order. Witness extraction leans on that.
    pub fn deep_transitions(&self) -> &[DeepTransition] {
        &self.deeps
    }

    pub fn has_deeps(&self) -> bool {
        !self.deeps.is_empty()
    }

    pub fn plains_with_symbol(&self, sym: SymbolId) -> impl Iterator<Item = &PlainTransition> {
        self.plains_by_sym
            .get(&sym)
            .into_iter()
            .flatten()
            .map(|&i| &self.plains[i])
    }

    /// Plain transitions on `sym` whose target is `target`. The saturation
    /// step reads rule right sides against exactly this index.
    pub fn plains_into(
        &self,
        sym: SymbolId,
        target: StateId,
    ) -> impl Iterator<Item = &PlainTransition> {
        self.plains_into_indexed(sym, target).map(|(_, tr)| tr)
    }

    /// Same as [`Afta::plains_into`], with each transition's index in
    /// [`Afta::plain_transitions`].
    pub fn plains_into_indexed(
        &self,
        sym: SymbolId,
        target: StateId,
    ) -> impl Iterator<Item = (usize, &PlainTransition)> {
        self.plains_by_sym_target
            .get(&(sym, target))
            .into_iter()
            .flatten()
            .map(|&i| (i, &self.plains[i]))
    }

    /// All states accepting `t`, using every transition.
    pub fn acc(&self, t: &Term) -> BTreeSet<StateId> {
        self.acc_view(t, View::All)
    }

    /// All states accepting `t` through transitions the view keeps.
    pub fn acc_view(&self, t: &Term, view: View) -> BTreeSet<StateId> {
        let mut memo = HashMap::new();
        self.acc_memo(t, view, &mut memo)
    }

    fn acc_memo(
        &self,
        t: &Term,
        view: View,
        memo: &mut HashMap<Term, BTreeSet<StateId>>,
    ) -> BTreeSet<StateId> {
        if let Some(cached) = memo.get(t) {
            return cached.clone();
        }
        let child_states: Vec<BTreeSet<StateId>> = t
            .children()
            .iter()
            .map(|c| self.acc_memo(c, view, memo))
            .collect();
        let mut out = BTreeSet::new();
        if let Some(idxs) = self.plains_by_sym.get(&t.sym()) {
            for &i in idxs {
                let tr = &self.plains[i];
                if !view.keeps(&tr.provenance) {
                    continue;
                }
                if tr
                    .constraints
                    .iter()
                    .zip(&child_states)
                    .all(|(need, have)| need.is_subset(have))
                {
                    out.insert(tr.target);
                }
            }
        }
        if t.is_configuration(&self.alphabet) {
            for deep in &self.deeps {
                if !view.keeps(&deep.provenance) {
                    continue;
                }
                if out.contains(&deep.target) {
                    continue;
                }
                if let Some(sigma) = match_root(&deep.pattern, t) {
                    let ok = deep.theta.iter().all(|(x, need)| {
                        need.is_empty() || {
                            let sub = sigma.get(x).expect("match binds every pattern variable");
                            let have = self.acc_memo(sub, view, memo);
                            need.is_subset(&have)
                        }
                    });
                    if ok {
                        out.insert(deep.target);
                    }
                }
            }
        }
        memo.insert(t.clone(), out.clone());
        out
    }

    pub fn accepts(&self, t: &Term) -> bool {
        self.accepts_view(t, View::All)
    }

    /// Acceptance by the input automaton embedded in a saturated one.
    pub fn accepts_original(&self, t: &Term) -> bool {
        self.accepts_view(t, View::OriginalOnly)
    }

    pub fn accepts_view(&self, t: &Term, view: View) -> bool {
        !self.acc_view(t, view).is_disjoint(&self.finals)
    }

    /// Accepted configurations of height at most `depth`, canonical order.
    pub fn enumerate_language(&self, depth: u32) -> Vec<Term> {
        self.enumerate_view(depth, View::All)
    }

    pub fn enumerate_view(&self, depth: u32, view: View) -> Vec<Term> {
        enumerate_terms(&self.alphabet, self.alphabet.conf_sort(), depth)
            .into_iter()
            .filter(|t| self.accepts_view(t, view))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        dot::to_dot(self)
    }

    pub fn dealternate(&self, budget: usize) -> Result<Nfta, DealternationBudget> {
        dealternate::dealternate(self, budget)
    }

    /// True iff the automaton accepts nothing. Decided on the dealternated
    /// form by marking inhabited states.
    pub fn is_empty(&self, budget: usize) -> Result<bool, DealternationBudget> {
        Ok(self.dealternate(budget)?.is_empty())
    }
}

/// Standard bottom-up nondeterministic tree automaton: every constraint is a
/// single state and there are no deep transitions.
#[derive(Clone, Debug)]
pub struct Nfta {
    inner: Afta,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NftaViolation {
    #[error("constraint sets must be singletons")]
    NonSingletonConstraint,
    #[error("deep transitions are not allowed")]
    DeepTransition,
}

impl Nfta {
    pub fn from_afta(afta: Afta) -> Result<Nfta, NftaViolation> {
        if afta.has_deeps() {
            return Err(NftaViolation::DeepTransition);
        }
        for tr in &afta.plains {
            if tr.constraints.iter().any(|c| c.len() != 1) {
                return Err(NftaViolation::NonSingletonConstraint);
            }
        }
        Ok(Nfta { inner: afta })
    }

    pub fn as_afta(&self) -> &Afta {
        &self.inner
    }

    pub fn into_afta(self) -> Afta {
        self.inner
    }

    pub fn accepts(&self, t: &Term) -> bool {
        self.inner.accepts(t)
    }

    pub fn enumerate_language(&self, depth: u32) -> Vec<Term> {
        self.inner.enumerate_language(depth)
    }

    /// Marks inhabited states bottom-up; empty iff no final is inhabited.
    pub fn is_empty(&self) -> bool {
        let a = &self.inner;
        let mut inhabited = vec![false; a.state_count()];
        loop {
            let mut changed = false;
            for tr in &a.plains {
                if inhabited[tr.target.index()] {
                    continue;
                }
                let ready = tr
                    .constraints
                    .iter()
                    .all(|c| inhabited[c.iter().next().expect("singleton").index()]);
                if ready {
                    inhabited[tr.target.index()] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        !a.finals.iter().any(|f| inhabited[f.index()])
    }

    /// Language intersection by the pairwise product. Pair states are created
    /// on demand and named `__x0`, `__x1`, … in creation order.
    pub fn product(&self, other: &Nfta) -> Result<Nfta, AutomatonError> {
        if self.inner.alphabet != other.inner.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut out = Afta::new(self.inner.alphabet.clone());
        let mut pair_ids: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
        let mut pair_of: Vec<(StateId, StateId)> = Vec::new();
        // Two passes: first create every pair state mentioned by a matching
        // transition pair, then add the transitions (constraint pairs must
        // exist as states before a transition can reference them).
        for pass in 0..2 {
            for (sym, _) in self.inner.alphabet.symbols() {
                let left: Vec<&PlainTransition> = self.inner.plains_with_symbol(sym).collect();
                let right: Vec<&PlainTransition> = other.inner.plains_with_symbol(sym).collect();
                for la in &left {
                    for rb in &right {
                        let mut key_pairs =
                            vec![(la.target, rb.target)];
                        for (ca, cb) in la.constraints.iter().zip(&rb.constraints) {
                            let sa = *ca.iter().next().expect("singleton");
                            let sb = *cb.iter().next().expect("singleton");
                            key_pairs.push((sa, sb));
                        }
                        if pass == 0 {
                            for &(sa, sb) in &key_pairs {
                                if let std::collections::btree_map::Entry::Vacant(e) =
                                    pair_ids.entry((sa, sb))
                                {
                                    let name = format!("__x{}", pair_of.len());
                                    let id = out
                                        .add_reserved_state(&name, self.inner.state_sort(sa))
                                        .expect("fresh name");
                                    e.insert(id);
                                    pair_of.push((sa, sb));
                                }
                            }
                        } else {
                            let target = pair_ids[&key_pairs[0]];
                            let constraints: Vec<BTreeSet<StateId>> = key_pairs[1..]
                                .iter()
                                .map(|k| [pair_ids[k]].into())
                                .collect();
                            out.add_plain(sym, constraints, target, Provenance::Original)?;
                        }
                    }
                }
            }
        }
        for (&(sa, sb), &id) in &pair_ids {
            if self.inner.finals.contains(&sa) && other.inner.finals.contains(&sb) {
                out.set_final(id)?;
            }
        }
        Ok(Nfta { inner: out })
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An automaton accepting exactly the given configurations: one state per
/// distinct subterm, singleton constraints, finals at the roots.
pub fn singleton_automaton(
    alphabet: &RankedAlphabet,
    terms: &[Term],
) -> Result<Nfta, AutomatonError> {
    let mut afta = Afta::new(alphabet.clone());
    // Distinct subterms in canonical order, so state numbering is stable
    // under permutation of the input.
    let mut subterms: BTreeSet<Term> = BTreeSet::new();
    for t in terms {
        collect_subterms(t, &mut subterms);
    }
    let mut ids: BTreeMap<Term, StateId> = BTreeMap::new();
    for (i, sub) in subterms.iter().enumerate() {
        let id = afta.add_reserved_state(&format!("t{i}"), sub.sort(alphabet))?;
        ids.insert(sub.clone(), id);
    }
    for sub in &subterms {
        let constraints: Vec<BTreeSet<StateId>> = sub
            .children()
            .iter()
            .map(|c| [ids[c]].into())
            .collect();
        afta.add_plain(sub.sym(), constraints, ids[sub], Provenance::Original)?;
    }
    for t in terms {
        afta.set_final(ids[t])?;
    }
    Ok(Nfta { inner: afta })
}

fn collect_subterms(t: &Term, out: &mut BTreeSet<Term>) {
    out.insert(t.clone());
    for c in t.children() {
        collect_subterms(c, out);
    }
}

/// Accepts every well-sorted configuration: one state per sort, one
/// transition per symbol.
pub fn universal_automaton(alphabet: &RankedAlphabet) -> Nfta {
    let mut afta = Afta::new(alphabet.clone());
    let mut by_sort: BTreeMap<SortId, StateId> = BTreeMap::new();
    for (sort, name) in alphabet.sorts() {
        let id = afta
            .add_reserved_state(&format!("any_{name}"), sort)
            .expect("sort names are distinct");
        by_sort.insert(sort, id);
    }
    for (sym, symbol) in alphabet.symbols() {
        let constraints: Vec<BTreeSet<StateId>> =
            symbol.args.iter().map(|a| [by_sort[a]].into()).collect();
        afta.add_plain(sym, constraints, by_sort[&symbol.result], Provenance::Original)
            .expect("sort-correct by construction");
    }
    afta.set_final(by_sort[&alphabet.conf_sort()])
        .expect("conf state exists");
    Nfta { inner: afta }
}

/// What a saturation query should treat as the target: either explicit
/// configurations or every configuration rooted by a given control symbol.
#[derive(Clone, Debug)]
pub enum TargetSpec {
    Term(Term),
    Control(SymbolId),
}

/// Builds the target automaton for a mixed list of specs. Explicit terms get
/// singleton states, control specs get one unconstrained transition each; the
/// language is the union.
pub fn target_automaton(
    alphabet: &RankedAlphabet,
    specs: &[TargetSpec],
) -> Result<Afta, AutomatonError> {
    let mut terms = Vec::new();
    let mut controls = BTreeSet::new();
    for spec in specs {
        match spec {
            TargetSpec::Term(t) => terms.push(t.clone()),
            TargetSpec::Control(c) => {
                controls.insert(*c);
            }
        }
    }
    let mut afta = singleton_automaton(alphabet, &terms)?.into_afta();
    if !controls.is_empty() {
        let conf = alphabet.conf_sort();
        let qf = afta.add_reserved_state("t_any", conf)?;
        afta.set_final(qf)?;
        for &c in &controls {
            let arity = alphabet.symbol(c).arity();
            afta.add_plain(c, vec![BTreeSet::new(); arity], qf, Provenance::Original)?;
        }
    }
    Ok(afta)
}
