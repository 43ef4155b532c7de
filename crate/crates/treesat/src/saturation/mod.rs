//! Backward-reachability saturation.
//!
//! [`saturate`] takes a root rewrite system and an automaton for the target
//! set and adds deep transitions until the automaton accepts every
//! configuration that can rewrite into the target set. Each round evaluates
//! every rule's right side against every final state; a successful evaluation
//! yields variable demands that become a deep transition over the rule's left
//! side. Pattern fragments that a right-side variable must match are turned
//! into derived states, and chains of derived states that grow one spine
//! forever are collapsed into loop states so that common systems reach a
//! fixpoint. Systems without that structure can genuinely require unbounded
//! work; budgets turn divergence into a reported status with a sound partial
//! result rather than an error.

mod witness;

pub use witness::{verify_trace, witness, witness_with_limit, WitnessError, DEFAULT_WITNESS_LIMIT};

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use itertools::Itertools;
use thiserror::Error;

use crate::alphabet::SortId;
use crate::automata::{Afta, Provenance, StateId};
use crate::rewrite::{RewriteRule, RootRewriteSystem};
use crate::term::{Pattern, Term};

pub const DEFAULT_TRANSITION_BUDGET: usize = 100_000;
pub const DEFAULT_DERIVED_BUDGET: usize = 10_000;

#[derive(Clone, Debug)]
pub struct SaturationConfig {
    /// Cap on transitions the engine may add, deep and derived-plain combined.
    pub transition_budget: usize,
    /// Cap on derived and loop states combined.
    pub derived_budget: usize,
    /// Collapse self-similar derived chains into loop states.
    pub acceleration: bool,
    /// Cap on evaluation rounds, unlimited when `None`.
    pub max_rounds: Option<usize>,
}

impl Default for SaturationConfig {
    fn default() -> SaturationConfig {
        SaturationConfig {
            transition_budget: DEFAULT_TRANSITION_BUDGET,
            derived_budget: DEFAULT_DERIVED_BUDGET,
            acceleration: true,
            max_rounds: None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SaturationStatus {
    /// A full round added nothing; the automaton is exactly the backward
    /// reachability set of its original language.
    Fixpoint,
    /// A budget was hit first. Everything the automaton accepts is genuinely
    /// backward-reachable, but some configurations may be missing.
    BudgetExceeded,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SaturationStats {
    pub rounds: usize,
    pub transitions_added: usize,
    pub derived_states: usize,
    pub millis: u128,
}

/// Why a deep transition was emitted: the rule and final state it was
/// evaluated against, the variable demands, and which transitions and derived
/// states the evaluation went through. Kept for diagnostics; witness
/// extraction re-searches the automaton instead of replaying evidence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Justification {
    pub rule: String,
    pub target: StateId,
    pub theta: BTreeMap<String, BTreeSet<StateId>>,
    pub evidence: Vec<EvidenceItem>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum EvidenceItem {
    /// Index into the automaton's plain transitions.
    Plain(usize),
    /// Index into the automaton's deep transitions.
    Deep(usize),
    /// Derived state standing for a pattern obligation.
    Derived(StateId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SaturationError {
    #[error("automaton and rewrite system use different alphabets")]
    AlphabetMismatch,
    #[error("input automaton already has deep transitions")]
    DeepTransitionsInInput,
    #[error("input automaton uses reserved state name `{0}`")]
    ReservedInputState(String),
}

/// A saturated automaton together with the system it was computed for. The
/// system is carried so that membership answers can be upgraded to rewrite
/// traces without further context.
#[derive(Clone, Debug)]
pub struct SaturationResult {
    system: RootRewriteSystem,
    automaton: Afta,
    status: SaturationStatus,
    stats: SaturationStats,
    justifications: Vec<Justification>,
}

impl SaturationResult {
    pub fn system(&self) -> &RootRewriteSystem {
        &self.system
    }

    pub fn automaton(&self) -> &Afta {
        &self.automaton
    }

    pub fn status(&self) -> SaturationStatus {
        self.status
    }

    pub fn stats(&self) -> &SaturationStats {
        &self.stats
    }

    /// Parallel to [`Afta::deep_transitions`]: entry `i` justifies deep
    /// transition `i`.
    pub fn justifications(&self) -> &[Justification] {
        &self.justifications
    }

    /// Membership in the computed backward reachability set.
    pub fn accepts(&self, t: &Term) -> bool {
        self.automaton.accepts(t)
    }

    /// Membership in the original target set.
    pub fn accepts_target(&self, t: &Term) -> bool {
        self.automaton.accepts_original(t)
    }
}

/// Computes an automaton for the set of configurations that can rewrite into
/// the language of `target` under `system`. The input automaton must share
/// the system's alphabet, carry no deep transitions, and use no reserved
/// (`__`-prefixed) state names; its transitions are kept unchanged, so the
/// result still answers membership in the original target set through the
/// original-only view.
pub fn saturate(
    system: &RootRewriteSystem,
    target: &Afta,
    config: &SaturationConfig,
) -> Result<SaturationResult, SaturationError> {
    if target.alphabet() != system.alphabet() {
        return Err(SaturationError::AlphabetMismatch);
    }
    if target.has_deeps() {
        return Err(SaturationError::DeepTransitionsInInput);
    }
    for s in target.states() {
        if target.state_name(s).starts_with("__") {
            return Err(SaturationError::ReservedInputState(
                target.state_name(s).to_string(),
            ));
        }
    }
    let engine = Engine::new(system, target.clone(), config);
    Ok(engine.run())
}

/// Budget kind hit during a round. Converted into a status, never surfaced
/// as an error.
#[derive(Clone, Copy, Debug)]
enum Exhausted {
    Transitions,
    Derived,
}

type ThetaMap = BTreeMap<String, BTreeSet<StateId>>;

/// One way a right side can be accepted: demands per variable plus the
/// transitions the evaluation used.
#[derive(Clone, Debug)]
struct EvalItem {
    theta: ThetaMap,
    evidence: Vec<EvidenceItem>,
}

/// Hash-consing key for derived states: the spine with variables renamed to
/// their positional index, and the demand sets in that order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct DerivedKey {
    spine: Pattern,
    constraints: Vec<BTreeSet<StateId>>,
}

#[derive(Clone, Debug)]
struct DerivedInfo {
    key: DerivedKey,
    /// Rule label and final state whose evaluation created the state.
    context: (String, StateId),
    is_loop: bool,
}

struct Engine<'a> {
    system: &'a RootRewriteSystem,
    b: Afta,
    config: &'a SaturationConfig,
    justifications: Vec<Justification>,
    derived: BTreeMap<DerivedKey, StateId>,
    derived_info: BTreeMap<StateId, DerivedInfo>,
    derived_count: usize,
    loop_count: usize,
    transitions_added: usize,
    context: Option<(String, StateId)>,
}

impl<'a> Engine<'a> {
    fn new(system: &'a RootRewriteSystem, b: Afta, config: &'a SaturationConfig) -> Engine<'a> {
        Engine {
            system,
            b,
            config,
            justifications: Vec::new(),
            derived: BTreeMap::new(),
            derived_info: BTreeMap::new(),
            derived_count: 0,
            loop_count: 0,
            transitions_added: 0,
            context: None,
        }
    }

    fn run(mut self) -> SaturationResult {
        let started = Instant::now();
        let mut rounds = 0;
        let status = loop {
            if let Some(max) = self.config.max_rounds {
                if rounds >= max {
                    break SaturationStatus::BudgetExceeded;
                }
            }
            rounds += 1;
            match self.round() {
                Err(_) => break SaturationStatus::BudgetExceeded,
                Ok(changed) => {
                    if !changed {
                        break SaturationStatus::Fixpoint;
                    }
                }
            }
        };
        let stats = SaturationStats {
            rounds,
            transitions_added: self.transitions_added,
            derived_states: self.derived_count + self.loop_count,
            millis: started.elapsed().as_millis(),
        };
        SaturationResult {
            system: self.system.clone(),
            automaton: self.b,
            status,
            stats,
            justifications: self.justifications,
        }
    }

    /// One pass over every rule and final state, in label then state order.
    /// Emissions are visible to later evaluations in the same round.
    fn round(&mut self) -> Result<bool, Exhausted> {
        let mut changed = false;
        let finals: Vec<StateId> = self.b.finals().iter().copied().collect();
        for ri in 0..self.system.rules().len() {
            let rule = self.system.rules()[ri].clone();
            for &qf in &finals {
                self.context = Some((rule.label.clone(), qf));
                let items = self.eval(&rule.rhs, qf)?;
                for item in items {
                    if self.emit(&rule, qf, item)? {
                        changed = true;
                    }
                }
            }
        }
        Ok(changed)
    }

    /// All ways the instances of `r` can be accepted at `demanded`, as
    /// demands on the variables of `r`. An instance `rσ` is accepted at
    /// `demanded` exactly when some returned item has every state of
    /// `theta(x)` accepting `σ(x)`, relative to the current automaton.
    fn eval(&mut self, r: &Pattern, demanded: StateId) -> Result<Vec<EvalItem>, Exhausted> {
        let children = match r {
            Pattern::Var(v) => {
                debug_assert_eq!(self.b.state_sort(demanded), v.sort);
                let mut theta = ThetaMap::new();
                theta.insert(v.name.clone(), BTreeSet::from([demanded]));
                return Ok(vec![EvalItem {
                    theta,
                    evidence: Vec::new(),
                }]);
            }
            Pattern::App { children, .. } => children,
        };
        let sym = r.root_symbol().expect("App pattern has a root");
        let mut found: BTreeMap<ThetaMap, Vec<EvidenceItem>> = BTreeMap::new();

        let plain_list: Vec<(usize, Vec<BTreeSet<StateId>>)> = self
            .b
            .plains_into_indexed(sym, demanded)
            .map(|(i, tr)| (i, tr.constraints.clone()))
            .collect();
        for (idx, constraints) in plain_list {
            let mut obligations: Vec<Vec<EvalItem>> = Vec::new();
            for (i, cset) in constraints.iter().enumerate() {
                for &s in cset {
                    obligations.push(self.eval(&children[i], s)?);
                }
            }
            for combo in combos(obligations) {
                let mut item = EvalItem {
                    theta: ThetaMap::new(),
                    evidence: vec![EvidenceItem::Plain(idx)],
                };
                for part in combo {
                    join_theta(&mut item.theta, &part.theta);
                    item.evidence.extend(part.evidence);
                }
                found.entry(item.theta).or_insert(item.evidence);
            }
        }

        // Deep transitions only target configuration states, so this loop is
        // empty below the root of a right side.
        let deep_list: Vec<(usize, Pattern, ThetaMap)> = self
            .b
            .deep_transitions()
            .iter()
            .enumerate()
            .filter(|(_, d)| d.target == demanded)
            .map(|(i, d)| (i, d.pattern.clone(), d.theta.clone()))
            .collect();
        for (idx, pi, theta_pi) in deep_list {
            let mut obligations: Vec<Vec<EvalItem>> = Vec::new();
            if !self.unify_eval(&pi, r, &theta_pi, &mut obligations)? {
                continue;
            }
            for combo in combos(obligations) {
                let mut item = EvalItem {
                    theta: ThetaMap::new(),
                    evidence: vec![EvidenceItem::Deep(idx)],
                };
                for part in combo {
                    join_theta(&mut item.theta, &part.theta);
                    item.evidence.extend(part.evidence);
                }
                found.entry(item.theta).or_insert(item.evidence);
            }
        }

        Ok(found
            .into_iter()
            .map(|(theta, evidence)| EvalItem { theta, evidence })
            .collect())
    }

    /// Walks a deep transition's pattern `pi` against a right-side fragment
    /// `r`, collecting one obligation list per demand discharged. Returns
    /// false on a symbol clash, meaning the transition contributes nothing.
    fn unify_eval(
        &mut self,
        pi: &Pattern,
        r: &Pattern,
        theta_pi: &ThetaMap,
        obligations: &mut Vec<Vec<EvalItem>>,
    ) -> Result<bool, Exhausted> {
        match (pi, r) {
            (Pattern::Var(a), fragment) => {
                // The pattern variable stands for whatever `fragment`
                // instantiates to; its demands transfer.
                if let Some(demands) = theta_pi.get(&a.name) {
                    for &s in demands {
                        obligations.push(self.eval(fragment, s)?);
                    }
                }
                Ok(true)
            }
            (sub @ Pattern::App { .. }, Pattern::Var(y)) => {
                // The right-side variable must produce an instance of this
                // pattern fragment; a derived state recognizes exactly those.
                let mut cs = ThetaMap::new();
                for v in sub.variables() {
                    cs.insert(
                        v.name.clone(),
                        theta_pi.get(&v.name).cloned().unwrap_or_default(),
                    );
                }
                let d = self.request_derived(sub, &cs)?;
                let mut theta = ThetaMap::new();
                theta.insert(y.name.clone(), BTreeSet::from([d]));
                obligations.push(vec![EvalItem {
                    theta,
                    evidence: vec![EvidenceItem::Derived(d)],
                }]);
                Ok(true)
            }
            (
                Pattern::App {
                    sym: f,
                    children: fc,
                },
                Pattern::App {
                    sym: g,
                    children: gc,
                },
            ) => {
                if f != g {
                    return Ok(false);
                }
                for (p, q) in fc.iter().zip(gc) {
                    if !self.unify_eval(p, q, theta_pi, obligations)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// State recognizing `{spineσ : σ(x) accepted at every state of cs[x]}`.
    /// Hash-consed on the positional form of the request. When the request
    /// extends a derived chain over the same spine created by the same rule
    /// and final state, it is collapsed into a loop state instead.
    fn request_derived(&mut self, spine: &Pattern, cs: &ThetaMap) -> Result<StateId, Exhausted> {
        let key = canonical_key(spine, cs);
        if let Some(&d) = self.derived.get(&key) {
            return Ok(d);
        }
        let sort = key.spine.sort(self.b.alphabet());
        if self.config.acceleration {
            if let Some((pos, base)) = self.acceleration_candidate(&key) {
                let u = self.fresh_state("__u", sort, true)?;
                let base_key = self.derived_info[&base].key.clone();
                self.materialize(&key.spine, &base_key.constraints, u)?;
                let mut rec = base_key.constraints.clone();
                rec[pos] = BTreeSet::from([u]);
                self.materialize(&key.spine, &rec, u)?;
                let mut self_key = key.clone();
                self_key.constraints[pos] = BTreeSet::from([u]);
                self.derived.insert(key, u);
                self.derived.insert(self_key.clone(), u);
                self.derived_info.insert(
                    u,
                    DerivedInfo {
                        key: self_key,
                        context: self.context.clone().expect("evaluation sets a context"),
                        is_loop: true,
                    },
                );
                return Ok(u);
            }
        }
        let d = self.fresh_state("__d", sort, false)?;
        self.derived.insert(key.clone(), d);
        self.derived_info.insert(
            d,
            DerivedInfo {
                key: key.clone(),
                context: self.context.clone().expect("evaluation sets a context"),
                is_loop: false,
            },
        );
        self.materialize(&key.spine, &key.constraints, d)?;
        Ok(d)
    }

    /// A request collapses into a loop when exactly one demand is a single
    /// derived state over the same spine, created under the same rule and
    /// final state, and the remaining demands equal that state's own. The
    /// first such position wins, which is deterministic.
    fn acceleration_candidate(&self, key: &DerivedKey) -> Option<(usize, StateId)> {
        let context = self.context.as_ref()?;
        for (pos, cset) in key.constraints.iter().enumerate() {
            if cset.len() != 1 {
                continue;
            }
            let s = *cset.iter().next().expect("singleton");
            let Some(info) = self.derived_info.get(&s) else {
                continue;
            };
            if info.is_loop || &info.context != context || info.key.spine != key.spine {
                continue;
            }
            let rest_match = key
                .constraints
                .iter()
                .enumerate()
                .all(|(i, c)| i == pos || *c == info.key.constraints[i]);
            if rest_match {
                return Some((pos, s));
            }
        }
        None
    }

    /// Adds the single plain transition for a spine level; structured
    /// children become derived states of their own.
    fn materialize(
        &mut self,
        spine: &Pattern,
        constraints: &[BTreeSet<StateId>],
        target: StateId,
    ) -> Result<(), Exhausted> {
        let Pattern::App { sym, children } = spine else {
            unreachable!("derived spines are structural");
        };
        let occ = spine.var_occurrences();
        let pos: BTreeMap<&str, usize> = occ
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let mut slots = Vec::with_capacity(children.len());
        for child in children {
            match child {
                Pattern::Var(v) => slots.push(constraints[pos[v.name.as_str()]].clone()),
                sub @ Pattern::App { .. } => {
                    let mut sub_cs = ThetaMap::new();
                    for v in sub.variables() {
                        sub_cs.insert(v.name.clone(), constraints[pos[v.name.as_str()]].clone());
                    }
                    let d = self.request_derived(sub, &sub_cs)?;
                    slots.push(BTreeSet::from([d]));
                }
            }
        }
        if self.transitions_added >= self.config.transition_budget {
            return Err(Exhausted::Transitions);
        }
        let added = self
            .b
            .add_plain(*sym, slots, target, Provenance::Derived)
            .expect("derived transitions are well-sorted");
        if added {
            self.transitions_added += 1;
        }
        Ok(())
    }

    fn fresh_state(&mut self, prefix: &str, sort: SortId, looping: bool) -> Result<StateId, Exhausted> {
        if self.derived_count + self.loop_count >= self.config.derived_budget {
            return Err(Exhausted::Derived);
        }
        let n = if looping {
            let n = self.loop_count;
            self.loop_count += 1;
            n
        } else {
            let n = self.derived_count;
            self.derived_count += 1;
            n
        };
        let name = format!("{prefix}{n}");
        Ok(self
            .b
            .add_reserved_state(&name, sort)
            .expect("engine state names are fresh"))
    }

    /// Turns an evaluation into a deep transition over the rule's left side,
    /// unless an existing transition for the same rule and final state
    /// already demands pointwise less.
    fn emit(&mut self, rule: &RewriteRule, qf: StateId, item: EvalItem) -> Result<bool, Exhausted> {
        let mut theta = item.theta;
        for v in rule.lhs.variables() {
            theta.entry(v.name).or_default();
        }
        let subsumed = self.b.deep_transitions().iter().any(|d| {
            d.target == qf
                && matches!(&d.provenance, Provenance::Saturated { rule: r } if r == &rule.label)
                && d.theta.iter().all(|(x, need)| need.is_subset(&theta[x]))
        });
        if subsumed {
            return Ok(false);
        }
        if self.transitions_added >= self.config.transition_budget {
            return Err(Exhausted::Transitions);
        }
        let added = self
            .b
            .add_deep(
                rule.lhs.clone(),
                theta.clone(),
                qf,
                Provenance::Saturated {
                    rule: rule.label.clone(),
                },
            )
            .expect("rule left sides are valid deep patterns");
        debug_assert!(added, "subsumption covers exact duplicates");
        self.transitions_added += 1;
        self.justifications.push(Justification {
            rule: rule.label.clone(),
            target: qf,
            theta,
            evidence: item.evidence,
        });
        Ok(true)
    }
}

fn join_theta(into: &mut ThetaMap, from: &ThetaMap) {
    for (x, states) in from {
        into.entry(x.clone()).or_default().extend(states);
    }
}

/// Product of the options of each obligation. No obligations means one
/// unconditional way; one obligation without options kills every combination.
fn combos(obligations: Vec<Vec<EvalItem>>) -> Vec<Vec<EvalItem>> {
    if obligations.is_empty() {
        return vec![Vec::new()];
    }
    obligations.into_iter().multi_cartesian_product().collect()
}

fn canonical_key(spine: &Pattern, cs: &ThetaMap) -> DerivedKey {
    let occ = spine.var_occurrences();
    let rename: BTreeMap<String, String> = occ
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.clone(), format!("v{i}")))
        .collect();
    let constraints = occ
        .iter()
        .map(|v| cs.get(&v.name).cloned().unwrap_or_default())
        .collect();
    DerivedKey {
        spine: rename_pattern(spine, &rename),
        constraints,
    }
}

fn rename_pattern(p: &Pattern, rename: &BTreeMap<String, String>) -> Pattern {
    match p {
        Pattern::Var(v) => Pattern::var(&rename[&v.name], v.sort),
        Pattern::App { sym, children } => Pattern::App {
            sym: *sym,
            children: children.iter().map(|c| rename_pattern(c, rename)).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::RankedAlphabet;
    use crate::automata::singleton_automaton;
    use crate::oracle::{prestar_member, OracleLimits};
    use crate::parse::{parse_pattern, parse_term};
    use crate::rewrite::RewriteRule;

    fn alpha() -> RankedAlphabet {
        RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .stack("b", &["stack"], "stack")
            .control("p", &["stack"])
            .control("q", &["stack"])
            .finish()
            .unwrap()
    }

    fn alpha2() -> RankedAlphabet {
        RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .stack("b", &["stack"], "stack")
            .control("p1", &["stack"])
            .control("p2", &["stack", "stack"])
            .control("q2", &["stack", "stack"])
            .finish()
            .unwrap()
    }

    fn system(alphabet: &RankedAlphabet, rules: &[(&str, &str, &str)]) -> RootRewriteSystem {
        let rules = rules
            .iter()
            .map(|(l, lhs, rhs)| RewriteRule {
                label: l.to_string(),
                lhs: parse_pattern(alphabet, lhs).unwrap(),
                rhs: parse_pattern(alphabet, rhs).unwrap(),
            })
            .collect();
        RootRewriteSystem::new(alphabet.clone(), rules).unwrap()
    }

    fn target(alphabet: &RankedAlphabet, terms: &[&str]) -> Afta {
        let terms: Vec<Term> = terms
            .iter()
            .map(|s| parse_term(alphabet, s).unwrap())
            .collect();
        singleton_automaton(alphabet, &terms).unwrap().into_afta()
    }

    fn t(alphabet: &RankedAlphabet, s: &str) -> Term {
        parse_term(alphabet, s).unwrap()
    }

    fn stack(k: usize) -> String {
        let mut s = "bot()".to_string();
        for _ in 0..k {
            s = format!("a({s})");
        }
        s
    }

    fn lang(result: &SaturationResult, depth: u32) -> Vec<Term> {
        result.automaton().enumerate_language(depth)
    }

    #[test]
    fn empty_system_changes_nothing() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[]);
        let tgt = target(&alphabet, &["p(a(bot()))"]);
        let before = tgt.enumerate_language(5);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        assert_eq!(result.stats().rounds, 1);
        assert_eq!(result.stats().transitions_added, 0);
        assert_eq!(lang(&result, 5), before);
    }

    #[test]
    fn pop_reaches_target_but_growing_does_not() {
        let alphabet = alpha();
        let sys = system(
            &alphabet,
            &[
                ("l1", "p(a(?x))", "q(?x)"),
                ("l2", "p(a(?x))", "p(a(a(?x)))"),
            ],
        );
        let tgt = target(&alphabet, &["q(bot())"]);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        assert_eq!(result.stats().rounds, 2);
        assert_eq!(result.automaton().deep_transitions().len(), 1);
        let expected = vec![t(&alphabet, "q(bot())"), t(&alphabet, "p(a(bot()))")];
        assert_eq!(lang(&result, 5), expected);
    }

    #[test]
    fn pop_loop_accelerates_to_fixpoint() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[("pop", "p(a(?x))", "p(?x)")]);
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        assert_eq!(result.stats().rounds, 4);
        assert_eq!(result.stats().derived_states, 2);
        assert_eq!(result.stats().transitions_added, 6);
        assert_eq!(result.automaton().deep_transitions().len(), 3);
        assert!(result.automaton().state_id("__u0").is_some());
        for k in 0..=8 {
            let conf = t(&alphabet, &format!("p({})", stack(k)));
            assert_eq!(result.accepts(&conf), k >= 2, "p with {k} letters");
        }
    }

    #[test]
    fn acceleration_off_hits_derived_budget() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[("pop", "p(a(?x))", "p(?x)")]);
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let config = SaturationConfig {
            acceleration: false,
            derived_budget: 5,
            ..SaturationConfig::default()
        };
        let result = saturate(&sys, &tgt, &config).unwrap();
        assert_eq!(result.status(), SaturationStatus::BudgetExceeded);
        assert!(result.stats().derived_states <= 5);
        // The partial automaton only accepts genuinely backward-reachable
        // configurations.
        let is_target = |c: &Term| result.accepts_target(c);
        for conf in lang(&result, 7) {
            let verdict = prestar_member(
                &sys,
                &conf,
                is_target,
                OracleLimits {
                    max_steps: 10,
                    ..OracleLimits::default()
                },
            );
            assert!(verdict.is_member(), "not backward-reachable");
        }
    }

    #[test]
    fn dropped_stack_is_unconstrained() {
        let alphabet = alpha2();
        let sys = system(&alphabet, &[("drop", "p2(?x1,b(?x2))", "q2(bot(),?x2)")]);
        let tgt = target(&alphabet, &["q2(bot(),bot())"]);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        assert_eq!(result.stats().rounds, 2);
        let deep = &result.automaton().deep_transitions()[0];
        assert!(deep.theta["x1"].is_empty());
        for w in ["bot()", "a(bot())", "b(a(bot()))"] {
            assert!(result.accepts(&t(&alphabet, &format!("p2({w},b(bot()))"))));
        }
        assert!(!result.accepts(&t(&alphabet, "p2(bot(),bot())")));
        assert!(!result.accepts(&t(&alphabet, "p2(bot(),b(a(bot())))")));
        assert!(!result.accepts(&t(&alphabet, "p2(bot(),a(bot()))")));
    }

    #[test]
    fn duplicating_right_side_intersects_demands() {
        let alphabet = alpha2();
        let sys = system(&alphabet, &[("dup", "p1(?x)", "q2(?x,?x)")]);
        let stack_sort = alphabet.sort_id("stack").unwrap();
        let mut tgt = Afta::new(alphabet.clone());
        let s0 = tgt.add_state("s0", stack_sort).unwrap();
        let sa = tgt.add_state("sa", stack_sort).unwrap();
        let sb = tgt.add_state("sb", stack_sort).unwrap();
        let qf = tgt.add_state("qf", alphabet.conf_sort()).unwrap();
        let sym = |n: &str| alphabet.symbol_id(n).unwrap();
        tgt.add_plain(sym("bot"), vec![], s0, Provenance::Original)
            .unwrap();
        tgt.add_plain(sym("a"), vec![BTreeSet::from([s0])], sa, Provenance::Original)
            .unwrap();
        tgt.add_plain(sym("b"), vec![BTreeSet::from([s0])], sb, Provenance::Original)
            .unwrap();
        tgt.add_plain(
            sym("q2"),
            vec![BTreeSet::from([sa]), BTreeSet::from([sb])],
            qf,
            Provenance::Original,
        )
        .unwrap();
        tgt.set_final(qf).unwrap();

        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        let deep = &result.automaton().deep_transitions()[0];
        assert_eq!(deep.theta["x"], BTreeSet::from([sa, sb]));
        // No stack satisfies both demands, so only the original language
        // remains: p1 steps to q2(t,t), never to q2(a(bot),b(bot)).
        assert_eq!(lang(&result, 4), vec![t(&alphabet, "q2(a(bot()),b(bot()))")]);
    }

    #[test]
    fn derived_chain_crosses_rules_then_accelerates() {
        let alphabet = alpha();
        let sys = system(
            &alphabet,
            &[("hand", "q(?y)", "p(?y)"), ("pop", "p(a(?x))", "p(?x)")],
        );
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        assert_eq!(result.status(), SaturationStatus::Fixpoint);
        assert_eq!(result.stats().rounds, 4);
        assert_eq!(result.stats().derived_states, 2);
        assert_eq!(result.automaton().deep_transitions().len(), 6);
        for k in 0..=8 {
            let p = t(&alphabet, &format!("p({})", stack(k)));
            let q = t(&alphabet, &format!("q({})", stack(k)));
            assert_eq!(result.accepts(&p), k >= 2, "p with {k} letters");
            assert_eq!(result.accepts(&q), k >= 2, "q with {k} letters");
        }
    }

    #[test]
    fn rule_order_of_input_does_not_matter() {
        let alphabet = alpha();
        let rules = [("hand", "q(?y)", "p(?y)"), ("pop", "p(a(?x))", "p(?x)")];
        let reversed = [("pop", "p(a(?x))", "p(?x)"), ("hand", "q(?y)", "p(?y)")];
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let config = SaturationConfig::default();
        let one = saturate(&system(&alphabet, &rules), &tgt, &config).unwrap();
        let two = saturate(&system(&alphabet, &reversed), &tgt, &config).unwrap();
        assert_eq!(one.automaton().to_dot(), two.automaton().to_dot());
    }

    #[test]
    fn justifications_line_up_with_deep_transitions() {
        let alphabet = alpha();
        let sys = system(
            &alphabet,
            &[("hand", "q(?y)", "p(?y)"), ("pop", "p(a(?x))", "p(?x)")],
        );
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let result = saturate(&sys, &tgt, &SaturationConfig::default()).unwrap();
        let deeps = result.automaton().deep_transitions();
        assert_eq!(result.justifications().len(), deeps.len());
        for (j, d) in result.justifications().iter().zip(deeps) {
            assert_eq!(
                d.provenance,
                Provenance::Saturated {
                    rule: j.rule.clone()
                }
            );
            assert_eq!(j.target, d.target);
            assert_eq!(j.theta, d.theta);
            assert!(!j.evidence.is_empty());
        }
    }

    #[test]
    fn saturate_rejects_bad_inputs() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[("pop", "p(a(?x))", "p(?x)")]);

        let other = target(&alpha2(), &["p1(bot())"]);
        assert_eq!(
            saturate(&sys, &other, &SaturationConfig::default()).unwrap_err(),
            SaturationError::AlphabetMismatch
        );

        let mut with_deep = target(&alphabet, &["p(bot())"]);
        let qf = with_deep.finals().iter().next().copied().unwrap();
        with_deep
            .add_deep(
                parse_pattern(&alphabet, "p(?x)").unwrap(),
                BTreeMap::new(),
                qf,
                Provenance::Original,
            )
            .unwrap();
        assert_eq!(
            saturate(&sys, &with_deep, &SaturationConfig::default()).unwrap_err(),
            SaturationError::DeepTransitionsInInput
        );

        let mut reserved = target(&alphabet, &["p(bot())"]);
        reserved
            .add_reserved_state("__x", alphabet.conf_sort())
            .unwrap();
        assert_eq!(
            saturate(&sys, &reserved, &SaturationConfig::default()).unwrap_err(),
            SaturationError::ReservedInputState("__x".to_string())
        );
    }

    #[test]
    fn max_rounds_stops_early() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[("pop", "p(a(?x))", "p(?x)")]);
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let config = SaturationConfig {
            max_rounds: Some(1),
            ..SaturationConfig::default()
        };
        let result = saturate(&sys, &tgt, &config).unwrap();
        assert_eq!(result.status(), SaturationStatus::BudgetExceeded);
        assert_eq!(result.stats().rounds, 1);
        assert_eq!(result.automaton().deep_transitions().len(), 1);
    }

    #[test]
    fn transition_budget_stops_early() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[("pop", "p(a(?x))", "p(?x)")]);
        let tgt = target(&alphabet, &["p(a(a(bot())))"]);
        let config = SaturationConfig {
            transition_budget: 2,
            ..SaturationConfig::default()
        };
        let result = saturate(&sys, &tgt, &config).unwrap();
        assert_eq!(result.status(), SaturationStatus::BudgetExceeded);
        assert!(result.stats().transitions_added <= 2);
    }

    #[test]
    fn alternating_pops_exhaust_budget_soundly() {
        let alphabet = alpha();
        let sys = system(
            &alphabet,
            &[("pa", "p(a(?x))", "p(?x)"), ("pb", "p(b(?x))", "p(?x)")],
        );
        let tgt = target(&alphabet, &["p(bot())"]);
        let config = SaturationConfig {
            derived_budget: 40,
            ..SaturationConfig::default()
        };
        let result = saturate(&sys, &tgt, &config).unwrap();
        // Alternation keeps minting fresh derived identities; acceleration
        // only collapses chains over a single spine.
        assert_eq!(result.status(), SaturationStatus::BudgetExceeded);
        let is_target = |c: &Term| result.accepts_target(c);
        for conf in lang(&result, 6) {
            let verdict = prestar_member(
                &sys,
                &conf,
                is_target,
                OracleLimits {
                    max_steps: 10,
                    ..OracleLimits::default()
                },
            );
            assert!(verdict.is_member(), "not backward-reachable");
        }
    }

    #[test]
    fn eval_unconstrained_child_yields_empty_demands() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[]);
        let mut aut = Afta::new(alphabet.clone());
        let qf = aut.add_state("qf", alphabet.conf_sort()).unwrap();
        aut.add_plain(
            alphabet.symbol_id("q").unwrap(),
            vec![BTreeSet::new()],
            qf,
            Provenance::Original,
        )
        .unwrap();
        aut.set_final(qf).unwrap();
        let config = SaturationConfig::default();
        let mut engine = Engine::new(&sys, aut, &config);
        engine.context = Some(("r".to_string(), qf));

        let items = engine
            .eval(&parse_pattern(&alphabet, "q(?x)").unwrap(), qf)
            .unwrap();
        assert_eq!(items.len(), 1);
        assert!(items[0].theta.is_empty());

        let none = engine
            .eval(&parse_pattern(&alphabet, "p(?x)").unwrap(), qf)
            .unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn eval_walks_structured_right_sides() {
        let alphabet = alpha();
        let sys = system(&alphabet, &[]);
        let stack_sort = alphabet.sort_id("stack").unwrap();
        let mut aut = Afta::new(alphabet.clone());
        let s0 = aut.add_state("s0", stack_sort).unwrap();
        let s1 = aut.add_state("s1", stack_sort).unwrap();
        let qf = aut.add_state("qf", alphabet.conf_sort()).unwrap();
        let sym = |n: &str| alphabet.symbol_id(n).unwrap();
        aut.add_plain(sym("bot"), vec![], s0, Provenance::Original)
            .unwrap();
        aut.add_plain(sym("b"), vec![BTreeSet::from([s0])], s1, Provenance::Original)
            .unwrap();
        aut.add_plain(sym("q"), vec![BTreeSet::from([s1])], qf, Provenance::Original)
            .unwrap();
        aut.set_final(qf).unwrap();
        let config = SaturationConfig::default();
        let mut engine = Engine::new(&sys, aut, &config);
        engine.context = Some(("r".to_string(), qf));

        let items = engine
            .eval(&parse_pattern(&alphabet, "q(b(?x))").unwrap(), qf)
            .unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].theta["x"], BTreeSet::from([s0]));

        // The b-demand cannot be met by an a-rooted fragment.
        let none = engine
            .eval(&parse_pattern(&alphabet, "q(a(?x))").unwrap(), qf)
            .unwrap();
        assert!(none.is_empty());
    }
}
