//! Ground terms, patterns with sorted variables, substitutions, matching and
//! unification.
//!
//! Height counts nodes on the longest root-to-leaf path, so a constant has
//! height 1. The canonical order on terms is height-major, then root symbol
//! name, then children left to right; `enumerate_terms` produces exactly that
//! order and every listing or serialization downstream inherits it.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::alphabet::{RankedAlphabet, SortId, SymbolId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("symbol `{symbol}` expects {expected} arguments, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {index} of `{symbol}` has sort `{got}`, expected `{expected}`")]
    ArgSort {
        symbol: String,
        index: usize,
        expected: String,
        got: String,
    },
    #[error("variable `?{var}` is used at sorts `{first}` and `{second}`")]
    VariableSortClash {
        var: String,
        first: String,
        second: String,
    },
    #[error("variable `?{0}` is not bound by the substitution")]
    UnboundVariable(String),
    #[error("substitution binds `?{var}` to a term of sort `{got}`, expected `{expected}`")]
    BindingSort {
        var: String,
        expected: String,
        got: String,
    },
}

/// A ground, well-sorted term. Construction goes through [`Term::new`], which
/// checks arity and argument sorts against the alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    sym: SymbolId,
    height: u32,
    children: Vec<Term>,
}

impl Term {
    pub fn new(
        alphabet: &RankedAlphabet,
        sym: SymbolId,
        children: Vec<Term>,
    ) -> Result<Term, TermError> {
        let symbol = alphabet.symbol(sym);
        if symbol.arity() != children.len() {
            return Err(TermError::Arity {
                symbol: symbol.name.clone(),
                expected: symbol.arity(),
                got: children.len(),
            });
        }
        for (i, (child, &want)) in children.iter().zip(&symbol.args).enumerate() {
            let got = child.sort(alphabet);
            if got != want {
                return Err(TermError::ArgSort {
                    symbol: symbol.name.clone(),
                    index: i,
                    expected: alphabet.sort_name(want).to_string(),
                    got: alphabet.sort_name(got).to_string(),
                });
            }
        }
        Ok(Term::new_unchecked(sym, children))
    }

    pub(crate) fn new_unchecked(sym: SymbolId, children: Vec<Term>) -> Term {
        let height = 1 + children.iter().map(|c| c.height).max().unwrap_or(0);
        Term {
            sym,
            height,
            children,
        }
    }

    pub fn sym(&self) -> SymbolId {
        self.sym
    }

    pub fn children(&self) -> &[Term] {
        &self.children
    }

    /// Nodes on the longest root-to-leaf path; a constant has height 1.
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    pub fn sort(&self, alphabet: &RankedAlphabet) -> SortId {
        alphabet.symbol(self.sym).result
    }

    pub fn is_configuration(&self, alphabet: &RankedAlphabet) -> bool {
        self.sort(alphabet) == alphabet.conf_sort()
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            alphabet,
        }
    }
}

/// Canonical order: height, then root symbol (ids follow name order), then
/// children lexicographically.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.height
            .cmp(&other.height)
            .then_with(|| self.sym.cmp(&other.sym))
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.alphabet.symbol(self.term.sym).name)?;
        for (i, c) in self.term.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.display(self.alphabet))?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub name: String,
    pub sort: SortId,
}

/// A term with variable leaves. `Var` carries its sort, fixed by the argument
/// position it first appears in.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Pattern {
    Var(Var),
    App { sym: SymbolId, children: Vec<Pattern> },
}

impl Pattern {
    pub fn var(name: &str, sort: SortId) -> Pattern {
        Pattern::Var(Var {
            name: name.to_string(),
            sort,
        })
    }

    pub fn app(
        alphabet: &RankedAlphabet,
        sym: SymbolId,
        children: Vec<Pattern>,
    ) -> Result<Pattern, TermError> {
        let symbol = alphabet.symbol(sym);
        if symbol.arity() != children.len() {
            return Err(TermError::Arity {
                symbol: symbol.name.clone(),
                expected: symbol.arity(),
                got: children.len(),
            });
        }
        for (i, (child, &want)) in children.iter().zip(&symbol.args).enumerate() {
            let got = child.sort(alphabet);
            if got != want {
                return Err(TermError::ArgSort {
                    symbol: symbol.name.clone(),
                    index: i,
                    expected: alphabet.sort_name(want).to_string(),
                    got: alphabet.sort_name(got).to_string(),
                });
            }
        }
        let pat = Pattern::App { sym, children };
        pat.check_var_sorts(alphabet)?;
        Ok(pat)
    }

    pub fn from_term(t: &Term) -> Pattern {
        Pattern::App {
            sym: t.sym(),
            children: t.children().iter().map(Pattern::from_term).collect(),
        }
    }

    pub fn sort(&self, alphabet: &RankedAlphabet) -> SortId {
        match self {
            Pattern::Var(v) => v.sort,
            Pattern::App { sym, .. } => alphabet.symbol(*sym).result,
        }
    }

    pub fn root_symbol(&self) -> Option<SymbolId> {
        match self {
            Pattern::Var(_) => None,
            Pattern::App { sym, .. } => Some(*sym),
        }
    }

    /// Variables in order of first occurrence, left to right.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Pattern::Var(v) => {
                if !out.iter().any(|u| u.name == v.name) {
                    out.push(v.clone());
                }
            }
            Pattern::App { children, .. } => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Every occurrence, duplicates included.
    pub fn var_occurrences(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_occurrences(&mut out);
        out
    }

    fn collect_occurrences(&self, out: &mut Vec<Var>) {
        match self {
            Pattern::Var(v) => out.push(v.clone()),
            Pattern::App { children, .. } => {
                for c in children {
                    c.collect_occurrences(out);
                }
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        let occ = self.var_occurrences();
        let distinct: std::collections::BTreeSet<&str> =
            occ.iter().map(|v| v.name.as_str()).collect();
        occ.len() == distinct.len()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Pattern::Var(_) => false,
            Pattern::App { children, .. } => children.iter().all(Pattern::is_ground),
        }
    }

    pub fn as_term(&self) -> Option<Term> {
        match self {
            Pattern::Var(_) => None,
            Pattern::App { sym, children } => {
                let kids: Option<Vec<Term>> = children.iter().map(Pattern::as_term).collect();
                Some(Term::new_unchecked(*sym, kids?))
            }
        }
    }

    /// Full well-sortedness check: arity and argument sorts at every
    /// application, plus one sort per variable name. `Pattern::app` checks
    /// incrementally, but the enum is open, so validators re-check.
    pub fn check(&self, alphabet: &RankedAlphabet) -> Result<(), TermError> {
        self.check_apps(alphabet)?;
        self.check_var_sorts(alphabet)
    }

    fn check_apps(&self, alphabet: &RankedAlphabet) -> Result<(), TermError> {
        if let Pattern::App { sym, children } = self {
            let symbol = alphabet.symbol(*sym);
            if symbol.arity() != children.len() {
                return Err(TermError::Arity {
                    symbol: symbol.name.clone(),
                    expected: symbol.arity(),
                    got: children.len(),
                });
            }
            for (i, (child, &want)) in children.iter().zip(&symbol.args).enumerate() {
                let got = child.sort(alphabet);
                if got != want {
                    return Err(TermError::ArgSort {
                        symbol: symbol.name.clone(),
                        index: i,
                        expected: alphabet.sort_name(want).to_string(),
                        got: alphabet.sort_name(got).to_string(),
                    });
                }
                child.check_apps(alphabet)?;
            }
        }
        Ok(())
    }

    fn check_var_sorts(&self, alphabet: &RankedAlphabet) -> Result<(), TermError> {
        let mut seen: BTreeMap<String, SortId> = BTreeMap::new();
        for v in self.var_occurrences() {
            match seen.entry(v.name.clone()) {
                Entry::Vacant(e) => {
                    e.insert(v.sort);
                }
                Entry::Occupied(e) => {
                    if *e.get() != v.sort {
                        return Err(TermError::VariableSortClash {
                            var: v.name,
                            first: alphabet.sort_name(*e.get()).to_string(),
                            second: alphabet.sort_name(v.sort).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> PatternDisplay<'a> {
        PatternDisplay {
            pattern: self,
            alphabet,
        }
    }
}

pub struct PatternDisplay<'a> {
    pattern: &'a Pattern,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pattern {
            Pattern::Var(v) => write!(f, "?{}", v.name),
            Pattern::App { sym, children } => {
                write!(f, "{}(", self.alphabet.symbol(*sym).name)?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", c.display(self.alphabet))?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A ground substitution: variable name to term.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn insert(&mut self, var: &str, term: Term) -> Option<Term> {
        self.map.insert(var.to_string(), term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Instantiates `pattern`; every variable must be bound at its own sort.
    pub fn apply(&self, alphabet: &RankedAlphabet, pattern: &Pattern) -> Result<Term, TermError> {
        match pattern {
            Pattern::Var(v) => {
                let t = self
                    .map
                    .get(&v.name)
                    .ok_or_else(|| TermError::UnboundVariable(v.name.clone()))?;
                let got = t.sort(alphabet);
                if got != v.sort {
                    return Err(TermError::BindingSort {
                        var: v.name.clone(),
                        expected: alphabet.sort_name(v.sort).to_string(),
                        got: alphabet.sort_name(got).to_string(),
                    });
                }
                Ok(t.clone())
            }
            Pattern::App { sym, children } => {
                let kids: Result<Vec<Term>, TermError> =
                    children.iter().map(|c| self.apply(alphabet, c)).collect();
                Ok(Term::new_unchecked(*sym, kids?))
            }
        }
    }
}

/// Matches `pattern` against the whole of `term`. For a linear pattern the
/// match is unique when it exists; repeated variables are tolerated and must
/// bind equal subterms.
pub fn match_root(pattern: &Pattern, term: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    if match_into(pattern, term, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn match_into(pattern: &Pattern, term: &Term, subst: &mut Substitution) -> bool {
    match pattern {
        Pattern::Var(v) => match subst.get(&v.name) {
            Some(bound) => bound == term,
            None => {
                subst.insert(&v.name, term.clone());
                true
            }
        },
        Pattern::App { sym, children } => {
            *sym == term.sym()
                && children.len() == term.children().len()
                && children
                    .iter()
                    .zip(term.children())
                    .all(|(p, t)| match_into(p, t, subst))
        }
    }
}

/// A unifier maps variable names to patterns. Names on the right side that
/// collide with left-side names are renamed apart first (suffix `_r`, then
/// `_r1`, `_r2`, ... until fresh), and the renamed names appear in the result.
pub type Unifier = BTreeMap<String, Pattern>;

/// Most general unifier of two patterns, `None` when they clash or the occurs
/// check fires. Sort-incompatible bindings also yield `None`.
pub fn unify(alphabet: &RankedAlphabet, left: &Pattern, right: &Pattern) -> Option<Unifier> {
    let left_names: std::collections::BTreeSet<String> =
        left.variables().into_iter().map(|v| v.name).collect();
    let mut taken: std::collections::BTreeSet<String> = left_names.clone();
    taken.extend(right.variables().into_iter().map(|v| v.name));
    let mut renames: BTreeMap<String, String> = BTreeMap::new();
    for name in right.variables().into_iter().map(|v| v.name) {
        if left_names.contains(&name) {
            let mut fresh = format!("{name}_r");
            let mut n = 0u32;
            while taken.contains(&fresh) {
                n += 1;
                fresh = format!("{name}_r{n}");
            }
            taken.insert(fresh.clone());
            renames.insert(name, fresh);
        }
    }
    let right = rename_collisions(right, &renames);

    let mut work = vec![(left.clone(), right)];
    let mut subst: Unifier = BTreeMap::new();
    while let Some((a, b)) = work.pop() {
        let a = walk(&a, &subst);
        let b = walk(&b, &subst);
        match (a, b) {
            (Pattern::Var(x), Pattern::Var(y)) if x.name == y.name => {}
            (Pattern::Var(x), other) | (other, Pattern::Var(x)) => {
                if x.sort != other.sort(alphabet) {
                    return None;
                }
                if occurs(&x.name, &other, &subst) {
                    return None;
                }
                subst.insert(x.name.clone(), other);
            }
            (
                Pattern::App { sym: f, children: fc },
                Pattern::App { sym: g, children: gc },
            ) => {
                if f != g || fc.len() != gc.len() {
                    return None;
                }
                work.extend(fc.into_iter().zip(gc));
            }
        }
    }
    // Flatten so every binding is fully resolved.
    let names: Vec<String> = subst.keys().cloned().collect();
    let mut out = Unifier::new();
    for name in names {
        let resolved = resolve(&subst[&name], &subst);
        out.insert(name, resolved);
    }
    Some(out)
}

fn rename_collisions(p: &Pattern, renames: &BTreeMap<String, String>) -> Pattern {
    match p {
        Pattern::Var(v) => match renames.get(&v.name) {
            Some(fresh) => Pattern::Var(Var {
                name: fresh.clone(),
                sort: v.sort,
            }),
            None => p.clone(),
        },
        Pattern::App { sym, children } => Pattern::App {
            sym: *sym,
            children: children
                .iter()
                .map(|c| rename_collisions(c, renames))
                .collect(),
        },
    }
}

fn walk(p: &Pattern, subst: &Unifier) -> Pattern {
    let mut cur = p.clone();
    while let Pattern::Var(v) = &cur {
        match subst.get(&v.name) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn occurs(name: &str, p: &Pattern, subst: &Unifier) -> bool {
    match p {
        Pattern::Var(v) => {
            if v.name == name {
                return true;
            }
            match subst.get(&v.name) {
                Some(next) => occurs(name, next, subst),
                None => false,
            }
        }
        Pattern::App { children, .. } => children.iter().any(|c| occurs(name, c, subst)),
    }
}

fn resolve(p: &Pattern, subst: &Unifier) -> Pattern {
    match p {
        Pattern::Var(v) => match subst.get(&v.name) {
            Some(next) => resolve(next, subst),
            None => p.clone(),
        },
        Pattern::App { sym, children } => Pattern::App {
            sym: *sym,
            children: children.iter().map(|c| resolve(c, subst)).collect(),
        },
    }
}

/// All ground terms of `sort` with height at most `depth`, in canonical order.
pub fn enumerate_terms(alphabet: &RankedAlphabet, sort: SortId, depth: u32) -> Vec<Term> {
    // cumulative[h][sort] = terms of height <= h, built layer by layer.
    let mut by_sort: BTreeMap<SortId, Vec<Term>> = BTreeMap::new();
    for h in 1..=depth {
        let mut next: BTreeMap<SortId, Vec<Term>> = BTreeMap::new();
        for (s, _) in alphabet.sorts() {
            let mut terms: Vec<Term> = Vec::new();
            for &sym in alphabet.symbols_with_result(s) {
                let symbol = alphabet.symbol(sym);
                if symbol.args.iter().any(|a| !by_sort.contains_key(a)) && symbol.arity() > 0 {
                    continue;
                }
                let pools: Vec<&[Term]> = symbol
                    .args
                    .iter()
                    .map(|a| by_sort.get(a).map(Vec::as_slice).unwrap_or(&[]))
                    .collect();
                if pools.iter().any(|p| p.is_empty()) && symbol.arity() > 0 {
                    continue;
                }
                let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
                for pool in &pools {
                    let mut grown = Vec::with_capacity(combos.len() * pool.len());
                    for combo in &combos {
                        for t in *pool {
                            let mut c = combo.clone();
                            c.push(t.clone());
                            grown.push(c);
                        }
                    }
                    combos = grown;
                }
                for kids in combos {
                    // Exact-height filter keeps the layers disjoint.
                    let child_max = kids.iter().map(|t| t.height()).max().unwrap_or(0);
                    if child_max == h - 1 {
                        terms.push(Term::new_unchecked(sym, kids));
                    }
                }
            }
            if !terms.is_empty() {
                next.insert(s, terms);
            }
        }
        for (s, mut terms) in next {
            by_sort.entry(s).or_default().append(&mut terms);
        }
    }
    let mut out = by_sort.remove(&sort).unwrap_or_default();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::RankedAlphabet;

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

    fn t(alphabet: &RankedAlphabet, text: &str) -> Term {
        crate::parse::parse_term(alphabet, text).unwrap()
    }

    fn pat(alphabet: &RankedAlphabet, text: &str) -> Pattern {
        crate::parse::parse_pattern(alphabet, text).unwrap()
    }

    #[test]
    fn height_counts_nodes() {
        let alpha = alpha();
        assert_eq!(t(&alpha, "bot()").height(), 1);
        assert_eq!(t(&alpha, "a(bot())").height(), 2);
        assert_eq!(t(&alpha, "p(a(a(bot())))").height(), 4);
    }

    #[test]
    fn ill_sorted_construction_fails() {
        let alpha = alpha();
        let p = alpha.symbol_id("p").unwrap();
        let conf_child = t(&alpha, "p(bot())");
        let err = Term::new(&alpha, p, vec![conf_child]).unwrap_err();
        assert!(matches!(err, TermError::ArgSort { .. }));
    }

    #[test]
    fn canonical_order_is_height_major() {
        let alpha = alpha();
        let mut terms = vec![
            t(&alpha, "a(bot())"),
            t(&alpha, "bot()"),
            t(&alpha, "b(bot())"),
            t(&alpha, "a(a(bot()))"),
        ];
        terms.sort();
        let shown: Vec<String> = terms.iter().map(|x| x.display(&alpha).to_string()).collect();
        assert_eq!(shown, ["bot()", "a(bot())", "b(bot())", "a(a(bot()))"]);
    }

    #[test]
    fn match_binds_each_variable() {
        let alpha = alpha();
        let p = pat(&alpha, "p(a(?x))");
        let term = t(&alpha, "p(a(b(bot())))");
        let subst = match_root(&p, &term).unwrap();
        assert_eq!(subst.get("x").unwrap(), &t(&alpha, "b(bot())"));
        // Reapplying the match restores the term.
        assert_eq!(subst.apply(&alpha, &p).unwrap(), term);
    }

    #[test]
    fn match_fails_on_symbol_clash() {
        let alpha = alpha();
        assert!(match_root(&pat(&alpha, "p(a(?x))"), &t(&alpha, "p(b(bot()))")).is_none());
        assert!(match_root(&pat(&alpha, "p(a(?x))"), &t(&alpha, "q(a(bot()))")).is_none());
    }

    #[test]
    fn repeated_variable_requires_equal_subterms() {
        let alpha = RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .stack("f", &["stack", "stack"], "stack")
            .control("p", &["stack"])
            .finish()
            .unwrap();
        let p = crate::parse::parse_pattern(&alpha, "p(f(?x,?x))").unwrap();
        let eq = crate::parse::parse_term(&alpha, "p(f(a(bot()),a(bot())))").unwrap();
        let ne = crate::parse::parse_term(&alpha, "p(f(a(bot()),bot()))").unwrap();
        assert!(match_root(&p, &eq).is_some());
        assert!(match_root(&p, &ne).is_none());
    }

    #[test]
    fn unify_binds_left_variable_to_right_structure() {
        let alpha = alpha();
        let u = unify(&alpha, &pat(&alpha, "p(?x)"), &pat(&alpha, "p(a(?z))")).unwrap();
        assert_eq!(u.get("x").unwrap(), &pat(&alpha, "a(?z)"));
    }

    #[test]
    fn unify_descends_through_common_structure() {
        let alpha = alpha();
        let u = unify(&alpha, &pat(&alpha, "p(a(?x))"), &pat(&alpha, "p(a(b(?y)))")).unwrap();
        assert_eq!(u.get("x").unwrap(), &pat(&alpha, "b(?y)"));
    }

    #[test]
    fn unify_occurs_check() {
        let alpha = alpha();
        // ?x against a(?x) after the shared name is renamed apart unifies;
        // force a genuine occurs failure with an explicit cyclic pair instead.
        let left = pat(&alpha, "p(?x)");
        let cyclic = Pattern::App {
            sym: alpha.symbol_id("p").unwrap(),
            children: vec![Pattern::App {
                sym: alpha.symbol_id("a").unwrap(),
                children: vec![Pattern::var("x", alpha.sort_id("stack").unwrap())],
            }],
        };
        // Same variable name on both sides is renamed apart, so this unifies.
        let u = unify(&alpha, &left, &cyclic).unwrap();
        assert_eq!(u.get("x").unwrap(), &pat(&alpha, "a(?x_r)"));
    }

    #[test]
    fn unify_symbol_clash_fails() {
        let alpha = alpha();
        assert!(unify(&alpha, &pat(&alpha, "p(a(?x))"), &pat(&alpha, "p(b(?y))")).is_none());
        assert!(unify(&alpha, &pat(&alpha, "p(?x)"), &pat(&alpha, "q(?y)")).is_none());
    }

    #[test]
    fn unify_applies_to_common_instance() {
        let alpha = alpha();
        let l = pat(&alpha, "p(a(?x))");
        let r = pat(&alpha, "p(?y)");
        let u = unify(&alpha, &l, &r).unwrap();
        assert_eq!(u.get("y").unwrap(), &pat(&alpha, "a(?x)"));
        assert!(u.get("x").is_none());
    }

    #[test]
    fn enumerate_counts_one_unary_symbol() {
        let alpha = RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .control("p", &["stack"])
            .finish()
            .unwrap();
        let stack = alpha.sort_id("stack").unwrap();
        let names: Vec<String> = enumerate_terms(&alpha, stack, 3)
            .iter()
            .map(|t| t.display(&alpha).to_string())
            .collect();
        assert_eq!(names, ["bot()", "a(bot())", "a(a(bot()))"]);
    }

    #[test]
    fn enumerate_counts_two_unary_symbols() {
        let alpha = alpha();
        let stack = alpha.sort_id("stack").unwrap();
        // 1 + 2 + 4 terms at heights 1, 2, 3.
        assert_eq!(enumerate_terms(&alpha, stack, 3).len(), 7);
        assert_eq!(enumerate_terms(&alpha, stack, 4).len(), 15);
        assert_eq!(enumerate_terms(&alpha, stack, 1).len(), 1);
        assert_eq!(enumerate_terms(&alpha, stack, 0).len(), 0);
    }

    #[test]
    fn enumerate_is_monotone_in_depth() {
        let alpha = alpha();
        let stack = alpha.sort_id("stack").unwrap();
        let mut prev: std::collections::BTreeSet<Term> = Default::default();
        for d in 0..5 {
            let cur: std::collections::BTreeSet<Term> =
                enumerate_terms(&alpha, stack, d).into_iter().collect();
            assert!(prev.is_subset(&cur));
            prev = cur;
        }
    }

    #[test]
    fn enumerate_conf_terms() {
        let alpha = alpha();
        let conf = alpha.conf_sort();
        // Two controls over the 7 stack terms of height <= 3.
        assert_eq!(enumerate_terms(&alpha, conf, 4).len(), 14);
    }
}
