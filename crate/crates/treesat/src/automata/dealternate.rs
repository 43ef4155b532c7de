//! Alternation removal.
//!
//! Two stages. Deep transitions first become plain ones: each application
//! node of the pattern gets a fresh state accepting exactly the instances of
//! that fragment, variables contribute their constraint sets directly. Then a
//! downward subset construction starting from the final singletons replaces
//! conjunctive constraint sets: the subset state for S accepts the
//! intersection of the languages of S's members, and the empty subset accepts
//! every term of its sort, which falls out of the empty choice product with
//! no special pleading.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use thiserror::Error;

use super::{Afta, Nfta, PlainTransition, Provenance, StateId};
use crate::alphabet::SortId;
use crate::term::Pattern;

/// Default cap on subset states created during de-alternation.
pub const DEFAULT_DEALTERNATION_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("de-alternation exceeded its budget of {budget} subset states")]
pub struct DealternationBudget {
    pub budget: usize,
}

pub(super) fn dealternate(input: &Afta, budget: usize) -> Result<Nfta, DealternationBudget> {
    let compiled = compile_deeps(input);
    subset_construction(&compiled, budget)
}

/// Replaces every deep transition with plain ones over fresh spine states.
fn compile_deeps(input: &Afta) -> Afta {
    let mut out = input.clone();
    out.deeps.clear();
    for (i, deep) in input.deeps.iter().enumerate() {
        let Pattern::App { sym, children } = &deep.pattern else {
            unreachable!("deep patterns are control-rooted applications");
        };
        let mut counter = 0usize;
        let constraints: Vec<BTreeSet<StateId>> = children
            .iter()
            .map(|c| compile_fragment(&mut out, c, &deep.theta, i, &mut counter))
            .collect();
        out.add_plain(*sym, constraints, deep.target, deep.provenance.clone())
            .expect("compiled deep transition is sort-correct");
    }
    out
}

fn compile_fragment(
    out: &mut Afta,
    pat: &Pattern,
    theta: &BTreeMap<String, BTreeSet<StateId>>,
    deep_index: usize,
    counter: &mut usize,
) -> BTreeSet<StateId> {
    match pat {
        Pattern::Var(v) => theta.get(&v.name).cloned().unwrap_or_default(),
        Pattern::App { sym, children } => {
            let constraints: Vec<BTreeSet<StateId>> = children
                .iter()
                .map(|c| compile_fragment(out, c, theta, deep_index, counter))
                .collect();
            let sort = out.alphabet.symbol(*sym).result;
            let fresh = loop {
                let name = format!("__deep{deep_index}_{counter}");
                *counter += 1;
                match out.add_reserved_state(&name, sort) {
                    Ok(id) => break id,
                    Err(_) => continue,
                }
            };
            out.add_plain(*sym, constraints, fresh, Provenance::Derived)
                .expect("fragment transition is sort-correct");
            [fresh].into()
        }
    }
}

/// Downward subset construction on a deep-free automaton. The subset state
/// for S accepts exactly the terms accepted at every member of S.
fn subset_construction(a: &Afta, budget: usize) -> Result<Nfta, DealternationBudget> {
    let mut st = Subsets {
        out: Afta::new(a.alphabet.clone()),
        ids: BTreeMap::new(),
        work: VecDeque::new(),
        budget,
    };

    for &qf in &a.finals {
        let id = st.get_or_create(a.state_sort(qf), [qf].into())?;
        st.out.set_final(id).expect("finals keep the conf sort");
    }

    while let Some((sort, subset)) = st.work.pop_front() {
        let here = st.ids[&(sort, subset.clone())];
        for &sym in a.alphabet.symbols_with_result(sort) {
            let symbol = a.alphabet.symbol(sym);
            let per_state: Vec<Vec<&PlainTransition>> = subset
                .iter()
                .map(|&q| a.plains_into(sym, q).collect())
                .collect();
            if per_state.iter().any(|v| v.is_empty()) {
                continue;
            }
            // The empty subset has an empty product, which must still yield
            // the single empty choice: it accepts everything of its sort.
            let choices: Vec<Vec<&PlainTransition>> = if per_state.is_empty() {
                vec![Vec::new()]
            } else {
                per_state
                    .iter()
                    .map(|v| v.iter().copied())
                    .multi_cartesian_product()
                    .collect()
            };
            for choice in choices {
                let mut constraints = Vec::with_capacity(symbol.arity());
                for i in 0..symbol.arity() {
                    let mut union: BTreeSet<StateId> = BTreeSet::new();
                    for tr in &choice {
                        union.extend(tr.constraints[i].iter().copied());
                    }
                    let child_id = st.get_or_create(symbol.args[i], union)?;
                    constraints.push(BTreeSet::from([child_id]));
                }
                st.out
                    .add_plain(sym, constraints, here, Provenance::Original)
                    .expect("subset transition is sort-correct");
            }
        }
    }
    Ok(Nfta { inner: st.out })
}

struct Subsets {
    out: Afta,
    ids: BTreeMap<(SortId, BTreeSet<StateId>), StateId>,
    work: VecDeque<(SortId, BTreeSet<StateId>)>,
    budget: usize,
}

impl Subsets {
    fn get_or_create(
        &mut self,
        sort: SortId,
        subset: BTreeSet<StateId>,
    ) -> Result<StateId, DealternationBudget> {
        if let Some(&id) = self.ids.get(&(sort, subset.clone())) {
            return Ok(id);
        }
        if self.ids.len() >= self.budget {
            return Err(DealternationBudget {
                budget: self.budget,
            });
        }
        let name = format!("__s{}", self.ids.len());
        let id = self
            .out
            .add_reserved_state(&name, sort)
            .expect("subset state names are fresh by count");
        self.ids.insert((sort, subset.clone()), id);
        self.work.push_back((sort, subset));
        Ok(id)
    }
}
