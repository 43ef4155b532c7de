//! Brute-force backward-reachability oracle.
//!
//! Membership of `t` in pre*(T) is checked by forward breadth-first search
//! from `t`, bounded by a rewrite-step count and a visited cap. A positive
//! answer always comes with a genuine rewrite trace, so positives are
//! trustworthy unconditionally. A negative answer is exact only when the
//! forward closure was exhausted before either bound was hit;
//! [`OracleResult::NotMember`] records which case occurred.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::rewrite::{RootRewriteSystem, Trace, TraceStep};
use crate::term::Term;

#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    /// Rewrite sequences longer than this are not explored.
    pub max_steps: usize,
    /// The search stops growing after this many distinct configurations.
    pub max_visited: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_steps: 8,
            max_visited: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    /// A rewrite sequence from the queried configuration into the target set,
    /// shortest first by construction of the search.
    Member(Trace),
    /// No target was found. `exhaustive` is true when the forward closure was
    /// fully explored within the limits, so the answer is exact; otherwise a
    /// longer or wider path could have been missed.
    NotMember { exhaustive: bool },
}

impl OracleResult {
    pub fn is_member(&self) -> bool {
        matches!(self, OracleResult::Member(_))
    }
}

/// BFS from `start`, expanding successors in rule label order, so among
/// shortest traces the lexicographically first by labels is found.
pub fn prestar_member(
    system: &RootRewriteSystem,
    start: &Term,
    mut is_target: impl FnMut(&Term) -> bool,
    limits: OracleLimits,
) -> OracleResult {
    if is_target(start) {
        return OracleResult::Member(Vec::new());
    }
    let mut visited: BTreeSet<Term> = BTreeSet::new();
    let mut parent: BTreeMap<Term, (Term, TraceStep)> = BTreeMap::new();
    let mut frontier: VecDeque<Term> = VecDeque::new();
    visited.insert(start.clone());
    frontier.push_back(start.clone());
    let mut truncated = false;

    for _ in 0..limits.max_steps {
        let mut next_frontier: VecDeque<Term> = VecDeque::new();
        while let Some(current) = frontier.pop_front() {
            for (label, subst, next) in system.rewrite_once(&current) {
                if visited.contains(&next) {
                    continue;
                }
                let step = TraceStep {
                    rule: label,
                    subst,
                };
                if is_target(&next) {
                    let mut trace = trace_to(&parent, start, &current);
                    trace.push(step);
                    return OracleResult::Member(trace);
                }
                if visited.len() >= limits.max_visited {
                    truncated = true;
                    continue;
                }
                visited.insert(next.clone());
                parent.insert(next.clone(), (current.clone(), step));
                next_frontier.push_back(next);
            }
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    OracleResult::NotMember {
        exhaustive: frontier.is_empty() && !truncated,
    }
}

/// Convenience wrapper for a finite, explicit target set.
pub fn prestar_member_of_set(
    system: &RootRewriteSystem,
    start: &Term,
    targets: &BTreeSet<Term>,
    limits: OracleLimits,
) -> OracleResult {
    prestar_member(system, start, |t| targets.contains(t), limits)
}

/// Every configuration reachable from `start` within the limits, plus whether
/// that is the whole forward closure.
pub fn reachable_set(
    system: &RootRewriteSystem,
    start: &Term,
    limits: OracleLimits,
) -> (BTreeSet<Term>, bool) {
    let mut visited: BTreeSet<Term> = BTreeSet::new();
    let mut frontier: VecDeque<Term> = VecDeque::new();
    let mut truncated = false;
    visited.insert(start.clone());
    frontier.push_back(start.clone());
    for _ in 0..limits.max_steps {
        let mut next_frontier: VecDeque<Term> = VecDeque::new();
        while let Some(current) = frontier.pop_front() {
            for (_, _, next) in system.rewrite_once(&current) {
                if visited.contains(&next) {
                    continue;
                }
                if visited.len() >= limits.max_visited {
                    truncated = true;
                    continue;
                }
                visited.insert(next.clone());
                next_frontier.push_back(next);
            }
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    (visited, frontier.is_empty() && !truncated)
}

fn trace_to(parent: &BTreeMap<Term, (Term, TraceStep)>, start: &Term, end: &Term) -> Trace {
    let mut steps = Vec::new();
    let mut cur = end;
    while cur != start {
        let (prev, step) = parent
            .get(cur)
            .expect("every visited configuration but the start has a parent");
        steps.push(step.clone());
        cur = prev;
    }
    steps.reverse();
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::RankedAlphabet;
    use crate::parse::{parse_pattern, parse_term};
    use crate::rewrite::{apply_trace, RewriteRule};

    fn system(rules: &[(&str, &str, &str)]) -> RootRewriteSystem {
        let alphabet = RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .stack("b", &["stack"], "stack")
            .control("p", &["stack"])
            .control("q", &["stack"])
            .finish()
            .unwrap();
        let rules = rules
            .iter()
            .map(|(l, lh, rh)| RewriteRule {
                label: l.to_string(),
                lhs: parse_pattern(&alphabet, lh).unwrap(),
                rhs: parse_pattern(&alphabet, rh).unwrap(),
            })
            .collect();
        RootRewriteSystem::new(alphabet, rules).unwrap()
    }

    #[test]
    fn finds_shortest_trace_and_it_replays() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(a(a(bot)))").unwrap();
        let target = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let targets: BTreeSet<Term> = [target.clone()].into();
        match prestar_member_of_set(&sys, &start, &targets, OracleLimits::default()) {
            OracleResult::Member(trace) => {
                assert_eq!(trace.len(), 2);
                assert_eq!(apply_trace(&sys, &start, &trace).unwrap(), target);
            }
            other => panic!("expected membership, got {other:?}"),
        }
    }

    #[test]
    fn target_hit_at_zero_steps() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let t = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let targets: BTreeSet<Term> = [t.clone()].into();
        assert_eq!(
            prestar_member_of_set(&sys, &t, &targets, OracleLimits::default()),
            OracleResult::Member(Vec::new())
        );
    }

    #[test]
    fn negative_is_exhaustive_on_shrinking_systems() {
        // Pops only: the forward closure from any start is finite.
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(a(b(bot)))").unwrap();
        let target = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let targets: BTreeSet<Term> = [target].into();
        // The b blocks every pop below it.
        assert_eq!(
            prestar_member_of_set(&sys, &start, &targets, OracleLimits::default()),
            OracleResult::NotMember { exhaustive: true }
        );
    }

    #[test]
    fn growing_system_reports_truncation() {
        let sys = system(&[("grow", "p(?x)", "p(a(?x))")]);
        let start = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let target = parse_term(sys.alphabet(), "q(bot)").unwrap();
        let targets: BTreeSet<Term> = [target].into();
        assert_eq!(
            prestar_member_of_set(&sys, &start, &targets, OracleLimits::default()),
            OracleResult::NotMember { exhaustive: false }
        );
    }

    #[test]
    fn step_bound_limits_the_search() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(a(a(a(bot))))").unwrap();
        let target = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let targets: BTreeSet<Term> = [target].into();
        let tight = OracleLimits {
            max_steps: 2,
            max_visited: 1000,
        };
        assert_eq!(
            prestar_member_of_set(&sys, &start, &targets, tight),
            OracleResult::NotMember { exhaustive: false }
        );
        let enough = OracleLimits {
            max_steps: 3,
            max_visited: 1000,
        };
        assert!(prestar_member_of_set(&sys, &start, &targets, enough).is_member());
    }

    #[test]
    fn shortest_trace_prefers_label_order() {
        // Two one-step ways into the target; label order picks x_pop.
        let sys = system(&[
            ("y_pop", "p(a(?x))", "q(?x)"),
            ("x_pop", "p(a(?x))", "q(?x)"),
        ]);
        let start = parse_term(sys.alphabet(), "p(a(bot))").unwrap();
        let target = parse_term(sys.alphabet(), "q(bot)").unwrap();
        let targets: BTreeSet<Term> = [target].into();
        match prestar_member_of_set(&sys, &start, &targets, OracleLimits::default()) {
            OracleResult::Member(trace) => {
                assert_eq!(trace.len(), 1);
                assert_eq!(trace[0].rule, "x_pop");
            }
            other => panic!("expected membership, got {other:?}"),
        }
    }

    #[test]
    fn reachable_set_of_pop_chain() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(a(a(bot)))").unwrap();
        let (set, complete) = reachable_set(&sys, &start, OracleLimits::default());
        assert!(complete);
        assert_eq!(set.len(), 3);
    }
}
