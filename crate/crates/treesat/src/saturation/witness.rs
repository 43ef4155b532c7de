//! Rewrite traces for accepted configurations.
//!
//! A saturated automaton proves membership; a witness upgrades the proof to
//! an actual rewrite sequence from the queried configuration into the
//! original target set. Extraction re-searches the automaton instead of
//! replaying recorded evidence: at each step it takes the earliest-created
//! deep transition that applies, fires its rule, and repeats on the result
//! until the original transitions alone accept. Earlier transitions were
//! justified by less saturated automata, so following them walks back toward
//! the target; a step cap guards the search regardless.

use thiserror::Error;

use crate::automata::Provenance;
use crate::rewrite::{apply_trace, RootRewriteSystem, Trace, TraceStep};
use crate::term::{match_root, Term};

use super::SaturationResult;
use crate::automata::Afta;

pub const DEFAULT_WITNESS_LIMIT: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("configuration is not in the computed backward reachability set")]
    NotAccepted,
    #[error("no trace found within {limit} rewrite steps")]
    StepLimit { limit: usize },
}

/// Trace from `t` into the original target set, with the default step cap.
/// The empty trace is returned when `t` is already in the target set.
pub fn witness(result: &SaturationResult, t: &Term) -> Result<Trace, WitnessError> {
    witness_with_limit(result, t, DEFAULT_WITNESS_LIMIT)
}

pub fn witness_with_limit(
    result: &SaturationResult,
    t: &Term,
    limit: usize,
) -> Result<Trace, WitnessError> {
    let b = result.automaton();
    let system = result.system();
    if !b.accepts(t) {
        return Err(WitnessError::NotAccepted);
    }
    let mut trace = Vec::new();
    let mut current = t.clone();
    while !b.accepts_original(&current) {
        if trace.len() >= limit {
            return Err(WitnessError::StepLimit { limit });
        }
        // Accepted but not by the original part alone: the root acceptance
        // went through a saturated deep transition, so one must apply here.
        let Some((label, sigma)) = first_applicable_deep(b, &current) else {
            return Err(WitnessError::NotAccepted);
        };
        let rule = system
            .rule(&label)
            .expect("saturated provenance names a system rule");
        let next = sigma
            .apply(system.alphabet(), &rule.rhs)
            .expect("root match instantiates the right side");
        trace.push(TraceStep {
            rule: label,
            subst: sigma,
        });
        current = next;
    }
    Ok(trace)
}

fn first_applicable_deep(b: &Afta, t: &Term) -> Option<(String, crate::term::Substitution)> {
    for d in b.deep_transitions() {
        if !b.finals().contains(&d.target) {
            continue;
        }
        let Provenance::Saturated { rule } = &d.provenance else {
            continue;
        };
        let Some(sigma) = match_root(&d.pattern, t) else {
            continue;
        };
        let satisfied = d.theta.iter().all(|(x, need)| {
            need.is_empty() || {
                let bound = sigma.get(x).expect("root match binds every pattern variable");
                need.is_subset(&b.acc(bound))
            }
        });
        if satisfied {
            return Some((rule.clone(), sigma));
        }
    }
    None
}

/// Replays `trace` from `t` and checks the endpoint against the original
/// transitions of `automaton`. Accepts both the input automaton and a
/// saturated one, since saturation never touches original transitions.
pub fn verify_trace(
    system: &RootRewriteSystem,
    automaton: &Afta,
    trace: &Trace,
    t: &Term,
) -> bool {
    match apply_trace(system, t, trace) {
        Ok(end) => automaton.accepts_original(&end),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::RankedAlphabet;
    use crate::automata::singleton_automaton;
    use crate::parse::{parse_pattern, parse_term};
    use crate::rewrite::RewriteRule;
    use crate::saturation::{saturate, SaturationConfig, SaturationResult};
    use crate::term::Substitution;

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

    fn saturated(rules: &[(&str, &str, &str)], targets: &[&str]) -> SaturationResult {
        let alphabet = alpha();
        let rules = rules
            .iter()
            .map(|(l, lhs, rhs)| RewriteRule {
                label: l.to_string(),
                lhs: parse_pattern(&alphabet, lhs).unwrap(),
                rhs: parse_pattern(&alphabet, rhs).unwrap(),
            })
            .collect();
        let sys = RootRewriteSystem::new(alphabet.clone(), rules).unwrap();
        let terms: Vec<Term> = targets
            .iter()
            .map(|s| parse_term(&alphabet, s).unwrap())
            .collect();
        let tgt = singleton_automaton(&alphabet, &terms)
            .unwrap()
            .into_afta();
        saturate(&sys, &tgt, &SaturationConfig::default()).unwrap()
    }

    fn t(result: &SaturationResult, s: &str) -> Term {
        parse_term(result.system().alphabet(), s).unwrap()
    }

    fn stack(k: usize) -> String {
        let mut s = "bot()".to_string();
        for _ in 0..k {
            s = format!("a({s})");
        }
        s
    }

    #[test]
    fn target_members_get_the_empty_trace() {
        let result = saturated(&[("pop", "p(a(?x))", "p(?x)")], &["p(a(a(bot())))"]);
        let conf = t(&result, "p(a(a(bot())))");
        assert_eq!(witness(&result, &conf), Ok(vec![]));
    }

    #[test]
    fn single_step_trace_replays() {
        let result = saturated(
            &[
                ("l1", "p(a(?x))", "q(?x)"),
                ("l2", "p(a(?x))", "p(a(a(?x)))"),
            ],
            &["q(bot())"],
        );
        let conf = t(&result, "p(a(bot()))");
        let trace = witness(&result, &conf).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].rule, "l1");
        assert!(verify_trace(result.system(), result.automaton(), &trace, &conf));
        let end = apply_trace(result.system(), &conf, &trace).unwrap();
        assert_eq!(end, t(&result, "q(bot())"));
    }

    #[test]
    fn loop_states_unroll_into_repeated_steps() {
        let result = saturated(&[("pop", "p(a(?x))", "p(?x)")], &["p(a(a(bot())))"]);
        let conf = t(&result, &format!("p({})", stack(6)));
        let trace = witness(&result, &conf).unwrap();
        assert_eq!(trace.len(), 4);
        assert!(trace.iter().all(|s| s.rule == "pop"));
        assert!(verify_trace(result.system(), result.automaton(), &trace, &conf));
    }

    #[test]
    fn traces_cross_rules() {
        let result = saturated(
            &[("hand", "q(?y)", "p(?y)"), ("pop", "p(a(?x))", "p(?x)")],
            &["p(a(a(bot())))"],
        );
        let conf = t(&result, &format!("q({})", stack(4)));
        let trace = witness(&result, &conf).unwrap();
        let labels: Vec<&str> = trace.iter().map(|s| s.rule.as_str()).collect();
        assert_eq!(labels, ["hand", "pop", "pop"]);
        assert!(verify_trace(result.system(), result.automaton(), &trace, &conf));
    }

    #[test]
    fn non_members_are_refused() {
        let result = saturated(&[("pop", "p(a(?x))", "p(?x)")], &["p(a(a(bot())))"]);
        let conf = t(&result, "p(bot())");
        assert_eq!(witness(&result, &conf), Err(WitnessError::NotAccepted));
    }

    #[test]
    fn step_limit_is_reported() {
        let result = saturated(&[("pop", "p(a(?x))", "p(?x)")], &["p(a(a(bot())))"]);
        let conf = t(&result, &format!("p({})", stack(5)));
        assert_eq!(
            witness_with_limit(&result, &conf, 1),
            Err(WitnessError::StepLimit { limit: 1 })
        );
    }

    #[test]
    fn verify_rejects_wrong_traces() {
        let result = saturated(&[("pop", "p(a(?x))", "p(?x)")], &["p(a(a(bot())))"]);
        let conf = t(&result, &format!("p({})", stack(3)));
        // Stopping short of the target set.
        assert!(!verify_trace(result.system(), result.automaton(), &vec![], &conf));
        // A rule the system does not have.
        let bogus = vec![TraceStep {
            rule: "nope".to_string(),
            subst: Substitution::new(),
        }];
        assert!(!verify_trace(result.system(), result.automaton(), &bogus, &conf));
    }
}
