//! Root rewriting systems over configurations.
//!
//! A rule rewrites a configuration at the root: both sides are rooted by a
//! control symbol, control never occurs deeper, the left side is linear, and
//! the right side only uses variables the left side binds. Dropping and
//! duplicating variables on the right is allowed; that is what lets the
//! encodings destroy one stack while copying another.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::alphabet::{is_identifier, RankedAlphabet};
use crate::term::{match_root, Pattern, Substitution, Term, TermError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Lhs => "left side",
            Side::Rhs => "right side",
        })
    }
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule label `{0}` is not an identifier")]
    BadLabel(String),
    #[error("rule label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("rule `{label}`: {side} is not rooted by a control symbol")]
    NotControlRooted { label: String, side: Side },
    #[error("rule `{label}`: {side} contains control symbol `{symbol}` below the root")]
    ControlBelowRoot {
        label: String,
        side: Side,
        symbol: String,
    },
    #[error("rule `{label}`: {side} is ill-sorted: {source}")]
    IllSorted {
        label: String,
        side: Side,
        source: TermError,
    },
    #[error("rule `{label}`: variable `?{var}` occurs twice on the left side")]
    NonLinearLhs { label: String, var: String },
    #[error("rule `{label}`: right side uses `?{var}`, which the left side does not bind")]
    FreshRhsVariable { label: String, var: String },
    #[error("rule `{label}`: variable `?{var}` has different sorts on the two sides")]
    VariableSortMismatch { label: String, var: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub label: String,
    pub lhs: Pattern,
    pub rhs: Pattern,
}

/// A validated system. Rules are kept sorted by label so every iteration
/// order downstream, and every serialized artifact, is independent of the
/// order rules were supplied in.
#[derive(Debug, Clone)]
pub struct RootRewriteSystem {
    alphabet: RankedAlphabet,
    rules: Vec<RewriteRule>,
}

impl RootRewriteSystem {
    pub fn new(
        alphabet: RankedAlphabet,
        mut rules: Vec<RewriteRule>,
    ) -> Result<RootRewriteSystem, RuleError> {
        rules.sort_by(|a, b| a.label.cmp(&b.label));
        let mut seen = BTreeSet::new();
        for rule in &rules {
            if !is_identifier(&rule.label) {
                return Err(RuleError::BadLabel(rule.label.clone()));
            }
            if !seen.insert(rule.label.clone()) {
                return Err(RuleError::DuplicateLabel(rule.label.clone()));
            }
            check_rule(&alphabet, rule)?;
        }
        Ok(RootRewriteSystem { alphabet, rules })
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    /// Rules in label order.
    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, label: &str) -> Option<&RewriteRule> {
        self.rules
            .binary_search_by(|r| r.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.rules[i])
    }

    /// All one-step successors of `term`, in rule label order. Each rule
    /// contributes at most one: matching happens at the root only and the
    /// left side is linear, so the match is unique when it exists.
    pub fn rewrite_once(&self, term: &Term) -> Vec<(String, Substitution, Term)> {
        let mut out = Vec::new();
        for rule in &self.rules {
            if let Some(subst) = match_root(&rule.lhs, term) {
                let next = subst
                    .apply(&self.alphabet, &rule.rhs)
                    .expect("validated rule instantiates cleanly");
                out.push((rule.label.clone(), subst, next));
            }
        }
        out
    }

    /// Applies the rule named `label` at the root, if it matches.
    pub fn step(&self, term: &Term, label: &str) -> Option<(Substitution, Term)> {
        let rule = self.rule(label)?;
        let subst = match_root(&rule.lhs, term)?;
        let next = subst
            .apply(&self.alphabet, &rule.rhs)
            .expect("validated rule instantiates cleanly");
        Some((subst, next))
    }
}

fn check_rule(alphabet: &RankedAlphabet, rule: &RewriteRule) -> Result<(), RuleError> {
    for (side, pat) in [(Side::Lhs, &rule.lhs), (Side::Rhs, &rule.rhs)] {
        let root = pat.root_symbol().ok_or_else(|| RuleError::NotControlRooted {
            label: rule.label.clone(),
            side,
        })?;
        if !alphabet.is_control(root) {
            return Err(RuleError::NotControlRooted {
                label: rule.label.clone(),
                side,
            });
        }
        if let Some(sym) = control_below_root(alphabet, pat) {
            return Err(RuleError::ControlBelowRoot {
                label: rule.label.clone(),
                side,
                symbol: alphabet.symbol(sym).name.clone(),
            });
        }
        pat.check(alphabet).map_err(|source| RuleError::IllSorted {
            label: rule.label.clone(),
            side,
            source,
        })?;
    }

    let occ = rule.lhs.var_occurrences();
    let mut seen = BTreeSet::new();
    for v in &occ {
        if !seen.insert(v.name.as_str()) {
            return Err(RuleError::NonLinearLhs {
                label: rule.label.clone(),
                var: v.name.clone(),
            });
        }
    }

    let lhs_vars = rule.lhs.variables();
    for v in rule.rhs.variables() {
        match lhs_vars.iter().find(|u| u.name == v.name) {
            None => {
                return Err(RuleError::FreshRhsVariable {
                    label: rule.label.clone(),
                    var: v.name,
                })
            }
            Some(u) if u.sort != v.sort => {
                return Err(RuleError::VariableSortMismatch {
                    label: rule.label.clone(),
                    var: v.name,
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

fn control_below_root(
    alphabet: &RankedAlphabet,
    pat: &Pattern,
) -> Option<crate::alphabet::SymbolId> {
    fn deep(alphabet: &RankedAlphabet, pat: &Pattern) -> Option<crate::alphabet::SymbolId> {
        match pat {
            Pattern::Var(_) => None,
            Pattern::App { sym, children } => {
                if alphabet.is_control(*sym) {
                    return Some(*sym);
                }
                children.iter().find_map(|c| deep(alphabet, c))
            }
        }
    }
    match pat {
        Pattern::Var(_) => None,
        Pattern::App { children, .. } => children.iter().find_map(|c| deep(alphabet, c)),
    }
}

/// One replayable rewrite step: the rule that fired and the full left-side
/// match it fired with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub subst: Substitution,
}

pub type Trace = Vec<TraceStep>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("step {step}: no rule labeled `{label}`")]
    UnknownRule { step: usize, label: String },
    #[error("step {step}: rule `{label}` does not match the current configuration")]
    NoMatch { step: usize, label: String },
    #[error("step {step}: recorded bindings disagree with the unique match of `{label}`")]
    SubstitutionMismatch { step: usize, label: String },
}

/// Replays a trace from `start`. Each recorded substitution must agree with
/// the unique root match on every left-side variable, so traces cannot smuggle
/// in bindings the rule never made.
pub fn apply_trace(
    system: &RootRewriteSystem,
    start: &Term,
    trace: &[TraceStep],
) -> Result<Term, TraceError> {
    let mut current = start.clone();
    for (i, step) in trace.iter().enumerate() {
        let rule = system.rule(&step.rule).ok_or_else(|| TraceError::UnknownRule {
            step: i,
            label: step.rule.clone(),
        })?;
        let subst = match_root(&rule.lhs, &current).ok_or_else(|| TraceError::NoMatch {
            step: i,
            label: step.rule.clone(),
        })?;
        let consistent = rule
            .lhs
            .variables()
            .iter()
            .all(|v| step.subst.get(&v.name) == subst.get(&v.name));
        if !consistent {
            return Err(TraceError::SubstitutionMismatch {
                step: i,
                label: step.rule.clone(),
            });
        }
        current = subst
            .apply(system.alphabet(), &rule.rhs)
            .expect("validated rule instantiates cleanly");
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_pattern, parse_term};

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

    fn rule(alphabet: &RankedAlphabet, label: &str, lhs: &str, rhs: &str) -> RewriteRule {
        RewriteRule {
            label: label.to_string(),
            lhs: parse_pattern(alphabet, lhs).unwrap(),
            rhs: parse_pattern(alphabet, rhs).unwrap(),
        }
    }

    fn system(rules: &[(&str, &str, &str)]) -> RootRewriteSystem {
        let alphabet = alpha();
        let rules = rules
            .iter()
            .map(|(l, lh, rh)| rule(&alphabet, l, lh, rh))
            .collect();
        RootRewriteSystem::new(alphabet, rules).unwrap()
    }

    #[test]
    fn rules_are_stored_in_label_order() {
        let sys = system(&[
            ("r2", "p(a(?x))", "q(?x)"),
            ("r1", "p(?x)", "p(a(?x))"),
        ]);
        let labels: Vec<&str> = sys.rules().iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["r1", "r2"]);
    }

    #[test]
    fn rewrite_once_fires_matching_rules_in_label_order() {
        let sys = system(&[
            ("grow", "p(?x)", "p(a(?x))"),
            ("pop", "p(a(?x))", "q(?x)"),
        ]);
        let t = parse_term(sys.alphabet(), "p(a(bot))").unwrap();
        let succs = sys.rewrite_once(&t);
        let shown: Vec<(String, String)> = succs
            .iter()
            .map(|(l, _, t)| (l.clone(), t.display(sys.alphabet()).to_string()))
            .collect();
        assert_eq!(
            shown,
            [
                ("grow".to_string(), "p(a(a(bot())))".to_string()),
                ("pop".to_string(), "q(bot())".to_string()),
            ]
        );
    }

    #[test]
    fn dropping_and_duplicating_variables() {
        let alphabet = RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .control("p", &["stack", "stack"])
            .finish()
            .unwrap();
        let dup = RewriteRule {
            label: "dup".into(),
            lhs: parse_pattern(&alphabet, "p(?x,?y)").unwrap(),
            rhs: parse_pattern(&alphabet, "p(?x,?x)").unwrap(),
        };
        let sys = RootRewriteSystem::new(alphabet, vec![dup]).unwrap();
        let t = parse_term(sys.alphabet(), "p(a(bot),bot)").unwrap();
        let succs = sys.rewrite_once(&t);
        assert_eq!(succs.len(), 1);
        assert_eq!(
            succs[0].2.display(sys.alphabet()).to_string(),
            "p(a(bot()),a(bot()))"
        );
    }

    #[test]
    fn non_control_root_rejected() {
        let alphabet = alpha();
        let bad = rule(&alphabet, "r", "p(?x)", "p(a(?x))");
        let mut stack_rooted = bad.clone();
        stack_rooted.lhs = parse_pattern(&alphabet, "a(?x)").unwrap();
        let err = RootRewriteSystem::new(alphabet, vec![stack_rooted]).unwrap_err();
        assert!(matches!(err, RuleError::NotControlRooted { .. }));
    }

    #[test]
    fn nonlinear_lhs_rejected() {
        let alphabet = RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .control("p", &["stack", "stack"])
            .finish()
            .unwrap();
        let bad = RewriteRule {
            label: "r".into(),
            lhs: parse_pattern(&alphabet, "p(?x,?x)").unwrap(),
            rhs: parse_pattern(&alphabet, "p(?x,?x)").unwrap(),
        };
        let err = RootRewriteSystem::new(alphabet, vec![bad]).unwrap_err();
        assert!(matches!(err, RuleError::NonLinearLhs { .. }));
    }

    #[test]
    fn fresh_rhs_variable_rejected() {
        let alphabet = alpha();
        let bad = rule(&alphabet, "r", "p(a(?x))", "q(?x)");
        let mut fresh = bad;
        fresh.rhs = parse_pattern(&alphabet, "q(?zz)").unwrap();
        let err = RootRewriteSystem::new(alphabet, vec![fresh]).unwrap_err();
        assert!(matches!(err, RuleError::FreshRhsVariable { .. }));
    }

    #[test]
    fn duplicate_label_rejected() {
        let alphabet = alpha();
        let r1 = rule(&alphabet, "r", "p(?x)", "q(?x)");
        let r2 = rule(&alphabet, "r", "q(?x)", "p(?x)");
        let err = RootRewriteSystem::new(alphabet, vec![r1, r2]).unwrap_err();
        assert!(matches!(err, RuleError::DuplicateLabel(_)));
    }

    #[test]
    fn trace_replay_checks_bindings() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(a(a(bot)))").unwrap();
        let (subst1, mid) = sys.step(&start, "pop").unwrap();
        let (subst2, end) = sys.step(&mid, "pop").unwrap();
        let trace = vec![
            TraceStep {
                rule: "pop".into(),
                subst: subst1,
            },
            TraceStep {
                rule: "pop".into(),
                subst: subst2.clone(),
            },
        ];
        assert_eq!(apply_trace(&sys, &start, &trace).unwrap(), end);

        // A wrong binding in the middle is caught.
        let mut forged = trace;
        forged[0].subst = subst2;
        assert!(matches!(
            apply_trace(&sys, &start, &forged),
            Err(TraceError::SubstitutionMismatch { step: 0, .. })
        ));
    }

    #[test]
    fn trace_replay_rejects_unknown_rule_and_bad_match() {
        let sys = system(&[("pop", "p(a(?x))", "p(?x)")]);
        let start = parse_term(sys.alphabet(), "p(bot)").unwrap();
        let t = vec![TraceStep {
            rule: "pop".into(),
            subst: Substitution::new(),
        }];
        assert!(matches!(
            apply_trace(&sys, &start, &t),
            Err(TraceError::NoMatch { .. })
        ));
        let t = vec![TraceStep {
            rule: "ghost".into(),
            subst: Substitution::new(),
        }];
        assert!(matches!(
            apply_trace(&sys, &start, &t),
            Err(TraceError::UnknownRule { .. })
        ));
    }
}
