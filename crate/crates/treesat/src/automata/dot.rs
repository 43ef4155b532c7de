//! DOT rendering. Transitions are hyperedges, so each one becomes a small
//! box node: constraint states feed the box (edge labels say which child
//! position or pattern variable), the box feeds the target state. Output is
//! deterministic: states in id order, transitions in storage order.

use std::fmt::Write;

use super::{Afta, Provenance};

fn provenance_attrs(p: &Provenance) -> (String, &'static str) {
    match p {
        Provenance::Original => ("original".to_string(), "black"),
        Provenance::Saturated { rule } => (format!("rule {rule}"), "blue"),
        Provenance::Derived => ("derived".to_string(), "gray40"),
    }
}

pub(super) fn to_dot(a: &Afta) -> String {
    let mut s = String::new();
    s.push_str("digraph automaton {\n");
    s.push_str("  rankdir=BT;\n");
    s.push_str("  node [fontname=\"Helvetica\"];\n");
    for id in a.states() {
        let shape = if a.finals().contains(&id) {
            "doublecircle"
        } else {
            "ellipse"
        };
        writeln!(s, "  \"{}\" [shape={shape}];", a.state_name(id)).unwrap();
    }
    for (i, tr) in a.plain_transitions().iter().enumerate() {
        let (tooltip, color) = provenance_attrs(&tr.provenance);
        let label = &a.alphabet().symbol(tr.sym).name;
        writeln!(
            s,
            "  \"t{i}\" [shape=box, label=\"{label}\", tooltip=\"{tooltip}\", color={color}];"
        )
        .unwrap();
        for (pos, constraint) in tr.constraints.iter().enumerate() {
            for &state in constraint {
                writeln!(
                    s,
                    "  \"{}\" -> \"t{i}\" [label=\"{}\", color={color}];",
                    a.state_name(state),
                    pos + 1
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            "  \"t{i}\" -> \"{}\" [color={color}];",
            a.state_name(tr.target)
        )
        .unwrap();
    }
    for (i, deep) in a.deep_transitions().iter().enumerate() {
        let (tooltip, color) = provenance_attrs(&deep.provenance);
        let label = deep.pattern.display(a.alphabet()).to_string();
        writeln!(
            s,
            "  \"d{i}\" [shape=box, style=rounded, label=\"{label}\", tooltip=\"{tooltip}\", color={color}];"
        )
        .unwrap();
        for (var, constraint) in &deep.theta {
            for &state in constraint {
                writeln!(
                    s,
                    "  \"{}\" -> \"d{i}\" [label=\"?{var}\", color={color}];",
                    a.state_name(state)
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            "  \"d{i}\" -> \"{}\" [color={color}];",
            a.state_name(deep.target)
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use crate::alphabet::RankedAlphabet;
    use crate::automata::{Afta, Provenance};
    use crate::parse::parse_pattern;

    fn alpha() -> RankedAlphabet {
        RankedAlphabet::builder()
            .sort("stack")
            .stack("bot", &[], "stack")
            .stack("a", &["stack"], "stack")
            .control("p", &["stack"])
            .finish()
            .unwrap()
    }

    #[test]
    fn empty_automaton_renders_header_only() {
        let dot = Afta::new(alpha()).to_dot();
        assert!(dot.starts_with("digraph automaton {"));
        assert!(dot.ends_with("}\n"));
        assert!(!dot.contains("shape=box"));
    }

    #[test]
    fn one_transition_renders_one_box() {
        let alpha = alpha();
        let mut afta = Afta::new(alpha.clone());
        let stack = alpha.sort_id("stack").unwrap();
        let s0 = afta.add_state("s0", stack).unwrap();
        let bot = alpha.symbol_id("bot").unwrap();
        afta.add_plain(bot, vec![], s0, Provenance::Original).unwrap();
        let dot = afta.to_dot();
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert!(dot.contains("\"t0\" -> \"s0\""));
    }

    #[test]
    fn saturated_transitions_carry_rule_tooltips() {
        let alpha = alpha();
        let mut afta = Afta::new(alpha.clone());
        let stack = alpha.sort_id("stack").unwrap();
        let s0 = afta.add_state("s0", stack).unwrap();
        let qf = afta.add_state("qf", alpha.conf_sort()).unwrap();
        afta.set_final(qf).unwrap();
        afta.add_deep(
            parse_pattern(&alpha, "p(a(?x))").unwrap(),
            [("x".to_string(), BTreeSet::from([s0]))].into(),
            qf,
            Provenance::Saturated { rule: "pop".into() },
        )
        .unwrap();
        let dot = afta.to_dot();
        assert!(dot.contains("tooltip=\"rule pop\""));
        assert!(dot.contains("label=\"?x\""));
        assert!(dot.contains("doublecircle"));
    }

    #[test]
    fn output_is_stable() {
        let alpha = alpha();
        let mut afta = Afta::new(alpha.clone());
        let stack = alpha.sort_id("stack").unwrap();
        let s0 = afta.add_state("s0", stack).unwrap();
        let bot = alpha.symbol_id("bot").unwrap();
        afta.add_plain(bot, vec![], s0, Provenance::Original).unwrap();
        assert_eq!(afta.to_dot(), afta.to_dot());
    }
}
