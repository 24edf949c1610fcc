//! Graphviz output.

use std::fmt::Write;

use crate::des::Des;
use crate::observer::ObserverAutomaton;
use crate::stateset::StateSet;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn set_label(des: &Des, set: &StateSet) -> String {
    let names: Vec<_> = set.iter().map(|q| des.state_name(q).into_owned()).collect();
    format!("{{{}}}", names.join(","))
}

/// The system itself. Secret states are double circles, nonsecret states
/// plain circles, neutral states dashed; unobservable edges are dashed.
pub fn des_to_dot(des: &Des) -> String {
    let mut out = String::from("digraph des {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in 0..des.state_count() {
        let style = if des.secret().contains(q) {
            "shape=doublecircle"
        } else if des.nonsecret().contains(q) {
            "shape=circle"
        } else {
            "shape=circle, style=dashed"
        };
        writeln!(out, "  s{q} [label={}, {style}];", quote(&des.state_name(q))).unwrap();
    }
    for q in des.initial().iter() {
        writeln!(out, "  __start -> s{q};").unwrap();
    }
    for t in des.transitions() {
        let dashed = if des.events().is_observable(t.event) {
            ""
        } else {
            ", style=dashed"
        };
        writeln!(
            out,
            "  s{} -> s{} [label={}{dashed}];",
            t.source,
            t.target,
            quote(des.events().name(t.event))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// The observer of `des`. The empty estimate and the transitions into it are
/// left out.
pub fn observer_to_dot(des: &Des, obs: &ObserverAutomaton) -> String {
    let mut out = String::from("digraph observer {\n  rankdir=LR;\n  __start [shape=point];\n");
    for (i, set) in obs.states().iter().enumerate() {
        writeln!(out, "  x{i} [label={}, shape=box];", quote(&set_label(des, set))).unwrap();
    }
    writeln!(out, "  __start -> x{};", obs.initial()).unwrap();
    for (i, e, j) in obs.transitions() {
        writeln!(out, "  x{i} -> x{j} [label={}];", quote(des.events().name(e))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::observer::observer;

    #[test]
    fn fig1_observer_dot() {
        let g = fixtures::fig1();
        let dot = observer_to_dot(&g, &observer(&g));
        assert!(dot.contains("label=\"{1}\""));
        assert!(dot.contains("label=\"{2,4}\""));
        assert!(!dot.contains("{}"));
        assert_eq!(dot.matches(" -> ").count(), 1 + observer(&g).transition_count());
    }

    #[test]
    fn des_dot_marks_secret_and_unobservable() {
        let g = fixtures::fig5();
        let dot = des_to_dot(&g);
        assert!(dot.contains("s1 [label=\"2\", shape=doublecircle]"));
        assert!(dot.contains("[label=\"u\", style=dashed]"));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
