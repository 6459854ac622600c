//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::kripke::KripkeModel;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// Agents with `from -> to`, keyed by world name so the output does not
/// depend on declaration order.
fn labels(m: &KripkeModel) -> BTreeMap<(&str, &str), Vec<&str>> {
    let mut agents: Vec<(usize, &str)> = m.agents().iter().map(String::as_str).enumerate().collect();
    agents.sort_by_key(|&(_, a)| a);
    let mut out: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for (i, agent) in agents {
        for (x, y) in m.relation_at(i).pairs() {
            out.entry((m.world_name(x), m.world_name(y))).or_default().push(agent);
        }
    }
    out
}

/// One node per world, labelled `name\n{atoms}`; the point, if any, gets a
/// double border. Each ordered pair of worlds gives one edge labelled with
/// its agents, and a pair related the same way in both directions is drawn
/// once with `dir=both`.
pub fn to_dot(m: &KripkeModel, point: Option<&str>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(m.name())).unwrap();
    let mut worlds: Vec<(usize, &str)> = m.worlds().iter().map(String::as_str).enumerate().collect();
    worlds.sort_by_key(|&(_, w)| w);
    for &(i, w) in &worlds {
        let atoms = m.true_atoms(i).join(",");
        let label = format!("\"{}\\n{{{}}}\"", escape(w), escape(&atoms));
        let extra = if point == Some(w) { ", peripheries=2" } else { "" };
        writeln!(out, "  {} [label={label}{extra}];", quote(w)).unwrap();
    }
    let edges = labels(m);
    for (&(x, y), agents) in &edges {
        let label = quote(&agents.join(","));
        if x == y {
            writeln!(out, "  {} -> {} [label={label}];", quote(x), quote(y)).unwrap();
        } else if edges.get(&(y, x)) == Some(agents) {
            if x < y {
                writeln!(out, "  {} -> {} [label={label}, dir=both];", quote(x), quote(y)).unwrap();
            }
        } else {
            writeln!(out, "  {} -> {} [label={label}];", quote(x), quote(y)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
