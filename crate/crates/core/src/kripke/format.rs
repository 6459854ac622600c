//! Line-oriented `.km` model files.
//!
//! ```text
//! model m0
//! agents a b c
//! atoms ma mb mc
//! world ABC ma mb mc
//! world 0
//! edge a ABC BC
//! arrow b Areal AB
//! reflexive all
//! ```
//!
//! Relation lines may mention worlds declared further down. `reflexive`
//! takes an optional world list; without one it covers every world.

use std::fmt::Write as _;

use super::{KripkeModel, ModelBuilder, ModelError};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

/// Attaches a line number to builder errors that lack one.
fn at(line: usize, e: ModelError) -> ModelError {
    match e {
        ModelError::Parse { .. } => e,
        other => err(line, other.to_string()),
    }
}

pub fn parse_model(text: &str) -> Result<KripkeModel, ModelError> {
    parse_model_at(text, 1)
}

/// As [`parse_model`], numbering lines from `first_line` so that errors in
/// blocks embedded in other files point at the right place.
pub fn parse_model_at(text: &str, first_line: usize) -> Result<KripkeModel, ModelError> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + first_line, strip_comment(l).split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect();

    let mut name = None;
    let mut agents: Option<Vec<&str>> = None;
    let mut atoms: Option<Vec<&str>> = None;
    let mut builder: Option<ModelBuilder> = None;
    let mut last_line = first_line;

    for (line, toks) in &lines {
        last_line = *line;
        match toks[0] {
            "model" => {
                if toks.len() != 2 {
                    return Err(err(*line, "expected `model <name>`"));
                }
                if name.is_some() {
                    return Err(err(*line, "duplicate `model` line"));
                }
                name = Some(toks[1]);
            }
            "agents" | "atoms" => {
                if builder.is_some() {
                    return Err(err(*line, format!("`{}` must precede worlds", toks[0])));
                }
                let slot = if toks[0] == "agents" { &mut agents } else { &mut atoms };
                if slot.is_some() {
                    return Err(err(*line, format!("duplicate `{}` line", toks[0])));
                }
                *slot = Some(toks[1..].to_vec());
            }
            "world" => {
                if toks.len() < 2 {
                    return Err(err(*line, "expected `world <id> [<atom>...]`"));
                }
                if builder.is_none() {
                    let name = name.ok_or_else(|| err(*line, "missing `model` line"))?;
                    let agents = agents.as_deref().ok_or_else(|| err(*line, "missing `agents` line"))?;
                    let atoms = atoms.as_deref().unwrap_or(&[]);
                    builder = Some(ModelBuilder::new(name, agents, atoms).map_err(|e| at(*line, e))?);
                }
                let b = builder.as_mut().unwrap();
                b.world(toks[1], &toks[2..]).map_err(|e| at(*line, e))?;
            }
            "edge" | "arrow" | "reflexive" => {}
            other => return Err(err(*line, format!("unknown directive `{other}`"))),
        }
    }

    let mut b = builder.ok_or_else(|| match name {
        None => err(last_line, "missing `model` line"),
        Some(n) => ModelError::NoWorlds(n.to_string()),
    })?;
    let model_agents: Vec<String> = agents.unwrap_or_default().iter().map(|s| s.to_string()).collect();

    for (line, toks) in &lines {
        match toks[0] {
            "edge" | "arrow" => {
                if toks.len() != 4 {
                    return Err(err(*line, format!("expected `{} <agent> <w1> <w2>`", toks[0])));
                }
                let r = if toks[0] == "edge" {
                    b.edge(toks[1], toks[2], toks[3])
                } else {
                    b.arrow(toks[1], toks[2], toks[3])
                };
                r.map_err(|e| at(*line, e))?;
            }
            "reflexive" => {
                if toks.len() < 2 {
                    return Err(err(*line, "expected `reflexive <agent|all> [<world>...]`"));
                }
                let targets: Vec<String> = if toks[1] == "all" {
                    model_agents.clone()
                } else {
                    vec![toks[1].to_string()]
                };
                for agent in &targets {
                    if toks.len() == 2 {
                        b.reflexive(agent).map_err(|e| at(*line, e))?;
                    } else {
                        for w in &toks[2..] {
                            b.arrow(agent, w, w).map_err(|e| at(*line, e))?;
                        }
                    }
                }
            }
            _ => {}
        }
    }
    b.build()
}

/// Canonical text: declaration order for worlds, then one `arrow` line per
/// pair, agent by agent. Full loop sets are written as `reflexive <agent>`.
pub fn write_model(m: &KripkeModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", m.name());
    let _ = writeln!(out, "agents {}", m.agents().join(" "));
    if m.atoms().is_empty() {
        out.push_str("atoms\n");
    } else {
        let _ = writeln!(out, "atoms {}", m.atoms().join(" "));
    }
    for w in 0..m.world_count() {
        let atoms = m.true_atoms(w);
        if atoms.is_empty() {
            let _ = writeln!(out, "world {}", m.world_name(w));
        } else {
            let _ = writeln!(out, "world {} {}", m.world_name(w), atoms.join(" "));
        }
    }
    for (i, agent) in m.agents().iter().enumerate() {
        let rel = m.relation_at(i);
        let full_loops = rel.is_reflexive(m.world_count());
        if full_loops {
            let _ = writeln!(out, "reflexive {agent}");
        }
        for (x, y) in rel.pairs() {
            if full_loops && x == y {
                continue;
            }
            let _ = writeln!(out, "arrow {agent} {} {}", m.world_name(x), m.world_name(y));
        }
    }
    out
}
