//! `.kmu` update files.
//!
//! ```text
//! update u_a for a
//! trial ../models/m0.km restrict "ma | mb | mc"
//! cluster A
//! backup ../models/m0.km restrict "(ma & mb) | (ma & mc) | (mb & mc)"
//! map AB AB
//! map auto        # instead of explicit pairs
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{auto_map, AprioriUpdate};
use crate::kripke::format::write_model;
use crate::source::{LineReader, Loader, ModelRef};
use crate::Result;

pub fn parse_update(text: &str, path: &Path, loader: &Loader<'_>) -> Result<AprioriUpdate> {
    let mut r = LineReader::new(path.display().to_string(), text);
    let mut header: Option<(String, String)> = None;
    let mut trial: Option<ModelRef> = None;
    let mut backup: Option<ModelRef> = None;
    let mut cluster: Vec<String> = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut auto = false;
    let mut last = 1;

    while let Some((line, toks)) = r.next_line()? {
        last = line;
        let words: Vec<&str> = toks.iter().filter_map(|t| t.word()).collect();
        match words.first().copied() {
            Some("update") => {
                if words.len() != 4 || words[2] != "for" || toks.len() != 4 {
                    return Err(r.error(line, "expected `update <name> for <agent>`"));
                }
                header = Some((words[1].to_string(), words[3].to_string()));
            }
            Some(kw @ ("trial" | "backup")) => {
                let (mref, used) = r.model_ref(&toks[1..], line)?;
                if used + 1 != toks.len() {
                    return Err(r.error(line, format!("unexpected text after `{kw}` reference")));
                }
                let slot = if kw == "trial" { &mut trial } else { &mut backup };
                if slot.replace(mref).is_some() {
                    return Err(r.error(line, format!("duplicate `{kw}` line")));
                }
            }
            Some("cluster") => {
                if words.len() < 2 || words.len() != toks.len() {
                    return Err(r.error(line, "expected `cluster <world>...`"));
                }
                cluster.extend(words[1..].iter().map(|w| w.to_string()));
            }
            Some("map") => match words.as_slice() {
                ["map", "auto"] => auto = true,
                ["map", t, b] => pairs.push((t.to_string(), b.to_string())),
                _ => return Err(r.error(line, "expected `map <trial-world> <backup-world>` or `map auto`")),
            },
            _ => return Err(r.error(line, format!("unknown directive `{}`", toks[0]))),
        }
    }

    let (name, agent) = header.ok_or_else(|| r.error(1, "missing `update <name> for <agent>` line"))?;
    let trial = trial.ok_or_else(|| r.error(last, "missing `trial` line"))?;
    let backup = backup.ok_or_else(|| r.error(last, "missing `backup` line"))?;
    if auto && !pairs.is_empty() {
        return Err(r.error(last, "`map auto` cannot be combined with explicit pairs"));
    }
    let trial = loader.model(&trial, path)?;
    let backup = loader.model(&backup, path)?;
    let u = AprioriUpdate::new(name, agent, trial, &cluster, backup, &pairs)?;
    if auto {
        let map = auto_map(u.agent(), u.trial(), u.backup(), u.trial().atoms());
        return Ok(u.with_map(map));
    }
    Ok(u)
}

pub fn load_update(path: &Path, loader: &Loader<'_>) -> Result<AprioriUpdate> {
    let text = loader.read(path)?;
    parse_update(&text, path, loader)
}

/// Self-contained text with both models inline and the map spelled out.
pub fn write_update(u: &AprioriUpdate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "update {} for {}", u.name(), u.agent());
    out.push_str("trial inline\n");
    out.push_str(&write_model(u.trial()));
    out.push_str("end\n");
    let _ = writeln!(out, "cluster {}", u.cluster_names().join(" "));
    out.push_str("backup inline\n");
    out.push_str(&write_model(u.backup()));
    out.push_str("end\n");
    for (t, b) in u.map_names() {
        let _ = writeln!(out, "map {t} {b}");
    }
    out
}
