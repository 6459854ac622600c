//! Synthesis problem files.
//!
//! ```text
//! synth for a
//! target ../models/mcp_apb2_pointed.km point Areal
//! trigger "B a n_b_2"              # optional
//! masters ../models/m0.km
//! apb "ma | mb | mc"
//! rejected "(ma & mb) | (ma & mc) | (mb & mc)"
//! observable mb mc                 # `n_b_*` matches by prefix
//! sources apb-variation master-models
//! budget 50
//! ```

use std::path::Path;

use super::{LabeledModel, SourceKind, SynthesisProblem};
use crate::formula::{parse_formula, Formula};
use crate::kripke::PointedModel;
use crate::source::{LineReader, Loader, ModelRef, Tok};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1000;

fn label(r: &ModelRef, model_name: &str) -> String {
    match r {
        ModelRef::File { restrict: None, .. } | ModelRef::Generator { restrict: None, .. } | ModelRef::Inline { .. } => {
            model_name.to_string()
        }
        ModelRef::File { restrict: Some(f), .. } | ModelRef::Generator { restrict: Some(f), .. } => {
            format!("{model_name}|{f}")
        }
    }
}

pub fn parse_problem(text: &str, path: &Path, loader: &Loader<'_>) -> Result<SynthesisProblem> {
    let mut r = LineReader::new(path.display().to_string(), text);
    let mut agent = None;
    let mut target: Option<(ModelRef, String, usize)> = None;
    let mut trigger: Option<(String, usize)> = None;
    let mut masters: Vec<ModelRef> = Vec::new();
    let mut apb: Vec<(String, usize)> = Vec::new();
    let mut rejected: Vec<(String, usize)> = Vec::new();
    let mut observable: Vec<(String, usize)> = Vec::new();
    let mut sources: Option<Vec<SourceKind>> = None;
    let mut budget = DEFAULT_BUDGET;

    let quoted = |r: &LineReader<'_>, toks: &[Tok], line: usize, kw: &str| -> Result<Vec<(String, usize)>> {
        if toks.len() < 2 {
            return Err(r.error(line, format!("expected `{kw} \"<formula>\"...`")));
        }
        toks[1..]
            .iter()
            .map(|t| {
                t.quoted()
                    .map(|q| (q.to_string(), line))
                    .ok_or_else(|| r.error(line, format!("`{kw}` takes quoted formulas")))
            })
            .collect()
    };

    while let Some((line, toks)) = r.next_line()? {
        let words: Vec<&str> = toks.iter().filter_map(Tok::word).collect();
        match toks[0].word() {
            Some("synth") => match words.as_slice() {
                ["synth", "for", a] if toks.len() == 3 => agent = Some(a.to_string()),
                _ => return Err(r.error(line, "expected `synth for <agent>`")),
            },
            Some("target") => {
                let (mref, used) = r.model_ref(&toks[1..], line)?;
                let rest: Vec<&str> = toks[1 + used..].iter().filter_map(Tok::word).collect();
                match rest.as_slice() {
                    ["point", w] if toks.len() == used + 3 => target = Some((mref, w.to_string(), line)),
                    _ => return Err(r.error(line, "expected `target <model> point <world>`")),
                }
            }
            Some("trigger") => match toks.as_slice() {
                [_, Tok::Quoted(q)] => trigger = Some((q.clone(), line)),
                _ => return Err(r.error(line, "expected `trigger \"<formula>\"`")),
            },
            Some("masters") => {
                let mut i = 1;
                if toks.len() < 2 {
                    return Err(r.error(line, "expected `masters <model>...`"));
                }
                while i < toks.len() {
                    let (mref, used) = r.model_ref(&toks[i..], line)?;
                    masters.push(mref);
                    i += used;
                }
            }
            Some("apb") => apb.extend(quoted(&r, &toks, line, "apb")?),
            Some("rejected") => rejected.extend(quoted(&r, &toks, line, "rejected")?),
            Some("observable") => {
                if words.len() != toks.len() {
                    return Err(r.error(line, "expected `observable <atom>...`"));
                }
                observable.extend(words[1..].iter().map(|w| (w.to_string(), line)));
            }
            Some("sources") => {
                let kinds = words[1..]
                    .iter()
                    .map(|w| w.parse::<SourceKind>().map_err(|_| r.error(line, format!("unknown source `{w}`"))))
                    .collect::<Result<Vec<_>>>()?;
                sources = Some(kinds);
            }
            Some("budget") => match words.as_slice() {
                ["budget", n] => {
                    budget = n
                        .parse()
                        .ok()
                        .filter(|&n: &usize| n > 0)
                        .ok_or_else(|| r.error(line, "budget must be a positive integer"))?;
                }
                _ => return Err(r.error(line, "expected `budget <n>`")),
            },
            _ => return Err(r.error(line, format!("unknown directive `{}`", toks[0]))),
        }
    }

    let agent = agent.ok_or_else(|| r.error(1, "missing `synth for <agent>` line"))?;
    let (tref, point, tline) = target.ok_or_else(|| r.error(1, "missing `target` line"))?;
    let tmodel = loader.model(&tref, path)?;
    let target = PointedModel::new(tmodel, &point).map_err(|e| r.error(tline, e.to_string()))?;
    let m = &target.model;
    if m.agent_index(&agent).is_none() {
        return Err(Error::Formula(crate::formula::FormulaError::UndeclaredAgent(agent)));
    }
    let parse = |(text, line): &(String, usize)| -> Result<Formula> {
        parse_formula(text, m.agents(), m.atoms()).map_err(|e| match e {
            crate::formula::FormulaError::Syntax { .. } => r.error(*line, format!("in `{text}`: {e}")),
            other => Error::Formula(other),
        })
    };
    let trigger = trigger.as_ref().map(parse).transpose()?;
    let apb_pool = apb.iter().map(parse).collect::<Result<Vec<_>>>()?;
    let rejected_history = rejected.iter().map(parse).collect::<Result<Vec<_>>>()?;
    let mut obs = Vec::new();
    for (pat, line) in &observable {
        let matched: Vec<&String> = match pat.strip_suffix('*') {
            Some(prefix) => m.atoms().iter().filter(|p| p.starts_with(prefix)).collect(),
            None => m.atoms().iter().filter(|p| *p == pat).collect(),
        };
        if matched.is_empty() {
            return Err(r.error(*line, format!("`{pat}` matches no declared atom")));
        }
        for p in matched {
            if !obs.contains(p) {
                obs.push(p.clone());
            }
        }
    }
    let masters = masters
        .iter()
        .map(|mref| {
            let model = loader.model(mref, path)?;
            Ok(LabeledModel {
                label: label(mref, model.name()),
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sources = sources.unwrap_or_else(|| SynthesisProblem::default_sources(&apb_pool, &rejected_history));
    Ok(SynthesisProblem {
        target,
        agent,
        trigger,
        masters,
        apb_pool,
        rejected_history,
        observable: obs,
        sources,
        max_candidates: budget,
    })
}

pub fn load_problem(path: &Path, loader: &Loader<'_>) -> Result<SynthesisProblem> {
    let text = loader.read(path)?;
    parse_problem(&text, path, loader)
}
