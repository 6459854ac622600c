//! Scenario scripts: load a pointed model, announce, update, and assert.
//!
//! ```text
//! scenario mcp_apb2
//! load ../models/mcp_apb2_pointed.km as M
//! point Areal
//! assert "B a false"
//! apriori a ../updates/mcp_u_a.kmu
//! announce "(ma & ~mb & ~mc) -> B a ma"
//! private b,c "ma"
//! apriori-batch b:../updates/b.kmu c:../updates/c.kmu
//! synth ../problems/mcp_a.kms-synth expect success
//! worlds 2
//! expect-error announcement-false      # applies to the next step
//! ```

pub mod consecutive;
pub mod corpus;

use std::fmt;
use std::path::{Path, PathBuf};

use crate::apriori::format::load_update;
use crate::apriori::{apply_batch, apply_update, FrameMode, UpdateBatch};
use crate::formula::{parse_formula, Formula};
use crate::kripke::{KripkeModel, PointedModel};
use crate::semantics::{evaluate, private_announce, public_announce};
use crate::source::{resolve, LineReader, Loader, ModelRef, Source, Tok};
use crate::synthesis::format::load_problem;
use crate::synthesis::{synthesize, Status};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Success,
    Exhausted,
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expect::Success => "success",
            Expect::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Load { model: ModelRef, alias: String },
    Point { alias: Option<String>, world: String },
    AssertHolds(String),
    AssertFails(String),
    Announce(String),
    Private { agents: Vec<String>, formula: String },
    Apriori { agent: String, file: String },
    AprioriBatch(Vec<(String, String)>),
    Synthesize { file: String, expect: Expect },
    AssertWorldCount(usize),
    ExpectError(String),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Load { model, alias } => write!(f, "load {model} as {alias}"),
            Step::Point { alias: Some(a), world } => write!(f, "point {a} {world}"),
            Step::Point { alias: None, world } => write!(f, "point {world}"),
            Step::AssertHolds(x) => write!(f, "assert \"{x}\""),
            Step::AssertFails(x) => write!(f, "refute \"{x}\""),
            Step::Announce(x) => write!(f, "announce \"{x}\""),
            Step::Private { agents, formula } => write!(f, "private {} \"{formula}\"", agents.join(",")),
            Step::Apriori { agent, file } => write!(f, "apriori {agent} {file}"),
            Step::AprioriBatch(list) => {
                f.write_str("apriori-batch")?;
                for (a, file) in list {
                    write!(f, " {a}:{file}")?;
                }
                Ok(())
            }
            Step::Synthesize { file, expect } => write!(f, "synth {file} expect {expect}"),
            Step::AssertWorldCount(n) => write!(f, "worlds {n}"),
            Step::ExpectError(k) => write!(f, "expect-error {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    /// Location used to resolve relative references.
    pub path: PathBuf,
    /// `(line, step)`.
    pub steps: Vec<(usize, Step)>,
}

fn one_quoted(r: &LineReader<'_>, toks: &[Tok], line: usize, kw: &str) -> Result<String> {
    match toks {
        [_, Tok::Quoted(q)] => Ok(q.clone()),
        _ => Err(r.error(line, format!("expected `{kw} \"<formula>\"`"))),
    }
}

pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario> {
    let mut r = LineReader::new(path.display().to_string(), text);
    let mut name = None;
    let mut steps = Vec::new();
    while let Some((line, toks)) = r.next_line()? {
        let words: Vec<&str> = toks.iter().filter_map(Tok::word).collect();
        let kw = toks[0].word().unwrap_or("");
        let step = match kw {
            "scenario" => {
                match words.as_slice() {
                    ["scenario", n] if toks.len() == 2 => name = Some(n.to_string()),
                    _ => return Err(r.error(line, "expected `scenario <name>`")),
                }
                continue;
            }
            "load" => {
                let (model, used) = r.model_ref(&toks[1..], line)?;
                match &toks[1 + used..] {
                    [Tok::Word(as_), Tok::Word(alias)] if as_ == "as" => Step::Load {
                        model,
                        alias: alias.clone(),
                    },
                    _ => return Err(r.error(line, "expected `load <model> as <alias>`")),
                }
            }
            "point" => match words.as_slice() {
                ["point", w] if toks.len() == 2 => Step::Point {
                    alias: None,
                    world: w.to_string(),
                },
                ["point", a, w] if toks.len() == 3 => Step::Point {
                    alias: Some(a.to_string()),
                    world: w.to_string(),
                },
                _ => return Err(r.error(line, "expected `point [<alias>] <world>`")),
            },
            "assert" => Step::AssertHolds(one_quoted(&r, &toks, line, kw)?),
            "refute" => Step::AssertFails(one_quoted(&r, &toks, line, kw)?),
            "announce" => Step::Announce(one_quoted(&r, &toks, line, kw)?),
            "private" => match toks.as_slice() {
                [_, Tok::Word(agents), Tok::Quoted(f)] => Step::Private {
                    agents: agents.split(',').map(str::to_string).collect(),
                    formula: f.clone(),
                },
                _ => return Err(r.error(line, "expected `private <agent>[,<agent>...] \"<formula>\"`")),
            },
            "apriori" => match words.as_slice() {
                ["apriori", a, file] if toks.len() == 3 => Step::Apriori {
                    agent: a.to_string(),
                    file: file.to_string(),
                },
                _ => return Err(r.error(line, "expected `apriori <agent> <update-file>`")),
            },
            "apriori-batch" => {
                if words.len() != toks.len() {
                    return Err(r.error(line, "expected `apriori-batch <agent>:<file>...`"));
                }
                let list = words[1..]
                    .iter()
                    .map(|w| {
                        w.split_once(':')
                            .map(|(a, f)| (a.to_string(), f.to_string()))
                            .ok_or_else(|| r.error(line, format!("expected `<agent>:<file>`, got `{w}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Step::AprioriBatch(list)
            }
            "synth" => match words.as_slice() {
                ["synth", file, "expect", e] if toks.len() == 4 => Step::Synthesize {
                    file: file.to_string(),
                    expect: match *e {
                        "success" => Expect::Success,
                        "exhausted" => Expect::Exhausted,
                        _ => return Err(r.error(line, "expected `success` or `exhausted`")),
                    },
                },
                _ => return Err(r.error(line, "expected `synth <file> expect <success|exhausted>`")),
            },
            "worlds" => match words.as_slice() {
                ["worlds", n] => Step::AssertWorldCount(
                    n.parse().map_err(|_| r.error(line, "world count must be a number"))?,
                ),
                _ => return Err(r.error(line, "expected `worlds <n>`")),
            },
            "expect-error" => match words.as_slice() {
                ["expect-error", k] if toks.len() == 2 => Step::ExpectError(k.to_string()),
                _ => return Err(r.error(line, "expected `expect-error <kind>`")),
            },
            _ => return Err(r.error(line, format!("unknown directive `{}`", toks[0]))),
        };
        steps.push((line, step));
    }
    let name = name.ok_or_else(|| r.error(1, "missing `scenario <name>` line"))?;
    if let Some((line, _)) = steps.iter().rev().find(|(_, s)| matches!(s, Step::ExpectError(_))) {
        if steps.last().map(|(l, _)| l) == Some(line) {
            return Err(r.error(*line, "`expect-error` must be followed by a step"));
        }
    }
    Ok(Scenario {
        name,
        path: path.to_path_buf(),
        steps,
    })
}

pub fn load_scenario(path: &Path, source: &dyn Source) -> Result<Scenario> {
    let text = source.read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, path)
}

/// Settings shared by every step of a run.
#[derive(Clone, Copy)]
pub struct RunOptions<'s> {
    pub source: &'s dyn Source,
    pub trunc_n: usize,
    pub mode: FrameMode,
    pub gc_unreachable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Passed,
    /// An `expect-error` matched the error of the following step.
    ErrorMatched(String),
    Failed(String),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub index: usize,
    pub line: usize,
    pub step: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub scenario: String,
    pub steps: Vec<StepReport>,
    pub passed: bool,
    pub final_model: Option<PointedModel>,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.scenario)?;
        for s in &self.steps {
            let (tag, detail) = match &s.verdict {
                Verdict::Passed => ("ok", String::new()),
                Verdict::ErrorMatched(k) => ("ok", format!(" (error {k} as expected)")),
                Verdict::Failed(m) => ("FAIL", format!(": {m}")),
                Verdict::Error(m) => ("ERROR", format!(": {m}")),
            };
            writeln!(f, "  {:>3} {:<5} line {}: {}{detail}", s.index + 1, tag, s.line, s.step)?;
        }
        if let Some(pm) = &self.final_model {
            writeln!(f, "  final model: {} worlds, point {}", pm.model.world_count(), pm.point_name())?;
        }
        write!(f, "{}: {}", self.scenario, if self.passed { "pass" } else { "fail" })
    }
}

struct State<'s> {
    loader: Loader<'s>,
    opts: RunOptions<'s>,
    base: PathBuf,
    models: Vec<(String, KripkeModel)>,
    current: Option<PointedModel>,
    truncated: bool,
}

enum Outcome {
    Ok,
    Failed(String),
}

impl State<'_> {
    fn current(&self) -> Result<&PointedModel> {
        self.current
            .as_ref()
            .ok_or_else(|| Error::Usage("no pointed model yet; use `load` and `point` first".into()))
    }

    fn formula(&self, text: &str) -> Result<Formula> {
        let pm = self.current()?;
        let f = parse_formula(text, pm.model.agents(), pm.model.atoms())?;
        if self.truncated {
            consecutive::check_margin(text, &f, self.loader.trunc_n)?;
        }
        Ok(f)
    }

    fn settle(&mut self, pm: PointedModel) {
        self.truncated |= self.loader.used_generator();
        self.current = Some(if self.opts.gc_unreachable { pm.prune_unreachable() } else { pm });
    }

    fn check(&self, text: &str, want: bool) -> Result<Outcome> {
        let f = self.formula(text)?;
        let got = evaluate(self.current()?, &f)?;
        Ok(if got == want {
            Outcome::Ok
        } else {
            Outcome::Failed(format!("formula is {got} at the point"))
        })
    }

    fn step(&mut self, step: &Step) -> Result<Outcome> {
        match step {
            Step::Load { model, alias } => {
                let m = self.loader.model(model, &self.base)?;
                self.truncated |= self.loader.used_generator();
                self.models.retain(|(a, _)| a != alias);
                self.models.push((alias.clone(), m));
                Ok(Outcome::Ok)
            }
            Step::Point { alias, world } => {
                let m = match alias {
                    Some(a) => self.models.iter().rev().find(|(x, _)| x == a),
                    None => self.models.last(),
                }
                .map(|(_, m)| m.clone())
                .ok_or_else(|| Error::Usage(format!("no model loaded{}", alias.as_ref().map(|a| format!(" as {a}")).unwrap_or_default())))?;
                self.current = Some(PointedModel::new(m, world)?);
                Ok(Outcome::Ok)
            }
            Step::AssertHolds(text) => self.check(text, true),
            Step::AssertFails(text) => self.check(text, false),
            Step::Announce(text) => {
                let f = self.formula(text)?;
                let next = public_announce(self.current()?, &f)?;
                self.current = Some(next);
                Ok(Outcome::Ok)
            }
            Step::Private { agents, formula } => {
                let f = self.formula(formula)?;
                let out = private_announce(self.current()?, agents, &f)?;
                self.current = Some(out.result);
                Ok(Outcome::Ok)
            }
            Step::Apriori { agent, file } => {
                let u = load_update(&resolve(&self.base, file), &self.loader)?;
                if u.agent() != agent {
                    return Err(Error::Usage(format!("{file} is an update for {}, not {agent}", u.agent())));
                }
                let applied = apply_update(self.current()?, &u, self.opts.mode)?;
                self.settle(applied.result);
                Ok(Outcome::Ok)
            }
            Step::AprioriBatch(list) => {
                let mut batch = UpdateBatch::new();
                for (agent, file) in list {
                    let u = load_update(&resolve(&self.base, file), &self.loader)?;
                    if u.agent() != agent {
                        return Err(Error::Usage(format!("{file} is an update for {}, not {agent}", u.agent())));
                    }
                    batch
                        .insert(u)
                        .map_err(|_| Error::Apriori(crate::apriori::AprioriError::DuplicateAgent(agent.clone())))?;
                }
                let next = apply_batch(self.current()?, &batch, self.opts.mode)?;
                self.settle(next);
                Ok(Outcome::Ok)
            }
            Step::Synthesize { file, expect } => {
                let problem = load_problem(&resolve(&self.base, file), &self.loader)?;
                let out = synthesize(&problem);
                let got = match out.status {
                    Status::Success => Expect::Success,
                    Status::Exhausted => Expect::Exhausted,
                };
                if got != *expect {
                    return Ok(Outcome::Failed(format!("synthesis ended {got}")));
                }
                if let Some(result) = out.result {
                    self.settle(result);
                }
                Ok(Outcome::Ok)
            }
            Step::AssertWorldCount(n) => {
                let got = self.current()?.model.world_count();
                Ok(if got == *n {
                    Outcome::Ok
                } else {
                    Outcome::Failed(format!("model has {got} worlds"))
                })
            }
            Step::ExpectError(_) => unreachable!("handled by the runner"),
        }
    }
}

pub fn run(scenario: &Scenario, opts: RunOptions<'_>) -> RunReport {
    let mut state = State {
        loader: Loader::new(opts.source, opts.trunc_n),
        opts,
        base: scenario.path.clone(),
        models: Vec::new(),
        current: None,
        truncated: false,
    };
    let mut reports = Vec::new();
    let mut expected: Option<String> = None;
    let mut passed = true;
    for (index, (line, step)) in scenario.steps.iter().enumerate() {
        let report = |verdict: Verdict| StepReport {
            index,
            line: *line,
            step: step.to_string(),
            verdict,
        };
        if let Step::ExpectError(kind) = step {
            expected = Some(kind.clone());
            reports.push(report(Verdict::Passed));
            continue;
        }
        let verdict = match (state.step(step), expected.take()) {
            (Ok(Outcome::Ok), None) => Verdict::Passed,
            (Ok(Outcome::Ok), Some(kind)) => Verdict::Failed(format!("expected error {kind}, step succeeded")),
            (Ok(Outcome::Failed(m)), _) => Verdict::Failed(m),
            (Err(e), Some(kind)) if e.kind() == kind => Verdict::ErrorMatched(kind),
            (Err(e), Some(kind)) => Verdict::Failed(format!("expected error {kind}, got {}: {e}", e.kind())),
            (Err(e), None) => Verdict::Error(format!("{}: {e}", e.kind())),
        };
        let stop = matches!(verdict, Verdict::Failed(_) | Verdict::Error(_));
        reports.push(report(verdict));
        if stop {
            passed = false;
            break;
        }
    }
    RunReport {
        scenario: scenario.name.clone(),
        steps: reports,
        passed,
        final_model: state.current,
    }
}
