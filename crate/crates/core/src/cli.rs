//! Command-line front end. Exit codes: 0 success or true, 1 false, exhausted
//! or failed, 2 usage, parse and I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::info;

use crate::apriori::format::write_update;
use crate::apriori::FrameMode;
use crate::dot::to_dot;
use crate::formula::parse_formula;
use crate::kripke::{classify, KripkeModel, PointedModel};
use crate::scenario::consecutive::{self, LineVariant};
use crate::scenario::corpus::run_corpus;
use crate::scenario::{load_scenario, run, RunOptions};
use crate::semantics::evaluate;
use crate::source::{FileSystem, Loader, DEFAULT_TRUNC_N};
use crate::synthesis::format::load_problem;
use crate::synthesis::{synthesize, SourceKind, Status};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "apriori-del", version, about = "Epistemic model checking with a priori belief updates")]
pub struct Cli {
    /// Truncation bound for the consecutive-numbers lines.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNC_N)]
    pub trunc_n: usize,
    /// Accept introspective frames for trial and backup models.
    #[arg(long, global = true)]
    pub relaxed_frames: bool,
    /// Drop worlds unreachable from the point after each update.
    #[arg(long, global = true)]
    pub gc_unreachable: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print relation properties and the model's classification.
    Check { model: String },
    /// Evaluate a formula at a world.
    Eval { model: String, world: String, formula: String },
    /// Run a scenario file, or the bundled corpus.
    Run {
        #[arg(required_unless_present = "corpus", conflicts_with = "corpus")]
        file: Option<PathBuf>,
        #[arg(long)]
        corpus: bool,
    },
    /// Write a model as a Graphviz digraph.
    ExportDot {
        model: String,
        out: PathBuf,
        #[arg(long)]
        point: Option<String>,
    },
    /// Search for an a priori update that restores an agent's consistency.
    Synth {
        problem: PathBuf,
        /// Write the accepted update here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

impl Cli {
    fn mode(&self) -> FrameMode {
        if self.relaxed_frames {
            FrameMode::Relaxed
        } else {
            FrameMode::Strict
        }
    }
}

/// A model argument: a `.km` path or `@consecutive:<variant>`.
fn load_model(arg: &str, trunc_n: usize) -> Result<(KripkeModel, bool)> {
    match arg.strip_prefix("@consecutive:") {
        Some(v) => {
            let variant: LineVariant = v
                .parse()
                .map_err(|_| Error::Usage(format!("unknown generator variant `{v}`")))?;
            Ok((consecutive::line_model(variant, trunc_n), true))
        }
        None => Ok((Loader::new(&FileSystem, trunc_n).model_file(Path::new(arg))?, false)),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let opts = RunOptions {
        source: &FileSystem,
        trunc_n: cli.trunc_n,
        mode: cli.mode(),
        gc_unreachable: cli.gc_unreachable,
    };
    let code = match &cli.command {
        Command::Check { model } => {
            let (m, _) = load_model(model, cli.trunc_n)?;
            writeln!(out, "model {}: {} worlds", m.name(), m.world_count()).ok();
            writeln!(out, "{}", classify(&m)).ok();
            0
        }
        Command::Eval { model, world, formula } => {
            let (m, generated) = load_model(model, cli.trunc_n)?;
            let f = parse_formula(formula, m.agents(), m.atoms())?;
            if generated {
                consecutive::check_margin(formula, &f, cli.trunc_n)?;
            }
            let pm = PointedModel::new(m, world)?;
            let verdict = evaluate(&pm, &f)?;
            writeln!(out, "{verdict}").ok();
            if verdict {
                0
            } else {
                1
            }
        }
        Command::Run { file: Some(path), .. } => {
            let scenario = load_scenario(path, &FileSystem)?;
            let report = run(&scenario, opts);
            writeln!(out, "{report}").ok();
            if report.passed {
                0
            } else {
                1
            }
        }
        Command::Run { file: None, .. } => {
            let reports = run_corpus(opts);
            let failed = reports.iter().filter(|r| !r.passed).count();
            for r in &reports {
                writeln!(out, "{r}").ok();
            }
            writeln!(out, "{} scenarios, {failed} failed", reports.len()).ok();
            if failed == 0 {
                0
            } else {
                1
            }
        }
        Command::ExportDot { model, out: path, point } => {
            let (m, _) = load_model(model, cli.trunc_n)?;
            if let Some(p) = point {
                if m.world(p).is_none() {
                    return Err(Error::Usage(format!("model {} has no world `{p}`", m.name())));
                }
            }
            write_file(path, &to_dot(&m, point.as_deref()))?;
            info!("wrote {}", path.display());
            0
        }
        Command::Synth { problem, emit } => {
            let loader = Loader::new(&FileSystem, cli.trunc_n);
            let mut p = load_problem(problem, &loader)?;
            if cli.relaxed_frames && !p.sources.contains(&SourceKind::RelaxedFrames) {
                p.sources.push(SourceKind::RelaxedFrames);
            }
            let outcome = synthesize(&p);
            writeln!(out, "{outcome}").ok();
            match (&outcome.accepted, emit) {
                (Some(c), Some(path)) => {
                    write_file(path, &write_update(&c.update))?;
                    info!("wrote {}", path.display());
                }
                (None, Some(_)) => info!("nothing to emit"),
                _ => {}
            }
            match outcome.status {
                Status::Success => 0,
                Status::Exhausted => 1,
            }
        }
    };
    Ok(code)
}

/// Runs a parsed command line; returns the process exit code.
pub fn main_with(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            writeln!(err, "error ({}): {e}", e.kind()).ok();
            2
        }
    }
}
