//! The bundled example corpus, compiled into the binary.

use std::path::Path;

use super::{parse_scenario, run, RunOptions, RunReport, Scenario};
use crate::source::Embedded;

macro_rules! corpus_files {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/", $path)))),*]
    };
}

pub const FILES: &[(&str, &str)] = corpus_files![
    "models/m0.km",
    "models/mcp_apb2_pointed.km",
    "models/mcp_all_clean.km",
    "updates/mcp_u_a.kmu",
    "updates/mcp_u_b.kmu",
    "updates/mcp_u_c.kmu",
    "updates/clean_u_a.kmu",
    "updates/clean_u_b.kmu",
    "updates/clean_u_c.kmu",
    "updates/consecutive_b_nat1.kmu",
    "updates/consecutive_b_int.kmu",
    "problems/mcp_a.kms-synth",
    "problems/consecutive_b.kms-synth",
    "problems/empty.kms-synth",
    "scenarios/mcp_standard.kms",
    "scenarios/mcp_apb2.kms",
    "scenarios/mcp_simultaneous.kms",
    "scenarios/mcp_all_clean.kms",
    "scenarios/consecutive_success.kms",
    "scenarios/consecutive_failure.kms",
    "scenarios/synthesis_mcp.kms",
    "scenarios/synthesis_consecutive.kms",
];

pub fn source() -> Embedded {
    Embedded::new(FILES)
}

/// Every bundled scenario, in file order.
pub fn load_corpus() -> Vec<Scenario> {
    FILES
        .iter()
        .filter(|(p, _)| p.starts_with("scenarios/"))
        .map(|(p, text)| parse_scenario(text, Path::new(p)).expect("bundled scenarios parse"))
        .collect()
}

/// Runs the corpus against the embedded files. `opts.source` is ignored.
pub fn run_corpus(opts: RunOptions<'_>) -> Vec<RunReport> {
    let embedded = source();
    let opts = RunOptions {
        source: &embedded,
        ..opts
    };
    load_corpus().iter().map(|s| run(s, opts)).collect()
}
