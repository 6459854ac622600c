//! Dynamic epistemic logic with public announcements and a priori belief
//! updates: agents whose beliefs became inconsistent graft a fresh trial
//! cluster and a backup model onto their Kripke model and carry on.

pub mod apriori;
pub mod cli;
pub mod dot;
pub mod formula;
pub mod kripke;
pub mod scenario;
pub mod semantics;
pub mod source;
pub mod synthesis;

use thiserror::Error;

pub use apriori::{AprioriError, AprioriUpdate, FrameMode, UpdateBatch};
pub use formula::{parse_formula, print_formula, Formula, FormulaError};
pub use kripke::{KripkeModel, ModelError, PointedModel};
pub use semantics::{evaluate, private_announce, public_announce, SemanticsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Apriori(#[from] AprioriError),
    #[error("formula `{formula}` needs depth plus largest number {needed} <= {bound} for truncation {trunc_n}")]
    Truncation {
        formula: String,
        needed: usize,
        bound: usize,
        trunc_n: usize,
    },
    #[error("restriction by `{0}` leaves no worlds")]
    EmptyRestriction(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable kebab-case name, as matched by `expect-error` in scenarios.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Formula(FormulaError::Syntax { .. }) => "parse",
            Error::Formula(_) => "undeclared",
            Error::Model(ModelError::Parse { .. }) => "parse",
            Error::Model(_) => "model",
            Error::Semantics(SemanticsError::Vocabulary(_)) => "undeclared",
            Error::Semantics(SemanticsError::AnnouncementFalseAtPoint(_)) => "announcement-false",
            Error::Semantics(SemanticsError::EmptySubmodel(_)) => "empty-submodel",
            Error::Apriori(e) => apriori_kind(e),
            Error::Truncation { .. } => "truncation",
            Error::EmptyRestriction(_) => "empty-restriction",
            Error::Usage(_) => "usage",
        }
    }
}

fn apriori_kind(e: &AprioriError) -> &'static str {
    match e {
        AprioriError::Model(_) => "model",
        AprioriError::UnknownAgent(_) => "undeclared",
        AprioriError::VocabularyMismatch { .. } => "vocabulary",
        AprioriError::UnknownWorld { .. } | AprioriError::MapNotFunctional(_) => "map",
        AprioriError::EmptyCluster | AprioriError::NotACluster(_) | AprioriError::ClusterNotMaximal { .. } => {
            "cluster"
        }
        AprioriError::NotIntrospective => "not-introspective",
        AprioriError::FrameViolation { .. } => "frame",
        AprioriError::PointNotInconsistent(_) => "point-not-inconsistent",
        AprioriError::CoherencyFailure(_) => "coherency",
        AprioriError::DuplicateAgent(_) => "duplicate-agent",
        AprioriError::Batch { source, .. } => apriori_kind(source),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
