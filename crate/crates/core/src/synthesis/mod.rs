//! Trial-and-error search for an a priori belief update that restores an
//! agent's consistency.

pub mod format;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::apriori::{apply_update, auto_map, AprioriError, AprioriUpdate, FrameMode};
use crate::formula::Formula;
use crate::kripke::{classify, KripkeModel, PointedModel};
use crate::semantics::{evaluate, private_announce, truth_set};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Every ordered (trial, backup) pair of master models.
    MasterModels,
    /// Masters restricted by each formula of the a priori pool.
    ApbVariation,
    /// Pool formulas conjoined with the negation of each rejected one.
    ApbNegatedHistory,
    /// As `MasterModels`, validated with introspective frames only.
    RelaxedFrames,
}

impl SourceKind {
    pub const ALL: [SourceKind; 4] = [
        SourceKind::MasterModels,
        SourceKind::ApbVariation,
        SourceKind::ApbNegatedHistory,
        SourceKind::RelaxedFrames,
    ];
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::MasterModels => "master-models",
            SourceKind::ApbVariation => "apb-variation",
            SourceKind::ApbNegatedHistory => "apb-negated-history",
            SourceKind::RelaxedFrames => "relaxed-frames",
        })
    }
}

impl FromStr for SourceKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        SourceKind::ALL.into_iter().find(|k| k.to_string() == s).ok_or(())
    }
}

/// A master model or one of its restrictions, with a label for traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledModel {
    pub label: String,
    pub model: KripkeModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisProblem {
    pub target: PointedModel,
    pub agent: String,
    pub trigger: Option<Formula>,
    pub masters: Vec<LabeledModel>,
    pub apb_pool: Vec<Formula>,
    pub rejected_history: Vec<Formula>,
    /// Atoms a cluster must agree on with the point.
    pub observable: Vec<String>,
    pub sources: Vec<SourceKind>,
    pub max_candidates: usize,
}

impl SynthesisProblem {
    /// Sources used when a problem file names none.
    pub fn default_sources(apb_pool: &[Formula], history: &[Formula]) -> Vec<SourceKind> {
        if apb_pool.is_empty() {
            return vec![SourceKind::MasterModels];
        }
        let mut out = vec![SourceKind::ApbVariation];
        if !history.is_empty() {
            out.push(SourceKind::ApbNegatedHistory);
        }
        out.push(SourceKind::MasterModels);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub source: SourceKind,
    pub mode: FrameMode,
    pub update: AprioriUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    Coherency,
    TriggerUnsatisfiable,
    StillInconsistent,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Coherency => "coherency",
            RejectReason::TriggerUnsatisfiable => "trigger-unsatisfiable",
            RejectReason::StillInconsistent => "still-inconsistent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub candidate: String,
    /// `None` for the accepted candidate, which is always last.
    pub rejected: Option<RejectReason>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisOutcome {
    pub status: Status,
    pub accepted: Option<Candidate>,
    /// Model after the update and, with a trigger, its private re-announcement.
    pub result: Option<PointedModel>,
    pub trace: Vec<TraceEntry>,
    pub note: Option<String>,
}

fn restricted(base: &LabeledModel, f: &Formula) -> Option<LabeledModel> {
    let keep = truth_set(&base.model, f).ok()?;
    let model = base.model.restrict_to(&keep)?;
    Some(LabeledModel {
        label: format!("{}|{}", base.label, f),
        model,
    })
}

/// Clusters `U` of `agent` in `m` (every `u ∈ U` has `R(u) = U`) whose worlds
/// agree with the point on all observable atoms, ordered by smallest name.
pub fn candidate_clusters(m: &KripkeModel, agent: &str, target: &PointedModel, observable: &[String]) -> Vec<BTreeSet<usize>> {
    let Some(rel) = m.relation(agent) else {
        return Vec::new();
    };
    let mut found: Vec<BTreeSet<usize>> = Vec::new();
    for w in 0..m.world_count() {
        if !rel.contains(w, w) {
            continue;
        }
        let c: BTreeSet<usize> = rel.successors(w).collect();
        if c.iter().any(|&u| rel.successors(u).collect::<BTreeSet<_>>() != c) || found.contains(&c) {
            continue;
        }
        let agrees = c
            .iter()
            .all(|&u| observable.iter().all(|p| m.holds(p, u) == target.model.holds(p, target.point)));
        if agrees {
            found.push(c);
        }
    }
    found.sort_by(|x, y| {
        let min = |s: &BTreeSet<usize>| s.iter().map(|&u| m.world_name(u)).min().map(str::to_string);
        min(x).cmp(&min(y))
    });
    found
}

fn frames_ok(m: &KripkeModel, mode: FrameMode) -> bool {
    let p = classify(m);
    match mode {
        FrameMode::Strict => p.quasi_epistemic(),
        FrameMode::Relaxed => p.introspective(),
    }
}

/// Deterministic candidate list in source, master, formula and cluster order.
pub fn generate_candidates(problem: &SynthesisProblem) -> Vec<Candidate> {
    let masters = &problem.masters;
    let pool_restrictions = || -> Vec<LabeledModel> {
        masters
            .iter()
            .flat_map(|m| problem.apb_pool.iter().filter_map(move |f| restricted(m, f)))
            .collect()
    };
    let history_restrictions = || -> Vec<LabeledModel> {
        masters
            .iter()
            .flat_map(|m| problem.rejected_history.iter().filter_map(move |h| restricted(m, h)))
            .collect()
    };
    let variation_backups = || -> Vec<LabeledModel> {
        let mut out = history_restrictions();
        out.extend(pool_restrictions());
        out.extend(masters.iter().cloned());
        out
    };

    let mut out = Vec::new();
    for &kind in &problem.sources {
        let (trials, backups, mode): (Vec<LabeledModel>, Vec<LabeledModel>, FrameMode) = match kind {
            SourceKind::MasterModels => (masters.clone(), masters.clone(), FrameMode::Strict),
            SourceKind::RelaxedFrames => (masters.clone(), masters.clone(), FrameMode::Relaxed),
            SourceKind::ApbVariation => {
                let mut trials = pool_restrictions();
                trials.extend(masters.iter().cloned());
                (trials, variation_backups(), FrameMode::Strict)
            }
            SourceKind::ApbNegatedHistory => {
                let negated: Vec<Formula> = if problem.apb_pool.is_empty() {
                    problem.rejected_history.iter().map(|h| h.clone().not()).collect()
                } else {
                    problem
                        .apb_pool
                        .iter()
                        .flat_map(|f| problem.rejected_history.iter().map(move |h| f.clone().and(h.clone().not())))
                        .collect()
                };
                let trials = masters
                    .iter()
                    .flat_map(|m| negated.iter().filter_map(move |f| restricted(m, f)))
                    .collect();
                (trials, variation_backups(), FrameMode::Strict)
            }
        };
        for trial in &trials {
            if !frames_ok(&trial.model, mode) || !trial.model.same_vocabulary(&problem.target.model) {
                continue;
            }
            let clusters = candidate_clusters(&trial.model, &problem.agent, &problem.target, &problem.observable);
            for backup in &backups {
                if !frames_ok(&backup.model, mode) || !backup.model.same_vocabulary(&problem.target.model) {
                    continue;
                }
                let map = auto_map(&problem.agent, &trial.model, &backup.model, problem.target.model.atoms());
                for cluster in &clusters {
                    let names: Vec<&str> = cluster.iter().map(|&w| trial.model.world_name(w)).collect();
                    let id = format!(
                        "{kind}#{} trial={} backup={} cluster={{{}}}",
                        out.len() + 1,
                        trial.label,
                        backup.label,
                        names.join(",")
                    );
                    let update = AprioriUpdate::new(
                        format!("synth_{}_{}", problem.agent, out.len() + 1),
                        problem.agent.clone(),
                        trial.model.clone(),
                        &names,
                        backup.model.clone(),
                        &[] as &[(&str, &str)],
                    )
                    .expect("names come from the models")
                    .with_map(map.clone());
                    out.push(Candidate {
                        id,
                        source: kind,
                        mode,
                        update,
                    });
                }
            }
        }
    }
    out
}

/// The model the candidate leads to, or why it is rejected.
pub fn accept(candidate: &Candidate, problem: &SynthesisProblem) -> Result<PointedModel, RejectReason> {
    let applied = match apply_update(&problem.target, &candidate.update, candidate.mode) {
        Ok(a) => a,
        Err(AprioriError::CoherencyFailure(_)) => return Err(RejectReason::Coherency),
        // shape problems are filtered out during generation; anything left
        // makes the candidate unusable in the same way
        Err(_) => return Err(RejectReason::Coherency),
    };
    let Some(phi) = &problem.trigger else {
        return if applied.result.is_inconsistent(&problem.agent) {
            Err(RejectReason::StillInconsistent)
        } else {
            Ok(applied.result)
        };
    };
    let holds = truth_set(&applied.result.model, phi).map_err(|_| RejectReason::TriggerUnsatisfiable)?;
    if holds.is_empty() {
        return Err(RejectReason::TriggerUnsatisfiable);
    }
    if !applied.cluster.iter().any(|u| holds.contains(u)) {
        return Err(RejectReason::StillInconsistent);
    }
    let after = private_announce(&applied.result, &[problem.agent.as_str()], phi)
        .map_err(|_| RejectReason::StillInconsistent)?
        .result;
    let bot = Formula::believes(problem.agent.clone(), Formula::False);
    match evaluate(&after, &bot) {
        Ok(false) => Ok(after),
        _ => Err(RejectReason::StillInconsistent),
    }
}

pub fn synthesize(problem: &SynthesisProblem) -> SynthesisOutcome {
    let candidates = generate_candidates(problem);
    let total = candidates.len();
    let mut trace = Vec::new();
    for c in candidates.into_iter().take(problem.max_candidates) {
        match accept(&c, problem) {
            Ok(result) => {
                trace.push(TraceEntry {
                    candidate: c.id.clone(),
                    rejected: None,
                });
                return SynthesisOutcome {
                    status: Status::Success,
                    accepted: Some(c),
                    result: Some(result),
                    trace,
                    note: None,
                };
            }
            Err(reason) => trace.push(TraceEntry {
                candidate: c.id,
                rejected: Some(reason),
            }),
        }
    }
    let note = (total > problem.max_candidates).then(|| {
        format!(
            "candidate budget {} exceeded; {} candidates not tried",
            problem.max_candidates,
            total - problem.max_candidates
        )
    });
    SynthesisOutcome {
        status: Status::Exhausted,
        accepted: None,
        result: None,
        trace,
        note,
    }
}

impl fmt::Display for SynthesisOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.trace.iter().enumerate() {
            match e.rejected {
                Some(r) => writeln!(f, "{:>3} rejected ({r}): {}", i + 1, e.candidate)?,
                None => writeln!(f, "{:>3} accepted: {}", i + 1, e.candidate)?,
            }
        }
        if let Some(n) = &self.note {
            writeln!(f, "note: {n}")?;
        }
        match self.status {
            Status::Success => write!(f, "status: success"),
            Status::Exhausted => write!(f, "status: exhausted"),
        }
    }
}
