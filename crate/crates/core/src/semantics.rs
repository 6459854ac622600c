//! Truth, public announcement and the agent-local ("private") announcement.
//!
//! Evaluation works on truth sets: `ext(φ, D)` is the set of worlds of the
//! domain `D` where φ holds in the submodel on `D`. Announcements shrink the
//! domain instead of building new models, so nested `[! φ] ψ` costs no copies.

use std::collections::BTreeSet;

use log::warn;
use thiserror::Error;

use crate::formula::{Formula, FormulaError};
use crate::kripke::{submodel, KripkeModel, PointedModel, Submodel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Vocabulary(#[from] FormulaError),
    #[error("announcement `{0}` is false at the point")]
    AnnouncementFalseAtPoint(String),
    #[error("submodel of agent `{0}` is empty")]
    EmptySubmodel(String),
}

/// Truth set of `f` within the submodel on `domain`; entries outside the
/// domain are false.
fn ext(m: &KripkeModel, f: &Formula, domain: &[bool]) -> Vec<bool> {
    match f {
        Formula::Atom(p) => match m.atom_index(p) {
            Some(i) => {
                let v = m.extension_of(i);
                (0..m.world_count()).map(|w| domain[w] && v.contains(&w)).collect()
            }
            None => vec![false; m.world_count()],
        },
        Formula::False => vec![false; m.world_count()],
        Formula::Not(g) => {
            let inner = ext(m, g, domain);
            (0..m.world_count()).map(|w| domain[w] && !inner[w]).collect()
        }
        Formula::And(g, h) => {
            let x = ext(m, g, domain);
            let y = ext(m, h, domain);
            x.iter().zip(&y).map(|(a, b)| *a && *b).collect()
        }
        Formula::Believes(agent, g) => {
            let inner = ext(m, g, domain);
            match m.relation(agent) {
                Some(r) => (0..m.world_count())
                    .map(|w| domain[w] && r.successors(w).all(|v| !domain[v] || inner[v]))
                    .collect(),
                None => domain.to_vec(),
            }
        }
        Formula::Announced(g, h) => {
            let kept = ext(m, g, domain);
            let body = ext(m, h, &kept);
            (0..m.world_count())
                .map(|w| domain[w] && (!kept[w] || body[w]))
                .collect()
        }
    }
}

fn check(m: &KripkeModel, f: &Formula) -> Result<(), SemanticsError> {
    f.check_vocabulary(m.agents(), m.atoms())?;
    Ok(())
}

/// Worlds of `m` where `f` holds.
pub fn truth_set(m: &KripkeModel, f: &Formula) -> Result<BTreeSet<usize>, SemanticsError> {
    check(m, f)?;
    let all = vec![true; m.world_count()];
    Ok(ext(m, f, &all)
        .into_iter()
        .enumerate()
        .filter_map(|(w, t)| t.then_some(w))
        .collect())
}

pub fn evaluate(pm: &PointedModel, f: &Formula) -> Result<bool, SemanticsError> {
    evaluate_at(&pm.model, pm.point, f)
}

pub fn evaluate_at(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    check(m, f)?;
    let all = vec![true; m.world_count()];
    Ok(ext(m, f, &all)[w])
}

/// `(M|f, point)`.
pub fn public_announce(pm: &PointedModel, f: &Formula) -> Result<PointedModel, SemanticsError> {
    check(&pm.model, f)?;
    let all = vec![true; pm.model.world_count()];
    let keep = ext(&pm.model, f, &all);
    if !keep[pm.point] {
        return Err(SemanticsError::AnnouncementFalseAtPoint(f.to_string()));
    }
    let model = pm.model.restrict(&keep).expect("point survives");
    let point = model.world(pm.point_name()).expect("point survives");
    Ok(PointedModel { model, point })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivateWarning {
    /// Two listed agents' parts share worlds.
    OverlappingParts { agents: (String, String), shared: Vec<String> },
    /// The point lies in an agent's part and fails the formula there; it is
    /// kept anyway.
    PointFails { agent: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateAnnouncement {
    pub result: PointedModel,
    /// Names of the worlds removed, in original declaration order.
    pub removed: Vec<String>,
    pub warnings: Vec<PrivateWarning>,
}

/// Announces `f` to each listed agent inside that agent's own part only.
///
/// Each part `S_i` is evaluated as a standalone model; its worlds failing `f`
/// there are deleted from the whole model together with every incident pair.
/// The point is never deleted.
pub fn private_announce<S: AsRef<str>>(
    pm: &PointedModel,
    agents: &[S],
    f: &Formula,
) -> Result<PrivateAnnouncement, SemanticsError> {
    check(&pm.model, f)?;
    let n = pm.model.world_count();
    let mut remove = vec![false; n];
    let mut warnings = Vec::new();
    let mut parts: Vec<(String, BTreeSet<usize>)> = Vec::new();
    for agent in agents {
        let agent = agent.as_ref();
        if pm.model.agent_index(agent).is_none() {
            return Err(FormulaError::UndeclaredAgent(agent.to_string()).into());
        }
        let worlds = match submodel(pm, agent) {
            Submodel::Empty => return Err(SemanticsError::EmptySubmodel(agent.to_string())),
            Submodel::Part { worlds, .. } => worlds,
        };
        let domain: Vec<bool> = (0..n).map(|w| worlds.contains(&w)).collect();
        let holds = ext(&pm.model, f, &domain);
        for &w in &worlds {
            if !holds[w] {
                if w == pm.point {
                    warn!("private announcement to {agent}: point fails `{f}` in the agent's part; kept");
                    warnings.push(PrivateWarning::PointFails { agent: agent.to_string() });
                } else {
                    remove[w] = true;
                }
            }
        }
        for (other, theirs) in &parts {
            let shared: Vec<String> = worlds
                .intersection(theirs)
                .map(|&w| pm.model.world_name(w).to_string())
                .collect();
            if !shared.is_empty() {
                warn!("private announcement: parts of {other} and {agent} overlap on {} worlds", shared.len());
                warnings.push(PrivateWarning::OverlappingParts {
                    agents: (other.clone(), agent.to_string()),
                    shared,
                });
            }
        }
        parts.push((agent.to_string(), worlds));
    }
    let keep: Vec<bool> = remove.iter().map(|r| !r).collect();
    let removed = (0..n)
        .filter(|&w| remove[w])
        .map(|w| pm.model.world_name(w).to_string())
        .collect();
    let model = pm.model.restrict(&keep).expect("point kept");
    let point = model.world(pm.point_name()).expect("point kept");
    Ok(PrivateAnnouncement {
        result: PointedModel { model, point },
        removed,
        warnings,
    })
}
