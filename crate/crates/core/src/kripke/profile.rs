use std::collections::BTreeSet;
use std::fmt;

use super::{KripkeModel, ModelError, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentProfile {
    pub reflexive: bool,
    pub transitive: bool,
    pub euclidean: bool,
    pub symmetric: bool,
}

impl AgentProfile {
    pub fn of(rel: &Relation, world_count: usize) -> Self {
        AgentProfile {
            reflexive: rel.is_reflexive(world_count),
            transitive: rel.is_transitive(),
            euclidean: rel.is_euclidean(),
            symmetric: rel.is_symmetric(),
        }
    }

    pub fn equivalence(&self) -> bool {
        self.reflexive && self.transitive && self.symmetric
    }

    pub fn partial_equivalence(&self) -> bool {
        self.transitive && self.symmetric
    }

    pub fn introspective(&self) -> bool {
        self.transitive && self.euclidean
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationProfile {
    /// `(agent, flags)` in declaration order.
    pub agents: Vec<(String, AgentProfile)>,
}

impl RelationProfile {
    pub fn epistemic(&self) -> bool {
        self.agents.iter().all(|(_, p)| p.equivalence())
    }

    pub fn quasi_epistemic(&self) -> bool {
        self.agents.iter().all(|(_, p)| p.partial_equivalence())
    }

    pub fn introspective(&self) -> bool {
        self.agents.iter().all(|(_, p)| p.introspective())
    }

    pub fn agent(&self, agent: &str) -> Option<&AgentProfile> {
        self.agents.iter().find(|(a, _)| a == agent).map(|(_, p)| p)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for RelationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (agent, p) in &self.agents {
            writeln!(
                f,
                "agent {agent}: reflexive={} transitive={} euclidean={} symmetric={} \
                 equivalence={} partial-equivalence={} introspective={}",
                yes_no(p.reflexive),
                yes_no(p.transitive),
                yes_no(p.euclidean),
                yes_no(p.symmetric),
                yes_no(p.equivalence()),
                yes_no(p.partial_equivalence()),
                yes_no(p.introspective()),
            )?;
        }
        write!(
            f,
            "introspective: {}, epistemic: {}, quasi-epistemic: {}",
            yes_no(self.introspective()),
            yes_no(self.epistemic()),
            yes_no(self.quasi_epistemic())
        )
    }
}

pub fn classify(model: &KripkeModel) -> RelationProfile {
    RelationProfile {
        agents: model
            .agents()
            .iter()
            .zip(model.relations())
            .map(|(a, r)| (a.clone(), AgentProfile::of(r, model.world_count())))
            .collect(),
    }
}

/// Equivalence classes of a partial equivalence relation plus the worlds it
/// leaves untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    /// Ordered by smallest member index.
    pub clusters: Vec<BTreeSet<usize>>,
    pub isolated: BTreeSet<usize>,
}

impl ClusterPartition {
    pub fn cluster_of(&self, w: usize) -> Option<&BTreeSet<usize>> {
        self.clusters.iter().find(|c| c.contains(&w))
    }
}

pub fn clusters(model: &KripkeModel, agent: &str) -> Result<ClusterPartition, ModelError> {
    let rel = model
        .relation(agent)
        .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))?;
    if !(rel.is_transitive() && rel.is_symmetric()) {
        return Err(ModelError::NotPartialEquivalence(agent.to_string()));
    }
    let mut seen = BTreeSet::new();
    let mut out = ClusterPartition {
        clusters: Vec::new(),
        isolated: BTreeSet::new(),
    };
    for w in 0..model.world_count() {
        if seen.contains(&w) {
            continue;
        }
        // symmetric + transitive with a successor forces the loop at w, so
        // R(w) is w's whole class
        let class: BTreeSet<usize> = rel.successors(w).collect();
        if class.is_empty() {
            out.isolated.insert(w);
        } else {
            seen.extend(class.iter().copied());
            out.clusters.push(class);
        }
    }
    Ok(out)
}
