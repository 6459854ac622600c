use std::collections::BTreeSet;

use super::{compose, KripkeModel, PointedModel, Relation};

/// `R_A`: union of all agents' relations.
pub fn mutual_relation(model: &KripkeModel) -> Relation {
    model
        .relations()
        .iter()
        .fold(Relation::new(), |acc, r| acc.union(r))
}

/// `R*_A`, the reflexive-transitive closure of `R_A`, iterated to a fixpoint.
pub fn common_closure(model: &KripkeModel) -> Relation {
    let step = mutual_relation(model);
    let mut acc = Relation::identity(model.world_count());
    loop {
        let next = acc.union(&compose(&acc, &step));
        if next.len() == acc.len() {
            return acc;
        }
        acc = next;
    }
}

/// Worlds reachable from `start` in zero or more `R_A` steps.
pub fn reachable_from<I: IntoIterator<Item = usize>>(model: &KripkeModel, start: I) -> BTreeSet<usize> {
    let mut seen: BTreeSet<usize> = start.into_iter().collect();
    let mut frontier: Vec<usize> = seen.iter().copied().collect();
    while let Some(w) = frontier.pop() {
        for rel in model.relations() {
            for v in rel.successors(w) {
                if seen.insert(v) {
                    frontier.push(v);
                }
            }
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Submodel {
    /// `R_i(v) = ∅`.
    Empty,
    Part {
        model: KripkeModel,
        /// `W'` as indices of the original model.
        worlds: BTreeSet<usize>,
        /// Set when a cycle leads back to the point, so `v ∈ W'`.
        contains_point: bool,
    },
}

impl Submodel {
    pub fn worlds(&self) -> Option<&BTreeSet<usize>> {
        match self {
            Submodel::Empty => None,
            Submodel::Part { worlds, .. } => Some(worlds),
        }
    }
}

/// Restriction to `W' = (R_agent ∘ R*_A)(point)`.
pub fn submodel(pm: &PointedModel, agent: &str) -> Submodel {
    let first = pm.accessible(agent);
    if first.is_empty() {
        return Submodel::Empty;
    }
    let worlds = reachable_from(&pm.model, first);
    let model = pm
        .model
        .restrict_to(&worlds)
        .expect("nonempty world set");
    Submodel::Part {
        model,
        contains_point: worlds.contains(&pm.point),
        worlds,
    }
}
