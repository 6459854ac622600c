//! Finite multi-agent Kripke models.
//!
//! Worlds, agents and atoms keep their declaration order; every operation
//! iterates in that order so results are deterministic. Worlds are addressed
//! by index internally and by name at the API boundary.

mod bisim;
mod closure;
pub mod format;
mod profile;
mod relation;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{is_identifier, RESERVED_WORDS};

pub use bisim::{bisimilar, isomorphism, Bisimulation};
pub use closure::{common_closure, mutual_relation, reachable_from, submodel, Submodel};
pub use profile::{classify, clusters, AgentProfile, ClusterPartition, RelationProfile};
pub use relation::{compose, iterate, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("duplicate {kind} `{name}`")]
    DuplicateDeclaration { kind: &'static str, name: String },
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("model `{0}` has no worlds")]
    NoWorlds(String),
    #[error("relation of agent `{0}` is not a partial equivalence")]
    NotPartialEquivalence(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    name: String,
    agents: Vec<String>,
    atoms: Vec<String>,
    worlds: Vec<String>,
    world_index: HashMap<String, usize>,
    /// Aligned with `agents`.
    relations: Vec<Relation>,
    /// Aligned with `atoms`.
    valuation: Vec<BTreeSet<usize>>,
}

/// Incremental construction of a [`KripkeModel`]; `build` enforces `W ≠ ∅`.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    model: KripkeModel,
}

fn check_identifier(s: &str) -> Result<(), ModelError> {
    if is_identifier(s) && !RESERVED_WORDS.contains(&s) {
        Ok(())
    } else {
        Err(ModelError::InvalidIdentifier(s.to_string()))
    }
}

impl ModelBuilder {
    pub fn new<A, P>(name: impl Into<String>, agents: &[A], atoms: &[P]) -> Result<Self, ModelError>
    where
        A: AsRef<str>,
        P: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        for a in agents {
            check_identifier(a.as_ref())?;
            if !seen.insert(a.as_ref()) {
                return Err(ModelError::DuplicateDeclaration {
                    kind: "agent",
                    name: a.as_ref().to_string(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for p in atoms {
            check_identifier(p.as_ref())?;
            if !seen.insert(p.as_ref()) {
                return Err(ModelError::DuplicateDeclaration {
                    kind: "atom",
                    name: p.as_ref().to_string(),
                });
            }
        }
        Ok(ModelBuilder {
            model: KripkeModel {
                name: name.into(),
                agents: agents.iter().map(|a| a.as_ref().to_string()).collect(),
                atoms: atoms.iter().map(|p| p.as_ref().to_string()).collect(),
                worlds: Vec::new(),
                world_index: HashMap::new(),
                relations: vec![Relation::new(); agents.len()],
                valuation: vec![BTreeSet::new(); atoms.len()],
            },
        })
    }

    /// Adds a world where exactly `true_atoms` hold; returns its index.
    pub fn world<P: AsRef<str>>(&mut self, name: &str, true_atoms: &[P]) -> Result<usize, ModelError> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidIdentifier(name.to_string()));
        }
        if self.model.world_index.contains_key(name) {
            return Err(ModelError::DuplicateWorld(name.to_string()));
        }
        let idx = self.model.worlds.len();
        let mut atom_ids = Vec::with_capacity(true_atoms.len());
        for p in true_atoms {
            atom_ids.push(
                self.model
                    .atom_index(p.as_ref())
                    .ok_or_else(|| ModelError::UnknownAtom(p.as_ref().to_string()))?,
            );
        }
        self.model.worlds.push(name.to_string());
        self.model.world_index.insert(name.to_string(), idx);
        for p in atom_ids {
            self.model.valuation[p].insert(idx);
        }
        Ok(idx)
    }

    fn lookup(&self, agent: &str, from: &str, to: &str) -> Result<(usize, usize, usize), ModelError> {
        let i = self
            .model
            .agent_index(agent)
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))?;
        let w = self
            .model
            .world(from)
            .ok_or_else(|| ModelError::UnknownWorld(from.to_string()))?;
        let v = self
            .model
            .world(to)
            .ok_or_else(|| ModelError::UnknownWorld(to.to_string()))?;
        Ok((i, w, v))
    }

    /// Directed pair `from R_agent to`.
    pub fn arrow(&mut self, agent: &str, from: &str, to: &str) -> Result<&mut Self, ModelError> {
        let (i, w, v) = self.lookup(agent, from, to)?;
        self.model.relations[i].insert(w, v);
        Ok(self)
    }

    /// Both directions.
    pub fn edge(&mut self, agent: &str, from: &str, to: &str) -> Result<&mut Self, ModelError> {
        let (i, w, v) = self.lookup(agent, from, to)?;
        self.model.relations[i].insert(w, v);
        self.model.relations[i].insert(v, w);
        Ok(self)
    }

    /// Loops for `agent` at every world currently declared.
    pub fn reflexive(&mut self, agent: &str) -> Result<&mut Self, ModelError> {
        let i = self
            .model
            .agent_index(agent)
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))?;
        for w in 0..self.model.worlds.len() {
            self.model.relations[i].insert(w, w);
        }
        Ok(self)
    }

    pub fn reflexive_all(&mut self) -> &mut Self {
        for rel in &mut self.model.relations {
            for w in 0..self.model.worlds.len() {
                rel.insert(w, w);
            }
        }
        self
    }

    pub fn build(self) -> Result<KripkeModel, ModelError> {
        if self.model.worlds.is_empty() {
            return Err(ModelError::NoWorlds(self.model.name));
        }
        Ok(self.model)
    }
}

impl KripkeModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.world_index.get(name).copied()
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn agent_index(&self, agent: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == agent)
    }

    pub fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|p| p == atom)
    }

    pub fn relation(&self, agent: &str) -> Option<&Relation> {
        self.agent_index(agent).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, agent: usize) -> &Relation {
        &self.relations[agent]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// `V(atom)`.
    pub fn extension_of(&self, atom: usize) -> &BTreeSet<usize> {
        &self.valuation[atom]
    }

    pub fn holds(&self, atom: &str, w: usize) -> bool {
        self.atom_index(atom)
            .is_some_and(|p| self.valuation[p].contains(&w))
    }

    /// Atoms true at `w`, in declaration order.
    pub fn true_atoms(&self, w: usize) -> Vec<&str> {
        self.atoms
            .iter()
            .zip(&self.valuation)
            .filter(|(_, ext)| ext.contains(&w))
            .map(|(p, _)| p.as_str())
            .collect()
    }

    /// Atom-wise valuation of `w`, aligned with `atoms()`.
    pub fn signature(&self, w: usize) -> Vec<bool> {
        self.valuation.iter().map(|ext| ext.contains(&w)).collect()
    }

    /// Same declared agents and atoms, ignoring order.
    pub fn same_vocabulary(&self, other: &KripkeModel) -> bool {
        let mine: BTreeSet<_> = self.agents.iter().collect();
        let theirs: BTreeSet<_> = other.agents.iter().collect();
        let my_atoms: BTreeSet<_> = self.atoms.iter().collect();
        let their_atoms: BTreeSet<_> = other.atoms.iter().collect();
        mine == theirs && my_atoms == their_atoms
    }

    /// Submodel on the worlds flagged in `keep`, with relations and valuation
    /// restricted. `None` when nothing is kept.
    pub fn restrict(&self, keep: &[bool]) -> Option<KripkeModel> {
        let mut remap = vec![None; self.worlds.len()];
        let mut worlds = Vec::new();
        for (w, name) in self.worlds.iter().enumerate() {
            if keep[w] {
                remap[w] = Some(worlds.len());
                worlds.push(name.clone());
            }
        }
        if worlds.is_empty() {
            return None;
        }
        let world_index = worlds.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        Some(KripkeModel {
            name: self.name.clone(),
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            worlds,
            world_index,
            relations: self.relations.iter().map(|r| r.restrict(&remap)).collect(),
            valuation: self
                .valuation
                .iter()
                .map(|ext| ext.iter().filter_map(|&w| remap[w]).collect())
                .collect(),
        })
    }

    pub fn restrict_to(&self, worlds: &BTreeSet<usize>) -> Option<KripkeModel> {
        let keep: Vec<bool> = (0..self.worlds.len()).map(|w| worlds.contains(&w)).collect();
        self.restrict(&keep)
    }

    /// Appends the worlds of `other` (same vocabulary, any order) with names
    /// prefixed by `prefix`, with their valuation and, if asked, their
    /// internal relations. Returns the index offset of the appended block.
    pub(crate) fn append_block(
        &mut self,
        other: &KripkeModel,
        prefix: &str,
        with_relations: bool,
    ) -> Result<usize, ModelError> {
        let offset = self.worlds.len();
        for name in &other.worlds {
            let fresh = format!("{prefix}{name}");
            if self.world_index.contains_key(&fresh) {
                return Err(ModelError::DuplicateWorld(fresh));
            }
            self.world_index.insert(fresh.clone(), self.worlds.len());
            self.worlds.push(fresh);
        }
        for (j, agent) in other.agents.iter().enumerate() {
            if !with_relations {
                break;
            }
            let i = self
                .agent_index(agent)
                .ok_or_else(|| ModelError::UnknownAgent(agent.clone()))?;
            let shifted = other.relations[j].shifted(offset);
            self.relations[i].extend(shifted.pairs());
        }
        for (q, atom) in other.atoms.iter().enumerate() {
            let p = self
                .atom_index(atom)
                .ok_or_else(|| ModelError::UnknownAtom(atom.clone()))?;
            self.valuation[p].extend(other.valuation[q].iter().map(|&w| w + offset));
        }
        Ok(offset)
    }

    pub(crate) fn relation_mut(&mut self, agent: usize) -> &mut Relation {
        &mut self.relations[agent]
    }

}

/// A model with a designated real world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: &str) -> Result<Self, ModelError> {
        let point = model
            .world(point)
            .ok_or_else(|| ModelError::UnknownWorld(point.to_string()))?;
        Ok(PointedModel { model, point })
    }

    pub fn at(model: KripkeModel, point: usize) -> Self {
        assert!(point < model.world_count(), "point out of range");
        PointedModel { model, point }
    }

    pub fn point_name(&self) -> &str {
        self.model.world_name(self.point)
    }

    /// `R_agent(point)`; empty for an undeclared agent.
    pub fn accessible(&self, agent: &str) -> BTreeSet<usize> {
        self.model
            .relation(agent)
            .map(|r| r.successors(self.point).collect())
            .unwrap_or_default()
    }

    /// True when `R_agent(point) = ∅`, i.e. the agent believes `false`.
    pub fn is_inconsistent(&self, agent: &str) -> bool {
        self.accessible(agent).is_empty()
    }

    /// Drops every world not reachable from the point under `R*_A`.
    pub fn prune_unreachable(&self) -> PointedModel {
        let reach = reachable_from(&self.model, [self.point]);
        let model = self
            .model
            .restrict_to(&reach)
            .expect("the point is always reachable");
        let point = model.world(self.point_name()).expect("point kept");
        PointedModel { model, point }
    }
}
