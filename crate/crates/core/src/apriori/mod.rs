//! A priori belief updates `(M^a, U^a, M^¬a, ↦)` and their application to an
//! agent with inconsistent beliefs.

pub mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kripke::{classify, KripkeModel, ModelError, PointedModel};

/// Frame requirements on trial and backup models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameMode {
    /// Quasi-epistemic trial and backup.
    #[default]
    Strict,
    /// Introspective is enough.
    Relaxed,
}

impl fmt::Display for FrameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameMode::Strict => "strict",
            FrameMode::Relaxed => "relaxed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    Atomic,
    Reasoning,
    Simulation,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Atomic => "atomic",
            Condition::Reasoning => "reasoning",
            Condition::Simulation => "simulation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// Trial and backup world names involved, in the order of the condition.
    pub witnesses: Vec<String>,
    pub agent: Option<String>,
    pub atom: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} coherency fails at ({})", self.condition, self.witnesses.join(", "))?;
        if let Some(a) = &self.agent {
            write!(f, " for agent {a}")?;
        }
        if let Some(p) = &self.atom {
            write!(f, " on atom {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoherencyReport {
    pub violations: Vec<Violation>,
}

impl CoherencyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AprioriError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("agent `{0}` is not declared")]
    UnknownAgent(String),
    #[error("{which} model does not share the target's agents and atoms")]
    VocabularyMismatch { which: &'static str },
    #[error("{which} world `{world}` is not declared")]
    UnknownWorld { which: &'static str, world: String },
    #[error("trial world `{0}` is mapped twice")]
    MapNotFunctional(String),
    #[error("the cluster is empty")]
    EmptyCluster,
    #[error("cluster {{{0}}} is not a cluster of the updating agent")]
    NotACluster(String),
    #[error("cluster {{{given}}} is a proper part of the cluster {{{full}}}")]
    ClusterNotMaximal { given: String, full: String },
    #[error("target model is not introspective")]
    NotIntrospective,
    #[error("{which} model is not {required}")]
    FrameViolation { which: &'static str, required: &'static str },
    #[error("agent `{0}` is not inconsistent at the point")]
    PointNotInconsistent(String),
    #[error("coherency fails: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    CoherencyFailure(CoherencyReport),
    #[error("two updates for agent `{0}` in one batch")]
    DuplicateAgent(String),
    #[error("update for agent `{agent}`: {source}")]
    Batch { agent: String, source: Box<AprioriError> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AprioriUpdate {
    name: String,
    agent: String,
    trial: KripkeModel,
    cluster: BTreeSet<usize>,
    backup: KripkeModel,
    /// Trial world index to backup world index.
    map: BTreeMap<usize, usize>,
}

fn lookup(m: &KripkeModel, which: &'static str, w: &str) -> Result<usize, AprioriError> {
    m.world(w).ok_or_else(|| AprioriError::UnknownWorld {
        which,
        world: w.to_string(),
    })
}

impl AprioriUpdate {
    /// Resolves world names; frame and coherency requirements are checked
    /// separately so that incoherent candidates can still be reported on.
    pub fn new<C, S>(
        name: impl Into<String>,
        agent: impl Into<String>,
        trial: KripkeModel,
        cluster: &[C],
        backup: KripkeModel,
        map: &[(S, S)],
    ) -> Result<Self, AprioriError>
    where
        C: AsRef<str>,
        S: AsRef<str>,
    {
        let agent = agent.into();
        if trial.agent_index(&agent).is_none() {
            return Err(AprioriError::UnknownAgent(agent));
        }
        let cluster = cluster
            .iter()
            .map(|w| lookup(&trial, "trial", w.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut resolved = BTreeMap::new();
        for (t, b) in map {
            let u = lookup(&trial, "trial", t.as_ref())?;
            let v = lookup(&backup, "backup", b.as_ref())?;
            if resolved.insert(u, v).is_some() {
                return Err(AprioriError::MapNotFunctional(t.as_ref().to_string()));
            }
        }
        Ok(AprioriUpdate {
            name: name.into(),
            agent,
            trial,
            cluster,
            backup,
            map: resolved,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn agent(&self) -> &str {
        &self.agent
    }

    pub fn trial(&self) -> &KripkeModel {
        &self.trial
    }

    pub fn backup(&self) -> &KripkeModel {
        &self.backup
    }

    pub fn cluster(&self) -> &BTreeSet<usize> {
        &self.cluster
    }

    pub fn cluster_names(&self) -> Vec<&str> {
        self.cluster.iter().map(|&w| self.trial.world_name(w)).collect()
    }

    pub fn map(&self) -> &BTreeMap<usize, usize> {
        &self.map
    }

    pub fn map_names(&self) -> Vec<(&str, &str)> {
        self.map
            .iter()
            .map(|(&u, &v)| (self.trial.world_name(u), self.backup.world_name(v)))
            .collect()
    }

    pub fn with_map(mut self, map: BTreeMap<usize, usize>) -> Self {
        self.map = map;
        self
    }

    /// Checks the frame and cluster requirements that do not depend on the
    /// target model.
    pub fn validate_shape(&self, mode: FrameMode) -> Result<(), AprioriError> {
        for (which, m) in [("trial", &self.trial), ("backup", &self.backup)] {
            let p = classify(m);
            let ok = match mode {
                FrameMode::Strict => p.quasi_epistemic(),
                FrameMode::Relaxed => p.introspective(),
            };
            if !ok {
                return Err(AprioriError::FrameViolation {
                    which,
                    required: match mode {
                        FrameMode::Strict => "quasi-epistemic",
                        FrameMode::Relaxed => "introspective",
                    },
                });
            }
        }
        check_cluster(&self.trial, &self.agent, &self.cluster)
    }
}

fn names(m: &KripkeModel, set: &BTreeSet<usize>) -> String {
    set.iter().map(|&w| m.world_name(w)).collect::<Vec<_>>().join(", ")
}

/// `U` must be closed and complete: `R_a(u) = U` for every `u ∈ U`.
fn check_cluster(trial: &KripkeModel, agent: &str, cluster: &BTreeSet<usize>) -> Result<(), AprioriError> {
    if cluster.is_empty() {
        return Err(AprioriError::EmptyCluster);
    }
    let rel = trial.relation(agent).expect("agent checked at construction");
    for &u in cluster {
        let succ: BTreeSet<usize> = rel.successors(u).collect();
        if &succ == cluster {
            continue;
        }
        if succ.is_superset(cluster) && cluster.iter().all(|&x| cluster.iter().all(|&y| rel.contains(x, y))) {
            return Err(AprioriError::ClusterNotMaximal {
                given: names(trial, cluster),
                full: names(trial, &succ),
            });
        }
        return Err(AprioriError::NotACluster(names(trial, cluster)));
    }
    Ok(())
}

/// The three coherency conditions over the given atom vocabulary; atoms
/// missing from a model count as false there.
pub fn check_coherency<P: AsRef<str>>(u: &AprioriUpdate, atoms: &[P]) -> CoherencyReport {
    let (t, b) = (&u.trial, &u.backup);
    let mut violations = Vec::new();
    for (&x, &x2) in &u.map {
        for p in atoms {
            let p = p.as_ref();
            if t.holds(p, x) != b.holds(p, x2) {
                violations.push(Violation {
                    condition: Condition::Atomic,
                    witnesses: vec![t.world_name(x).into(), b.world_name(x2).into()],
                    agent: None,
                    atom: Some(p.to_string()),
                });
            }
        }
    }
    for agent in t.agents() {
        if agent == &u.agent {
            continue;
        }
        let rt = t.relation(agent).unwrap();
        let empty = Default::default();
        let rb = b.relation(agent).unwrap_or(&empty);
        for (&x, &x2) in &u.map {
            for (&y, &y2) in &u.map {
                if rt.contains(x, y) != rb.contains(x2, y2) {
                    violations.push(Violation {
                        condition: Condition::Reasoning,
                        witnesses: vec![
                            t.world_name(x).into(),
                            t.world_name(y).into(),
                            b.world_name(x2).into(),
                            b.world_name(y2).into(),
                        ],
                        agent: Some(agent.clone()),
                        atom: None,
                    });
                }
            }
        }
        for (&x, &x2) in &u.map {
            for y2 in rb.successors(x2) {
                let matched = rt.successors(x).any(|y| u.map.get(&y) == Some(&y2));
                if !matched {
                    violations.push(Violation {
                        condition: Condition::Simulation,
                        witnesses: vec![
                            t.world_name(x).into(),
                            b.world_name(x2).into(),
                            b.world_name(y2).into(),
                        ],
                        agent: Some(agent.clone()),
                        atom: None,
                    });
                }
            }
        }
    }
    CoherencyReport { violations }
}

/// Greedy correspondence: each trial world in declaration order takes the
/// first unused backup world with the same valuation that keeps the partial
/// map reasoning-coherent.
pub fn auto_map<P: AsRef<str>>(
    agent: &str,
    trial: &KripkeModel,
    backup: &KripkeModel,
    atoms: &[P],
) -> BTreeMap<usize, usize> {
    let sig = |m: &KripkeModel, w: usize| -> Vec<bool> { atoms.iter().map(|p| m.holds(p.as_ref(), w)).collect() };
    let others: Vec<&String> = trial.agents().iter().filter(|a| a.as_str() != agent).collect();
    let empty = Default::default();
    let rels: Vec<_> = others
        .iter()
        .map(|a| (trial.relation(a).unwrap(), backup.relation(a).unwrap_or(&empty)))
        .collect();
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut used = vec![false; backup.world_count()];
    for x in 0..trial.world_count() {
        let s = sig(trial, x);
        let pick = (0..backup.world_count()).find(|&x2| {
            !used[x2]
                && sig(backup, x2) == s
                && rels.iter().all(|(rt, rb)| {
                    rt.contains(x, x) == rb.contains(x2, x2)
                        && map
                            .iter()
                            .all(|(&y, &y2)| rt.contains(x, y) == rb.contains(x2, y2) && rt.contains(y, x) == rb.contains(y2, x2))
                })
        });
        if let Some(x2) = pick {
            used[x2] = true;
            map.insert(x, x2);
        }
    }
    map
}

/// Result of applying an update, with the positions of the grafted blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppliedUpdate {
    pub result: PointedModel,
    pub mode: FrameMode,
    /// Indices in `result` of the cluster copies, in trial order.
    pub cluster: Vec<usize>,
    /// Index in `result` of each backup world, by backup index.
    pub backup: Vec<usize>,
    pub trial_prefix: String,
    pub backup_prefix: String,
}

/// Prefixes for the `generation`-th update by `agent` on the same model.
fn prefixes(agent: &str, generation: usize) -> (String, String) {
    if generation == 1 {
        (format!("{agent}$trial$"), format!("{agent}$backup$"))
    } else {
        (
            format!("{agent}${generation}$trial$"),
            format!("{agent}${generation}$backup$"),
        )
    }
}

fn fresh_prefixes(m: &KripkeModel, agent: &str) -> (String, String) {
    (1..)
        .map(|g| prefixes(agent, g))
        .find(|(t, b)| !m.worlds().iter().any(|w| w.starts_with(t.as_str()) || w.starts_with(b.as_str())))
        .expect("unbounded generations")
}

/// All preconditions of [`apply_update`] on `pm`.
pub fn validate(pm: &PointedModel, u: &AprioriUpdate, mode: FrameMode) -> Result<(), AprioriError> {
    let m = &pm.model;
    if m.agent_index(&u.agent).is_none() {
        return Err(AprioriError::UnknownAgent(u.agent.clone()));
    }
    if !u.trial.same_vocabulary(m) {
        return Err(AprioriError::VocabularyMismatch { which: "trial" });
    }
    if !u.backup.same_vocabulary(m) {
        return Err(AprioriError::VocabularyMismatch { which: "backup" });
    }
    if !classify(m).introspective() {
        return Err(AprioriError::NotIntrospective);
    }
    if !pm.is_inconsistent(&u.agent) {
        return Err(AprioriError::PointNotInconsistent(u.agent.clone()));
    }
    u.validate_shape(mode)?;
    let report = check_coherency(u, m.atoms());
    if !report.passed() {
        return Err(AprioriError::CoherencyFailure(report));
    }
    Ok(())
}

/// `M ⊙_a U` at the same point.
pub fn apply_update(pm: &PointedModel, u: &AprioriUpdate, mode: FrameMode) -> Result<AppliedUpdate, AprioriError> {
    validate(pm, u, mode)?;
    Ok(graft(pm, u, mode))
}

fn graft(pm: &PointedModel, u: &AprioriUpdate, mode: FrameMode) -> AppliedUpdate {
    let (trial_prefix, backup_prefix) = fresh_prefixes(&pm.model, &u.agent);
    let mut m = pm.model.clone();
    let cluster_model = u.trial.restrict_to(&u.cluster).expect("nonempty cluster");
    let u_off = m
        .append_block(&cluster_model, &trial_prefix, false)
        .expect("vocabulary validated, names fresh");
    let b_off = m
        .append_block(&u.backup, &backup_prefix, true)
        .expect("vocabulary validated, names fresh");
    let cluster: Vec<usize> = (0..cluster_model.world_count()).map(|i| u_off + i).collect();
    // cluster_model keeps trial order, so its i-th world is the i-th cluster member
    let trial_to_new: BTreeMap<usize, usize> = u.cluster.iter().copied().zip(cluster.iter().copied()).collect();

    let a = pm.model.agent_index(&u.agent).unwrap();
    let ra = m.relation_mut(a);
    for &x in &cluster {
        ra.insert(pm.point, x);
        for &y in &cluster {
            ra.insert(x, y);
        }
    }
    for (bi, agent) in pm.model.agents().iter().enumerate() {
        if bi == a {
            continue;
        }
        let rt = u.trial.relation(agent).unwrap();
        let mut added = Vec::new();
        for (&x, &nx) in &trial_to_new {
            for y in rt.successors(x) {
                if let Some(&y2) = u.map.get(&y) {
                    added.push((nx, b_off + y2));
                }
            }
        }
        m.relation_mut(bi).extend(added);
    }
    AppliedUpdate {
        result: PointedModel { model: m, point: pm.point },
        mode,
        cluster,
        backup: (0..u.backup.world_count()).map(|i| b_off + i).collect(),
        trial_prefix,
        backup_prefix,
    }
}

/// Simultaneous updates, at most one per agent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UpdateBatch {
    updates: BTreeMap<String, AprioriUpdate>,
}

impl UpdateBatch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails if the agent already has an update in the batch.
    pub fn insert(&mut self, u: AprioriUpdate) -> Result<(), AprioriUpdate> {
        if self.updates.contains_key(u.agent()) {
            return Err(u);
        }
        self.updates.insert(u.agent().to_string(), u);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn updates(&self) -> impl Iterator<Item = &AprioriUpdate> {
        self.updates.values()
    }
}

impl FromIterator<AprioriUpdate> for UpdateBatch {
    /// Later updates for the same agent replace earlier ones.
    fn from_iter<T: IntoIterator<Item = AprioriUpdate>>(iter: T) -> Self {
        UpdateBatch {
            updates: iter.into_iter().map(|u| (u.agent().to_string(), u)).collect(),
        }
    }
}

fn tagged(agent: &str, e: AprioriError) -> AprioriError {
    AprioriError::Batch {
        agent: agent.to_string(),
        source: Box::new(e),
    }
}

/// Applies the batch in lexicographic agent order after validating every
/// entry against the original model.
pub fn apply_batch(pm: &PointedModel, batch: &UpdateBatch, mode: FrameMode) -> Result<PointedModel, AprioriError> {
    apply_in_order(pm, batch.updates().collect::<Vec<_>>().as_slice(), mode)
}

/// As [`apply_batch`] with an explicit order.
pub fn apply_in_order(pm: &PointedModel, updates: &[&AprioriUpdate], mode: FrameMode) -> Result<PointedModel, AprioriError> {
    let mut seen = BTreeSet::new();
    for u in updates {
        if !seen.insert(u.agent()) {
            return Err(AprioriError::DuplicateAgent(u.agent().to_string()));
        }
        validate(pm, u, mode).map_err(|e| tagged(u.agent(), e))?;
    }
    let mut current = pm.clone();
    for u in updates {
        current = graft(&current, u, mode).result;
    }
    Ok(current)
}
