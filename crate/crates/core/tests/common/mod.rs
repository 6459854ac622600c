//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use apriori_del::apriori::{auto_map, validate, AprioriUpdate, FrameMode};
use apriori_del::kripke::{KripkeModel, ModelBuilder, PointedModel};
use apriori_del::{evaluate, Formula};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const AGENTS: [&str; 3] = ["a", "b", "c"];
pub const ATOMS: [&str; 3] = ["p", "q", "r"];

pub fn corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

// ---------------------------------------------------------------------------
// relations

/// Pairs of a relation on `0..n`, as a set.
pub type Pairs = BTreeSet<(usize, usize)>;

pub fn pairs_of(m: &KripkeModel, agent: &str) -> Pairs {
    m.relation(agent).map(|r| r.pairs().collect()).unwrap_or_default()
}

pub fn reflexive(n: usize, r: &Pairs) -> bool {
    (0..n).all(|w| r.contains(&(w, w)))
}

pub fn transitive(n: usize, r: &Pairs) -> bool {
    (0..n).all(|w| (0..n).all(|v| (0..n).all(|u| !(r.contains(&(w, v)) && r.contains(&(v, u))) || r.contains(&(w, u)))))
}

pub fn euclidean(n: usize, r: &Pairs) -> bool {
    (0..n).all(|w| (0..n).all(|v| (0..n).all(|u| !(r.contains(&(w, v)) && r.contains(&(w, u))) || r.contains(&(v, u)))))
}

pub fn symmetric(n: usize, r: &Pairs) -> bool {
    (0..n).all(|w| (0..n).all(|v| !r.contains(&(w, v)) || r.contains(&(v, w))))
}

/// Disjoint nonempty groups of worlds drawn from `pool`.
fn random_groups(rng: &mut TestRng, pool: &[usize]) -> Vec<Vec<usize>> {
    let mut pool = pool.to_vec();
    pool.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for w in pool {
        match rng.gen_range(0..4) {
            0 => {}
            1 if !groups.is_empty() => {
                let i = rng.gen_range(0..groups.len());
                groups[i].push(w);
            }
            _ => groups.push(vec![w]),
        }
    }
    groups
}

/// A partial equivalence relation on `worlds`: some disjoint cliques, the
/// rest isolated.
pub fn random_per(rng: &mut TestRng, worlds: &[usize]) -> Pairs {
    let mut r = Pairs::new();
    for g in random_groups(rng, worlds) {
        for &x in &g {
            for &y in &g {
                r.insert((x, y));
            }
        }
    }
    r
}

/// A transitive euclidean relation on `worlds`: clusters plus worlds that
/// see exactly one cluster or nothing.
pub fn random_introspective(rng: &mut TestRng, worlds: &[usize]) -> Pairs {
    let groups = random_groups(rng, worlds);
    let mut r = Pairs::new();
    for g in &groups {
        for &x in g {
            for &y in g {
                r.insert((x, y));
            }
        }
    }
    if groups.is_empty() {
        return r;
    }
    for &w in worlds {
        if groups.iter().any(|g| g.contains(&w)) || rng.gen_bool(0.3) {
            continue;
        }
        for &y in &groups[rng.gen_range(0..groups.len())] {
            r.insert((w, y));
        }
    }
    r
}

/// Any relation on `0..n`, biased towards the interesting shapes.
pub fn random_relation(rng: &mut TestRng, n: usize) -> Pairs {
    let worlds: Vec<usize> = (0..n).collect();
    match rng.gen_range(0..5) {
        0 => {
            let density = rng.gen_range(0.1..0.7);
            (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|_| rng.gen_bool(density))
                .collect()
        }
        1 => random_per(rng, &worlds),
        2 => {
            let mut r = random_per(rng, &worlds);
            r.extend((0..n).map(|w| (w, w)));
            // close again so the result is an equivalence
            let mut changed = true;
            while changed {
                changed = false;
                let snapshot: Vec<_> = r.iter().copied().collect();
                for &(x, y) in &snapshot {
                    for &(y2, z) in &snapshot {
                        if y == y2 && r.insert((x, z)) {
                            changed = true;
                        }
                    }
                    if r.insert((y, x)) {
                        changed = true;
                    }
                }
            }
            r
        }
        3 => random_introspective(rng, &worlds),
        _ => {
            let mut r = random_introspective(rng, &worlds);
            if let Some(&p) = r.iter().collect::<Vec<_>>().choose(rng) {
                r.remove(&p.clone());
            }
            r
        }
    }
}

// ---------------------------------------------------------------------------
// models

pub fn world_name(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

/// Builds a model from per-agent pair sets and per-world true atoms.
pub fn build(name: &str, agents: &[&str], atoms: &[&str], valuation: &[Vec<&str>], rels: &[Pairs], prefix: &str) -> KripkeModel {
    let mut b = ModelBuilder::new(name, agents, atoms).unwrap();
    for (i, v) in valuation.iter().enumerate() {
        b.world(&world_name(prefix, i), v).unwrap();
    }
    for (agent, r) in agents.iter().zip(rels) {
        for &(x, y) in r {
            b.arrow(agent, &world_name(prefix, x), &world_name(prefix, y)).unwrap();
        }
    }
    b.build().unwrap()
}

pub fn random_valuation<'a>(rng: &mut TestRng, n: usize, atoms: &[&'a str]) -> Vec<Vec<&'a str>> {
    (0..n)
        .map(|_| atoms.iter().copied().filter(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

/// Shared vocabulary of one random instance.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub agents: Vec<&'static str>,
    pub atoms: Vec<&'static str>,
}

impl Vocabulary {
    pub fn random(rng: &mut TestRng) -> Self {
        Vocabulary {
            agents: AGENTS[..rng.gen_range(2..=3)].to_vec(),
            atoms: ATOMS[..rng.gen_range(1..=3)].to_vec(),
        }
    }
}

/// An introspective pointed model whose point nobody considers possible and
/// where `agent` sees nothing from the point.
pub fn random_target(rng: &mut TestRng, voc: &Vocabulary, agent: &str) -> PointedModel {
    let n = rng.gen_range(1..=6);
    let others: Vec<usize> = (1..n).collect();
    let mut rels = Vec::new();
    for &ag in &voc.agents {
        let mut r = random_introspective(rng, &others);
        if ag != agent && n > 1 && rng.gen_bool(0.8) {
            // the point sees one cluster of the rest
            let targets: Vec<BTreeSet<usize>> = others
                .iter()
                .filter(|&&w| r.contains(&(w, w)))
                .map(|&w| r.iter().filter(|(x, _)| *x == w).map(|&(_, y)| y).collect())
                .collect();
            if let Some(c) = targets.choose(rng) {
                for &y in c {
                    r.insert((0, y));
                }
            }
        }
        rels.push(r);
    }
    let val = random_valuation(rng, n, &voc.atoms);
    PointedModel::at(build("target", &voc.agents, &voc.atoms, &val, &rels, "w"), 0)
}

/// A quasi-epistemic model with at least one nonempty class for `agent`.
pub fn random_quasi_epistemic(rng: &mut TestRng, voc: &Vocabulary, agent: &str, name: &str, prefix: &str) -> KripkeModel {
    let n = rng.gen_range(1..=6);
    let worlds: Vec<usize> = (0..n).collect();
    let rels: Vec<Pairs> = voc
        .agents
        .iter()
        .map(|&ag| {
            let mut r = random_per(rng, &worlds);
            if ag == agent && r.is_empty() {
                r.insert((0, 0));
            }
            r
        })
        .collect();
    let val = random_valuation(rng, n, &voc.atoms);
    build(name, &voc.agents, &voc.atoms, &val, &rels, prefix)
}

fn agent_classes(m: &KripkeModel, agent: &str) -> Vec<BTreeSet<usize>> {
    let r = m.relation(agent).unwrap();
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    for w in 0..m.world_count() {
        let c: BTreeSet<usize> = r.successors(w).collect();
        if !c.is_empty() && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// A random update for `agent` that passes all preconditions on `target`.
pub fn random_update(rng: &mut TestRng, target: &PointedModel, voc: &Vocabulary, agent: &str) -> AprioriUpdate {
    loop {
        let trial = random_quasi_epistemic(rng, voc, agent, "trial", "t");
        let backup = if rng.gen_bool(0.3) {
            let names: Vec<String> = (0..trial.world_count()).map(|i| world_name("s", i)).collect();
            // same frame under new names
            let mut b = ModelBuilder::new("backup", &voc.agents, &voc.atoms).unwrap();
            for (i, n) in names.iter().enumerate() {
                b.world(n, &trial.true_atoms(i)).unwrap();
            }
            for &ag in &voc.agents {
                for (x, y) in trial.relation(ag).unwrap().pairs() {
                    b.arrow(ag, &names[x], &names[y]).unwrap();
                }
            }
            b.build().unwrap()
        } else {
            random_quasi_epistemic(rng, voc, agent, "backup", "s")
        };
        let classes = agent_classes(&trial, agent);
        let cluster: Vec<String> = classes
            .choose(rng)
            .unwrap()
            .iter()
            .map(|&w| trial.world_name(w).to_string())
            .collect();
        let map: BTreeMap<usize, usize> = match rng.gen_range(0..5) {
            0 => BTreeMap::new(),
            _ => auto_map(agent, &trial, &backup, &voc.atoms),
        };
        let u = AprioriUpdate::new("u", agent, trial, &cluster, backup, &[] as &[(&str, &str)])
            .unwrap()
            .with_map(map);
        if validate(target, &u, FrameMode::Strict).is_ok() {
            return u;
        }
    }
}

// ---------------------------------------------------------------------------
// formulas

/// Random formula with modal depth at most `depth` over the given agents and
/// atoms; announcements only when `announce` is set.
pub fn random_formula(rng: &mut TestRng, agents: &[&str], atoms: &[&str], depth: usize, announce: bool) -> Formula {
    let leaf = |rng: &mut TestRng| match rng.gen_range(0..atoms.len() + 2) {
        0 => Formula::False,
        1 => Formula::top(),
        i => Formula::atom(atoms[i - 2]),
    };
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng);
    }
    let modal = if announce { 5 } else { 4 };
    match rng.gen_range(0..=modal) {
        0 => random_formula(rng, agents, atoms, depth, announce).not(),
        1 => random_formula(rng, agents, atoms, depth, announce).and(random_formula(rng, agents, atoms, depth, announce)),
        2 => random_formula(rng, agents, atoms, depth, announce).or(random_formula(rng, agents, atoms, depth, announce)),
        3 | 4 => Formula::believes(*agents.choose(rng).unwrap(), random_formula(rng, agents, atoms, depth - 1, announce)),
        _ => Formula::announced(
            random_formula(rng, agents, atoms, depth - 1, announce),
            random_formula(rng, agents, atoms, depth - 1, announce),
        ),
    }
}

// ---------------------------------------------------------------------------
// separation by definable sets

/// Every subset of the disjoint union of two models definable by a formula,
/// each with one defining formula of least modal depth found. Worlds of `m1`
/// come first. Both models must share agents and atoms; at most 16 worlds.
pub fn definable_sets(m1: &KripkeModel, m2: &KripkeModel) -> HashMap<u16, Formula> {
    let n1 = m1.world_count();
    let n = n1 + m2.world_count();
    assert!(n <= 16);
    let full: u16 = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let side = |w: usize| if w < n1 { (m1, w) } else { (m2, w - n1) };
    let holds = |p: &str, w: usize| {
        let (m, v) = side(w);
        m.holds(p, v)
    };
    let succ: Vec<Vec<u16>> = m1
        .agents()
        .iter()
        .map(|ag| {
            (0..n)
                .map(|w| {
                    let (m, v) = side(w);
                    let off = if w < n1 { 0 } else { n1 };
                    m.relation(ag).unwrap().successors(v).fold(0u16, |acc, y| acc | 1 << (y + off))
                })
                .collect()
        })
        .collect();

    let mut known: HashMap<u16, Formula> = HashMap::new();
    let mut queue: VecDeque<u16> = VecDeque::new();
    let add = |known: &mut HashMap<u16, Formula>, queue: &mut VecDeque<u16>, s: u16, f: Formula| {
        if let std::collections::hash_map::Entry::Vacant(e) = known.entry(s) {
            e.insert(f);
            queue.push_back(s);
        }
    };
    add(&mut known, &mut queue, 0, Formula::False);
    for p in m1.atoms() {
        let s = (0..n).filter(|&w| holds(p, w)).fold(0u16, |acc, w| acc | 1 << w);
        add(&mut known, &mut queue, s, Formula::atom(p.clone()));
    }
    // breadth-first over the closure operations keeps depths small
    while let Some(s) = queue.pop_front() {
        let f = known[&s].clone();
        add(&mut known, &mut queue, !s & full, f.clone().not());
        for (i, ag) in m1.agents().iter().enumerate() {
            let boxed = (0..n).filter(|&w| succ[i][w] & !s == 0).fold(0u16, |acc, w| acc | 1 << w);
            add(&mut known, &mut queue, boxed, Formula::believes(ag.clone(), f.clone()));
        }
        let others: Vec<(u16, Formula)> = known.iter().map(|(&t, g)| (t, g.clone())).collect();
        for (t, g) in others {
            add(&mut known, &mut queue, s & t, f.clone().and(g));
        }
    }
    known
}

/// A formula true at one point and false at the other, if any exists.
pub fn separating_formula(pm1: &PointedModel, pm2: &PointedModel) -> Option<Formula> {
    let n1 = pm1.model.world_count();
    let sets = definable_sets(&pm1.model, &pm2.model);
    let mut found: Vec<&Formula> = sets
        .iter()
        .filter(|(&s, _)| (s >> pm1.point & 1) != (s >> (n1 + pm2.point) & 1))
        .map(|(_, f)| f)
        .collect();
    found.sort_by_key(|f| (f.modal_depth(), f.to_string().len(), f.to_string()));
    found.first().map(|f| (*f).clone())
}

pub fn agree(pm1: &PointedModel, pm2: &PointedModel, f: &Formula) -> bool {
    evaluate(pm1, f).unwrap() == evaluate(pm2, f).unwrap()
}
