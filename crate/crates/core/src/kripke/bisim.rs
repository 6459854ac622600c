use std::collections::BTreeSet;

use super::{KripkeModel, PointedModel, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisimulation {
    /// Whether the two points are related.
    pub related: bool,
    /// The greatest bisimulation, as `(world of pm1, world of pm2)` pairs.
    pub relation: BTreeSet<(usize, usize)>,
}

/// Valuation of `w` over `atoms`, absent atoms counting as false.
fn atom_signature(m: &KripkeModel, w: usize, atoms: &[String]) -> Vec<bool> {
    atoms
        .iter()
        .map(|p| m.atom_index(p).is_some_and(|i| m.extension_of(i).contains(&w)))
        .collect()
}

fn empty() -> Relation {
    Relation::new()
}

/// Greatest (optionally agent-restricted) bisimulation between two pointed
/// models, by refinement from atomic equivalence.
///
/// Agents and atoms are matched by name; an agent missing from one side has
/// the empty relation there.
pub fn bisimilar(pm1: &PointedModel, pm2: &PointedModel, restrict_to: Option<&[&str]>) -> Bisimulation {
    let (m1, m2) = (&pm1.model, &pm2.model);
    let atoms: Vec<String> = m1
        .atoms()
        .iter()
        .chain(m2.atoms())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let agents: Vec<String> = match restrict_to {
        Some(list) => list.iter().map(|a| a.to_string()).collect(),
        None => m1
            .agents()
            .iter()
            .chain(m2.agents())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let blank = empty();
    let rels: Vec<(&Relation, &Relation)> = agents
        .iter()
        .map(|a| (m1.relation(a).unwrap_or(&blank), m2.relation(a).unwrap_or(&blank)))
        .collect();

    let sig2: Vec<Vec<bool>> = (0..m2.world_count()).map(|v| atom_signature(m2, v, &atoms)).collect();
    let mut z: BTreeSet<(usize, usize)> = BTreeSet::new();
    for w in 0..m1.world_count() {
        let s = atom_signature(m1, w, &atoms);
        for (v, t) in sig2.iter().enumerate() {
            if &s == t {
                z.insert((w, v));
            }
        }
    }

    loop {
        let keep: BTreeSet<(usize, usize)> = z
            .iter()
            .copied()
            .filter(|&(w, v)| {
                rels.iter().all(|(r1, r2)| {
                    let forth = r1
                        .successors(w)
                        .all(|w2| r2.successors(v).any(|v2| z.contains(&(w2, v2))));
                    let back = r2
                        .successors(v)
                        .all(|v2| r1.successors(w).any(|w2| z.contains(&(w2, v2))));
                    forth && back
                })
            })
            .collect();
        if keep.len() == z.len() {
            break;
        }
        z = keep;
    }

    Bisimulation {
        related: z.contains(&(pm1.point, pm2.point)),
        relation: z,
    }
}

/// A world bijection preserving point, valuation and every agent's relation
/// (matched by name), if one exists. `result[w]` is the image of `w`.
pub fn isomorphism(pm1: &PointedModel, pm2: &PointedModel) -> Option<Vec<usize>> {
    let (m1, m2) = (&pm1.model, &pm2.model);
    if m1.world_count() != m2.world_count() || !m1.same_vocabulary(m2) {
        return None;
    }
    let atoms = m1.atoms().to_vec();
    let pairs: Vec<(&Relation, &Relation)> = m1
        .agents()
        .iter()
        .map(|a| (m1.relation(a).unwrap(), m2.relation(a).unwrap()))
        .collect();
    for (r1, r2) in &pairs {
        if r1.len() != r2.len() {
            return None;
        }
    }
    let n = m1.world_count();
    let sig1: Vec<_> = (0..n).map(|w| atom_signature(m1, w, &atoms)).collect();
    let sig2: Vec<_> = (0..n).map(|w| atom_signature(m2, w, &atoms)).collect();
    let degree = |m: &KripkeModel, w: usize| -> Vec<(usize, usize)> {
        m.agents()
            .iter()
            .map(|a| {
                let r = m.relation(a).unwrap();
                (r.successors(w).count(), r.pairs().filter(|&(_, v)| v == w).count())
            })
            .collect()
    };
    // agent order of m2 may differ; compare degrees through m1's agent order
    let deg1: Vec<_> = (0..n).map(|w| degree(m1, w)).collect();
    let deg2: Vec<_> = (0..n)
        .map(|w| {
            m1.agents()
                .iter()
                .map(|a| {
                    let r = m2.relation(a).unwrap();
                    (r.successors(w).count(), r.pairs().filter(|&(_, v)| v == w).count())
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let compatible = |w: usize, v: usize| sig1[w] == sig2[v] && deg1[w] == deg2[v];
    if !compatible(pm1.point, pm2.point) {
        return None;
    }

    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    map[pm1.point] = Some(pm2.point);
    used[pm2.point] = true;
    let order: Vec<usize> = std::iter::once(pm1.point)
        .chain((0..n).filter(|&w| w != pm1.point))
        .collect();

    fn consistent(map: &[Option<usize>], pairs: &[(&Relation, &Relation)], w: usize) -> bool {
        let v = map[w].unwrap();
        map.iter().enumerate().all(|(x, img)| match img {
            None => true,
            Some(y) => pairs
                .iter()
                .all(|(r1, r2)| r1.contains(w, x) == r2.contains(v, *y) && r1.contains(x, w) == r2.contains(*y, v)),
        })
    }

    fn search(
        i: usize,
        order: &[usize],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        pairs: &[(&Relation, &Relation)],
        compatible: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let w = order[i];
        if map[w].is_some() {
            return consistent(map, pairs, w) && search(i + 1, order, map, used, pairs, compatible);
        }
        for v in 0..used.len() {
            if used[v] || !compatible(w, v) {
                continue;
            }
            map[w] = Some(v);
            used[v] = true;
            if consistent(map, pairs, w) && search(i + 1, order, map, used, pairs, compatible) {
                return true;
            }
            map[w] = None;
            used[v] = false;
        }
        false
    }

    if search(0, &order, &mut map, &mut used, &pairs, &compatible) {
        Some(map.into_iter().map(|v| v.unwrap()).collect())
    } else {
        None
    }
}
