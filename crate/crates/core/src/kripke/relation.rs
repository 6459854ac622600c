use std::collections::BTreeSet;

/// Binary relation on world indices, stored as an explicit pair set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{(w, w) | w < world_count}`.
    pub fn identity(world_count: usize) -> Self {
        (0..world_count).map(|w| (w, w)).collect()
    }

    pub fn insert(&mut self, from: usize, to: usize) -> bool {
        self.pairs.insert((from, to))
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.pairs.contains(&(from, to))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// `R(w)` in ascending index order.
    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.range((w, 0)..=(w, usize::MAX)).map(|&(_, v)| v)
    }

    pub fn has_successor(&self, w: usize) -> bool {
        self.successors(w).next().is_some()
    }

    /// Image of a set of worlds.
    pub fn image<I: IntoIterator<Item = usize>>(&self, from: I) -> BTreeSet<usize> {
        from.into_iter().flat_map(|w| self.successors(w)).collect()
    }

    pub fn union(&self, other: &Relation) -> Relation {
        self.pairs.union(&other.pairs).copied().collect()
    }

    /// Worlds mentioned by any pair.
    pub fn field(&self) -> BTreeSet<usize> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn is_reflexive(&self, world_count: usize) -> bool {
        (0..world_count).all(|w| self.contains(w, w))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(w, v)| self.successors(v).all(|u| self.contains(w, u)))
    }

    pub fn is_euclidean(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(w, v)| self.successors(w).all(|u| self.contains(v, u)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(w, v)| self.contains(v, w))
    }

    /// Keeps pairs whose both ends are kept, renumbering through `remap`.
    pub(crate) fn restrict(&self, remap: &[Option<usize>]) -> Relation {
        self.pairs
            .iter()
            .filter_map(|&(a, b)| Some((remap[a]?, remap[b]?)))
            .collect()
    }

    /// Shifts every index by `offset`.
    pub(crate) fn shifted(&self, offset: usize) -> Relation {
        self.pairs.iter().map(|&(a, b)| (a + offset, b + offset)).collect()
    }
}

impl FromIterator<(usize, usize)> for Relation {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl Extend<(usize, usize)> for Relation {
    fn extend<T: IntoIterator<Item = (usize, usize)>>(&mut self, iter: T) {
        self.pairs.extend(iter);
    }
}

/// `first ∘ second`: pairs `(w, v)` with some `u` such that `w first u` and `u second v`.
pub fn compose(first: &Relation, second: &Relation) -> Relation {
    first
        .pairs()
        .flat_map(|(w, u)| second.successors(u).map(move |v| (w, v)))
        .collect()
}

/// `rel^0` is the identity on `world_count` worlds, `rel^(k+1) = rel ∘ rel^k`.
pub fn iterate(rel: &Relation, k: usize, world_count: usize) -> Relation {
    let mut acc = Relation::identity(world_count);
    for _ in 0..k {
        acc = compose(rel, &acc);
    }
    acc
}
