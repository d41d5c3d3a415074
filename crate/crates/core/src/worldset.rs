//! Fixed-universe bitsets over the worlds `0..n` of a frame, and sparse
//! binary relations built from them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// World identifier. Worlds of a frame with `n` worlds are `0..n`.
pub type World = usize;

const WORD: usize = 64;

/// A subset of the worlds of a frame with a fixed universe size.
///
/// Binary operations between sets of different universe sizes panic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    universe: usize,
    words: SmallVec<[u64; 2]>,
}

impl WorldSet {
    pub fn empty(universe: usize) -> Self {
        let len = universe.div_ceil(WORD);
        WorldSet {
            universe,
            words: SmallVec::from_elem(0, len),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn singleton(universe: usize, w: World) -> Self {
        let mut s = Self::empty(universe);
        s.insert(w);
        s
    }

    pub fn from_worlds<I: IntoIterator<Item = World>>(universe: usize, worlds: I) -> Self {
        let mut s = Self::empty(universe);
        for w in worlds {
            s.insert(w);
        }
        s
    }

    /// Builds the set whose members are the set bits of `bits`.
    /// Requires `universe <= 64`.
    pub fn from_bits(universe: usize, bits: u64) -> Self {
        assert!(universe <= WORD, "from_bits needs a universe of at most 64 worlds");
        let mut s = Self::empty(universe);
        if universe > 0 {
            s.words[0] = bits;
            s.trim();
        }
        s
    }

    /// Low 64 bits of the membership vector.
    pub fn bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// All subsets of a universe of `universe <= 20` worlds, in increasing
    /// order of their bit encoding.
    pub fn all_subsets(universe: usize) -> impl Iterator<Item = WorldSet> {
        assert!(universe <= 20, "subset enumeration over more than 20 worlds");
        (0..1u64 << universe).map(move |b| WorldSet::from_bits(universe, b))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn check_same(&self, other: &WorldSet) {
        assert_eq!(
            self.universe, other.universe,
            "world sets over different frames"
        );
    }

    pub fn contains(&self, w: World) -> bool {
        w < self.universe && self.words[w / WORD] >> (w % WORD) & 1 == 1
    }

    pub fn insert(&mut self, w: World) -> bool {
        assert!(w < self.universe, "world {w} out of range 0..{}", self.universe);
        let word = &mut self.words[w / WORD];
        let mask = 1u64 << (w % WORD);
        let fresh = *word & mask == 0;
        *word |= mask;
        fresh
    }

    pub fn remove(&mut self, w: World) -> bool {
        if w >= self.universe {
            return false;
        }
        let word = &mut self.words[w / WORD];
        let mask = 1u64 << (w % WORD);
        let present = *word & mask != 0;
        *word &= !mask;
        present
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == WorldSet::full(self.universe)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= *b;
        }
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        self.check_same(other);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= !*b;
        }
        out
    }

    pub fn complement(&self) -> WorldSet {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.trim();
        out
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.check_same(other);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &WorldSet) -> bool {
        self.check_same(other);
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn first(&self) -> Option<World> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            set: self,
            word: 0,
            bits: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<World> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    set: &'a WorldSet,
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = World;

    fn next(&mut self) -> Option<World> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * WORD + tz);
            }
            self.word += 1;
            if self.word >= self.set.words.len() {
                return None;
            }
            self.bits = self.set.words[self.word];
        }
    }
}

impl<'a> IntoIterator for &'a WorldSet {
    type Item = World;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for WorldSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Serialized form of a world set together with its universe size, for
/// places where the universe is not implied by context.
#[derive(Serialize, Deserialize)]
struct SizedWorldSet {
    universe: usize,
    members: Vec<World>,
}

impl WorldSet {
    pub fn to_sized_json(&self) -> serde_json::Value {
        serde_json::to_value(SizedWorldSet {
            universe: self.universe,
            members: self.to_vec(),
        })
        .expect("plain data serializes")
    }
}

/// A binary relation on `0..n` stored as sparse successor rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    rows: BTreeMap<World, WorldSet>,
    empty: WorldSet,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        Relation {
            n,
            rows: BTreeMap::new(),
            empty: WorldSet::empty(n),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (World, World)>>(n: usize, pairs: I) -> Self {
        let mut r = Relation::new(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: World, b: World) -> bool {
        assert!(a < self.n, "world {a} out of range 0..{}", self.n);
        let n = self.n;
        self.rows
            .entry(a)
            .or_insert_with(|| WorldSet::empty(n))
            .insert(b)
    }

    pub fn remove(&mut self, a: World, b: World) -> bool {
        let Some(row) = self.rows.get_mut(&a) else {
            return false;
        };
        let hit = row.remove(b);
        if row.is_empty() {
            self.rows.remove(&a);
        }
        hit
    }

    pub fn contains(&self, a: World, b: World) -> bool {
        self.rows.get(&a).is_some_and(|r| r.contains(b))
    }

    /// Successors of `a`.
    pub fn row(&self, a: World) -> &WorldSet {
        self.rows.get(&a).unwrap_or(&self.empty)
    }

    pub fn set_row(&mut self, a: World, row: WorldSet) {
        assert_eq!(row.universe(), self.n);
        if row.is_empty() {
            self.rows.remove(&a);
        } else {
            self.rows.insert(a, row);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(WorldSet::len).sum()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (World, World)> + '_ {
        self.rows
            .iter()
            .flat_map(|(&a, row)| row.iter().map(move |b| (a, b)))
    }

    /// Worlds with at least one successor.
    pub fn domain(&self) -> impl Iterator<Item = World> + '_ {
        self.rows.keys().copied()
    }

    /// `{ a | exists b in target, a -> b }`.
    pub fn preimage(&self, target: &WorldSet) -> WorldSet {
        let mut out = WorldSet::empty(self.n);
        for (&a, row) in &self.rows {
            if row.intersects(target) {
                out.insert(a);
            }
        }
        out
    }

    /// Transitive closure, Warshall-style over bit rows.
    pub fn transitive_closure(&self) -> Relation {
        let mut out = self.clone();
        let keys: Vec<World> = out.rows.keys().copied().collect();
        for &k in &keys {
            let Some(k_row) = out.rows.get(&k).cloned() else {
                continue;
            };
            for row in out.rows.values_mut() {
                if row.contains(k) {
                    row.union_with(&k_row);
                }
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.first_transitivity_violation().is_none()
    }

    /// First `(a, b, c)` with `a -> b -> c` but not `a -> c`.
    pub fn first_transitivity_violation(&self) -> Option<(World, World, World)> {
        for (&a, row) in &self.rows {
            for b in row {
                let missing = self.row(b).difference(row);
                if let Some(c) = missing.first() {
                    return Some((a, b, c));
                }
            }
        }
        None
    }

    /// Restriction to pairs with both ends in `set`.
    pub fn restrict(&self, set: &WorldSet) -> Relation {
        let mut out = Relation::new(self.n);
        for a in set {
            let row = self.row(a).intersection(set);
            out.set_row(a, row);
        }
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().all(|(&a, row)| row.is_subset(other.row(a)))
    }

    pub fn union_with(&mut self, other: &Relation) {
        for (&a, row) in &other.rows {
            let mut merged = self.row(a).clone();
            merged.union_with(row);
            self.set_row(a, merged);
        }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_algebra() {
        let a = WorldSet::from_worlds(5, [0, 2, 4]);
        let b = WorldSet::from_worlds(5, [2, 3]);
        assert_eq!(a.union(&b).to_vec(), vec![0, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.complement().to_vec(), vec![1, 3]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 4]);
        assert!(WorldSet::from_worlds(5, [2]).is_subset(&a));
        assert!(WorldSet::full(5).is_full());
        assert_eq!(WorldSet::empty(0).complement(), WorldSet::empty(0));
    }

    #[test]
    fn wide_universe() {
        let mut s = WorldSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.to_vec(), vec![0, 64, 129]);
        assert_eq!(s.complement().len(), 127);
        assert_eq!(WorldSet::full(130).len(), 130);
    }

    #[test]
    #[should_panic(expected = "different frames")]
    fn mixing_universes_panics() {
        let _ = WorldSet::empty(2).union(&WorldSet::empty(3));
    }

    #[test]
    fn closure_of_chain() {
        let r = Relation::from_pairs(4, [(0, 1), (1, 2), (2, 3)]);
        let t = r.transitive_closure();
        assert_eq!(t.len(), 6);
        assert!(t.first_transitivity_violation().is_none());
        assert_eq!(r.first_transitivity_violation(), Some((0, 1, 2)));
    }

    #[test]
    fn preimage_matches_definition() {
        let r = Relation::from_pairs(3, [(0, 1), (0, 2), (1, 2)]);
        assert_eq!(r.preimage(&WorldSet::singleton(3, 2)).to_vec(), vec![0, 1]);
        assert!(r.preimage(&WorldSet::singleton(3, 0)).is_empty());
    }
}
