//! Filters over the worlds of a finite frame and the label-indexed assuring
//! relation between ultrafilters.
//!
//! Over a finite `W` every ultrafilter is principal and every proper filter
//! is the up-set of its least member, so both are stored by a single witness.

use std::fmt;

use serde::Serialize;

use crate::algebra::{r_inv_dual, s_inv};
use crate::frame::{Frame, World, WorldSet};

/// The principal ultrafilter `Π_w = {Y | w ∈ Y}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Ultrafilter {
    pub witness: World,
}

impl Ultrafilter {
    pub fn principal(w: World) -> Self {
        Ultrafilter { witness: w }
    }

    pub fn contains(&self, y: &WorldSet) -> bool {
        y.contains(self.witness)
    }
}

impl fmt::Display for Ultrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Π_{}", self.witness)
    }
}

pub fn all_ultrafilters(fr: &Frame) -> Vec<Ultrafilter> {
    fr.worlds().map(Ultrafilter::principal).collect()
}

/// A proper filter `{Y | min_set ⊆ Y}`; `min_set` is never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Filter {
    min_set: WorldSet,
}

impl Filter {
    /// `None` for the empty set, whose up-set is the improper filter.
    pub fn up(min_set: WorldSet) -> Option<Filter> {
        (!min_set.is_empty()).then_some(Filter { min_set })
    }

    pub fn up_of(n: usize, worlds: &[World]) -> Option<Filter> {
        Filter::up(WorldSet::from_worlds(n, worlds.iter().copied()))
    }

    pub fn min_set(&self) -> &WorldSet {
        &self.min_set
    }

    pub fn contains(&self, y: &WorldSet) -> bool {
        self.min_set.is_subset(y)
    }

    /// Every member, i.e. every superset of `min_set`.
    pub fn members(&self) -> Vec<WorldSet> {
        let n = self.min_set.universe();
        let free: Vec<World> = self.min_set.complement().to_vec();
        (0u64..1 << free.len())
            .map(|mask| {
                let mut s = self.min_set.clone();
                for (k, &w) in free.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        s.insert(w);
                    }
                }
                debug_assert_eq!(s.universe(), n);
                s
            })
            .collect()
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "up{}", self.min_set)
    }
}

impl Serialize for Filter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.min_set.serialize(s)
    }
}

/// All proper filters over `n` worlds, ordered by the bit encoding of
/// their least member.
pub fn all_proper_filters(n: usize) -> Vec<Filter> {
    WorldSet::all_subsets(n).filter_map(Filter::up).collect()
}

/// Result of generating a filter from a family that may lack the FIP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Proper(Filter),
    /// The whole powerset.
    Improper,
}

impl Generated {
    pub fn proper(self) -> Option<Filter> {
        match self {
            Generated::Proper(f) => Some(f),
            Generated::Improper => None,
        }
    }

    /// Least member; `∅` for the improper filter.
    pub fn min_set(&self, n: usize) -> WorldSet {
        match self {
            Generated::Proper(f) => f.min_set().clone(),
            Generated::Improper => WorldSet::empty(n),
        }
    }
}

/// A finite family of world sets, not necessarily a filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelFamily {
    n: usize,
    members: Vec<WorldSet>,
}

impl LabelFamily {
    pub fn new(n: usize, members: Vec<WorldSet>) -> Self {
        assert!(members.iter().all(|m| m.universe() == n), "family over a different frame");
        LabelFamily { n, members }
    }

    pub fn singleton(set: WorldSet) -> Self {
        LabelFamily::new(set.universe(), vec![set])
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[WorldSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn with(&self, extra: WorldSet) -> Self {
        let mut members = self.members.clone();
        members.push(extra);
        LabelFamily::new(self.n, members)
    }

    /// `⋂ a`, with the empty family meeting to `W`.
    pub fn intersection(&self) -> WorldSet {
        self.members
            .iter()
            .fold(WorldSet::full(self.n), |acc, m| acc.intersection(m))
    }

    pub fn is_subfamily_of(&self, other: &LabelFamily) -> bool {
        self.members.iter().all(|m| other.members.contains(m))
    }
}

/// Over a finite family, the FIP amounts to the whole family meeting.
pub fn has_fip(a: &LabelFamily) -> bool {
    !a.intersection().is_empty()
}

/// `l(a)`: the up-set of `⋂ a`, improper when that is empty.
pub fn generate_filter(a: &LabelFamily) -> Generated {
    match Filter::up(a.intersection()) {
        Some(f) => Generated::Proper(f),
        None => Generated::Improper,
    }
}

/// `f_□ = {Y | R̂⁻¹(Y) ∈ f}`, the up-set of `R[w]` for `f = Π_w`; improper
/// at R-leaves.
pub fn f_box(fr: &Frame, f: Ultrafilter) -> Generated {
    match Filter::up(fr.successors(f.witness).clone()) {
        Some(l) => Generated::Proper(l),
        None => Generated::Improper,
    }
}

/// Largest universe for which [`assuring`] enumerates every `A ⊆ W`.
pub const ENUMERATION_LIMIT: usize = 12;

/// `f ≺_l g`: for every `A ⊆ W`, `S⁻¹(Ā, B̄) ∈ f` implies `A ∈ g` and
/// `R̂⁻¹(A) ∈ g`, where `B` is the least member of `l`.
///
/// Checking the single choice `B` suffices because `S⁻¹` is monotone in its
/// second argument. Above [`ENUMERATION_LIMIT`] worlds the equivalent
/// [`assuring_closed_form`] is used instead of enumerating every `A`.
pub fn assuring(fr: &Frame, f: Ultrafilter, l: &Filter, g: Ultrafilter) -> bool {
    if fr.n() > ENUMERATION_LIMIT {
        return assuring_closed_form(fr, f, l, g);
    }
    assuring_hypothesis(fr, f, &l.min_set().complement(), g)
}

/// Shared core of the label checks: `bad` is the union of the complements
/// of the chosen label members.
fn assuring_hypothesis(fr: &Frame, f: Ultrafilter, bad: &WorldSet, g: Ultrafilter) -> bool {
    WorldSet::all_subsets(fr.n()).all(|a| {
        !f.contains(&s_inv(fr, &a.complement(), bad))
            || (g.contains(&a) && g.contains(&r_inv_dual(fr, &a)))
    })
}

/// `Π_w ≺_l Π_x` holds exactly when `w R x` and `S_w[x] ⊆ min(l)`.
///
/// With `G = {u ∈ R[w] | S_w[u] ⊆ min(l)}` the hypothesis holds for `A`
/// exactly when `G ⊆ A`; so the condition says `x ∈ G` and `R[x] ⊆ G`,
/// and the second part follows from the first by the frame laws.
pub fn assuring_closed_form(fr: &Frame, f: Ultrafilter, l: &Filter, g: Ultrafilter) -> bool {
    let (w, x) = (f.witness, g.witness);
    fr.r().contains(w, x) && fr.s(w).row(x).is_subset(l.min_set())
}

/// `f ≺_a g` for a raw family: every finite subfamily of `a` (all `2^|a|`
/// of them) is tried as the choice of label members.
pub fn assuring_family(fr: &Frame, f: Ultrafilter, a: &LabelFamily, g: Ultrafilter) -> bool {
    assert!(a.len() < 20, "label family too large to enumerate");
    assert!(fr.n() <= ENUMERATION_LIMIT, "frame too large to enumerate");
    (0u32..1 << a.len()).all(|mask| {
        let mut bad = fr.empty_set();
        for (k, m) in a.members().iter().enumerate() {
            if mask >> k & 1 == 1 {
                bad.union_with(&m.complement());
            }
        }
        assuring_hypothesis(fr, f, &bad, g)
    })
}

/// `B_f = {A | S⁻¹(Ā, B̄) ∈ f}` for `B = min(l)`.
pub fn b_set(fr: &Frame, f: Ultrafilter, l: &Filter) -> Vec<WorldSet> {
    let bad = l.min_set().complement();
    WorldSet::all_subsets(fr.n())
        .filter(|a| f.contains(&s_inv(fr, &a.complement(), &bad)))
        .collect()
}

/// Every `(f, l, g)` with `f ≺_l g` on the frame.
pub fn assuring_triples(fr: &Frame) -> Vec<(Ultrafilter, Filter, Ultrafilter)> {
    let labels = all_proper_filters(fr.n());
    let mut out = Vec::new();
    for f in all_ultrafilters(fr) {
        for l in &labels {
            for g in all_ultrafilters(fr) {
                if assuring(fr, f, l, g) {
                    out.push((f, l.clone(), g));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::r_inv;
    use crate::frame::{all_frames, chain, random_frame};

    fn set(n: usize, ws: &[World]) -> WorldSet {
        WorldSet::from_worlds(n, ws.iter().copied())
    }

    fn pi(w: World) -> Ultrafilter {
        Ultrafilter::principal(w)
    }

    /// The definition verbatim: all finite choices of members of `l`, all `A`.
    fn naive_assuring(fr: &Frame, f: Ultrafilter, l: &Filter, g: Ultrafilter) -> bool {
        let members = l.members();
        (0u64..1 << members.len()).all(|mask| {
            let mut bad = fr.empty_set();
            for (k, m) in members.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    bad.union_with(&m.complement());
                }
            }
            WorldSet::all_subsets(fr.n()).all(|a| {
                !s_inv(fr, &a.complement(), &bad).contains(f.witness)
                    || (a.contains(g.witness) && r_inv_dual(fr, &a).contains(g.witness))
            })
        })
    }

    #[test]
    fn ultrafilter_listing() {
        assert_eq!(all_ultrafilters(&chain(2)), vec![pi(0), pi(1)]);
        assert_eq!(all_ultrafilters(&chain(1)).len(), 1);
    }

    #[test]
    fn ultrafilter_axioms() {
        let n = 3;
        for w in 0..n {
            let f = pi(w);
            let subs: Vec<_> = WorldSet::all_subsets(n).collect();
            assert!(!f.contains(&WorldSet::empty(n)));
            for a in &subs {
                assert!(f.contains(a) != f.contains(&a.complement()));
                for b in &subs {
                    if f.contains(a) && a.is_subset(b) {
                        assert!(f.contains(b));
                    }
                    if f.contains(a) && f.contains(b) {
                        assert!(f.contains(&a.intersection(b)));
                    }
                }
            }
        }
    }

    #[test]
    fn fip_and_generation() {
        let fam = LabelFamily::new(3, vec![set(3, &[0, 1]), set(3, &[1, 2])]);
        assert!(has_fip(&fam));
        assert_eq!(generate_filter(&fam), Generated::Proper(Filter::up_of(3, &[1]).unwrap()));
        let fam = LabelFamily::new(3, vec![set(3, &[0]), set(3, &[1])]);
        assert!(!has_fip(&fam));
        assert_eq!(generate_filter(&fam), Generated::Improper);
        assert!(has_fip(&LabelFamily::new(3, vec![])));
        let full = LabelFamily::singleton(WorldSet::full(3));
        assert_eq!(generate_filter(&full).min_set(3), WorldSet::full(3));
    }

    #[test]
    fn f_box_examples() {
        assert_eq!(f_box(&chain(2), pi(0)).min_set(2), set(2, &[1]));
        assert_eq!(f_box(&chain(2), pi(1)), Generated::Improper);
        assert_eq!(f_box(&chain(3), pi(0)).min_set(3), set(3, &[1, 2]));
    }

    #[test]
    fn assuring_examples() {
        let c2 = chain(2);
        let l = Filter::up_of(2, &[1]).unwrap();
        assert!(assuring(&c2, pi(0), &l, pi(1)));
        assert!(!assuring(&c2, pi(0), &l, pi(0)));
        for l in all_proper_filters(2) {
            for g in 0..2 {
                assert!(!assuring(&c2, pi(1), &l, pi(g)));
            }
        }
    }

    #[test]
    fn reduction_matches_naive_and_closed_form() {
        for fr in all_frames(3) {
            for l in all_proper_filters(3) {
                for w in 0..3 {
                    for x in 0..3 {
                        let fast = assuring(&fr, pi(w), &l, pi(x));
                        assert_eq!(fast, naive_assuring(&fr, pi(w), &l, pi(x)));
                        assert_eq!(fast, assuring_closed_form(&fr, pi(w), &l, pi(x)));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_on_larger_random_frames() {
        for seed in 0..25 {
            let fr = random_frame(5, seed);
            for l in all_proper_filters(5) {
                for w in 0..5 {
                    for x in 0..5 {
                        assert_eq!(
                            assuring_hypothesis(&fr, pi(w), &l.min_set().complement(), pi(x)),
                            assuring_closed_form(&fr, pi(w), &l, pi(x))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn family_singleton_matches_filter() {
        for fr in all_frames(3) {
            for l in all_proper_filters(3) {
                let a = LabelFamily::singleton(l.min_set().clone());
                for (w, x) in [(0, 1), (0, 2), (1, 2), (2, 0)] {
                    assert_eq!(
                        assuring_family(&fr, pi(w), &a, pi(x)),
                        assuring(&fr, pi(w), &l, pi(x))
                    );
                }
            }
        }
    }

    #[test]
    fn empty_family() {
        // the empty choice is the only one; it is the constraint of the label W
        let c2 = chain(2);
        let empty = LabelFamily::new(2, vec![]);
        let top = Filter::up(WorldSet::full(2)).unwrap();
        for (w, x) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(
                assuring_family(&c2, pi(w), &empty, pi(x)),
                assuring(&c2, pi(w), &top, pi(x))
            );
        }
    }

    #[test]
    fn b_set_examples() {
        let c2 = chain(2);
        let b = b_set(&c2, pi(0), &Filter::up_of(2, &[1]).unwrap());
        assert!(b.contains(&set(2, &[1])));
        assert!(b.contains(&set(2, &[0, 1])));
        for fr in all_frames(3) {
            for l in all_proper_filters(3) {
                for w in 0..3 {
                    assert!(b_set(&fr, pi(w), &l).contains(&WorldSet::full(3)));
                }
            }
        }
    }

    #[test]
    fn box_projection_characterizes_predecessor_condition() {
        for fr in all_frames(3) {
            for w in 0..3 {
                for x in 0..3 {
                    let lhs = WorldSet::all_subsets(3)
                        .filter(|y| y.contains(x))
                        .all(|y| r_inv(&fr, &y).contains(w));
                    let rhs = match f_box(&fr, pi(w)) {
                        Generated::Proper(l) => l.min_set().contains(x),
                        Generated::Improper => false,
                    };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
