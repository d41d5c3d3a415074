use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::frame::{Model, World, WorldSet};

/// A relation `Z` between the worlds of two models.
#[derive(Debug, Clone)]
pub struct Bisimulation {
    pub left: Model,
    pub right: Model,
    /// `rows[w]` = right worlds related to left world `w`
    rows: Vec<WorldSet>,
}

impl Bisimulation {
    pub fn new<I: IntoIterator<Item = (World, World)>>(left: Model, right: Model, pairs: I) -> Self {
        let (nl, nr) = (left.frame.n(), right.frame.n());
        let mut rows = vec![WorldSet::empty(nr); nl];
        for (a, b) in pairs {
            assert!(a < nl && b < nr, "pair ({a},{b}) out of range");
            rows[a].insert(b);
        }
        Bisimulation { left, right, rows }
    }

    /// `Z = {(w, w) | w ∈ W}`; both models must share a world count.
    pub fn identity(left: Model, right: Model) -> Self {
        let n = left.frame.n();
        Bisimulation::new(left, right, (0..n).map(|w| (w, w)))
    }

    pub fn contains(&self, a: World, b: World) -> bool {
        self.rows[a].contains(b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (World, World)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a, b)))
    }

    pub fn pair_set(&self) -> BTreeSet<(World, World)> {
        self.pairs().collect()
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(WorldSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(WorldSet::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "lowercase")]
pub enum Clause {
    /// The pair disagrees on `atom`.
    Atoms { atom: String },
    /// Left successor `u` has no matching right successor.
    Forth { u: World },
    /// Right successor `u` has no matching left successor.
    Back { u: World },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisimFailure {
    pub pair: (World, World),
    #[serde(flatten)]
    pub clause: Clause,
}

impl fmt::Display for BisimFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.pair;
        match &self.clause {
            Clause::Atoms { atom } => write!(f, "pair ({a},{b}) disagrees on atom {atom}"),
            Clause::Forth { u } => write!(f, "pair ({a},{b}): forth fails for left successor {u}"),
            Clause::Back { u } => write!(f, "pair ({a},{b}): back fails for right successor {u}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum BisimVerdict {
    Ok,
    Failure(BisimFailure),
}

impl BisimVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, BisimVerdict::Ok)
    }
}

fn atom_names(left: &Model, right: &Model) -> BTreeSet<String> {
    left.valuation
        .atoms()
        .chain(right.valuation.atoms())
        .map(str::to_string)
        .collect()
}

/// First clause violated at `(w, w')` given the current `rows`.
fn pair_failure(
    left: &Model,
    right: &Model,
    atoms: &BTreeSet<String>,
    rows: &[WorldSet],
    w: World,
    w2: World,
) -> Option<Clause> {
    for a in atoms {
        if left.valuation.eval(a).contains(w) != right.valuation.eval(a).contains(w2) {
            return Some(Clause::Atoms { atom: a.clone() });
        }
    }
    let (lf, rf) = (&left.frame, &right.frame);
    let (sl, sr) = (lf.s(w), rf.s(w2));
    let rsucc = rf.successors(w2);
    let lsucc = lf.successors(w);
    for u in lsucc {
        // Z-image of S_w[u]
        let mut image = WorldSet::empty(rf.n());
        for v in sl.row(u) {
            image.union_with(&rows[v]);
        }
        let matched = rows[u]
            .intersection(rsucc)
            .iter()
            .any(|u2| sr.row(u2).is_subset(&image));
        if !matched {
            return Some(Clause::Forth { u });
        }
    }
    for u2 in rsucc {
        let matched = lsucc
            .iter()
            .filter(|&u| rows[u].contains(u2))
            .any(|u| sl.row(u).iter().all(|v| rows[v].intersects(sr.row(u2))));
        if !matched {
            return Some(Clause::Back { u: u2 });
        }
    }
    None
}

/// Checks the atom, forth and back clauses at every pair of `Z`; reports the
/// first failing pair in lexicographic order.
pub fn check_bisim(b: &Bisimulation) -> BisimVerdict {
    let atoms = atom_names(&b.left, &b.right);
    for (w, w2) in b.pairs() {
        if let Some(clause) = pair_failure(&b.left, &b.right, &atoms, &b.rows, w, w2) {
            return BisimVerdict::Failure(BisimFailure { pair: (w, w2), clause });
        }
    }
    BisimVerdict::Ok
}

/// Largest bisimulation between the models: start from atom-agreeing pairs
/// and drop failing pairs until nothing changes.
pub fn max_bisim(left: &Model, right: &Model) -> Bisimulation {
    let atoms = atom_names(left, right);
    let (nl, nr) = (left.frame.n(), right.frame.n());
    let mut rows: Vec<WorldSet> = (0..nl)
        .map(|w| {
            WorldSet::from_worlds(
                nr,
                (0..nr).filter(|&w2| {
                    atoms
                        .iter()
                        .all(|a| left.valuation.eval(a).contains(w) == right.valuation.eval(a).contains(w2))
                }),
            )
        })
        .collect();
    loop {
        let mut changed = false;
        for w in 0..nl {
            for w2 in rows[w].clone().iter() {
                if pair_failure(left, right, &atoms, &rows, w, w2).is_some() {
                    rows[w].remove(w2);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Bisimulation {
        left: left.clone(),
        right: right.clone(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::frame::{chain, random_frame, random_valuation, Valuation};
    use crate::semantics::{equiv_up_to, EquivVerdict, PointedModel};

    fn model(fr: crate::frame::Frame, val: Valuation) -> Model {
        Model::new(Arc::new(fr), val)
    }

    #[test]
    fn identity_is_bisimulation() {
        for seed in 0..40 {
            let fr = random_frame(5, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = model(fr, random_valuation(5, &["p", "q"], &mut rng));
            let b = Bisimulation::identity(m.clone(), m);
            assert_eq!(check_bisim(&b), BisimVerdict::Ok);
        }
    }

    #[test]
    fn atom_mismatch_reported() {
        let l = model(chain(2), Valuation::new(2).with("p", &[1]));
        let r = model(chain(2), Valuation::new(2).with("p", &[]));
        let v = check_bisim(&Bisimulation::identity(l, r));
        assert_eq!(
            v,
            BisimVerdict::Failure(BisimFailure {
                pair: (1, 1),
                clause: Clause::Atoms { atom: "p".into() }
            })
        );
    }

    #[test]
    fn max_bisim_examples() {
        let m = model(random_frame(4, 2), Valuation::new(4).with("p", &[0, 2]));
        let z = max_bisim(&m, &m);
        assert!((0..4).all(|w| z.contains(w, w)));
        assert!(check_bisim(&z).is_ok());
        let l = model(chain(2), Valuation::new(2).with("p", &[0, 1]));
        let r = model(chain(2), Valuation::new(2).with("q", &[0, 1]));
        assert!(max_bisim(&l, &r).is_empty());
    }

    #[test]
    fn max_bisim_contains_every_bisimulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..60 {
            let (nl, nr) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let l = model(random_frame(nl, case), random_valuation(nl, &["p"], &mut rng));
            let r = model(random_frame(nr, case + 1000), random_valuation(nr, &["p"], &mut rng));
            let max = max_bisim(&l, &r);
            assert!(check_bisim(&max).is_ok());
            let cells: Vec<(World, World)> = (0..nl).flat_map(|a| (0..nr).map(move |b| (a, b))).collect();
            for mask in 0u32..(1 << cells.len()) {
                let z = Bisimulation::new(
                    l.clone(),
                    r.clone(),
                    cells.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p),
                );
                if check_bisim(&z).is_ok() {
                    assert!(z.pairs().all(|(a, b)| max.contains(a, b)));
                }
            }
        }
    }

    #[test]
    fn bisimilar_points_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for case in 0..40 {
            let (nl, nr) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let l = model(random_frame(nl, case), random_valuation(nl, &["p", "q"], &mut rng));
            let r = model(random_frame(nr, case + 77), random_valuation(nr, &["p", "q"], &mut rng));
            let z = max_bisim(&l, &r);
            for (a, b) in z.pairs() {
                let v = equiv_up_to(
                    &PointedModel::new(l.clone(), a),
                    &PointedModel::new(r.clone(), b),
                    2,
                    &["p", "q"],
                )
                .unwrap();
                assert!(matches!(v, EquivVerdict::Agree { .. }), "case {case} pair ({a},{b}): {v:?}");
            }
        }
    }
}
