//! The pencil frame condition `xRy S_x z R u ∧ y R v S_x u → y R u`, a pair
//! of frames on either side of it, and the bisimulation argument showing no
//! formula separates them.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Formula, FormulaEnumerator};
use crate::frame::{complete, random_valuation, Frame, Model, Valuation, World, WorldSet};
use crate::semantics::{check_bisim, BisimFailure, BisimVerdict, Bisimulation, Evaluator};

/// An assignment making the antecedent true and `y R u` false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PencilWitness {
    pub x: World,
    pub y: World,
    pub z: World,
    pub u: World,
    pub v: World,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PencilVerdict {
    InClass,
    Witness(PencilWitness),
}

impl PencilVerdict {
    pub fn in_class(&self) -> bool {
        matches!(self, PencilVerdict::InClass)
    }
}

/// Lexicographically least witness `(x, y, z, u, v)`, variables allowed to
/// coincide.
pub fn pencil_check(fr: &Frame) -> PencilVerdict {
    let r = fr.r();
    for x in fr.worlds() {
        let sx = fr.s(x);
        for y in r.row(x) {
            for z in sx.row(y) {
                for u in r.row(z) {
                    if r.contains(y, u) {
                        continue;
                    }
                    if let Some(v) = r.row(y).iter().find(|&v| sx.contains(v, u)) {
                        return PencilVerdict::Witness(PencilWitness { x, y, z, u, v });
                    }
                }
            }
        }
    }
    PencilVerdict::InClass
}

/// Like [`pencil_check`] but only accepting pairwise distinct variables.
pub fn pencil_check_distinct(fr: &Frame) -> PencilVerdict {
    let r = fr.r();
    for x in fr.worlds() {
        let sx = fr.s(x);
        for y in r.row(x) {
            for z in sx.row(y) {
                for u in r.row(z) {
                    if r.contains(y, u) {
                        continue;
                    }
                    let distinct = |v: World| {
                        let vs = [x, y, z, u, v];
                        (0..5).all(|i| (i + 1..5).all(|j| vs[i] != vs[j]))
                    };
                    if let Some(v) = r.row(y).iter().find(|&v| sx.contains(v, u) && distinct(v)) {
                        return PencilVerdict::Witness(PencilWitness { x, y, z, u, v });
                    }
                }
            }
        }
    }
    PencilVerdict::InClass
}

pub const X: World = 0;
pub const Y: World = 1;
pub const Z: World = 2;
pub const U: World = 3;

/// Fan world `w_i`.
pub const fn fan(i: usize) -> World {
    4 + i
}

#[derive(Debug, Clone)]
pub struct DemoPair {
    pub fan: usize,
    /// Inside the pencil class; fan worlds `w_0..=w_m`.
    pub good: Arc<Frame>,
    /// Outside it; fan worlds `w_0..w_m`.
    pub bad: Arc<Frame>,
    /// Pairs (bad world, good world).
    pub z_template: Vec<(World, World)>,
    pub bad_witness: PencilWitness,
    /// Which `u S_x w_i` seeds of `good` were kept (bit `i` for `w_i`).
    pub good_u_links: u64,
    pub via_search: bool,
}

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("fan size must be at least 1")]
    EmptyFan,
    #[error("fan size {0} is too large for the search bound")]
    FanTooLarge(usize),
    #[error("no frame pair found among {tried} candidates with fan {fan}")]
    SearchExhausted { fan: usize, tried: usize },
    #[error("trial {trial}: transferred models not bisimilar: {failure}")]
    NotBisimilar { trial: usize, failure: BisimFailure },
    #[error("trial {trial}: {formula:#} separates bad world {left} from good world {right}")]
    Separated { trial: usize, formula: Formula, left: World, right: World },
    #[error("pencil verdicts wrong: good {good:?}, bad {bad:?}")]
    Membership { good: PencilVerdict, bad: PencilVerdict },
}

fn bad_frame(m: usize) -> Frame {
    let n = 4 + m;
    let mut r = vec![(X, Y), (X, Z), (Y, U), (Z, fan(0)), (X, U)];
    r.extend((0..m).map(|i| (X, fan(i))));
    let mut s = vec![(X, Y, Z)];
    s.extend((0..m).map(|i| (X, U, fan(i))));
    complete(n, &r, &s).expect("demo frame is acyclic")
}

/// `links` selects which fan worlds `w_i` (bit `i`, `i ≤ m`) get `u S_x w_i`.
fn good_frame(m: usize, links: u64) -> Frame {
    let n = 5 + m;
    let mut r = vec![(X, Y), (X, Z), (Y, U), (Z, fan(0)), (X, U)];
    r.extend((0..=m).map(|i| (X, fan(i))));
    let mut s = vec![(X, Y, Z)];
    s.extend((0..=m).filter(|i| links >> i & 1 == 1).map(|i| (X, U, fan(i))));
    complete(n, &r, &s).expect("demo frame is acyclic")
}

fn template(m: usize) -> Vec<(World, World)> {
    let mut z: Vec<_> = [X, Y, Z, U, fan(0)].iter().map(|&w| (w, w)).collect();
    z.extend((0..m).map(|i| (fan(i), fan(i + 1))));
    z
}

/// Whether the template is a bisimulation for a handful of transferred
/// valuations, including the empty one.
fn template_works(bad: &Arc<Frame>, good: &Arc<Frame>, m: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..8).all(|k| {
        let val = if k == 0 {
            Valuation::new(bad.n())
        } else {
            random_valuation(bad.n(), &["p", "q"], &mut rng)
        };
        let l = Model::new(bad.clone(), val.clone());
        let r = Model::new(good.clone(), transfer_valuation(&val, m));
        check_bisim(&Bisimulation::new(l, r, template(m))).is_ok()
    })
}

fn certify(m: usize, links: u64) -> Option<DemoPair> {
    let bad = Arc::new(bad_frame(m));
    let good = Arc::new(good_frame(m, links));
    let PencilVerdict::Witness(w) = pencil_check(&bad) else {
        return None;
    };
    if !pencil_check(&good).in_class() || !template_works(&bad, &good, m) {
        return None;
    }
    Some(DemoPair {
        fan: m,
        good,
        bad,
        z_template: template(m),
        bad_witness: w,
        good_u_links: links,
        via_search: false,
    })
}

/// Builds and certifies the pair. The default `good` links `u` to every fan
/// world but `w_0`; should that fail certification, every other choice of
/// links is tried.
pub fn build_demo_pair(m: usize) -> Result<DemoPair, DemoError> {
    if m == 0 {
        return Err(DemoError::EmptyFan);
    }
    if m > 16 {
        return Err(DemoError::FanTooLarge(m));
    }
    let all = (1u64 << (m + 1)) - 1;
    let default_links = all & !1;
    if let Some(pair) = certify(m, default_links) {
        return Ok(pair);
    }
    search_demo_pair(m, default_links)
}

fn search_demo_pair(m: usize, skip: u64) -> Result<DemoPair, DemoError> {
    let mut tried = 0;
    for links in (0..1u64 << (m + 1)).filter(|&l| l != skip) {
        tried += 1;
        if let Some(mut pair) = certify(m, links) {
            pair.via_search = true;
            return Ok(pair);
        }
    }
    Err(DemoError::SearchExhausted { fan: m, tried })
}

/// Valuation on `good` from one on `bad`: shared worlds copied, `w_{i+1}`
/// takes the value of `w_i`, and `w_0` keeps its own.
pub fn transfer_valuation(bad: &Valuation, m: usize) -> Valuation {
    let n = 5 + m;
    let mut out = Valuation::new(n);
    for (atom, set) in bad.iter() {
        let mut img = WorldSet::from_worlds(n, [X, Y, Z, U, fan(0)].into_iter().filter(|&w| set.contains(w)));
        for i in 0..m {
            if set.contains(fan(i)) {
                img.insert(fan(i + 1));
            }
        }
        out.set(atom, img);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub fan: usize,
    pub trials: usize,
    pub depth: usize,
    pub pool_size: usize,
    pub good_worlds: usize,
    pub bad_worlds: usize,
    pub good_in_class: bool,
    pub bad_witness: PencilWitness,
    pub via_search: bool,
    pub bisimilar_trials: usize,
    pub agreement_checks: usize,
}

pub const DEMO_ATOMS: [&str; 2] = ["p", "q"];

/// Size bound of the formulas compared at paired worlds.
pub const DEMO_FORMULA_SIZE: usize = 3;

/// Builds the pair, checks both pencil verdicts, then for each seeded random
/// valuation checks the template bisimulation and agreement on every formula
/// of modal depth ≤ `depth` (size ≤ [`DEMO_FORMULA_SIZE`]) at every paired
/// world.
pub fn nondefinability_demo(m: usize, trials: usize, depth: usize, seed: u64) -> Result<DemoReport, DemoError> {
    let pair = build_demo_pair(m)?;
    let good_v = pencil_check(&pair.good);
    let bad_v = pencil_check(&pair.bad);
    if !good_v.in_class() || bad_v.in_class() {
        return Err(DemoError::Membership { good: good_v, bad: bad_v });
    }
    let pool: Vec<Formula> = FormulaEnumerator::new(&DEMO_ATOMS, depth, DEMO_FORMULA_SIZE).collect_all();
    let results: Vec<Result<usize, DemoError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let val = random_valuation(pair.bad.n(), &DEMO_ATOMS, &mut rng);
            let left = Model::new(pair.bad.clone(), val.clone());
            let right = Model::new(pair.good.clone(), transfer_valuation(&val, m));
            let z = Bisimulation::new(left.clone(), right.clone(), pair.z_template.iter().copied());
            if let BisimVerdict::Failure(failure) = check_bisim(&z) {
                return Err(DemoError::NotBisimilar { trial, failure });
            }
            let mut le = Evaluator::for_model(&left);
            let mut re = Evaluator::for_model(&right);
            let mut checks = 0;
            for f in &pool {
                let (a, b) = (le.eval(f), re.eval(f));
                for &(l, r) in &pair.z_template {
                    if a.contains(l) != b.contains(r) {
                        return Err(DemoError::Separated {
                            trial,
                            formula: f.clone(),
                            left: l,
                            right: r,
                        });
                    }
                    checks += 1;
                }
            }
            Ok(checks)
        })
        .collect();
    let mut agreement_checks = 0;
    for r in results {
        agreement_checks += r?;
    }
    Ok(DemoReport {
        fan: m,
        trials,
        depth,
        pool_size: pool.len(),
        good_worlds: pair.good.n(),
        bad_worlds: pair.bad.n(),
        good_in_class: true,
        bad_witness: pair.bad_witness,
        via_search: pair.via_search,
        bisimilar_trials: trials,
        agreement_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{all_frames, chain, random_frame};
    use crate::semantics::{equiv_up_to, max_bisim, EquivVerdict, PointedModel};

    /// Second implementation with the quantifiers in a different order.
    fn naive_in_class(fr: &Frame) -> bool {
        let n = fr.n();
        let r = |a, b| fr.r().contains(a, b);
        for v in 0..n {
            for u in 0..n {
                for x in 0..n {
                    if !fr.s(x).contains(v, u) {
                        continue;
                    }
                    for y in 0..n {
                        for z in 0..n {
                            if r(x, y) && fr.s(x).contains(y, z) && r(z, u) && r(y, v) && !r(y, u) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn examples() {
        assert!(pencil_check(&chain(3)).in_class());
        assert!(pencil_check(&chain(1)).in_class());
        let pair = build_demo_pair(2).unwrap();
        assert!(!pair.via_search);
        assert_eq!(
            pencil_check(&pair.bad),
            PencilVerdict::Witness(PencilWitness { x: X, y: Y, z: Z, u: fan(0), v: U })
        );
        assert!(pencil_check(&pair.good).in_class());
    }

    #[test]
    fn agrees_with_naive_on_small_frames() {
        for n in 1..=4 {
            for fr in all_frames(n) {
                assert_eq!(pencil_check(&fr).in_class(), naive_in_class(&fr));
            }
        }
    }

    #[test]
    fn witnesses_satisfy_antecedent() {
        for seed in 0..200 {
            let fr = random_frame(6, seed);
            for verdict in [pencil_check(&fr), pencil_check_distinct(&fr)] {
                if let PencilVerdict::Witness(PencilWitness { x, y, z, u, v }) = verdict {
                    let r = fr.r();
                    assert!(r.contains(x, y) && fr.s(x).contains(y, z) && r.contains(z, u));
                    assert!(r.contains(y, v) && fr.s(x).contains(v, u) && !r.contains(y, u));
                }
            }
            if pencil_check(&fr).in_class() {
                assert!(pencil_check_distinct(&fr).in_class());
            }
        }
    }

    #[test]
    fn transfer_examples() {
        let empty = transfer_valuation(&Valuation::new(6).with("p", &[]), 2);
        assert!(empty.eval("p").is_empty());
        let t = transfer_valuation(&Valuation::new(6).with("p", &[U]), 2);
        assert_eq!(t.eval("p").to_vec(), vec![U]);
        let t = transfer_valuation(&Valuation::new(6).with("p", &[fan(0), fan(1)]), 2);
        assert_eq!(t.eval("p").to_vec(), vec![fan(0), fan(1), fan(2)]);
    }

    #[test]
    fn template_inside_max_bisimulation() {
        let pair = build_demo_pair(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let val = random_valuation(pair.bad.n(), &["p", "q"], &mut rng);
            let l = Model::new(pair.bad.clone(), val.clone());
            let r = Model::new(pair.good.clone(), transfer_valuation(&val, 3));
            let max = max_bisim(&l, &r);
            for &(a, b) in &pair.z_template {
                assert!(max.contains(a, b));
            }
            let v = equiv_up_to(&PointedModel::new(l, X), &PointedModel::new(r, X), 2, &["p", "q"]).unwrap();
            assert!(matches!(v, EquivVerdict::Agree { .. }));
        }
    }

    #[test]
    fn search_fallback_finds_pair() {
        let pair = search_demo_pair(2, u64::MAX).unwrap();
        assert!(pair.via_search);
        assert!(pencil_check(&pair.good).in_class());
    }

    #[test]
    fn demo_runs() {
        let rep = nondefinability_demo(2, 20, 2, 7).unwrap();
        assert_eq!(rep.bisimilar_trials, 20);
        assert_eq!(rep.bad_witness, PencilWitness { x: X, y: Y, z: Z, u: fan(0), v: U });
        let rep = nondefinability_demo(1, 1, 0, 0).unwrap();
        assert!(rep.pool_size > 0);
        assert!(matches!(build_demo_pair(0), Err(DemoError::EmptyFan)));
    }

    #[test]
    fn dropping_antecedent_edges_keeps_membership() {
        // removing a non-reflexive S pair can only falsify the antecedent
        for seed in 0..150 {
            let fr = random_frame(5, seed);
            if !pencil_check(&fr).in_class() {
                continue;
            }
            for x in fr.worlds() {
                for (a, b) in fr.s(x).pairs().filter(|(a, b)| a != b && !fr.r().contains(*a, *b)) {
                    let seeds: Vec<_> = fr
                        .worlds()
                        .flat_map(|w| fr.s(w).pairs().map(move |(i, j)| (w, i, j)))
                        .filter(|&t| t != (x, a, b))
                        .collect();
                    let r: Vec<_> = fr.r().pairs().collect();
                    let smaller = complete(fr.n(), &r, &seeds).unwrap();
                    if smaller.s(x).contains(a, b) {
                        continue; // forced back by closure
                    }
                    assert!(pencil_check(&smaller).in_class(), "seed {seed}");
                }
            }
        }
    }
}
