//! Forcing, validity and Veltman bisimulation.

mod bisim;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{Formula, FormulaEnumerator};
use crate::frame::{Frame, Model, Valuation, World, WorldSet};

pub use bisim::{check_bisim, max_bisim, BisimFailure, BisimVerdict, Bisimulation, Clause};

/// `⟦□A⟧`: worlds all of whose successors lie in `a`.
pub fn box_set(fr: &Frame, a: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(fr.n(), fr.worlds().filter(|&w| fr.successors(w).is_subset(a)))
}

/// `⟦A ▷ B⟧`: worlds `w` where each successor in `a` has an `S_w`-successor in `b`.
pub fn rhd_set(fr: &Frame, a: &WorldSet, b: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        fr.n(),
        fr.worlds().filter(|&w| {
            let sw = fr.s(w);
            fr.successors(w)
                .intersection(a)
                .iter()
                .all(|u| sw.row(u).intersects(b))
        }),
    )
}

/// `⟦f⟧` in the model.
pub fn extension(m: &Model, f: &Formula) -> WorldSet {
    extension_in(&m.frame, &m.valuation, f)
}

pub fn extension_in(fr: &Frame, val: &Valuation, f: &Formula) -> WorldSet {
    match f {
        Formula::Atom(name) => val.eval(name),
        Formula::Bottom => fr.empty_set(),
        Formula::Implies(a, b) => extension_in(fr, val, a)
            .complement()
            .union(&extension_in(fr, val, b)),
        Formula::Box(a) => box_set(fr, &extension_in(fr, val, a)),
        Formula::Rhd(a, b) => rhd_set(fr, &extension_in(fr, val, a), &extension_in(fr, val, b)),
    }
}

/// `M, w ⊩ f`
pub fn forces(m: &Model, w: World, f: &Formula) -> bool {
    extension(m, f).contains(w)
}

pub fn model_valid(m: &Model, f: &Formula) -> bool {
    extension(m, f).is_full()
}

/// Memoizing evaluator for sweeps over many formulas sharing subterms.
pub struct Evaluator<'a> {
    frame: &'a Frame,
    valuation: &'a Valuation,
    cache: HashMap<Formula, WorldSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(frame: &'a Frame, valuation: &'a Valuation) -> Self {
        Evaluator {
            frame,
            valuation,
            cache: HashMap::new(),
        }
    }

    pub fn for_model(m: &'a Model) -> Self {
        Evaluator::new(&m.frame, &m.valuation)
    }

    pub fn eval(&mut self, f: &Formula) -> WorldSet {
        if let Some(hit) = self.cache.get(f) {
            return hit.clone();
        }
        let fr = self.frame;
        let out = match f {
            Formula::Atom(name) => self.valuation.eval(name),
            Formula::Bottom => fr.empty_set(),
            Formula::Implies(a, b) => {
                let a = self.eval(a);
                a.complement().union(&self.eval(b))
            }
            Formula::Box(a) => box_set(fr, &self.eval(a)),
            Formula::Rhd(a, b) => {
                let a = self.eval(a);
                rhd_set(fr, &a, &self.eval(b))
            }
        };
        self.cache.insert(f.clone(), out.clone());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FrameVerdict {
    Valid,
    Counter { valuation: Valuation, world: World },
}

impl FrameVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, FrameVerdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{atoms} atoms over {worlds} worlds need 2^{} valuations; bound is 2^{bound}", .atoms * .worlds)]
pub struct ResourceError {
    pub atoms: usize,
    pub worlds: usize,
    pub bound: usize,
}

pub const DEFAULT_VALUATION_BITS: usize = 20;

/// The valuation of `atoms` numbered `index`: atom `i` holds at world `j`
/// iff bit `i·n + j` of `index` is set.
pub fn valuation_at(n: usize, atoms: &[String], index: u64) -> Valuation {
    let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut val = Valuation::new(n);
    for (i, a) in atoms.iter().enumerate() {
        val.set(a, WorldSet::from_bits(n, (index >> (i * n)) & mask));
    }
    val
}

/// Validity over every valuation of the formula's atoms, with the default
/// bound of 20 valuation bits.
pub fn frame_valid(fr: &Frame, f: &Formula) -> Result<FrameVerdict, ResourceError> {
    frame_valid_bounded(fr, f, DEFAULT_VALUATION_BITS)
}

/// Returns the counterexample of least valuation index (then least world),
/// independent of how the search is split across threads.
pub fn frame_valid_bounded(fr: &Frame, f: &Formula, bound: usize) -> Result<FrameVerdict, ResourceError> {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let bits = atoms.len() * fr.n();
    if bits > bound || bits >= 64 {
        return Err(ResourceError {
            atoms: atoms.len(),
            worlds: fr.n(),
            bound,
        });
    }
    let total = 1u64 << bits;
    let fails = |idx: u64| !extension_in(fr, &valuation_at(fr.n(), &atoms, idx), f).is_full();
    let first = if total >= 1024 {
        (0..total).into_par_iter().find_first(|&i| fails(i))
    } else {
        (0..total).find(|&i| fails(i))
    };
    Ok(match first {
        None => FrameVerdict::Valid,
        Some(idx) => {
            let valuation = valuation_at(fr.n(), &atoms, idx);
            let ext = extension_in(fr, &valuation, f);
            let world = ext.complement().first().expect("counterexample has a failing world");
            FrameVerdict::Counter { valuation, world }
        }
    })
}

/// A model with a designated world.
#[derive(Debug, Clone)]
pub struct PointedModel {
    pub model: Model,
    pub world: World,
}

impl PointedModel {
    pub fn new(model: Model, world: World) -> Self {
        assert!(world < model.frame.n(), "world out of range");
        PointedModel { model, world }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.model.frame
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum EquivVerdict {
    Agree { checked: usize },
    Disagree { witness: Formula },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula pool of {count} exceeds the bound of {limit}")]
pub struct EnumerationBound {
    pub count: u128,
    pub limit: u128,
}

#[derive(Debug, Clone, Copy)]
pub struct EquivBounds {
    /// Size bound passed to the formula enumerator.
    pub size: usize,
    /// Largest pool that will be evaluated.
    pub max_formulas: u128,
}

impl Default for EquivBounds {
    fn default() -> Self {
        EquivBounds {
            size: 3,
            max_formulas: 2_000_000,
        }
    }
}

/// Agreement of two pointed models on every enumerated formula of modal
/// depth ≤ `depth` over `pool`, with default size bounds.
pub fn equiv_up_to<S: AsRef<str>>(
    left: &PointedModel,
    right: &PointedModel,
    depth: usize,
    pool: &[S],
) -> Result<EquivVerdict, EnumerationBound> {
    equiv_up_to_bounded(left, right, depth, pool, EquivBounds::default())
}

pub fn equiv_up_to_bounded<S: AsRef<str>>(
    left: &PointedModel,
    right: &PointedModel,
    depth: usize,
    pool: &[S],
    bounds: EquivBounds,
) -> Result<EquivVerdict, EnumerationBound> {
    let gen = FormulaEnumerator::new(pool, depth, bounds.size);
    let count = gen.count();
    if count > bounds.max_formulas {
        return Err(EnumerationBound {
            count,
            limit: bounds.max_formulas,
        });
    }
    let mut le = Evaluator::for_model(&left.model);
    let mut re = Evaluator::for_model(&right.model);
    let mut checked = 0;
    for f in gen.iter() {
        if le.eval(&f).contains(left.world) != re.eval(&f).contains(right.world) {
            return Ok(EquivVerdict::Disagree { witness: f });
        }
        checked += 1;
    }
    Ok(EquivVerdict::Agree { checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::frame::{all_frames, chain, random_frame, random_valuation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(fr: Frame, val: Valuation) -> Model {
        Model::new(Arc::new(fr), val)
    }

    /// Independent oracle: per-world recursive forcing straight from the clauses.
    fn naive_forces(fr: &Frame, val: &Valuation, w: World, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => val.eval(a).contains(w),
            Formula::Bottom => false,
            Formula::Implies(a, b) => !naive_forces(fr, val, w, a) || naive_forces(fr, val, w, b),
            Formula::Box(a) => (0..fr.n())
                .filter(|&v| fr.r().contains(w, v))
                .all(|v| naive_forces(fr, val, v, a)),
            Formula::Rhd(a, b) => (0..fr.n()).all(|u| {
                !(fr.r().contains(w, u) && naive_forces(fr, val, u, a))
                    || (0..fr.n()).any(|v| fr.s(w).contains(u, v) && naive_forces(fr, val, v, b))
            }),
        }
    }

    #[test]
    fn diamond_on_chain() {
        let m = model(chain(2), Valuation::new(2).with("p", &[1]));
        assert_eq!(extension(&m, &parse("<>p").unwrap()).to_vec(), vec![0]);
        assert!(model_valid(&m, &parse("<>p -> ~[]F").unwrap()));
        assert!(!model_valid(&m, &parse("p").unwrap()));
        assert!(model_valid(&m, &parse("T").unwrap()));
    }

    #[test]
    fn bottom_and_box_bottom() {
        let m = model(chain(3), Valuation::new(3));
        assert!(extension(&m, &Formula::Bottom).is_empty());
        assert_eq!(extension(&m, &parse("[]F").unwrap()).to_vec(), vec![2]);
    }

    #[test]
    fn rhd_on_chain3() {
        let m = model(chain(3), Valuation::new(3).with("p", &[1]).with("q", &[2]));
        assert_eq!(extension(&m, &parse("p |> q").unwrap()).to_vec(), vec![0, 1, 2]);
        assert_eq!(extension(&m, &parse("q |> p").unwrap()).to_vec(), vec![2]);
    }

    #[test]
    fn agrees_with_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pool = crate::formula::enumerate_formulas(&["p", "q"], 3, 3);
        for case in 0..200 {
            let n = rng.gen_range(1..=5);
            let fr = random_frame(n, case);
            let val = random_valuation(n, &["p", "q"], &mut rng);
            let f = &pool[rng.gen_range(0..pool.len())];
            let ext = extension_in(&fr, &val, f);
            let mut ev = Evaluator::new(&fr, &val);
            assert_eq!(ev.eval(f), ext);
            for w in 0..n {
                assert_eq!(ext.contains(w), naive_forces(&fr, &val, w, f), "{f} at {w}");
            }
        }
    }

    #[test]
    fn frame_validity_examples() {
        let gl = parse("[]([]a -> a) -> []a").unwrap();
        let j5 = parse("<>a |> a").unwrap();
        for fr in all_frames(3) {
            assert!(frame_valid(&fr, &gl).unwrap().is_valid());
            assert!(frame_valid(&fr, &j5).unwrap().is_valid());
        }
        let v = frame_valid(&chain(2), &parse("a -> []a").unwrap()).unwrap();
        assert_eq!(
            v,
            FrameVerdict::Counter {
                valuation: Valuation::new(2).with("a", &[0]),
                world: 0
            }
        );
    }

    #[test]
    fn first_counter_independent_of_parallel_split() {
        let f = parse("a & b -> []c").unwrap();
        let fr = random_frame(5, 3);
        let got = frame_valid(&fr, &f).unwrap();
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let seq = (0..1u64 << 15)
            .find(|&i| !extension_in(&fr, &valuation_at(5, &atoms, i), &f).is_full())
            .unwrap();
        match got {
            FrameVerdict::Counter { valuation, .. } => assert_eq!(valuation, valuation_at(5, &atoms, seq)),
            FrameVerdict::Valid => panic!("expected counterexample"),
        }
    }

    #[test]
    fn resource_guard() {
        let f = parse("a & b & c -> d").unwrap();
        let err = frame_valid(&chain(6), &f).unwrap_err();
        assert_eq!(err.bound, 20);
        assert!(frame_valid_bounded(&chain(6), &f, 24).is_ok());
    }

    #[test]
    fn valuation_only_over_formula_atoms() {
        // atoms absent from a formula never change its extension
        let fr = random_frame(4, 9);
        let f = parse("p |> []p").unwrap();
        let base = Valuation::new(4).with("p", &[1, 3]);
        let extra = base.clone().with("q", &[0, 1, 2]);
        assert_eq!(extension_in(&fr, &base, &f), extension_in(&fr, &extra, &f));
    }

    #[test]
    fn equivalence_examples() {
        let m = model(chain(2), Valuation::new(2).with("p", &[1]));
        let a = PointedModel::new(m.clone(), 0);
        let b = PointedModel::new(m, 1);
        assert!(matches!(equiv_up_to(&a, &a, 2, &["p"]).unwrap(), EquivVerdict::Agree { .. }));
        assert_eq!(
            equiv_up_to(&a, &b, 2, &["p"]).unwrap(),
            EquivVerdict::Disagree { witness: Formula::atom("p") }
        );
        let tight = EquivBounds { size: 6, max_formulas: 10 };
        assert!(equiv_up_to_bounded(&a, &b, 2, &["p"], tight).is_err());
    }
}
