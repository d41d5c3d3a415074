//! Exhaustive and sampled sweeps over small frames, each producing a
//! [`CheckReport`]. The CLI `corpus` command and the acceptance suite both
//! run these.

use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{eval_term, r_inv, r_inv_dual, s_inv, translate, SetTerm, SetValuation};
use crate::calculus::Schema;
use crate::extension::{
    build_ue, build_ue_model, check_classical, check_label_saturation, check_saturation, classical_ue,
    find_assured_successor, truth_theorem_on, witness_from_negated, LabelSaturationVerdict, SaturationVerdict,
    TruthVerdict, UeError, UeOptions,
};
use crate::filters::{
    all_proper_filters, all_ultrafilters, assuring, assuring_family, b_set, generate_filter, has_fip, Filter,
    Generated, LabelFamily, Ultrafilter,
};
use crate::formula::{parse, Formula, FormulaEnumerator};
use crate::frame::{all_frames, chain, read_frame_file, Frame, FrameIoError, Model, Valuation, WorldSet};
use crate::pencil::nondefinability_demo;
use crate::semantics::{extension_in, valuation_at, Evaluator};

/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub title: &'static str,
    pub instances: u64,
    pub violations: u64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.first_failure.is_none()
    }

    fn from_tally(id: &'static str, title: &'static str, t: Tally) -> Self {
        CheckReport {
            id,
            title,
            instances: t.instances,
            violations: t.violations,
            first_failure: t.first,
        }
    }
}

/// Order-preserving counter: the first failure is the one met first in
/// sweep order, whatever the scheduling.
#[derive(Debug, Default, Clone)]
struct Tally {
    instances: u64,
    violations: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        self.first.get_or_insert(msg);
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.violations += other.violations;
        if self.first.is_none() {
            self.first = other.first;
        }
        self
    }

    fn sum(parts: Vec<Tally>) -> Tally {
        parts.into_iter().fold(Tally::default(), Tally::merge)
    }
}

/// A named model from the frame corpus.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub frame: Arc<Frame>,
    pub valuation: Valuation,
}

impl CorpusEntry {
    pub fn model(&self) -> Model {
        Model::new(self.frame.clone(), self.valuation.clone())
    }
}

/// Every `*.vf` file of a directory, sorted by file name.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<CorpusEntry>, FrameIoError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|source| FrameIoError::Read {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "vf"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let loaded = read_frame_file(&p)?;
            Ok(CorpusEntry {
                name: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                frame: loaded.frame,
                valuation: loaded.valuation,
            })
        })
        .collect()
}

pub const SWEEP_ATOMS: [&str; 2] = ["p", "q"];

/// Size bound for the depth-bounded formula pools of the sweeps.
pub const SWEEP_FORMULA_SIZE: usize = 3;

/// Sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Exhaustive frame enumeration goes up to this many worlds.
    pub max_worlds: usize,
    /// Frames for the classical baseline isomorphism check.
    pub classical_max_worlds: usize,
    pub pool_depth: usize,
    pub pool_size: usize,
    pub seed: u64,
    pub pencil_fan: usize,
    pub pencil_trials: usize,
    /// Shipped corpus models, checked alongside the enumeration.
    pub files: Vec<CorpusEntry>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_worlds: 3,
            classical_max_worlds: 4,
            pool_depth: 2,
            pool_size: SWEEP_FORMULA_SIZE,
            seed: 0,
            pencil_fan: 3,
            pencil_trials: 100,
            files: Vec::new(),
        }
    }
}

/// All frames with `1..=max` worlds.
pub fn small_frames(max: usize) -> Vec<Arc<Frame>> {
    (1..=max).flat_map(all_frames).map(Arc::new).collect()
}

/// Every frame up to `max` worlds under every valuation of [`SWEEP_ATOMS`].
pub fn small_models(max: usize) -> Vec<Model> {
    let atoms: Vec<String> = SWEEP_ATOMS.iter().map(|s| s.to_string()).collect();
    small_frames(max)
        .into_iter()
        .flat_map(|fr| {
            let total = 1u64 << (atoms.len() * fr.n());
            let atoms = atoms.clone();
            (0..total).map(move |i| Model::new(fr.clone(), valuation_at(fr.n(), &atoms, i)))
        })
        .collect()
}

fn sweep_pool(cfg: &SweepConfig) -> Vec<Formula> {
    FormulaEnumerator::new(&SWEEP_ATOMS, cfg.pool_depth, cfg.pool_size).collect_all()
}

fn files_up_to(cfg: &SweepConfig, n: usize) -> impl Iterator<Item = &CorpusEntry> {
    cfg.files.iter().filter(move |e| e.frame.n() <= n)
}

/// Frame laws hold for every enumerated and every shipped frame.
pub fn frame_laws(cfg: &SweepConfig) -> CheckReport {
    let mut t = Tally::default();
    for fr in small_frames(cfg.max_worlds) {
        let v = fr.validate();
        t.check(v.is_ok(), || format!("enumerated frame on {} worlds: {:?}", fr.n(), v.violations));
    }
    for e in &cfg.files {
        let v = e.frame.validate();
        t.check(v.is_ok(), || format!("{}: {:?}", e.name, v.violations));
    }
    CheckReport::from_tally("frame-laws", "frame laws on enumerated and shipped frames", t)
}

/// Every instance of every axiom schema with metavariables drawn from the
/// depth ≤ 1, size ≤ 1 formulas over two atoms is frame valid. An instance
/// is evaluated through its metavariables' extensions, so each frame and
/// valuation costs one schema evaluation per distinct tuple of extensions.
pub fn axiom_soundness(cfg: &SweepConfig) -> CheckReport {
    let pool = FormulaEnumerator::new(&SWEEP_ATOMS, 1, 1).collect_all();
    let atoms: Vec<String> = SWEEP_ATOMS.iter().map(|s| s.to_string()).collect();
    let parts: Vec<Tally> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let mut t = Tally::default();
            let n = fr.n();
            for schema in Schema::ALL {
                t.instances += (pool.len() as u64).pow(schema.metavariables().len() as u32);
            }
            for idx in 0..1u64 << (atoms.len() * n) {
                let val = valuation_at(n, &atoms, idx);
                // distinct extensions, each with a formula realizing it
                let mut reps: Vec<(WorldSet, &Formula)> = Vec::new();
                for f in &pool {
                    let ext = extension_in(fr, &val, f);
                    if !reps.iter().any(|(s, _)| *s == ext) {
                        reps.push((ext, f));
                    }
                }
                for schema in Schema::ALL {
                    let metas = schema.metavariables();
                    let k = metas.len();
                    let mut choice = vec![0usize; k];
                    'tuples: loop {
                        let mut e = Valuation::new(n);
                        for (m, &c) in metas.iter().zip(&choice) {
                            e.set(m, reps[c].0.clone());
                        }
                        if !extension_in(fr, &e, schema.formula()).is_full() {
                            let inst = schema.formula().substitute(&|a| {
                                metas.iter().position(|m| *m == a).map(|i| reps[choice[i]].1.clone())
                            });
                            t.violations += 1;
                            t.first.get_or_insert_with(|| format!("{schema} instance {inst:#} fails on a {n}-world frame"));
                        }
                        for c in choice.iter_mut() {
                            *c += 1;
                            if *c < reps.len() {
                                continue 'tuples;
                            }
                            *c = 0;
                        }
                        break;
                    }
                }
            }
            t
        })
        .collect();
    CheckReport::from_tally(
        "axiom-soundness",
        "axiom schemas K, GL, J1-J5 frame valid (metavariables over depth <= 1 formulas)",
        Tally::sum(parts),
    )
}

fn set_valuations(n: usize, vars: &[String]) -> impl Iterator<Item = SetValuation> + '_ {
    let per = 1u64 << n;
    (0..per.pow(vars.len() as u32)).map(move |mut code| {
        let mut e = SetValuation::new(n);
        for v in vars {
            e.bind(v, WorldSet::from_bits(n, code % per));
            code /= per;
        }
        e
    })
}

/// The translation of every axiom schema is `W` under every assignment of
/// its set variables, and necessitation preserves `W`.
pub fn translated_axioms(cfg: &SweepConfig) -> CheckReport {
    let parts: Vec<Tally> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let mut t = Tally::default();
            for schema in Schema::ALL {
                let term = translate(schema.formula());
                let vars: Vec<String> = term.vars();
                for e in set_valuations(fr.n(), &vars) {
                    let v = eval_term(fr, &e, &term).expect("all variables bound");
                    t.check(v.is_full(), || format!("translated {schema} is {v} on a {}-world frame", fr.n()));
                }
            }
            let nec = eval_term(fr, &SetValuation::new(fr.n()), &SetTerm::box_op(SetTerm::Full)).unwrap();
            t.check(nec.is_full(), || "box of W is not W".to_string());
            t
        })
        .collect();
    CheckReport::from_tally(
        "translated-axioms",
        "translated axioms evaluate to W; necessitation preserves W",
        Tally::sum(parts),
    )
}

/// `S⁻¹(X,Y) ⊆ S⁻¹(X,Y∪Z)`, `R̂⁻¹A ⊆ R̂⁻¹R̂⁻¹A`, `S⁻¹(A,B) ∩ S⁻¹(B,C) ⊆ S⁻¹(A,C)`.
pub fn s_inv_inclusions(cfg: &SweepConfig) -> CheckReport {
    let parts: Vec<Tally> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let mut t = Tally::default();
            let subsets: Vec<WorldSet> = WorldSet::all_subsets(fr.n()).collect();
            for a in &subsets {
                let ba = r_inv_dual(fr, a);
                t.check(ba.is_subset(&r_inv_dual(fr, &ba)), || format!("box transitivity fails at {a}"));
                for b in &subsets {
                    let ab = s_inv(fr, a, b);
                    for c in &subsets {
                        t.check(ab.is_subset(&s_inv(fr, a, &b.union(c))), || {
                            format!("S⁻¹ not monotone at {a}, {b}, {c}")
                        });
                        t.check(ab.intersection(&s_inv(fr, b, c)).is_subset(&s_inv(fr, a, c)), || {
                            format!("S⁻¹ not transitive at {a}, {b}, {c}")
                        });
                    }
                }
            }
            t
        })
        .collect();
    CheckReport::from_tally("s-inv-inclusions", "inclusions for S⁻¹ and R̂⁻¹ over all A, B, C", Tally::sum(parts))
}

/// `⟦φ^t⟧ = ⟦φ⟧` for every pool formula on every small model.
pub fn translation_agreement(cfg: &SweepConfig) -> CheckReport {
    let pool = sweep_pool(cfg);
    let terms: Vec<SetTerm> = pool.iter().map(translate).collect();
    let models: Vec<Model> = small_models(cfg.max_worlds)
        .into_iter()
        .chain(files_up_to(cfg, cfg.max_worlds).map(CorpusEntry::model))
        .collect();
    let parts: Vec<Tally> = models
        .par_iter()
        .map(|m| {
            let mut t = Tally::default();
            let mut e = SetValuation::from_valuation(&m.valuation);
            for a in SWEEP_ATOMS {
                if e.get(a).is_none() {
                    e.bind(a, m.frame.empty_set());
                }
            }
            let mut ev = Evaluator::for_model(m);
            for (f, term) in pool.iter().zip(&terms) {
                let lhs = eval_term(&m.frame, &e, term).expect("atoms bound");
                let rhs = ev.eval(f);
                t.check(lhs == rhs, || format!("{f:#}: translation gives {lhs}, forcing gives {rhs}"));
            }
            t
        })
        .collect();
    CheckReport::from_tally(
        "translation-agreement",
        "translation agrees with forcing (depth <= 2 over two atoms)",
        Tally::sum(parts),
    )
}

/// The definition verbatim: every finite choice of members of `l` and every `A`.
pub fn assuring_naive(fr: &Frame, f: Ultrafilter, l: &Filter, g: Ultrafilter) -> bool {
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

/// `B_f` with an existential over every finite choice of members of `l`.
fn b_set_naive(fr: &Frame, f: Ultrafilter, l: &Filter) -> Vec<WorldSet> {
    let members = l.members();
    WorldSet::all_subsets(fr.n())
        .filter(|a| {
            (0u64..1 << members.len()).any(|mask| {
                let mut bad = fr.empty_set();
                for (k, m) in members.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        bad.union_with(&m.complement());
                    }
                }
                f.contains(&s_inv(fr, &a.complement(), &bad))
            })
        })
        .collect()
}

/// `∀X: X ∈ h ⇒ R⁻¹X ∈ g`
fn r_predecessor(fr: &Frame, g: Ultrafilter, h: Ultrafilter) -> bool {
    WorldSet::all_subsets(fr.n()).all(|x| !h.contains(&x) || g.contains(&r_inv(fr, &x)))
}

/// Per-frame tables shared by the labelling checks.
struct LabelTables<'a> {
    fr: &'a Frame,
    ufs: Vec<Ultrafilter>,
    labels: Vec<Filter>,
    /// `assure[f][l][g]`
    assure: Vec<Vec<Vec<bool>>>,
}

impl<'a> LabelTables<'a> {
    fn new(fr: &'a Frame) -> Self {
        let ufs = all_ultrafilters(fr);
        let labels = all_proper_filters(fr.n());
        let assure = ufs
            .iter()
            .map(|&f| labels.iter().map(|l| ufs.iter().map(|&g| assuring(fr, f, l, g)).collect()).collect())
            .collect();
        LabelTables { fr, ufs, labels, assure }
    }
}

fn label_sweep(cfg: &SweepConfig, body: impl Fn(&LabelTables, &mut Tally) + Sync) -> Tally {
    let parts: Vec<Tally> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let tables = LabelTables::new(fr);
            let mut t = Tally::default();
            body(&tables, &mut t);
            t
        })
        .collect();
    Tally::sum(parts)
}

/// The min-set reduction agrees with the naive oracle, for `≺_l` and `B_f`.
pub fn min_set_reduction(cfg: &SweepConfig) -> CheckReport {
    let t = label_sweep(cfg, |tb, t| {
        for (fi, &f) in tb.ufs.iter().enumerate() {
            for (li, l) in tb.labels.iter().enumerate() {
                for (gi, &g) in tb.ufs.iter().enumerate() {
                    let naive = assuring_naive(tb.fr, f, l, g);
                    t.check(tb.assure[fi][li][gi] == naive, || format!("{f} ≺_{l} {g}: reduction disagrees with oracle"));
                }
                t.check(b_set(tb.fr, f, l) == b_set_naive(tb.fr, f, l), || format!("B set for {f}, {l} differs from oracle"));
            }
        }
    });
    CheckReport::from_tally("min-set-reduction", "min-set reduction agrees with the finite-subset oracle", t)
}

/// `f ≺_l g ⇒ R⁻¹g ⊆ f`
pub fn assuring_predecessor(cfg: &SweepConfig) -> CheckReport {
    let t = label_sweep(cfg, |tb, t| {
        for (fi, &f) in tb.ufs.iter().enumerate() {
            for (li, l) in tb.labels.iter().enumerate() {
                for (gi, &g) in tb.ufs.iter().enumerate() {
                    if tb.assure[fi][li][gi] {
                        t.check(r_predecessor(tb.fr, f, g), || format!("{f} ≺_{l} {g} but R⁻¹{g} ⊄ {f}"));
                    }
                }
            }
        }
    });
    CheckReport::from_tally("assuring-predecessor", "assured successors are R-successors", t)
}

/// `f ≺_l g ⇒ l ⊆ g`, `R̂⁻¹(l) ⊆ g` and `R⁻¹(l) ⊆ f`.
pub fn assuring_label_members(cfg: &SweepConfig) -> CheckReport {
    let t = label_sweep(cfg, |tb, t| {
        for (fi, &f) in tb.ufs.iter().enumerate() {
            for (li, l) in tb.labels.iter().enumerate() {
                for (gi, &g) in tb.ufs.iter().enumerate() {
                    if !tb.assure[fi][li][gi] {
                        continue;
                    }
                    t.check(g.contains(l.min_set()), || format!("{f} ≺_{l} {g} but min(l) ∉ {g}"));
                    for s in l.members() {
                        t.check(g.contains(&s) && g.contains(&r_inv_dual(tb.fr, &s)), || {
                            format!("{f} ≺_{l} {g} but {s} or its box preimage ∉ {g}")
                        });
                    }
                }
            }
        }
    });
    CheckReport::from_tally("assuring-label-in-successor", "label members and their box preimages lie in the successor", t)
}

/// `f ≺_l g ⇒ R⁻¹(l) ⊆ f`
pub fn assuring_label_predecessor(cfg: &SweepConfig) -> CheckReport {
    let t = label_sweep(cfg, |tb, t| {
        for (fi, &f) in tb.ufs.iter().enumerate() {
            for (li, l) in tb.labels.iter().enumerate() {
                for (gi, &g) in tb.ufs.iter().enumerate() {
                    if tb.assure[fi][li][gi] {
                        for s in l.members() {
                            t.check(f.contains(&r_inv(tb.fr, &s)), || format!("{f} ≺_{l} {g} but R⁻¹{s} ∉ {f}"));
                        }
                    }
                }
            }
        }
    });
    CheckReport::from_tally("assuring-label-in-origin", "diamond preimages of label members lie in the origin", t)
}

/// `f ≺_l g ∧ g ≺_m h ⇒ f ≺_l h`
pub fn assuring_transitive(cfg: &SweepConfig) -> CheckReport {
    let t = label_sweep(cfg, |tb, t| {
        let k = tb.ufs.len();
        for fi in 0..k {
            for li in 0..tb.labels.len() {
                for gi in (0..k).filter(|&gi| tb.assure[fi][li][gi]) {
                    for mi in 0..tb.labels.len() {
                        for hi in (0..k).filter(|&hi| tb.assure[gi][mi][hi]) {
                            t.check(tb.assure[fi][li][hi], || {
                                format!("{} ≺_{} {} ≺_{} {} but not {0} ≺_{1} {4}", tb.ufs[fi], tb.labels[li], tb.ufs[gi], tb.labels[mi], tb.ufs[hi])
                            });
                        }
                    }
                }
            }
        }
    });
    CheckReport::from_tally("assuring-transitive", "assuring is transitive in the first label", t)
}

/// `B_f` is closed under `R̂⁻¹` and under intersections.
pub fn b_set_closure(cfg: &SweepConfig) -> (CheckReport, CheckReport) {
    let parts: Vec<(Tally, Tally)> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let (mut boxed, mut meet) = (Tally::default(), Tally::default());
            for f in all_ultrafilters(fr) {
                for l in all_proper_filters(fr.n()) {
                    let b = b_set(fr, f, &l);
                    for c in &b {
                        let bc = r_inv_dual(fr, c);
                        boxed.check(b.contains(&bc), || format!("{c} ∈ B but {bc} ∉ B for {f}, {l}"));
                        for d in &b {
                            let cd = c.intersection(d);
                            meet.check(b.contains(&cd), || format!("{c}, {d} ∈ B but not {cd} for {f}, {l}"));
                        }
                    }
                }
            }
            (boxed, meet)
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    (
        CheckReport::from_tally("b-set-box-closed", "B set closed under box preimage", Tally::sum(a)),
        CheckReport::from_tally("b-set-intersections", "B set closed under intersections", Tally::sum(b)),
    )
}

/// Tables over every raw family `a ⊆ ℘(W)`, encoded as a bitmask over the
/// subsets of `W` (so only for `n ≤ 3`).
struct FamilyTables {
    n: usize,
    /// `fam[f][g][a]`
    fam: Vec<Vec<Vec<bool>>>,
}

impl FamilyTables {
    fn new(fr: &Frame) -> Self {
        let n = fr.n();
        assert!(n <= 3, "family tables enumerate every family");
        let ufs = all_ultrafilters(fr);
        let count = 1usize << (1 << n);
        let fam = ufs
            .iter()
            .map(|&f| {
                ufs.iter()
                    .map(|&g| (0..count).map(|a| assuring_family(fr, f, &family(n, a), g)).collect())
                    .collect()
            })
            .collect();
        FamilyTables { n, fam }
    }
}

fn family(n: usize, mask: usize) -> LabelFamily {
    LabelFamily::new(
        n,
        (0..1u64 << n).filter(|&s| mask >> s & 1 == 1).map(|s| WorldSet::from_bits(n, s)).collect(),
    )
}

fn family_text(n: usize, mask: usize) -> String {
    let parts: Vec<String> = family(n, mask).members().iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Monotonicity and closure properties of `≺_a` for raw families, and the
/// step to the generated filter.
pub fn family_properties(cfg: &SweepConfig) -> Vec<CheckReport> {
    let parts: Vec<[Tally; 5]> = small_frames(cfg.max_worlds.min(3))
        .par_iter()
        .map(|fr| {
            let tb = FamilyTables::new(fr);
            let n = tb.n;
            let ufs = all_ultrafilters(fr);
            let count = 1usize << (1 << n);
            let mut out: [Tally; 5] = Default::default();
            for (fi, &f) in ufs.iter().enumerate() {
                for (gi, &g) in ufs.iter().enumerate() {
                    for b in (0..count).filter(|&b| tb.fam[fi][gi][b]) {
                        let fam_text = || family_text(n, b);
                        // sub-families of b
                        let mut a = b;
                        loop {
                            out[0].check(tb.fam[fi][gi][a], || {
                                format!("{f} ≺_b {g} for b = {} but not for a = {}", fam_text(), family_text(n, a))
                            });
                            if a == 0 {
                                break;
                            }
                            a = (a - 1) & b;
                        }
                        // shifting the successor along R
                        for (hi, &h) in ufs.iter().enumerate() {
                            if r_predecessor(fr, g, h) {
                                out[1].check(tb.fam[fi][hi][b], || {
                                    format!("{f} ≺_a {g}, R⁻¹{h} ⊆ {g}, but not {f} ≺_a {h} for a = {}", fam_text())
                                });
                            }
                        }
                        // adding a superset of a member
                        for x in (0..1usize << n).filter(|x| b >> x & 1 == 1) {
                            for y in (0..1usize << n).filter(|y| y & x == x) {
                                let grown = b | 1 << y;
                                out[2].check(tb.fam[fi][gi][grown], || {
                                    format!("{f} ≺_a {g} for a = {} but not after adding {}", fam_text(), WorldSet::from_bits(n, y as u64))
                                });
                            }
                        }
                        // adding box preimages of every member
                        let mut closed = b;
                        for s in family(n, b).members() {
                            closed |= 1 << r_inv_dual(fr, s).bits();
                        }
                        out[3].check(tb.fam[fi][gi][closed], || {
                            format!("{f} ≺_a {g} for a = {} but not for a ∪ R̂⁻¹(a)", fam_text())
                        });
                        // generated filter
                        let fam = family(n, b);
                        if has_fip(&fam) {
                            let ok = match generate_filter(&fam) {
                                Generated::Proper(l) => assuring(fr, f, &l, g),
                                Generated::Improper => false,
                            };
                            out[4].check(ok, || format!("{f} ≺_a {g} for a = {} but not for the generated filter", fam_text()));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut cols: [Vec<Tally>; 5] = Default::default();
    for p in parts {
        for (c, t) in cols.iter_mut().zip(p) {
            c.push(t);
        }
    }
    let [a, b, c, d, e] = cols;
    vec![
        CheckReport::from_tally("family-subfamily", "assuring for a family passes to sub-families", Tally::sum(a)),
        CheckReport::from_tally("family-successor-shift", "assuring for a family passes to R-successors of the successor", Tally::sum(b)),
        CheckReport::from_tally("family-upward", "adding a superset of a member keeps assuring", Tally::sum(c)),
        CheckReport::from_tally("family-box-closure", "adding box preimages of members keeps assuring", Tally::sum(d)),
        CheckReport::from_tally("generated-filter", "assuring for an FIP family passes to its generated filter", Tally::sum(e)),
    ]
}

/// The chain(2) extension has four worlds, and every extension of a small
/// or shipped frame obeys the frame laws and the world cap.
pub fn ue_structure(cfg: &SweepConfig) -> CheckReport {
    let mut t = Tally::default();
    let c2 = Arc::new(chain(2));
    match build_ue(&c2, &UeOptions::default()) {
        Ok(ue) => {
            t.check(ue.len() == 4, || format!("chain(2) extension has {} worlds, expected 4", ue.len()));
            t.check(ue.len() > c2.n(), || "extension not larger than chain(2)".to_string());
        }
        Err(e) => t.fail(format!("chain(2): {e}")),
    }
    let frames: Vec<(String, Arc<Frame>)> = small_frames(cfg.max_worlds)
        .into_iter()
        .map(|f| (format!("enumerated {}-world frame", f.n()), f))
        .chain(cfg.files.iter().map(|e| (e.name.clone(), e.frame.clone())))
        .collect();
    let parts: Vec<Tally> = frames
        .par_iter()
        .map(|(name, fr)| {
            let mut t = Tally::default();
            let opts = UeOptions::default();
            match build_ue(fr, &opts) {
                Ok(ue) => {
                    let v = ue.frame().validate();
                    t.check(v.is_ok(), || format!("{name}: extension violates {:?}", v.violations));
                    t.check(ue.len() <= opts.cap, || format!("{name}: {} worlds over the cap", ue.len()));
                    // a cap one below the size must be refused
                    let tight = UeOptions { cap: ue.len() - 1, ..UeOptions::default() };
                    t.check(matches!(build_ue(fr, &tight), Err(UeError::Cap { .. })), || {
                        format!("{name}: cap {} not enforced", ue.len() - 1)
                    });
                }
                Err(UeError::Cap { .. }) | Err(UeError::TooLarge(_)) => t.instances += 1,
                Err(e) => t.fail(format!("{name}: {e}")),
            }
            t
        })
        .collect();
    CheckReport::from_tally("ue-structure", "extension frames valid and within the cap", t.merge(Tally::sum(parts)))
}

/// Truth at every `⟨Π_x, σ⟩` matches truth at `x`, for every pool formula.
pub fn truth_theorem(cfg: &SweepConfig) -> CheckReport {
    let pool = sweep_pool(cfg);
    let models: Vec<Model> = small_models(cfg.max_worlds)
        .into_iter()
        .chain(files_up_to(cfg, cfg.max_worlds).map(CorpusEntry::model))
        .collect();
    let parts: Vec<Tally> = models
        .par_iter()
        .map(|m| {
            let mut t = Tally::default();
            match build_ue_model(m, &UeOptions::default()) {
                Ok(um) => match truth_theorem_on(m, &um, &pool) {
                    TruthVerdict::Agree { checked } => t.instances += checked as u64,
                    TruthVerdict::Mismatch { formula, base_world, ue_world, .. } => {
                        t.fail(format!("{formula:#} differs between {base_world} and {ue_world}"))
                    }
                },
                Err(e) => t.fail(e.to_string()),
            }
            t
        })
        .collect();
    CheckReport::from_tally("truth-theorem", "truth preserved into the extension (depth <= 2 over two atoms)", Tally::sum(parts))
}

/// Pools of four formulas for the saturation check.
pub fn saturation_pools() -> Vec<Vec<Formula>> {
    [
        ["p", "q", "~p", "~q"],
        ["p", "~p", "[]q", "<>q"],
        ["p |> q", "q", "~(q |> p)", "<>p"],
        ["[]p", "<>q", "p & q", "p -> q"],
        ["q |> p", "p |> q", "<>(p & q)", "~[]p"],
        ["T", "F", "p", "<>T"],
        ["<>p |> p", "~q |> F", "p | q", "[]~q"],
    ]
    .iter()
    .map(|pool| pool.iter().map(|s| parse(s).expect("pool formula parses")).collect())
    .collect()
}

/// Modal saturation of extension models, and label saturation.
pub fn saturation(cfg: &SweepConfig) -> (CheckReport, CheckReport) {
    let pools = saturation_pools();
    let models: Vec<Model> = small_models(cfg.max_worlds)
        .into_iter()
        .chain(files_up_to(cfg, cfg.max_worlds).map(CorpusEntry::model))
        .collect();
    let parts: Vec<Tally> = models
        .par_iter()
        .map(|m| {
            let mut t = Tally::default();
            let um = match build_ue_model(m, &UeOptions::default()) {
                Ok(um) => um,
                Err(e) => {
                    t.fail(e.to_string());
                    return t;
                }
            };
            for pool in &pools {
                match check_saturation(&um, pool) {
                    Ok(SaturationVerdict::Ok { checked }) => t.instances += checked as u64,
                    Ok(SaturationVerdict::Failure { world, subset }) => {
                        t.fail(format!("{subset:?} locally possible but not possible at {world}"))
                    }
                    Err(e) => t.fail(e.to_string()),
                }
            }
            t
        })
        .collect();
    let labels: Vec<Tally> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let mut t = Tally::default();
            match check_label_saturation(fr) {
                LabelSaturationVerdict::Ok { instances, .. } => t.instances += instances as u64,
                LabelSaturationVerdict::Failure { f, label } => t.fail(format!("no assured successor for {f} with label up{label:?}")),
            }
            t
        })
        .collect();
    (
        CheckReport::from_tally("modal-saturation", "extension models are modally saturated (pools of 4)", Tally::sum(parts)),
        CheckReport::from_tally("label-saturation", "finite label parts with successors give full-label successors", Tally::sum(labels)),
    )
}

/// Existence of assured successors carrying a `▷`-consequent, and of
/// witnesses for a failed `S⁻¹(A, B)`.
pub fn witness_search(cfg: &SweepConfig) -> (CheckReport, CheckReport) {
    let parts: Vec<(Tally, Tally)> = small_frames(cfg.max_worlds)
        .par_iter()
        .map(|fr| {
            let (mut succ, mut neg) = (Tally::default(), Tally::default());
            let subsets: Vec<WorldSet> = WorldSet::all_subsets(fr.n()).collect();
            for f in all_ultrafilters(fr) {
                for a in &subsets {
                    for b in &subsets {
                        for l in all_proper_filters(fr.n()) {
                            match find_assured_successor(fr, f, &l, a, b) {
                                Err(_) => {}
                                Ok(Some(h)) => succ.check(assuring(fr, f, &l, h) && h.contains(b), || {
                                    format!("returned {h} does not satisfy {f} ≺_{l} h, {b} ∈ h")
                                }),
                                Ok(None) => succ.check(false, || format!("no h for {f}, l = {l}, A = {a}, B = {b}")),
                            }
                        }
                        match witness_from_negated(fr, f, a, b) {
                            Err(_) => {}
                            Ok(Some((g, l))) => neg.check(
                                g.contains(a) && l.contains(&b.complement()) && assuring(fr, f, &l, g),
                                || format!("returned ({g}, {l}) is not a witness for {f}, A = {a}, B = {b}"),
                            ),
                            Ok(None) => neg.check(false, || format!("no witness for {f}, A = {a}, B = {b}")),
                        }
                    }
                }
            }
            (succ, neg)
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    (
        CheckReport::from_tally("assured-successor-witness", "an assured successor containing B exists", Tally::sum(a)),
        CheckReport::from_tally("negated-rhd-witness", "a labelled successor witnesses a failed S⁻¹(A, B)", Tally::sum(b)),
    )
}

/// The pencil non-definability demo.
pub fn pencil(cfg: &SweepConfig) -> CheckReport {
    let mut t = Tally::default();
    match nondefinability_demo(cfg.pencil_fan, cfg.pencil_trials, 2, cfg.seed) {
        Ok(rep) => t.instances = rep.bisimilar_trials as u64 + rep.agreement_checks as u64,
        Err(e) => t.fail(e.to_string()),
    }
    CheckReport::from_tally("pencil-demo", "pencil condition separates two bisimilar frames", t)
}

fn sampled_valuations(n: usize, seed: u64) -> Vec<Valuation> {
    let atoms: Vec<String> = SWEEP_ATOMS.iter().map(|s| s.to_string()).collect();
    let total = 1u64 << (atoms.len() * n);
    let mut idx: Vec<u64> = (0..total).collect();
    if total > 16 {
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ n as u64));
        idx.truncate(8);
        idx.sort_unstable();
    }
    idx.into_iter().map(|i| valuation_at(n, &atoms, i)).collect()
}

/// Classical extension is isomorphic to the base frame; truth lemma and
/// reflection of validity for the `□`-fragment.
pub fn classical_baseline(cfg: &SweepConfig) -> CheckReport {
    let frames = small_frames(cfg.classical_max_worlds);
    let iso: Vec<Tally> = frames
        .par_iter()
        .map(|fr| {
            let mut t = Tally::default();
            let ue = classical_ue(&Model::bare(fr.clone()));
            let ok = ue.ultrafilters.len() == fr.n()
                && ue.ultrafilters.iter().enumerate().all(|(i, u)| u.witness == i)
                && fr.worlds().all(|a| fr.worlds().all(|b| fr.r().contains(a, b) == ue.r.contains(a, b)));
            t.check(ok, || format!("classical extension of a {}-world frame is not isomorphic", fr.n()));
            t
        })
        .collect();
    let pool: Vec<Formula> = sweep_pool(cfg).into_iter().filter(Formula::is_box_fragment).collect();
    let models: Vec<Model> = small_frames(cfg.max_worlds)
        .into_iter()
        .flat_map(|fr| {
            sampled_valuations(fr.n(), cfg.seed)
                .into_iter()
                .map(move |v| Model::new(fr.clone(), v))
        })
        .chain(cfg.files.iter().filter(|e| e.frame.n() <= 12).map(CorpusEntry::model))
        .collect();
    let truth: Vec<Tally> = models
        .par_iter()
        .map(|m| {
            let mut t = Tally::default();
            let rep = check_classical(m, &pool);
            t.check(rep.is_ok(), || rep.failure.clone().unwrap_or_default());
            t.instances += pool.len() as u64 - 1;
            t
        })
        .collect();
    CheckReport::from_tally(
        "classical-baseline",
        "classical extension: isomorphism, truth lemma, reflection",
        Tally::sum(iso).merge(Tally::sum(truth)),
    )
}

/// Every check, in scoreboard order.
pub fn scoreboard(cfg: &SweepConfig) -> Vec<CheckReport> {
    let mut out = vec![
        frame_laws(cfg),
        axiom_soundness(cfg),
        translated_axioms(cfg),
        s_inv_inclusions(cfg),
        translation_agreement(cfg),
        min_set_reduction(cfg),
        assuring_predecessor(cfg),
        assuring_label_members(cfg),
        assuring_label_predecessor(cfg),
        assuring_transitive(cfg),
    ];
    let (boxed, meet) = b_set_closure(cfg);
    out.push(boxed);
    out.push(meet);
    out.extend(family_properties(cfg));
    out.push(ue_structure(cfg));
    out.push(truth_theorem(cfg));
    let (modal, label) = saturation(cfg);
    out.push(modal);
    out.push(label);
    let (succ, neg) = witness_search(cfg);
    out.push(succ);
    out.push(neg);
    out.push(pencil(cfg));
    out.push(classical_baseline(cfg));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepConfig {
        SweepConfig {
            // transitivity needs three worlds to say anything
            max_worlds: 3,
            classical_max_worlds: 3,
            pool_size: 1,
            pencil_fan: 1,
            pencil_trials: 3,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn tiny_scoreboard_passes() {
        for r in scoreboard(&tiny()) {
            assert!(r.passed(), "{r:?}");
            assert!(r.instances > 0, "{} checked nothing", r.id);
        }
    }

    #[test]
    fn ids_unique() {
        let ids: Vec<_> = scoreboard(&tiny()).into_iter().map(|r| r.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }

    #[test]
    fn small_model_counts() {
        assert_eq!(small_models(2).len(), 4 + 3 * 16);
    }

    #[test]
    fn tally_keeps_first_failure() {
        let mut a = Tally::default();
        a.check(true, || unreachable!());
        let mut b = Tally::default();
        b.check(false, || "b".into());
        let mut c = Tally::default();
        c.check(false, || "c".into());
        let t = Tally::sum(vec![a, b, c]);
        assert_eq!((t.instances, t.violations, t.first.as_deref()), (3, 2, Some("b")));
    }
}
