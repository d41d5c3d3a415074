//! Ultrafilter extensions of finite Veltman frames and models, the classical
//! (R-only) extension, and checks of their model-theoretic properties.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{r_inv, s_inv};
use crate::filters::{
    all_proper_filters, all_ultrafilters, assuring, assuring_family, Filter, LabelFamily, Ultrafilter,
    ENUMERATION_LIMIT,
};
use crate::formula::Formula;
use crate::frame::{complete, CompleteError, Frame, Model, Relation, Valuation, Validation, World, WorldSet};
use crate::semantics::Evaluator;

/// `⟨f, σ⟩`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UeWorld {
    pub f: Ultrafilter,
    pub sigma: Vec<Filter>,
}

impl fmt::Display for UeWorld {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "({}, ⟨", self.f)?;
        for (k, l) in self.sigma.iter().enumerate() {
            if k > 0 {
                write!(out, ",")?;
            }
            write!(out, "{l}")?;
        }
        write!(out, "⟩)")
    }
}

/// Which filters may label a step.
#[derive(Debug, Clone, Default)]
pub enum LabelPolicy {
    #[default]
    AllProperFilters,
    Alphabet(Vec<Filter>),
}

#[derive(Debug, Clone)]
pub struct UeOptions {
    pub policy: LabelPolicy,
    /// Largest number of extension worlds before construction aborts.
    pub cap: usize,
}

pub const DEFAULT_UE_CAP: usize = 100_000;

impl Default for UeOptions {
    fn default() -> Self {
        UeOptions {
            policy: LabelPolicy::AllProperFilters,
            cap: DEFAULT_UE_CAP,
        }
    }
}

#[derive(Debug, Error)]
pub enum UeError {
    #[error("extension exceeds the cap of {cap} worlds (at {reached} and still growing; base frame has {base} worlds)")]
    Cap { cap: usize, reached: usize, base: usize },
    #[error("label sequence of length {len} exceeds the base frame's longest chain {bound}")]
    DepthBound { len: usize, bound: usize },
    #[error("extension frame fails its own laws: {0:?}")]
    Invalid(Validation),
    #[error(transparent)]
    Complete(#[from] CompleteError),
    #[error("base frame has {0} worlds; extensions are limited to {ENUMERATION_LIMIT}")]
    TooLarge(usize),
}

/// The extension frame. World `i` of [`UeFrame::frame`] is `worlds()[i]`.
#[derive(Debug, Clone)]
pub struct UeFrame {
    base: Arc<Frame>,
    worlds: Vec<UeWorld>,
    index: HashMap<UeWorld, usize>,
    r_one: Relation,
    s_one: Vec<Relation>,
    frame: Arc<Frame>,
}

impl UeFrame {
    pub fn base(&self) -> &Arc<Frame> {
        &self.base
    }

    pub fn worlds(&self) -> &[UeWorld] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn index_of(&self, w: &UeWorld) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// The extension as a Veltman frame over world indices.
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn r_one(&self) -> &Relation {
        &self.r_one
    }

    /// The label-agreement relation at world `i`, before closure.
    pub fn s_one(&self, i: usize) -> &Relation {
        &self.s_one[i]
    }

    /// Indices of the worlds `⟨Π_x, σ⟩` for a fixed base world `x`.
    pub fn above(&self, x: World) -> impl Iterator<Item = usize> + '_ {
        (0..self.worlds.len()).filter(move |&i| self.worlds[i].f.witness == x)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let worlds: Vec<_> = self
            .worlds
            .iter()
            .map(|w| {
                json!({
                    "ultrafilter_witness": w.f.witness,
                    "label_min_sets": w.sigma.iter().map(|l| l.min_set().to_vec()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let pairs = |r: &Relation| r.pairs().map(|(a, b)| [a, b]).collect::<Vec<_>>();
        let s: Vec<_> = (0..self.len())
            .map(|i| pairs(self.frame.s(i)))
            .collect();
        json!({
            "base_worlds": self.base.n(),
            "worlds": worlds,
            "r_one": pairs(&self.r_one),
            "r": pairs(self.frame.r()),
            "s": s,
        })
    }

    pub fn to_dot(&self, valuation: Option<&Valuation>) -> String {
        let mut out = String::from("digraph ue {\n");
        for (i, w) in self.worlds.iter().enumerate() {
            let atoms = valuation.map(|v| v.true_at(i).join(",")).unwrap_or_default();
            let sep = if atoms.is_empty() { "" } else { "\\n" };
            writeln!(out, "  {i} [label=\"{w}{sep}{atoms}\"];").unwrap();
        }
        for (a, b) in self.r_one.pairs() {
            writeln!(out, "  {a} -> {b};").unwrap();
        }
        for (a, b) in self.frame.r().pairs().filter(|&(a, b)| !self.r_one.contains(a, b)) {
            writeln!(out, "  {a} -> {b} [color=gray];").unwrap();
        }
        for i in 0..self.len() {
            for (a, b) in self.frame.s(i).pairs().filter(|(a, b)| a != b) {
                writeln!(out, "  {a} -> {b} [style=dashed, label=\"S({i})\"];").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_ue(fr: &Arc<Frame>, opts: &UeOptions) -> Result<UeFrame, UeError> {
    let n = fr.n();
    if n > ENUMERATION_LIMIT {
        return Err(UeError::TooLarge(n));
    }
    let labels = match &opts.policy {
        LabelPolicy::AllProperFilters => all_proper_filters(n),
        LabelPolicy::Alphabet(ls) => ls.clone(),
    };
    let ufs = all_ultrafilters(fr);
    // assured[f][g] = labels l with f ≺_l g
    let assured: Vec<Vec<Vec<Filter>>> = ufs
        .iter()
        .map(|&f| {
            ufs.iter()
                .map(|&g| labels.iter().filter(|l| assuring(fr, f, l, g)).cloned().collect())
                .collect()
        })
        .collect();
    let bound = fr.longest_chain();
    let mut worlds: Vec<UeWorld> = Vec::new();
    let mut index: HashMap<UeWorld, usize> = HashMap::new();
    let mut intern = |w: UeWorld, worlds: &mut Vec<UeWorld>| -> Result<usize, UeError> {
        if let Some(&i) = index.get(&w) {
            return Ok(i);
        }
        if worlds.len() >= opts.cap {
            return Err(UeError::Cap {
                cap: opts.cap,
                reached: worlds.len(),
                base: n,
            });
        }
        index.insert(w.clone(), worlds.len());
        worlds.push(w);
        Ok(worlds.len() - 1)
    };
    for &f in &ufs {
        intern(UeWorld { f, sigma: Vec::new() }, &mut worlds)?;
    }
    let mut edges = Vec::new();
    let mut i = 0;
    while i < worlds.len() {
        let UeWorld { f, sigma } = worlds[i].clone();
        for &g in &ufs {
            for l in &assured[f.witness][g.witness] {
                let mut tau = sigma.clone();
                tau.push(l.clone());
                if tau.len() > bound {
                    return Err(UeError::DepthBound { len: tau.len(), bound });
                }
                let j = intern(UeWorld { f: g, sigma: tau }, &mut worlds)?;
                edges.push((i, j));
            }
        }
        i += 1;
    }
    let total = worlds.len();
    let r_one = Relation::from_pairs(total, edges.iter().copied());
    let r_ue = r_one.transitive_closure();
    let mut s_one = Vec::with_capacity(total);
    let mut seeds = Vec::new();
    for (i, w) in worlds.iter().enumerate() {
        let pos = w.sigma.len();
        let mut groups: HashMap<&Filter, Vec<usize>> = HashMap::new();
        for j in r_ue.row(i) {
            groups.entry(&worlds[j].sigma[pos]).or_default().push(j);
        }
        let mut rel = Relation::new(total);
        for members in groups.values() {
            for &a in members {
                for &b in members {
                    rel.insert(a, b);
                    seeds.push((i, a, b));
                }
            }
        }
        s_one.push(rel);
    }
    let frame = complete(total, &edges, &seeds)?;
    let verdict = frame.validate();
    if !verdict.is_ok() {
        return Err(UeError::Invalid(verdict));
    }
    Ok(UeFrame {
        base: fr.clone(),
        worlds,
        index,
        r_one,
        s_one,
        frame: Arc::new(frame),
    })
}

/// Extension of a model: `⟨f, σ⟩ ∈ ev_ue(p)` iff `ev(p) ∈ f`.
#[derive(Debug, Clone)]
pub struct UeModel {
    pub ue: UeFrame,
    pub model: Model,
}

pub fn build_ue_model(m: &Model, opts: &UeOptions) -> Result<UeModel, UeError> {
    let ue = build_ue(&m.frame, opts)?;
    let mut val = Valuation::new(ue.len());
    for (atom, set) in m.valuation.iter() {
        let lifted = WorldSet::from_worlds(ue.len(), (0..ue.len()).filter(|&i| ue.worlds[i].f.contains(set)));
        val.set(atom, lifted);
    }
    let model = Model::new(ue.frame.clone(), val);
    Ok(UeModel { ue, model })
}

pub fn ue_force(um: &UeModel, w: &UeWorld, f: &Formula) -> bool {
    let i = um.ue.index_of(w).expect("world belongs to this extension");
    crate::semantics::forces(&um.model, i, f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum TruthVerdict {
    Agree { checked: usize },
    Mismatch { formula: Formula, base_world: World, ue_world: String, base: bool, ue: bool },
}

impl TruthVerdict {
    pub fn is_agree(&self) -> bool {
        matches!(self, TruthVerdict::Agree { .. })
    }
}

/// `M, x ⊩ φ ⟺ M^ue, ⟨Π_x, σ⟩ ⊩ φ` for every `σ` reachable for `Π_x` and
/// every pool formula.
pub fn check_truth_theorem(m: &Model, pool: &[Formula], opts: &UeOptions) -> Result<TruthVerdict, UeError> {
    let um = build_ue_model(m, opts)?;
    Ok(truth_theorem_on(m, &um, pool))
}

pub fn truth_theorem_on(m: &Model, um: &UeModel, pool: &[Formula]) -> TruthVerdict {
    let mut base = Evaluator::for_model(m);
    let mut ext = Evaluator::for_model(&um.model);
    let mut checked = 0;
    for f in pool {
        let b = base.eval(f);
        let e = ext.eval(f);
        for (i, w) in um.ue.worlds().iter().enumerate() {
            let x = w.f.witness;
            if b.contains(x) != e.contains(i) {
                return TruthVerdict::Mismatch {
                    formula: f.clone(),
                    base_world: x,
                    ue_world: w.to_string(),
                    base: b.contains(x),
                    ue: e.contains(i),
                };
            }
            checked += 1;
        }
    }
    TruthVerdict::Agree { checked }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pool of {size} formulas has too many subsets (limit {limit})")]
pub struct PoolTooLarge {
    pub size: usize,
    pub limit: usize,
}

pub const SATURATION_POOL_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum SaturationVerdict {
    Ok { checked: usize },
    Failure { world: String, subset: Vec<Formula> },
}

impl SaturationVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, SaturationVerdict::Ok { .. })
    }
}

/// For every world and every subset `Σ` of the pool: if `◊⋀Σ` holds there,
/// some successor forces every member of `Σ`. The premise is evaluated as a
/// formula, the conclusion on extension sets.
pub fn check_saturation(um: &UeModel, pool: &[Formula]) -> Result<SaturationVerdict, PoolTooLarge> {
    if pool.len() > SATURATION_POOL_LIMIT {
        return Err(PoolTooLarge {
            size: pool.len(),
            limit: SATURATION_POOL_LIMIT,
        });
    }
    let fr = um.model.frame.clone();
    let mut ev = Evaluator::for_model(&um.model);
    let exts: Vec<WorldSet> = pool.iter().map(|f| ev.eval(f)).collect();
    let mut checked = 0;
    for mask in 0u32..1 << pool.len() {
        let subset: Vec<Formula> = (0..pool.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| pool[k].clone())
            .collect();
        let premise = ev.eval(&Formula::diamond(Formula::conjunction(subset.iter().cloned())));
        let mut realized = fr.full_set();
        for k in (0..pool.len()).filter(|k| mask >> k & 1 == 1) {
            realized.intersect_with(&exts[k]);
        }
        for i in 0..fr.n() {
            checked += 1;
            if premise.contains(i) && !fr.successors(i).intersects(&realized) {
                return Ok(SaturationVerdict::Failure {
                    world: um.ue.worlds()[i].to_string(),
                    subset,
                });
            }
        }
    }
    Ok(SaturationVerdict::Ok { checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum LabelSaturationVerdict {
    Ok { instances: usize, premise_held: usize },
    Failure { f: Ultrafilter, label: Vec<World> },
}

impl LabelSaturationVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, LabelSaturationVerdict::Ok { .. })
    }
}

/// For every `f` and proper `l`: if the finite part `{min l}` of `l` has an
/// assured successor, so does `l` itself.
pub fn check_label_saturation(fr: &Frame) -> LabelSaturationVerdict {
    let ufs = all_ultrafilters(fr);
    let mut instances = 0;
    let mut premise_held = 0;
    for &f in &ufs {
        for l in all_proper_filters(fr.n()) {
            instances += 1;
            let finite = LabelFamily::singleton(l.min_set().clone());
            if !ufs.iter().any(|&g| assuring_family(fr, f, &finite, g)) {
                continue;
            }
            premise_held += 1;
            if !ufs.iter().any(|&h| assuring(fr, f, &l, h)) {
                return LabelSaturationVerdict::Failure {
                    f,
                    label: l.min_set().to_vec(),
                };
            }
        }
    }
    LabelSaturationVerdict::Ok { instances, premise_held }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("precondition fails: {0}")]
pub struct PreconditionError(pub String);

/// Some `h` with `f ≺_l h` and `B ∈ h`, given some `g` with `f ≺_l g`,
/// `A ∈ g`, and `S⁻¹(A, B) ∈ f`.
pub fn find_assured_successor(
    fr: &Frame,
    f: Ultrafilter,
    l: &Filter,
    a: &WorldSet,
    b: &WorldSet,
) -> Result<Option<Ultrafilter>, PreconditionError> {
    let ufs = all_ultrafilters(fr);
    if !ufs.iter().any(|&g| assuring(fr, f, l, g) && g.contains(a)) {
        return Err(PreconditionError(format!("no g with {f} ≺_{l} g and {a} ∈ g")));
    }
    if !f.contains(&s_inv(fr, a, b)) {
        return Err(PreconditionError(format!("S⁻¹({a}, {b}) ∉ {f}")));
    }
    Ok(ufs.into_iter().find(|&h| assuring(fr, f, l, h) && h.contains(b)))
}

/// Some `g` and proper `l` with `A ∈ g`, `B̄ ∈ l` and `f ≺_l g`, given that
/// `S⁻¹(A, B)` is not in `f`.
pub fn witness_from_negated(
    fr: &Frame,
    f: Ultrafilter,
    a: &WorldSet,
    b: &WorldSet,
) -> Result<Option<(Ultrafilter, Filter)>, PreconditionError> {
    if f.contains(&s_inv(fr, a, b)) {
        return Err(PreconditionError(format!("S⁻¹({a}, {b}) ∈ {f}")));
    }
    let not_b = b.complement();
    let labels: Vec<Filter> = all_proper_filters(fr.n())
        .into_iter()
        .filter(|l| l.contains(&not_b))
        .collect();
    for g in all_ultrafilters(fr).into_iter().filter(|g| g.contains(a)) {
        if let Some(l) = labels.iter().find(|l| assuring(fr, f, l, g)) {
            return Ok(Some((g, l.clone())));
        }
    }
    Ok(None)
}

/// The ultrafilter extension of `(W, R)` alone: ultrafilters related when
/// `X ∈ g` implies `R⁻¹(X) ∈ f` for every `X ⊆ W`.
#[derive(Debug, Clone)]
pub struct ClassicalUe {
    pub ultrafilters: Vec<Ultrafilter>,
    /// Over indices into `ultrafilters`.
    pub r: Relation,
    pub valuation: Valuation,
}

pub fn classical_ue(m: &Model) -> ClassicalUe {
    let fr = &m.frame;
    assert!(fr.n() <= ENUMERATION_LIMIT, "classical extension enumerates all subsets");
    let ufs = all_ultrafilters(fr);
    let k = ufs.len();
    let subsets: Vec<WorldSet> = WorldSet::all_subsets(fr.n()).collect();
    let preimages: Vec<WorldSet> = subsets.iter().map(|x| r_inv(fr, x)).collect();
    let mut r = Relation::new(k);
    for (i, f) in ufs.iter().enumerate() {
        for (j, g) in ufs.iter().enumerate() {
            let related = subsets
                .iter()
                .zip(&preimages)
                .all(|(x, px)| !g.contains(x) || f.contains(px));
            if related {
                r.insert(i, j);
            }
        }
    }
    let mut valuation = Valuation::new(k);
    for (atom, set) in m.valuation.iter() {
        valuation.set(atom, WorldSet::from_worlds(k, (0..k).filter(|&i| ufs[i].contains(set))));
    }
    ClassicalUe {
        ultrafilters: ufs,
        r,
        valuation,
    }
}

/// `⟦φ⟧` of a `□`-fragment formula on a Kripke model.
pub fn kripke_extension(r: &Relation, val: &Valuation, f: &Formula) -> WorldSet {
    let n = r.universe();
    match f {
        Formula::Atom(a) => val.eval(a),
        Formula::Bottom => WorldSet::empty(n),
        Formula::Implies(a, b) => kripke_extension(r, val, a)
            .complement()
            .union(&kripke_extension(r, val, b)),
        Formula::Box(a) => {
            let inner = kripke_extension(r, val, a);
            WorldSet::from_worlds(n, (0..n).filter(|&w| r.row(w).is_subset(&inner)))
        }
        Formula::Rhd(..) => panic!("kripke_extension is limited to the box fragment"),
    }
}

/// Validity of a `□`-fragment formula on `(W, R)` over all valuations.
pub fn kripke_valid(r: &Relation, f: &Formula) -> bool {
    let n = r.universe();
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    assert!(atoms.len() * n <= 20, "valuation space too large");
    (0u64..1 << (atoms.len() * n)).all(|idx| {
        let val = crate::semantics::valuation_at(n, &atoms, idx);
        kripke_extension(r, &val, f).is_full()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalReport {
    pub isomorphic: bool,
    pub truth_lemma: bool,
    pub reflection: bool,
    pub failure: Option<String>,
}

impl ClassicalReport {
    pub fn is_ok(&self) -> bool {
        self.isomorphic && self.truth_lemma && self.reflection
    }
}

/// Isomorphism via `w ↦ Π_w`, the truth lemma `ev(φ) ∈ f ⟺ f ⊩ φ`, and
/// reflection of validity, over a `□`-fragment pool.
pub fn check_classical(m: &Model, pool: &[Formula]) -> ClassicalReport {
    let fr = &m.frame;
    let ue = classical_ue(m);
    let mut failure = None;
    let isomorphic = ue.ultrafilters.len() == fr.n()
        && ue.ultrafilters.iter().enumerate().all(|(i, f)| f.witness == i)
        && (0..fr.n()).all(|a| (0..fr.n()).all(|b| fr.r().contains(a, b) == ue.r.contains(a, b)));
    if !isomorphic {
        failure = Some("Π is not an isomorphism onto the extension".to_string());
    }
    let mut truth_lemma = true;
    let mut reflection = true;
    let base_r = fr.r();
    for f in pool.iter().filter(|f| f.is_box_fragment()) {
        let base_ext = kripke_extension(base_r, &m.valuation, f);
        let ue_ext = kripke_extension(&ue.r, &ue.valuation, f);
        for (i, u) in ue.ultrafilters.iter().enumerate() {
            if u.contains(&base_ext) != ue_ext.contains(i) {
                truth_lemma = false;
                failure.get_or_insert_with(|| format!("truth lemma fails for {f:#} at {u}"));
            }
        }
        if f.atoms().len() * fr.n() <= 20 && kripke_valid(&ue.r, f) && !kripke_valid(base_r, f) {
            reflection = false;
            failure.get_or_insert_with(|| format!("{f:#} valid on the extension only"));
        }
    }
    ClassicalReport {
        isomorphic,
        truth_lemma,
        reflection,
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{enumerate_formulas, parse};
    use crate::frame::{all_frames, chain, random_frame, random_valuation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pi(w: World) -> Ultrafilter {
        Ultrafilter::principal(w)
    }

    fn up(n: usize, ws: &[World]) -> Filter {
        Filter::up_of(n, ws).unwrap()
    }

    fn uw(w: World, sigma: Vec<Filter>) -> UeWorld {
        UeWorld { f: pi(w), sigma }
    }

    #[test]
    fn chain2_extension() {
        let ue = build_ue(&Arc::new(chain(2)), &UeOptions::default()).unwrap();
        let expected = [
            uw(0, vec![]),
            uw(1, vec![]),
            uw(1, vec![up(2, &[1])]),
            uw(1, vec![up(2, &[0, 1])]),
        ];
        let mut got = ue.worlds().to_vec();
        got.sort();
        let mut want = expected.to_vec();
        want.sort();
        assert_eq!(got, want);
        let root = ue.index_of(&expected[0]).unwrap();
        let a = ue.index_of(&expected[2]).unwrap();
        let b = ue.index_of(&expected[3]).unwrap();
        let mut edges: Vec<_> = ue.frame().r().pairs().collect();
        edges.sort();
        let mut want_edges = vec![(root, a), (root, b)];
        want_edges.sort();
        assert_eq!(edges, want_edges);
        let mut s: Vec<_> = ue.frame().s(root).pairs().collect();
        s.sort();
        let mut want_s = vec![(a, a), (b, b)];
        want_s.sort();
        assert_eq!(s, want_s);
        assert!(ue.len() > 2);
    }

    #[test]
    fn single_world_extension() {
        let ue = build_ue(&Arc::new(chain(1)), &UeOptions::default()).unwrap();
        assert_eq!(ue.worlds(), &[uw(0, vec![])]);
        assert!(ue.frame().r().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let opts = UeOptions {
            cap: 3,
            ..UeOptions::default()
        };
        let err = build_ue(&Arc::new(chain(2)), &opts).unwrap_err();
        assert!(matches!(err, UeError::Cap { cap: 3, .. }), "{err}");
    }

    #[test]
    fn alphabet_policy_restricts_labels() {
        let opts = UeOptions {
            policy: LabelPolicy::Alphabet(vec![up(2, &[1])]),
            ..UeOptions::default()
        };
        let ue = build_ue(&Arc::new(chain(2)), &opts).unwrap();
        assert_eq!(ue.len(), 3);
    }

    #[test]
    fn successors_extend_labels() {
        for fr in all_frames(3).into_iter().step_by(7) {
            let fr = Arc::new(fr);
            let ue = build_ue(&fr, &UeOptions::default()).unwrap();
            for (i, j) in ue.frame().r().pairs() {
                let (a, b) = (&ue.worlds()[i], &ue.worlds()[j]);
                assert!(a.sigma.len() < b.sigma.len());
                assert_eq!(a.sigma[..], b.sigma[..a.sigma.len()]);
                assert!(assuring(&fr, a.f, &b.sigma[a.sigma.len()], b.f));
            }
            assert!(ue.worlds().iter().all(|w| w.sigma.len() <= fr.longest_chain()));
        }
    }

    #[test]
    fn lifted_valuation() {
        let m = Model::new(Arc::new(chain(2)), Valuation::new(2).with("p", &[1]).with("q", &[]).with("r", &[0, 1]));
        let um = build_ue_model(&m, &UeOptions::default()).unwrap();
        for (i, w) in um.ue.worlds().iter().enumerate() {
            assert_eq!(um.model.valuation.eval("p").contains(i), w.f.witness == 1);
        }
        assert!(um.model.valuation.eval("q").is_empty());
        assert!(um.model.valuation.eval("r").is_full());
        assert!(ue_force(&um, &uw(0, vec![]), &parse("<>p").unwrap()));
        for w in um.ue.worlds() {
            assert!(!ue_force(&um, w, &Formula::Bottom));
        }
    }

    #[test]
    fn truth_theorem_small() {
        let pool = enumerate_formulas(&["p"], 2, 3);
        let m = Model::new(Arc::new(chain(2)), Valuation::new(2).with("p", &[1]));
        assert!(check_truth_theorem(&m, &pool, &UeOptions::default()).unwrap().is_agree());
        let m = Model::bare(Arc::new(chain(1)));
        assert!(check_truth_theorem(&m, &pool, &UeOptions::default()).unwrap().is_agree());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..15 {
            let fr = Arc::new(random_frame(3, seed));
            let m = Model::new(fr, random_valuation(3, &["p"], &mut rng));
            let v = check_truth_theorem(&m, &pool, &UeOptions::default()).unwrap();
            assert!(v.is_agree(), "{v:?}");
        }
    }

    #[test]
    fn saturation_small() {
        let m = Model::new(Arc::new(chain(2)), Valuation::new(2).with("p", &[1]));
        let um = build_ue_model(&m, &UeOptions::default()).unwrap();
        assert!(check_saturation(&um, &[Formula::atom("p")]).unwrap().is_ok());
        assert!(check_saturation(&um, &[]).unwrap().is_ok());
        let big: Vec<Formula> = enumerate_formulas(&["p"], 1, 2).into_iter().take(17).collect();
        assert!(check_saturation(&um, &big).is_err());
    }

    #[test]
    fn label_saturation_examples() {
        assert!(check_label_saturation(&chain(2)).is_ok());
        assert!(check_label_saturation(&Frame::discrete(2)).is_ok());
        let h = all_ultrafilters(&chain(2))
            .into_iter()
            .find(|&h| assuring(&chain(2), pi(0), &up(2, &[1]), h));
        assert_eq!(h, Some(pi(1)));
    }

    #[test]
    fn assured_successor_examples() {
        let c3 = chain(3);
        let s = |ws: &[World]| WorldSet::from_worlds(3, ws.iter().copied());
        let l = up(3, &[1, 2]);
        assert_eq!(find_assured_successor(&c3, pi(0), &l, &s(&[1]), &s(&[2])).unwrap(), Some(pi(2)));
        let h = find_assured_successor(&c3, pi(0), &l, &s(&[1]), &c3.full_set()).unwrap().unwrap();
        assert!(assuring(&c3, pi(0), &l, h));
        assert!(find_assured_successor(&c3, pi(2), &l, &s(&[1]), &s(&[2])).is_err());
    }

    #[test]
    fn negated_witness_examples() {
        let c2 = chain(2);
        let a = WorldSet::from_worlds(2, [1]);
        let (g, l) = witness_from_negated(&c2, pi(0), &a, &WorldSet::empty(2)).unwrap().unwrap();
        assert_eq!(g, pi(1));
        assert!(l.contains(&WorldSet::full(2)));
        assert!(witness_from_negated(&c2, pi(1), &a, &WorldSet::empty(2)).is_err());
    }

    #[test]
    fn classical_baseline() {
        let pool: Vec<Formula> = enumerate_formulas(&["p"], 2, 3)
            .into_iter()
            .filter(Formula::is_box_fragment)
            .collect();
        let m = Model::new(Arc::new(chain(2)), Valuation::new(2).with("p", &[1]));
        let rep = check_classical(&m, &pool);
        assert!(rep.is_ok(), "{rep:?}");
        let ue = classical_ue(&m);
        let boxp = parse("[]p").unwrap();
        let base = kripke_extension(m.frame.r(), &m.valuation, &boxp);
        let ext = kripke_extension(&ue.r, &ue.valuation, &boxp);
        assert_eq!(base.to_vec(), vec![0, 1]);
        assert_eq!(ext.to_vec(), vec![0, 1]);
    }

    #[test]
    fn json_and_dot() {
        let ue = build_ue(&Arc::new(chain(2)), &UeOptions::default()).unwrap();
        let j = ue.to_json();
        assert_eq!(j["worlds"].as_array().unwrap().len(), 4);
        assert_eq!(j["worlds"][0]["ultrafilter_witness"], 0);
        assert!(ue.to_dot(None).starts_with("digraph ue {"));
    }
}
