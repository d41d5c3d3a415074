//! Set operators on a frame's powerset and the translation of formulas into
//! set terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::frame::{Frame, Model, Valuation, World, WorldSet};
use crate::semantics::extension;

/// `R⁻¹(X)`: worlds with some successor in `x`.
pub fn r_inv(fr: &Frame, x: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(fr.n(), fr.worlds().filter(|&w| fr.successors(w).intersects(x)))
}

/// `R̂⁻¹(Y)`: worlds all of whose successors lie in `y`.
pub fn r_inv_dual(fr: &Frame, y: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(fr.n(), fr.worlds().filter(|&w| fr.successors(w).is_subset(y)))
}

/// `S⁻¹(X, Y)`: worlds `w` such that every `x ∈ X` with `wRx` has some
/// `y ∈ Y` with `x S_w y`.
pub fn s_inv(fr: &Frame, x: &WorldSet, y: &WorldSet) -> WorldSet {
    let mut out = fr.full_set();
    for w in fr.worlds() {
        for u in x.iter() {
            if fr.r().contains(w, u) && !fr.s(w).row(u).intersects(y) {
                out.remove(w);
                break;
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetTerm {
    /// The set variable `A_p` of atom `p`.
    Var(Arc<str>),
    Empty,
    Full,
    Complement(Box<SetTerm>),
    Union(Box<SetTerm>, Box<SetTerm>),
    Intersection(Box<SetTerm>, Box<SetTerm>),
    /// `R̂⁻¹(t)`
    BoxOp(Box<SetTerm>),
    /// `R⁻¹(t)`
    DiaOp(Box<SetTerm>),
    /// `S⁻¹(t, u)`
    SOp(Box<SetTerm>, Box<SetTerm>),
}

impl SetTerm {
    pub fn var(atom: &str) -> SetTerm {
        SetTerm::Var(Arc::from(atom))
    }

    pub fn complement(t: SetTerm) -> SetTerm {
        SetTerm::Complement(Box::new(t))
    }

    pub fn union(a: SetTerm, b: SetTerm) -> SetTerm {
        SetTerm::Union(Box::new(a), Box::new(b))
    }

    pub fn intersection(a: SetTerm, b: SetTerm) -> SetTerm {
        SetTerm::Intersection(Box::new(a), Box::new(b))
    }

    pub fn box_op(t: SetTerm) -> SetTerm {
        SetTerm::BoxOp(Box::new(t))
    }

    pub fn dia_op(t: SetTerm) -> SetTerm {
        SetTerm::DiaOp(Box::new(t))
    }

    pub fn s_op(a: SetTerm, b: SetTerm) -> SetTerm {
        SetTerm::SOp(Box::new(a), Box::new(b))
    }

    /// Rewrites `t ∪ ∅`, `t ∩ W`, double complements and complemented
    /// constants. The result denotes the same set under every valuation.
    pub fn simplify(&self) -> SetTerm {
        use SetTerm::*;
        match self {
            Var(_) | Empty | Full => self.clone(),
            Complement(t) => match t.simplify() {
                Complement(inner) => *inner,
                Empty => Full,
                Full => Empty,
                other => SetTerm::complement(other),
            },
            Union(a, b) => match (a.simplify(), b.simplify()) {
                (Empty, x) | (x, Empty) => x,
                (Full, _) | (_, Full) => Full,
                (x, y) => SetTerm::union(x, y),
            },
            Intersection(a, b) => match (a.simplify(), b.simplify()) {
                (Full, x) | (x, Full) => x,
                (Empty, _) | (_, Empty) => Empty,
                (x, y) => SetTerm::intersection(x, y),
            },
            BoxOp(t) => SetTerm::box_op(t.simplify()),
            DiaOp(t) => SetTerm::dia_op(t.simplify()),
            SOp(a, b) => SetTerm::s_op(a.simplify(), b.simplify()),
        }
    }

    /// Atoms `p` whose variables `A_p` occur.
    pub fn vars(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut std::collections::BTreeSet<String>) {
        use SetTerm::*;
        match self {
            Var(p) => {
                out.insert(p.to_string());
            }
            Empty | Full => {}
            Complement(t) | BoxOp(t) | DiaOp(t) => t.collect_vars(out),
            Union(a, b) | Intersection(a, b) | SOp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Constructor notation, e.g. `Union(Complement(A_p), A_q)`; `{:#}` uses
/// set notation.
impl fmt::Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SetTerm::*;
        if f.alternate() {
            return match self {
                Var(p) => write!(f, "A_{p}"),
                Empty => write!(f, "∅"),
                Full => write!(f, "W"),
                Complement(t) => write!(f, "-{t:#}"),
                Union(a, b) => write!(f, "({a:#} ∪ {b:#})"),
                Intersection(a, b) => write!(f, "({a:#} ∩ {b:#})"),
                BoxOp(t) => write!(f, "R̂⁻¹({t:#})"),
                DiaOp(t) => write!(f, "R⁻¹({t:#})"),
                SOp(a, b) => write!(f, "S⁻¹({a:#}, {b:#})"),
            };
        }
        match self {
            Var(p) => write!(f, "A_{p}"),
            Empty => write!(f, "Empty"),
            Full => write!(f, "Full"),
            Complement(t) => write!(f, "Complement({t})"),
            Union(a, b) => write!(f, "Union({a}, {b})"),
            Intersection(a, b) => write!(f, "Intersection({a}, {b})"),
            BoxOp(t) => write!(f, "BoxOp({t})"),
            DiaOp(t) => write!(f, "DiaOp({t})"),
            SOp(a, b) => write!(f, "SOp({a}, {b})"),
        }
    }
}

impl fmt::Debug for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for SetTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `φ^t`, structurally and without simplification.
pub fn translate(f: &Formula) -> SetTerm {
    match f {
        Formula::Bottom => SetTerm::Empty,
        Formula::Atom(p) => SetTerm::Var(p.clone()),
        Formula::Implies(a, b) => SetTerm::union(SetTerm::complement(translate(a)), translate(b)),
        Formula::Box(a) => SetTerm::box_op(translate(a)),
        Formula::Rhd(a, b) => SetTerm::s_op(translate(a), translate(b)),
    }
}

/// Assignment of world sets to set variables (`e`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetValuation {
    n: usize,
    map: BTreeMap<String, WorldSet>,
}

impl SetValuation {
    pub fn new(n: usize) -> Self {
        SetValuation {
            n,
            map: BTreeMap::new(),
        }
    }

    /// `e(A_p) := ev(p)` for every atom named in `val`.
    pub fn from_valuation(val: &Valuation) -> Self {
        let mut e = SetValuation::new(val.universe());
        for (a, s) in val.iter() {
            e.bind(a, s.clone());
        }
        e
    }

    pub fn bind(&mut self, atom: &str, set: WorldSet) {
        assert_eq!(set.universe(), self.n, "set valuation over a different frame");
        self.map.insert(atom.to_string(), set);
    }

    pub fn with(mut self, atom: &str, worlds: &[World]) -> Self {
        self.bind(atom, WorldSet::from_worlds(self.n, worlds.iter().copied()));
        self
    }

    pub fn get(&self, atom: &str) -> Option<&WorldSet> {
        self.map.get(atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set variable A_{0} is unbound")]
pub struct UnboundVar(pub String);

pub fn eval_term(fr: &Frame, e: &SetValuation, t: &SetTerm) -> Result<WorldSet, UnboundVar> {
    use SetTerm::*;
    Ok(match t {
        Var(p) => e.get(p).cloned().ok_or_else(|| UnboundVar(p.to_string()))?,
        Empty => fr.empty_set(),
        Full => fr.full_set(),
        Complement(a) => eval_term(fr, e, a)?.complement(),
        Union(a, b) => eval_term(fr, e, a)?.union(&eval_term(fr, e, b)?),
        Intersection(a, b) => eval_term(fr, e, a)?.intersection(&eval_term(fr, e, b)?),
        BoxOp(a) => r_inv_dual(fr, &eval_term(fr, e, a)?),
        DiaOp(a) => r_inv(fr, &eval_term(fr, e, a)?),
        SOp(a, b) => s_inv(fr, &eval_term(fr, e, a)?, &eval_term(fr, e, b)?),
    })
}

/// `⟦φ^t⟧ = ⟦φ⟧_M` with `e(A_p) := ev(p)`; atoms missing from the model's
/// valuation are bound to `∅`, matching the model's default.
pub fn agreement(m: &Model, f: &Formula) -> bool {
    let mut e = SetValuation::from_valuation(&m.valuation);
    for a in f.atoms() {
        if e.get(&a).is_none() {
            e.bind(&a, m.frame.empty_set());
        }
    }
    let lhs = eval_term(&m.frame, &e, &translate(f)).expect("all atoms bound");
    lhs == extension(m, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{enumerate_formulas, parse};
    use crate::frame::{all_frames, chain, random_frame, random_valuation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, ws: &[World]) -> WorldSet {
        WorldSet::from_worlds(n, ws.iter().copied())
    }

    #[test]
    fn operator_examples() {
        let c3 = chain(3);
        assert_eq!(r_inv(&c3, &set(3, &[2])), set(3, &[0, 1]));
        assert_eq!(r_inv(&c3, &set(3, &[])), set(3, &[]));
        assert_eq!(r_inv(&c3, &set(3, &[0])), set(3, &[]));
        assert_eq!(r_inv_dual(&c3, &set(3, &[2])), set(3, &[1, 2]));
        assert!(r_inv_dual(&c3, &c3.full_set()).is_full());
        let y = set(3, &[2]);
        assert_eq!(r_inv_dual(&c3, &y).complement(), r_inv(&c3, &y.complement()));
        assert_eq!(s_inv(&c3, &set(3, &[1]), &set(3, &[2])), set(3, &[0, 1, 2]));
        assert!(s_inv(&c3, &set(3, &[]), &set(3, &[])).is_full());
        assert_eq!(s_inv(&chain(2), &set(2, &[1]), &set(2, &[0])), set(2, &[1]));
    }

    #[test]
    fn duality_exhaustive() {
        for fr in all_frames(3) {
            for y in WorldSet::all_subsets(3) {
                assert_eq!(r_inv_dual(&fr, &y).complement(), r_inv(&fr, &y.complement()));
            }
        }
    }

    #[test]
    fn translation_examples() {
        let t = translate(&parse("p -> q").unwrap());
        assert_eq!(
            t,
            SetTerm::union(SetTerm::complement(SetTerm::var("p")), SetTerm::var("q"))
        );
        assert_eq!(t.to_string(), "Union(Complement(A_p), A_q)");
        assert_eq!(translate(&Formula::Bottom), SetTerm::Empty);
        let t = translate(&parse("<>p |> p").unwrap()).simplify();
        let expected = SetTerm::s_op(
            SetTerm::complement(SetTerm::box_op(SetTerm::complement(SetTerm::var("p")))),
            SetTerm::var("p"),
        );
        assert_eq!(t, expected);
        assert_eq!(format!("{t:#}"), "S⁻¹(-R̂⁻¹(-A_p), A_p)");
    }

    #[test]
    fn simplify_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pool = enumerate_formulas(&["p", "q"], 2, 3);
        for seed in 0..60 {
            let fr = random_frame(4, seed);
            let e = SetValuation::from_valuation(&random_valuation(4, &["p", "q"], &mut rng));
            let f = &pool[rng.gen_range(0..pool.len())];
            let t = translate(f);
            assert_eq!(eval_term(&fr, &e, &t), eval_term(&fr, &e, &t.simplify()));
        }
    }

    #[test]
    fn eval_examples() {
        let c3 = chain(3);
        let e = SetValuation::new(3).with("p", &[2]);
        let j5 = translate(&parse("<>p |> p").unwrap());
        assert!(eval_term(&c3, &e, &j5).unwrap().is_full());
        assert_eq!(eval_term(&c3, &e, &SetTerm::var("p")).unwrap(), set(3, &[2]));
        assert_eq!(
            eval_term(&c3, &e, &SetTerm::var("q")),
            Err(UnboundVar("q".into()))
        );
        let t = SetTerm::dia_op(SetTerm::var("p"));
        assert_eq!(eval_term(&c3, &e, &t).unwrap(), set(3, &[0, 1]));
    }

    #[test]
    fn agreement_examples() {
        let m = Model::new(
            Arc::new(chain(3)),
            Valuation::new(3).with("p", &[1]).with("q", &[2]),
        );
        assert!(agreement(&m, &parse("p |> q").unwrap()));
        assert!(agreement(&m, &Formula::Bottom));
        assert!(agreement(&m, &parse("r -> []r").unwrap()));
    }

    #[test]
    fn agreement_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pool = enumerate_formulas(&["p", "q"], 3, 3);
        for case in 0..200 {
            let n = rng.gen_range(1..=5);
            let m = Model::new(
                Arc::new(random_frame(n, case)),
                random_valuation(n, &["p", "q"], &mut rng),
            );
            let f = &pool[rng.gen_range(0..pool.len())];
            assert!(agreement(&m, f), "{f}");
        }
    }

    #[test]
    fn s_inv_inclusions_exhaustive() {
        for fr in all_frames(3) {
            let subsets: Vec<_> = WorldSet::all_subsets(3).collect();
            for a in &subsets {
                assert!(r_inv_dual(&fr, a).is_subset(&r_inv_dual(&fr, &r_inv_dual(&fr, a))));
                for b in &subsets {
                    let ab = s_inv(&fr, a, b);
                    for c in &subsets {
                        assert!(ab.is_subset(&s_inv(&fr, a, &b.union(c))));
                        assert!(ab.intersection(&s_inv(&fr, b, c)).is_subset(&s_inv(&fr, a, c)));
                    }
                }
            }
        }
    }
}
