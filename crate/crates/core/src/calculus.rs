//! Hilbert-style proof checking for IL and a small library of derived
//! theorems with checked proofs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Schema {
    K,
    GL,
    J1,
    J2,
    J3,
    J4,
    J5,
}

impl Schema {
    pub const ALL: [Schema; 7] = [Schema::K, Schema::GL, Schema::J1, Schema::J2, Schema::J3, Schema::J4, Schema::J5];

    /// Metavariables are the atoms `alpha`, `beta`, `gamma`.
    pub fn text(self) -> &'static str {
        match self {
            Schema::K => "[](alpha -> beta) -> ([]alpha -> []beta)",
            Schema::GL => "[]([]alpha -> alpha) -> []alpha",
            Schema::J1 => "[](alpha -> beta) -> (alpha |> beta)",
            Schema::J2 => "(alpha |> beta) & (beta |> gamma) -> (alpha |> gamma)",
            Schema::J3 => "(alpha |> gamma) & (beta |> gamma) -> ((alpha | beta) |> gamma)",
            Schema::J4 => "(alpha |> beta) -> (<>alpha -> <>beta)",
            Schema::J5 => "<>alpha |> alpha",
        }
    }

    pub fn formula(self) -> &'static Formula {
        static CACHE: OnceLock<Vec<Formula>> = OnceLock::new();
        let all = CACHE.get_or_init(|| {
            Schema::ALL
                .iter()
                .map(|s| parse(s.text()).expect("schema text parses"))
                .collect()
        });
        &all[self as usize]
    }

    pub fn metavariables(self) -> Vec<&'static str> {
        let atoms = self.formula().atoms();
        METAVARIABLES.iter().copied().filter(|m| atoms.contains(*m)).collect()
    }

    pub fn instantiate(self, inst: &Instantiation) -> Formula {
        self.formula().substitute(&|a| inst.get(a).cloned())
    }

    /// Matches `f` against the schema shape, returning the metavariable
    /// bindings.
    pub fn matches(self, f: &Formula) -> Option<Instantiation> {
        let mut bind = Instantiation::default();
        match_pattern(self.formula(), f, &mut bind).then_some(bind)
    }

    pub fn parse_name(s: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|k| k.to_string().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub const METAVARIABLES: [&str; 3] = ["alpha", "beta", "gamma"];

/// Binding of metavariables to formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instantiation(pub BTreeMap<String, Formula>);

impl Instantiation {
    pub fn new(alpha: Formula, beta: Formula, gamma: Formula) -> Self {
        Instantiation(
            METAVARIABLES
                .iter()
                .map(|m| m.to_string())
                .zip([alpha, beta, gamma])
                .collect(),
        )
    }

    /// `α, β, γ := p, q, r`
    pub fn standard() -> Self {
        Instantiation::new(Formula::atom("p"), Formula::atom("q"), Formula::atom("r"))
    }

    pub fn get(&self, meta: &str) -> Option<&Formula> {
        self.0.get(meta)
    }

    pub fn alpha(&self) -> Formula {
        self.get("alpha").cloned().unwrap_or_else(|| Formula::atom("p"))
    }

    pub fn beta(&self) -> Formula {
        self.get("beta").cloned().unwrap_or_else(|| Formula::atom("q"))
    }

    pub fn gamma(&self) -> Formula {
        self.get("gamma").cloned().unwrap_or_else(|| Formula::atom("r"))
    }
}

fn match_pattern(pat: &Formula, f: &Formula, bind: &mut Instantiation) -> bool {
    match (pat, f) {
        (Formula::Atom(m), _) if METAVARIABLES.contains(&&**m) => match bind.0.get(&**m) {
            Some(prev) => prev == f,
            None => {
                bind.0.insert(m.to_string(), f.clone());
                true
            }
        },
        (Formula::Atom(a), Formula::Atom(b)) => a == b,
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Implies(a, b), Formula::Implies(c, d)) | (Formula::Rhd(a, b), Formula::Rhd(c, d)) => {
            std::mem::discriminant(pat) == std::mem::discriminant(f)
                && match_pattern(a, c, bind)
                && match_pattern(b, d, bind)
        }
        (Formula::Box(a), Formula::Box(b)) => match_pattern(a, b, bind),
        _ => false,
    }
}

pub const TAUT_COMPONENT_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("{count} opaque components exceed the truth-table limit {limit}")]
    Overflow { count: usize, limit: usize },
    #[error("falsified when {falsifier:?} are the true components")]
    Falsifiable { falsifier: Vec<Formula> },
}

/// Truth-table check of `f` in the `{⊥, →}` fragment with atoms, `□`- and
/// `▷`-subformulas as opaque components.
pub fn is_tautology(f: &Formula) -> Result<(), TautError> {
    fn collect(f: &Formula, ix: &mut HashMap<Formula, usize>, order: &mut Vec<Formula>) {
        match f {
            Formula::Bottom => {}
            Formula::Implies(a, b) => {
                collect(a, ix, order);
                collect(b, ix, order);
            }
            _ => {
                if !ix.contains_key(f) {
                    ix.insert(f.clone(), order.len());
                    order.push(f.clone());
                }
            }
        }
    }
    fn eval(f: &Formula, ix: &HashMap<Formula, usize>, bits: u32) -> bool {
        match f {
            Formula::Bottom => false,
            Formula::Implies(a, b) => !eval(a, ix, bits) || eval(b, ix, bits),
            _ => bits >> ix[f] & 1 == 1,
        }
    }
    let mut ix = HashMap::new();
    let mut order = Vec::new();
    collect(f, &mut ix, &mut order);
    if order.len() > TAUT_COMPONENT_LIMIT {
        return Err(TautError::Overflow {
            count: order.len(),
            limit: TAUT_COMPONENT_LIMIT,
        });
    }
    match (0..1u32 << order.len()).find(|&bits| !eval(f, &ix, bits)) {
        None => Ok(()),
        Some(bits) => Err(TautError::Falsifiable {
            falsifier: (0..order.len()).filter(|i| bits >> i & 1 == 1).map(|i| order[i].clone()).collect(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Justification {
    Taut,
    Axiom { schema: Schema },
    Mp { i: usize, j: usize },
    Nec { i: usize },
    Hyp { k: usize },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => write!(f, "Taut"),
            Justification::Axiom { schema } => write!(f, "{schema}"),
            Justification::Mp { i, j } => write!(f, "MP {i}, {j}"),
            Justification::Nec { i } => write!(f, "Nec {i}"),
            Justification::Hyp { k } => write!(f, "Hyp {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub conclusion: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    #[serde(default)]
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn new() -> Self {
        Proof::default()
    }

    pub fn with_hypotheses(hypotheses: Vec<Formula>) -> Self {
        Proof { hypotheses, steps: Vec::new() }
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.conclusion)
    }

    fn push(&mut self, conclusion: Formula, justification: Justification) -> usize {
        self.steps.push(ProofStep { conclusion, justification });
        self.steps.len() - 1
    }

    pub fn taut(&mut self, f: Formula) -> usize {
        self.push(f, Justification::Taut)
    }

    pub fn axiom(&mut self, schema: Schema, inst: &Instantiation) -> usize {
        self.push(schema.instantiate(inst), Justification::Axiom { schema })
    }

    pub fn hyp(&mut self, k: usize) -> usize {
        let f = self.hypotheses[k].clone();
        self.push(f, Justification::Hyp { k })
    }

    pub fn nec(&mut self, i: usize) -> usize {
        let f = Formula::boxed(self.steps[i].conclusion.clone());
        self.push(f, Justification::Nec { i })
    }

    /// Modus ponens from `i: A` and `j: A → B`.
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let f = match &self.steps[j].conclusion {
            Formula::Implies(_, b) => (**b).clone(),
            other => panic!("mp: step {j} is not an implication: {other:#}"),
        };
        self.push(f, Justification::Mp { i, j })
    }

    pub fn at(&self, i: usize) -> &Formula {
        &self.steps[i].conclusion
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Proof> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, h) in self.hypotheses.iter().enumerate() {
            writeln!(f, "h{k}. {h:#}")?;
        }
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{i:>3}. {:#}    [{}]", s.conclusion, s.justification)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StepError {
    #[error("empty proof")]
    Empty,
    #[error("not an instance of {schema}")]
    BadMatch { schema: Schema },
    #[error("index {index} does not refer to an earlier step")]
    BadIndex { index: usize },
    #[error("no hypothesis {index}")]
    BadHypothesis { index: usize },
    #[error("hypothesis {index} is not the conclusion")]
    HypothesisMismatch { index: usize },
    #[error("necessitation used under hypotheses")]
    NecUnderHypotheses,
    #[error("conclusion is not the box of step {i}")]
    NecMismatch { i: usize },
    #[error("step {j} is not step {i} implying the conclusion")]
    MpMismatch { i: usize, j: usize },
    #[error("not a tautology: {detail}")]
    NotTautology { detail: String },
    #[error("tautology check overflow: {count} components (limit {limit})")]
    TautOverflow { count: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProofVerdict {
    Valid { conclusion: Formula },
    Invalid { step: usize, error: StepError },
}

impl ProofVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ProofVerdict::Valid { .. })
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Valid { conclusion } => write!(f, "valid: {conclusion:#}"),
            ProofVerdict::Invalid { step, error } => write!(f, "invalid at step {step}: {error}"),
        }
    }
}

fn check_step(p: &Proof, idx: usize) -> Result<(), StepError> {
    let step = &p.steps[idx];
    let earlier = |i: usize| {
        if i < idx {
            Ok(&p.steps[i].conclusion)
        } else {
            Err(StepError::BadIndex { index: i })
        }
    };
    match &step.justification {
        Justification::Taut => is_tautology(&step.conclusion).map_err(|e| match e {
            TautError::Overflow { count, limit } => StepError::TautOverflow { count, limit },
            e @ TautError::Falsifiable { .. } => StepError::NotTautology { detail: e.to_string() },
        }),
        Justification::Axiom { schema } => match schema.matches(&step.conclusion) {
            Some(_) => Ok(()),
            None => Err(StepError::BadMatch { schema: *schema }),
        },
        Justification::Hyp { k } => match p.hypotheses.get(*k) {
            None => Err(StepError::BadHypothesis { index: *k }),
            Some(h) if *h == step.conclusion => Ok(()),
            Some(_) => Err(StepError::HypothesisMismatch { index: *k }),
        },
        Justification::Nec { i } => {
            if !p.hypotheses.is_empty() {
                return Err(StepError::NecUnderHypotheses);
            }
            let body = earlier(*i)?;
            match &step.conclusion {
                Formula::Box(b) if **b == *body => Ok(()),
                _ => Err(StepError::NecMismatch { i: *i }),
            }
        }
        Justification::Mp { i, j } => {
            let a = earlier(*i)?;
            let imp = earlier(*j)?;
            match imp {
                Formula::Implies(l, r) if **l == *a && **r == step.conclusion => Ok(()),
                _ => Err(StepError::MpMismatch { i: *i, j: *j }),
            }
        }
    }
}

/// Checks every step in order; the first failure is reported.
pub fn check_proof(p: &Proof) -> ProofVerdict {
    if p.steps.is_empty() {
        return ProofVerdict::Invalid { step: 0, error: StepError::Empty };
    }
    for idx in 0..p.steps.len() {
        if let Err(error) = check_step(p, idx) {
            return ProofVerdict::Invalid { step: idx, error };
        }
    }
    ProofVerdict::Valid {
        conclusion: p.steps.last().unwrap().conclusion.clone(),
    }
}

/// A named derived theorem instantiated at some `α, β, γ`.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem {
    pub name: &'static str,
    pub statement: Formula,
    pub proof: Proof,
}

pub const DERIVED_NAMES: [&str; 6] = [
    "four",
    "box-iff-rhd",
    "rhd-refl",
    "j5",
    "rhd-mono-right",
    "rhd-weaken-right",
];

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn and(a: &Formula, b: &Formula) -> Formula {
    Formula::and(a.clone(), b.clone())
}

/// From `i: A → B` and `j: B → C` derive `A → C`.
fn chain(p: &mut Proof, i: usize, j: usize) -> usize {
    let (a, b) = split_imp(p.at(i));
    let (_, c) = split_imp(p.at(j));
    let t = p.taut(imp(&imp(&a, &b), &imp(&imp(&b, &c), &imp(&a, &c))));
    let k = p.mp(i, t);
    p.mp(j, k)
}

fn split_imp(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::Implies(a, b) => ((**a).clone(), (**b).clone()),
        other => panic!("not an implication: {other:#}"),
    }
}

/// From a provable tautology `A → B` derive `□A → □B`.
fn box_mono(p: &mut Proof, a: &Formula, b: &Formula) -> usize {
    let t = p.taut(imp(a, b));
    let n = p.nec(t);
    let k = p.axiom(Schema::K, &Instantiation::new(a.clone(), b.clone(), Formula::Bottom));
    p.mp(n, k)
}

fn proof_four(a: &Formula) -> Proof {
    let bx = |f: &Formula| Formula::boxed(f.clone());
    let b = and(a, &bx(a));
    let mut p = Proof::new();
    // □β → □α
    let s3 = box_mono(&mut p, &b, a);
    // α → (□β → β)
    let t = p.taut(imp(&p.at(s3).clone(), &imp(a, &imp(&bx(&b), &b))));
    let s5 = p.mp(s3, t);
    let s6 = p.nec(s5);
    let k = p.axiom(Schema::K, &Instantiation::new(a.clone(), imp(&bx(&b), &b), Formula::Bottom));
    let s8 = p.mp(s6, k);
    let gl = p.axiom(Schema::GL, &Instantiation::new(b.clone(), Formula::Bottom, Formula::Bottom));
    let s12 = chain(&mut p, s8, gl);
    // □β → □□α
    let s16 = box_mono(&mut p, &b, &bx(a));
    chain(&mut p, s12, s16);
    p
}

fn proof_box_iff_rhd(a: &Formula) -> Proof {
    let na = Formula::not(a.clone());
    let x = Formula::rhd(na.clone(), Formula::Bottom);
    let ba = Formula::boxed(a.clone());
    let mut p = Proof::new();
    // □α → (¬α ▷ ⊥)
    let s0 = box_mono(&mut p, a, &Formula::not(na.clone()));
    let j1 = p.axiom(Schema::J1, &Instantiation::new(na.clone(), Formula::Bottom, Formula::Bottom));
    let fwd = chain(&mut p, s0, j1);
    // (¬α ▷ ⊥) → □α
    let j4 = p.axiom(Schema::J4, &Instantiation::new(na.clone(), Formula::Bottom, Formula::Bottom));
    let t1 = p.taut(Formula::top());
    let top = p.nec(t1);
    let nn = box_mono(&mut p, &Formula::not(na.clone()), a);
    let glue = imp(
        p.at(j4),
        &imp(p.at(top), &imp(p.at(nn), &imp(&x, &ba))),
    );
    let g = p.taut(glue);
    let g = p.mp(j4, g);
    let g = p.mp(top, g);
    let bwd = p.mp(nn, g);
    let both = p.taut(imp(&imp(&ba, &x), &imp(&imp(&x, &ba), &Formula::iff(ba.clone(), x.clone()))));
    let k = p.mp(fwd, both);
    p.mp(bwd, k);
    p
}

fn proof_rhd_refl(a: &Formula) -> Proof {
    let na = Formula::not(a.clone());
    let mut p = Proof::new();
    let t = p.taut(imp(&na, &na));
    let n = p.nec(t);
    let j1 = p.axiom(Schema::J1, &Instantiation::new(na.clone(), na, Formula::Bottom));
    p.mp(n, j1);
    p
}

fn proof_j5(a: &Formula) -> Proof {
    let mut p = Proof::new();
    p.axiom(Schema::J5, &Instantiation::new(a.clone(), Formula::Bottom, Formula::Bottom));
    p
}

/// `□(β → γ) → (α ▷ β → α ▷ γ)`
fn proof_rhd_mono_right(a: &Formula, b: &Formula, c: &Formula) -> Proof {
    let inst = Instantiation::new(a.clone(), b.clone(), c.clone());
    let mut p = Proof::new();
    let j1 = p.axiom(Schema::J1, &Instantiation::new(b.clone(), c.clone(), Formula::Bottom));
    let j2 = p.axiom(Schema::J2, &inst);
    let pre = Formula::boxed(imp(b, c));
    let ab = Formula::rhd(a.clone(), b.clone());
    let ac = Formula::rhd(a.clone(), c.clone());
    let t = p.taut(imp(p.at(j1), &imp(p.at(j2), &imp(&pre, &imp(&ab, &ac)))));
    let k = p.mp(j1, t);
    p.mp(j2, k);
    p
}

/// `α ▷ β → α ▷ (β ∨ γ)`
fn proof_rhd_weaken_right(a: &Formula, b: &Formula, c: &Formula) -> Proof {
    let bc = Formula::or(b.clone(), c.clone());
    let mut p = Proof::new();
    let t = p.taut(imp(b, &bc));
    let n = p.nec(t);
    let j1 = p.axiom(Schema::J1, &Instantiation::new(b.clone(), bc.clone(), Formula::Bottom));
    let q = p.mp(n, j1);
    let j2 = p.axiom(Schema::J2, &Instantiation::new(a.clone(), b.clone(), bc.clone()));
    let ab = Formula::rhd(a.clone(), b.clone());
    let abc = Formula::rhd(a.clone(), bc);
    let t = p.taut(imp(p.at(q), &imp(p.at(j2), &imp(&ab, &abc))));
    let k = p.mp(q, t);
    p.mp(j2, k);
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown derived theorem `{0}`")]
pub struct UnknownTheorem(pub String);

/// Looks up a derived theorem and builds its proof at `inst` (missing
/// metavariables default to `p, q, r`).
pub fn derived_theorem(name: &str, inst: &Instantiation) -> Result<Theorem, UnknownTheorem> {
    let (a, b, c) = (inst.alpha(), inst.beta(), inst.gamma());
    let (name, proof) = match name {
        "four" => ("four", proof_four(&a)),
        "box-iff-rhd" => ("box-iff-rhd", proof_box_iff_rhd(&a)),
        "rhd-refl" => ("rhd-refl", proof_rhd_refl(&a)),
        "j5" => ("j5", proof_j5(&a)),
        "rhd-mono-right" => ("rhd-mono-right", proof_rhd_mono_right(&a, &b, &c)),
        "rhd-weaken-right" => ("rhd-weaken-right", proof_rhd_weaken_right(&a, &b, &c)),
        other => return Err(UnknownTheorem(other.to_string())),
    };
    Ok(Theorem {
        name,
        statement: proof.conclusion().expect("nonempty").clone(),
        proof,
    })
}

/// Every derived theorem at `α, β, γ := p, q, r`.
pub fn derived_theorems() -> Vec<Theorem> {
    DERIVED_NAMES
        .iter()
        .map(|n| derived_theorem(n, &Instantiation::standard()).unwrap())
        .collect()
}
