//! Fixtures shared by the benches.

use std::sync::Arc;

use ilkit_core::checks::SWEEP_ATOMS;
use ilkit_core::formula::{parse, Formula, FormulaEnumerator};
use ilkit_core::frame::{full_tree, Frame, Model};
use ilkit_core::pencil::{build_demo_pair, transfer_valuation, DemoPair};
use ilkit_core::semantics::valuation_at;

pub fn formula(text: &str) -> Formula {
    parse(text).expect("fixture formula parses")
}

/// Depth 2, size 3 over `p, q`: the sweep pool.
pub fn sweep_pool() -> Vec<Formula> {
    FormulaEnumerator::new(&SWEEP_ATOMS, 2, 3).collect_all()
}

/// A binary tree of the given depth with a fixed valuation.
pub fn tree_model(depth: usize) -> Model {
    let fr = Arc::new(full_tree(2, depth));
    let atoms: Vec<String> = SWEEP_ATOMS.iter().map(|s| s.to_string()).collect();
    let v = valuation_at(fr.n(), &atoms, 0x5a5a_5a5a & ((1 << (2 * fr.n()).min(62)) - 1));
    Model::new(fr, v)
}

/// Pencil demo frames with a valuation on each side.
pub fn pencil_models(fan: usize) -> (DemoPair, Model, Model) {
    let pair = build_demo_pair(fan).expect("demo pair");
    let atoms: Vec<String> = SWEEP_ATOMS.iter().map(|s| s.to_string()).collect();
    let bad_val = valuation_at(pair.bad.n(), &atoms, 0b10_1101_1001);
    let good_val = transfer_valuation(&bad_val, fan);
    let bad = Model::new(pair.bad.clone(), bad_val);
    let good = Model::new(pair.good.clone(), good_val);
    (pair, good, bad)
}

pub fn frame(fr: Frame) -> Arc<Frame> {
    Arc::new(fr)
}
