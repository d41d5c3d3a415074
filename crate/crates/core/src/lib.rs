pub mod algebra;
pub mod calculus;
pub mod checks;
pub mod extension;
pub mod filters;
pub mod formula;
pub mod frame;
pub mod pencil;
pub mod semantics;
pub mod worldset;
