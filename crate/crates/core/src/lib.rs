//! Goal-driven ruin-and-recreate solver for two-dimensional bin packing
//! with guillotine constraints.
//!
//! Supports fixed-orientation and 90-degree-rotation variants, with
//! identical or variable-sized (heterogeneous) bin catalogs. Cutting
//! patterns are rooted trees whose levels alternate cut orientation, so any
//! representable solution is guillotine-cuttable by construction. The
//! search repeatedly ruins part of the incumbent, greedily rebuilds it under
//! a shrinking bin-area budget, and accepts candidates with a
//! late-acceptance hill-climbing rule; every time a complete solution is
//! found the budget is lowered to its total bin area.

pub mod model;
pub mod oracle;
pub mod parallel;
pub mod recreate;
pub mod ruin;
pub mod search;
pub mod treeops;

/// Deterministic, portable RNG used throughout the solver.
pub type SolverRng = rand_chacha::ChaCha8Rng;
