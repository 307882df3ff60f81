//! Attributed graphs, exact graph edit distance, and edit-path variation
//! operators for evolutionary search over graph-structured genotypes.

pub mod evolve;
pub mod ged;
pub mod graph;
pub mod lbei;
pub mod operators;
pub mod seed;
pub mod validity;

pub use ged::{ged_exact, EditOp, GedError, GedResult, GedSolver, Strategy};
pub use graph::{AaMatrix, Attr, AttributedGraph, GraphError, Permutation, NULL_ATTR};
pub use validity::{DagIoRules, Validity};
