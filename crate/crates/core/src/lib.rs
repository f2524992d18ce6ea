//! Graph distance measures: exact alignment metrics (edit, local edit,
//! cut, distortion), convex fractional relaxations over the
//! transportation polytope, optimal-transport and blow-up distances,
//! Weisfeiler-Leman kernels, homomorphism densities, and subgraph
//! sampling distance, together with a cross-validation suite of the
//! identities tying them together.

pub mod align;
pub mod experiments;
pub mod frac;
pub mod graph;
pub mod hom;
pub mod matrix;
pub mod ot;
pub mod report;
pub mod sampling;
pub mod verify;
pub mod wl;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphsimError {
    #[error("parse error at line {1}: {0}")]
    Parse(String, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("order mismatch ({0} vs {1}); use a padded or blow-up metric for graphs of different orders")]
    OrderMismatch(usize, usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("{what} did not converge; best estimate {best}")]
    NoConvergence { what: String, best: f64 },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub use graph::Graph;
pub use matrix::{Matrix, NormKind};
pub use report::MetricReport;
