//! Analytic Bethe ansatz for the Lie superalgebra C(s).
//!
//! Dressed vacuum forms are built as exact sums of shifted Q-function
//! ratios; the crate checks their pole structure, functional relations,
//! term counts and Bethe-strap graphs.

pub mod dvf;
pub mod qalgebra;
pub mod repth;
pub mod rootdata;
pub mod strapgraph;
pub mod tableaux;
pub mod verify;

pub use qalgebra::{QExpr, QFactor, QMonomial, Rational, RootAssignment};
