#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

//! Thresholded iteratively reweighted least squares for `l-infinity` and
//! `l1` regression under affine constraints: `min ||x|| s.t. Ax = b`.
//!
//! The decision solvers ([`linf::linf_decide`], [`l1::l1_decide`]) answer
//! "is the optimum at most about `M`?" with either a solution or a dual
//! certificate. [`meta`] turns them into warm-started phases and a full
//! optimizer.

pub mod bench;
pub mod electrical;
pub mod error;
pub mod instances;
pub mod l1;
pub mod linalg;
pub mod linf;
pub mod meta;
pub mod params;
pub mod trace;

pub use error::{Error, Result};
pub use l1::{l1_decide, verify_l1_dual, L1Config, L1Outcome};
pub use linalg::{DenseMatrix, SolveOptions, WeightRole, WeightVector};
pub use linf::{linf_decide, verify_linf_certificate, LinfConfig, LinfOutcome};
pub use meta::{optimize, phased_decide, Norm, OptimizeOptions, OptimizeResult};
pub use trace::{IterationTrace, StepMode};
