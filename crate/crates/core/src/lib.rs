//! Feasibility certificates and integrality-ratio bounds for auxiliary
//! functions `h: [0, 1] -> [0, 1]` in the analysis of best-of-many
//! Christofides for metric s-t path TSP.
//!
//! Any `h` with `G(z) <= 0` on `[0, 1]` (see [`condition`]) bounds the
//! ratio by `1 + 1 / (1 + int_0^1 h)`. The crate decides that condition
//! exactly for step functions, numerically for the reference function
//! `4 / (4 + sigma)`, and searches step functions for the best bound.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condition;
pub mod error;
pub mod func_model;
pub mod number;
pub mod numerics;
pub mod optimizer;
pub mod par;
pub mod plot;
pub mod rho;
pub mod simplex;
pub mod two_step;

pub use condition::{
    certify_exact, check_feasible_exact, check_feasible_numeric, condition_value, decompose,
    FeasibilityCertificate, QuadraticPiece, Verdict,
};
pub use error::{Error, Result};
pub use func_model::{AuxFunction, StepFunction, Violation};
pub use number::{DualNum, Mode};
pub use optimizer::{optimize, worst_violation, BreakpointMode, OptimizeConfig, OptimizeResult};
pub use par::Execution;
pub use rho::{rho_star, Feasibility, RatioResult};
pub use two_step::{check_paper_mode, solve_optimum, DiscriminantVerdict, TwoStepParams};
