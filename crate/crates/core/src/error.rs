use thiserror::Error;

use crate::func_model::{StepFunction, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside [0, 1]")]
    Domain { what: &'static str, value: f64 },

    #[error("cannot parse `{0}` as a decimal or p/q number")]
    ParseNumber(String),

    #[error("invalid function: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("malformed function spec: {0}")]
    Spec(String),

    #[error("exact mode needs a step function with rational data; use the numeric check for {0}")]
    Mode(&'static str),

    #[error("case ordering 0 < 1/alpha - 1 < 1/beta - 1 < x violated: {0}")]
    CaseOrdering(String),

    #[error("invalid two-step parameters: {0}")]
    TwoStep(String),

    #[error("no admissible root of the closing equation in ({lo}, {hi})")]
    NoRoot { lo: f64, hi: f64 },

    #[error("imaginary residue {residue:e} exceeds {bound:e}")]
    Precision { residue: f64, bound: f64 },

    #[error("bound not established: condition violated at z = {z} (G = {margin:e})")]
    BoundNotEstablished { z: f64, margin: f64 },

    #[error("no certified iterate after {rounds} rounds")]
    Convergence {
        rounds: usize,
        last: Box<StepFunction>,
    },

    #[error("linear program: {0}")]
    Lp(#[from] crate::simplex::LpError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
