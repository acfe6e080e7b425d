//! Candidate auxiliary functions `h: [0, 1] -> [0, 1]`.
//!
//! Step functions use half-open pieces `[b_i, b_{i+1})`; the last piece is
//! closed at 1. The condition integral only sees `h` through integrals, so
//! the convention at a breakpoint never changes a verdict.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::number::DualNum;

/// Piecewise constant `h` with breakpoints in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    breakpoints: Vec<DualNum>,
    values: Vec<DualNum>,
}

/// One constant piece of a step function.
#[derive(Clone, Copy, Debug)]
pub struct Piece<'a> {
    pub lo: &'a DualNum,
    pub hi: &'a DualNum,
    pub value: &'a DualNum,
}

static ZERO: std::sync::OnceLock<DualNum> = std::sync::OnceLock::new();
static ONE: std::sync::OnceLock<DualNum> = std::sync::OnceLock::new();

fn zero_ref() -> &'static DualNum {
    ZERO.get_or_init(DualNum::zero)
}

fn one_ref() -> &'static DualNum {
    ONE.get_or_init(DualNum::one)
}

impl StepFunction {
    /// Builds a step function, rejecting any invariant violation.
    pub fn new(breakpoints: Vec<DualNum>, values: Vec<DualNum>) -> Result<Self> {
        let h = Self::new_unchecked(breakpoints, values);
        let violations = h.violations();
        if violations.is_empty() {
            Ok(h)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Builds without checking; pair with [`StepFunction::violations`].
    pub fn new_unchecked(breakpoints: Vec<DualNum>, values: Vec<DualNum>) -> Self {
        StepFunction {
            breakpoints,
            values,
        }
    }

    pub fn constant(value: DualNum) -> Result<Self> {
        Self::new(Vec::new(), vec![value])
    }

    /// `alpha` on `[0, x)` and `beta` on `[x, 1]`.
    pub fn two_step(alpha: DualNum, beta: DualNum, x: DualNum) -> Result<Self> {
        Self::new(vec![x], vec![alpha, beta])
    }

    /// The published choice: 0.971239 on `[0, 0.236901)`, 0.873362 after.
    pub fn published() -> Self {
        let d = |s: &str| s.parse::<DualNum>().expect("constant");
        Self::two_step(d("0.971239"), d("0.873362"), d("0.236901")).expect("valid")
    }

    /// `k` pieces with breakpoints `j / k`.
    pub fn uniform_breakpoints(k: usize) -> Vec<DualNum> {
        (1..k)
            .map(|j| DualNum::from_integers(j as i64, k as i64))
            .collect()
    }

    pub fn breakpoints(&self) -> &[DualNum] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[DualNum] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece<'_>> + '_ {
        let n = self.values.len();
        (0..n).map(move |i| Piece {
            lo: if i == 0 {
                zero_ref()
            } else {
                &self.breakpoints[i - 1]
            },
            hi: if i + 1 == n {
                one_ref()
            } else {
                &self.breakpoints[i]
            },
            value: &self.values[i],
        })
    }

    /// Index of the piece containing `sigma`.
    pub fn piece_index(&self, sigma: f64) -> usize {
        self.breakpoints.partition_point(|b| b.value() <= sigma)
    }

    pub fn piece_index_exact(&self, sigma: &BigRational) -> usize {
        self.breakpoints.partition_point(|b| b.exact() <= sigma)
    }

    pub fn eval(&self, sigma: f64) -> f64 {
        self.values[self.piece_index(sigma)].value()
    }

    pub fn integral(&self) -> f64 {
        self.pieces()
            .map(|p| (p.hi.value() - p.lo.value()) * p.value.value())
            .sum()
    }

    pub fn integral_exact(&self) -> BigRational {
        self.pieces()
            .map(|p| (p.hi.exact() - p.lo.exact()) * p.value.exact())
            .fold(BigRational::zero(), |acc, t| acc + t)
    }

    /// Every value multiplied by `factor`, exactly.
    pub fn scaled(&self, factor: &BigRational) -> Self {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self
                .values
                .iter()
                .map(|v| DualNum::from_ratio(v.exact() * factor))
                .collect(),
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.values.len() != self.breakpoints.len() + 1 {
            out.push(Violation::LengthMismatch {
                breakpoints: self.breakpoints.len(),
                values: self.values.len(),
            });
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (i, b) in self.breakpoints.iter().enumerate() {
            if b.exact() <= &zero || b.exact() >= &one {
                out.push(Violation::BreakpointOutOfRange {
                    index: i,
                    value: b.to_text(),
                });
            }
        }
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                out.push(Violation::BreakpointsNotIncreasing { index: i + 1 });
            }
        }
        for (i, v) in self.values.iter().enumerate() {
            if v.exact() < &zero || v.exact() > &one {
                out.push(Violation::ValueOutOfRange {
                    index: i,
                    value: v.to_text(),
                });
            }
        }
        out
    }
}

/// A broken invariant, reported as data by `validate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch { breakpoints: usize, values: usize },
    BreakpointOutOfRange { index: usize, value: String },
    BreakpointsNotIncreasing { index: usize },
    ValueOutOfRange { index: usize, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch {
                breakpoints,
                values,
            } => write!(
                f,
                "length mismatch: {breakpoints} breakpoints need {} values, got {values}",
                breakpoints + 1
            ),
            Violation::BreakpointOutOfRange { index, value } => {
                write!(f, "breakpoint {index} = {value} not in (0,1)")
            }
            Violation::BreakpointsNotIncreasing { index } => {
                write!(f, "breakpoints not increasing at index {index}")
            }
            Violation::ValueOutOfRange { index, value } => {
                write!(f, "value {index} = {value} out of [0,1]")
            }
        }
    }
}

/// The functions the tool can reason about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxFunction {
    Step(StepFunction),
    Constant(DualNum),
    /// `sigma -> 4 / (4 + sigma)`.
    ReferenceTv,
}

impl AuxFunction {
    pub fn published() -> Self {
        AuxFunction::Step(StepFunction::published())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AuxFunction::Step(_) => "step",
            AuxFunction::Constant(_) => "constant",
            AuxFunction::ReferenceTv => "reference_tv",
        }
    }

    pub fn eval(&self, sigma: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::Domain {
                what: "sigma",
                value: sigma,
            });
        }
        Ok(match self {
            AuxFunction::Step(s) => s.eval(sigma),
            AuxFunction::Constant(c) => c.value(),
            AuxFunction::ReferenceTv => 4.0 / (4.0 + sigma),
        })
    }

    /// `int_0^1 h`; `4 ln(5/4)` for the reference function.
    pub fn integral(&self) -> f64 {
        match self {
            AuxFunction::Step(s) => s.integral(),
            AuxFunction::Constant(c) => c.value(),
            AuxFunction::ReferenceTv => 4.0 * (1.25f64).ln(),
        }
    }

    /// Exact integral; `None` for the (irrational) reference function.
    pub fn integral_exact(&self) -> Option<BigRational> {
        match self {
            AuxFunction::Step(s) => Some(s.integral_exact()),
            AuxFunction::Constant(c) => Some(c.exact().clone()),
            AuxFunction::ReferenceTv => None,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let violations = match self {
            AuxFunction::Step(s) => s.violations(),
            AuxFunction::Constant(c) => {
                if c.exact() < &BigRational::zero() || c.exact() > &BigRational::one() {
                    vec![Violation::ValueOutOfRange {
                        index: 0,
                        value: c.to_text(),
                    }]
                } else {
                    Vec::new()
                }
            }
            AuxFunction::ReferenceTv => Vec::new(),
        };
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Step-function view; constants become a single piece.
    pub fn as_step(&self) -> Option<StepFunction> {
        match self {
            AuxFunction::Step(s) => Some(s.clone()),
            AuxFunction::Constant(c) => {
                Some(StepFunction::new_unchecked(Vec::new(), vec![c.clone()]))
            }
            AuxFunction::ReferenceTv => None,
        }
    }

    /// Parses the function-spec JSON. Structural problems are errors;
    /// range and ordering problems are left to [`AuxFunction::validate`].
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Spec("expected a JSON object".into()))?;
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Spec("missing string field `type`".into()))?;
        match kind {
            "step" => {
                let breakpoints = number_list(obj, "breakpoints")?;
                let values = number_list(obj, "values")?;
                Ok(AuxFunction::Step(StepFunction::new_unchecked(
                    breakpoints,
                    values,
                )))
            }
            "constant" => {
                let value = obj
                    .get("value")
                    .ok_or_else(|| Error::Spec("missing field `value`".into()))?;
                Ok(AuxFunction::Constant(json_number(value)?))
            }
            "reference_tv" => Ok(AuxFunction::ReferenceTv),
            other => Err(Error::Spec(format!("unknown function type `{other}`"))),
        }
    }

    /// Function-spec JSON with numbers as decimal (or `p/q`) strings.
    pub fn to_json_value(&self) -> Value {
        let texts = |xs: &[DualNum]| {
            xs.iter()
                .map(|x| Value::String(x.to_text()))
                .collect::<Vec<_>>()
        };
        match self {
            AuxFunction::Step(s) => json!({
                "type": "step",
                "breakpoints": texts(s.breakpoints()),
                "values": texts(s.values()),
            }),
            AuxFunction::Constant(c) => json!({"type": "constant", "value": c.to_text()}),
            AuxFunction::ReferenceTv => json!({"type": "reference_tv"}),
        }
    }
}

impl From<StepFunction> for AuxFunction {
    fn from(s: StepFunction) -> Self {
        AuxFunction::Step(s)
    }
}

fn number_list(obj: &Map<String, Value>, key: &str) -> Result<Vec<DualNum>> {
    obj.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Spec(format!("missing array field `{key}`")))?
        .iter()
        .map(json_number)
        .collect()
}

// With serde_json's arbitrary_precision, a Number displays as its source text.
fn json_number(v: &Value) -> Result<DualNum> {
    match v {
        Value::Number(n) => n.to_string().parse(),
        Value::String(s) => s.parse(),
        other => Err(Error::Spec(format!("expected a number, got {other}"))),
    }
}
