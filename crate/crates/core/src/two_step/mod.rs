//! Algebra of two-step functions: `alpha` on `[0, x)`, `beta` on `[x, 1]`.
//!
//! With `0 < 1/alpha - 1 < 1/beta - 1 < x`, the condition integral is a
//! trivially non-positive quadratic on `[0, 1/alpha - 1)` and one of three
//! downward parabolas on each remaining interval. Each parabola is
//! non-positive on all of R iff its discriminant is non-positive:
//!
//! ```text
//! d1 = (x a)^2 + 8 a (x a - x)
//! d2 = (x a + (1 - x) b)^2 + 8 a (x a - 1 + (1 - x) b)
//! d3 = (-x a + (x + 1) b)^2 + 8 b (x a - 1 + (1 - x) b)
//! ```
//!
//! Setting all three to zero gives the best two-step function; `d1 = 0`
//! yields `x = 8 (1/a - 1)` and eliminating further gives
//! `b = (2/3)(-45 + 172 a - 128 a^2)`.

mod closed_form;

pub use closed_form::{closed_form_alpha, closed_form_rho, ClosedFormValue, IMAGINARY_BOUND};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::func_model::StepFunction;
use crate::number::{DualNum, Scalar};

/// Left-hand sides of the three discriminant inequalities.
pub fn discriminants_of<T: Scalar>(alpha: &T, beta: &T, x: &T) -> [T; 3] {
    let one = T::one();
    let eight = T::from_int(8);
    let (a, b, x) = (alpha.clone(), beta.clone(), x.clone());
    let xa = x.clone() * a.clone();
    let tail = (one.clone() - x.clone()) * b.clone();
    let shared = xa.clone() - one.clone() + tail.clone();
    let d1 = xa.clone() * xa.clone() + eight.clone() * a.clone() * (xa.clone() - x.clone());
    let s2 = xa.clone() + tail;
    let d2 = s2.clone() * s2 + eight.clone() * a * shared.clone();
    let s3 = (x + one) * b.clone() - xa;
    let d3 = s3.clone() * s3 + eight * b * shared;
    [d1, d2, d3]
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepParams {
    alpha: DualNum,
    beta: DualNum,
    x: DualNum,
    residuals: [f64; 3],
}

impl TwoStepParams {
    /// Requires `0 < x < 1` and `1/2 < beta < alpha <= 1`.
    pub fn new(alpha: DualNum, beta: DualNum, x: DualNum) -> Result<Self> {
        let half = BigRational::new(1.into(), 2.into());
        let (zero, one) = (BigRational::zero(), BigRational::one());
        if !(x.exact() > &zero && x.exact() < &one) {
            return Err(Error::TwoStep(format!("x = {x} not in (0, 1)")));
        }
        if !(beta.exact() > &half && beta < alpha && alpha.exact() <= &one) {
            return Err(Error::TwoStep(format!(
                "need 1/2 < beta < alpha <= 1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let d = discriminants_of(alpha.exact(), beta.exact(), x.exact());
        let residuals = [d[0].to_f64(), d[1].to_f64(), d[2].to_f64()];
        Ok(TwoStepParams {
            alpha,
            beta,
            x,
            residuals,
        })
    }

    pub fn from_f64(alpha: f64, beta: f64, x: f64) -> Result<Self> {
        let conv = |v: f64| {
            DualNum::from_f64(v).ok_or_else(|| Error::TwoStep(format!("non-finite value {v}")))
        };
        Self::new(conv(alpha)?, conv(beta)?, conv(x)?)
    }

    /// The published decimals `(0.971239, 0.873362, 0.236901)`.
    pub fn published() -> Self {
        let d = |s: &str| s.parse::<DualNum>().expect("constant");
        Self::new(d("0.971239"), d("0.873362"), d("0.236901")).expect("valid")
    }

    pub fn alpha(&self) -> &DualNum {
        &self.alpha
    }

    pub fn beta(&self) -> &DualNum {
        &self.beta
    }

    pub fn x(&self) -> &DualNum {
        &self.x
    }

    /// `d1, d2, d3` rounded to `f64` from their exact values.
    pub fn residuals(&self) -> [f64; 3] {
        self.residuals
    }

    pub fn discriminants(&self) -> [BigRational; 3] {
        discriminants_of(self.alpha.exact(), self.beta.exact(), self.x.exact())
    }

    /// `(1/alpha - 1, 1/beta - 1)`, where the max-terms switch on.
    pub fn case_thresholds(&self) -> (BigRational, BigRational) {
        let one = BigRational::one();
        (
            &one / self.alpha.exact() - &one,
            &one / self.beta.exact() - &one,
        )
    }

    pub fn to_step_function(&self) -> StepFunction {
        StepFunction::two_step(self.alpha.clone(), self.beta.clone(), self.x.clone())
            .expect("two-step invariants imply a valid step function")
    }
}

pub fn discriminants(p: &TwoStepParams) -> [BigRational; 3] {
    p.discriminants()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscriminantVerdict {
    Feasible,
    /// A positive discriminant; the test is sufficient, not necessary.
    NotProven,
}

/// The discriminant test. Needs `1/alpha - 1 < 1/beta - 1 < x` so that the
/// four-interval case split applies.
pub fn check_paper_mode(p: &TwoStepParams) -> Result<DiscriminantVerdict> {
    let (ta, tb) = p.case_thresholds();
    if !(ta < tb && &tb < p.x.exact()) {
        return Err(Error::CaseOrdering(format!(
            "1/alpha - 1 = {}, 1/beta - 1 = {}, x = {}",
            ta.to_f64(),
            tb.to_f64(),
            p.x
        )));
    }
    let zero = BigRational::zero();
    Ok(if p.discriminants().iter().all(|d| d <= &zero) {
        DiscriminantVerdict::Feasible
    } else {
        DiscriminantVerdict::NotProven
    })
}

pub const ALPHA_BRACKET: (f64, f64) = (0.9, 1.0);
const BRACKET_SCAN: usize = 1000;

pub fn x_of_alpha(alpha: f64) -> f64 {
    8.0 * (1.0 / alpha - 1.0)
}

pub fn beta_of_alpha(alpha: f64) -> f64 {
    2.0 / 3.0 * (-45.0 + 172.0 * alpha - 128.0 * alpha * alpha)
}

/// `d3` along the curve where `d1 = 0` and `beta` follows `beta_of_alpha`.
pub fn closing_equation(alpha: f64) -> f64 {
    discriminants_of(&alpha, &beta_of_alpha(alpha), &x_of_alpha(alpha))[2]
}

/// Solves `d1 = d2 = d3 = 0` for the two-step parameters.
///
/// The closing equation has two roots in [`ALPHA_BRACKET`] and is positive
/// at both ends, so the bracket is scanned for sign changes and each is
/// bisected to full double precision. The first root giving admissible
/// parameters (`1/2 < beta < alpha`, case ordering intact) is returned;
/// `d2` is not used in the solve and serves as an independent residual.
pub fn solve_optimum() -> Result<TwoStepParams> {
    let (lo, hi) = ALPHA_BRACKET;
    let grid: Vec<f64> = (0..=BRACKET_SCAN)
        .map(|i| lo + (hi - lo) * i as f64 / BRACKET_SCAN as f64)
        .collect();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (closing_equation(a), closing_equation(b));
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if closing_equation(mid).signum() == fa.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        let alpha = if closing_equation(a).abs() <= closing_equation(b).abs() {
            a
        } else {
            b
        };
        let Ok(p) = TwoStepParams::from_f64(alpha, beta_of_alpha(alpha), x_of_alpha(alpha)) else {
            continue;
        };
        if check_paper_mode(&p).is_ok() {
            return Ok(p);
        }
    }
    Err(Error::NoRoot { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::check_feasible_exact;

    fn q(s: &str) -> BigRational {
        crate::number::parse_rational(s).unwrap()
    }

    #[test]
    fn published_discriminants_are_negative() {
        let d = TwoStepParams::published().discriminants();
        assert!(d[0] <= q("-1.17266e-7") && d[0] > q("-1.5e-7"));
        assert!(d[1] <= q("-3.5346e-6"));
        assert!(d[2] <= q("-3.00596e-6"));
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminants_of(&1.0, &1.0, &0.5);
        assert_eq!(d[0], 0.25);
        for a in [0.6, 0.8, 0.95] {
            let d = discriminants_of(&q(&a.to_string()), &q(&a.to_string()), &q("0.3"));
            assert_eq!(d[1], d[2]);
        }
    }

    #[test]
    fn discriminant_test_verdicts() {
        assert_eq!(
            check_paper_mode(&TwoStepParams::published()).unwrap(),
            DiscriminantVerdict::Feasible
        );
        let p = TwoStepParams::new(
            "0.98".parse().unwrap(),
            "0.873362".parse().unwrap(),
            "0.236901".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(
            check_paper_mode(&p).unwrap(),
            DiscriminantVerdict::NotProven
        );
        // x below 1/beta - 1 breaks the case split.
        let p = TwoStepParams::new(
            "0.97".parse().unwrap(),
            "0.8".parse().unwrap(),
            "0.1".parse().unwrap(),
        )
        .unwrap();
        assert!(matches!(check_paper_mode(&p), Err(Error::CaseOrdering(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(TwoStepParams::from_f64(0.9, 0.95, 0.3).is_err());
        assert!(TwoStepParams::from_f64(0.9, 0.4, 0.3).is_err());
        assert!(TwoStepParams::from_f64(1.1, 0.8, 0.3).is_err());
        assert!(TwoStepParams::from_f64(0.9, 0.8, 1.0).is_err());
    }

    #[test]
    fn optimum_reproduces_published_values() {
        let p = solve_optimum().unwrap();
        assert!((p.alpha().value() - 0.971239).abs() < 1e-4);
        assert!((p.beta().value() - 0.873362).abs() < 1e-4);
        assert!((p.x().value() - 0.236901).abs() < 1e-4);
        for r in p.residuals() {
            assert!(r.abs() <= 1e-12, "{r}");
        }
        assert!((x_of_alpha(0.971239) - 0.23690).abs() < 1e-4);
        assert!((beta_of_alpha(p.alpha().value()) - p.beta().value()).abs() < 1e-10);
        // The solved point sits on the feasibility boundary up to rounding.
        let cert = check_feasible_exact(&p.to_step_function());
        assert!(cert.worst_margin.to_f64() < 1e-12);
    }

    #[test]
    fn closed_form_alpha_agrees_with_bisection() {
        let p = solve_optimum().unwrap();
        let a = closed_form_alpha().unwrap();
        assert!((a.value - p.alpha().value()).abs() < 1e-10);
    }
}
