//! The ratio bound `rho* = 1 + 1 / (1 + int_0^1 h)` for a feasible `h`.

use num_rational::BigRational;
use num_traits::One;

use crate::condition::{certify_exact, check_feasible_numeric, FeasibilityCertificate, Verdict};
use crate::error::{Error, Result};
use crate::func_model::{AuxFunction, StepFunction};
use crate::number::{format_sig, Scalar};

/// Grid used when the reference function has to be checked numerically.
pub const NUMERIC_GRID: usize = 10_001;
pub const NUMERIC_TOL: f64 = 1e-9;

/// Whether `rho_star` insists on a feasibility certificate first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Feasibility {
    #[default]
    Required,
    /// Exploration only: the bound means nothing for infeasible `h`.
    Skipped,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Exact(FeasibilityCertificate<BigRational>),
    Float(FeasibilityCertificate<f64>),
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Exact(c) => c.verdict,
            Certificate::Float(c) => c.verdict,
        }
    }

    pub fn summary(&self, digits: usize) -> String {
        match self {
            Certificate::Exact(c) => c.summary(digits),
            Certificate::Float(c) => c.summary(digits),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Certificate::Exact(c) => c.to_json(),
            Certificate::Float(c) => c.to_json(),
        }
    }

    fn witness(&self) -> Option<(f64, f64)> {
        match self {
            Certificate::Exact(c) => c
                .witness
                .as_ref()
                .map(|w| (w.to_f64(), c.worst_margin.to_f64())),
            Certificate::Float(c) => c.witness.map(|w| (w, c.worst_margin)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioResult {
    pub rho: f64,
    pub integral_h: f64,
    pub feasibility: Option<Certificate>,
}

impl RatioResult {
    pub fn summary(&self, digits: usize) -> String {
        let cert = self
            .feasibility
            .as_ref()
            .map(|c| c.summary(digits))
            .unwrap_or_else(|| "feasibility not checked".to_string());
        format!(
            "rho* = {} (integral {}); {}",
            format_sig(self.rho, digits),
            format_sig(self.integral_h, digits),
            cert
        )
    }
}

pub fn rho_from_integral(integral: f64) -> f64 {
    1.0 + 1.0 / (1.0 + integral)
}

pub fn rho_from_integral_exact(integral: &BigRational) -> BigRational {
    let one = BigRational::one();
    &one + &one / (&one + integral)
}

/// Exact `rho*` of a step function (no feasibility check).
pub fn rho_star_exact(h: &StepFunction) -> BigRational {
    rho_from_integral_exact(&h.integral_exact())
}

/// Exact certificate for step and constant functions, numeric for the
/// reference function.
pub fn certify(h: &AuxFunction) -> Result<Certificate> {
    match h {
        AuxFunction::ReferenceTv => Ok(Certificate::Float(check_feasible_numeric(
            h,
            NUMERIC_GRID,
            NUMERIC_TOL,
        )?)),
        _ => Ok(Certificate::Exact(certify_exact(h)?)),
    }
}

pub fn rho_star(h: &AuxFunction, feasibility: Feasibility) -> Result<RatioResult> {
    if let Err(v) = h.validate() {
        return Err(Error::Invalid(v));
    }
    let integral_h = match h.integral_exact() {
        Some(i) => i.to_f64(),
        None => h.integral(),
    };
    let certificate = match feasibility {
        Feasibility::Required => {
            let cert = certify(h)?;
            if let Some((z, margin)) = cert.witness() {
                return Err(Error::BoundNotEstablished { z, margin });
            }
            Some(cert)
        }
        Feasibility::Skipped => None,
    };
    Ok(RatioResult {
        rho: rho_from_integral(integral_h),
        integral_h,
        feasibility: certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::DualNum;

    #[test]
    fn published_and_reference_bounds() {
        let p = rho_star(&AuxFunction::published(), Feasibility::Required).unwrap();
        assert!(p.rho < 1.5273 && (p.rho - 1.527274).abs() < 1e-5);
        let tv = rho_star(&AuxFunction::ReferenceTv, Feasibility::Required).unwrap();
        assert!(tv.rho > 1.5283 && (tv.rho - 1.528380).abs() < 1e-5);
        assert!(matches!(tv.feasibility, Some(Certificate::Float(_))));
    }

    #[test]
    fn constants() {
        let zero = rho_star(
            &AuxFunction::Constant(DualNum::zero()),
            Feasibility::Required,
        )
        .unwrap();
        assert_eq!(zero.rho, 2.0);
        let best = AuxFunction::Constant(DualNum::from_integers(8, 9));
        let r = rho_star(&best, Feasibility::Required).unwrap();
        assert!((r.rho - (1.0 + 9.0 / 17.0)).abs() < 1e-15);
        assert_eq!(
            rho_star_exact(&best.as_step().unwrap()),
            BigRational::new(26.into(), 17.into())
        );
    }

    #[test]
    fn infeasible_bound_carries_witness() {
        let one = AuxFunction::Constant(DualNum::one());
        match rho_star(&one, Feasibility::Required) {
            Err(Error::BoundNotEstablished { z, margin }) => {
                assert_eq!(z, 0.25);
                assert_eq!(margin, 0.125);
            }
            other => panic!("{other:?}"),
        }
        let r = rho_star(&one, Feasibility::Skipped).unwrap();
        assert_eq!(r.rho, 1.5);
        assert!(r.feasibility.is_none());
    }

    #[test]
    fn ordering_follows_integrals() {
        let rho = |h: AuxFunction| rho_star(&h, Feasibility::Required).unwrap().rho;
        let published = rho(AuxFunction::published());
        let tv = rho(AuxFunction::ReferenceTv);
        let c = rho(AuxFunction::Constant(DualNum::from_integers(8, 9)));
        assert!(published < tv && tv < c);
    }
}
