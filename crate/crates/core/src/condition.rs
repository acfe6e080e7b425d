//! The condition integral
//!
//! ```text
//! G(z) = int_z^1 max{0, h(s)(1+z) - 1} ds + int_0^z (h(s)(1-z) - 1) ds
//! ```
//!
//! and the decision "G(z) <= 0 for all z in [0, 1]".
//!
//! For a step function every summand is a product of two affine functions
//! of `z` once we know, for each piece, whether it lies below `z`, above
//! `z`, or straddles it, and whether its max-term is active. Those facts
//! only change at the step breakpoints and at the activation thresholds
//! `1/v - 1`, so `G` is a quadratic on each interval between them. The
//! exact certificate maximises each quadratic over its interval in
//! rational arithmetic.
//!
//! `G(0) = 0` for every `h <= 1`, so `z = 0` is never reported as a worst
//! point; the certified margin is the maximum over candidate extremisers
//! in `(0, 1]` (interval endpoints and interior vertices).

use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::func_model::{AuxFunction, StepFunction};
use crate::number::{format_sig, Mode, Scalar};
use crate::numerics::{adaptive_simpson, golden_section_max, MAX_SIMPSON_INTERVALS};
use crate::par::{self, Execution};

/// Absolute tolerance of the reference-function quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Golden-section steps spent refining the best grid point.
pub const REFINE_ITERATIONS: usize = 60;

/// `G(z) = a z^2 + b z + c` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPiece<T> {
    pub lo: T,
    pub hi: T,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> QuadraticPiece<T> {
    pub fn eval(&self, z: &T) -> T {
        (self.a.clone() * z.clone() + self.b.clone()) * z.clone() + self.c.clone()
    }

    /// The vertex when the parabola opens downwards and the vertex lies
    /// strictly inside the interval.
    pub fn interior_vertex(&self) -> Option<T> {
        if self.a >= T::zero() {
            return None;
        }
        let v = -self.b.clone() / (T::from_int(2) * self.a.clone());
        (v > self.lo && v < self.hi).then_some(v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lo": self.lo.to_json(),
            "hi": self.hi.to_json(),
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        })
    }
}

/// Outcome of a feasibility check, in float or exact arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityCertificate<T> {
    pub verdict: Verdict,
    pub mode: Mode,
    pub pieces: Vec<QuadraticPiece<T>>,
    pub worst_z: T,
    /// Largest `G` found over `(0, 1]`; `<= 0` iff feasible.
    pub worst_margin: T,
    /// A point with `G > 0`, present iff infeasible.
    pub witness: Option<T>,
}

impl<T: Scalar> FeasibilityCertificate<T> {
    fn from_worst(pieces: Vec<QuadraticPiece<T>>, worst_z: T, worst_margin: T) -> Self {
        let feasible = worst_margin <= T::zero();
        FeasibilityCertificate {
            verdict: if feasible {
                Verdict::Feasible
            } else {
                Verdict::Infeasible
            },
            mode: T::MODE,
            witness: (!feasible).then(|| worst_z.clone()),
            pieces,
            worst_z,
            worst_margin,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_string(),
            "mode": self.mode,
            "worst_z": self.worst_z.to_json(),
            "worst_margin": self.worst_margin.to_json(),
            "witness": self.witness.as_ref().map(Scalar::to_json),
            "pieces": self.pieces.iter().map(QuadraticPiece::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn summary(&self, digits: usize) -> String {
        format!(
            "{} ({}): max G = {} at z = {}",
            self.verdict,
            self.mode,
            format_sig(self.worst_margin.to_f64(), digits),
            format_sig(self.worst_z.to_f64(), digits)
        )
    }
}

/// `G(z)` for any supported `h`.
///
/// Closed form for step and constant functions; adaptive Simpson
/// (absolute tolerance [`QUADRATURE_TOL`]) for the reference function.
pub fn condition_value(h: &AuxFunction, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain {
            what: "z",
            value: z,
        });
    }
    Ok(match h {
        AuxFunction::Step(s) => step_condition_value(s, &z),
        AuxFunction::Constant(c) => constant_condition_value(c.value(), z),
        AuxFunction::ReferenceTv => reference_condition_value(z),
    })
}

fn constant_condition_value(c: f64, z: f64) -> f64 {
    let above = (c * (1.0 + z) - 1.0).max(0.0);
    (1.0 - z) * above + z * (c * (1.0 - z) - 1.0)
}

/// Closed-form `G(z)` of a step function, summed piece by piece.
pub fn step_condition_value<T: Scalar>(h: &StepFunction, z: &T) -> T {
    let one = T::one();
    let zero = T::zero();
    let mut total = T::zero();
    for p in h.pieces() {
        let (lo, hi, v) = (
            T::from_dual(p.lo),
            T::from_dual(p.hi),
            T::from_dual(p.value),
        );
        let start = if *z > lo { z.clone() } else { lo.clone() };
        let above = if hi > start {
            hi.clone() - start
        } else {
            zero.clone()
        };
        let end = if *z < hi { z.clone() } else { hi.clone() };
        let below = if end > lo { end - lo } else { zero.clone() };
        let active = v.clone() * (one.clone() + z.clone()) - one.clone();
        if active > zero && above > zero {
            total = total + above * active;
        }
        if below > zero {
            total = total + below * (v * (one.clone() - z.clone()) - one.clone());
        }
    }
    total
}

pub fn condition_value_exact(h: &StepFunction, z: &BigRational) -> BigRational {
    step_condition_value(h, z)
}

fn reference_condition_value(z: f64) -> f64 {
    let h = |s: f64| 4.0 / (4.0 + s);
    let upper = adaptive_simpson(
        |s| (h(s) * (1.0 + z) - 1.0).max(0.0),
        z,
        1.0,
        0.5 * QUADRATURE_TOL,
        MAX_SIMPSON_INTERVALS,
    );
    let lower = adaptive_simpson(
        |s| h(s) * (1.0 - z) - 1.0,
        0.0,
        z,
        0.5 * QUADRATURE_TOL,
        MAX_SIMPSON_INTERVALS,
    );
    upper.value + lower.value
}

/// The `z` above which a piece with value `v` has an active max-term,
/// when that switch happens strictly inside `(0, 1)`.
pub fn activation_threshold<T: Scalar>(v: &T) -> Option<T> {
    if *v <= T::half() || *v >= T::one() {
        return None;
    }
    Some(T::one() / v.clone() - T::one())
}

/// Splits `[0, 1]` into intervals on which `G` is one quadratic.
pub fn decompose<T: Scalar>(h: &StepFunction) -> Vec<QuadraticPiece<T>> {
    let mut cuts: Vec<T> = vec![T::zero(), T::one()];
    cuts.extend(h.breakpoints().iter().map(T::from_dual));
    cuts.extend(
        h.values()
            .iter()
            .filter_map(|v| activation_threshold(&T::from_dual(v))),
    );
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    cuts.dedup();

    let pieces: Vec<(T, T, T)> = h
        .pieces()
        .map(|p| {
            (
                T::from_dual(p.lo),
                T::from_dual(p.hi),
                T::from_dual(p.value),
            )
        })
        .collect();

    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].clone(), w[1].clone());
            let mid = (lo.clone() + hi.clone()) * T::half();
            let (a, b, c) = quadratic_on(&pieces, &mid);
            QuadraticPiece { lo, hi, a, b, c }
        })
        .collect()
}

// Coefficients of G on the interval containing `mid`.
fn quadratic_on<T: Scalar>(pieces: &[(T, T, T)], mid: &T) -> (T, T, T) {
    let one = T::one();
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for (l, r, v) in pieces {
        let active = v.clone() * (one.clone() + mid.clone()) > one;
        let vm1 = v.clone() - one.clone();
        if *r <= *mid {
            // Entirely below z: len * (v(1 - z) - 1).
            let len = r.clone() - l.clone();
            c = c + len.clone() * vm1;
            b = b - len * v.clone();
        } else if *l >= *mid {
            // Entirely above z: len * max{0, v(1 + z) - 1}.
            if active {
                let len = r.clone() - l.clone();
                c = c + len.clone() * vm1;
                b = b + len * v.clone();
            }
        } else {
            // Straddles z: (r - z)(v - 1 + v z) + (z - l)(v - 1 - v z).
            if active {
                a = a - v.clone();
                b = b + r.clone() * v.clone() - vm1.clone();
                c = c + r.clone() * vm1.clone();
            }
            a = a - v.clone();
            b = b + vm1.clone() + l.clone() * v.clone();
            c = c - l.clone() * vm1;
        }
    }
    (a, b, c)
}

/// Maximises each quadratic over its interval and collects the worst point.
pub fn certify_pieces<T: Scalar>(pieces: Vec<QuadraticPiece<T>>) -> FeasibilityCertificate<T> {
    let mut worst: Option<(T, T)> = None;
    let mut consider = |z: T, g: T| match &worst {
        Some((_, best)) if g <= *best => {}
        _ => worst = Some((z, g)),
    };
    for p in &pieces {
        if p.lo > T::zero() {
            consider(p.lo.clone(), p.eval(&p.lo));
        }
        if let Some(v) = p.interior_vertex() {
            let g = p.eval(&v);
            consider(v, g);
        }
        consider(p.hi.clone(), p.eval(&p.hi));
    }
    let (worst_z, worst_margin) = worst.expect("decomposition covers [0, 1]");
    FeasibilityCertificate::from_worst(pieces, worst_z, worst_margin)
}

/// Exact decision of the condition for a step function.
pub fn check_feasible_exact(h: &StepFunction) -> FeasibilityCertificate<BigRational> {
    certify_pieces(decompose::<BigRational>(h))
}

/// [`check_feasible_exact`] for any function with rational data.
pub fn certify_exact(h: &AuxFunction) -> Result<FeasibilityCertificate<BigRational>> {
    h.as_step()
        .map(|s| check_feasible_exact(&s))
        .ok_or(Error::Mode("reference_tv"))
}

pub fn certify_batch(
    hs: &[StepFunction],
    exec: Execution,
) -> Vec<FeasibilityCertificate<BigRational>> {
    par::map_slice(hs, exec, check_feasible_exact)
}

pub fn check_feasible_numeric(
    h: &AuxFunction,
    grid_size: usize,
    tol: f64,
) -> Result<FeasibilityCertificate<f64>> {
    check_feasible_numeric_with(h, grid_size, tol, Execution::default())
}

/// Grid scan of `G` plus golden-section refinement around the best grid
/// point; feasible iff the refined maximum is at most `tol`.
pub fn check_feasible_numeric_with(
    h: &AuxFunction,
    grid_size: usize,
    tol: f64,
    exec: Execution,
) -> Result<FeasibilityCertificate<f64>> {
    if grid_size < 2 {
        return Err(Error::Config(format!("grid size {grid_size} < 2")));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    let step = h.as_step();
    let g = |z: f64| match &step {
        Some(s) => step_condition_value(s, &z),
        None => reference_condition_value(z),
    };
    let last = grid_size - 1;
    let at = |j: usize| j as f64 / last as f64;
    let (j, grid_max) = par::argmax(1..grid_size, exec, |j| g(at(j))).expect("non-empty grid");
    let (z, refined) = golden_section_max(g, at(j - 1), at((j + 1).min(last)), REFINE_ITERATIONS);
    let (worst_z, worst_margin) = if refined > grid_max {
        (z, refined)
    } else {
        (at(j), grid_max)
    };
    let pieces = step.as_ref().map(decompose::<f64>).unwrap_or_default();
    let mut cert = FeasibilityCertificate::from_worst(pieces, worst_z, worst_margin);
    cert.verdict = if worst_margin <= tol {
        Verdict::Feasible
    } else {
        Verdict::Infeasible
    };
    cert.witness = (cert.verdict == Verdict::Infeasible).then_some(worst_z);
    Ok(cert)
}

/// The decomposition interval holding `z` (the left one at a shared endpoint).
pub fn piece_containing<'a, T: Scalar>(
    pieces: &'a [QuadraticPiece<T>],
    z: &T,
) -> Option<&'a QuadraticPiece<T>> {
    pieces.iter().find(|p| p.lo <= *z && *z <= p.hi)
}

/// `G` evaluated through the decomposition, for callers that already hold it.
pub fn eval_decomposed<T: Scalar>(pieces: &[QuadraticPiece<T>], z: &T) -> Option<T> {
    piece_containing(pieces, z).map(|p| p.eval(z))
}

/// The best constant function: `c (1 + z - 2 z^2) - 1` peaks at `z = 1/4`
/// with value `9c/8 - 1`, so `c = 8/9` is the largest feasible constant.
pub fn best_constant() -> BigRational {
    BigRational::new(8.into(), 9.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::DualNum;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn constant_step(n: i64, d: i64) -> StepFunction {
        StepFunction::constant(DualNum::from_integers(n, d)).unwrap()
    }

    #[test]
    fn boundary_values() {
        for h in [AuxFunction::published(), AuxFunction::ReferenceTv] {
            assert_eq!(condition_value(&h, 0.0).unwrap(), 0.0);
            assert!((condition_value(&h, 1.0).unwrap() + 1.0).abs() < 1e-12);
        }
        assert!(condition_value(&AuxFunction::published(), 1.01).is_err());
    }

    #[test]
    fn constant_one_at_quarter() {
        let h = AuxFunction::Constant("1".parse().unwrap());
        assert!((condition_value(&h, 0.25).unwrap() - 0.125).abs() < 1e-15);
        let s = constant_step(1, 1);
        assert_eq!(condition_value_exact(&s, &q(1, 4)), q(1, 8));
    }

    #[test]
    fn published_h_second_case_formula() {
        let (a, x) = (0.971239, 0.236901);
        let z = 0.1;
        let expected = x * a - x + x * a * z - 2.0 * a * z * z;
        let got = condition_value(&AuxFunction::published(), z).unwrap();
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn published_decomposition_has_four_pieces() {
        let pieces = decompose::<BigRational>(&StepFunction::published());
        assert_eq!(pieces.len(), 4);
        let alpha = q(971239, 1_000_000);
        let beta = q(873362, 1_000_000);
        let x = q(236901, 1_000_000);
        let one = BigRational::one();
        assert_eq!(pieces[1].lo, &one / &alpha - &one);
        assert_eq!(pieces[2].lo, &one / &beta - &one);
        assert_eq!(pieces[3].lo, x);
        // Case 1: z((1 - z) alpha - 1).
        assert_eq!(pieces[0].a, -alpha.clone());
        assert_eq!(pieces[0].b, &alpha - &one);
        assert!(pieces[0].c.is_zero());
    }

    #[test]
    fn decomposition_of_constant_eight_ninths() {
        let pieces = decompose::<BigRational>(&constant_step(8, 9));
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[1].lo, q(1, 8));
        // c(1 + z - 2z^2) - 1 with c = 8/9.
        assert_eq!(pieces[1].a, q(-16, 9));
        assert_eq!(pieces[1].b, q(8, 9));
        assert_eq!(pieces[1].c, q(-1, 9));
    }

    #[test]
    fn low_values_contribute_no_threshold() {
        let h = StepFunction::new(
            vec!["0.5".parse().unwrap()],
            vec!["0.4".parse().unwrap(), "0.5".parse().unwrap()],
        )
        .unwrap();
        let pieces = decompose::<BigRational>(&h);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].hi, q(1, 2));
    }

    #[test]
    fn exact_verdicts() {
        let published = check_feasible_exact(&StepFunction::published());
        assert!(published.is_feasible());
        assert!(published.worst_margin < BigRational::zero());
        assert!(published.witness.is_none());

        let one = check_feasible_exact(&constant_step(1, 1));
        assert_eq!(one.verdict, Verdict::Infeasible);
        assert_eq!(one.witness, Some(q(1, 4)));
        assert_eq!(one.worst_margin, q(1, 8));

        let best = check_feasible_exact(&constant_step(8, 9));
        assert!(best.is_feasible());
        assert!(best.worst_margin.is_zero());
        assert_eq!(best.worst_z, q(1, 4));

        let zero = check_feasible_exact(&constant_step(0, 1));
        assert!(zero.is_feasible());
    }

    #[test]
    fn exact_mode_rejects_reference() {
        assert!(matches!(
            certify_exact(&AuxFunction::ReferenceTv),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn numeric_verdicts() {
        let tv = check_feasible_numeric(&AuxFunction::ReferenceTv, 10001, 1e-9).unwrap();
        assert!(tv.is_feasible(), "{}", tv.summary(12));

        let published = check_feasible_numeric(&AuxFunction::published(), 10001, 1e-9).unwrap();
        let exact = check_feasible_exact(&StepFunction::published());
        assert!(published.is_feasible());
        assert!((published.worst_z - exact.worst_z.to_f64()).abs() < 1e-3);

        let c = AuxFunction::Constant("0.9".parse().unwrap());
        let cert = check_feasible_numeric(&c, 10001, 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Infeasible);
        assert!((cert.worst_margin - 0.0125).abs() < 1e-12);
        let w = cert.witness.unwrap();
        assert!(condition_value(&c, w).unwrap() > 0.0);

        assert!(check_feasible_numeric(&c, 1, 1e-9).is_err());
        assert!(check_feasible_numeric(&c, 10, 0.0).is_err());
    }

    #[test]
    fn reference_quadrature_matches_closed_form() {
        // int 4/(4+s) ds = 4 ln(4+s); the max-term is active for s < 4z.
        let closed = |z: f64| {
            let m = (4.0 * z).min(1.0);
            let upper = if m > z {
                (1.0 + z) * 4.0 * ((4.0 + m) / (4.0 + z)).ln() - (m - z)
            } else {
                0.0
            };
            upper + (1.0 - z) * 4.0 * ((4.0 + z) / 4.0).ln() - z
        };
        for i in 0..=200 {
            let z = i as f64 / 200.0;
            let g = condition_value(&AuxFunction::ReferenceTv, z).unwrap();
            assert!((g - closed(z)).abs() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn float_and_exact_decompositions_agree() {
        let h = StepFunction::published();
        let f = decompose::<f64>(&h);
        let e = decompose::<BigRational>(&h);
        assert_eq!(f.len(), e.len());
        for (pf, pe) in f.iter().zip(&e) {
            assert!((pf.a - pe.a.to_f64()).abs() < 1e-12);
            assert!((pf.b - pe.b.to_f64()).abs() < 1e-12);
            assert!((pf.c - pe.c.to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_json_shape() {
        let cert = check_feasible_exact(&constant_step(1, 1));
        let v = cert.to_json();
        assert_eq!(v["verdict"], "infeasible");
        assert_eq!(v["mode"], "exact");
        assert_eq!(v["worst_z"]["num"], "1");
        assert_eq!(v["worst_z"]["den"], "4");
        let f = check_feasible_numeric(&AuxFunction::published(), 101, 1e-9).unwrap();
        let v = f.to_json();
        assert_eq!(v["mode"], "float");
        assert!(v["worst_margin"].as_str().unwrap().len() >= 12);
    }
}
