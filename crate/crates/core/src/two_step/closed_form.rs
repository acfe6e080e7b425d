//! Closed forms for the exact two-step optimum, evaluated with 256-bit
//! complex arithmetic.
//!
//! Both expressions are built from the principal cube root of
//! `w = -377 + 18 i sqrt(762)`. They are real numbers written through
//! complex radicals; the imaginary part left after evaluation measures the
//! working precision and must stay below [`IMAGINARY_BOUND`].

use astro_float::{BigFloat, RoundingMode};

use crate::error::{Error, Result};

/// Working precision in bits (about 77 decimal digits).
pub const PRECISION: usize = 256;
pub const IMAGINARY_BOUND: f64 = 1e-30;

const RM: RoundingMode = RoundingMode::ToEven;
const NEWTON_STEPS: usize = 8;

#[derive(Clone, Debug)]
pub struct ClosedFormValue {
    pub value: f64,
    pub imaginary_residue: f64,
    /// Real part printed with the full working precision.
    pub decimal: String,
}

#[derive(Clone, Debug)]
struct Complex {
    re: BigFloat,
    im: BigFloat,
}

fn real(x: i64) -> BigFloat {
    BigFloat::from_i64(x, PRECISION)
}

impl Complex {
    fn new(re: BigFloat, im: BigFloat) -> Self {
        Complex { re, im }
    }

    fn from_ints(re: i64, im: i64) -> Self {
        Complex::new(real(re), real(im))
    }

    fn add(&self, o: &Self) -> Self {
        Complex::new(
            self.re.add(&o.re, PRECISION, RM),
            self.im.add(&o.im, PRECISION, RM),
        )
    }

    fn sub(&self, o: &Self) -> Self {
        Complex::new(
            self.re.sub(&o.re, PRECISION, RM),
            self.im.sub(&o.im, PRECISION, RM),
        )
    }

    fn mul(&self, o: &Self) -> Self {
        let rr = self.re.mul(&o.re, PRECISION, RM);
        let ii = self.im.mul(&o.im, PRECISION, RM);
        let ri = self.re.mul(&o.im, PRECISION, RM);
        let ir = self.im.mul(&o.re, PRECISION, RM);
        Complex::new(rr.sub(&ii, PRECISION, RM), ri.add(&ir, PRECISION, RM))
    }

    fn div(&self, o: &Self) -> Self {
        let den =
            o.re.mul(&o.re, PRECISION, RM)
                .add(&o.im.mul(&o.im, PRECISION, RM), PRECISION, RM);
        let conj = Complex::new(o.re.clone(), o.im.neg());
        let num = self.mul(&conj);
        Complex::new(
            num.re.div(&den, PRECISION, RM),
            num.im.div(&den, PRECISION, RM),
        )
    }

    fn scale(&self, k: &BigFloat) -> Self {
        Complex::new(self.re.mul(k, PRECISION, RM), self.im.mul(k, PRECISION, RM))
    }

    fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// Principal cube root: Newton's iteration from the principal root in
/// double precision, which already lies far inside its basin.
fn principal_cbrt(w: &Complex) -> Complex {
    let (wr, wi) = w.to_f64_pair();
    let r = wr.hypot(wi).cbrt();
    let theta = wi.atan2(wr) / 3.0;
    let mut z = Complex::new(
        BigFloat::from_f64(r * theta.cos(), PRECISION),
        BigFloat::from_f64(r * theta.sin(), PRECISION),
    );
    let two = Complex::from_ints(2, 0);
    let three = Complex::from_ints(3, 0);
    for _ in 0..NEWTON_STEPS {
        // z <- (2 z + w / z^2) / 3
        z = two.mul(&z).add(&w.div(&z.mul(&z))).div(&three);
    }
    z
}

struct Radicals {
    sqrt762: BigFloat,
    /// w^(1/3)
    r1: Complex,
    /// w^(2/3)
    r2: Complex,
}

fn radicals() -> Radicals {
    let sqrt762 = real(762).sqrt(PRECISION, RM);
    let w = Complex::new(real(-377), sqrt762.mul(&real(18), PRECISION, RM));
    let r1 = principal_cbrt(&w);
    let r2 = r1.mul(&r1);
    Radicals { sqrt762, r1, r2 }
}

fn finish(z: Complex) -> Result<ClosedFormValue> {
    let (value, im) = z.to_f64_pair();
    let residue = im.abs();
    if !(residue <= IMAGINARY_BOUND) {
        return Err(Error::Precision {
            residue,
            bound: IMAGINARY_BOUND,
        });
    }
    Ok(ClosedFormValue {
        value,
        imaginary_residue: residue,
        decimal: z.re.to_string(),
    })
}

/// `alpha = (34 + 73 / w^(1/3) + w^(1/3)) / 48`.
pub fn closed_form_alpha() -> Result<ClosedFormValue> {
    let Radicals { r1, .. } = radicals();
    let sum = Complex::from_ints(34, 0)
        .add(&Complex::from_ints(73, 0).div(&r1))
        .add(&r1);
    finish(sum.div(&Complex::from_ints(48, 0)))
}

/// The two-step bound `rho*` as a ratio of complex-radical expressions.
pub fn closed_form_rho() -> Result<ClosedFormValue> {
    let Radicals { sqrt762: s, r1, r2 } = radicals();
    // p + q i sqrt(762) style coefficients: (q sqrt762) + (p) i.
    let coeff = |re_times_sqrt: i64, im: i64| {
        Complex::new(s.mul(&real(re_times_sqrt), PRECISION, RM), real(im))
    };
    let k377 = coeff(18, 377); // 377 i + 18 sqrt(762)

    let numerator = k377
        .scale(&real(-30))
        .add(&r2.mul(&coeff(28, -249)))
        .add(&r1.mul(&coeff(206, -3975)));
    let denominator = r2
        .mul(&coeff(7, -44))
        .sub(&k377.scale(&real(16)))
        .add(&r1.mul(&coeff(47, -1088)))
        .scale(&real(4));
    finish(numerator.div(&denominator))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_is_principal() {
        let w = Complex::from_ints(-8, 0);
        let (re, im) = principal_cbrt(&w).to_f64_pair();
        // Principal cube root of -8 is 2 e^{i pi/3} = 1 + i sqrt(3).
        assert!((re - 1.0).abs() < 1e-15);
        assert!((im - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn alpha_matches_published_decimal() {
        let a = closed_form_alpha().unwrap();
        assert!((a.value - 0.971239).abs() < 5e-7);
        assert!(a.imaginary_residue <= IMAGINARY_BOUND);
        assert!(a.decimal.len() > 50);
    }

    #[test]
    fn rho_in_bracket() {
        let r = closed_form_rho().unwrap();
        assert!(r.value > 1.5272 && r.value < 1.5273, "{}", r.value);
        assert!((r.value - 1.52727).abs() < 2e-5);
        assert!(r.imaginary_residue <= IMAGINARY_BOUND);
    }
}
