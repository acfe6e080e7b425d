#![allow(dead_code)]

use auxcert::{DualNum, StepFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// Cells per unit for the midpoint Riemann sums.
pub const CELLS: i64 = 1_000_000;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

pub fn micro(units: i64) -> DualNum {
    DualNum::from_ratio(q(units, CELLS))
}

/// A step function with breakpoints and values on the 1e-6 grid.
#[derive(Clone, Debug)]
pub struct GridStep {
    /// Breakpoints in units of 1e-6.
    pub cuts: Vec<i64>,
    /// Values in units of 1e-6.
    pub levels: Vec<i64>,
}

impl GridStep {
    pub fn to_step(&self) -> StepFunction {
        StepFunction::new(
            self.cuts.iter().map(|&c| micro(c)).collect(),
            self.levels.iter().map(|&v| micro(v)).collect(),
        )
        .expect("grid step is valid")
    }
}

pub fn random_grid_step<R: Rng>(rng: &mut R, max_pieces: usize, lo: i64, hi: i64) -> GridStep {
    let k = rng.gen_range(1..=max_pieces);
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < k - 1 {
        let c = rng.gen_range(1..CELLS);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let levels = (0..k).map(|_| rng.gen_range(lo..=hi)).collect();
    GridStep { cuts, levels }
}

/// Midpoint sum of the condition integrand over 1e-6 cells, walked left to
/// right. `z` is on the grid, so no cell straddles `z` or a breakpoint and
/// the integrand is constant on each cell.
pub fn riemann_condition(h: &GridStep, z_units: i64) -> f64 {
    let z = z_units as f64 / CELLS as f64;
    let width = 1.0 / CELLS as f64;
    let mut piece = 0;
    let mut total = 0.0;
    for cell in 0..CELLS {
        while piece < h.cuts.len() && cell >= h.cuts[piece] {
            piece += 1;
        }
        let v = h.levels[piece] as f64 / CELLS as f64;
        let integrand = if cell < z_units {
            v * (1.0 - z) - 1.0
        } else {
            (v * (1.0 + z) - 1.0).max(0.0)
        };
        total += integrand * width;
    }
    total
}

/// `ln(5/4) = 2 atanh(1/9)` summed in rationals.
pub fn ln_five_quarters(terms: u32) -> BigRational {
    let ninth = q(1, 9);
    let ninth_sq = &ninth * &ninth;
    let mut power = ninth;
    let mut sum = BigRational::zero();
    for k in 0..terms {
        sum += &power / BigRational::from_integer(BigInt::from(2 * k + 1));
        power = &power * &ninth_sq;
    }
    sum * BigRational::from_integer(BigInt::from(2))
}

pub fn rho_of(integral: &BigRational) -> BigRational {
    let one = BigRational::one();
    &one + &one / (&one + integral)
}

/// The three discriminants written out term by term, independent of the
/// library's factored form.
pub fn discriminants_expanded(
    a: &BigRational,
    b: &BigRational,
    x: &BigRational,
) -> [BigRational; 3] {
    let one = BigRational::one();
    // G on [1/a - 1, 1/b - 1): x a - x + x a z - 2 a z^2
    let d1 = {
        let (qa, qb, qc) = (-BigRational::from_integer(2.into()) * a, x * a, x * a - x);
        &qb * &qb - BigRational::from_integer(4.into()) * &qa * &qc
    };
    // On [1/b - 1, x): c2 = x a - 1 + (1 - x) b, linear x a + (1 - x) b.
    let c = x * a - &one + (&one - x) * b;
    let d2 = {
        let lin = x * a + (&one - x) * b;
        let qa = -BigRational::from_integer(2.into()) * a;
        &lin * &lin - BigRational::from_integer(4.into()) * &qa * &c
    };
    // On [x, 1]: linear -x a + (x + 1) b, leading -2 b.
    let d3 = {
        let lin = -(x * a) + (x + &one) * b;
        let qa = -BigRational::from_integer(2.into()) * b;
        &lin * &lin - BigRational::from_integer(4.into()) * &qa * &c
    };
    [d1, d2, d3]
}
