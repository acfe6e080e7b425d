//! Maximises `int_0^1 h` over step functions with given breakpoints,
//! subject to `G(z) <= 0` for every `z`, by cutting planes.
//!
//! For a finite set of cuts the problem is an LP in the piece values
//! `v_i` plus one epigraph variable `t_iz >= max{0, v_i(1+z) - 1}` per
//! piece reaching above `z`:
//!
//! ```text
//! max  sum_i len_i v_i
//! s.t. sum_i above_i(z) t_iz + sum_i below_i(z) (v_i (1 - z) - 1) <= 0
//!      v_i (1 + z) - t_iz <= 1,   0 <= v_i <= 1,   t_iz >= 0
//! ```
//!
//! Each LP solution is rounded to nine decimals and handed to the exact
//! certifier. A violated iterate contributes its worst `z` as a new cut;
//! a feasible one (possibly after shrinking every value by
//! `1 - feasibility_shrink`) ends the loop. Soundness therefore rests on
//! the exact certificate alone, never on the LP.

use num_rational::BigRational;
use num_traits::One;

use crate::condition::{check_feasible_exact, FeasibilityCertificate};
use crate::error::{Error, Result};
use crate::func_model::StepFunction;
use crate::number::{parse_rational, DualNum, Scalar};
use crate::numerics::golden_section_max;
use crate::par::{self, Execution};
use crate::rho::rho_from_integral;
use crate::simplex::LinearProgram;

/// Decimal places kept when turning LP values into rationals.
pub const VALUE_PLACES: u32 = 9;
/// Golden-section steps per breakpoint coordinate in refine mode.
pub const GOLDEN_ITERATIONS: usize = 32;
pub const REFINE_SWEEPS: usize = 3;
// Keeps refined breakpoints strictly ordered.
const BREAKPOINT_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakpointMode {
    Uniform,
    /// Uniform start, then cyclic golden-section search per breakpoint.
    Refine,
}

#[derive(Clone, Debug)]
pub struct OptimizeConfig {
    pub num_pieces: usize,
    pub breakpoint_mode: BreakpointMode,
    pub initial_z_cuts: usize,
    pub max_rounds: usize,
    pub feasibility_shrink: f64,
    pub lp_tolerance: f64,
    pub execution: Execution,
}

impl OptimizeConfig {
    pub fn new(num_pieces: usize, breakpoint_mode: BreakpointMode) -> Self {
        OptimizeConfig {
            num_pieces,
            breakpoint_mode,
            initial_z_cuts: 33,
            max_rounds: 200,
            feasibility_shrink: 1e-9,
            lp_tolerance: 1e-10,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_pieces == 0 {
            return bad("num_pieces must be at least 1".into());
        }
        if self.initial_z_cuts < 2 {
            return bad("initial_z_cuts must be at least 2".into());
        }
        if self.max_rounds == 0 {
            return bad("max_rounds must be at least 1".into());
        }
        if !(self.feasibility_shrink > 0.0 && self.feasibility_shrink < 1.0) {
            return bad(format!(
                "feasibility_shrink {} not in (0, 1)",
                self.feasibility_shrink
            ));
        }
        if !(self.lp_tolerance > 0.0) {
            return bad(format!(
                "lp_tolerance {} must be positive",
                self.lp_tolerance
            ));
        }
        Ok(())
    }
}

/// A cut added during the loop, with the iterate it separated.
#[derive(Clone, Debug)]
pub struct AddedCut {
    pub z: BigRational,
    pub margin: BigRational,
    pub iterate: StepFunction,
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub h: StepFunction,
    pub rho: f64,
    pub integral: BigRational,
    /// Objective of the last LP relaxation (an upper estimate).
    pub lp_objective: f64,
    pub rounds: usize,
    pub cuts_used: Vec<f64>,
    pub added_cuts: Vec<AddedCut>,
    pub certificate: FeasibilityCertificate<BigRational>,
}

/// The exact certificate's worst `z` when `h` violates the condition.
pub fn worst_violation(h: &StepFunction) -> Option<BigRational> {
    check_feasible_exact(h).witness
}

pub fn optimize(cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    cfg.validate()?;
    let uniform = StepFunction::uniform_breakpoints(cfg.num_pieces);
    match cfg.breakpoint_mode {
        BreakpointMode::Uniform => optimize_with_breakpoints(&uniform, cfg),
        BreakpointMode::Refine => refine(uniform, cfg),
    }
}

/// Optimises several piece counts independently.
pub fn optimize_many(
    piece_counts: &[usize],
    cfg: &OptimizeConfig,
    exec: Execution,
) -> Vec<Result<OptimizeResult>> {
    par::map_slice(piece_counts, exec, |&k| {
        let cfg = OptimizeConfig {
            num_pieces: k,
            ..cfg.clone()
        };
        optimize(&cfg)
    })
}

/// The cutting-plane loop on fixed breakpoints.
pub fn optimize_with_breakpoints(
    breakpoints: &[DualNum],
    cfg: &OptimizeConfig,
) -> Result<OptimizeResult> {
    cfg.validate()?;
    let probe = StepFunction::new(
        breakpoints.to_vec(),
        vec![DualNum::zero(); breakpoints.len() + 1],
    )?;
    let spans: Vec<(f64, f64)> = probe
        .pieces()
        .map(|p| (p.lo.value(), p.hi.value()))
        .collect();

    let mut cuts: Vec<f64> = (1..cfg.initial_z_cuts)
        .map(|j| j as f64 / (cfg.initial_z_cuts - 1) as f64)
        .collect();
    let mut added = Vec::new();
    let shrink = BigRational::one() - parse_rational(&format!("{:e}", cfg.feasibility_shrink))?;
    let mut last = probe.clone();

    for round in 1..=cfg.max_rounds {
        let lp = cut_lp(&spans, &cuts);
        let sol = lp.solve_with(cfg.lp_tolerance, cfg.execution)?;
        let values = sol.x[..spans.len()]
            .iter()
            .map(|&v| DualNum::round_decimal(v.clamp(0.0, 1.0), VALUE_PLACES))
            .collect();
        let h = StepFunction::new(breakpoints.to_vec(), values)?;
        let cert = check_feasible_exact(&h);
        let finish = |h: StepFunction, certificate, added: Vec<AddedCut>, cuts: Vec<f64>| {
            let integral = h.integral_exact();
            OptimizeResult {
                rho: rho_from_integral(integral.to_f64()),
                integral,
                lp_objective: sol.objective,
                rounds: round,
                cuts_used: cuts,
                added_cuts: added,
                certificate,
                h,
            }
        };
        if cert.is_feasible() {
            return Ok(finish(h, cert, added, cuts));
        }
        let shrunk = h.scaled(&shrink);
        let shrunk_cert = check_feasible_exact(&shrunk);
        if shrunk_cert.is_feasible() {
            return Ok(finish(shrunk, shrunk_cert, added, cuts));
        }
        let z = cert.worst_z.clone();
        cuts.push(z.to_f64());
        added.push(AddedCut {
            z,
            margin: cert.worst_margin,
            iterate: h.clone(),
        });
        last = h;
    }
    Err(Error::Convergence {
        rounds: cfg.max_rounds,
        last: Box::new(last),
    })
}

fn cut_lp(spans: &[(f64, f64)], cuts: &[f64]) -> LinearProgram {
    let k = spans.len();
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    let mut next_var = k;
    for &z in cuts.iter().filter(|&&z| z > 0.0) {
        let mut main = Vec::with_capacity(2 * k);
        let mut rhs = 0.0;
        for (i, &(l, r)) in spans.iter().enumerate() {
            let below = (r.min(z) - l).max(0.0);
            let above = (r - l.max(z)).max(0.0);
            if below > 0.0 {
                main.push((i, below * (1.0 - z)));
                rhs += below;
            }
            if above > 0.0 {
                let t = next_var;
                next_var += 1;
                main.push((t, above));
                rows.push((vec![(i, 1.0 + z), (t, -1.0)], 1.0));
            }
        }
        rows.push((main, rhs));
    }
    let mut objective = vec![0.0; next_var];
    for (i, &(l, r)) in spans.iter().enumerate() {
        objective[i] = r - l;
    }
    let mut lp = LinearProgram::new(objective);
    for i in 0..k {
        lp.add_le(vec![(i, 1.0)], 1.0);
    }
    for (coeffs, rhs) in rows {
        lp.add_le(coeffs, rhs);
    }
    lp
}

fn refine(start: Vec<DualNum>, cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    let mut best = optimize_with_breakpoints(&start, cfg)?;
    let mut bps: Vec<f64> = start.iter().map(DualNum::value).collect();
    let to_dual = |b: &[f64]| -> Vec<DualNum> {
        b.iter()
            .map(|&v| DualNum::round_decimal(v, VALUE_PLACES))
            .collect()
    };
    for _ in 0..REFINE_SWEEPS {
        for j in 0..bps.len() {
            let lo = if j == 0 { 0.0 } else { bps[j - 1] } + BREAKPOINT_GAP;
            let hi = bps.get(j + 1).copied().unwrap_or(1.0) - BREAKPOINT_GAP;
            if hi <= lo {
                continue;
            }
            let mut local_best: Option<OptimizeResult> = None;
            golden_section_max(
                |t| {
                    let mut trial = bps.clone();
                    trial[j] = t;
                    match optimize_with_breakpoints(&to_dual(&trial), cfg) {
                        Ok(r) => {
                            let value = r.integral.to_f64();
                            if local_best.as_ref().is_none_or(|b| r.integral > b.integral) {
                                local_best = Some(r);
                            }
                            value
                        }
                        Err(_) => f64::NEG_INFINITY,
                    }
                },
                lo,
                hi,
                GOLDEN_ITERATIONS,
            );
            if let Some(r) = local_best {
                if r.integral > best.integral {
                    bps[j] = r.h.breakpoints()[j].value();
                    best = r;
                }
            }
        }
    }
    Ok(best)
}
