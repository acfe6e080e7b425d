//! Sample data for redrawing `h` or `G`.

use crate::condition::condition_value;
use crate::error::Result;
use crate::func_model::AuxFunction;
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotTarget {
    /// `(sigma, h(sigma))`
    Function,
    /// `(z, G(z))`
    Condition,
}

/// `samples` uniform points on `[0, 1]`, endpoints included.
pub fn sample(
    h: &AuxFunction,
    target: PlotTarget,
    samples: usize,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    let at = |i: usize| {
        if samples == 1 {
            0.0
        } else {
            i as f64 / (samples - 1) as f64
        }
    };
    par::map_indexed(samples, exec, |i| {
        let s = at(i);
        let y = match target {
            PlotTarget::Function => h.eval(s)?,
            PlotTarget::Condition => condition_value(h, s)?,
        };
        Ok((s, y))
    })
    .into_iter()
    .collect()
}
