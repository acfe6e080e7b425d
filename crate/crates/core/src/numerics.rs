//! One-dimensional numerical kernels: adaptive Simpson quadrature and
//! golden-section search.

/// Result of [`adaptive_simpson`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
    /// `false` when the interval cap stopped refinement early.
    pub converged: bool,
}

pub const MAX_SIMPSON_INTERVALS: usize = 1 << 20;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`, with at most
/// `max_intervals` accepted or pending panels. Kinks in the integrand are
/// isolated by local subdivision.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Quadrature {
    if b <= a {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol,
    }];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut intervals = 1usize;
    let mut converged = true;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let tiny = m <= p.a || m >= p.b;
        if delta.abs() <= 15.0 * p.tol || tiny || intervals >= max_intervals {
            if !(delta.abs() <= 15.0 * p.tol) {
                converged = false;
            }
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            continue;
        }
        intervals += 1;
        let half = 0.5 * p.tol;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: half,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: half,
        });
    }
    Quadrature {
        value,
        error_estimate: error,
        intervals,
        converged,
    }
}

pub const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Runs exactly `iterations` shrink steps and returns the best point seen
/// (ties go to the smaller abscissa).
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    iterations: usize,
) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fd > fc { (d, fd) } else { (c, fc) };
    for _ in 0..iterations {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.1 || (fc == best.1 && c < best.0) {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.1 || (fd == best.1 && d < best.0) {
                best = (d, fd);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_smooth_integrand() {
        let q = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12, MAX_SIMPSON_INTERVALS);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn simpson_isolates_kink() {
        // |x - 1/3| has a kink off the dyadic grid.
        let q = adaptive_simpson(
            |x: f64| (x - 1.0 / 3.0).abs(),
            0.0,
            1.0,
            1e-10,
            MAX_SIMPSON_INTERVALS,
        );
        let exact = (1.0 / 3.0f64).powi(2) / 2.0 + (2.0 / 3.0f64).powi(2) / 2.0;
        assert!((q.value - exact).abs() < 1e-10, "{}", q.value - exact);
    }

    #[test]
    fn simpson_respects_cap() {
        let q = adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, 1e-300, 64);
        assert!(!q.converged);
        assert!(q.intervals <= 64);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn simpson_empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-9, 10).value, 0.0);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|z| z - 2.0 * z * z, 0.0, 1.0, 60);
        assert!((x - 0.25).abs() < 1e-7);
        assert!((fx - 0.125).abs() < 1e-14);
    }
}
