//! Data-parallel helpers. With the `parallel` feature the work is spread
//! over rayon's pool; without it every call runs sequentially.

/// How a batch of independent evaluations is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without `parallel`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..n).map(f).collect()`, in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// `items.iter().map(f).collect()`, in input order.
pub fn map_slice<S, T, F>(items: &[S], exec: Execution, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Index and value of the largest `f(i)` for `i` in `range`; ties go to
/// the smaller index, so the result does not depend on scheduling.
pub fn argmax<F>(range: std::ops::Range<usize>, exec: Execution, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(|i| (i, f(i))).reduce_with(better)
        }
        _ => range.map(|i| (i, f(i))).reduce(better),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_by_index() {
        let vals = [0.0, 3.0, 1.0, 3.0, 2.0];
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(argmax(0..vals.len(), exec, |i| vals[i]), Some((1, 3.0)));
            assert_eq!(argmax(0..0, exec, |i| vals[i]), None);
        }
    }

    #[test]
    fn maps_preserve_order() {
        let a = map_indexed(1000, Execution::Parallel, |i| i * i);
        let b = map_indexed(1000, Execution::Sequential, |i| i * i);
        assert_eq!(a, b);
        let xs: Vec<u32> = (0..100).collect();
        assert_eq!(map_slice(&xs, Execution::Parallel, |x| x + 1)[99], 100);
    }
}
