//! Execution helpers for the data-parallel sweeps (circle grids, sigma
//! candidates, Marchenko systems). With the `parallel` feature the default
//! mode runs on rayon; the sequential path is always compiled so the two
//! can be benchmarked against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a sweep is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Mode {
    /// Parallel when the feature is enabled, sequential otherwise.
    pub fn auto() -> Mode {
        #[cfg(feature = "parallel")]
        {
            Mode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Mode::Sequential
        }
    }
}

/// Map `f` over `0..n`, collecting results in index order regardless of mode.
pub fn map_indexed<U, F>(mode: Mode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

/// Maximum of `f` over `0..n`; -inf for an empty range. Deterministic in
/// either mode since max is associative and commutative.
pub fn fold_max<F>(mode: Mode, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).fold(f64::NEG_INFINITY, f64::max),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(Mode::auto(), 100, |i| i * i);
        assert_eq!(v[7], 49);
        assert_eq!(v.len(), 100);
    }

    #[test]
    fn fold_max_matches_seq() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let a = fold_max(Mode::Sequential, 1000, f);
        let b = fold_max(Mode::auto(), 1000, f);
        assert_eq!(a, b);
    }
}
