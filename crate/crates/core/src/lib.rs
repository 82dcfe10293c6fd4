//! Exact coefficient families of integral-weight newforms and their
//! half-integral-weight companions, together with the statistics used to
//! test oscillation and sign-equidistribution predictions against exact
//! target densities and reference measures.
//!
//! The crate is organised around the pipeline
//!
//! * [`qseries`] — exact integer q-expansions of eta products, the
//!   brute-force oracle producing genuine newform coefficients,
//! * [`characters`] — Dirichlet characters with root-of-unity values kept
//!   as reduced rational turns,
//! * [`hecke`] — prime-power coefficient recurrences, angle extraction and
//!   the CM vanishing detector,
//! * [`shimura`] — half-integral coefficient families `a(t n^2)` driven by
//!   an integral-weight lift,
//! * [`equidist`] — reference measures, Kolmogorov-Smirnov distances, exact
//!   predicted sign densities and the empirical density scans,
//! * [`io`] — coefficient files and reproducible experiment reports.

pub mod characters;
pub mod equidist;
pub mod hecke;
pub mod io;
pub mod phase;
pub mod primes;
pub mod qseries;
pub mod shimura;

/// Tolerance used for every floating-point zero/boundary classification.
///
/// Exact data never consults it; it only guards decisions taken on ingested
/// decimal data and on transcendental angle values.
pub const FLOAT_TOL: f64 = 1e-9;

/// Internal helper: map `f(i)` over `0..len` into a `Vec`, in parallel when
/// the `parallel` feature is enabled. Output is positional, so results are
/// identical for every thread count.
pub(crate) fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}
