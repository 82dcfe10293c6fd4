//! Reference measures, Kolmogorov-Smirnov distances, exact predicted sign
//! densities, fixed-prime statistics, oscillation certificates and the
//! half-integral ratio experiment.

mod density;
mod intervals;
mod measures;
mod predict;

pub use density::{
    conjecture_ratio, empirical_density_primes, empirical_density_tp2, family_half_plane_sign,
    fixed_prime_density, fixed_prime_scan, half_plane_sign, oscillation_certificate,
    sign_re_rotated, ConjecturePart, DensityEstimate, FixedAngle, HalfPlaneQuery,
    OscillationCertificate, OscillationVerdict, PrimeSignClass,
};
pub use intervals::{measure_of_union, sign_interval_union, IntervalUnion, ThetaMeasure};
pub use measures::{
    cm_cdf, ks_statistic, quantile, st_cdf, CmMeasure, ReferenceMeasure, SatoTate, UniformMeasure,
};
pub use predict::{
    lemma3_predicted, predicted_density_thm1, predicted_density_thm1_order,
    predicted_density_thm3_order, rational_case_prediction, t_epsilon, CmCase, PredictedDensity,
    RationalCasePrediction,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EquidistError {
    #[error("value {0} outside the domain [-1, 1]")]
    OutOfDomain(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("interval union must be sorted, disjoint open intervals in [0, pi]")]
    BadIntervalUnion,
    #[error("nu = {0} is not supported; the predictors require odd nu")]
    EvenNu(u32),
    #[error("exact predictors require phi to be a rational multiple of pi")]
    RealPhiUnsupported,
    #[error("theta/2pi = {n}/{m} must be a reduced fraction in (0, 1/2)")]
    BadRationalAngle { n: u64, m: u64 },
    #[error("class index j = {j} must satisfy 1 <= j <= r_eps = {r_eps}")]
    BadClassIndex { j: u64, r_eps: u64 },
    #[error("coefficient data does not cover prime {missing_prime}")]
    InsufficientData { missing_prime: u64 },
    #[error("prime {0} has a boundary angle; fixed-prime statistics are undefined there")]
    BoundaryAngle(u64),
    #[error(transparent)]
    Hecke(#[from] crate::hecke::HeckeError),
    #[error(transparent)]
    Shimura(#[from] crate::shimura::ShimuraError),
}
