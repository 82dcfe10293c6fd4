//! Reference measures on [−1, 1] and the atom-aware Kolmogorov-Smirnov
//! distance.

use super::EquidistError;

/// CDF of the Sato-Tate (semicircle) measure (2/π)√(1−t²)dt on [−1, 1]:
/// F(x) = 1/2 + (x√(1−x²) + arcsin x)/π.
pub fn st_cdf(x: f64) -> Result<f64, EquidistError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(EquidistError::OutOfDomain(x));
    }
    Ok(0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI)
}

/// CDF of the CM measure (1/2π)·dt/√(1−t²) + ½δ₀ on [−1, 1], right
/// continuous with a jump of exactly ½ at 0:
/// F(x) = (arcsin x + π/2)/(2π) + ½·[x ≥ 0].
pub fn cm_cdf(x: f64) -> Result<f64, EquidistError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(EquidistError::OutOfDomain(x));
    }
    let continuous = (x.asin() + std::f64::consts::FRAC_PI_2) / (2.0 * std::f64::consts::PI);
    Ok(continuous + if x >= 0.0 { 0.5 } else { 0.0 })
}

/// A reference distribution: right-continuous CDF plus its atoms.
pub trait ReferenceMeasure {
    /// Right-continuous CDF.
    fn cdf(&self, x: f64) -> f64;
    /// Atom locations with masses, in increasing location order.
    fn atoms(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    /// Left limit F(x⁻).
    fn cdf_left(&self, x: f64) -> f64 {
        let atom = self
            .atoms()
            .iter()
            .find(|(loc, _)| *loc == x)
            .map(|(_, m)| *m)
            .unwrap_or(0.0);
        self.cdf(x) - atom
    }
}

/// The Sato-Tate measure on values in [−1, 1].
pub struct SatoTate;

impl ReferenceMeasure for SatoTate {
    fn cdf(&self, x: f64) -> f64 {
        st_cdf(x.clamp(-1.0, 1.0)).expect("clamped")
    }
}

/// The CM measure on values in [−1, 1] (atom of mass ½ at 0).
pub struct CmMeasure;

impl ReferenceMeasure for CmMeasure {
    fn cdf(&self, x: f64) -> f64 {
        cm_cdf(x.clamp(-1.0, 1.0)).expect("clamped")
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 0.5)]
    }
}

/// The uniform distribution on [lo, hi] (the rescaled continuous part of
/// the CM measure in the angle coordinate is uniform on [0, π]).
pub struct UniformMeasure {
    pub lo: f64,
    pub hi: f64,
}

impl ReferenceMeasure for UniformMeasure {
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// Atom-aware sup-norm distance between the empirical CDF of `samples` and
/// the reference. Samples need not be sorted; ties are handled through
/// counts, and jumps of the reference are compared on both sides.
pub fn ks_statistic<M: ReferenceMeasure>(
    samples: &[f64],
    measure: &M,
) -> Result<f64, EquidistError> {
    if samples.is_empty() {
        return Err(EquidistError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0usize;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let below = i as f64 / n; // F_n(x⁻)
        let upto = j as f64 / n; // F_n(x)
        sup = sup
            .max((measure.cdf(x) - upto).abs())
            .max((measure.cdf_left(x) - below).abs());
        i = j;
    }
    // Also probe the reference's own jump points.
    for (loc, _) in measure.atoms() {
        let below = sorted.partition_point(|&v| v < loc) as f64 / n;
        let upto = sorted.partition_point(|&v| v <= loc) as f64 / n;
        sup = sup
            .max((measure.cdf(loc) - upto).abs())
            .max((measure.cdf_left(loc) - below).abs());
    }
    Ok(sup)
}

/// Quantile of a reference measure by bisection on its CDF (used to build
/// calibration samples in tests and demos).
pub fn quantile<M: ReferenceMeasure>(measure: &M, q: f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if measure.cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st_cdf_endpoints_and_midpoint() {
        assert!(st_cdf(-1.0).unwrap().abs() < 1e-15);
        assert!((st_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((st_cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(st_cdf(1.5).is_err());
    }

    #[test]
    fn st_cdf_agrees_with_quadrature() {
        // Independent route: substitute t = −cos u so the integrand is
        // smooth, then Simpson's rule.
        let quadrature = |x: f64| {
            let upper = (-x).acos(); // t = −cos u maps [0, upper] to [−1, x]
            let steps = 1 << 16;
            let h = upper / steps as f64;
            let f = |u: f64| (2.0 / std::f64::consts::PI) * u.sin() * u.sin();
            let mut sum = f(0.0) + f(upper);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * f(i as f64 * h);
            }
            sum * h / 3.0
        };
        for x in [-0.9, -0.3, 0.0, 0.25, 0.5, 0.8] {
            assert!(
                (st_cdf(x).unwrap() - quadrature(x)).abs() < 1e-10,
                "x = {x}"
            );
        }
        // the value the experiments quote for x = 1/2
        assert!((st_cdf(0.5).unwrap() - 0.804498).abs() < 1e-6);
    }

    #[test]
    fn cm_cdf_jump_of_one_half_at_zero() {
        assert!((cm_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(cm_cdf(-1.0).unwrap().abs() < 1e-15);
        let left = cm_cdf(-1e-12).unwrap();
        let right = cm_cdf(0.0).unwrap();
        assert!((left - 0.25).abs() < 1e-9);
        assert!((right - left - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ks_examples() {
        // constant sample {0} against Sato-Tate
        let d = ks_statistic(&[0.0], &SatoTate).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        // two-point {−1, 1}
        let d = ks_statistic(&[-1.0, 1.0], &SatoTate).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(ks_statistic(&[], &SatoTate).is_err());
    }

    #[test]
    fn ks_on_quantile_samples_is_small_and_shrinks() {
        let mut last = f64::INFINITY;
        for n in [10usize, 100, 1000] {
            let samples: Vec<f64> = (1..=n)
                .map(|i| quantile(&SatoTate, i as f64 / (n + 1) as f64, -1.0, 1.0))
                .collect();
            let d = ks_statistic(&samples, &SatoTate).unwrap();
            assert!(d <= 1.0 / (n as f64 + 1.0) + 1e-9, "n = {n}, d = {d}");
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn ks_is_order_invariant() {
        let a = [0.3, -0.5, 0.9, 0.0, -0.1];
        let mut b = a;
        b.reverse();
        let da = ks_statistic(&a, &SatoTate).unwrap();
        let db = ks_statistic(&b, &SatoTate).unwrap();
        assert_eq!(da, db);
    }

    #[test]
    fn ks_atom_aware_for_cm_samples() {
        // half the sample exactly at the atom, the rest at continuous
        // quantiles: the distance must stay small
        let n = 1000usize;
        let mut samples = vec![0.0; n / 2];
        for i in 0..n / 2 {
            // continuous part: arcsine law, quantile of mass (i+½)/(n/2)
            let q = (i as f64 + 0.5) / (n / 2) as f64;
            // continuous cdf alone: (arcsin x + π/2)/π ⇒ x = sin(π(q − ½))
            samples.push((std::f64::consts::PI * (q - 0.5)).sin());
        }
        let d = ks_statistic(&samples, &CmMeasure).unwrap();
        assert!(d < 0.01, "d = {d}");
    }
}
