//! Empirical sign-density scans over primes and exponents, oscillation
//! certificates, and the ratio experiment for ingested half-integral data.

use std::collections::BTreeMap;

use num_rational::Ratio;

use super::predict::{sin_sign_of_fraction, PredictedDensity};
use super::EquidistError;
use crate::hecke::{AngleMode, CoefficientValue, NewformData};
use crate::phase::{re_sign_rotated, ExactPhase, Phi, SignClass};
use crate::primes;
use crate::shimura::ShimuraFamily;
use crate::FLOAT_TOL;

/// A half-plane slice: direction φ and exponent ν.
#[derive(Clone, Debug)]
pub struct HalfPlaneQuery {
    pub phi: Phi,
    pub nu: u32,
}

/// Counts of half-plane classifications with the exact predicted target
/// attached when one applies.
#[derive(Clone, Debug, Default)]
pub struct DensityEstimate {
    pub count_pos: u64,
    pub count_neg: u64,
    pub count_zero: u64,
    pub count_boundary_excluded: u64,
    /// Primes dividing the level, skipped outside `total`.
    pub count_level_skipped: u64,
    pub total: u64,
    pub predicted: Option<PredictedDensity>,
    /// Predicted proportion of positive values among nonzero ones.
    pub predicted_ratio: Option<Ratio<i64>>,
}

impl DensityEstimate {
    fn record(&mut self, sign: SignClass) {
        match sign {
            SignClass::Pos => self.count_pos += 1,
            SignClass::Neg => self.count_neg += 1,
            SignClass::Zero => self.count_zero += 1,
        }
        self.total += 1;
    }

    fn record_boundary(&mut self) {
        self.count_boundary_excluded += 1;
        self.total += 1;
    }

    pub fn with_predicted(mut self, p: PredictedDensity) -> Self {
        self.predicted_ratio = p.pos_among_nonzero().or(self.predicted_ratio);
        self.predicted = Some(p);
        self
    }

    pub fn with_predicted_ratio(mut self, r: Ratio<i64>) -> Self {
        self.predicted_ratio = Some(r);
        self
    }

    pub fn nonzero(&self) -> u64 {
        self.count_pos + self.count_neg
    }

    pub fn ratio_pos(&self) -> f64 {
        self.count_pos as f64 / self.total.max(1) as f64
    }

    pub fn ratio_neg(&self) -> f64 {
        self.count_neg as f64 / self.total.max(1) as f64
    }

    pub fn ratio_zero(&self) -> f64 {
        self.count_zero as f64 / self.total.max(1) as f64
    }

    pub fn pos_among_nonzero(&self) -> Option<f64> {
        (self.nonzero() > 0).then(|| self.count_pos as f64 / self.nonzero() as f64)
    }
}

/// Sign of Re(v·e^{−iφ}), exact whenever the value is exact and the
/// geometry allows it (real or purely imaginary values against a rational
/// φ, or any exact value against a quarter-turn φ). Falls back to the
/// float path with [`FLOAT_TOL`] scaled by the magnitude.
pub fn sign_re_rotated(v: &CoefficientValue, phi: &Phi) -> SignClass {
    if let Some(g) = v.exact() {
        if g.is_zero() {
            return SignClass::Zero;
        }
        if let Some(t) = phi.turns() {
            let t_phase = ExactPhase::from_turns(t);
            if let Some(k) = t_phase.quarter_count() {
                // multiply by e^{−iφ} = i^{−k} exactly
                return g.rotate_quarters((4 - k % 4) % 4).re_sign();
            }
            if g.is_real() {
                // Re(x e^{−iφ}) = x·cos φ
                return g
                    .re_sign()
                    .product(ExactPhase::from_turns(-t).re_sign());
            }
            if num_traits::Zero::is_zero(&g.re) {
                // Re(iy e^{−iφ}) = y·sin φ
                let y_sign = g.rotate_quarters(3).re_sign(); // sign of y
                return y_sign.product(t_phase.im_sign());
            }
        }
    }
    let z = v.approx();
    let rotated = z * num_complex::Complex64::new(phi.radians().cos(), -phi.radians().sin());
    SignClass::from_f64(rotated.re, FLOAT_TOL * z.norm().max(1.0))
}

/// Classification of one prime in a half-plane scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeSignClass {
    /// Divides the level; skipped.
    Level,
    /// Boundary angle; excluded from the sign counts.
    Boundary,
    Sign(SignClass),
}

/// Classify the sign of Re(a(p^ν) e^{−iφ}) for a single prime through the
/// factorization a(p^ν) = (real factor)·ζ^ν: the rotation sign is exact
/// rational-phase arithmetic, the real factor uses the exact recurrence
/// when available and sin((ν+1)θ_p) otherwise.
pub fn half_plane_sign(
    data: &NewformData,
    p: u64,
    nu: u32,
    phi: &Phi,
    mode: AngleMode,
) -> Result<PrimeSignClass, EquidistError> {
    let angle = match data.extract_angle(p, mode) {
        Ok(a) => a,
        Err(crate::hecke::HeckeError::LevelPrime(_)) => return Ok(PrimeSignClass::Level),
        Err(e) => return Err(e.into()),
    };
    if angle.boundary {
        return Ok(PrimeSignClass::Boundary);
    }
    let zeta_pow = angle.zeta.pow(nu as i64);
    let rotation_sign = re_sign_rotated(&zeta_pow, phi);
    if rotation_sign == SignClass::Zero {
        return Ok(PrimeSignClass::Sign(SignClass::Zero));
    }
    // real factor: a(p^ν)/ζ^ν
    let value = data.hecke_power(p, nu)?;
    let real_sign = match (value.exact(), zeta_pow.quarter_count()) {
        (Some(g), Some(k)) => {
            let unrotated = g.rotate_quarters((4 - k % 4) % 4);
            debug_assert!(unrotated.is_real(), "a(p^nu)/zeta^nu must be real");
            unrotated.re_sign()
        }
        _ => {
            let s = (((nu + 1) as f64) * angle.theta).sin();
            SignClass::from_f64(s, FLOAT_TOL)
        }
    };
    Ok(PrimeSignClass::Sign(real_sign.product(rotation_sign)))
}

/// Classify the sign of Re(a(t p²) e^{−iφ}) for one prime of a family;
/// `None` when p divides the level.
pub fn family_half_plane_sign(
    fam: &ShimuraFamily,
    p: u64,
    phi: &Phi,
) -> Result<Option<SignClass>, EquidistError> {
    let zeta = match fam.epsilon().evaluate(p as i64) {
        Some(z) => z,
        None => return Ok(None),
    };
    let rotation_sign = re_sign_rotated(&zeta, phi);
    if rotation_sign == SignClass::Zero {
        return Ok(Some(SignClass::Zero));
    }
    let value = fam.family_prime_power(p, 1)?;
    let real_sign = match (value.exact(), zeta.quarter_count()) {
        (Some(g), Some(k)) => {
            let unrotated = g.rotate_quarters((4 - k % 4) % 4);
            debug_assert!(unrotated.is_real(), "a(tp^2)/zeta must be real");
            unrotated.re_sign()
        }
        _ => {
            let w = value.approx() / zeta.as_complex();
            SignClass::from_f64(w.re, FLOAT_TOL * value.approx().norm().max(1.0))
        }
    };
    Ok(Some(real_sign.product(rotation_sign)))
}

/// Empirical sign density of {Re(a(p^ν) e^{−iφ})}_p over primes p ≤ x.
/// Boundary-flagged primes are excluded from the sign counts and reported
/// separately; level primes are skipped.
pub fn empirical_density_primes(
    data: &NewformData,
    query: &HalfPlaneQuery,
    x: u64,
    mode: AngleMode,
) -> Result<DensityEstimate, EquidistError> {
    if x < 2 {
        return Err(EquidistError::EmptySample);
    }
    let mut est = DensityEstimate::default();
    for p in primes::primes_up_to(x) {
        if data.prime_coeff(p).is_none() {
            return Err(EquidistError::InsufficientData { missing_prime: p });
        }
        match half_plane_sign(data, p, query.nu, &query.phi, mode)? {
            PrimeSignClass::Level => est.count_level_skipped += 1,
            PrimeSignClass::Boundary => est.record_boundary(),
            PrimeSignClass::Sign(s) => est.record(s),
        }
    }
    Ok(est)
}

/// Empirical sign density of {Re(a(t p²) e^{−iφ})}_p over primes p ≤ x of a
/// Shimura family (ζ = ε(p) drives the rotation sign).
pub fn empirical_density_tp2(
    fam: &ShimuraFamily,
    phi: &Phi,
    x: u64,
) -> Result<DensityEstimate, EquidistError> {
    if x < 2 {
        return Err(EquidistError::EmptySample);
    }
    let mut est = DensityEstimate::default();
    for p in primes::primes_up_to(x) {
        if fam.epsilon().evaluate(p as i64).is_some() && fam.lift().prime_coeff(p).is_none() {
            return Err(EquidistError::InsufficientData { missing_prime: p });
        }
        match family_half_plane_sign(fam, p, phi)? {
            None => est.count_level_skipped += 1,
            Some(s) => est.record(s),
        }
    }
    Ok(est)
}

/// The angle driving a fixed-prime scan: an exact rational fraction of a
/// turn (θ/2π = n/m) or a free real θ in radians.
#[derive(Clone, Copy, Debug)]
pub enum FixedAngle {
    RationalTurns { num: u64, den: u64 },
    Radians(f64),
}

/// Sign statistics of {Re(a(p^ν) e^{−iφ})}_ν for 1 ≤ ν ≤ ν_max at a fixed
/// prime, via sin((ν+1)θ)·Re(ζ^ν e^{−iφ}). Rational angles classify
/// exactly; the predicted limiting ratio ½ is attached.
pub fn fixed_prime_scan(
    angle: &FixedAngle,
    zeta: &ExactPhase,
    phi: &Phi,
    nu_max: u64,
) -> DensityEstimate {
    let mut est = DensityEstimate::default();
    for nu in 1..=nu_max {
        let rotation_sign = re_sign_rotated(&zeta.pow(nu as i64), phi);
        let sin_sign = match angle {
            FixedAngle::RationalTurns { num, den } => {
                sin_sign_of_fraction((nu + 1) as u128 * *num as u128, *den)
            }
            FixedAngle::Radians(theta) => {
                SignClass::from_f64(((nu + 1) as f64 * theta).sin(), FLOAT_TOL)
            }
        };
        est.record(sin_sign.product(rotation_sign));
    }
    est.with_predicted_ratio(Ratio::new(1, 2))
}

/// Fixed-prime scan for a stored form: extracts θ_p (boundary angles are
/// unsupported — the sin factor degenerates there) and runs
/// [`fixed_prime_scan`].
pub fn fixed_prime_density(
    data: &NewformData,
    p: u64,
    phi: &Phi,
    nu_max: u64,
    mode: AngleMode,
) -> Result<DensityEstimate, EquidistError> {
    let angle = data.extract_angle(p, mode)?;
    if angle.boundary {
        return Err(EquidistError::BoundaryAngle(p));
    }
    Ok(fixed_prime_scan(
        &FixedAngle::Radians(angle.theta),
        &angle.zeta,
        phi,
        nu_max,
    ))
}

/// Outcome of an oscillation scan over a finite horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscillationVerdict {
    /// At least one sign change among nonzero terms.
    OscillatingEvidence,
    /// Every term classified zero.
    Trivial,
    /// Nonzero terms present but no sign change within the horizon.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct OscillationCertificate {
    /// Indices at which a nonzero classification differs from the previous
    /// nonzero classification.
    pub changes: Vec<u64>,
    pub verdict: OscillationVerdict,
    pub nonzero_count: u64,
    pub total: u64,
}

/// Scan an indexed value sequence for sign changes of Re(a e^{−iφ}) across
/// consecutive nonzero classifications.
pub fn oscillation_certificate<I>(seq: I, phi: &Phi, horizon: usize) -> OscillationCertificate
where
    I: IntoIterator<Item = (u64, CoefficientValue)>,
{
    let mut changes = Vec::new();
    let mut last_nonzero: Option<SignClass> = None;
    let mut nonzero_count = 0u64;
    let mut total = 0u64;
    for (index, value) in seq.into_iter().take(horizon) {
        total += 1;
        let sign = sign_re_rotated(&value, phi);
        if sign == SignClass::Zero {
            continue;
        }
        nonzero_count += 1;
        if let Some(prev) = last_nonzero {
            if prev != sign {
                changes.push(index);
            }
        }
        last_nonzero = Some(sign);
    }
    let verdict = if nonzero_count == 0 {
        OscillationVerdict::Trivial
    } else if changes.is_empty() {
        OscillationVerdict::Inconclusive
    } else {
        OscillationVerdict::OscillatingEvidence
    };
    OscillationCertificate {
        changes,
        verdict,
        nonzero_count,
        total,
    }
}

/// Which component of a(n)e^{−iφ} the conjecture experiment classifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjecturePart {
    Real,
    Imaginary,
}

/// The ratio experiment over ingested half-integral coefficients: the
/// proportion of positive values among nonzero ones of Re or Im of
/// a(n)e^{−iφ}, over indices n ≤ x present in the data. The attached ½ is
/// a conjectural target, not a theorem.
pub fn conjecture_ratio(
    data: &BTreeMap<u64, CoefficientValue>,
    phi: &Phi,
    x: u64,
    part: ConjecturePart,
) -> Result<DensityEstimate, EquidistError> {
    if x == 0 {
        return Err(EquidistError::EmptySample);
    }
    let effective_phi = match part {
        ConjecturePart::Real => *phi,
        // Im(z e^{−iφ}) = Re(z e^{−i(φ+π/2)})
        ConjecturePart::Imaginary => phi.plus_quarter_turn(),
    };
    let mut est = DensityEstimate::default();
    for (_, value) in data.range(1..=x) {
        est.record(sign_re_rotated(value, &effective_phi));
    }
    if est.total == 0 {
        return Err(EquidistError::EmptySample);
    }
    Ok(est.with_predicted_ratio(Ratio::new(1, 2)))
}
