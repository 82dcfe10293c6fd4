//! Newform data model: prime-power coefficient recurrences, angle
//! extraction, the closed trigonometric form for a(p^ν), and the empirical
//! CM-vanishing detector.
//!
//! Coefficients carry an exact complex-rational value whenever one exists
//! (which is always the case for the eta-product oracle forms, whose
//! character values are quarter turns) alongside a double-precision
//! approximation. Sign decisions prefer the exact path; the float path is
//! only for ingested decimal data and uses [`crate::FLOAT_TOL`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::characters::{kronecker, sqrt_convention, DirichletCharacter};
use crate::phase::{ExactPhase, SignClass};
use crate::primes;
use crate::FLOAT_TOL;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HeckeError {
    #[error("prime {0} is not available in the coefficient table")]
    MissingPrime(u64),
    #[error("prime {0} divides the level")]
    LevelPrime(u64),
    #[error("normalized ratio {ratio} at prime {p} exceeds the Deligne bound")]
    DeligneViolation { p: u64, ratio: f64 },
    #[error("a(p)/zeta at prime {p} has imaginary part {im}, expected real")]
    NonRealRatio { p: u64, im: f64 },
    #[error("angle at prime {0} is a boundary angle")]
    BoundaryAngle(u64),
}

/// An exact element of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        GaussianRational {
            re: BigRational::from_integer(v),
            im: BigRational::zero(),
        }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Self {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    /// Multiply by i^k (k quarter turns), exactly.
    pub fn rotate_quarters(&self, k: u8) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GaussianRational {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => self.neg(),
            _ => GaussianRational {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn re_sign(&self) -> SignClass {
        match self.re.cmp(&BigRational::zero()) {
            std::cmp::Ordering::Less => SignClass::Neg,
            std::cmp::Ordering::Equal => SignClass::Zero,
            std::cmp::Ordering::Greater => SignClass::Pos,
        }
    }
}

/// A coefficient value: exact complex rational when available, with the
/// double-precision approximation always present (derived from the exact
/// value when there is one).
#[derive(Clone, Debug)]
pub struct CoefficientValue {
    exact: Option<GaussianRational>,
    approx: Complex64,
}

impl CoefficientValue {
    pub fn from_exact(exact: GaussianRational) -> Self {
        let approx = exact.to_complex();
        CoefficientValue {
            exact: Some(exact),
            approx,
        }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::from_exact(GaussianRational::from_bigint(v))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    pub fn from_approx(approx: Complex64) -> Self {
        CoefficientValue {
            exact: None,
            approx,
        }
    }

    pub fn zero() -> Self {
        Self::from_exact(GaussianRational::zero())
    }

    pub fn one() -> Self {
        Self::from_exact(GaussianRational::one())
    }

    pub fn exact(&self) -> Option<&GaussianRational> {
        self.exact.as_ref()
    }

    pub fn approx(&self) -> Complex64 {
        self.approx
    }

    pub fn add(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::from_exact(a.add(b)),
            _ => Self::from_approx(self.approx + o.approx),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::from_exact(a.sub(b)),
            _ => Self::from_approx(self.approx - o.approx),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::from_exact(a.mul(b)),
            _ => Self::from_approx(self.approx * o.approx),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.exact {
            Some(a) => Self::from_exact(a.neg()),
            None => Self::from_approx(-self.approx),
        }
    }

    pub fn scale_bigint(&self, s: &BigInt) -> Self {
        match &self.exact {
            Some(a) => Self::from_exact(a.scale(&BigRational::from_integer(s.clone()))),
            None => Self::from_approx(self.approx * s.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Multiply by a root of unity; stays exact on the quarter-turn grid.
    pub fn mul_phase(&self, phase: &ExactPhase) -> Self {
        match (&self.exact, phase.quarter_count()) {
            (Some(a), Some(k)) => Self::from_exact(a.rotate_quarters(k)),
            _ => Self::from_approx(self.approx * phase.as_complex()),
        }
    }

    /// Zero test: exact when possible, else `|z| ≤ tol_scale`.
    pub fn is_zero_with_scale(&self, tol_scale: f64) -> bool {
        match &self.exact {
            Some(a) => a.is_zero(),
            None => self.approx.norm() <= tol_scale,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(&self.exact, Some(a) if a.is_zero())
    }
}

/// The angle θ_p of a prime, together with the root of unity ζ that
/// realises a(p) = 2 p^{(k−1)/2} ζ cos θ_p.
#[derive(Clone, Debug)]
pub struct PrimeAngle {
    pub p: u64,
    pub zeta: ExactPhase,
    pub theta: f64,
    /// The normalized value Re(a(p)/(2p^{(k−1)/2}ζ)) the angle came from;
    /// exactly 0.0 for vanishing coefficients (θ = arccos recomputes it
    /// only up to rounding, which would smear the CM atom).
    pub cos_theta: f64,
    pub boundary: bool,
}

/// Which root of unity divides the coefficient before taking the angle:
/// the square root of ε(p) (integral-weight convention) or ε(p) itself
/// (the convention for Shimura lifts).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleMode {
    SqrtOfEps,
    EpsDirect,
}

/// Weight, level, character and the prime-indexed coefficient table of one
/// eigenform. Coefficients are stored on the unnormalized integer scale;
/// normalized quantities are computed on demand.
#[derive(Clone, Debug)]
pub struct NewformData {
    weight: u32,
    level: u64,
    character: DirichletCharacter,
    coeffs: BTreeMap<u64, CoefficientValue>,
    source_normalized: bool,
}

/// One validation failure found while checking a coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationIssue {
    DeligneBound { p: u64, ratio: f64 },
    NonRealRatio { p: u64, im: f64 },
}

impl NewformData {
    pub fn new(
        weight: u32,
        level: u64,
        character: DirichletCharacter,
        coeffs: BTreeMap<u64, CoefficientValue>,
        source_normalized: bool,
    ) -> NewformData {
        assert!(weight >= 1, "weight must be positive");
        NewformData {
            weight,
            level,
            character,
            coeffs,
            source_normalized,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn source_normalized(&self) -> bool {
        self.source_normalized
    }

    pub fn prime_coeff(&self, p: u64) -> Option<&CoefficientValue> {
        self.coeffs.get(&p)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn coeff_entries(&self) -> impl Iterator<Item = (u64, &CoefficientValue)> {
        self.coeffs.iter().map(|(&p, v)| (p, v))
    }

    pub fn max_prime(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    /// 2 p^{(k−1)/2}, the Deligne scale at p.
    pub fn deligne_scale(&self, p: u64) -> f64 {
        2.0 * (p as f64).powf((self.weight as f64 - 1.0) / 2.0)
    }

    fn weight_power(&self, p: u64) -> BigInt {
        BigInt::from(p).pow(self.weight - 1)
    }

    /// ε(p)·p^{k−1} as a coefficient value (zero when p divides the level).
    fn recurrence_weight(&self, p: u64) -> CoefficientValue {
        match self.character.evaluate(p as i64) {
            None => CoefficientValue::zero(),
            Some(phase) => {
                CoefficientValue::from_bigint(self.weight_power(p)).mul_phase(&phase)
            }
        }
    }

    /// a(p^ν) through the Hecke recurrence
    /// a(p^{ν+1}) = a(p)·a(p^ν) − ε(p)·p^{k−1}·a(p^{ν−1}), a(p⁰) = 1.
    pub fn hecke_power(&self, p: u64, nu: u32) -> Result<CoefficientValue, HeckeError> {
        if nu == 0 {
            return Ok(CoefficientValue::one());
        }
        let ap = self
            .coeffs
            .get(&p)
            .ok_or(HeckeError::MissingPrime(p))?
            .clone();
        if nu == 1 {
            return Ok(ap);
        }
        let w = self.recurrence_weight(p);
        let mut prev = CoefficientValue::one();
        let mut cur = ap.clone();
        for _ in 1..nu {
            let next = ap.mul(&cur).sub(&w.mul(&prev));
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// a(n) over prime powers by complete multiplicativity of the Hecke
    /// eigenvalues across coprime factors.
    pub fn multiplicative_extend(&self, n: u64) -> Result<CoefficientValue, HeckeError> {
        let mut acc = CoefficientValue::one();
        for (p, e) in primes::factorize(n) {
            acc = acc.mul(&self.hecke_power(p, e)?);
        }
        Ok(acc)
    }

    /// The ζ used by [`Self::extract_angle`] in the given mode, for primes
    /// away from the level.
    pub fn angle_zeta(&self, p: u64, mode: AngleMode) -> Result<ExactPhase, HeckeError> {
        let eps_p = self
            .character
            .evaluate(p as i64)
            .ok_or(HeckeError::LevelPrime(p))?;
        match mode {
            AngleMode::EpsDirect => Ok(eps_p),
            AngleMode::SqrtOfEps => Ok(sqrt_convention(&eps_p, self.character.order())
                .expect("character value is an r-th root of unity")),
        }
    }

    /// Extract θ_p ∈ [0, π] with cos θ_p = Re(a(p) / (2 p^{(k−1)/2} ζ)).
    pub fn extract_angle(&self, p: u64, mode: AngleMode) -> Result<PrimeAngle, HeckeError> {
        let zeta = self.angle_zeta(p, mode)?;
        let a = self.coeffs.get(&p).ok_or(HeckeError::MissingPrime(p))?;
        let scale = self.deligne_scale(p);
        let ratio = a.approx() / (scale * zeta.as_complex());
        if ratio.im.abs() > FLOAT_TOL && ratio.im.abs() > FLOAT_TOL * ratio.norm() {
            return Err(HeckeError::NonRealRatio {
                p,
                im: ratio.im,
            });
        }
        if ratio.re.abs() > 1.0 + 1e-6 {
            return Err(HeckeError::DeligneViolation { p, ratio: ratio.re });
        }
        // Boundary detection is exact on exact data: |a(p)|² = 4 p^{k−1}.
        let boundary = match a.exact() {
            Some(g) => {
                g.norm_sqr() == BigRational::from_integer(BigInt::from(4) * self.weight_power(p))
            }
            None => ratio.re.abs() >= 1.0 - FLOAT_TOL,
        };
        let cos_theta = ratio.re.clamp(-1.0, 1.0);
        Ok(PrimeAngle {
            p,
            zeta,
            theta: cos_theta.acos(),
            cos_theta,
            boundary,
        })
    }

    /// Validate the Deligne bound and the reality of a(p)/ζ on every stored
    /// prime; an empty report means the table is consistent.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        for (&p, a) in &self.coeffs {
            let scale = self.deligne_scale(p);
            // Deligne bound, exact when possible
            let violated = match a.exact() {
                Some(g) => {
                    g.norm_sqr()
                        > BigRational::from_integer(BigInt::from(4) * self.weight_power(p))
                }
                None => a.approx().norm() > scale * (1.0 + FLOAT_TOL),
            };
            if violated {
                issues.push(ValidationIssue::DeligneBound {
                    p,
                    ratio: a.approx().norm() / scale,
                });
            }
            if let Ok(zeta) = self.angle_zeta(p, AngleMode::SqrtOfEps) {
                let ratio = a.approx() / zeta.as_complex();
                if ratio.im.abs() > FLOAT_TOL * scale.max(1.0) {
                    issues.push(ValidationIssue::NonRealRatio { p, im: ratio.im });
                }
            }
        }
        issues
    }

    /// Empirical CM detector against the discriminant d: among primes with
    /// (d|p) = −1, the fraction with a(p) = 0, and conversely among primes
    /// with a(p) = 0 the fraction that are inert.
    pub fn cm_vanishing_scan(&self, d: i64, x: u64) -> Result<CmScan, HeckeError> {
        let mut inert = 0u64;
        let mut zero = 0u64;
        let mut both = 0u64;
        for p in primes::primes_up_to(x) {
            let a = self.coeffs.get(&p).ok_or(HeckeError::MissingPrime(p))?;
            let is_inert = kronecker(d, p as i64) == -1;
            let is_zero = a.is_zero_with_scale(FLOAT_TOL * self.deligne_scale(p));
            inert += is_inert as u64;
            zero += is_zero as u64;
            both += (is_inert && is_zero) as u64;
        }
        Ok(CmScan {
            discriminant: d,
            x,
            inert_count: inert,
            zero_count: zero,
            both_count: both,
        })
    }
}

/// Result of a CM-vanishing scan. Fractions are `None` on an empty sample.
#[derive(Clone, Debug, PartialEq)]
pub struct CmScan {
    pub discriminant: i64,
    pub x: u64,
    pub inert_count: u64,
    pub zero_count: u64,
    pub both_count: u64,
}

impl CmScan {
    pub fn fraction_zero_given_inert(&self) -> Option<f64> {
        (self.inert_count > 0).then(|| self.both_count as f64 / self.inert_count as f64)
    }

    pub fn fraction_inert_given_zero(&self) -> Option<f64> {
        (self.zero_count > 0).then(|| self.both_count as f64 / self.zero_count as f64)
    }

    /// All inert primes vanish (and some inert prime was seen).
    pub fn cm_consistent(&self) -> bool {
        self.inert_count > 0 && self.both_count == self.inert_count
    }
}

/// Normalized-scale a(p^ν) from the angle: sin((ν+1)θ)/sin(θ) · ζ^ν, with
/// the limiting values (ν+1)ζ^ν at θ = 0 and (−1)^ν(ν+1)ζ^ν at θ = π.
pub fn lemma1_eval(theta: f64, zeta: &ExactPhase, nu: u32) -> CoefficientValue {
    let zpow = zeta.pow(nu as i64);
    let factor = if theta.abs() <= FLOAT_TOL {
        (nu + 1) as f64
    } else if (std::f64::consts::PI - theta).abs() <= FLOAT_TOL {
        let sign = if nu.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (nu + 1) as f64
    } else {
        (((nu + 1) as f64) * theta).sin() / theta.sin()
    };
    CoefficientValue::from_approx(factor * zpow.as_complex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::forms;

    #[test]
    fn hecke_power_examples() {
        let delta = forms::delta(100);
        // a(4) = (−24)² − 2^{11}
        let a4 = delta.hecke_power(2, 2).unwrap();
        assert_eq!(
            a4.exact().unwrap().re,
            BigRational::from_integer(BigInt::from(-1472))
        );
        // ν = 0
        let one = delta.hecke_power(97, 0).unwrap();
        assert!(one.exact().unwrap().eq(&GaussianRational::one()));
        assert!(matches!(
            delta.hecke_power(101, 1),
            Err(HeckeError::MissingPrime(101))
        ));
    }

    #[test]
    fn recurrence_matches_expansion_for_cm_form() {
        // a(9) must equal the eta-oracle coefficient at q⁹ (= 9), including
        // the ε(3) = −1 twist in the recurrence.
        let f = forms::eta4_pow6(100);
        let a9 = f.hecke_power(3, 2).unwrap();
        assert_eq!(
            a9.exact().unwrap().re,
            BigRational::from_integer(BigInt::from(9))
        );
    }

    #[test]
    fn multiplicativity_spot_checks() {
        let delta = forms::delta(50);
        let a6 = delta.multiplicative_extend(6).unwrap();
        assert_eq!(
            a6.exact().unwrap().re,
            BigRational::from_integer(BigInt::from(-6048))
        );
        let a12 = delta.multiplicative_extend(12).unwrap();
        assert_eq!(
            a12.exact().unwrap().re,
            BigRational::from_integer(BigInt::from(-1472i64 * 252))
        );
        let a1 = delta.multiplicative_extend(1).unwrap();
        assert!(a1.exact().unwrap().eq(&GaussianRational::one()));
    }

    #[test]
    fn angle_extraction_for_delta() {
        let delta = forms::delta(10);
        let angle = delta.extract_angle(2, AngleMode::SqrtOfEps).unwrap();
        // trivial character: ζ = 1 and cos θ₂ = −24 / (2·2^{11/2})
        assert_eq!(angle.zeta, ExactPhase::ONE);
        let expected = (-24.0f64 / (2.0 * 2.0f64.powf(5.5))).acos();
        assert!((angle.theta - expected).abs() < 1e-12);
        assert!(!angle.boundary);
    }

    #[test]
    fn angle_for_vanishing_coefficient_is_right_angle() {
        let f = forms::eta4_pow6(10);
        let angle = f.extract_angle(3, AngleMode::SqrtOfEps).unwrap();
        // a(3) = 0, ε(3) = −1, ζ = i
        assert_eq!(angle.zeta, ExactPhase::I);
        assert!((angle.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn level_primes_are_rejected() {
        let f = forms::eta4_pow6(10);
        assert!(matches!(
            f.extract_angle(2, AngleMode::SqrtOfEps),
            Err(HeckeError::LevelPrime(2))
        ));
    }

    #[test]
    fn boundary_flag_on_synthetic_extremal_coefficient() {
        // weight 3 so that 2 p^{(k−1)/2} = 2p is an integer we can hit
        let chi = DirichletCharacter::trivial(1);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(5, CoefficientValue::from_int(10));
        let f = NewformData::new(3, 1, chi, coeffs, false);
        let angle = f.extract_angle(5, AngleMode::SqrtOfEps).unwrap();
        assert!(angle.boundary);
        assert!(angle.theta.abs() < 1e-12);
    }

    #[test]
    fn deligne_violation_is_an_error() {
        let chi = DirichletCharacter::trivial(1);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(2, CoefficientValue::from_int(1000));
        let f = NewformData::new(3, 1, chi, coeffs, false);
        assert!(matches!(
            f.extract_angle(2, AngleMode::SqrtOfEps),
            Err(HeckeError::DeligneViolation { p: 2, .. })
        ));
        assert!(matches!(
            f.validate()[0],
            ValidationIssue::DeligneBound { p: 2, .. }
        ));
    }

    #[test]
    fn lemma1_limiting_cases() {
        let one = ExactPhase::ONE;
        // θ = 0, ν = 5 → 6
        let v = lemma1_eval(0.0, &one, 5);
        assert!((v.approx().re - 6.0).abs() < 1e-12);
        // θ = π, ν = 3 → −4
        let v = lemma1_eval(std::f64::consts::PI, &one, 3);
        assert!((v.approx().re + 4.0).abs() < 1e-12);
        // θ = π/2, ν = 1 → 0
        let v = lemma1_eval(std::f64::consts::FRAC_PI_2, &one, 1);
        assert!(v.approx().norm() < 1e-12);
    }

    #[test]
    fn cm_scan_flags_the_cm_form_and_not_delta() {
        let f = forms::eta4_pow6(2000);
        let scan = f.cm_vanishing_scan(-4, 2000).unwrap();
        assert_eq!(scan.fraction_zero_given_inert(), Some(1.0));
        assert!(scan.cm_consistent());

        let delta = forms::delta(2000);
        let scan = delta.cm_vanishing_scan(-4, 2000).unwrap();
        assert!(scan.fraction_zero_given_inert().unwrap() < 0.1);
        assert!(!scan.cm_consistent());
    }

    #[test]
    fn cm_scan_empty_sample_marker() {
        // x = 2: the only prime is 2, which is not inert for d = −4
        let delta = forms::delta(10);
        let scan = delta.cm_vanishing_scan(-4, 2).unwrap();
        assert_eq!(scan.fraction_zero_given_inert(), None);
    }

    #[test]
    fn coefficient_value_exactness_propagates() {
        let a = CoefficientValue::from_int(3);
        let b = CoefficientValue::from_approx(Complex64::new(2.0, 0.0));
        assert!(a.mul(&a).exact().is_some());
        assert!(a.mul(&b).exact().is_none());
        let i_rot = a.mul_phase(&ExactPhase::I);
        let g = i_rot.exact().unwrap();
        assert!(g.re.is_zero());
        assert_eq!(g.im, BigRational::from_integer(BigInt::from(3)));
    }
}
