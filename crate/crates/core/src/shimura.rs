//! Half-integral-weight coefficient families a(t n²) driven by an
//! integral-weight lift: the forward divisor-sum relation, its Möbius
//! inversion, the prime-power recurrence, the normalized A/B quantities,
//! and the rational generating-function cross-check.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::characters::{kronecker, DirichletCharacter};
use crate::hecke::{CoefficientValue, HeckeError, NewformData};
use crate::phase::ExactPhase;
use crate::primes;
use crate::FLOAT_TOL;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ShimuraError {
    #[error("t = {0} must be a positive square-free integer")]
    BadT(u64),
    #[error("the half-integral level {0} must be divisible by 4")]
    BadLevel(u64),
    #[error("k must be at least 1")]
    BadWeight,
    #[error("lift has weight {got}, expected 2k = {expected}")]
    LiftWeightMismatch { got: u32, expected: u32 },
    #[error("lift character does not agree with the square of the family character")]
    LiftCharacterMismatch,
    #[error("family character modulus {got} differs from the level {level}")]
    CharacterModulusMismatch { got: u64, level: u64 },
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// A half-integral coefficient family (t, ε, ε_{t,N}, χ_0) of weight
/// k + 1/2 and level N, driven by an integral-weight lift of weight 2k with
/// character ε². The coefficient a(t) is fixed to 1, so the family is
/// synthesized from the lift; ingested half-integral data enters only
/// through the forward check.
#[derive(Clone, Debug)]
pub struct ShimuraFamily {
    t: u64,
    k: u32,
    level: u64,
    epsilon: DirichletCharacter,
    lift: NewformData,
    /// (−1)^k N² t, the twist discriminant defining χ_0.
    disc: i64,
}

impl ShimuraFamily {
    pub fn new(
        t: u64,
        k: u32,
        level: u64,
        epsilon: DirichletCharacter,
        lift: NewformData,
    ) -> Result<ShimuraFamily, ShimuraError> {
        if t == 0 || !primes::is_squarefree(t) {
            return Err(ShimuraError::BadT(t));
        }
        if !level.is_multiple_of(4) {
            return Err(ShimuraError::BadLevel(level));
        }
        if k == 0 {
            return Err(ShimuraError::BadWeight);
        }
        if epsilon.modulus() != level {
            return Err(ShimuraError::CharacterModulusMismatch {
                got: epsilon.modulus(),
                level,
            });
        }
        if lift.weight() != 2 * k {
            return Err(ShimuraError::LiftWeightMismatch {
                got: lift.weight(),
                expected: 2 * k,
            });
        }
        if !epsilon.pow(2).agrees_on_units_with(lift.character()) {
            return Err(ShimuraError::LiftCharacterMismatch);
        }
        let n = level as i64;
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        let disc = sign * n * n * t as i64;
        Ok(ShimuraFamily {
            t,
            k,
            level,
            epsilon,
            lift,
            disc,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn epsilon(&self) -> &DirichletCharacter {
        &self.epsilon
    }

    pub fn lift(&self) -> &NewformData {
        &self.lift
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    /// χ_0(d) = ((−1)^k N² t | d).
    pub fn chi0(&self, d: u64) -> i32 {
        kronecker(self.disc, d as i64)
    }

    /// ε_{t,N}(d) = ε(d)·χ_0(d) as an exact phase, `None` when zero.
    pub fn eps_tn(&self, d: u64) -> Option<ExactPhase> {
        let eps = self.epsilon.evaluate(d as i64)?;
        match self.chi0(d) {
            0 => None,
            1 => Some(eps),
            _ => Some(eps.mul(&ExactPhase::MINUS_ONE)),
        }
    }

    /// A_t(n): the lift coefficient, extended multiplicatively.
    pub fn lift_coeff(&self, n: u64) -> Result<CoefficientValue, ShimuraError> {
        Ok(self.lift.multiplicative_extend(n)?)
    }

    fn d_weight_power(&self, d: u64) -> BigInt {
        BigInt::from(d).pow(self.k - 1)
    }

    /// ε_{t,N}(d)·d^{k−1} as a coefficient value.
    fn twist_term(&self, d: u64) -> CoefficientValue {
        match self.eps_tn(d) {
            None => CoefficientValue::zero(),
            Some(phase) => {
                CoefficientValue::from_bigint(self.d_weight_power(d)).mul_phase(&phase)
            }
        }
    }

    /// a(t n²) by Möbius inversion of the forward relation:
    /// Σ_{d|n} μ(d) ε_{t,N}(d) d^{k−1} A_t(n/d).
    pub fn family_coeff(&self, n: u64) -> Result<CoefficientValue, ShimuraError> {
        let mut acc = CoefficientValue::zero();
        for (d, mu) in primes::squarefree_divisors_with_mu(n) {
            if !n.is_multiple_of(d) {
                continue;
            }
            let term = self
                .twist_term(d)
                .mul(&self.lift_coeff(n / d)?)
                .scale_bigint(&BigInt::from(mu));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// a(t p^{2ν}) = A_t(p^ν) − p^{k−1} ε_{t,N}(p) A_t(p^{ν−1}); ν = 0
    /// returns a(t) = 1.
    pub fn family_prime_power(&self, p: u64, nu: u32) -> Result<CoefficientValue, ShimuraError> {
        if nu == 0 {
            return Ok(CoefficientValue::one());
        }
        let head = self.lift.hecke_power(p, nu)?;
        let tail = self.lift.hecke_power(p, nu - 1)?;
        Ok(head.sub(&self.twist_term(p).mul(&tail)))
    }

    /// ζ = ε(p), B_ζ = A_t(p)/(2 p^{k−1/2} ζ), A_ζ = B_ζ − χ_0(p)/(2√p).
    pub fn normalized_ab(&self, p: u64) -> Result<NormalizedAb, ShimuraError> {
        let zeta = self
            .epsilon
            .evaluate(p as i64)
            .ok_or(HeckeError::LevelPrime(p))?;
        let a_t = self.lift.prime_coeff(p).ok_or(HeckeError::MissingPrime(p))?;
        let scale = 2.0 * (p as f64).powf(self.k as f64 - 0.5);
        let b = a_t.approx() / (scale * zeta.as_complex());
        if b.im.abs() > FLOAT_TOL {
            return Err(ShimuraError::Hecke(HeckeError::NonRealRatio {
                p,
                im: b.im,
            }));
        }
        let a = b.re - self.chi0(p) as f64 / (2.0 * (p as f64).sqrt());
        Ok(NormalizedAb {
            p,
            zeta,
            b: b.re,
            a,
        })
    }

    /// Expand a(t)·(1 − ε_{t,N}(p) p^{k−1} X) / (1 − λ_p X + ε(p)² p^{2k−1} X²)
    /// to `n_terms` coefficients and compare term-by-term with the
    /// prime-power relation; exact equality on exact data.
    pub fn generating_function_check(
        &self,
        p: u64,
        n_terms: u32,
    ) -> Result<GeneratingFunctionReport, ShimuraError> {
        assert!(n_terms >= 2, "need at least two terms");
        let lambda = self
            .lift
            .prime_coeff(p)
            .ok_or(HeckeError::MissingPrime(p))?
            .clone();
        // denominator coefficient ε(p)² p^{2k−1} = lift character weight
        let eps_sq = self.epsilon.pow(2);
        let denom_w = match eps_sq.evaluate(p as i64) {
            None => CoefficientValue::zero(),
            Some(phase) => CoefficientValue::from_bigint(BigInt::from(p).pow(2 * self.k - 1))
                .mul_phase(&phase),
        };
        let numer_tail = self.twist_term(p); // ε_{t,N}(p) p^{k−1}

        let mut series: Vec<CoefficientValue> = Vec::with_capacity(n_terms as usize);
        // S·D = U with U = 1 − ε_{t,N}(p)p^{k−1}X:
        // S_0 = 1, S_1 = λ_p − ε_{t,N}(p)p^{k−1},
        // S_ν = λ_p S_{ν−1} − ε(p)²p^{2k−1} S_{ν−2}.
        series.push(CoefficientValue::one());
        series.push(lambda.sub(&numer_tail));
        for nu in 2..n_terms as usize {
            let next = lambda
                .mul(&series[nu - 1])
                .sub(&denom_w.mul(&series[nu - 2]));
            series.push(next);
        }

        let mut mismatches = Vec::new();
        let mut max_abs_diff = 0.0f64;
        let mut all_exact = true;
        for (nu, gf) in series.iter().enumerate() {
            let direct = self.family_prime_power(p, nu as u32)?;
            match (gf.exact(), direct.exact()) {
                (Some(x), Some(y)) => {
                    if x != y {
                        mismatches.push(nu as u32);
                    }
                }
                _ => {
                    all_exact = false;
                    let d = (gf.approx() - direct.approx()).norm();
                    max_abs_diff = max_abs_diff.max(d);
                    if d > FLOAT_TOL * (1.0 + direct.approx().norm()) {
                        mismatches.push(nu as u32);
                    }
                }
            }
        }
        Ok(GeneratingFunctionReport {
            p,
            n_terms,
            mismatches,
            exact: all_exact,
            max_abs_diff,
        })
    }

    /// Verify A_t(n) = Σ_{d|n} ε_{t,N}(d) d^{k−1} a(t(n/d)²) against
    /// ingested half-integral data (a map n → a(t n²)) for n ≤ n_max.
    /// Missing data points are listed, not fatal.
    pub fn forward_shimura_check(
        &self,
        half_data: &BTreeMap<u64, CoefficientValue>,
        n_max: u64,
    ) -> Result<ForwardCheckReport, ShimuraError> {
        let mut missing = Vec::new();
        let mut mismatches = Vec::new();
        let mut max_abs_diff = 0.0f64;
        let mut checked = 0u64;
        'outer: for n in 1..=n_max {
            let mut sum = CoefficientValue::zero();
            for d in 1..=n {
                if n % d != 0 {
                    continue;
                }
                let half = match half_data.get(&(n / d)) {
                    Some(v) => v,
                    None => {
                        missing.push(n);
                        continue 'outer;
                    }
                };
                sum = sum.add(&self.twist_term(d).mul(half));
            }
            let lift_val = self.lift_coeff(n)?;
            checked += 1;
            let agree = match (sum.exact(), lift_val.exact()) {
                (Some(x), Some(y)) => x == y,
                _ => {
                    let d = (sum.approx() - lift_val.approx()).norm();
                    max_abs_diff = max_abs_diff.max(d);
                    d <= FLOAT_TOL * (1.0 + lift_val.approx().norm())
                }
            };
            if !agree {
                let d = (sum.approx() - lift_val.approx()).norm();
                max_abs_diff = max_abs_diff.max(d);
                mismatches.push(n);
            }
        }
        Ok(ForwardCheckReport {
            n_max,
            checked,
            missing,
            mismatches,
            max_abs_diff,
        })
    }

    /// The synthesized half-integral table n → a(t n²) for n ≤ n_max.
    pub fn synthesize_half_data(
        &self,
        n_max: u64,
    ) -> Result<BTreeMap<u64, CoefficientValue>, ShimuraError> {
        (1..=n_max)
            .map(|n| Ok((n, self.family_coeff(n)?)))
            .collect()
    }
}

/// The normalized pair at p: B_ζ before the χ_0 shift and A_ζ after.
#[derive(Clone, Debug)]
pub struct NormalizedAb {
    pub p: u64,
    pub zeta: ExactPhase,
    pub b: f64,
    pub a: f64,
}

#[derive(Clone, Debug)]
pub struct GeneratingFunctionReport {
    pub p: u64,
    pub n_terms: u32,
    pub mismatches: Vec<u32>,
    pub exact: bool,
    pub max_abs_diff: f64,
}

impl GeneratingFunctionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ForwardCheckReport {
    pub n_max: u64,
    pub checked: u64,
    pub missing: Vec<u64>,
    pub mismatches: Vec<u64>,
    pub max_abs_diff: f64,
}

impl ForwardCheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The Δ-driven family (t, k, N) = (t, 6, 4) used throughout the tests.
pub fn delta_family(t: u64, n_max: usize) -> Result<ShimuraFamily, ShimuraError> {
    let lift = crate::qseries::forms::delta(n_max);
    ShimuraFamily::new(t, 6, 4, DirichletCharacter::trivial(4), lift)
}

/// A family over the CM lift η(4z)²η(8z)² (weight 2, level 32), with the
/// level-4 convention for the half-integral side.
pub fn cm32_family(t: u64, n_max: usize) -> Result<ShimuraFamily, ShimuraError> {
    let lift = crate::qseries::forms::eta4_8(n_max);
    ShimuraFamily::new(t, 1, 4, DirichletCharacter::trivial(4), lift)
}
