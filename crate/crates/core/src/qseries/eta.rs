//! Dedekind-eta-product q-expansions via the pentagonal number theorem.
//!
//! `∏_{n≥1}(1 − q^{mn}) = Σ_{k∈ℤ} (−1)^k q^{m·k(3k−1)/2}`, so each eta
//! factor is a sparse ±1 polynomial with O(√(n/m)) terms and a product of
//! 24 factors stays exact at full speed. These expansions are the
//! independent oracle for genuine newform coefficients.


use super::coeff::ExactInt;
use super::series::PowerSeries;
use crate::characters::DirichletCharacter;
use crate::hecke::{CoefficientValue, NewformData};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QseriesError {
    #[error("eta product spec is empty or has a zero multiplier/exponent")]
    BadSpec,
    #[error("sum of multiplier*exponent is {sum}, not divisible by 24")]
    NotDivisibleBy24 { sum: u64 },
    #[error("cannot parse eta product spec {0:?}; expected \"m1:e1,m2:e2\"")]
    Parse(String),
    #[error("series does not start with a(1) = 1")]
    NotNormalized,
}

/// An eta product ∏ η(m_i z)^{e_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaProductSpec {
    factors: Vec<(u64, u32)>,
}

impl EtaProductSpec {
    pub fn new(factors: Vec<(u64, u32)>) -> Result<EtaProductSpec, QseriesError> {
        if factors.is_empty() || factors.iter().any(|&(m, e)| m == 0 || e == 0) {
            return Err(QseriesError::BadSpec);
        }
        Ok(EtaProductSpec { factors })
    }

    /// Parse `"m1:e1,m2:e2"`, e.g. `"1:24"` or `"4:2,8:2"`.
    pub fn parse(text: &str) -> Result<EtaProductSpec, QseriesError> {
        let mut factors = Vec::new();
        for part in text.split(',') {
            let (m, e) = part
                .split_once(':')
                .ok_or_else(|| QseriesError::Parse(text.to_string()))?;
            let m: u64 = m
                .trim()
                .parse()
                .map_err(|_| QseriesError::Parse(text.to_string()))?;
            let e: u32 = e
                .trim()
                .parse()
                .map_err(|_| QseriesError::Parse(text.to_string()))?;
            factors.push((m, e));
        }
        EtaProductSpec::new(factors)
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Twice the weight, Σ e_i (the weight itself may be half-integral).
    pub fn weight_twice(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    /// The exponent of the leading q-power, Σ m_i e_i / 24.
    pub fn leading_exponent(&self) -> Result<u64, QseriesError> {
        let sum: u64 = self.factors.iter().map(|&(m, e)| m * e as u64).sum();
        if !sum.is_multiple_of(24) {
            return Err(QseriesError::NotDivisibleBy24 { sum });
        }
        Ok(sum / 24)
    }
}

impl std::fmt::Display for EtaProductSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(m, e)| format!("{m}:{e}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Sparse terms of ∏(1 − q^{mn}): exponents m·k(3k−1)/2 over k = 1, −1,
/// 2, −2, … with sign (−1)^k, kept to exponents below `len`.
fn pentagonal_terms(m: u64, len: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0usize, 1i64)];
    let mut k = 1i64;
    loop {
        let mut grew = false;
        for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            let exp = m as i64 * g;
            if (exp as usize) < len {
                terms.push((exp as usize, if k % 2 == 1 { -1 } else { 1 }));
                grew = true;
            }
        }
        if !grew {
            break;
        }
        k += 1;
    }
    terms.sort_unstable_by_key(|&(e, _)| e);
    terms
}

/// The q^{m/24}-stripped expansion of η(mz), i.e. ∏(1 − q^{mn}), with
/// `n_max` coefficients (indices 0 … n_max−1).
pub fn eta_expand(m: u64, n_max: usize) -> PowerSeries {
    assert!(m >= 1 && n_max >= 1);
    let mut s = PowerSeries::zeros(n_max);
    for (exp, c) in pentagonal_terms(m, n_max) {
        s.set_coeff(exp, ExactInt::from(c));
    }
    s
}

/// Expand an eta product to coefficients a(n) for n ≤ n_max. The returned
/// series is indexed so that a(n) sits at index n; the leading exponent
/// Σ m_i e_i / 24 provides the shift, so specs with leading exponent 1 have
/// a(1) = 1.
pub fn eta_product_expand(
    spec: &EtaProductSpec,
    n_max: usize,
) -> Result<PowerSeries, QseriesError> {
    let lead = spec.leading_exponent()? as usize;
    let budget = (n_max + 1).saturating_sub(lead).max(1);
    let mut prod = PowerSeries::one(budget);
    for &(m, e) in spec.factors() {
        let terms = pentagonal_terms(m, budget);
        for _ in 0..e {
            prod = prod.mul_sparse(&terms);
        }
    }
    Ok(prod.shifted(lead, n_max + 1))
}

/// Extract the prime-indexed coefficients of a normalized series into a
/// [`NewformData`] (unnormalized integer scale). Requires a(1) = 1.
pub fn series_to_newform(
    series: &PowerSeries,
    weight: u32,
    level: u64,
    character: DirichletCharacter,
) -> Result<NewformData, QseriesError> {
    if series.len() < 2 || *series.coeff(1) != ExactInt::ONE {
        return Err(QseriesError::NotNormalized);
    }
    let max_n = series.len() - 1;
    let coeffs = crate::primes::primes_up_to(max_n as u64)
        .into_iter()
        .map(|p| {
            let a = series.coeff(p as usize);
            (p, CoefficientValue::from_bigint(a.to_bigint()))
        })
        .collect();
    Ok(NewformData::new(weight, level, character, coeffs, false))
}

/// The shipped oracle forms.
pub mod forms {
    use super::*;
    use crate::characters::character_from_exponents;

    /// Δ = η(z)^24: weight 12, level 1, trivial character.
    pub fn delta(n_max: usize) -> NewformData {
        let spec = EtaProductSpec::new(vec![(1, 24)]).unwrap();
        let series = eta_product_expand(&spec, n_max).unwrap();
        series_to_newform(&series, 12, 1, DirichletCharacter::trivial(1)).unwrap()
    }

    /// η(4z)^6: the CM form of weight 3 and level 16 whose character is the
    /// conductor-4 quadratic character.
    pub fn eta4_pow6(n_max: usize) -> NewformData {
        let spec = EtaProductSpec::new(vec![(4, 6)]).unwrap();
        let series = eta_product_expand(&spec, n_max).unwrap();
        let chi = character_from_exponents(16, &[1, 0]).unwrap();
        series_to_newform(&series, 3, 16, chi).unwrap()
    }

    /// η(z)²η(11z)²: the weight-2 level-11 form.
    pub fn eta1_11(n_max: usize) -> NewformData {
        let spec = EtaProductSpec::new(vec![(1, 2), (11, 2)]).unwrap();
        let series = eta_product_expand(&spec, n_max).unwrap();
        series_to_newform(&series, 2, 11, DirichletCharacter::trivial(11)).unwrap()
    }

    /// η(4z)²η(8z)²: the CM form of weight 2, level 32, trivial character.
    pub fn eta4_8(n_max: usize) -> NewformData {
        let spec = EtaProductSpec::new(vec![(4, 2), (8, 2)]).unwrap();
        let series = eta_product_expand(&spec, n_max).unwrap();
        series_to_newform(&series, 2, 32, DirichletCharacter::trivial(32)).unwrap()
    }
}
