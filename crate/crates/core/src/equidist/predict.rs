//! Exact predicted sign densities: the density table for ζ-classes, the
//! half-plane predictors for prime families and Shimura families, and the
//! exact enumeration for fixed primes with rational angle.

use num_integer::Integer;
use num_rational::Ratio;

use super::EquidistError;
use crate::characters::{sqrt_convention, DirichletCharacter};
use crate::phase::{re_sign_rotated, ExactPhase, Phi, SignClass};

/// Exact predicted densities over all primes (or all exponents): the mass
/// of the strictly-positive slice, the strictly-negative slice and the
/// nonzero set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredictedDensity {
    pub pos: Ratio<i64>,
    pub neg: Ratio<i64>,
    pub nonzero: Ratio<i64>,
}

impl PredictedDensity {
    /// The predicted proportion of positive values among nonzero ones, the
    /// quantity the empirical ratios are compared against (`None` for an
    /// identically trivial slice).
    pub fn pos_among_nonzero(&self) -> Option<Ratio<i64>> {
        (self.nonzero != Ratio::new(0, 1)).then(|| self.pos / self.nonzero)
    }
}

fn require_rational(phi: &Phi) -> Result<(), EquidistError> {
    match phi {
        Phi::RationalPi(_) => Ok(()),
        Phi::Real(_) => Err(EquidistError::RealPhiUnsupported),
    }
}

/// Predicted densities for the family {a(p^ν)}_p sliced at angle φ, for odd
/// ν: enumerate ξ over the image of the character, take ζ by the square
/// root convention, and count the classes with Re(ζ^ν e^{−iφ}) ≠ 0. Both
/// signed densities are half the nonzero density; in the CM case the
/// within-class nonzero mass is ½ instead of 1, scaling all three outputs.
pub fn predicted_density_thm1_order(
    r_eps: u64,
    nu: u32,
    phi: &Phi,
    cm: bool,
) -> Result<PredictedDensity, EquidistError> {
    if nu == 0 || nu.is_multiple_of(2) {
        return Err(EquidistError::EvenNu(nu));
    }
    require_rational(phi)?;
    let r = r_eps as i64;
    let mut nonzero_classes = 0i64;
    for m in 1..=r {
        let xi = ExactPhase::new(m, r);
        let zeta = sqrt_convention(&xi, r_eps).expect("m/r is an r-th root");
        if re_sign_rotated(&zeta.pow(nu as i64), phi) != SignClass::Zero {
            nonzero_classes += 1;
        }
    }
    let class_mass = if cm {
        Ratio::new(1, 2 * r)
    } else {
        Ratio::new(1, r)
    };
    let nonzero = Ratio::from_integer(nonzero_classes) * class_mass;
    let half = nonzero / Ratio::from_integer(2);
    Ok(PredictedDensity {
        pos: half,
        neg: half,
        nonzero,
    })
}

pub fn predicted_density_thm1(
    chi: &DirichletCharacter,
    nu: u32,
    phi: &Phi,
    cm: bool,
) -> Result<PredictedDensity, EquidistError> {
    predicted_density_thm1_order(chi.order(), nu, phi, cm)
}

/// The CM classification of a Shimura family: not CM, CM with χ_0 different
/// from both the trivial character and the CM-field character, CM with
/// χ_0 trivial, and CM with χ_0 equal to the field character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmCase {
    NonCm,
    CmOther,
    CmTrivial,
    CmF,
}

impl CmCase {
    pub fn parse(s: &str) -> Option<CmCase> {
        match s {
            "non-cm" | "noncm" => Some(CmCase::NonCm),
            "cm-other" => Some(CmCase::CmOther),
            "cm-trivial" | "cm-triv" => Some(CmCase::CmTrivial),
            "cm-f" => Some(CmCase::CmF),
            _ => None,
        }
    }
}

impl std::fmt::Display for CmCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CmCase::NonCm => "non-cm",
            CmCase::CmOther => "cm-other",
            CmCase::CmTrivial => "cm-trivial",
            CmCase::CmF => "cm-f",
        };
        write!(f, "{s}")
    }
}

/// The per-class density table: δ(ℙ'_{>0}(ζ)) and δ(ℙ'_{<0}(ζ)) as
/// functions of the order r_ε and the CM case.
pub fn lemma3_predicted(r_eps: u64, case: CmCase) -> (Ratio<i64>, Ratio<i64>) {
    let r = r_eps as i64;
    match case {
        CmCase::NonCm | CmCase::CmOther => (Ratio::new(1, 2 * r), Ratio::new(1, 2 * r)),
        CmCase::CmTrivial => (Ratio::new(1, 4 * r), Ratio::new(3, 4 * r)),
        CmCase::CmF => (Ratio::new(3, 4 * r), Ratio::new(1, 4 * r)),
    }
}

/// Predicted densities for {a(t p²)}_p sliced at angle φ: enumerate ζ over
/// the image of ε with the exact sign of Re(ζ e^{−iφ}) and combine the
/// per-class table.
pub fn predicted_density_thm3_order(
    r_eps: u64,
    phi: &Phi,
    case: CmCase,
) -> Result<PredictedDensity, EquidistError> {
    require_rational(phi)?;
    let r = r_eps as i64;
    let mut n_pos = 0i64;
    let mut n_neg = 0i64;
    for j in 0..r {
        let zeta = ExactPhase::new(j, r);
        match re_sign_rotated(&zeta, phi) {
            SignClass::Pos => n_pos += 1,
            SignClass::Neg => n_neg += 1,
            SignClass::Zero => {}
        }
    }
    let nonzero = Ratio::new(n_pos + n_neg, r);
    let (pos, neg) = match case {
        CmCase::NonCm | CmCase::CmOther => {
            let half = nonzero / Ratio::from_integer(2);
            (half, half)
        }
        CmCase::CmF => (
            nonzero / Ratio::from_integer(4) + Ratio::new(n_pos, 2 * r),
            nonzero / Ratio::from_integer(4) + Ratio::new(n_neg, 2 * r),
        ),
        CmCase::CmTrivial => (
            nonzero / Ratio::from_integer(4) + Ratio::new(n_neg, 2 * r),
            nonzero / Ratio::from_integer(4) + Ratio::new(n_pos, 2 * r),
        ),
    };
    Ok(PredictedDensity { pos, neg, nonzero })
}

/// The period t_ε of the sequence ν ↦ Re(ζ^ν e^{−iφ}) for ζ indexed by j:
/// with r' = r/gcd(r, j), the period is 2r' when j/gcd(r, j) is odd and r'
/// when it is even.
pub fn t_epsilon(r_eps: u64, j: u64) -> u64 {
    let g = r_eps.gcd(&j);
    let r_prime = r_eps / g;
    if (j / g) % 2 == 1 {
        2 * r_prime
    } else {
        r_prime
    }
}

/// Exact limiting sign densities of ν ↦ sin(2π(ν+1)n/m)·Re(ζ^ν e^{−iφ})
/// for a rational angle θ/2π = n/m ∈ (0, ½): enumerate one full period.
/// ζ is the class indexed by 1 ≤ j ≤ r: e^{πij/r} for even r and
/// e^{2πij/r} for odd r.
///
/// When gcd(m, t_ε) = 1 the sine factor runs through full periods inside
/// every rotation class and the positive and negative densities agree.
/// When the periods share a factor the two sequences correlate and the
/// densities can be one-sided (θ = π/2 against an order-2 rotation leaves
/// every term ≥ 0); the enumeration is exact either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalCasePrediction {
    pub pos: Ratio<i64>,
    pub neg: Ratio<i64>,
    pub nonzero: Ratio<i64>,
    /// One full period of the combined sequence.
    pub period: u64,
}

impl RationalCasePrediction {
    pub fn pos_among_nonzero(&self) -> Option<Ratio<i64>> {
        (self.nonzero != Ratio::new(0, 1)).then(|| self.pos / self.nonzero)
    }
}

pub fn rational_case_prediction(
    n: u64,
    m: u64,
    r_eps: u64,
    j: u64,
    phi: &Phi,
) -> Result<RationalCasePrediction, EquidistError> {
    if m == 0 || n == 0 || n.gcd(&m) != 1 || 2 * n >= m {
        return Err(EquidistError::BadRationalAngle { n, m });
    }
    if j == 0 || j > r_eps {
        return Err(EquidistError::BadClassIndex { j, r_eps });
    }
    require_rational(phi)?;
    let zeta = if r_eps.is_multiple_of(2) {
        ExactPhase::new(j as i64, 2 * r_eps as i64)
    } else {
        ExactPhase::new(j as i64, r_eps as i64)
    };
    let period = m.lcm(&t_epsilon(r_eps, j));
    assert!(period <= 10_000_000, "period {period} beyond desk scale");
    let mut pos = 0i64;
    let mut neg = 0i64;
    for nu in 1..=period {
        let sin_sign = sin_sign_of_fraction((nu + 1) as u128 * n as u128, m);
        let cos_sign = re_sign_rotated(&zeta.pow(nu as i64), phi);
        match sin_sign.product(cos_sign) {
            SignClass::Pos => pos += 1,
            SignClass::Neg => neg += 1,
            SignClass::Zero => {}
        }
    }
    let period_i = period as i64;
    Ok(RationalCasePrediction {
        pos: Ratio::new(pos, period_i),
        neg: Ratio::new(neg, period_i),
        nonzero: Ratio::new(pos + neg, period_i),
        period,
    })
}

/// Exact sign of sin(2π·num/m).
pub(crate) fn sin_sign_of_fraction(num: u128, m: u64) -> SignClass {
    let s = (num % m as u128) as u64;
    if s == 0 || 2 * s == m {
        SignClass::Zero
    } else if 2 * s < m {
        SignClass::Pos
    } else {
        SignClass::Neg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn thm1_trivial_character() {
        let p = predicted_density_thm1_order(1, 1, &Phi::ZERO, false).unwrap();
        assert_eq!(p.pos, ratio(1, 2));
        assert_eq!(p.neg, ratio(1, 2));
        assert_eq!(p.nonzero, ratio(1, 1));
        // orthogonal slice: ζ = 1, φ = π/2 kills the class
        let phi = Phi::rational(1, 2).unwrap();
        let p = predicted_density_thm1_order(1, 1, &phi, false).unwrap();
        assert_eq!(p.nonzero, ratio(0, 1));
        assert_eq!(p.pos, ratio(0, 1));
    }

    #[test]
    fn thm1_even_nu_rejected_and_real_phi_rejected() {
        assert!(matches!(
            predicted_density_thm1_order(1, 2, &Phi::ZERO, false),
            Err(EquidistError::EvenNu(2))
        ));
        assert!(matches!(
            predicted_density_thm1_order(1, 1, &Phi::Real(0.3), false),
            Err(EquidistError::RealPhiUnsupported)
        ));
    }

    #[test]
    fn thm1_order_two_class_count() {
        // r = 2: ξ = −1 → ζ = i (class dies at φ = 0), ξ = 1 → ζ = −1
        let p = predicted_density_thm1_order(2, 1, &Phi::ZERO, false).unwrap();
        assert_eq!(p.nonzero, ratio(1, 2));
        assert_eq!(p.pos, ratio(1, 4));
    }

    #[test]
    fn thm1_brute_force_cross_check() {
        // non-CM nonzero density must equal the count of ξ whose ζ^ν e^{−iφ}
        // avoids the quarter turns, over r_ε
        for r in 1..=24u64 {
            for nu in [1u32, 3, 5] {
                for (a, b) in [(0i64, 1i64), (1, 4), (1, 3), (5, 7)] {
                    let phi = Phi::rational(a, b).unwrap();
                    let p = predicted_density_thm1_order(r, nu, &phi, false).unwrap();
                    let mut count = 0i64;
                    for m in 1..=r as i64 {
                        let zeta = sqrt_convention(&ExactPhase::new(m, r as i64), r).unwrap();
                        let total = zeta.pow(nu as i64).turns() - phi.turns().unwrap();
                        let t = ExactPhase::from_turns(total).turns();
                        if t != Ratio::new(1, 4) && t != Ratio::new(3, 4) {
                            count += 1;
                        }
                    }
                    assert_eq!(p.nonzero, Ratio::new(count, r as i64), "r {r} nu {nu}");
                    assert_eq!(p.pos + p.neg, p.nonzero);
                    assert_eq!(p.pos, p.neg);
                }
            }
        }
    }

    #[test]
    fn thm1_cm_halves_everything() {
        let base = predicted_density_thm1_order(1, 1, &Phi::ZERO, false).unwrap();
        let cm = predicted_density_thm1_order(1, 1, &Phi::ZERO, true).unwrap();
        assert_eq!(cm.nonzero * Ratio::from_integer(2), base.nonzero);
        assert_eq!(cm.pos, ratio(1, 4));
        assert_eq!(cm.pos + cm.neg, cm.nonzero);
    }

    #[test]
    fn per_class_density_table() {
        assert_eq!(lemma3_predicted(1, CmCase::CmF), (ratio(3, 4), ratio(1, 4)));
        assert_eq!(
            lemma3_predicted(1, CmCase::CmTrivial),
            (ratio(1, 4), ratio(3, 4))
        );
        assert_eq!(
            lemma3_predicted(2, CmCase::NonCm),
            (ratio(1, 4), ratio(1, 4))
        );
        assert_eq!(
            lemma3_predicted(2, CmCase::CmOther),
            (ratio(1, 4), ratio(1, 4))
        );
    }

    #[test]
    fn thm3_cases_at_trivial_character() {
        let f = predicted_density_thm3_order(1, &Phi::ZERO, CmCase::CmF).unwrap();
        assert_eq!((f.pos, f.neg), (ratio(3, 4), ratio(1, 4)));
        let t = predicted_density_thm3_order(1, &Phi::ZERO, CmCase::CmTrivial).unwrap();
        assert_eq!((t.pos, t.neg), (ratio(1, 4), ratio(3, 4)));
        let n = predicted_density_thm3_order(1, &Phi::ZERO, CmCase::NonCm).unwrap();
        assert_eq!((n.pos, n.neg, n.nonzero), (ratio(1, 2), ratio(1, 2), ratio(1, 1)));
        // orthogonal slice
        let phi = Phi::rational(1, 2).unwrap();
        let z = predicted_density_thm3_order(1, &phi, CmCase::NonCm).unwrap();
        assert_eq!(z.nonzero, ratio(0, 1));
    }

    #[test]
    fn thm3_pos_plus_neg_is_nonzero() {
        for r in 1..=12u64 {
            for case in [CmCase::NonCm, CmCase::CmOther, CmCase::CmTrivial, CmCase::CmF] {
                for (a, b) in [(0i64, 1i64), (1, 4), (2, 3)] {
                    let phi = Phi::rational(a, b).unwrap();
                    let p = predicted_density_thm3_order(r, &phi, case).unwrap();
                    assert_eq!(p.pos + p.neg, p.nonzero, "r {r} case {case:?}");
                }
            }
        }
    }

    #[test]
    fn t_epsilon_examples() {
        assert_eq!(t_epsilon(2, 1), 4);
        assert_eq!(t_epsilon(6, 4), 3);
        assert_eq!(t_epsilon(1, 1), 2);
    }

    #[test]
    fn rational_case_quarter_angle() {
        // θ/2π = 1/4, trivial character, φ = 0: signs cycle 0, −, 0, +
        let p = rational_case_prediction(1, 4, 1, 1, &Phi::ZERO).unwrap();
        assert_eq!(p.pos, ratio(1, 4));
        assert_eq!(p.neg, ratio(1, 4));
        assert_eq!(p.nonzero, ratio(1, 2));
        assert_eq!(p.pos_among_nonzero(), Some(ratio(1, 2)));
    }

    #[test]
    fn rational_case_third_angle() {
        let p = rational_case_prediction(1, 3, 1, 1, &Phi::ZERO).unwrap();
        assert_eq!(p.pos, ratio(1, 3));
        assert_eq!(p.neg, ratio(1, 3));
        assert_eq!(p.pos_among_nonzero(), Some(ratio(1, 2)));
    }

    #[test]
    fn rational_case_symmetry_when_periods_are_coprime() {
        for (n, m) in [(1u64, 3u64), (1, 4), (1, 5), (2, 5), (3, 7), (2, 7)] {
            for (r, j) in [(1u64, 1u64), (2, 1), (2, 2), (4, 3), (6, 4)] {
                if m.gcd(&t_epsilon(r, j)) != 1 {
                    continue;
                }
                for (a, b) in [(0i64, 1i64), (1, 4), (1, 3)] {
                    let phi = Phi::rational(a, b).unwrap();
                    let p = rational_case_prediction(n, m, r, j, &phi).unwrap();
                    assert_eq!(p.pos, p.neg, "n/m {n}/{m} r {r} j {j} phi {a}/{b}");
                }
            }
        }
    }

    #[test]
    fn rational_case_correlated_periods_can_be_one_sided() {
        // θ/2π = 1/3 against ζ = e^{2πi/3} (r = 6, j = 4): the sine and
        // rotation sequences share period 3 and every product term is ≥ 0.
        let p = rational_case_prediction(1, 3, 6, 4, &Phi::ZERO).unwrap();
        assert_eq!(p.pos, ratio(2, 3));
        assert_eq!(p.neg, ratio(0, 1));
        // The same happens for a vanishing coefficient against an order-2
        // character (θ = π/2, ζ = i): a(p^ν) is p^ν or 0, never negative.
        let p = rational_case_prediction(1, 4, 2, 1, &Phi::ZERO).unwrap();
        assert_eq!(p.neg, ratio(0, 1));
        assert_eq!(p.pos, ratio(1, 2));
    }

    #[test]
    fn rational_case_domain_checks() {
        assert!(rational_case_prediction(2, 4, 1, 1, &Phi::ZERO).is_err()); // not reduced
        assert!(rational_case_prediction(2, 3, 1, 1, &Phi::ZERO).is_err()); // ≥ 1/2
        assert!(rational_case_prediction(1, 3, 2, 3, &Phi::ZERO).is_err()); // j > r
    }
}
