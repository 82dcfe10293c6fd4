//! Exact root-of-unity phases and half-plane sign classification.
//!
//! A phase `num/den` stands for the complex number `e^{2πi·num/den}`; the
//! fraction is kept reduced with `0 ≤ num < den`, so the multiplicative
//! order of the phase is exactly `den`. Every sign decision about
//! `Re(ζ^ν e^{−iφ})` reduces to comparing a total phase against the quarter
//! turns 1/4 and 3/4, which is exact rational arithmetic whenever φ is a
//! rational multiple of π.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;

use crate::FLOAT_TOL;

/// Strict sign of a real quantity, with an explicit zero class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignClass {
    Neg,
    Zero,
    Pos,
}

impl SignClass {
    /// Sign of a product: zero is absorbing.
    pub fn product(self, other: SignClass) -> SignClass {
        use SignClass::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Pos, Pos) | (Neg, Neg) => Pos,
            _ => Neg,
        }
    }

    /// Classify a float with the given absolute tolerance for zero.
    pub fn from_f64(x: f64, tol: f64) -> SignClass {
        if x.abs() <= tol {
            SignClass::Zero
        } else if x > 0.0 {
            SignClass::Pos
        } else {
            SignClass::Neg
        }
    }

    /// Classify an exact rational.
    pub fn from_ratio(r: &Ratio<i64>) -> SignClass {
        match r.numer().cmp(&0) {
            std::cmp::Ordering::Less => SignClass::Neg,
            std::cmp::Ordering::Equal => SignClass::Zero,
            std::cmp::Ordering::Greater => SignClass::Pos,
        }
    }

    pub fn flip(self) -> SignClass {
        match self {
            SignClass::Pos => SignClass::Neg,
            SignClass::Neg => SignClass::Pos,
            SignClass::Zero => SignClass::Zero,
        }
    }
}

/// A root of unity `e^{2πi·num/den}` as a reduced fraction of a turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPhase {
    num: i64,
    den: i64,
}

impl ExactPhase {
    /// The value 1 (phase 0/1).
    pub const ONE: ExactPhase = ExactPhase { num: 0, den: 1 };
    /// The value −1 (phase 1/2).
    pub const MINUS_ONE: ExactPhase = ExactPhase { num: 1, den: 2 };
    /// The value i (phase 1/4).
    pub const I: ExactPhase = ExactPhase { num: 1, den: 4 };

    /// Build the phase `num/den` reduced modulo one turn. Panics if `den = 0`.
    pub fn new(num: i64, den: i64) -> ExactPhase {
        assert!(den != 0, "phase denominator must be non-zero");
        let (mut num, mut den) = (num as i128, den as i128);
        if den < 0 {
            num = -num;
            den = -den;
        }
        num = num.rem_euclid(den);
        let g = num.gcd(&den);
        ExactPhase {
            num: (num / g) as i64,
            den: (den / g) as i64,
        }
    }

    pub fn from_turns(t: Ratio<i64>) -> ExactPhase {
        ExactPhase::new(*t.numer(), *t.denom())
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Fraction of a full turn in `[0, 1)`.
    pub fn turns(&self) -> Ratio<i64> {
        Ratio::new(self.num, self.den)
    }

    /// Multiplicative order of the root of unity.
    pub fn order(&self) -> u64 {
        self.den as u64
    }

    /// Phase product: addition of turns modulo 1.
    pub fn mul(&self, other: &ExactPhase) -> ExactPhase {
        let num = self.num as i128 * other.den as i128 + other.num as i128 * self.den as i128;
        let den = self.den as i128 * other.den as i128;
        let num = num.rem_euclid(den);
        let g = num.gcd(&den);
        ExactPhase {
            num: (num / g) as i64,
            den: (den / g) as i64,
        }
    }

    /// `self^e` for any integer exponent (reduced modulo the order first).
    pub fn pow(&self, e: i64) -> ExactPhase {
        let e = e.rem_euclid(self.den);
        ExactPhase::new(
            ((self.num as i128 * e as i128) % self.den as i128) as i64,
            self.den,
        )
    }

    pub fn inv(&self) -> ExactPhase {
        ExactPhase::new(-self.num, self.den)
    }

    pub fn as_complex(&self) -> Complex64 {
        let angle = 2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64;
        Complex64::new(angle.cos(), angle.sin())
    }

    /// Exact sign of the real part: positive on `(−1/4, 1/4)` turns, zero on
    /// the quarter turns, negative on `(1/4, 3/4)`.
    pub fn re_sign(&self) -> SignClass {
        let q = self.turns();
        let quarter = Ratio::new(1, 4);
        let three_quarters = Ratio::new(3, 4);
        if q == quarter || q == three_quarters {
            SignClass::Zero
        } else if q < quarter || q > three_quarters {
            SignClass::Pos
        } else {
            SignClass::Neg
        }
    }

    /// Exact sign of the imaginary part: positive on `(0, 1/2)` turns.
    pub fn im_sign(&self) -> SignClass {
        let q = self.turns();
        let half = Ratio::new(1, 2);
        if q == Ratio::new(0, 1) || q == half {
            SignClass::Zero
        } else if q < half {
            SignClass::Pos
        } else {
            SignClass::Neg
        }
    }

    /// Number of quarter turns when the phase is one of 1, i, −1, −i.
    pub fn quarter_count(&self) -> Option<u8> {
        if 4 % self.den == 0 {
            Some((self.num * (4 / self.den)) as u8)
        } else {
            None
        }
    }

    /// Canonical exponent `m` with `1 ≤ m ≤ r` and `self = e^{2πi·m/r}`,
    /// or `None` when the phase is not an `r`-th root of unity.
    pub fn canonical_exponent(&self, r: u64) -> Option<u64> {
        let r = r as i64;
        if r <= 0 || r % self.den != 0 {
            return None;
        }
        let m = self.num * (r / self.den);
        Some(if m == 0 { r as u64 } else { m as u64 })
    }
}

/// A half-plane direction φ ∈ [0, π), exact when it is a rational multiple
/// of π and free real otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phi {
    /// φ = (a/b)·π with 0 ≤ a/b < 1 for caller-facing values; internal
    /// rotations (imaginary-part queries) may push it past that range, which
    /// the classification handles by reducing modulo a full turn.
    RationalPi(Ratio<i64>),
    /// Free real φ in radians; classification falls back to [`FLOAT_TOL`].
    Real(f64),
}

impl Phi {
    pub const ZERO: Phi = Phi::RationalPi(Ratio::new_raw(0, 1));

    /// `φ = (a/b)·π`, requiring `0 ≤ a/b < 1`.
    pub fn rational(a: i64, b: i64) -> Result<Phi, PhiError> {
        if b == 0 {
            return Err(PhiError::ZeroDenominator);
        }
        let r = Ratio::new(a, b);
        if r < Ratio::new(0, 1) || r >= Ratio::new(1, 1) {
            return Err(PhiError::OutOfRange);
        }
        Ok(Phi::RationalPi(r))
    }

    pub fn real(phi: f64) -> Result<Phi, PhiError> {
        if !(0.0..std::f64::consts::PI).contains(&phi) {
            return Err(PhiError::OutOfRange);
        }
        Ok(Phi::Real(phi))
    }

    pub fn radians(&self) -> f64 {
        match self {
            Phi::RationalPi(r) => {
                std::f64::consts::PI * *r.numer() as f64 / *r.denom() as f64
            }
            Phi::Real(x) => *x,
        }
    }

    /// φ expressed in turns (fractions of 2π), exact case only.
    pub fn turns(&self) -> Option<Ratio<i64>> {
        match self {
            Phi::RationalPi(r) => Some(Ratio::new(*r.numer(), 2 * *r.denom())),
            Phi::Real(_) => None,
        }
    }

    /// The direction for imaginary-part queries: `Im(z e^{−iφ}) =
    /// Re(z e^{−i(φ+π/2)})`.
    pub fn plus_quarter_turn(&self) -> Phi {
        match self {
            Phi::RationalPi(r) => Phi::RationalPi(r + Ratio::new(1, 2)),
            Phi::Real(x) => Phi::Real(x + std::f64::consts::FRAC_PI_2),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PhiError {
    #[error("phi denominator must be non-zero")]
    ZeroDenominator,
    #[error("phi must lie in [0, pi) (as a fraction of pi, in [0, 1))")]
    OutOfRange,
}

/// Exact (or tolerance-based, for free real φ) sign of
/// `Re(e^{2πi·phase_turns} · e^{−iφ})`.
pub fn re_sign_rotated(phase: &ExactPhase, phi: &Phi) -> SignClass {
    match phi.turns() {
        Some(t) => {
            let total = phase.turns() - t;
            ExactPhase::from_turns(total).re_sign()
        }
        None => {
            let angle = 2.0 * std::f64::consts::PI * phase.num as f64 / phase.den as f64
                - phi.radians();
            SignClass::from_f64(angle.cos(), FLOAT_TOL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_reduction_and_order() {
        let p = ExactPhase::new(6, 8);
        assert_eq!((p.num(), p.den()), (3, 4));
        assert_eq!(p.order(), 4);
        assert_eq!(ExactPhase::new(-1, 4), ExactPhase::new(3, 4));
        assert_eq!(ExactPhase::new(5, 5), ExactPhase::ONE);
    }

    #[test]
    fn multiplication_adds_turns_mod_one() {
        let a = ExactPhase::new(1, 3);
        let b = ExactPhase::new(1, 2);
        assert_eq!(a.mul(&b), ExactPhase::new(5, 6));
        assert_eq!(a.mul(&a).mul(&a), ExactPhase::ONE);
        assert_eq!(a.mul(&a.inv()), ExactPhase::ONE);
    }

    #[test]
    fn pow_reduces_exponent() {
        let a = ExactPhase::new(1, 6);
        assert_eq!(a.pow(7), ExactPhase::new(1, 6));
        assert_eq!(a.pow(-1), ExactPhase::new(5, 6));
        assert_eq!(a.pow(0), ExactPhase::ONE);
    }

    #[test]
    fn real_part_signs_on_quarter_grid() {
        assert_eq!(ExactPhase::ONE.re_sign(), SignClass::Pos);
        assert_eq!(ExactPhase::MINUS_ONE.re_sign(), SignClass::Neg);
        assert_eq!(ExactPhase::I.re_sign(), SignClass::Zero);
        assert_eq!(ExactPhase::new(3, 4).re_sign(), SignClass::Zero);
        assert_eq!(ExactPhase::new(1, 3).re_sign(), SignClass::Neg);
        assert_eq!(ExactPhase::new(1, 8).re_sign(), SignClass::Pos);
    }

    #[test]
    fn canonical_exponent_ranges_one_to_r() {
        assert_eq!(ExactPhase::ONE.canonical_exponent(4), Some(4));
        assert_eq!(ExactPhase::new(1, 4).canonical_exponent(4), Some(1));
        assert_eq!(ExactPhase::new(1, 2).canonical_exponent(4), Some(2));
        assert_eq!(ExactPhase::new(1, 3).canonical_exponent(4), None);
    }

    #[test]
    fn rotated_sign_is_exact_for_rational_phi() {
        // Re(1 · e^{-i·pi/2}) = 0 exactly.
        let phi = Phi::rational(1, 2).unwrap();
        assert_eq!(re_sign_rotated(&ExactPhase::ONE, &phi), SignClass::Zero);
        // Re(i · e^{-i·pi/2}) = 1.
        assert_eq!(re_sign_rotated(&ExactPhase::I, &phi), SignClass::Pos);
        // Re(e^{2πi/3}) < 0.
        assert_eq!(
            re_sign_rotated(&ExactPhase::new(1, 3), &Phi::ZERO),
            SignClass::Neg
        );
    }

    #[test]
    fn phi_range_is_validated() {
        assert!(Phi::rational(1, 1).is_err());
        assert!(Phi::rational(-1, 4).is_err());
        assert!(Phi::rational(3, 4).is_ok());
        assert!(Phi::real(3.2).is_err());
    }

    #[test]
    fn quarter_turn_shift_turns_im_into_re() {
        let phi = Phi::ZERO.plus_quarter_turn();
        // Im(z) > 0 for z = e^{2πi/8}; as a rotated real part the same holds.
        assert_eq!(
            re_sign_rotated(&ExactPhase::new(1, 8), &phi),
            SignClass::Pos
        );
    }
}
