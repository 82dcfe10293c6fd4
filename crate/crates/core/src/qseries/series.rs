//! Truncated power series over exact integers.

use super::coeff::{Accumulator, ExactInt};
use crate::map_range;

/// A power series Σ a_n q^n truncated to a fixed number of coefficients;
/// index 0 is the constant term and `len()` is the truncation length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<ExactInt>,
}

impl PowerSeries {
    pub fn zeros(len: usize) -> PowerSeries {
        PowerSeries {
            coeffs: vec![ExactInt::ZERO; len],
        }
    }

    /// The constant series 1.
    pub fn one(len: usize) -> PowerSeries {
        assert!(len >= 1);
        let mut s = PowerSeries::zeros(len);
        s.coeffs[0] = ExactInt::ONE;
        s
    }

    pub fn from_coeffs(coeffs: Vec<ExactInt>) -> PowerSeries {
        PowerSeries { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> &ExactInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[ExactInt] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, v: ExactInt) {
        self.coeffs[n] = v;
    }

    /// Multiply by a sparse polynomial Σ c_t q^{e_t}, truncating to the
    /// current length. Exact and bit-deterministic regardless of the thread
    /// count: every output coefficient is an independent finite sum taken in
    /// term order.
    pub fn mul_sparse(&self, terms: &[(usize, i64)]) -> PowerSeries {
        let len = self.len();
        let coeffs = map_range(len, |i| {
            let mut acc = Accumulator::new();
            for &(exp, c) in terms {
                if exp > i {
                    break;
                }
                acc.add_scaled(&self.coeffs[i - exp], c);
            }
            acc.finish()
        });
        PowerSeries { coeffs }
    }

    /// The series q^offset · self, re-truncated to `new_len` coefficients.
    pub fn shifted(&self, offset: usize, new_len: usize) -> PowerSeries {
        let mut coeffs = vec![ExactInt::ZERO; new_len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = i + offset;
            if j < new_len {
                coeffs[j] = c.clone();
            }
        }
        PowerSeries { coeffs }
    }
}
