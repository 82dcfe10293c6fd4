//! The sign interval unions A_{>0}, A_{<0} of the angle coordinate and
//! their measures under the two θ-measures.

use super::EquidistError;

/// A union of open intervals in [0, π], pairwise disjoint and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<IntervalUnion, EquidistError> {
        let mut prev_end = 0.0f64;
        for &(a, b) in &intervals {
            if !(0.0..=std::f64::consts::PI).contains(&a)
                || !(0.0..=std::f64::consts::PI).contains(&b)
                || a >= b
                || a < prev_end
            {
                return Err(EquidistError::BadIntervalUnion);
            }
            prev_end = b;
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn empty() -> IntervalUnion {
        IntervalUnion {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Membership in the open union.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }
}

/// Which θ-measure to integrate: (2/π)sin²θ dθ for the Sato-Tate case,
/// (1/2π)dθ + ½δ_{π/2} for the CM case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaMeasure {
    SatoTate,
    Cm,
}

/// The unions A_{>0} = ⋃_j ((2j−2)π/(ν+1), (2j−1)π/(ν+1)) and
/// A_{<0} = ⋃_j ((2j−1)π/(ν+1), 2jπ/(ν+1)), j = 1 … (ν+1)/2, on which
/// sin((ν+1)θ) is positive respectively negative. Only odd ν is supported.
pub fn sign_interval_union(nu: u32) -> Result<(IntervalUnion, IntervalUnion), EquidistError> {
    if nu == 0 || nu.is_multiple_of(2) {
        return Err(EquidistError::EvenNu(nu));
    }
    let denom = (nu + 1) as f64;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for j in 1..=nu.div_ceil(2) {
        let j = j as f64;
        pos.push((
            (2.0 * j - 2.0) * std::f64::consts::PI / denom,
            (2.0 * j - 1.0) * std::f64::consts::PI / denom,
        ));
        neg.push((
            (2.0 * j - 1.0) * std::f64::consts::PI / denom,
            2.0 * j * std::f64::consts::PI / denom,
        ));
    }
    Ok((IntervalUnion::new(pos)?, IntervalUnion::new(neg)?))
}

/// Measure of an interval union under the chosen θ-measure. The CM atom at
/// π/2 counts only when π/2 lies strictly inside an open interval.
pub fn measure_of_union(union: &IntervalUnion, measure: ThetaMeasure) -> f64 {
    match measure {
        ThetaMeasure::SatoTate => union
            .intervals()
            .iter()
            .map(|&(a, b)| {
                // ∫ (2/π) sin²θ dθ = (θ − sin θ cos θ)/π
                let anti = |t: f64| (t - t.sin() * t.cos()) / std::f64::consts::PI;
                anti(b) - anti(a)
            })
            .sum(),
        ThetaMeasure::Cm => {
            let continuous = union.total_length() / (2.0 * std::f64::consts::PI);
            let atom = if union.contains(std::f64::consts::FRAC_PI_2) {
                0.5
            } else {
                0.0
            };
            continuous + atom
        }
    }
}
