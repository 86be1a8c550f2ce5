use crate::{Error, Result};

/// Numeric comparison thresholds used across the crate.
///
/// `zero_threshold` decides when a magnitude counts as zero (support
/// membership, pivot selection); `relative_tolerance` scales equality checks
/// between computed and expected values. The zero threshold never exceeds the
/// relative tolerance, so anything treated as structurally zero also compares
/// equal to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub zero_threshold: f64,
    pub relative_tolerance: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            zero_threshold: 1e-12,
            relative_tolerance: 1e-9,
        }
    }
}

impl TolerancePolicy {
    pub fn new(zero_threshold: f64, relative_tolerance: f64) -> Result<Self> {
        if !(zero_threshold.is_finite() && relative_tolerance.is_finite())
            || zero_threshold < 0.0
            || relative_tolerance < 0.0
            || zero_threshold > relative_tolerance
        {
            return Err(Error::InvalidTolerance {
                zero: zero_threshold,
                rel: relative_tolerance,
            });
        }
        Ok(TolerancePolicy {
            zero_threshold,
            relative_tolerance,
        })
    }

    /// True when `value` is close to `reference` in the absolute-plus-relative
    /// sense: `|value - reference| <= relative_tolerance * (1 + |reference|)`.
    pub fn close(&self, value: num_complex::Complex64, reference: num_complex::Complex64) -> bool {
        (value - reference).norm() <= self.relative_tolerance * (1.0 + reference.norm())
    }

    /// True when a magnitude counts as zero.
    pub fn is_zero(&self, magnitude: f64) -> bool {
        magnitude <= self.zero_threshold
    }
}
