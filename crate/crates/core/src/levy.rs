use std::fmt;

use crate::error::{Error, Result};

/// Lévy index of the fractional kinetic term.
///
/// [`LevyIndex::new`] admits the open-closed range `1 < α ≤ 2`. The closed
/// range `1 ≤ α ≤ 2` is available through [`LevyIndex::inclusive`] for the
/// energy spectrum and for the `α = 1` row of the published reference table.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LevyIndex(f64);

impl LevyIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 1.0 && alpha <= 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain { alpha, range: "(1, 2]" })
        }
    }

    pub fn inclusive(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (1.0..=2.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain { alpha, range: "[1, 2]" })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// α/2, the exponent of the ladder-operator multiplier.
    #[inline]
    pub fn half(self) -> f64 {
        0.5 * self.0
    }

    /// Exponent of the ground-state envelope, α/2 + 1.
    #[inline]
    pub fn decay_exponent(self) -> f64 {
        0.5 * self.0 + 1.0
    }

    /// Rate of the ground-state envelope, 2/(α + 2).
    #[inline]
    pub fn decay_rate(self) -> f64 {
        2.0 / (self.0 + 2.0)
    }
}

impl fmt::Display for LevyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert!(LevyIndex::new(1.0).is_err());
        assert!(LevyIndex::new(2.0).is_ok());
        assert!(LevyIndex::new(2.0000001).is_err());
        assert!(LevyIndex::new(f64::NAN).is_err());
        assert!(LevyIndex::inclusive(1.0).is_ok());
        assert!(LevyIndex::inclusive(0.99).is_err());
    }

    #[test]
    fn envelope_parameters() {
        let a = LevyIndex::new(1.5).unwrap();
        assert_eq!(a.decay_exponent(), 1.75);
        assert!((a.decay_rate() - 2.0 / 3.5).abs() < 1e-16);
        // decay_rate * decay_exponent == 1, so the envelope derivative is -k^{α/2} E
        assert!((a.decay_rate() * a.decay_exponent() - 1.0).abs() < 1e-15);
    }
}
