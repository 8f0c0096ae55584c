//! Complex numbers carried as log-magnitude and phase.
//!
//! Trigonometric moments of high order underflow long before the ratios
//! between them stop being informative, so everything downstream of the
//! closed-form moments works with `(ln |z|, arg z)` pairs.

use num_complex::Complex64;
use serde::Serialize;

use crate::angle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogPolar {
    /// `ln |z|`; `-inf` marks an exact zero.
    pub log_magnitude: f64,
    /// `arg z` in `(-π, π]`; zero for an exact zero.
    pub phase: f64,
}

impl LogPolar {
    pub const ZERO: LogPolar = LogPolar {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub const ONE: LogPolar = LogPolar {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogPolar {
            log_magnitude,
            phase: angle::wrap_signed(phase),
        }
    }

    /// A nonnegative real given by its logarithm.
    pub fn from_log(log_value: f64) -> Self {
        Self::new(log_value, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogPolar::new(z.norm().ln(), z.arg())
    }

    /// A real number: phase 0 for positive, π for negative.
    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogPolar::new(x.ln(), 0.0)
        } else {
            LogPolar::new((-x).ln(), std::f64::consts::PI)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.magnitude(), self.phase)
    }

    pub fn mul(&self, other: &LogPolar) -> LogPolar {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogPolar::new(
            self.log_magnitude + other.log_magnitude,
            self.phase + other.phase,
        )
    }

    /// `self / other`; `None` when `other` is an exact zero.
    pub fn div(&self, other: &LogPolar) -> Option<LogPolar> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::ZERO);
        }
        Some(LogPolar::new(
            self.log_magnitude - other.log_magnitude,
            self.phase - other.phase,
        ))
    }

    pub fn powi(&self, n: i32) -> LogPolar {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        LogPolar::new(self.log_magnitude * n as f64, self.phase * n as f64)
    }

    /// Real part, as a log-polar real (phase 0 or π).
    pub fn real_part(&self) -> LogPolar {
        self.project(self.phase.cos())
    }

    /// Imaginary part, as a log-polar real (phase 0 or π).
    pub fn imag_part(&self) -> LogPolar {
        self.project(self.phase.sin())
    }

    fn project(&self, factor: f64) -> LogPolar {
        if self.is_zero() || factor == 0.0 {
            return Self::ZERO;
        }
        let phase = if factor > 0.0 { 0.0 } else { std::f64::consts::PI };
        LogPolar::new(self.log_magnitude + factor.abs().ln(), phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let z = Complex64::new(-0.3, 0.4);
        let p = LogPolar::from_complex(z);
        assert!((p.magnitude() - 0.5).abs() < 1e-15);
        assert!((p.to_complex() - z).norm() < 1e-15);
    }

    #[test]
    fn projections() {
        let z = LogPolar::from_complex(Complex64::new(-0.3, 0.4));
        assert!((z.real_part().to_complex().re + 0.3).abs() < 1e-15);
        assert!((z.imag_part().to_complex().re - 0.4).abs() < 1e-15);
        assert!(LogPolar::from_real(2.0).imag_part().is_zero());
    }

    #[test]
    fn zero_handling() {
        assert!(LogPolar::from_real(0.0).is_zero());
        assert!(LogPolar::ONE.div(&LogPolar::ZERO).is_none());
        assert_eq!(LogPolar::ZERO.div(&LogPolar::ONE), Some(LogPolar::ZERO));
    }
}
