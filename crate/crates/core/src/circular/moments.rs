//! Trigonometric moments of the circular families.
//!
//! The closed forms are written against the `p`th moment
//! `φₚ = αₚ + iβₚ = E[exp(ipΘ)]`:
//!
//! * sine-skewed: `φₚ = e^{ipμ} α₀,ₚ (1 + iλ rₚ/2)` with
//!   `rₚ = (α₀,ₚ₋₁ − α₀,ₚ₊₁)/α₀,ₚ`;
//! * Möbius–Cardioid: `φₚ = ρ_α^{p−1} e^{ipμ} (p ρ̄ (1−ρ_α²) e^{iξ} + ρ_α)`.
//!
//! Negative orders follow from `φ₋ₚ = conj(φₚ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::model::{CircularModel, SymmetricBase};
use crate::angle;
use crate::error::{Error, Result};
use crate::polar::LogPolar;
use crate::quadrature::{self, QuadOptions};

/// Largest `|p|` accepted by the closed forms.
pub const MAX_CLOSED_ORDER: i64 = 1_000_000;
/// Largest order accepted by the log-polar moments, which stay exact as long
/// as `p · μ` can be reduced without loss.
pub const MAX_LOG_ORDER: u64 = 1_000_000_000;
/// Largest `|p|` accepted by the quadrature oracle.
pub const MAX_QUADRATURE_ORDER: i64 = 500;
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigMoment {
    pub p: i64,
    pub alpha: f64,
    pub beta: f64,
}

impl TrigMoment {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }

    pub fn resultant_length(&self) -> f64 {
        self.alpha.hypot(self.beta)
    }
}

/// `ρₚ` with its logarithm; `log_value` stays finite after `value` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MrlEval {
    pub p: u64,
    pub value: f64,
    pub log_value: f64,
}

fn check_closed_order(p: i64) -> Result<()> {
    if p.abs() > MAX_CLOSED_ORDER {
        return Err(Error::Domain(format!(
            "moment order {p} outside |p| <= {MAX_CLOSED_ORDER}"
        )));
    }
    Ok(())
}

impl CircularModel {
    /// `φₚ` for `0 ≤ p ≤ 10⁹` in log-polar form.
    pub fn log_moment(&self, p: u64) -> Result<LogPolar> {
        if p > MAX_LOG_ORDER {
            return Err(Error::Domain(format!(
                "moment order {p} outside p <= {MAX_LOG_ORDER}"
            )));
        }
        if p == 0 {
            return Ok(LogPolar::ONE);
        }
        let turn = angle::reduce_product(p as i64, self.mu());
        match self {
            CircularModel::Mc(m) => {
                let ra = m.rho_alpha;
                let bracket = Complex64::from_polar(p as f64 * m.rho_bar * (1.0 - ra * ra), m.xi)
                    + Complex64::new(ra, 0.0);
                let inner = LogPolar::from_complex(bracket);
                if inner.is_zero() {
                    return Ok(LogPolar::ZERO);
                }
                Ok(LogPolar::new(
                    (p - 1) as f64 * ra.ln() + inner.log_magnitude,
                    turn + inner.phase,
                ))
            }
            _ => {
                let (base, lambda) = self.sine_skewed().expect("sine-skewed family");
                let skew = 0.5 * lambda * base.moment_ratio(p);
                Ok(LogPolar::new(
                    base.log_cosine_moment(p)? + 0.5 * (skew * skew).ln_1p(),
                    turn + skew.atan(),
                ))
            }
        }
    }

    /// Closed-form `(αₚ, βₚ)` for `|p| ≤ 10⁶`.
    pub fn trig_moment_closed(&self, p: i64) -> Result<TrigMoment> {
        check_closed_order(p)?;
        let order = p.unsigned_abs();
        if order == 0 {
            return Ok(TrigMoment {
                p,
                alpha: 1.0,
                beta: 0.0,
            });
        }
        let turn = angle::reduce_product(order as i64, self.mu());
        let (alpha, beta) = match self {
            CircularModel::Mc(m) => {
                let ra = m.rho_alpha;
                let lead = order as f64 * m.rho_bar * ra.powf((order - 1) as f64) * (1.0 - ra * ra);
                let tail = ra.powf(order as f64);
                let shifted = turn + m.xi;
                (
                    lead * shifted.cos() + tail * turn.cos(),
                    lead * shifted.sin() + tail * turn.sin(),
                )
            }
            _ => {
                let (base, lambda) = self.sine_skewed().expect("sine-skewed family");
                let a0 = base.cosine_moment(order)?;
                let skew = 0.5 * lambda * base.moment_ratio(order);
                let (s, c) = turn.sin_cos();
                (a0 * (c - s * skew), a0 * (s + c * skew))
            }
        };
        let beta = if p < 0 { -beta } else { beta };
        Ok(TrigMoment { p, alpha, beta })
    }

    /// `(αₚ, βₚ)` by adaptive quadrature of `cos(pθ) f(θ)` and `sin(pθ) f(θ)`.
    ///
    /// Independent of the closed forms; used to check them.
    pub fn trig_moment_quadrature(&self, p: i64) -> Result<TrigMoment> {
        if p.abs() > MAX_QUADRATURE_ORDER {
            return Err(Error::Domain(format!(
                "quadrature moment order {p} outside |p| <= {MAX_QUADRATURE_ORDER}"
            )));
        }
        let opts = QuadOptions::default()
            .with_abs_tol(QUADRATURE_TOLERANCE)
            .with_initial_splits(16.max(4 * p.unsigned_abs() as usize));
        let pf = p as f64;
        let alpha = quadrature::integrate(|t| (pf * t).cos() * self.density(t), 0.0, TAU, &opts)?;
        let beta = quadrature::integrate(|t| (pf * t).sin() * self.density(t), 0.0, TAU, &opts)?;
        Ok(TrigMoment {
            p,
            alpha: alpha.value,
            beta: beta.value,
        })
    }

    /// `ρₚ = √(αₚ² + βₚ²)` from the closed forms, in the log domain.
    pub fn mean_resultant_length(&self, p: u64) -> Result<MrlEval> {
        let m = self.log_moment(p)?;
        Ok(MrlEval {
            p,
            value: m.magnitude(),
            log_value: m.log_magnitude,
        })
    }

    /// `(α₀,ₚ₋₁ − α₀,ₚ₊₁)/α₀,ₚ` from the analytic simplification:
    /// `1/ρ − ρ` for the wrapped Cauchy base, `2p/κ` for the von Mises base.
    pub fn base_moment_ratio(&self, p: u64) -> Result<f64> {
        let (base, _) = self.require_sine_skewed("base moment ratio")?;
        if p == 0 {
            return Err(Error::Domain("base moment ratio needs p >= 1".into()));
        }
        Ok(base.moment_ratio(p))
    }

    /// `α₀,ₚ(ψ)` of the symmetric base.
    pub fn base_cosine_moment(&self, p: u64) -> Result<BaseCosineMoment> {
        let (base, _) = self.require_sine_skewed("base cosine moment")?;
        Ok(BaseCosineMoment {
            p,
            value: base.cosine_moment(p)?,
        })
    }

    pub fn symmetric_base(&self) -> Option<SymmetricBase> {
        self.sine_skewed().map(|(b, _)| b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseCosineMoment {
    pub p: u64,
    pub value: f64,
}
