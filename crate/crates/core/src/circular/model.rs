use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::error::{Error, Result};
use crate::special_functions::{self, MAX_ARGUMENT};

/// Grid used to check that a Möbius–Cardioid parameter vector gives a
/// nonnegative density.
pub const MC_VALIDATION_GRID: usize = 2048;
/// Most negative grid value tolerated (and then clamped to zero).
pub const MC_NEGATIVITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sswc,
    Ssvm,
    Mc,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Sswc => "sswc",
            Family::Ssvm => "ssvm",
            Family::Mc => "mc",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_unit_angle(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..TAU).contains(&value) {
        return Err(Error::invalid(name, value, "0 <= value < 2π"));
    }
    Ok(())
}

fn check_centred_angle(name: &'static str, value: f64) -> Result<()> {
    if !(-PI..PI).contains(&value) {
        return Err(Error::invalid(name, value, "-π <= value < π"));
    }
    Ok(())
}

pub(crate) fn check_skewness(value: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&value) {
        return Err(Error::invalid("lambda", value, "-1 <= lambda <= 1"));
    }
    Ok(())
}

/// Sine-skewed wrapped Cauchy parameters `(μ, ρ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SswcParams {
    pub mu: f64,
    pub rho: f64,
    pub lambda: f64,
}

impl SswcParams {
    pub fn new(mu: f64, rho: f64, lambda: f64) -> Result<Self> {
        check_unit_angle("mu", mu)?;
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid("rho", rho, "0 < rho < 1"));
        }
        check_skewness(lambda)?;
        Ok(SswcParams { mu, rho, lambda })
    }
}

/// Sine-skewed von Mises parameters `(μ, κ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SsvmParams {
    pub mu: f64,
    pub kappa: f64,
    pub lambda: f64,
    #[serde(skip)]
    log_i0: f64,
}

impl SsvmParams {
    /// `κ` is limited to the Bessel envelope `(0, 100]`.
    pub fn new(mu: f64, kappa: f64, lambda: f64) -> Result<Self> {
        check_unit_angle("mu", mu)?;
        if !(kappa > 0.0 && kappa <= MAX_ARGUMENT) {
            return Err(Error::invalid("kappa", kappa, "0 < kappa <= 100"));
        }
        check_skewness(lambda)?;
        let log_i0 = special_functions::log_bessel_i_any_order(0, kappa)?;
        Ok(SsvmParams {
            mu,
            kappa,
            lambda,
            log_i0,
        })
    }

    pub fn log_i0(&self) -> f64 {
        self.log_i0
    }
}

/// Möbius-transformed Cardioid parameters `(μ, ρ_α, ρ̄, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McParams {
    pub mu: f64,
    pub rho_alpha: f64,
    pub rho_bar: f64,
    pub xi: f64,
}

impl McParams {
    pub fn new(mu: f64, rho_alpha: f64, rho_bar: f64, xi: f64) -> Result<Self> {
        check_centred_angle("mu", mu)?;
        if !(rho_alpha > 0.0 && rho_alpha < 1.0) {
            return Err(Error::invalid("rho_alpha", rho_alpha, "0 < rho_alpha < 1"));
        }
        if !(rho_bar > 0.0 && rho_bar.is_finite()) {
            return Err(Error::invalid("rho_bar", rho_bar, "rho_bar > 0"));
        }
        check_centred_angle("xi", xi)?;
        let params = McParams {
            mu,
            rho_alpha,
            rho_bar,
            xi,
        };
        let min = (0..MC_VALIDATION_GRID)
            .map(|k| params.raw_density(TAU * k as f64 / MC_VALIDATION_GRID as f64))
            .fold(f64::INFINITY, f64::min);
        if min < -MC_NEGATIVITY_SLACK {
            return Err(Error::invalid(
                "rho_bar",
                rho_bar,
                format!(
                    "a nonnegative density (grid minimum {min:.3e} for rho_alpha = {rho_alpha}, xi = {xi})"
                ),
            ));
        }
        Ok(params)
    }

    fn raw_density(&self, theta: f64) -> f64 {
        let ra = self.rho_alpha;
        let t = theta - self.mu;
        let denom = 1.0 + ra * ra - 2.0 * ra * t.cos();
        let numer = (t - self.xi).cos() - 2.0 * ra * self.xi.cos() + ra * ra * (t + self.xi).cos();
        let h = 1.0 + 2.0 * self.rho_bar * numer / denom;
        (1.0 - ra * ra) * h / (TAU * denom)
    }
}

/// Symmetric base density `f₀(· | ψ)` of a sine-skewed family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetricBase {
    WrappedCauchy { rho: f64 },
    VonMises { kappa: f64, log_i0: f64 },
}

impl SymmetricBase {
    /// The shape parameter `ψ` (ρ or κ).
    pub fn shape(&self) -> f64 {
        match *self {
            SymmetricBase::WrappedCauchy { rho } => rho,
            SymmetricBase::VonMises { kappa, .. } => kappa,
        }
    }

    pub fn density(&self, t: f64) -> f64 {
        match *self {
            SymmetricBase::WrappedCauchy { rho } => {
                // 1 + ρ² − 2ρ cos t, without cancellation near ρ = 1
                let h = (0.5 * t).sin();
                let q = 1.0 - rho;
                q * (1.0 + rho) / (TAU * (q * q + 4.0 * rho * h * h))
            }
            SymmetricBase::VonMises { kappa, log_i0 } => (kappa * t.cos() - log_i0).exp() / TAU,
        }
    }

    /// `ln α₀,ₚ(ψ)`; both bases have strictly positive cosine moments.
    pub fn log_cosine_moment(&self, p: u64) -> Result<f64> {
        match *self {
            SymmetricBase::WrappedCauchy { rho } => Ok(p as f64 * rho.ln()),
            SymmetricBase::VonMises { kappa, .. } => {
                special_functions::log_bessel_ratio_any_order(p, kappa)
            }
        }
    }

    /// `α₀,ₚ(ψ)`, underflowing to zero at high order.
    pub fn cosine_moment(&self, p: u64) -> Result<f64> {
        match *self {
            SymmetricBase::WrappedCauchy { rho } if p <= i32::MAX as u64 => Ok(rho.powi(p as i32)),
            _ => Ok(self.log_cosine_moment(p)?.exp()),
        }
    }

    /// `(α₀,ₚ₋₁ − α₀,ₚ₊₁) / α₀,ₚ` in its simplified closed form.
    pub fn moment_ratio(&self, p: u64) -> f64 {
        match *self {
            SymmetricBase::WrappedCauchy { rho } => 1.0 / rho - rho,
            SymmetricBase::VonMises { kappa, .. } => 2.0 * p as f64 / kappa,
        }
    }

    /// The same ratio formed by subtracting neighbouring moments (log domain).
    pub fn moment_ratio_by_subtraction(&self, p: u64) -> Result<f64> {
        if p == 0 {
            return Err(Error::Domain("moment ratio needs p >= 1".into()));
        }
        let centre = self.log_cosine_moment(p)?;
        let below = (self.log_cosine_moment(p - 1)? - centre).exp();
        let above = (self.log_cosine_moment(p + 1)? - centre).exp();
        Ok(below - above)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CircularModel {
    Sswc(SswcParams),
    Ssvm(SsvmParams),
    Mc(McParams),
}

impl From<SswcParams> for CircularModel {
    fn from(p: SswcParams) -> Self {
        CircularModel::Sswc(p)
    }
}

impl From<SsvmParams> for CircularModel {
    fn from(p: SsvmParams) -> Self {
        CircularModel::Ssvm(p)
    }
}

impl From<McParams> for CircularModel {
    fn from(p: McParams) -> Self {
        CircularModel::Mc(p)
    }
}

impl CircularModel {
    pub fn sswc(mu: f64, rho: f64, lambda: f64) -> Result<Self> {
        SswcParams::new(mu, rho, lambda).map(Into::into)
    }

    pub fn ssvm(mu: f64, kappa: f64, lambda: f64) -> Result<Self> {
        SsvmParams::new(mu, kappa, lambda).map(Into::into)
    }

    pub fn mc(mu: f64, rho_alpha: f64, rho_bar: f64, xi: f64) -> Result<Self> {
        McParams::new(mu, rho_alpha, rho_bar, xi).map(Into::into)
    }

    pub fn family(&self) -> Family {
        match self {
            CircularModel::Sswc(_) => Family::Sswc,
            CircularModel::Ssvm(_) => Family::Ssvm,
            CircularModel::Mc(_) => Family::Mc,
        }
    }

    /// Location `μ`.
    pub fn mu(&self) -> f64 {
        match self {
            CircularModel::Sswc(p) => p.mu,
            CircularModel::Ssvm(p) => p.mu,
            CircularModel::Mc(p) => p.mu,
        }
    }

    /// Skewness `λ` and base density, for the sine-skewed families only.
    pub fn sine_skewed(&self) -> Option<(SymmetricBase, f64)> {
        match *self {
            CircularModel::Sswc(p) => Some((SymmetricBase::WrappedCauchy { rho: p.rho }, p.lambda)),
            CircularModel::Ssvm(p) => Some((
                SymmetricBase::VonMises {
                    kappa: p.kappa,
                    log_i0: p.log_i0,
                },
                p.lambda,
            )),
            CircularModel::Mc(_) => None,
        }
    }

    pub(crate) fn require_sine_skewed(&self, what: &str) -> Result<(SymmetricBase, f64)> {
        self.sine_skewed().ok_or_else(|| {
            Error::Unsupported(format!(
                "{what} is defined for sine-skewed families only, not {}",
                self.family()
            ))
        })
    }

    /// Density at `theta` (any real; reduced mod 2π).
    pub fn density(&self, theta: f64) -> f64 {
        let theta = angle::reduce(theta);
        match self {
            CircularModel::Mc(p) => p.raw_density(theta).max(0.0),
            _ => {
                let (base, lambda) = self.sine_skewed().expect("sine-skewed family");
                let t = theta - self.mu();
                base.density(t) * (1.0 + lambda * t.sin())
            }
        }
    }

    /// Split `f` around `μ` into its symmetric part and the odds
    /// `[f(μ+t) − f(μ−t)] / [f(μ+t) + f(μ−t)]`, which equals `λ sin t`.
    pub fn sine_skew_decomposition(&self, t: f64) -> Result<(f64, f64)> {
        self.require_sine_skewed("sine-skew decomposition")?;
        let plus = self.density(self.mu() + t);
        let minus = self.density(self.mu() - t);
        let total = plus + minus;
        Ok((0.5 * total, (plus - minus) / total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sswc_density_example() {
        let m = CircularModel::sswc(0.0, 0.5, 0.8).unwrap();
        assert!((m.density(0.0) - 0.477_464_829_275_686).abs() < 1e-12);
    }

    #[test]
    fn ssvm_density_matches_direct_formula() {
        let m = CircularModel::ssvm(1.0, 2.0, 0.5).unwrap();
        // I_0(2) to 20 digits
        let i0 = 2.279_585_302_336_067_3;
        let direct = (2.0_f64 * (1.0_f64).cos()).exp() / (TAU * i0) * (1.0 + 0.5 * 1.0_f64.sin());
        assert!((m.density(2.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn symmetric_when_unskewed() {
        let models = [
            CircularModel::sswc(1.0, 0.7, 0.0).unwrap(),
            CircularModel::ssvm(4.0, 3.0, 0.0).unwrap(),
        ];
        for m in &models {
            for k in 0..20 {
                let t = 0.17 * k as f64;
                let a = m.density(m.mu() + t);
                let b = m.density(m.mu() - t);
                assert!((a - b).abs() < 1e-14 * a.max(1.0));
            }
        }
    }

    #[test]
    fn periodic_in_theta() {
        let m = CircularModel::mc(0.3, 0.4, 0.2, 0.9).unwrap();
        for k in 0..10 {
            let t = -3.0 + 0.7 * k as f64;
            assert!((m.density(t) - m.density(t + TAU)).abs() < 1e-13);
            assert!(m.density(t) >= 0.0);
        }
    }

    #[test]
    fn parameter_bounds_are_enforced() {
        assert!(CircularModel::sswc(TAU, 0.5, 0.0).is_err());
        assert!(CircularModel::sswc(0.0, 1.0, 0.0).is_err());
        assert!(CircularModel::sswc(0.0, 0.5, 1.01).is_err());
        assert!(CircularModel::sswc(0.0, 0.5, -1.0).is_ok());
        assert!(CircularModel::ssvm(0.0, 0.0, 0.0).is_err());
        assert!(CircularModel::ssvm(0.0, 101.0, 0.0).is_err());
        assert!(CircularModel::mc(PI, 0.4, 0.2, 0.0).is_err());
        assert!(CircularModel::mc(-PI, 0.4, 0.2, 0.0).is_ok());
        assert!(CircularModel::mc(0.0, 0.4, 0.0, 0.0).is_err());
    }

    #[test]
    fn mc_rejects_negative_density() {
        // grid minimum is about -0.15 here
        let err = CircularModel::mc(0.0, 0.4, 1.0, 0.9).unwrap_err();
        match err {
            Error::InvalidParameter { name, .. } => assert_eq!(name, "rho_bar"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(CircularModel::mc(0.0, 0.4, 0.5, 0.9).is_ok());
    }

    #[test]
    fn decomposition_odds() {
        let m = CircularModel::ssvm(1.0, 2.0, 0.5).unwrap();
        let (_, odds) = m.sine_skew_decomposition(PI / 2.0).unwrap();
        assert!((odds - 0.5).abs() < 1e-12);
        let (sym, odds) = m.sine_skew_decomposition(0.0).unwrap();
        assert_eq!(odds, 0.0);
        assert!(sym > 0.0);
        let flat = CircularModel::sswc(2.0, 0.3, 0.0).unwrap();
        assert!(flat.sine_skew_decomposition(1.1).unwrap().1.abs() < 1e-15);
        let mc = CircularModel::mc(0.0, 0.4, 0.2, 0.0).unwrap();
        assert!(matches!(mc.sine_skew_decomposition(1.0), Err(Error::Unsupported(_))));
    }
}
