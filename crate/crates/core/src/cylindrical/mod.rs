//! Cylindrical models for an angle `Θ` paired with a nonnegative `X`: the
//! Abe–Ley model (Weibull conditional) and the sine-skewed generalized
//! Pareto-type model.
//!
//! Both have a sine-skewed wrapped Cauchy `Θ`-marginal. Densities are
//! evaluated in the log domain as functions of `ln x`, so heavy Pareto tails
//! stay representable far beyond the range of `f64`.

mod model;
mod probe;

use std::f64::consts::{LN_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

pub use model::{CylindricalModel, CALIBRATION_TOL};
pub use probe::{
    conditional_ratio_probe, weibull_fit, CylProbeConfig, CylindricalCertificate, Stage, WeibullFit,
    XTrace,
};

/// `ln(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn check_centred_angle(name: &'static str, value: f64) -> Result<()> {
    if !(-PI..PI).contains(&value) {
        return Err(Error::invalid(name, value, "-π <= value < π"));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::invalid(name, value, "0 < value < ∞"));
    }
    Ok(())
}

/// Abe–Ley parameters: Weibull shape `α`, rate `β`, and the circular block
/// `(μ, κ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbeLeyParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl AbeLeyParams {
    pub fn new(alpha: f64, beta: f64, mu: f64, kappa: f64, lambda: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_centred_angle("mu", mu)?;
        check_positive("kappa", kappa)?;
        crate::circular::check_skewness(lambda)?;
        Ok(AbeLeyParams {
            alpha,
            beta,
            mu,
            kappa,
            lambda,
        })
    }
}

/// Generalized Pareto-type parameters `(σ, δ, τ)` and circular block
/// `(μ, κ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GParetoParams {
    pub sigma: f64,
    pub delta: f64,
    pub tau: f64,
    pub mu: f64,
    pub kappa: f64,
    pub lambda: f64,
}

impl GParetoParams {
    pub fn new(sigma: f64, delta: f64, tau: f64, mu: f64, kappa: f64, lambda: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        check_positive("delta", delta)?;
        check_positive("tau", tau)?;
        check_centred_angle("mu", mu)?;
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::invalid("kappa", kappa, "0 < kappa < 1"));
        }
        crate::circular::check_skewness(lambda)?;
        Ok(GParetoParams {
            sigma,
            delta,
            tau,
            mu,
            kappa,
            lambda,
        })
    }

    /// The Abe–Ley parameters this model approaches as `τ → 0`:
    /// `α = 1/δ`, `β = 1/σ`, `tanh κ_AL = κ`.
    pub fn tau_zero_limit(&self) -> Result<AbeLeyParams> {
        AbeLeyParams::new(
            1.0 / self.delta,
            1.0 / self.sigma,
            self.mu,
            self.kappa.atanh(),
            self.lambda,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CylFamily {
    AbeLey,
    GPareto,
}

impl CylFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CylFamily::AbeLey => "abeley",
            CylFamily::GPareto => "gpareto",
        }
    }
}

impl std::fmt::Display for CylFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CylindricalParams {
    AbeLey(AbeLeyParams),
    GPareto(GParetoParams),
}

impl From<AbeLeyParams> for CylindricalParams {
    fn from(p: AbeLeyParams) -> Self {
        CylindricalParams::AbeLey(p)
    }
}

impl From<GParetoParams> for CylindricalParams {
    fn from(p: GParetoParams) -> Self {
        CylindricalParams::GPareto(p)
    }
}

impl CylindricalParams {
    pub fn family(&self) -> CylFamily {
        match self {
            CylindricalParams::AbeLey(_) => CylFamily::AbeLey,
            CylindricalParams::GPareto(_) => CylFamily::GPareto,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            CylindricalParams::AbeLey(p) => p.mu,
            CylindricalParams::GPareto(p) => p.mu,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            CylindricalParams::AbeLey(p) => p.kappa,
            CylindricalParams::GPareto(p) => p.kappa,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            CylindricalParams::AbeLey(p) => p.lambda,
            CylindricalParams::GPareto(p) => p.lambda,
        }
    }

    /// Power `s` with `u = (x / scale)^s` the standardized linear variable:
    /// `α` for Abe–Ley, `1/δ` for the Pareto-type model.
    pub fn shape(&self) -> f64 {
        match self {
            CylindricalParams::AbeLey(p) => p.alpha,
            CylindricalParams::GPareto(p) => 1.0 / p.delta,
        }
    }

    /// `ln scale`: `−ln β` or `ln σ`.
    fn log_scale(&self) -> f64 {
        match self {
            CylindricalParams::AbeLey(p) => -p.beta.ln(),
            CylindricalParams::GPareto(p) => p.sigma.ln(),
        }
    }

    /// `1 − tanh κ cos t` or `1 − κ cos t`, accurate near its minimum.
    pub fn dispersion_factor(&self, t: f64) -> f64 {
        let (k, one_minus_k) = match self {
            CylindricalParams::AbeLey(p) => (p.kappa.tanh(), 2.0 / ((2.0 * p.kappa).exp() + 1.0)),
            CylindricalParams::GPareto(p) => (p.kappa, 1.0 - p.kappa),
        };
        let h = (0.5 * t).sin();
        one_minus_k + 2.0 * k * h * h
    }

    /// `ln` of the kernel in `u`: `−c u` (Weibull) or
    /// `−(δ/τ + 1) ln(1 + τ c u / δ)` (Pareto-type), given `ln u`.
    fn log_kernel(&self, c: f64, log_u: f64) -> f64 {
        match self {
            CylindricalParams::AbeLey(_) => -c * log_u.exp(),
            CylindricalParams::GPareto(p) => {
                -(p.delta / p.tau + 1.0) * softplus((p.tau / p.delta).ln() + c.ln() + log_u)
            }
        }
    }

    /// `ln f(θ, x)` at `x = e^{log_x}`, straight from the density formula.
    pub fn log_joint_density(&self, theta: f64, log_x: f64) -> f64 {
        let t = theta - self.mu();
        let skew = (self.lambda() * t.sin()).ln_1p();
        let c = self.dispersion_factor(t);
        match self {
            CylindricalParams::AbeLey(p) => {
                let log_cosh = p.kappa + (-2.0 * p.kappa).exp().ln_1p() - LN_2;
                p.alpha.ln() + p.alpha * p.beta.ln() - TAU.ln() - log_cosh
                    + skew
                    + (p.alpha - 1.0) * log_x
                    + self.log_kernel(c, p.alpha * (log_x + p.beta.ln()))
            }
            CylindricalParams::GPareto(p) => {
                let z = log_x - p.sigma.ln();
                skew + 0.5 * (-p.kappa * p.kappa).ln_1p()
                    - (TAU * p.sigma * p.delta).ln()
                    + (1.0 / p.delta - 1.0) * z
                    + self.log_kernel(c, z / p.delta)
            }
        }
    }

    /// `ln f(x | θ)` at `x = e^{log_x}`.
    pub fn log_conditional_x_density(&self, theta: f64, log_x: f64) -> f64 {
        let s = self.shape();
        let ls = self.log_scale();
        let c = self.dispersion_factor(theta - self.mu());
        let z = log_x - ls;
        s.ln() - ls + (s - 1.0) * z + c.ln() + self.log_kernel(c, s * z)
    }

    /// `ln` of the leading coefficient `L` in `f(x | θ) ~ L x^{s−1}` as `x → 0`.
    pub fn log_conditional_leading_term(&self, theta: f64) -> f64 {
        let s = self.shape();
        let c = self.dispersion_factor(theta - self.mu());
        s.ln() - s * self.log_scale() + c.ln()
    }

    /// `ln P(X > x | θ)` at `x = e^{log_x}`.
    pub fn log_conditional_survival(&self, theta: f64, log_x: f64) -> f64 {
        let c = self.dispersion_factor(theta - self.mu());
        let log_u = self.shape() * (log_x - self.log_scale());
        match self {
            CylindricalParams::AbeLey(_) => self.log_kernel(c, log_u),
            CylindricalParams::GPareto(p) => {
                let m = p.delta / p.tau;
                self.log_kernel(c, log_u) * m / (m + 1.0)
            }
        }
    }

    /// Density at `x = 0` from `ln f(·, x) = head + (s − 1) ln x + o(1)`.
    fn at_origin(&self, head: f64) -> Result<f64> {
        let s = self.shape();
        if s == 1.0 {
            Ok(head.exp())
        } else if s > 1.0 {
            Ok(0.0)
        } else {
            Err(Error::Domain(format!(
                "density is unbounded at x = 0 when the power of x is negative (shape {s} < 1)"
            )))
        }
    }

    fn check_x(x: f64) -> Result<()> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::invalid("x", x, "0 <= x < ∞"));
        }
        Ok(())
    }

    /// Joint density `f(θ, x)`. At `x = 0` the factor `x^{s−1}` takes its
    /// limit: finite for `s = 1`, zero for `s > 1`, an error for `s < 1`.
    pub fn joint_density(&self, theta: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x > 0.0 {
            return Ok(self.log_joint_density(theta, x.ln()).exp());
        }
        let t = theta - self.mu();
        let c = self.dispersion_factor(t);
        // f = (1 + λ sin t) N / c · f(x | θ)
        let log_norm = match self {
            CylindricalParams::AbeLey(p) => {
                -TAU.ln() - (p.kappa + (-2.0 * p.kappa).exp().ln_1p() - LN_2)
            }
            CylindricalParams::GPareto(p) => -TAU.ln() + 0.5 * (-p.kappa * p.kappa).ln_1p(),
        };
        let head =
            (self.lambda() * t.sin()).ln_1p() + log_norm - c.ln() + self.log_conditional_leading_term(theta);
        self.at_origin(head)
    }

    /// Conditional density of `X` given `Θ = θ`, same convention at `x = 0`.
    pub fn conditional_x_density(&self, theta: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if x > 0.0 {
            return Ok(self.log_conditional_x_density(theta, x.ln()).exp());
        }
        self.at_origin(self.log_conditional_leading_term(theta))
    }

    /// Range of `ln x` carrying all but a negligible part of
    /// `∫ x^k f(x | θ) dx`, or an error when that moment is infinite.
    fn log_x_range(&self, theta: f64, k: f64) -> Result<(f64, f64)> {
        let s = self.shape();
        let ls = self.log_scale();
        let c = self.dispersion_factor(theta - self.mu());
        // in v = a u the integrand behaves like v^{1 + k/s} at 0
        let low_power = 1.0 + k / s;
        let (log_a, lv_hi) = match self {
            CylindricalParams::AbeLey(_) => {
                let mut v: f64 = 40.0;
                while low_power * v.ln() - v > -40.0 {
                    v *= 1.5;
                }
                (c.ln(), v.ln())
            }
            CylindricalParams::GPareto(p) => {
                let excess = p.delta / p.tau - k * p.delta;
                if excess <= 0.0 {
                    return Err(Error::Domain(format!(
                        "E[X^{k}] is infinite for tau = {} (needs k tau < 1)",
                        p.tau
                    )));
                }
                let hi = 5.0 + 40.0 / excess;
                if hi > 1e5 {
                    return Err(Error::Numeric(format!(
                        "tail of E[X^{k}] decays too slowly to integrate (exponent {excess:e})"
                    )));
                }
                ((p.tau / p.delta).ln() + c.ln(), hi)
            }
        };
        let lv_lo = -40.0 / low_power;
        let to_log_x = |lv: f64| ls + (lv - log_a) / s;
        Ok((to_log_x(lv_lo), to_log_x(lv_hi)))
    }

    fn integrate_over_x(&self, theta: f64, k: f64, log_f: impl Fn(f64) -> f64) -> Result<f64> {
        let (lo, hi) = self.log_x_range(theta, k)?;
        let opts = crate::quadrature::QuadOptions::default()
            .with_abs_tol(0.0)
            .with_rel_tol(1e-13)
            .with_initial_splits(32);
        let r = crate::quadrature::integrate(|y| (log_f(y) + (k + 1.0) * y).exp(), lo, hi, &opts)?;
        Ok(r.value)
    }

    /// `E[X^k | Θ = θ]` by quadrature over `ln x`.
    pub fn conditional_x_moment(&self, theta: f64, k: f64) -> Result<f64> {
        self.integrate_over_x(theta, k, |y| self.log_conditional_x_density(theta, y))
    }

    /// `∫ x^k f(θ, x) dx` by quadrature over `ln x`.
    pub fn joint_x_moment(&self, theta: f64, k: f64) -> Result<f64> {
        self.integrate_over_x(theta, k, |y| self.log_joint_density(theta, y))
    }

    /// Marginal density of `Θ`, integrating the joint density over `x`.
    pub fn marginal_theta_density(&self, theta: f64) -> Result<f64> {
        self.joint_x_moment(theta, 0.0)
    }

    /// `E[X^k g(Θ)]` by nested quadrature.
    pub fn expectation(&self, k: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        let opts = crate::quadrature::QuadOptions::default()
            .with_abs_tol(1e-13)
            .with_rel_tol(1e-12)
            .with_initial_splits(32);
        let mu = self.mu();
        let failure = std::cell::RefCell::new(None);
        let r = crate::quadrature::integrate(
            |t| match self.joint_x_moment(mu + t, k) {
                Ok(v) => g(mu + t) * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            -PI,
            PI,
            &opts,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(r?.value)
    }

    /// `∬ f(θ, x) dθ dx`.
    pub fn total_mass(&self) -> Result<f64> {
        self.expectation(0.0, |_| 1.0)
    }
}

/// Largest `|f_gpar(θ, x; τ) − f_AL(θ, x)|` over `grid`, where `f_AL` is the
/// `τ → 0` limit from [`GParetoParams::tau_zero_limit`]. Points at `x = 0`
/// are skipped when both densities are unbounded there.
pub fn tau_limit_check(gp: &GParetoParams, grid: &[(f64, f64)]) -> Result<f64> {
    let g = CylindricalParams::GPareto(*gp);
    let al = CylindricalParams::AbeLey(gp.tau_zero_limit()?);
    let mut sup: f64 = 0.0;
    for &(theta, x) in grid {
        if x == 0.0 && g.shape() < 1.0 {
            continue;
        }
        let d = (g.joint_density(theta, x)? - al.joint_density(theta, x)?).abs();
        sup = sup.max(d);
    }
    Ok(sup)
}

/// `n_theta × n_x` grid over `θ ∈ [−π, π)` and `x ∈ [0, x_max]`.
pub fn tau_limit_grid(n_theta: usize, n_x: usize, x_max: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n_theta * n_x);
    for i in 0..n_theta {
        let theta = -PI + TAU * i as f64 / n_theta as f64;
        for j in 0..n_x {
            let x = if n_x > 1 {
                x_max * j as f64 / (n_x - 1) as f64
            } else {
                0.0
            };
            out.push((theta, x));
        }
    }
    out
}
