//! Separation of two cylindrical parameter vectors.
//!
//! The circular block `(μ, κ, λ)` is settled on the wrapped Cauchy marginal
//! by the circular probe. With the circular block shared, the linear
//! parameters are separated through the conditional density of `X`: power
//! laws in `x` at the origin or at infinity, and the leading coefficient at
//! `x = 0`.

use std::f64::consts::{FRAC_PI_2, LN_2};

use serde::Serialize;

use super::{CylFamily, CylindricalModel, CylindricalParams};
use crate::angle;
use crate::error::{Error, Result};
use crate::probe::{
    classify_samples, probe_pair, Classification, ProbeConfig, Samples, SeparationCertificate,
    ANGLE_EQUALITY_TOL, DEFAULT_TAIL_WINDOW,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylProbeConfig {
    /// Points in the initial geometric grid.
    pub grid_points: usize,
    /// The initial grid runs from `x = 1` to `2^{±log2_span}`.
    pub log2_span: f64,
    /// Inconclusive traces are extended with the same spacing up to here.
    pub log2_limit: f64,
    pub tol: f64,
    pub circular: ProbeConfig,
}

impl Default for CylProbeConfig {
    fn default() -> Self {
        CylProbeConfig {
            grid_points: 40,
            log2_span: 30.0,
            log2_limit: 4096.0,
            tol: 1e-3,
            circular: ProbeConfig::default(),
        }
    }
}

impl CylProbeConfig {
    fn validate(&self) -> Result<()> {
        if self.grid_points < crate::probe::MIN_TRACE_LEN {
            return Err(Error::invalid(
                "grid_points",
                self.grid_points as f64,
                "grid_points >= 8",
            ));
        }
        if !(self.log2_span > 0.0 && self.log2_limit >= self.log2_span) {
            return Err(Error::invalid(
                "log2_span",
                self.log2_span,
                "0 < log2_span <= log2_limit",
            ));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid("tol", self.tol, "0 < tol < 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Identical,
    /// The circular block differs; decided on the `Θ`-marginal.
    Marginal,
    /// Powers of `x` differ (`δ` or `α`): ratio along `x → 0`.
    ShapeAtOrigin,
    /// Tail indices differ (`τ`): ratio along `x → ∞`.
    TailAtInfinity,
    /// Only the scale differs (`σ` or `β`): ratio of leading terms at `x = 0`.
    ScaleAtOrigin,
}

/// Conditional density ratio `f₁(x | θ) / f₂(x | θ)` on a grid in `ln x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XTrace {
    pub theta: f64,
    pub log_x: Vec<f64>,
    pub log_ratio: Vec<f64>,
}

/// Weibull shape and rate recovered from `ln(−ln S(x | θ))`, which is
/// linear in `ln x` with slope `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullFit {
    pub theta: f64,
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylindricalCertificate {
    pub family: CylFamily,
    pub params_1: CylindricalParams,
    pub params_2: CylindricalParams,
    pub stage: Stage,
    pub classification: Classification,
    /// `lim f₁(x | θ) / f₂(x | θ)` as `x → 0`, for the scale stage.
    pub ratio_at_origin: Option<f64>,
    pub evidence: Option<XTrace>,
    pub marginal: Option<SeparationCertificate>,
    /// Weibull fits for both models at two angles (Abe–Ley only).
    pub weibull_fits: Vec<[WeibullFit; 2]>,
}

impl CylindricalCertificate {
    pub fn is_separating(&self) -> bool {
        self.classification.is_separating()
    }
}

fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Weibull linearization at `θ`.
pub fn weibull_fit(params: &CylindricalParams, theta: f64) -> Result<WeibullFit> {
    let CylindricalParams::AbeLey(p) = params else {
        return Err(Error::Unsupported(
            "Weibull fits apply to the Abe–Ley model".into(),
        ));
    };
    let c = params.dispersion_factor(theta - p.mu);
    // centre the grid on the conditional scale 1/(β c^{1/α})
    let centre = -p.beta.ln() - c.ln() / p.alpha;
    let log_x: Vec<f64> = (0..21).map(|k| centre + 0.25 * (k as f64 - 10.0)).collect();
    let log_h: Vec<f64> = log_x
        .iter()
        .map(|&y| (-params.log_conditional_survival(theta, y)).ln())
        .collect();
    let (shape, intercept) = ols(&log_x, &log_h);
    // intercept = α ln(β c^{1/α})
    let rate = (intercept / shape).exp() / c.powf(1.0 / shape);
    Ok(WeibullFit { theta, shape, rate })
}

fn trace_classification(trace: &XTrace, tol: f64) -> Result<Classification> {
    let x: Vec<f64> = (0..trace.log_x.len()).map(|k| k as f64).collect();
    let phase = vec![0.0; x.len()];
    classify_samples(
        &Samples {
            abscissae: &x,
            log_magnitude: &trace.log_ratio,
            phase: &phase,
            regressors: None,
            fit_factor: None,
        },
        tol,
        DEFAULT_TAIL_WINDOW,
    )
}

/// Ratio trace along `x = 2^{direction · j · step}`, extended while undecided.
fn power_trace(
    m1: &CylindricalParams,
    m2: &CylindricalParams,
    theta: f64,
    direction: f64,
    cfg: &CylProbeConfig,
) -> Result<(XTrace, Classification)> {
    let step = cfg.log2_span / (cfg.grid_points - 1) as f64;
    let mut trace = XTrace {
        theta,
        log_x: Vec::new(),
        log_ratio: Vec::new(),
    };
    let push = |trace: &mut XTrace, j: usize| {
        let y = direction * j as f64 * step * LN_2;
        trace.log_x.push(y);
        trace
            .log_ratio
            .push(m1.log_conditional_x_density(theta, y) - m2.log_conditional_x_density(theta, y));
    };
    for j in 0..cfg.grid_points {
        push(&mut trace, j);
    }
    loop {
        let c = trace_classification(&trace, cfg.tol)?;
        let reach = trace.log_x.len() as f64 * step;
        if matches!(c, Classification::ToZero | Classification::ToInfinity)
            || reach > cfg.log2_limit
        {
            return Ok((trace, c));
        }
        let j = trace.log_x.len();
        for k in j..j + cfg.grid_points {
            push(&mut trace, k);
        }
    }
}

/// Probe two cylindrical models of one family.
pub fn conditional_ratio_probe(
    m1: &CylindricalModel,
    m2: &CylindricalModel,
    cfg: &CylProbeConfig,
) -> Result<CylindricalCertificate> {
    cfg.validate()?;
    let (p1, p2) = (m1.params, m2.params);
    if p1.family() != p2.family() {
        return Err(Error::Domain(format!(
            "cannot probe {} against {}",
            p1.family(),
            p2.family()
        )));
    }
    let mut cert = CylindricalCertificate {
        family: p1.family(),
        params_1: p1,
        params_2: p2,
        stage: Stage::Identical,
        classification: Classification::Unit,
        ratio_at_origin: None,
        evidence: None,
        marginal: None,
        weibull_fits: Vec::new(),
    };

    let same_circular = angle::angles_equal(p1.mu(), p2.mu(), ANGLE_EQUALITY_TOL)
        && p1.kappa() == p2.kappa()
        && p1.lambda() == p2.lambda();
    if !same_circular {
        // equal κ calibrates to one ρ; do not let quadrature noise split it
        let mut m2 = *m2;
        if p1.kappa() == p2.kappa() {
            m2.marginal_rho = m1.marginal_rho;
        }
        let c = probe_pair(&m1.marginal_model()?, &m2.marginal_model()?, &cfg.circular)?;
        cert.stage = Stage::Marginal;
        cert.classification = c.classification.clone();
        cert.marginal = Some(c);
        return Ok(cert);
    }

    let theta = p1.mu();
    if let (CylindricalParams::AbeLey(_), CylindricalParams::AbeLey(_)) = (&p1, &p2) {
        for t in [theta, theta + FRAC_PI_2] {
            cert.weibull_fits
                .push([weibull_fit(&p1, t)?, weibull_fit(&p2, t)?]);
        }
    }
    let (shape_differs, tail_differs, scale_differs) = match (&p1, &p2) {
        (CylindricalParams::GPareto(a), CylindricalParams::GPareto(b)) => {
            (a.delta != b.delta, a.tau != b.tau, a.sigma != b.sigma)
        }
        (CylindricalParams::AbeLey(a), CylindricalParams::AbeLey(b)) => {
            (a.alpha != b.alpha, false, a.beta != b.beta)
        }
        _ => unreachable!("families checked above"),
    };

    if shape_differs || tail_differs {
        let (stage, direction) = if shape_differs {
            (Stage::ShapeAtOrigin, -1.0)
        } else {
            (Stage::TailAtInfinity, 1.0)
        };
        let (trace, c) = power_trace(&p1, &p2, theta, direction, cfg)?;
        cert.stage = stage;
        cert.classification = match c {
            Classification::Unit => Classification::Inconclusive {
                reason: "ratio settles at 1 although the parameters differ".into(),
            },
            c => c,
        };
        cert.evidence = Some(trace);
    } else if scale_differs {
        // equal powers of x cancel; the leading coefficients remain
        let l1 = p1.log_conditional_leading_term(theta);
        let l2 = p2.log_conditional_leading_term(theta);
        let ratio = (l1 - l2).exp();
        let (v1, v2) = (l1.exp(), l2.exp());
        cert.stage = Stage::ScaleAtOrigin;
        cert.ratio_at_origin = Some(ratio);
        cert.classification = if (ratio - 1.0).abs() < cfg.tol {
            Classification::Inconclusive {
                reason: format!("leading-term ratio {ratio} is within {} of 1", cfg.tol),
            }
        } else {
            Classification::FiniteDifference {
                index: 0,
                value_1: [v1, 0.0],
                value_2: [v2, 0.0],
                difference: (v1 - v2).abs(),
            }
        };
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(sigma: f64, delta: f64, tau: f64) -> CylindricalModel {
        CylindricalModel::gpareto(sigma, delta, tau, 0.3, 0.5, 0.2).unwrap()
    }

    fn run(a: &CylindricalModel, b: &CylindricalModel) -> CylindricalCertificate {
        conditional_ratio_probe(a, b, &CylProbeConfig::default()).unwrap()
    }

    #[test]
    fn shape_pair_vanishes_at_origin() {
        let c = run(&gp(1.0, 0.5, 0.5), &gp(1.0, 1.0, 0.5));
        assert_eq!(c.stage, Stage::ShapeAtOrigin);
        assert_eq!(c.classification, Classification::ToZero);
        let c = run(&gp(1.0, 1.0, 0.5), &gp(1.0, 0.5, 0.5));
        assert_eq!(c.classification, Classification::ToInfinity);
    }

    #[test]
    fn tail_pair_diverges_at_infinity() {
        let c = run(&gp(1.0, 1.0, 1.0), &gp(1.0, 1.0, 0.5));
        assert_eq!(c.stage, Stage::TailAtInfinity);
        assert_eq!(c.classification, Classification::ToInfinity);
        let c = run(&gp(1.0, 1.0, 0.5), &gp(1.0, 1.0, 1.0));
        assert_eq!(c.classification, Classification::ToZero);
    }

    #[test]
    fn scale_pair_ratio_at_origin() {
        let c = run(&gp(1.0, 1.0, 0.5), &gp(2.0, 1.0, 0.5));
        assert_eq!(c.stage, Stage::ScaleAtOrigin);
        assert!((c.ratio_at_origin.unwrap() - 2.0).abs() < 1e-12);
        assert!(c.is_separating());
    }

    #[test]
    fn nearby_shapes_need_a_longer_trace() {
        let c = run(&gp(1.0, 1.0, 0.5), &gp(1.0, 1.02, 0.5));
        assert_eq!(c.classification, Classification::ToZero);
        assert!(c.evidence.unwrap().log_x.len() > 40);
    }

    #[test]
    fn identical_models_give_unit() {
        let c = run(&gp(1.0, 1.0, 0.5), &gp(1.0, 1.0, 0.5));
        assert_eq!(c.stage, Stage::Identical);
        assert_eq!(c.classification, Classification::Unit);
    }

    #[test]
    fn weibull_fit_recovers_parameters() {
        let m = CylindricalModel::abe_ley(1.7, 0.6, -0.4, 1.5, 0.3).unwrap();
        let f = weibull_fit(&m.params, 1.0).unwrap();
        assert!((f.shape - 1.7).abs() < 1e-10 && (f.rate - 0.6).abs() < 1e-10, "{f:?}");
    }

    #[test]
    fn abe_ley_stages() {
        let al = |a, b| CylindricalModel::abe_ley(a, b, 0.0, 1.0, 0.0).unwrap();
        let c = run(&al(2.0, 1.0), &al(1.0, 1.0));
        assert_eq!(c.stage, Stage::ShapeAtOrigin);
        assert_eq!(c.classification, Classification::ToZero);
        let c = run(&al(2.0, 1.0), &al(2.0, 3.0));
        assert_eq!(c.stage, Stage::ScaleAtOrigin);
        assert!((c.ratio_at_origin.unwrap() - (1.0f64 / 3.0).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn circular_block_goes_to_the_marginal() {
        let a = CylindricalModel::gpareto(1.0, 1.0, 0.5, 0.0, 0.5, 0.8).unwrap();
        let b = CylindricalModel::gpareto(1.0, 1.0, 0.5, 0.0, 0.5, 0.4).unwrap();
        let c = run(&a, &b);
        assert_eq!(c.stage, Stage::Marginal);
        let z = c.classification.limit().unwrap();
        assert!((z.re - 2.0).abs() < 1e-3);
    }
}
