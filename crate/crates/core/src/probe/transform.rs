//! Transforms of a circular law whose ratios separate parameter vectors.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::angle;
use crate::circular::CircularModel;
use crate::error::{Error, Result};
use crate::polar::LogPolar;
use crate::quadrature::{self, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransformId {
    /// `ρₚ²`
    MrlSq,
    /// `βₚ`
    Sine,
    /// `α₁ + iβ₁`, independent of `p`
    MeanDir,
    /// `αₚ`
    Cosine,
    /// `αₚ + iβₚ`
    Charf,
}

impl TransformId {
    pub fn name(&self) -> &'static str {
        match self {
            TransformId::MrlSq => "MRL_SQ",
            TransformId::Sine => "SINE",
            TransformId::MeanDir => "MEAN_DIR",
            TransformId::Cosine => "COSINE",
            TransformId::Charf => "CHARF",
        }
    }

    pub fn applies_to(&self, model: &CircularModel) -> bool {
        let skewed = model.sine_skewed().is_some();
        match self {
            TransformId::MrlSq => true,
            TransformId::Sine | TransformId::MeanDir => skewed,
            TransformId::Cosine | TransformId::Charf => !skewed,
        }
    }
}

fn check_applicable(t: TransformId, model: &CircularModel) -> Result<()> {
    if !t.applies_to(model) {
        return Err(Error::Domain(format!(
            "transform {} does not apply to the {} family",
            t.name(),
            model.family()
        )));
    }
    Ok(())
}

/// The transform at order `p`, from the closed-form moments in log form.
pub fn evaluate_transform(t: TransformId, model: &CircularModel, p: u64) -> Result<LogPolar> {
    check_applicable(t, model)?;
    match t {
        TransformId::MrlSq => {
            let m = model.log_moment(p)?;
            Ok(LogPolar::from_log(2.0 * m.log_magnitude))
        }
        TransformId::Sine => {
            // α₀,ₚ {sin(pμ) + (λ rₚ/2) cos(pμ)}, formed without the polar detour
            let (base, lambda) = model.sine_skewed().expect("checked above");
            if p == 0 {
                return Ok(LogPolar::ZERO);
            }
            let turn = angle::reduce_product(p as i64, model.mu());
            let skew = 0.5 * lambda * base.moment_ratio(p);
            let (s, c) = turn.sin_cos();
            let factor = LogPolar::from_real(s + skew * c);
            Ok(factor.mul(&LogPolar::from_log(base.log_cosine_moment(p)?)))
        }
        TransformId::MeanDir => model.log_moment(1),
        TransformId::Cosine => Ok(model.log_moment(p)?.real_part()),
        TransformId::Charf => model.log_moment(p),
    }
}

/// The same transform from quadrature moments; `p ≤ 500`.
pub fn evaluate_transform_quadrature(
    t: TransformId,
    model: &CircularModel,
    p: u64,
) -> Result<Complex64> {
    check_applicable(t, model)?;
    let order = if t == TransformId::MeanDir { 1 } else { p as i64 };
    let m = model.trig_moment_quadrature(order)?;
    Ok(match t {
        TransformId::MrlSq => Complex64::new(m.alpha * m.alpha + m.beta * m.beta, 0.0),
        TransformId::Sine => Complex64::new(m.beta, 0.0),
        TransformId::Cosine => Complex64::new(m.alpha, 0.0),
        TransformId::MeanDir | TransformId::Charf => m.as_complex(),
    })
}

/// `αₚ` of a model by quadrature at a tighter tolerance than the default,
/// for cross-checks of small moments.
pub fn cosine_moment_quadrature(model: &CircularModel, p: u64, abs_tol: f64) -> Result<f64> {
    let opts = QuadOptions::default()
        .with_abs_tol(abs_tol)
        .with_initial_splits(16.max(4 * p as usize));
    let pf = p as f64;
    Ok(quadrature::integrate(|t| (pf * t).cos() * model.density(t), 0.0, TAU, &opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mrl_sq_example() {
        let m = CircularModel::sswc(0.0, 0.5, 1.0).unwrap();
        let v = evaluate_transform(TransformId::MrlSq, &m, 1).unwrap();
        assert!((v.to_complex().re - 0.390_625).abs() < 1e-15);
    }

    #[test]
    fn sine_vanishes_for_centred_symmetric() {
        let m = CircularModel::ssvm(0.0, 2.0, 0.0).unwrap();
        for p in [1, 7, 300] {
            assert!(evaluate_transform(TransformId::Sine, &m, p).unwrap().is_zero());
        }
    }

    #[test]
    fn charf_example() {
        let m = CircularModel::mc(0.0, 0.4, 0.2, 0.0).unwrap();
        let v = evaluate_transform(TransformId::Charf, &m, 2).unwrap().to_complex();
        assert!((v.re - 0.2944).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn sine_agrees_with_moment() {
        let m = CircularModel::ssvm(2.5, 1.5, -0.4).unwrap();
        for p in 1..20 {
            let direct = evaluate_transform(TransformId::Sine, &m, p).unwrap().to_complex().re;
            let beta = m.trig_moment_closed(p as i64).unwrap().beta;
            assert!((direct - beta).abs() < 1e-15);
        }
    }

    #[test]
    fn applicability() {
        let mc = CircularModel::mc(0.0, 0.4, 0.2, 0.0).unwrap();
        let ss = CircularModel::sswc(0.0, 0.4, 0.2).unwrap();
        assert!(matches!(
            evaluate_transform(TransformId::Sine, &mc, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evaluate_transform(TransformId::Charf, &ss, 1),
            Err(Error::Domain(_))
        ));
        assert!(evaluate_transform(TransformId::MrlSq, &mc, 3).is_ok());
    }
}
