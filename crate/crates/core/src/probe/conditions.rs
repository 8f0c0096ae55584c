//! Conditions on the symmetric base that make a sine-skewed family
//! identifiable: a nonzero first cosine moment, a moment-difference ratio
//! bounded away from zero that grows at most like `p^c`, and cosine-moment
//! ratios between distinct shapes that vanish or blow up against `p^c`.

use serde::Serialize;

use super::classify::{classify_samples, Classification, Samples, DEFAULT_TAIL_WINDOW};
use crate::circular::{CircularModel, Family, SymmetricBase};
use crate::error::{Error, Result};

/// Tolerance used to classify the pair limits.
const PAIR_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiConditions {
    pub psi: f64,
    pub alpha_01: f64,
    pub cond_i: bool,
    /// `inf_{1≤p≤p_max} |(α₀,ₚ₋₁ − α₀,ₚ₊₁)/α₀,ₚ|`, by subtraction of moments.
    pub cond_ii_inf: f64,
    pub cond_ii_inf_at: u64,
    /// Analytic value of the ratio at `p = 1` (the infimum for both bases).
    pub cond_ii_bound: f64,
    pub cond_ii: bool,
    /// Least-squares slope of `ln |ratio|` on `ln p` over `[p_max/2, p_max]`.
    pub cond_iii_exponent: f64,
    /// Root-mean-square residual of that fit.
    pub cond_iii_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairLimit {
    ToZero,
    ToInfinity,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairConditions {
    pub psi_1: f64,
    pub psi_2: f64,
    pub exponent: f64,
    pub limit: PairLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub family: Family,
    pub p_max: u64,
    pub psi: Vec<PsiConditions>,
    pub pairs: Vec<PairConditions>,
}

fn base_for(family: Family, psi: f64) -> Result<SymmetricBase> {
    let model = match family {
        Family::Sswc => CircularModel::sswc(0.0, psi, 0.0)?,
        Family::Ssvm => CircularModel::ssvm(0.0, psi, 0.0)?,
        Family::Mc => {
            return Err(Error::Unsupported(
                "base-moment conditions apply to sine-skewed families only, not mc".into(),
            ))
        }
    };
    Ok(model.symmetric_base().expect("sine-skewed"))
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    (slope, (ss / n).sqrt())
}

fn psi_conditions(base: &SymmetricBase, p_max: u64) -> Result<PsiConditions> {
    let alpha_01 = base.cosine_moment(1)?;
    let mut inf = f64::INFINITY;
    let mut inf_at = 1;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in 1..=p_max {
        let r = base.moment_ratio_by_subtraction(p)?.abs();
        if r < inf {
            inf = r;
            inf_at = p;
        }
        if 2 * p >= p_max {
            xs.push((p as f64).ln());
            ys.push(r.ln());
        }
    }
    let (exponent, residual) = fit_line(&xs, &ys);
    Ok(PsiConditions {
        psi: base.shape(),
        alpha_01,
        cond_i: alpha_01.abs() > 1e-12,
        cond_ii_inf: inf,
        cond_ii_inf_at: inf_at,
        cond_ii_bound: base.moment_ratio(1),
        cond_ii: inf > 0.0,
        cond_iii_exponent: exponent,
        cond_iii_residual: residual,
    })
}

fn pair_limit(b1: &SymmetricBase, b2: &SymmetricBase, exponent: f64, p_max: u64) -> Result<PairLimit> {
    let x: Vec<f64> = (1..=p_max).map(|p| p as f64).collect();
    let log_ratio: Vec<f64> = (1..=p_max)
        .map(|p| Ok(b1.log_cosine_moment(p)? - b2.log_cosine_moment(p)?))
        .collect::<Result<_>>()?;
    let phase = vec![0.0; x.len()];
    let classify = |sign: f64| -> Result<Classification> {
        let scaled: Vec<f64> = log_ratio
            .iter()
            .zip(&x)
            .map(|(l, p)| l + sign * exponent * p.ln())
            .collect();
        classify_samples(
            &Samples {
                abscissae: &x,
                log_magnitude: &scaled,
                phase: &phase,
                regressors: None,
                fit_factor: None,
            },
            PAIR_TOL,
            DEFAULT_TAIL_WINDOW,
        )
    };
    if classify(1.0)? == Classification::ToZero {
        return Ok(PairLimit::ToZero);
    }
    if classify(-1.0)? == Classification::ToInfinity {
        return Ok(PairLimit::ToInfinity);
    }
    Ok(PairLimit::Violated)
}

/// Check the base-moment conditions at each shape value and each shape pair.
pub fn check_base_conditions(
    family: Family,
    psi_values: &[f64],
    psi_pairs: &[(f64, f64)],
    p_max: u64,
) -> Result<ConditionReport> {
    if p_max < 16 {
        return Err(Error::invalid("p_max", p_max as f64, "p_max >= 16"));
    }
    let psi = psi_values
        .iter()
        .map(|&v| psi_conditions(&base_for(family, v)?, p_max))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::with_capacity(psi_pairs.len());
    for &(a, b) in psi_pairs {
        let (b1, b2) = (base_for(family, a)?, base_for(family, b)?);
        let c1 = psi_conditions(&b1, p_max)?.cond_iii_exponent;
        let c2 = psi_conditions(&b2, p_max)?.cond_iii_exponent;
        let exponent = c1.max(c2).max(0.0);
        pairs.push(PairConditions {
            psi_1: a,
            psi_2: b,
            exponent,
            limit: pair_limit(&b1, &b2, exponent, p_max)?,
        });
    }
    Ok(ConditionReport {
        family,
        p_max,
        psi,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapped_cauchy_has_constant_ratio() {
        let r = check_base_conditions(Family::Sswc, &[0.5], &[], 400).unwrap();
        let c = &r.psi[0];
        assert!(c.cond_i && c.cond_ii);
        assert!((c.cond_ii_inf - 1.5).abs() < 1e-12);
        assert_eq!(c.cond_ii_bound, 1.5);
        assert!(c.cond_iii_exponent.abs() < 1e-12);
        assert!(c.cond_iii_residual <= 1e-12);
    }

    #[test]
    fn von_mises_grows_linearly() {
        let r = check_base_conditions(Family::Ssvm, &[2.0], &[(1.0, 2.0), (2.0, 1.0)], 400)
            .unwrap();
        let c = &r.psi[0];
        assert!((c.cond_iii_exponent - 1.0).abs() < 1e-10);
        assert!(c.cond_iii_residual <= 1e-10);
        assert_eq!(c.cond_ii_inf_at, 1);
        assert!((c.cond_ii_inf - 1.0).abs() < 1e-12);
        assert_eq!(r.pairs[0].limit, PairLimit::ToZero);
        assert_eq!(r.pairs[1].limit, PairLimit::ToInfinity);
    }

    #[test]
    fn mc_is_unsupported() {
        assert!(matches!(
            check_base_conditions(Family::Mc, &[0.5], &[], 100),
            Err(Error::Unsupported(_))
        ));
    }
}
