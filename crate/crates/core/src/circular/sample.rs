//! Seeded samplers for the circular families.
//!
//! Sine-skewed families reflect a draw from the symmetric base about `μ`
//! with probability `(1 − λ sin(θ₀ − μ))/2`. The Möbius–Cardioid is sampled
//! by inverting a tabulated CDF.

use std::f64::consts::{PI, TAU};

use rand::distr::Open01;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{CircularModel, McParams, SymmetricBase};
use crate::angle;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

/// Number of cells in the Möbius–Cardioid CDF table.
pub const MC_TABLE_CELLS: usize = 4096;

/// Wrapped Cauchy draw centred at zero, by closed-form inversion.
pub(crate) fn wrapped_cauchy_draw(rho: f64, u: f64) -> f64 {
    2.0 * (((1.0 - rho) / (1.0 + rho)) * (PI * (u - 0.5)).tan()).atan()
}

/// Von Mises rejection sampler with a wrapped Cauchy envelope.
#[derive(Debug, Clone, Copy)]
struct VonMisesSampler {
    kappa: f64,
    rho: f64,
    log_bound: f64,
}

impl VonMisesSampler {
    fn new(kappa: f64) -> Self {
        let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = ((tau - (2.0 * tau).sqrt()) / (2.0 * kappa)).clamp(0.0, 1.0 - 1e-12);
        // ln(target/envelope) up to a constant, as a concave function of c = cos t
        let h = |c: f64| kappa * c + (1.0 + rho * rho - 2.0 * rho * c).ln();
        let c_star = if rho > 0.0 {
            ((1.0 + rho * rho - 2.0 * rho / kappa) / (2.0 * rho)).clamp(-1.0, 1.0)
        } else {
            1.0
        };
        let h_max = h(c_star);
        VonMisesSampler {
            kappa,
            rho,
            log_bound: h_max + 1e-12 * h_max.abs().max(1.0),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let t = wrapped_cauchy_draw(self.rho, rng.sample(Open01));
            let c = t.cos();
            let h = self.kappa * c + (1.0 + self.rho * self.rho - 2.0 * self.rho * c).ln();
            let u: f64 = rng.sample(Open01);
            if u.ln() <= h - self.log_bound {
                return t;
            }
        }
    }
}

struct CdfTable {
    // cumulative[k] = F(k h), cumulative[MC_TABLE_CELLS] = 1
    cumulative: Vec<f64>,
}

impl CdfTable {
    fn build(params: &McParams) -> Result<Self> {
        let model = CircularModel::Mc(*params);
        let h = TAU / MC_TABLE_CELLS as f64;
        let opts = QuadOptions::default()
            .with_abs_tol(1e-15)
            .with_initial_splits(1);
        let mut cumulative = Vec::with_capacity(MC_TABLE_CELLS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..MC_TABLE_CELLS {
            let a = h * k as f64;
            let cell = quadrature::integrate(|t| model.density(t), a, a + h, &opts)?;
            acc += cell.value;
            cumulative.push(acc);
        }
        for c in cumulative.iter_mut() {
            *c /= acc;
        }
        Ok(CdfTable { cumulative })
    }

    fn invert(&self, u: f64) -> f64 {
        let h = TAU / MC_TABLE_CELLS as f64;
        // first node with F > u, bounded to a real cell
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .clamp(1, MC_TABLE_CELLS);
        let lo = self.cumulative[k - 1];
        let hi = self.cumulative[k];
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.5 };
        h * ((k - 1) as f64 + frac)
    }
}

impl CircularModel {
    /// `n` independent draws in `[0, 2π)`, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = self.mu();
        match self {
            CircularModel::Mc(params) => {
                let table = CdfTable::build(params)?;
                Ok((0..n)
                    .map(|_| angle::reduce(table.invert(rng.sample(Open01))))
                    .collect())
            }
            _ => {
                let (base, lambda) = self.sine_skewed().expect("sine-skewed family");
                let vm = match base {
                    SymmetricBase::VonMises { kappa, .. } => Some(VonMisesSampler::new(kappa)),
                    SymmetricBase::WrappedCauchy { .. } => None,
                };
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let t = match (base, &vm) {
                        (SymmetricBase::WrappedCauchy { rho }, _) => {
                            wrapped_cauchy_draw(rho, rng.sample(Open01))
                        }
                        (_, Some(s)) => s.draw(&mut rng),
                        _ => unreachable!(),
                    };
                    let u: f64 = rng.sample(Open01);
                    let keep = u < 0.5 * (1.0 + lambda * t.sin());
                    out.push(angle::reduce(mu + if keep { t } else { -t }));
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empirical(draws: &[f64], p: f64) -> (f64, f64, f64, f64) {
        let n = draws.len() as f64;
        let c: Vec<f64> = draws.iter().map(|t| (p * t).cos()).collect();
        let s: Vec<f64> = draws.iter().map(|t| (p * t).sin()).collect();
        let mc = c.iter().sum::<f64>() / n;
        let ms = s.iter().sum::<f64>() / n;
        let vc = c.iter().map(|x| (x - mc).powi(2)).sum::<f64>() / (n - 1.0);
        let vs = s.iter().map(|x| (x - ms).powi(2)).sum::<f64>() / (n - 1.0);
        (mc, ms, (vc / n).sqrt(), (vs / n).sqrt())
    }

    #[test]
    fn wrapped_cauchy_inversion_quantiles() {
        // the median of |θ| under WC(ρ) is 2 atan((1−ρ)/(1+ρ))
        let rho = 0.6;
        let q = wrapped_cauchy_draw(rho, 0.75);
        assert!((q - 2.0 * ((1.0 - rho) / (1.0 + rho)).atan()).abs() < 1e-15);
        assert_eq!(wrapped_cauchy_draw(rho, 0.5), 0.0);
    }

    #[test]
    fn von_mises_envelope_dominates() {
        for &kappa in &[1e-6, 0.1, 1.0, 2.0, 10.0, 100.0] {
            let s = VonMisesSampler::new(kappa);
            for k in 0..=1000 {
                let c = -1.0 + 2.0 * k as f64 / 1000.0;
                let h = kappa * c + (1.0 + s.rho * s.rho - 2.0 * s.rho * c).ln();
                assert!(h <= s.log_bound, "kappa {kappa} c {c}");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let m = CircularModel::ssvm(1.0, 3.0, 0.4).unwrap();
        assert_eq!(m.sample(50, 9).unwrap(), m.sample(50, 9).unwrap());
        assert_ne!(m.sample(50, 9).unwrap(), m.sample(50, 10).unwrap());
        assert!(matches!(m.sample(0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn sswc_first_moment_matches() {
        let m = CircularModel::sswc(0.0, 0.5, 0.8).unwrap();
        let draws = m.sample(100_000, 42).unwrap();
        let (a, b, sa, sb) = empirical(&draws, 1.0);
        assert!((a - 0.5).abs() < 4.0 * sa);
        assert!((b - 0.3).abs() < 4.0 * sb);
    }

    #[test]
    fn all_families_match_closed_moments() {
        let models = [
            CircularModel::sswc(4.0, 0.3, -0.7).unwrap(),
            CircularModel::ssvm(0.5, 2.5, 0.9).unwrap(),
            CircularModel::ssvm(5.0, 0.3, -1.0).unwrap(),
            CircularModel::mc(0.3, 0.4, 0.2, 0.9).unwrap(),
        ];
        for (i, m) in models.iter().enumerate() {
            let draws = m.sample(100_000, 7 + i as u64).unwrap();
            assert!(draws.iter().all(|t| (0.0..TAU).contains(t)));
            for p in 1..=2 {
                let exact = m.trig_moment_closed(p).unwrap();
                let (a, b, sa, sb) = empirical(&draws, p as f64);
                assert!((a - exact.alpha).abs() < 4.0 * sa, "{m:?} p={p} alpha");
                assert!((b - exact.beta).abs() < 4.0 * sb, "{m:?} p={p} beta");
            }
        }
    }

    #[test]
    fn symmetric_model_has_centred_sine_moment() {
        let m = CircularModel::sswc(0.0, 0.7, 0.0).unwrap();
        let draws = m.sample(100_000, 3).unwrap();
        let (_, b, _, sb) = empirical(&draws, 1.0);
        assert!(b.abs() < 4.0 * sb);
    }
}
