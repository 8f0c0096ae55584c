//! Numerical classification of a ratio sequence's limit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TAIL_WINDOW: usize = 5;
pub const MIN_TRACE_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Classification {
    /// Limit `re + i im` away from 1, with the spread of the tail estimates.
    ConvergesTo { re: f64, im: f64, dispersion: f64 },
    ToZero,
    ToInfinity,
    /// The two transform values differ at a single index.
    FiniteDifference {
        index: u64,
        value_1: [f64; 2],
        value_2: [f64; 2],
        difference: f64,
    },
    Unit,
    Inconclusive { reason: String },
}

impl Classification {
    /// True for the verdicts that separate the two parameter vectors.
    pub fn is_separating(&self) -> bool {
        !matches!(
            self,
            Classification::Unit | Classification::Inconclusive { .. }
        )
    }

    pub fn limit(&self) -> Option<Complex64> {
        match *self {
            Classification::ConvergesTo { re, im, .. } => Some(Complex64::new(re, im)),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::ConvergesTo { .. } => "ConvergesTo",
            Classification::ToZero => "ToZero",
            Classification::ToInfinity => "ToInfinity",
            Classification::FiniteDifference { .. } => "FiniteDifference",
            Classification::Unit => "Unit",
            Classification::Inconclusive { .. } => "Inconclusive",
        }
    }
}

/// Ratio values given as `(ln |z|, arg z)` at increasing abscissae.
///
/// `regressors`, when given, holds per entry the small signed quantities
/// (angle residuals) whose vanishing defines the limit.
pub(crate) struct Samples<'a> {
    pub abscissae: &'a [f64],
    pub log_magnitude: &'a [f64],
    pub phase: &'a [f64],
    pub regressors: Option<&'a [Vec<f64>]>,
    /// Known per-entry factors, tending to 1, divided out before the
    /// regression on `regressors`.
    pub fit_factor: Option<&'a [Complex64]>,
}

/// Value at zero of the polynomial through `(h[k], z[k])`, by Neville's scheme.
fn neville_at_zero(h: &[f64], z: &[Complex64]) -> Complex64 {
    let mut p = z.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (p[i] * hj - p[i + 1] * hi) / (hj - hi);
        }
    }
    p[0]
}

/// Least-squares fit of `z (1 + Σ bⱼ rⱼ) = c + Σ aⱼ rⱼ`, a ratio of two
/// affine functions of the regressors, as `[c, a…, b…]`; `None` when the
/// system is degenerate.
fn rational_fit(r: &[Vec<f64>], z: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = r[0].len();
    let q = 1 + 2 * m;
    if z.len() < q + 1 {
        return None;
    }
    let rows: Vec<Vec<Complex64>> = r
        .iter()
        .zip(z)
        .map(|(rk, &zk)| {
            std::iter::once(Complex64::new(1.0, 0.0))
                .chain(rk.iter().map(|&v| Complex64::new(v, 0.0)))
                .chain(rk.iter().map(|&v| -zk * v))
                .collect()
        })
        .collect();
    // columns scaled to unit maximum
    let scale: Vec<f64> = (0..q)
        .map(|j| rows.iter().map(|row| row[j].norm()).fold(0.0, f64::max))
        .collect();
    if scale.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return None;
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![vec![zero; q]; q];
    let mut b = vec![zero; q];
    for (row, &zk) in rows.iter().zip(z) {
        for i in 0..q {
            let xi = row[i].conj() / scale[i];
            for j in 0..q {
                a[i][j] += xi * row[j] / scale[j];
            }
            b[i] += xi * zk;
        }
    }
    // Gaussian elimination with partial pivoting
    let size = a.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    for col in 0..q {
        let piv = (col..q).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() <= 1e-12 * size {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..q {
            let f = a[i][col] / a[col][col];
            for j in col..q {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
            let v = b[col];
            b[i] -= f * v;
        }
    }
    let mut x = vec![zero; q];
    for i in (0..q).rev() {
        let mut acc = b[i];
        for j in i + 1..q {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x.iter().zip(&scale).map(|(v, s)| v / s).collect())
}

fn rational_value(coef: &[Complex64], r: &[f64]) -> Complex64 {
    let m = r.len();
    let mut num = coef[0];
    let mut den = Complex64::new(1.0, 0.0);
    for j in 0..m {
        num += coef[1 + j] * r[j];
        den += coef[1 + m + j] * r[j];
    }
    num / den
}

fn rational_intercept(r: &[Vec<f64>], z: &[Complex64]) -> Option<Complex64> {
    rational_fit(r, z).map(|c| c[0])
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Extrapolation to vanishing regressors from the last `2q + 2` entries,
/// `q` the number of fitted coefficients; the dispersion is the largest
/// change when any one of them is left out.
///
/// `None` also when the fitted model misses an entry by more than `tol`
/// relative: the limit is then not of this form (a pole, for instance).
fn regression_estimate(
    r: &[Vec<f64>],
    lm: &[f64],
    ph: &[f64],
    tol: f64,
) -> Option<(Complex64, f64)> {
    let q = 1 + 2 * r.first()?.len();
    let len = lm.len();
    let n = (2 * q + 2).min(len);
    if n < q + 2 {
        return None;
    }
    let z: Vec<Complex64> = (len - n..len)
        .map(|k| Complex64::from_polar(lm[k].exp(), ph[k]))
        .collect();
    if !z.iter().all(|v| v.is_finite()) {
        return None;
    }
    let r = &r[len - n..];
    let coef = rational_fit(r, &z)?;
    let misfit = r
        .iter()
        .zip(&z)
        .map(|(rk, zk)| (rational_value(&coef, rk) - zk).norm() / zk.norm())
        .fold(0.0, f64::max);
    if !(misfit <= tol) {
        return None;
    }
    let full = coef[0];
    let mut dispersion = 0.0_f64;
    for k in 0..n {
        let keep = |v: usize| v != k;
        let rk: Vec<Vec<f64>> = (0..n).filter(|&v| keep(v)).map(|v| r[v].clone()).collect();
        let zk: Vec<Complex64> = (0..n).filter(|&v| keep(v)).map(|v| z[v]).collect();
        dispersion = dispersion.max((full - rational_intercept(&rk, &zk)?).norm());
    }
    (full.is_finite() && dispersion.is_finite()).then_some((full, dispersion))
}

/// Value at zero of the diagonal rational function through `(h[k], z[k])`,
/// by the Stoer–Bulirsch recursion; `None` at an interpolant pole.
fn rational_at_zero(h: &[f64], z: &[Complex64]) -> Option<Complex64> {
    let n = z.len();
    let mut c = z.to_vec();
    let mut d: Vec<Complex64> = z.iter().map(|v| v + 1e-300).collect();
    let mut ns = (0..n).min_by(|&a, &b| h[a].abs().total_cmp(&h[b].abs()))?;
    let mut y = z[ns];
    for m in 1..n {
        for i in 0..n - m {
            let w = c[i + 1] - d[i];
            let t = d[i] * (h[i] / h[i + m]);
            let dd = t - c[i + 1];
            if dd.norm() == 0.0 {
                return None;
            }
            let dd = w / dd;
            d[i] = c[i + 1] * dd;
            c[i] = t * dd;
        }
        y += if 2 * ns < n - m {
            c[ns]
        } else {
            ns = ns.checked_sub(1)?;
            d[ns]
        };
    }
    y.is_finite().then_some(y)
}

/// Indices of the entries nearest `x_last / 2^j`, `j < count`; `None`
/// unless consecutive picks differ by a factor of at least 1.5.
fn geometric_nodes(x: &[f64], count: usize) -> Option<Vec<usize>> {
    let last = *x.last()?;
    if !(last > 0.0) {
        return None;
    }
    let mut picks: Vec<usize> = Vec::with_capacity(count);
    for j in 0..count {
        let target = (last / (1u64 << j) as f64).ln();
        let k = (0..x.len())
            .filter(|&k| x[k] > 0.0)
            .min_by(|&a, &b| (x[a].ln() - target).abs().total_cmp(&(x[b].ln() - target).abs()))?;
        if let Some(&prev) = picks.last() {
            if x[prev] < 1.5 * x[k] {
                return None;
            }
        }
        picks.push(k);
    }
    Some(picks)
}

/// Extrapolations in `1/x` through entries near `x_last / 2^j`.
///
/// Consecutive nodes would amplify rounding in the values by roughly
/// `(x/Δx)^4`; halving spacing keeps the amplification modest. The
/// polynomial estimate uses `j < 5` and drops the smallest node for its
/// dispersion; the rational one uses `j < 5` against `1 ≤ j < 6`, and
/// also covers ratios whose poles in `1/x` lie closer to zero than the nodes.
fn geometric_estimates(s: &Samples<'_>) -> Vec<(Complex64, f64)> {
    const NODES: usize = 5;
    let x = s.abscissae;
    let values = |picks: &[usize]| -> Option<(Vec<f64>, Vec<Complex64>)> {
        let h = picks.iter().map(|&k| 1.0 / x[k]).collect();
        let z: Vec<Complex64> = picks
            .iter()
            .map(|&k| Complex64::from_polar(s.log_magnitude[k].exp(), s.phase[k]))
            .collect();
        z.iter().all(|v| v.is_finite()).then_some((h, z))
    };
    let mut out = Vec::new();
    if let Some((h, z)) = geometric_nodes(x, NODES).and_then(|p| values(&p)) {
        let full = neville_at_zero(&h, &z);
        let reduced = neville_at_zero(&h[..NODES - 1], &z[..NODES - 1]);
        out.push((full, (full - reduced).norm()));
    }
    if let Some((h, z)) = geometric_nodes(x, NODES + 1).and_then(|p| values(&p)) {
        if let (Some(a), Some(b)) = (rational_at_zero(&h[..NODES], &z[..NODES]), rational_at_zero(&h[1..], &z[1..])) {
            out.push((a, (a - b).norm()));
        }
    }
    out.retain(|(v, d)| v.is_finite() && d.is_finite());
    out
}

pub(crate) fn classify_samples(s: &Samples<'_>, tol: f64, window: usize) -> Result<Classification> {
    let len = s.log_magnitude.len();
    if len < MIN_TRACE_LEN {
        return Err(Error::Domain(format!(
            "trace has {len} entries, classification needs at least {MIN_TRACE_LEN}"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("tol", tol, "0 < tol < 1"));
    }
    let w = window.clamp(2, len);
    let tail = len - w;
    let x = &s.abscissae[tail..];
    let lm = &s.log_magnitude[tail..];
    let ph = &s.phase[tail..];

    let (fit_lm, fit_ph): (Vec<f64>, Vec<f64>) = match s.fit_factor {
        Some(f) => s
            .log_magnitude
            .iter()
            .zip(s.phase)
            .zip(f)
            .map(|((&l, &a), v)| (l - v.norm().ln(), a - v.arg()))
            .unzip(),
        None => (s.log_magnitude.to_vec(), s.phase.to_vec()),
    };

    // limit estimates: the last value, and the extrapolation in 1/x
    let z: Vec<Complex64> = lm
        .iter()
        .zip(ph)
        .map(|(&l, &a)| Complex64::from_polar(l.exp(), a))
        .collect();
    if z.iter().all(|v| v.is_finite()) {
        let last = z[w - 1];
        let spread = z.iter().map(|v| (v - last).norm()).fold(0.0, f64::max);
        // remaining drift if the approach is like 1/x
        let step = x[w - 1] - x[w - 2];
        let drift = (last - z[w - 2]).norm() * x[w - 1] / step;
        let mut best = (last, spread.max(drift));

        // extrapolation in 1/x only where x itself drives the limit, not
        // along Diophantine sequences
        let even = x.windows(2).all(|p| ((p[1] - p[0]) - step).abs() <= 1e-9 * step);
        if even && s.regressors.is_none() && x[0] > 0.0 && w >= 3 {
            let h: Vec<f64> = x.iter().map(|v| 1.0 / v).collect();
            let full = neville_at_zero(&h, &z);
            let reduced = neville_at_zero(&h[1..], &z[1..]);
            let dispersion = (full - reduced).norm();
            if full.is_finite() && dispersion < best.1 {
                best = (full, dispersion);
            }
        }
        if s.regressors.is_none() {
            for est in geometric_estimates(s) {
                if est.1 < best.1 {
                    best = est;
                }
            }
        }
        if let Some(r) = s.regressors {
            if let Some(est) = regression_estimate(r, &fit_lm, &fit_ph, tol) {
                if est.1 < best.1 {
                    best = est;
                }
            }
        }
        let (centre, dispersion) = best;
        if dispersion < tol * centre.norm() {
            return Ok(if (centre - 1.0).norm() < tol {
                Classification::Unit
            } else {
                Classification::ConvergesTo {
                    re: centre.re,
                    im: centre.im,
                    dispersion,
                }
            });
        }
    }

    let threshold = -tol.ln();
    let strictly = |f: fn(f64, f64) -> bool| lm.windows(2).all(|p| f(p[0], p[1]));
    // trend over the longer of the window and the second half of the trace
    let from = tail.min(len / 2);
    let slope = ols_slope(&s.abscissae[from..], &s.log_magnitude[from..]);
    let span = s.abscissae[len - 1] - s.abscissae[from];
    let trend = slope * span;
    if lm.iter().all(|&l| l < -threshold)
        && (strictly(|a, b| b < a) || trend < -std::f64::consts::LN_2)
    {
        return Ok(Classification::ToZero);
    }
    if lm.iter().all(|&l| l > threshold)
        && (strictly(|a, b| b > a) || trend > std::f64::consts::LN_2)
    {
        return Ok(Classification::ToInfinity);
    }
    // a pole or zero at vanishing residual: the fitted intercept of 1/z (or z)
    // sits below the threshold with its whole dispersion
    // a numerator residual can outweigh a small leading term at single
    // entries, so the side is taken from the window mean
    if let Some(r) = s.regressors {
        let inv_lm: Vec<f64> = fit_lm.iter().map(|l| -l).collect();
        let inv_ph: Vec<f64> = fit_ph.iter().map(|a| -a).collect();
        let mean = lm.iter().sum::<f64>() / w as f64;
        if mean > 0.0 {
            if let Some((c, d)) = regression_estimate(r, &inv_lm, &inv_ph, tol) {
                if c.norm() + d < tol {
                    return Ok(Classification::ToInfinity);
                }
            }
        }
        if mean < 0.0 {
            if let Some((c, d)) = regression_estimate(r, &fit_lm, &fit_ph, tol) {
                if c.norm() + d < tol {
                    return Ok(Classification::ToZero);
                }
            }
        }
    }
    Ok(Classification::Inconclusive {
        reason: format!(
            "tail of {w} entries neither settles within {tol:e} nor leaves [{:.3e}, {:.3e}]",
            tol,
            1.0 / tol
        ),
    })
}
