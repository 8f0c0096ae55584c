//! Integers `p` that bring every `p · cᵢπ` close to a multiple of 2π.
//!
//! Coefficients are the `cᵢ ∈ [0, 2)` of angles `aᵢ = cᵢπ`. The residual of
//! an index is `π · dist(p cᵢ, 2ℤ)`, which is evaluated from an error-free
//! product so that it stays accurate for `p` up to `1e9`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::angle;
use crate::error::{Error, Result};

pub const MAX_COEFFS: usize = 8;
pub const MAX_P: u64 = 1_000_000_000;
/// Largest `|x|` accepted by [`mod_2pi_distance`].
pub const DISTANCE_ENVELOPE: f64 = 1e12;
/// Largest `Q^s` scanned by [`dirichlet_construct`].
pub const DIRICHLET_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineQuery {
    coeffs: Vec<f64>,
    epsilon: f64,
    p_max: u64,
}

impl DiophantineQuery {
    pub fn new(coeffs: Vec<f64>, epsilon: f64, p_max: u64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_COEFFS {
            return Err(Error::Domain(format!(
                "need between 1 and {MAX_COEFFS} coefficients, got {}",
                coeffs.len()
            )));
        }
        for &c in &coeffs {
            if !(0.0..2.0).contains(&c) {
                return Err(Error::invalid("coeff", c, "0 <= c < 2"));
            }
        }
        if !(epsilon > 0.0 && epsilon < PI) {
            return Err(Error::invalid("epsilon", epsilon, "0 < epsilon < pi"));
        }
        if p_max == 0 || p_max > MAX_P {
            return Err(Error::invalid("p_max", p_max as f64, "1 <= p_max <= 1e9"));
        }
        Ok(DiophantineQuery {
            coeffs,
            epsilon,
            p_max,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSequence {
    pub indices: Vec<u64>,
    /// `maxᵢ dist(p cᵢπ, 2πℤ)` for each index.
    pub residuals: Vec<f64>,
}

impl IndexSequence {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `minₖ |x − 2πk|`, in `[0, π]`.
pub fn mod_2pi_distance(x: f64) -> Result<f64> {
    if !(x.abs() < DISTANCE_ENVELOPE) {
        return Err(Error::Domain(format!(
            "|x| = {} outside the reduction envelope {DISTANCE_ENVELOPE:e}",
            x.abs()
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let r = angle::reduce(x);
    Ok(r.min(TAU - r))
}

/// `π · dist(p c, 2ℤ)`: the distance of `p · cπ` from `2πℤ`.
pub fn coefficient_residual(p: u64, c: f64) -> f64 {
    let pf = p as f64;
    let prod = pf * c;
    let err = pf.mul_add(c, -prod);
    // exact: both terms are multiples of ulp(prod) and the result is at most 1
    let frac = prod - 2.0 * (0.5 * prod).round();
    let d = (frac + err).abs();
    PI * if d > 1.0 { 2.0 - d } else { d }
}

/// Largest residual over all coefficients.
pub fn index_residual(p: u64, coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .map(|&c| coefficient_residual(p, c))
        .fold(0.0, f64::max)
}

/// `c/2` as an exact 128-bit binary fraction of a turn, when it has one.
/// Tiny or subnormal coefficients have none.
fn turn_fraction(c: f64) -> Option<u128> {
    if c == 0.0 {
        return Some(0);
    }
    let bits = c.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        return None;
    }
    let m = (bits & ((1 << 52) - 1)) | (1 << 52);
    // c/2 · 2^128 = m · 2^(exp − 948)
    let k = exp - 948;
    if k >= 0 {
        Some((m as u128) << k)
    } else if m.trailing_zeros() as i32 >= -k {
        Some((m >> -k) as u128)
    } else {
        None
    }
}

/// Smallest `p` in `[from, p_max]` with every residual below `eps`, and its residual.
///
/// Candidates are screened in fixed point (`p · c/2 mod 1` from the top 64
/// bits of the turn, whose dropped carry is below `p` units) and confirmed
/// with [`index_residual`].
pub fn next_index(coeffs: &[f64], from: u64, p_max: u64, eps: f64) -> Option<(u64, f64)> {
    let turns: Vec<Option<u64>> = coeffs
        .iter()
        .map(|&c| turn_fraction(c).map(|a| (a >> 64) as u64))
        .collect();
    // loose by the carry bound, so the exact check below has the last word
    let cut = eps / TAU * (1.0 + 1e-9) * 2f64.powi(64);
    let cut = if cut >= 2f64.powi(63) { u64::MAX } else { (cut as u64).saturating_add(p_max + 2) };
    let near = |p: u64, c: f64, t: Option<u64>| match t {
        Some(a) => {
            let x = p.wrapping_mul(a);
            x.min(x.wrapping_neg()) <= cut
        }
        None => coefficient_residual(p, c) < eps,
    };
    let mut p = from;
    while p <= p_max {
        if let Some(a) = turns[0] {
            // tight loop on the first coefficient, which rejects almost every p
            let mut x = p.wrapping_mul(a);
            while x.min(x.wrapping_neg()) > cut {
                if p == p_max {
                    return None;
                }
                p += 1;
                x = x.wrapping_add(a);
            }
        }
        if coeffs.iter().zip(&turns).all(|(&c, &t)| near(p, c, t)) {
            let worst = index_residual(p, coeffs);
            if worst < eps {
                return Some((p, worst));
            }
        }
        p += 1;
    }
    None
}

/// The `count` smallest `p ≤ p_max` with every residual below `ε`.
pub fn find_indices(query: &DiophantineQuery, count: usize) -> Result<IndexSequence> {
    let eps = query.epsilon;
    find_with(query, count, |_| eps)
}

/// Like [`find_indices`], but the tolerance tightens along the sequence:
/// the `n`th index must beat `ε · 2^{−n/s}`, `s` the number of coefficients.
///
/// Each step then costs about twice the previous one, and ratios evaluated
/// along the sequence settle geometrically.
pub fn find_refining_indices(query: &DiophantineQuery, count: usize) -> Result<IndexSequence> {
    let eps = query.epsilon;
    let s = query.coeffs.len();
    find_with(query, count, |n| refining_tolerance(eps, s, n))
}

/// `ε · 2^{−n/s}`: the tolerance of the `n`th refining index.
pub fn refining_tolerance(epsilon: f64, s: usize, n: usize) -> f64 {
    epsilon * (-(n as f64) / s as f64).exp2()
}

fn find_with<F: Fn(usize) -> f64>(
    query: &DiophantineQuery,
    count: usize,
    tolerance: F,
) -> Result<IndexSequence> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let mut out = IndexSequence {
        indices: Vec::with_capacity(count),
        residuals: Vec::with_capacity(count),
    };
    let mut next = 1;
    while out.len() < count {
        match next_index(&query.coeffs, next, query.p_max, tolerance(out.len())) {
            Some((p, r)) => {
                out.indices.push(p);
                out.residuals.push(r);
                next = p + 1;
            }
            None => {
                return Err(Error::Exhausted {
                    found: out.indices,
                    requested: count,
                    p_max: query.p_max,
                })
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletApprox {
    /// `p = 2q√Q`.
    pub p: u64,
    pub q: u64,
    pub numerators: Vec<i64>,
    /// `maxᵢ p |cᵢπ − (pᵢ/q)π|`.
    pub bound: f64,
    /// `2π/√Q`.
    pub guaranteed: f64,
    /// `maxᵢ dist(p cᵢπ, 2πℤ)`, measured independently.
    pub residual: f64,
}

/// Simultaneous approximation `|q cᵢ − pᵢ| ≤ 1/Q` with `q ≤ Q^s`, found by
/// scanning `q`, then lifted to `p = 2q√Q`.
pub fn dirichlet_construct(coeffs: &[f64], big_q: u64) -> Result<DirichletApprox> {
    if coeffs.is_empty() || coeffs.len() > MAX_COEFFS {
        return Err(Error::Domain(format!(
            "need between 1 and {MAX_COEFFS} coefficients, got {}",
            coeffs.len()
        )));
    }
    for &c in coeffs {
        if !(0.0..2.0).contains(&c) {
            return Err(Error::invalid("coeff", c, "0 <= c < 2"));
        }
    }
    let root = (big_q as f64).sqrt().round() as u64;
    if big_q < 2 || root * root != big_q {
        return Err(Error::Domain(format!(
            "Q = {big_q} must be at least 2 with an integer square root"
        )));
    }
    let budget = big_q
        .checked_pow(coeffs.len() as u32)
        .filter(|&b| b <= DIRICHLET_BUDGET)
        .ok_or_else(|| {
            Error::Domain(format!(
                "Q^s = {big_q}^{} exceeds the scan budget {DIRICHLET_BUDGET}",
                coeffs.len()
            ))
        })?;
    let target = 1.0 / big_q as f64;
    let mut best: Option<(u64, f64)> = None;
    for q in 1..=budget {
        let qf = q as f64;
        let dev = coeffs
            .iter()
            .map(|&c| {
                let x = qf * c;
                (x - x.round()).abs()
            })
            .fold(0.0, f64::max);
        if best.is_none_or(|(_, d)| dev < d) {
            best = Some((q, dev));
        }
        if dev <= target {
            break;
        }
    }
    let (q, dev) = best.expect("budget is at least 2");
    let p = 2 * q * root;
    Ok(DirichletApprox {
        p,
        q,
        numerators: coeffs.iter().map(|&c| (q as f64 * c).round() as i64).collect(),
        bound: 2.0 * root as f64 * PI * dev,
        guaranteed: TAU / root as f64,
        residual: index_residual(p, coeffs),
    })
}
