//! Modified Bessel functions of the first kind, integer order.
//!
//! Values come from the ascending series
//!
//! ```text
//! I_p(x) = (x/2)^p / p! · Σ_r (x²/4)^r / (r! (p+1)_r)
//! ```
//!
//! summed forward with a term-ratio stopping rule. The prefactor is kept in
//! log form: at small arguments `I_p(x)` underflows long before order 200.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest order accepted by the public entry points.
pub const MAX_ORDER: u64 = 200;
/// Largest argument accepted anywhere in the crate.
pub const MAX_ARGUMENT: f64 = 100.0;

const MAX_TERMS: usize = 500;
const STOP_RATIO: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselEval {
    pub order: u64,
    pub argument: f64,
    /// `I_p(x)`; zero when it underflows, in which case only `log_value` is usable.
    pub value: f64,
    pub log_value: f64,
}

/// `ln n!`, exact-product for small `n` and Stirling's series above.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut acc = 1.0_f64;
        for k in 2..=n {
            acc *= k as f64;
        }
        return acc.ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/(12n) - 1/(360n³) + 1/(1260n⁵) - 1/(1680n⁷)
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln() + series
}

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= MAX_ARGUMENT) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside (0, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

fn check_order(order: u64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {order} exceeds {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `ln I_p(x)` for any order. The argument must lie in `(0, MAX_ARGUMENT]`.
///
/// Used directly by the von Mises moments, which need orders well past the
/// public envelope; the series converges faster as the order grows.
pub(crate) fn log_bessel_i_any_order(order: u64, x: f64) -> Result<f64> {
    check_argument(x)?;
    let q = 0.25 * x * x;
    let p = order as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut converged = false;
    for r in 0..MAX_TERMS {
        let r1 = (r + 1) as f64;
        term *= q / (r1 * (p + r1));
        sum += term;
        if term < STOP_RATIO * sum {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Bessel series for I_{order}({x}) did not converge in {MAX_TERMS} terms"
        )));
    }
    Ok(p * (0.5 * x).ln() - ln_factorial(order) + sum.ln())
}

/// `I_p(x)` with `p ≤ 200`, `0 < x ≤ 100`.
pub fn bessel_i(order: u64, x: f64) -> Result<BesselEval> {
    check_order(order)?;
    let log_value = log_bessel_i_any_order(order, x)?;
    Ok(BesselEval {
        order,
        argument: x,
        value: log_value.exp(),
        log_value,
    })
}

/// `ln A_p(x)` where `A_p = I_p / I_0`, any order.
pub(crate) fn log_bessel_ratio_any_order(order: u64, x: f64) -> Result<f64> {
    if order == 0 {
        check_argument(x)?;
        return Ok(0.0);
    }
    Ok(log_bessel_i_any_order(order, x)? - log_bessel_i_any_order(0, x)?)
}

/// `A_p(x) = I_p(x) / I_0(x)`, formed in the log domain.
pub fn bessel_ratio(order: u64, x: f64) -> Result<f64> {
    check_order(order)?;
    Ok(log_bessel_ratio_any_order(order, x)?.exp())
}

/// Relative residual of `I_{p-1} - I_{p+1} = (2p/x) I_p`.
pub fn check_recurrence(order: u64, x: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::Domain("recurrence check needs order >= 1".into()));
    }
    check_order(order)?;
    let centre = log_bessel_i_any_order(order, x)?;
    let below = (log_bessel_i_any_order(order - 1, x)? - centre).exp();
    let above = (log_bessel_i_any_order(order + 1, x)? - centre).exp();
    let rhs = 2.0 * order as f64 / x;
    Ok((below - above - rhs).abs() / rhs)
}

/// Log of the leading series term `(x/2)^p / p!`, the lower bound on `I_p(x)`.
/// The matching upper bound is this plus `x²/4`.
pub fn log_leading_term(order: u64, x: f64) -> f64 {
    order as f64 * (0.5 * x).ln() - ln_factorial(order)
}

/// Upper bound on `A_p(x) / A_p(x')` for `x < x'` obtained from the
/// two-sided series bound: `(x/x')^p · e^{x²/4} · I_0(x') / I_0(x)`.
pub fn ratio_decay_bound(order: u64, x: f64, x_prime: f64) -> Result<f64> {
    if !(x < x_prime) {
        return Err(Error::Domain(format!(
            "decay bound needs x < x', got {x} and {x_prime}"
        )));
    }
    let log_i0 = log_bessel_i_any_order(0, x)?;
    let log_i0_prime = log_bessel_i_any_order(0, x_prime)?;
    Ok((order as f64 * (x / x_prime).ln() + 0.25 * x * x + log_i0_prime - log_i0).exp())
}
