//! Angle reduction and circle geometry.
//!
//! Every angle handled by the crate is reduced to `[0, 2π)` through the
//! helpers here. Reduction splits 2π into a double-precision head and tail
//! (Cody–Waite style) so that products `p · a` with `p` up to about `1e9`
//! keep close to full precision.

use std::f64::consts::{PI, TAU};

/// Tail of 2π: `2π - TAU` to double precision.
pub(crate) const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Reduce `x` into `[0, 2π)`.
pub fn reduce(x: f64) -> f64 {
    reduce_with_tail(x, 0.0)
}

/// Reduce `hi + lo` into `[0, 2π)`, where `lo` is a small correction term.
fn reduce_with_tail(hi: f64, lo: f64) -> f64 {
    if !hi.is_finite() {
        return f64::NAN;
    }
    let k = (hi / TAU).floor();
    let mut r = (-k).mul_add(TAU, hi) - k * TAU_LO + lo;
    // at most one correction step is ever needed
    if r < 0.0 {
        r += TAU;
    } else if r >= TAU {
        r -= TAU;
    }
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduce the product `p · a` into `[0, 2π)` without first rounding the
/// product away. Exact for `|p| < 2^53`.
pub fn reduce_product(p: i64, a: f64) -> f64 {
    let pf = p as f64;
    let prod = pf * a;
    let err = pf.mul_add(a, -prod);
    reduce_with_tail(prod, err)
}

/// Wrap into `(-π, π]`.
pub fn wrap_signed(x: f64) -> f64 {
    let r = reduce(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Geodesic distance on the unit circle, in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = reduce(a - b);
    d.min(TAU - d)
}

/// Two angles are treated as equal when their circle distance is at most `tol`.
pub fn angles_equal(a: f64, b: f64, tol: f64) -> bool {
    circle_distance(a, b) <= tol
}
