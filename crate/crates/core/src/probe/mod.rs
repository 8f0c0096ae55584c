//! Separation of parameter vectors by transform ratios.
//!
//! For two parameter vectors of one family, [`probe_pair`] picks the
//! coordinate that differs first in the family's order, evaluates the
//! matching transform ratio `φ(p|γ₁)/φ(p|γ₂)` along an index sequence and
//! classifies its limit. A verdict other than `Unit` or `Inconclusive` is
//! numerical evidence that the two vectors give different laws.

mod classify;
mod conditions;
mod transform;

use num_complex::Complex64;
use serde::Serialize;

use crate::angle;
use crate::circular::{CircularModel, Family};
use crate::diophantine::{self, DiophantineQuery, IndexSequence};
use crate::error::{Error, Result};
use crate::polar::LogPolar;

pub use classify::{Classification, DEFAULT_TAIL_WINDOW, MIN_TRACE_LEN};
pub(crate) use classify::{classify_samples, Samples};
pub use conditions::{
    check_base_conditions, ConditionReport, PairConditions, PairLimit, PsiConditions,
};
pub use transform::{
    cosine_moment_quadrature, evaluate_transform, evaluate_transform_quadrature, TransformId,
};

/// Angles closer than this on the circle count as equal.
pub const ANGLE_EQUALITY_TOL: f64 = 1e-12;
/// Relative change in `ln |φ|` or `arg φ` below which two values are one.
const SAME_VALUE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTrace {
    pub transform: TransformId,
    pub indices: Vec<u64>,
    pub log_magnitude: Vec<f64>,
    pub phase: Vec<f64>,
}

impl RatioTrace {
    pub fn new(transform: TransformId) -> Self {
        RatioTrace {
            transform,
            indices: Vec::new(),
            log_magnitude: Vec::new(),
            phase: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn push(&mut self, p: u64, ratio: LogPolar) {
        self.indices.push(p);
        self.log_magnitude.push(ratio.log_magnitude);
        self.phase.push(ratio.phase);
    }

    /// Multiply every entry by the same nonzero complex scalar.
    pub fn scaled(&self, factor: LogPolar) -> RatioTrace {
        let mut out = RatioTrace::new(self.transform);
        for k in 0..self.len() {
            let v = LogPolar::new(self.log_magnitude[k], self.phase[k]).mul(&factor);
            out.push(self.indices[k], v);
        }
        out
    }
}

/// Classify the limit of a ratio trace using its last `tail_window` entries.
pub fn classify_limit(trace: &RatioTrace, tol: f64) -> Result<Classification> {
    classify_limit_with_window(trace, tol, DEFAULT_TAIL_WINDOW)
}

pub fn classify_limit_with_window(
    trace: &RatioTrace,
    tol: f64,
    tail_window: usize,
) -> Result<Classification> {
    if trace.log_magnitude.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("trace entries must be finite".into()));
    }
    let x: Vec<f64> = trace.indices.iter().map(|&p| p as f64).collect();
    classify_samples(
        &Samples {
            abscissae: &x,
            log_magnitude: &trace.log_magnitude,
            phase: &trace.phase,
            regressors: None,
            fit_factor: None,
        },
        tol,
        tail_window,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSource {
    /// Every integer up to the last index in the trace (sparser past `p_max`).
    AllIntegers { p_max: u64 },
    Diophantine {
        coeffs: Vec<f64>,
        epsilon: f64,
        sequence: IndexSequence,
        complete: bool,
    },
    /// A single order chosen for a finite-difference comparison.
    Single { index: u64 },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub family: Family,
    pub params_1: CircularModel,
    pub params_2: CircularModel,
    /// Proof step: 1–3 for sine-skewed families, 1–4 for the Möbius–Cardioid,
    /// 0 for identical parameters.
    pub step: u8,
    pub transform: Option<TransformId>,
    pub classification: Classification,
    pub evidence: RatioTrace,
    pub index_sequence_used: IndexSource,
}

impl SeparationCertificate {
    pub fn is_separating(&self) -> bool {
        self.classification.is_separating()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    /// Initial length of all-integer sweeps.
    pub p_max: u64,
    /// Sweeps are extended fourfold until decisive or this order is reached.
    pub p_cap: u64,
    pub tail_window: usize,
    pub tol: f64,
    /// Starting tolerance of the Diophantine sequences.
    pub epsilon_dio: f64,
    pub dio_count: usize,
    /// Sequences are lengthened one index at a time up to this count while
    /// the verdict stays inconclusive.
    pub dio_count_max: usize,
    pub dio_p_max: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            p_max: 400,
            p_cap: 1_000_000,
            tail_window: DEFAULT_TAIL_WINDOW,
            tol: 1e-3,
            epsilon_dio: 0.02,
            dio_count: 12,
            dio_count_max: 36,
            dio_p_max: 200_000_000,
        }
    }
}

impl ProbeConfig {
    fn validate(&self) -> Result<()> {
        if self.p_max < MIN_TRACE_LEN as u64 {
            return Err(Error::invalid("p_max", self.p_max as f64, "p_max >= 8"));
        }
        if self.dio_count < MIN_TRACE_LEN {
            return Err(Error::invalid("count", self.dio_count as f64, "count >= 8"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid("tol", self.tol, "0 < tol < 1"));
        }
        if self.tail_window < 2 {
            return Err(Error::invalid(
                "tail_window",
                self.tail_window as f64,
                "tail_window >= 2",
            ));
        }
        Ok(())
    }
}

fn values_differ(a: &LogPolar, b: &LogPolar) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() != b.is_zero();
    }
    let scale = a.log_magnitude.abs().max(1.0);
    (a.log_magnitude - b.log_magnitude).abs() > SAME_VALUE_TOL * scale
        || angle::circle_distance(a.phase, b.phase) > SAME_VALUE_TOL
}

fn finite_difference(p: u64, a: &LogPolar, b: &LogPolar) -> Classification {
    let (za, zb) = (a.to_complex(), b.to_complex());
    Classification::FiniteDifference {
        index: p,
        value_1: [za.re, za.im],
        value_2: [zb.re, zb.im],
        difference: (za - zb).norm(),
    }
}

/// Append ratio entries; returns a finite-difference verdict when exactly
/// one of the two transform values vanishes.
fn extend_trace(
    trace: &mut RatioTrace,
    t: TransformId,
    m1: &CircularModel,
    m2: &CircularModel,
    indices: impl IntoIterator<Item = u64>,
) -> Result<Option<Classification>> {
    for p in indices {
        let a = evaluate_transform(t, m1, p)?;
        let b = evaluate_transform(t, m2, p)?;
        match (a.is_zero(), b.is_zero()) {
            (true, true) => continue,
            (false, false) => trace.push(p, a.div(&b).expect("nonzero")),
            _ => return Ok(Some(finite_difference(p, &a, &b))),
        }
    }
    Ok(None)
}

/// About `n` indices in `(lo, hi]`, ending with `window` evenly spaced ones
/// whose step grows with `hi`.
fn thinned_indices(lo: u64, hi: u64, n: u64, window: u64) -> Vec<u64> {
    let step = ((hi - lo) / (8 * window)).max(1);
    let tail_start = hi.saturating_sub((window - 1) * step).max(lo + 1);
    let mut out: Vec<u64> = (0..n)
        .map(|k| lo + 1 + (tail_start - lo - 1) * k / n)
        .filter(|&p| p < tail_start)
        .collect();
    out.dedup();
    out.extend((0..window).rev().map(|j| hi - j * step).filter(|&p| p >= tail_start));
    out
}

fn classify_or_short(
    trace: &RatioTrace,
    regressors: Option<&[Vec<f64>]>,
    fit_factor: Option<&[Complex64]>,
    cfg: &ProbeConfig,
) -> Result<Classification> {
    if trace.len() < MIN_TRACE_LEN {
        return Ok(Classification::Inconclusive {
            reason: format!("only {} usable ratio entries", trace.len()),
        });
    }
    let x: Vec<f64> = trace.indices.iter().map(|&p| p as f64).collect();
    classify_samples(
        &Samples {
            abscissae: &x,
            log_magnitude: &trace.log_magnitude,
            phase: &trace.phase,
            regressors,
            fit_factor,
        },
        cfg.tol,
        cfg.tail_window,
    )
}

struct Outcome {
    classification: Classification,
    trace: RatioTrace,
    source: IndexSource,
}

fn sweep(t: TransformId, m1: &CircularModel, m2: &CircularModel, cfg: &ProbeConfig) -> Result<Outcome> {
    let mut trace = RatioTrace::new(t);
    let mut hi = cfg.p_max.min(cfg.p_cap);
    let mut indices: Vec<u64> = (1..=hi).collect();
    loop {
        if let Some(fd) = extend_trace(&mut trace, t, m1, m2, indices)? {
            return Ok(Outcome {
                classification: fd,
                trace,
                source: IndexSource::AllIntegers { p_max: hi },
            });
        }
        let c = classify_or_short(&trace, None, None, cfg)?;
        if c.is_separating() || hi >= cfg.p_cap {
            return Ok(Outcome {
                classification: c,
                trace,
                source: IndexSource::AllIntegers { p_max: hi },
            });
        }
        let next = hi.saturating_mul(4).min(cfg.p_cap);
        indices = thinned_indices(hi, next, cfg.p_max, cfg.tail_window as u64);
        hi = next;
    }
}

fn turn_coefficient(mu: f64) -> f64 {
    let c = angle::reduce(mu) / std::f64::consts::PI;
    if c >= 2.0 {
        c - 2.0
    } else {
        c
    }
}

/// Which angles the Diophantine indices must bring near `2πℤ`.
#[derive(Clone, Copy, PartialEq)]
enum Angles {
    /// `μ₁` and `μ₂` separately.
    Locations,
    /// Only `μ₁ − μ₂`: a characteristic-function ratio depends on the
    /// locations through `exp(ip(μ₁ − μ₂))` alone.
    Difference,
}

impl Angles {
    fn coefficients(self, m1: &CircularModel, m2: &CircularModel) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        match self {
            // reduced into [0, 2), zeros dropped, duplicates merged
            Angles::Locations => {
                for mu in [m1.mu(), m2.mu()] {
                    let c = turn_coefficient(mu);
                    if c != 0.0 && !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            Angles::Difference => {
                if !angle::angles_equal(m1.mu(), m2.mu(), ANGLE_EQUALITY_TOL) {
                    let c = turn_coefficient(m1.mu() - m2.mu());
                    if c != 0.0 {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    /// Signed residuals in `(−π, π]` of the angles at order `p`, as the
    /// transforms see them.
    fn residuals(self, m1: &CircularModel, m2: &CircularModel, p: u64) -> Vec<f64> {
        let turn = |mu: f64| angle::reduce_product(p as i64, mu);
        match self {
            Angles::Locations => {
                let mut out = vec![angle::wrap_signed(turn(m1.mu()))];
                if !angle::angles_equal(m1.mu(), m2.mu(), ANGLE_EQUALITY_TOL) {
                    out.push(angle::wrap_signed(turn(m2.mu())));
                }
                out
            }
            Angles::Difference => vec![angle::wrap_signed(turn(m1.mu()) - turn(m2.mu()))],
        }
    }
}

/// Small quantities at order `p` in which the ratio of transform `t` is a
/// ratio of affine functions, up to a known factor tending to 1. For the
/// sine moment, `βₚ/α₀,ₚ = cos s (tan s + λ rₚ/2)` with `rₚ` the base moment
/// ratio, so the quantities are `tan s / rₚ` and the factor `cos s₁ / cos s₂`;
/// for the Möbius–Cardioid transforms the residuals and `1/p`, factor 1.
fn fit_regressors(
    t: TransformId,
    angles: Angles,
    m1: &CircularModel,
    m2: &CircularModel,
    p: u64,
) -> (Vec<f64>, Complex64) {
    let mut r = angles.residuals(m1, m2, p);
    match m1.symmetric_base() {
        Some(base) if t == TransformId::Sine => {
            let factor = match r[..] {
                [s1, s2] => s1.cos() / s2.cos(),
                _ => 1.0,
            };
            let scale = base.moment_ratio(p);
            r.iter_mut().for_each(|v| *v = v.tan() / scale);
            (r, Complex64::new(factor, 0.0))
        }
        _ => {
            r.push(1.0 / p as f64);
            (r, Complex64::new(1.0, 0.0))
        }
    }
}

fn along_diophantine(
    t: TransformId,
    m1: &CircularModel,
    m2: &CircularModel,
    angles: Angles,
    cfg: &ProbeConfig,
) -> Result<Outcome> {
    let coeffs = angles.coefficients(m1, m2);
    if coeffs.is_empty() {
        return sweep(t, m1, m2, cfg);
    }
    // validates the coefficients, tolerance and cap
    DiophantineQuery::new(coeffs.clone(), cfg.epsilon_dio, cfg.dio_p_max)?;
    let s = coeffs.len();
    let mut sequence = IndexSequence {
        indices: Vec::new(),
        residuals: Vec::new(),
    };
    let mut trace = RatioTrace::new(t);
    let mut target = cfg.dio_count;
    let mut next = 1;
    let mut pending_fd = None;
    // The tolerance tightens one level per index. When a level has no index
    // left below the cap, fall back a level at a time; the sequence is then
    // only filled up to its configured length.
    let mut level = 0usize;
    let mut ran_dry = false;
    let classification = loop {
        let mut exhausted = false;
        while sequence.len() < target {
            let hit = loop {
                let eps = diophantine::refining_tolerance(cfg.epsilon_dio, s, level);
                if let Some(h) = diophantine::next_index(&coeffs, next, cfg.dio_p_max, eps) {
                    break Some(h);
                }
                ran_dry = true;
                if level == 0 {
                    break None;
                }
                level -= 1;
            };
            let Some((p, r)) = hit else {
                exhausted = true;
                break;
            };
            if !ran_dry {
                level += 1;
            }
            sequence.indices.push(p);
            sequence.residuals.push(r);
            next = p + 1;
            pending_fd = extend_trace(&mut trace, t, m1, m2, [p])?;
            if pending_fd.is_some() {
                break;
            }
        }
        if let Some(fd) = pending_fd.take() {
            break fd;
        }
        if sequence.len() < cfg.dio_count {
            break Classification::Inconclusive {
                reason: format!(
                    "Diophantine search found {} of {} indices below {}",
                    sequence.len(),
                    cfg.dio_count,
                    cfg.dio_p_max
                ),
            };
        }
        // columns that vanish identically (a location at zero) carry no information
        let (mut regressors, factors): (Vec<Vec<f64>>, Vec<Complex64>) = trace
            .indices
            .iter()
            .map(|&p| fit_regressors(t, angles, m1, m2, p))
            .unzip();
        let live: Vec<usize> = (0..regressors.first().map_or(0, Vec::len))
            .filter(|&j| regressors.iter().any(|r| r[j] != 0.0))
            .collect();
        for r in &mut regressors {
            *r = live.iter().map(|&j| r[j]).collect();
        }
        let fit = (!live.is_empty()).then_some(regressors.as_slice());
        let c = classify_or_short(&trace, fit, fit.map(|_| factors.as_slice()), cfg)?;
        if c.is_separating() || exhausted || ran_dry || target >= cfg.dio_count_max {
            break c;
        }
        target += 1;
    };
    let complete = sequence.len() >= cfg.dio_count;
    Ok(Outcome {
        classification,
        trace,
        source: IndexSource::Diophantine {
            coeffs,
            epsilon: cfg.epsilon_dio,
            sequence,
            complete,
        },
    })
}

fn at_single_index(t: TransformId, m1: &CircularModel, m2: &CircularModel, p: u64) -> Result<Outcome> {
    let a = evaluate_transform(t, m1, p)?;
    let b = evaluate_transform(t, m2, p)?;
    let mut trace = RatioTrace::new(t);
    if let Some(r) = a.div(&b) {
        trace.push(p, r);
    }
    let classification = if values_differ(&a, &b) {
        finite_difference(p, &a, &b)
    } else {
        Classification::Inconclusive {
            reason: format!("transform values agree to roundoff at p = {p}"),
        }
    };
    Ok(Outcome {
        classification,
        trace,
        source: IndexSource::Single { index: p },
    })
}

/// Smallest order with `Bₚ > ρ_αᵖ` at which `exp(ipμ₁)` and `exp(ipμ₂)`
/// are well apart.
fn mc_location_order(m1: &CircularModel, m2: &CircularModel) -> u64 {
    let CircularModel::Mc(p1) = m1 else {
        unreachable!("Möbius–Cardioid only")
    };
    let ra = p1.rho_alpha;
    // Bₚ/ρ_αᵖ = p ρ̄ (1 − ρ_α²)/ρ_α
    let start = (ra / (p1.rho_bar * (1.0 - ra * ra))).floor() as u64 + 1;
    let gap = |p: u64| {
        angle::circle_distance(
            angle::reduce_product(p as i64, m1.mu()),
            angle::reduce_product(p as i64, m2.mu()),
        )
    };
    let mut best = start;
    for p in start..start + 4096 {
        if gap(p) > 0.5 {
            return p;
        }
        if gap(p) > gap(best) {
            best = p;
        }
    }
    best
}

enum Plan {
    Identical,
    Sweep(u8, TransformId),
    Diophantine(u8, TransformId),
    MeanDirection,
    McLocation,
}

fn plan(m1: &CircularModel, m2: &CircularModel) -> Plan {
    let same_angle = |a: f64, b: f64| angle::angles_equal(a, b, ANGLE_EQUALITY_TOL);
    match (m1, m2) {
        (CircularModel::Mc(a), CircularModel::Mc(b)) => {
            if a.rho_alpha != b.rho_alpha {
                Plan::Diophantine(1, TransformId::Cosine)
            } else if a.rho_bar != b.rho_bar {
                Plan::Sweep(2, TransformId::MrlSq)
            } else if !same_angle(a.xi, b.xi) {
                Plan::Diophantine(3, TransformId::Charf)
            } else if !same_angle(a.mu, b.mu) {
                Plan::McLocation
            } else {
                Plan::Identical
            }
        }
        _ => {
            let (b1, l1) = m1.sine_skewed().expect("sine-skewed");
            let (b2, l2) = m2.sine_skewed().expect("sine-skewed");
            if b1.shape() != b2.shape() {
                Plan::Sweep(1, TransformId::MrlSq)
            } else if l1 != l2 {
                Plan::Diophantine(2, TransformId::Sine)
            } else if !same_angle(m1.mu(), m2.mu()) {
                Plan::MeanDirection
            } else {
                Plan::Identical
            }
        }
    }
}

/// Probe two parameter vectors of one circular family.
pub fn probe_pair(
    m1: &CircularModel,
    m2: &CircularModel,
    cfg: &ProbeConfig,
) -> Result<SeparationCertificate> {
    cfg.validate()?;
    if m1.family() != m2.family() {
        return Err(Error::Domain(format!(
            "cannot probe {} against {}",
            m1.family(),
            m2.family()
        )));
    }
    let (step, transform, outcome) = match plan(m1, m2) {
        Plan::Identical => (
            0,
            None,
            Outcome {
                classification: Classification::Unit,
                trace: RatioTrace::new(TransformId::MrlSq),
                source: IndexSource::None,
            },
        ),
        Plan::Sweep(step, t) => (step, Some(t), sweep(t, m1, m2, cfg)?),
        Plan::Diophantine(step, t) => {
            let angles = if t == TransformId::Charf {
                Angles::Difference
            } else {
                Angles::Locations
            };
            (step, Some(t), along_diophantine(t, m1, m2, angles, cfg)?)
        }
        Plan::MeanDirection => (
            3,
            Some(TransformId::MeanDir),
            at_single_index(TransformId::MeanDir, m1, m2, 1)?,
        ),
        Plan::McLocation => {
            let p = mc_location_order(m1, m2);
            (4, Some(TransformId::Charf), at_single_index(TransformId::Charf, m1, m2, p)?)
        }
    };
    let mut classification = outcome.classification;
    if step != 0 && classification == Classification::Unit {
        classification = Classification::Inconclusive {
            reason: "ratios settle at 1 although the parameters differ".into(),
        };
    }
    Ok(SeparationCertificate {
        family: m1.family(),
        params_1: *m1,
        params_2: *m2,
        step,
        transform,
        classification,
        evidence: outcome.trace,
        index_sequence_used: outcome.source,
    })
}
