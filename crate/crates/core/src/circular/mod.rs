//! Sine-skewed wrapped Cauchy, sine-skewed von Mises and Möbius–Cardioid
//! distributions on the circle.

mod model;
mod moments;
mod sample;

pub use model::{
    CircularModel, Family, McParams, SsvmParams, SswcParams, SymmetricBase, MC_NEGATIVITY_SLACK,
    MC_VALIDATION_GRID,
};
pub use moments::{
    BaseCosineMoment, MrlEval, TrigMoment, MAX_CLOSED_ORDER, MAX_LOG_ORDER, MAX_QUADRATURE_ORDER,
    QUADRATURE_TOLERANCE,
};
pub use sample::MC_TABLE_CELLS;
pub(crate) use model::check_skewness;
pub(crate) use sample::wrapped_cauchy_draw;
