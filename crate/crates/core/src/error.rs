use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An exponent that only exists for `N > p` was requested with `N <= p`.
    #[error("exponent undefined for N = {n_dim} <= p = {p}")]
    DimensionRegime { n_dim: u32, p: f64 },

    #[error("r = {r} lies outside the profile domain ({what})")]
    Domain { r: f64, what: &'static str },

    #[error("r = {r} outside sampled range [{lo}, {hi}]")]
    Interpolation { r: f64, lo: f64, hi: f64 },

    #[error("vanishing gradient at r = {r} with p = {p} < 2")]
    SingularGradient { r: f64, p: f64 },

    #[error("profile value {value} <= 0 at r = {r}")]
    NonPositiveValue { r: f64, value: f64 },

    #[error("q = {q} is not above the Serrin exponent {q_serrin}")]
    NotSupercritical { q: f64, q_serrin: f64 },

    #[error("weight exponent gamma = {0} must be nonnegative")]
    NegativeWeightExponent(f64),

    #[error("closed form is singular at the origin")]
    OriginSingularity,

    #[error("r = {r} outside [{lo}, {hi}]")]
    Range { r: f64, lo: f64, hi: f64 },

    #[error("operation needs lambda < 0 (p < N), got lambda = {0}")]
    Regime(f64),

    #[error("trajectory is not positive and decaying")]
    NotDecaying,

    #[error("solution changes sign at r = {0} before the evaluation radius")]
    CrossedZero(f64),

    #[error("Newton iteration failed at flux_eps = {flux_eps:e}, residual {residual:e}")]
    NewtonDivergence { residual: f64, flux_eps: f64 },

    #[error("boundary data does not dominate the comparison profile ({0})")]
    BoundaryDominanceViolated(String),

    #[error("profile is not p-harmonic (|Delta_p u| = {residual:e} at r = {r})")]
    NotPHarmonic { r: f64, residual: f64 },

    #[error("step size collapsed at r = {0}")]
    StepCollapse(f64),
}
