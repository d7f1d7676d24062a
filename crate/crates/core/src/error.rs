use thiserror::Error;

/// Errors raised while building scenarios, solving the auxiliary equations
/// or evaluating and checking wavefunctions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown preset `{0}` (expected one of stationary, parametric_const_mass, caldirola_kanai, driven_const_mass)")]
    UnknownPreset(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("mass is not positive at t = {t} (m = {mass})")]
    NonPositiveMass { t: f64, mass: f64 },

    #[error("integrator failed after t = {last_good_t}: {reason}")]
    Integrator { last_good_t: f64, reason: String },

    #[error("constraint b^2 - 4ac = -4/W0^2 broken (residual {residual:e})")]
    ConstraintViolated { residual: f64 },

    #[error("sigma radicand a q1^2 + b q1 q2 + c q2^2 is not positive at t = {t} ({value:e})")]
    NonPositiveRadicand { t: f64, value: f64 },

    #[error("deformed time is not strictly increasing near t = {t}")]
    NonMonotoneTau { t: f64 },

    #[error("t = {t} outside the solved range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("Hermite order {n} exceeds the configured cap {cap}")]
    HermiteCap { n: usize, cap: usize },

    #[error("state leaks past the grid edge at t = {t} (edge/max = {ratio:e}); widen the grid")]
    GridDecay { t: f64, ratio: f64 },

    #[error("fields live on different grids or time stamps")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid samples: {0}")]
    InvalidSamples(String),

    #[error("time stencil [{lo}, {hi}] leaves the solved range [{t0}, {t_end}]")]
    TimeStencil {
        lo: f64,
        hi: f64,
        t0: f64,
        t_end: f64,
    },

    #[error("split-step propagation unstable at t = {t}: norm drift {drift:e}")]
    Unstable { t: f64, drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
