use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Rabi frequency is zero: the dressing angle is undefined")]
    ZeroRabi,

    #[error("double-dressed splitting G_R vanishes (G_bar = 0 and Delta_bar = 0): second mixing angle undefined")]
    ZeroSplitting,

    #[error("double-dressed rate {name} vanishes: ratio x = Gamma_plus_bar/Gamma_minus_bar is undefined")]
    VanishingRate { name: &'static str },

    #[error("rate ratio x must be positive, got {0}")]
    NonPositiveRatio(f64),

    #[error("physical parameters (d, omegaL, Nbar, E2, ...) are required for {0}")]
    MissingPhysical(&'static str),

    #[error("refractive index undefined: radicand 1 + scale*chi' = {0} is not positive (model breakdown)")]
    RefractionBreakdown(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fewer than two extrema of Im chi found around Delta_p = 0 (found {found})")]
    TooFewExtrema { found: usize },

    #[error("no real G_bar solution: measured G_R = {splitting} does not exceed |Delta_bar| = {detuning}")]
    NoRealSolution { splitting: f64, detuning: f64 },

    #[error("N = {requested} exceeds the Dicke oracle capacity N_max = {max}")]
    Capacity { requested: usize, max: usize },

    #[error("generator is identically zero: every state is stationary")]
    ZeroGenerator,

    #[error("degenerate steady state: null-space and propagated states differ by {0:e}")]
    DegenerateSteadyState(f64),

    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("Fourier cutoff not converged: doubling T changed chi by {0:e} relative to peak")]
    CutoffConvergence(f64),
}
