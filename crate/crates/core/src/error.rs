use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid force model: {0}")]
    InvalidForce(String),

    #[error("time {t} lies outside the tabulated force range [0, {t_max}]")]
    TimeOutOfRange { t: f64, t_max: f64 },

    #[error("quadrature did not converge: achieved error estimate {estimate:e} against tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("state does not fit the grid: |psi| at the {endpoint} endpoint (x = {x}) is {ratio:e} of its peak")]
    StateDoesNotFit {
        endpoint: &'static str,
        x: f64,
        ratio: f64,
    },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("Fock index {n} exceeds n_max = {n_max}")]
    FockIndexTooLarge { n: usize, n_max: usize },

    #[error("Hermite polynomial H_{n}({x}) overflows double precision")]
    HermiteOverflow { n: usize, x: f64 },

    #[error("wavefunction grids differ")]
    GridMismatch,

    #[error("caustic: |sin t| = {sin_t:e} is within tolerance {tolerance:e} at t = {t}")]
    CausticSingularity { t: f64, sin_t: f64, tolerance: f64 },

    #[error("{what}: grid step {step} exceeds the required {required}; use a finer grid")]
    UnresolvedChirp {
        what: &'static str,
        step: f64,
        required: f64,
    },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
