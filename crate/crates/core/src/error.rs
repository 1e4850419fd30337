use thiserror::Error;

/// Errors produced anywhere in the evaluation pipeline.
///
/// Indices are zero-based positions into the problem arrays.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("problem has no observation times")]
    EmptyProblem,

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("times must be strictly increasing and positive: times[{index}] = {value} is not greater than {previous}")]
    NonIncreasingTimes {
        index: usize,
        value: f64,
        previous: f64,
    },

    #[error("dimension mismatch in {what}[{index}]: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("{what} has {found} entries, expected {expected}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {what}[{index}]")]
    NonFiniteInput { what: &'static str, index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is singular (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("time {t} is not a stored grid point of path {path}")]
    GridMiss { path: usize, t: f64 },

    #[error("Riccati solution K[{j}] left the finite domain near t = {t} (|K| = {norm:e})")]
    BlowUp { j: usize, t: f64, norm: f64 },

    #[error("transport path H[{j}] is ill-conditioned at t = {t} (|H|*|H^-1| = {product:e})")]
    IllConditioned { j: usize, t: f64, product: f64 },

    #[error("closed-form factor {j} hit a pole (denominator {denominator:e})")]
    PoleEncountered { j: usize, denominator: f64 },

    #[error("closed-form 2D evaluator requires {0}")]
    NotLevy2d(&'static str),
}

impl Error {
    /// Input-validation failures, as opposed to numerical ones.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::EmptyProblem
                | Error::ZeroDimension
                | Error::NonIncreasingTimes { .. }
                | Error::DimensionMismatch { .. }
                | Error::CountMismatch { .. }
                | Error::NonFiniteInput { .. }
                | Error::InvalidConfig(_)
                | Error::NotLevy2d(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
