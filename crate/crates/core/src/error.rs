use faer::c64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("matrix is {rows}x{cols}, grid has {points} points")]
    Shape {
        rows: usize,
        cols: usize,
        points: usize,
    },

    #[error("operator is not hermitian: relative asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("b = {b} is outside the admissible window [{lo}, {hi}]")]
    InadmissibleB { b: f64, lo: f64, hi: f64 },

    #[error("near-singular resolvent solve at z = {z}: residual {residual:e}")]
    NearSingular { z: c64, residual: f64 },

    #[error("z = {z} is too close to the spectrum: distance {distance:e}, need > {required:e}")]
    TooCloseToSpectrum {
        z: c64,
        distance: f64,
        required: f64,
    },

    #[error("operator is not positive definite: smallest eigenvalue {0}")]
    NotPositive(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("fit needs at least 4 rows with positive values, got {0}")]
    TooFewRows(usize),

    #[error("operator is not positivity preserving: entry {0} has a negative or complex part")]
    NotPositivityPreserving(c64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures, as opposed to bad input or configuration.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::NearSingular { .. }
                | Error::TooCloseToSpectrum { .. }
                | Error::NotPositive(_)
                | Error::NoConvergence
                | Error::TooFewRows(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
