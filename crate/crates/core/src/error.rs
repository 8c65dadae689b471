use thiserror::Error;

use crate::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |A[{row}][{col}] - conj(A[{col}][{row}])| = {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    TraceDeviation { trace: f64 },

    #[error("density matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("unknown flavor `{0}`, expected one of e, mu, tau")]
    UnknownFlavor(String),

    #[error("unknown encoding `{0}`, expected one of six-level, three-qubit, qubit-qutrit")]
    UnknownEncoding(String),

    #[error("sector index {0} out of range, expected 1, 2 or 3")]
    BadSector(usize),

    #[error("mass eigenmode undefined at theta = {theta}, ktilde = {ktilde} (degenerate walk eigenvalues)")]
    DegenerateMode { theta: f64, ktilde: f64 },

    #[error("lattice half-size must be at least 1")]
    EmptyLattice,

    #[error("state has {found} amplitudes, lattice expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("lattice state norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("invalid wavepacket: {0}")]
    InvalidWavepacket(String),

    #[error("invalid physical parameters: {0}")]
    InvalidPhysical(String),

    #[error("step frequencies are degenerate: phi2 - phi1 = {0:e}")]
    DegenerateFrequencies(f64),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}
