use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian (||M - M^dagger|| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not unitary (||U^dagger U - I|| = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dynamics does not conserve the charge (||[X, Q]|| = {commutator:.3e})")]
    NotConserving { commutator: f64 },

    #[error("pointer states {n} and {m} coincide (|<a_n|a_m>| = {overlap:.12}); not a measurement")]
    NotAMeasurement { n: usize, m: usize, overlap: f64 },

    #[error("not a projective representation (scalar defect {defect:.3e} at ({g}, {h}))")]
    NotProjective { g: usize, h: usize, defect: f64 },

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("objects are defined over different groups")]
    GroupMismatch,
}
