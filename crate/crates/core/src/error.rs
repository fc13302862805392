use thiserror::Error;

/// Errors raised by the simulator, the state-preparation routines and the
/// spline engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("{requested} qubits exceeds the dense-simulation cap of {max}")]
    ResourceLimit { requested: usize, max: usize },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("postselected branch has probability {probability:.3e}")]
    DegeneratePostselection { probability: f64 },

    #[error("right-hand side has weight {weight:.3e} on eigenvalues below the floor {floor}")]
    IllConditioned { weight: f64, floor: f64 },

    #[error("success bound needs p >= 2, got p = {p}")]
    BoundInapplicable { p: usize },

    #[error("pivot {pivot:.3e} at row {row} is numerically singular")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("x = {x} lies outside the knot range [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("periodic boundary needs y_0 == y_n, got {first} and {last}")]
    NotPeriodic { first: f64, last: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
