use thiserror::Error;

/// Which stage of the recovery pipeline rejected the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    UpGeneral,
    UpThree,
    UpTwo,
    LowerDiag,
    OrbitConditions,
    FinalScale,
    Verification,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::UpGeneral => "up_general",
            Stage::UpThree => "up_three",
            Stage::UpTwo => "up_two",
            Stage::LowerDiag => "lower_diag",
            Stage::OrbitConditions => "orbit_conditions",
            Stage::FinalScale => "final_scale",
            Stage::Verification => "verification",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The tensor is not `A * C` for any rational invertible `A`.
    #[error("tensor is not in the orbit of the core tensor: {stage} failed at s={iteration}: {reason}")]
    NotInOrbit {
        stage: Stage,
        iteration: usize,
        reason: String,
    },

    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
