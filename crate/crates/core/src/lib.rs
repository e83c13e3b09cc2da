//! Exact recovery of piecewise-linear paths from their third-level
//! signature tensors.
//!
//! A path with `d` linear segments is encoded by a matrix `A` in `GL_d`; its
//! level-3 signature is `G = A * C` where `C` is the core tensor and `*` the
//! matrix-tensor congruence. [`recover`] computes `A` from `G` using exact
//! rational arithmetic only.
//!
//! ```
//! use sigtensor::{recover, Matrix, RecoveryConfig, Tensor3};
//!
//! let a = Matrix::from_i64_rows(&[[1, 2], [0, 1]]).unwrap();
//! let g = Tensor3::core(2).congruence(&a).unwrap();
//! let rec = recover(&g, &RecoveryConfig::default()).unwrap();
//! assert_eq!(rec.matrix, a);
//! ```

pub mod bench;
pub mod chen;
pub mod error;
pub mod gauss;
pub mod io;
pub mod linear_system;
pub mod matrix;
pub mod recovery;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result, Stage};
pub use gauss::GaussOp;
pub use linear_system::AntisymSystem;
pub use matrix::{Matrix, SolveOutcome};
pub use recovery::{recover, Recovered, RecoveryConfig, RecoveryTrace, StepRole, TraceStep};
pub use scalar::ExactScalar;
pub use tensor::Tensor3;
