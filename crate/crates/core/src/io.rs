//! File formats and instance generation.
//!
//! All files are pretty-printed JSON with a `format` tag and a `version`.
//! Scalars are stored as canonical `"p/q"` strings (`"p"` for integers), so
//! nothing is ever rounded. Tensor entries are listed in `(i, j, k)`
//! lexicographic order, matrix entries row-major.

use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::recovery::RecoveryTrace;
use crate::scalar::ExactScalar;
use crate::tensor::Tensor3;

pub const FORMAT_VERSION: u32 = 1;
pub const INSTANCE_FORMAT: &str = "sigtensor-instance";
pub const MATRIX_FORMAT: &str = "sigtensor-matrix";
pub const TRACE_FORMAT: &str = "sigtensor-trace";

/// A tensor to recover, optionally with the matrix that generated it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub entries: Vec<ExactScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format: String,
    pub version: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ExactScalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub format: String,
    pub version: u32,
    pub trace: RecoveryTrace,
}

impl InstanceFile {
    pub fn from_tensor(g: &Tensor3) -> Self {
        Self {
            format: INSTANCE_FORMAT.into(),
            version: FORMAT_VERSION,
            dim: g.dim(),
            entries: g.as_slice().to_vec(),
            ground_truth: None,
            seed: None,
            bound: None,
        }
    }

    pub fn tensor(&self) -> Result<Tensor3> {
        Tensor3::new(self.dim, self.entries.clone())
    }

    fn validate(&self) -> Result<()> {
        check_header(&self.format, self.version, INSTANCE_FORMAT)?;
        if self.dim == 0 {
            return Err(Error::Format("dimension must be >= 1".into()));
        }
        let want = self.dim.pow(3);
        if self.entries.len() != want {
            return Err(Error::Format(format!(
                "expected {want} tensor entries for dim {}, found {}",
                self.dim,
                self.entries.len()
            )));
        }
        if let Some(a) = &self.ground_truth {
            if a.rows() != self.dim || a.cols() != self.dim {
                return Err(Error::Format(format!(
                    "ground truth is {}x{}, expected {}x{}",
                    a.rows(),
                    a.cols(),
                    self.dim,
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

impl MatrixFile {
    pub fn from_matrix(a: &Matrix) -> Self {
        Self {
            format: MATRIX_FORMAT.into(),
            version: FORMAT_VERSION,
            rows: a.rows(),
            cols: a.cols(),
            entries: a.as_slice().to_vec(),
        }
    }

    pub fn matrix(&self) -> Result<Matrix> {
        Matrix::new(self.rows, self.cols, self.entries.clone())
    }

    fn validate(&self) -> Result<()> {
        check_header(&self.format, self.version, MATRIX_FORMAT)?;
        self.matrix().map(|_| ()).map_err(|e| Error::Format(e.to_string()))
    }
}

impl TraceFile {
    pub fn new(trace: RecoveryTrace) -> Self {
        Self {
            format: TRACE_FORMAT.into(),
            version: FORMAT_VERSION,
            trace,
        }
    }

    fn validate(&self) -> Result<()> {
        check_header(&self.format, self.version, TRACE_FORMAT)?;
        for step in &self.trace.steps {
            step.op
                .validate(self.trace.dim)
                .map_err(|e| Error::Format(format!("invalid trace step: {e}")))?;
        }
        Ok(())
    }
}

fn check_header(format: &str, version: u32, want: &str) -> Result<()> {
    if format != want {
        return Err(Error::Format(format!("expected format {want:?}, found {format:?}")));
    }
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    Ok(())
}

/// Types with a self-describing text form.
pub trait TextFormat: Serialize + DeserializeOwned + Sized {
    fn check(&self) -> Result<()>;

    fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    fn from_text(text: &str) -> Result<Self> {
        let value: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        value.check()?;
        Ok(value)
    }

    fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

impl TextFormat for InstanceFile {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl TextFormat for MatrixFile {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl TextFormat for TraceFile {
    fn check(&self) -> Result<()> {
        self.validate()
    }
}

/// Parses the mode-1 folding printed by `Tensor3`'s `Display`: one line per
/// row, scalars separated by whitespace, with optional `|` block separators.
pub fn parse_folded(text: &str) -> Result<Tensor3> {
    let rows: Vec<Vec<ExactScalar>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_whitespace()
                .filter(|tok| *tok != "|")
                .map(str::parse)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let m = Matrix::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))?;
    Tensor3::unfold_mode1(&m).map_err(|e| Error::Format(e.to_string()))
}

/// Samples an invertible integer matrix with entries in `[-bound, bound]`
/// and returns the instance `A * C` together with `A`.
pub fn generate_instance(d: usize, seed: u64, bound: u32) -> Result<InstanceFile> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix::random_invertible(d, 1, bound, &mut rng)?;
    let g = Tensor3::core(d).congruence(&a)?;
    let mut inst = InstanceFile::from_tensor(&g);
    inst.ground_truth = Some(a);
    inst.seed = Some(seed);
    inst.bound = Some(bound);
    Ok(inst)
}
