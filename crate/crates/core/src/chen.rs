//! Level-3 truncated signatures of piecewise-linear paths via Chen's
//! identity.
//!
//! This is an independent route to the core tensor and to the congruence
//! action: it never touches [`Tensor3::core`] or [`Tensor3::congruence`].

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::ExactScalar;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSignature {
    pub level1: Vec<ExactScalar>,
    pub level2: Matrix,
    pub level3: Tensor3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearPath {
    increments: Vec<Vec<ExactScalar>>,
}

impl PiecewiseLinearPath {
    pub fn new(increments: Vec<Vec<ExactScalar>>) -> Result<Self> {
        let Some(d) = increments.first().map(Vec::len) else {
            return Err(Error::InvalidArgument("path needs at least one segment".into()));
        };
        if let Some(bad) = increments.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        Ok(Self { increments })
    }

    /// The path with increments `e_1, ..., e_d`.
    pub fn unit_axis(d: usize) -> Self {
        Self::from_columns(&Matrix::identity(d))
    }

    /// The path whose `i`-th increment is column `i` of `a`, i.e. the unit
    /// axis path transformed by `a`.
    pub fn from_columns(a: &Matrix) -> Self {
        let t = a.transpose();
        Self {
            increments: t.to_rows(),
        }
    }

    pub fn dim(&self) -> usize {
        self.increments[0].len()
    }

    pub fn increments(&self) -> &[Vec<ExactScalar>] {
        &self.increments
    }

    pub fn signature(&self) -> TruncatedSignature {
        let mut it = self.increments.iter();
        let first = segment_signature(it.next().expect("path is nonempty"));
        it.fold(first, |acc, v| {
            chen_concat(&acc, &segment_signature(v)).expect("segments share a dimension")
        })
    }
}

impl TruncatedSignature {
    pub fn zero(d: usize) -> Self {
        Self {
            level1: vec![ExactScalar::zero(); d],
            level2: Matrix::zeros(d, d),
            level3: Tensor3::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.level1.len()
    }
}

/// Signature of a single linear segment with displacement `v`:
/// `(v, v⊗v / 2, v⊗v⊗v / 6)`.
pub fn segment_signature(v: &[ExactScalar]) -> TruncatedSignature {
    let d = v.len();
    let half = ExactScalar::ratio(1, 2).expect("nonzero");
    let sixth = ExactScalar::ratio(1, 6).expect("nonzero");
    let mut level2 = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            *level2.get0_mut(i, j) = &v[i] * &v[j] * &half;
        }
    }
    let level3 = Tensor3::from_fn(d, |i, j, k| &v[i - 1] * &v[j - 1] * &v[k - 1] * &sixth);
    TruncatedSignature {
        level1: v.to_vec(),
        level2,
        level3,
    }
}

/// Signature of the concatenation: the product in the truncated tensor
/// algebra.
pub fn chen_concat(s: &TruncatedSignature, t: &TruncatedSignature) -> Result<TruncatedSignature> {
    let d = s.dim();
    if t.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: t.dim(),
        });
    }
    let level1 = s.level1.iter().zip(&t.level1).map(|(a, b)| a + b).collect();
    let mut level2 = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            *level2.get0_mut(i, j) =
                s.level2.get0(i, j) + t.level2.get0(i, j) + &s.level1[i] * &t.level1[j];
        }
    }
    let level3 = Tensor3::from_fn(d, |i, j, k| {
        s.level3.at(i, j, k)
            + t.level3.at(i, j, k)
            + &s.level1[i - 1] * t.level2.get0(j - 1, k - 1)
            + s.level2.get0(i - 1, j - 1) * &t.level1[k - 1]
    });
    Ok(TruncatedSignature {
        level1,
        level2,
        level3,
    })
}
