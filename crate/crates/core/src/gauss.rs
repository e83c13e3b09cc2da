//! Elementary congruence transformations.
//!
//! Every [`GaussOp`] is an invertible `d x d` matrix with a sparse structure
//! around a pivot `s` (1-based). [`GaussOp::apply`] exploits that structure:
//! lower, upper, diagonal and permutation ops touch only the slices at and
//! below the pivot, costing `O(d^3)` multiplications instead of the `O(d^4)`
//! of a dense congruence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::ExactScalar;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaussOp {
    /// `I + sum_{g > s} y_{g-s} E_{g,s}`.
    Lower { pivot: usize, coeffs: Vec<ExactScalar> },
    /// `I + sum_{g > s} x_{g-s} E_{s,g}`.
    Upper { pivot: usize, coeffs: Vec<ExactScalar> },
    /// Identity with `root` at `(s, s)`. Scaling by `root` is the diagonal
    /// normalization for `h = root^3`.
    Diag { pivot: usize, root: ExactScalar },
    /// Transposition of coordinates `pivot` and `target`; identity if equal.
    Perm { pivot: usize, target: usize },
    /// A dense matrix of the form `I_{s-1} ⊕ W`.
    General { pivot: usize, matrix: Matrix },
}

impl GaussOp {
    pub fn pivot(&self) -> usize {
        match self {
            GaussOp::Lower { pivot, .. }
            | GaussOp::Upper { pivot, .. }
            | GaussOp::Diag { pivot, .. }
            | GaussOp::Perm { pivot, .. }
            | GaussOp::General { pivot, .. } => *pivot,
        }
    }

    pub fn identity(pivot: usize) -> Self {
        GaussOp::Perm {
            pivot,
            target: pivot,
        }
    }

    /// The diagonal op `D^{(s,h)}`, which needs an exact rational cube root
    /// of `h`. Returns `None` when `h` is zero or not a rational cube.
    pub fn diag_from_cube(pivot: usize, h: &ExactScalar) -> Option<Self> {
        if h.is_zero() {
            return None;
        }
        h.exact_cbrt().map(|root| GaussOp::Diag { pivot, root })
    }

    /// Checks that the op is well formed for dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let s = self.pivot();
        if s == 0 || s > d {
            return Err(Error::IndexOutOfRange { index: s, dim: d });
        }
        match self {
            GaussOp::Lower { coeffs, .. } | GaussOp::Upper { coeffs, .. } => {
                if coeffs.len() != d - s {
                    return Err(Error::DimensionMismatch {
                        expected: d - s,
                        found: coeffs.len(),
                    });
                }
            }
            GaussOp::Diag { root, .. } => {
                if root.is_zero() {
                    return Err(Error::InvalidArgument("diagonal root must be nonzero".into()));
                }
            }
            GaussOp::Perm { pivot, target } => {
                if target < pivot || *target > d {
                    return Err(Error::IndexOutOfRange {
                        index: *target,
                        dim: d,
                    });
                }
            }
            GaussOp::General { matrix, .. } => {
                if matrix.rows() != d || matrix.cols() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: matrix.rows(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self, d: usize) -> Result<Matrix> {
        self.validate(d)?;
        let mut m = Matrix::identity(d);
        match self {
            GaussOp::Lower { pivot, coeffs } => {
                for (g, y) in coeffs.iter().enumerate() {
                    m.set(pivot + 1 + g, *pivot, y.clone());
                }
            }
            GaussOp::Upper { pivot, coeffs } => {
                for (g, x) in coeffs.iter().enumerate() {
                    m.set(*pivot, pivot + 1 + g, x.clone());
                }
            }
            GaussOp::Diag { pivot, root } => m.set(*pivot, *pivot, root.clone()),
            GaussOp::Perm { pivot, target } => {
                if pivot != target {
                    m.set(*pivot, *pivot, ExactScalar::zero());
                    m.set(*target, *target, ExactScalar::zero());
                    m.set(*pivot, *target, ExactScalar::one());
                    m.set(*target, *pivot, ExactScalar::one());
                }
            }
            GaussOp::General { matrix, .. } => m = matrix.clone(),
        }
        Ok(m)
    }

    pub fn inverse(&self) -> Result<GaussOp> {
        Ok(match self {
            GaussOp::Lower { pivot, coeffs } => GaussOp::Lower {
                pivot: *pivot,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
            GaussOp::Upper { pivot, coeffs } => GaussOp::Upper {
                pivot: *pivot,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
            GaussOp::Diag { pivot, root } => GaussOp::Diag {
                pivot: *pivot,
                root: root.recip()?,
            },
            GaussOp::Perm { .. } => self.clone(),
            GaussOp::General { pivot, matrix } => GaussOp::General {
                pivot: *pivot,
                matrix: matrix.inverse()?,
            },
        })
    }

    /// `op * t` via structured slice updates. Equal to
    /// `t.congruence(&op.to_matrix(d))`.
    pub fn apply(&self, t: &Tensor3) -> Result<Tensor3> {
        let mut out = t.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, t: &mut Tensor3) -> Result<()> {
        let d = t.dim();
        self.validate(d)?;
        let s0 = self.pivot() - 1;
        match self {
            GaussOp::Lower { coeffs, .. } => {
                for mode in 0..3 {
                    for (g, y) in coeffs.iter().enumerate() {
                        if !y.is_zero() {
                            slice_axpy(t, mode, s0 + 1 + g, y, s0);
                        }
                    }
                }
            }
            GaussOp::Upper { coeffs, .. } => {
                for mode in 0..3 {
                    for (g, x) in coeffs.iter().enumerate() {
                        if !x.is_zero() {
                            slice_axpy(t, mode, s0, x, s0 + 1 + g);
                        }
                    }
                }
            }
            GaussOp::Diag { root, .. } => {
                if !root.is_one() {
                    for mode in 0..3 {
                        slice_scale(t, mode, s0, root);
                    }
                }
            }
            GaussOp::Perm { pivot, target } => {
                if pivot != target {
                    for mode in 0..3 {
                        slice_swap(t, mode, s0, target - 1);
                    }
                }
            }
            GaussOp::General { matrix, .. } => {
                let mut cur = std::mem::replace(t, Tensor3::zeros(0));
                for mode in 0..3 {
                    cur = cur.mode_product(matrix, mode, s0);
                }
                *t = cur;
            }
        }
        Ok(())
    }

    /// `op * q`: left multiplication, so that accumulating the ops of a run in
    /// order yields the total transformation.
    pub fn accumulate(&self, q: &Matrix) -> Result<Matrix> {
        let d = q.rows();
        self.validate(d)?;
        if q.cols() != d {
            return Err(Error::NotSquare {
                rows: q.rows(),
                cols: q.cols(),
            });
        }
        let s0 = self.pivot() - 1;
        let mut out = q.clone();
        match self {
            GaussOp::Lower { coeffs, .. } => {
                let src = q.row0(s0).to_vec();
                for (g, y) in coeffs.iter().enumerate() {
                    if !y.is_zero() {
                        axpy(out.row0_mut(s0 + 1 + g), y, &src);
                    }
                }
            }
            GaussOp::Upper { coeffs, .. } => {
                for (g, x) in coeffs.iter().enumerate() {
                    if !x.is_zero() {
                        let src = q.row0(s0 + 1 + g).to_vec();
                        axpy(out.row0_mut(s0), x, &src);
                    }
                }
            }
            GaussOp::Diag { root, .. } => {
                for v in out.row0_mut(s0) {
                    if !v.is_zero() {
                        *v *= root;
                    }
                }
            }
            GaussOp::Perm { target, .. } => out.swap_rows0(s0, target - 1),
            GaussOp::General { matrix, .. } => out = matrix.mul(q)?,
        }
        Ok(out)
    }
}

/// `dst += f * src`.
fn axpy(dst: &mut [ExactScalar], f: &ExactScalar, src: &[ExactScalar]) {
    for (a, b) in dst.iter_mut().zip(src) {
        if !b.is_zero() {
            *a += &(f * b);
        }
    }
}

/// Visits the positions of the slice `index` along `mode`.
fn slice_positions(d: usize, mode: usize, index: usize) -> impl Iterator<Item = usize> {
    (0..d).flat_map(move |p| {
        (0..d).map(move |q| match mode {
            0 => (index * d + p) * d + q,
            1 => (p * d + index) * d + q,
            _ => (p * d + q) * d + index,
        })
    })
}

fn slice_offset(d: usize, mode: usize) -> usize {
    match mode {
        0 => d * d,
        1 => d,
        _ => 1,
    }
}

/// `slice[dst] += f * slice[src]` along `mode`.
fn slice_axpy(t: &mut Tensor3, mode: usize, dst: usize, f: &ExactScalar, src: usize) {
    let d = t.dim();
    let stride = slice_offset(d, mode);
    let entries = t.entries_mut();
    for pos in slice_positions(d, mode, src) {
        let v = &entries[pos];
        if v.is_zero() {
            continue;
        }
        let add = f * v;
        // pos - src*stride + dst*stride, written to avoid underflow.
        let target = pos + dst * stride - src * stride;
        entries[target] += &add;
    }
}

fn slice_scale(t: &mut Tensor3, mode: usize, index: usize, f: &ExactScalar) {
    let d = t.dim();
    let entries = t.entries_mut();
    for pos in slice_positions(d, mode, index) {
        if !entries[pos].is_zero() {
            entries[pos] *= f;
        }
    }
}

fn slice_swap(t: &mut Tensor3, mode: usize, a: usize, b: usize) {
    let d = t.dim();
    let stride = slice_offset(d, mode);
    let entries = t.entries_mut();
    for pos in slice_positions(d, mode, a) {
        entries.swap(pos, pos + b * stride - a * stride);
    }
}
