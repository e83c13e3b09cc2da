//! Order-3 tensors, the core tensor and the congruence action.
//!
//! Entry `(i, j, k)` is addressed 1-based through [`Tensor3::at`]. Storage is
//! row-major with `k` varying fastest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::ExactScalar;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTensor")]
pub struct Tensor3 {
    dim: usize,
    entries: Vec<ExactScalar>,
}

#[derive(Deserialize)]
struct RawTensor {
    dim: usize,
    entries: Vec<ExactScalar>,
}

impl TryFrom<RawTensor> for Tensor3 {
    type Error = Error;
    fn try_from(raw: RawTensor) -> Result<Self> {
        Tensor3::new(raw.dim, raw.entries)
    }
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ExactScalar::zero(); dim * dim * dim],
        }
    }

    pub fn new(dim: usize, entries: Vec<ExactScalar>) -> Result<Self> {
        if entries.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a tensor entrywise from a function of 1-based indices.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> ExactScalar) -> Self {
        let mut entries = Vec::with_capacity(dim * dim * dim);
        for i in 1..=dim {
            for j in 1..=dim {
                for k in 1..=dim {
                    entries.push(f(i, j, k));
                }
            }
        }
        Self { dim, entries }
    }

    /// The core tensor: the level-3 signature of the normalized axis path.
    ///
    /// `C_ijk` is 1 on the diagonal, 3 when `i < j = k` or `i = j < k`,
    /// 6 when `i < j < k` and 0 otherwise.
    pub fn core(dim: usize) -> Self {
        Self::from_fn(dim, |i, j, k| ExactScalar::from(core_entry(i, j, k)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ExactScalar> {
        self.entries
    }

    /// Entry `(i, j, k)`, 1-based.
    pub fn at(&self, i: usize, j: usize, k: usize) -> &ExactScalar {
        let d = self.dim;
        assert!(
            (1..=d).contains(&i) && (1..=d).contains(&j) && (1..=d).contains(&k),
            "tensor index ({i}, {j}, {k}) out of range for dim {d}"
        );
        &self.entries[self.idx0(i - 1, j - 1, k - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: ExactScalar) {
        let d = self.dim;
        assert!((1..=d).contains(&i) && (1..=d).contains(&j) && (1..=d).contains(&k));
        let idx = self.idx0(i - 1, j - 1, k - 1);
        self.entries[idx] = value;
    }

    #[inline]
    pub(crate) fn idx0(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [ExactScalar] {
        &mut self.entries
    }

    pub fn scale(&self, factor: &ExactScalar) -> Tensor3 {
        Tensor3 {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Matrix-tensor congruence `A * T`, i.e.
    /// `G_ijk = sum_{a,b,c} T_abc A_ia A_jb A_kc`, computed as three
    /// successive mode products (`O(d^4)` multiplications).
    pub fn congruence(&self, a: &Matrix) -> Result<Tensor3> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if a.rows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.rows(),
            });
        }
        let mut t = self.clone();
        for mode in 0..3 {
            t = t.mode_product(a, mode, 0);
        }
        Ok(t)
    }

    /// Mode product along `mode` (0, 1 or 2) with `a`, where only indices
    /// `>= from` are mixed; `a` must act as the identity on indices below
    /// `from`.
    pub(crate) fn mode_product(&self, a: &Matrix, mode: usize, from: usize) -> Tensor3 {
        let d = self.dim;
        let stride = match mode {
            0 => d * d,
            1 => d,
            _ => 1,
        };
        let mut out = self.clone();
        for base in fiber_bases(d, mode) {
            for i in from..d {
                let mut acc = ExactScalar::zero();
                for alpha in from..d {
                    let w = a.get0(i, alpha);
                    let v = &self.entries[base + alpha * stride];
                    if !w.is_zero() && !v.is_zero() {
                        acc += &(w * v);
                    }
                }
                out.entries[base + i * stride] = acc;
            }
        }
        out
    }

    /// Mode-1 folding: a `d x d^2` matrix whose `k`-th column block is the
    /// slice `T_{., ., k}`, i.e. entry `(i, (k-1) d + j)` is `T_ijk`.
    pub fn fold_mode1(&self) -> Matrix {
        let d = self.dim;
        let mut entries = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    entries.push(self.entries[self.idx0(i, j, k)].clone());
                }
            }
        }
        Matrix::new(d, d * d, entries).expect("fold has d^3 entries")
    }

    /// Inverse of [`Tensor3::fold_mode1`].
    pub fn unfold_mode1(m: &Matrix) -> Result<Tensor3> {
        let d = m.rows();
        if m.cols() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: m.cols(),
            });
        }
        Ok(Self::from_fn(d, |i, j, k| m.at(i, (k - 1) * d + j).clone()))
    }

    /// Whether `G_ijk = C_ijk` on every index with `i = j = k <= s`, or
    /// `k <= min(s, i-1, j)`, or `j <= min(s, i-1, k)`.
    ///
    /// For tensors in the orbit of the core tensor this holds exactly when
    /// the tensor lies in `(I_s ⊕ GL_{d-s}) * C`.
    pub fn check_orbit_conditions(&self, s: usize) -> bool {
        let d = self.dim;
        assert!((1..=d).contains(&s), "pivot {s} out of range for dim {d}");
        (1..=d).all(|i| {
            (1..=d).all(|j| {
                (1..=d).all(|k| {
                    let constrained = (i == j && j == k && i <= s)
                        || k <= s.min(i - 1).min(j)
                        || j <= s.min(i - 1).min(k);
                    !constrained || *self.at(i, j, k) == ExactScalar::from(core_entry(i, j, k))
                })
            })
        })
    }

    /// The four polynomial relations that make the lower and diagonal step
    /// at pivot `s` well defined:
    ///
    /// * `H_sss != 0`
    /// * `H_iss = H_sis` for `s <= i <= d`
    /// * `H_iss H_sjs = H_ijs H_sss` for `1 <= i <= d`, `s <= j <= d`
    /// * `H_ssk H_sjs = H_jsk H_sss` for `s < j, k <= d`
    pub fn check_lower_ready(&self, s: usize) -> bool {
        let d = self.dim;
        assert!((1..=d).contains(&s), "pivot {s} out of range for dim {d}");
        let h = |i, j, k| self.at(i, j, k);
        let hsss = h(s, s, s);
        if hsss.is_zero() {
            return false;
        }
        if !(s..=d).all(|i| h(i, s, s) == h(s, i, s)) {
            return false;
        }
        for i in 1..=d {
            for j in s..=d {
                if h(i, s, s) * h(s, j, s) != h(i, j, s) * hsss {
                    return false;
                }
            }
        }
        for j in s + 1..=d {
            for k in s + 1..=d {
                if h(s, s, k) * h(s, j, s) != h(j, s, k) * hsss {
                    return false;
                }
            }
        }
        true
    }

    /// `[G_111, ..., G_ddd]`.
    pub fn diagonal_cubes(&self) -> Vec<ExactScalar> {
        (1..=self.dim).map(|i| self.at(i, i, i).clone()).collect()
    }
}

/// Entry of the core tensor at 1-based `(i, j, k)`.
pub fn core_entry(i: usize, j: usize, k: usize) -> i64 {
    if i == j && j == k {
        1
    } else if (i < j && j == k) || (i == j && j < k) {
        3
    } else if i < j && j < k {
        6
    } else {
        0
    }
}

/// Offsets of the first element of every fiber along `mode`.
fn fiber_bases(d: usize, mode: usize) -> impl Iterator<Item = usize> {
    (0..d).flat_map(move |p| {
        (0..d).map(move |q| match mode {
            0 => p * d + q,
            1 => p * d * d + q,
            _ => (p * d + q) * d,
        })
    })
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor3(dim={})\n{}", self.dim, self.fold_mode1())
    }
}

impl fmt::Display for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim;
        let cells: Vec<String> = self
            .fold_mode1()
            .as_slice()
            .iter()
            .map(ToString::to_string)
            .collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..d {
            let blocks: Vec<String> = (0..d)
                .map(|k| {
                    (0..d)
                        .map(|j| format!("{:>width$}", cells[i * d * d + k * d + j]))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            writeln!(f, "{}", blocks.join(" | "))?;
        }
        Ok(())
    }
}
