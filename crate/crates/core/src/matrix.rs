//! Dense exact matrices.
//!
//! Public accessors use 1-based indices `(i, j)` with `1 <= i <= rows`.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::new(raw.rows, raw.cols, raw.entries)
    }
}

/// Result of [`Matrix::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(Vec<ExactScalar>),
    Inconsistent,
    Underdetermined,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ExactScalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ExactScalar::zero(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.entries[i * d + i] = ExactScalar::one();
        }
        m
    }

    /// The standard basis matrix `E_ij` of size `d x d`.
    pub fn basis_unit(d: usize, i: usize, j: usize) -> Result<Self> {
        check_index(i, d)?;
        check_index(j, d)?;
        let mut m = Self::zeros(d, d);
        m.entries[(i - 1) * d + (j - 1)] = ExactScalar::one();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<ExactScalar>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().cloned());
        }
        Self::new(r, c, entries)
    }

    /// Convenience constructor for integer matrices.
    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<ExactScalar>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| ExactScalar::from(v)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ExactScalar> {
        self.entries
    }

    /// Entry `(i, j)`, 1-based.
    pub fn at(&self, i: usize, j: usize) -> &ExactScalar {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "matrix index ({i}, {j}) out of range for {}x{}",
            self.rows,
            self.cols
        );
        &self.entries[(i - 1) * self.cols + (j - 1)]
    }

    /// Sets entry `(i, j)`, 1-based.
    pub fn set(&mut self, i: usize, j: usize, value: ExactScalar) {
        assert!((1..=self.rows).contains(&i) && (1..=self.cols).contains(&j));
        self.entries[(i - 1) * self.cols + (j - 1)] = value;
    }

    #[inline]
    pub(crate) fn get0(&self, i: usize, j: usize) -> &ExactScalar {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn get0_mut(&mut self, i: usize, j: usize) -> &mut ExactScalar {
        &mut self.entries[i * self.cols + j]
    }

    pub(crate) fn row0(&self, i: usize) -> &[ExactScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row0_mut(&mut self, i: usize) -> &mut [ExactScalar] {
        &mut self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn swap_rows0(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.entries.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }

    pub fn to_rows(&self) -> Vec<Vec<ExactScalar>> {
        self.entries.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get0(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &ExactScalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get0(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get0(k, j);
                    if !b.is_zero() {
                        *out.get0_mut(i, j) += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row0(i), v)).collect())
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix> {
        for m in [self, other] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows,
                    cols: m.cols,
                });
            }
        }
        let (p, q) = (self.rows, other.rows);
        let n = p + q;
        let mut out = Matrix::zeros(n, n);
        for i in 0..p {
            for j in 0..p {
                out.entries[i * n + j] = self.get0(i, j).clone();
            }
        }
        for i in 0..q {
            for j in 0..q {
                out.entries[(p + i) * n + p + j] = other.get0(i, j).clone();
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<ExactScalar> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Ok(ExactScalar::one());
        }
        let mut work = self.clone();
        let elim = bareiss(&mut work);
        if elim.rank < self.rows {
            return Ok(ExactScalar::zero());
        }
        let d = work.get0(self.rows - 1, self.cols - 1).clone();
        Ok(if elim.negate { -d } else { d })
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        bareiss(&mut work).rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Exact inverse by Gauss-Jordan elimination on `[A | I]`.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a.get0(r, c).is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap_rows0(p, c);
            inv.swap_rows0(p, c);
            let piv = a.get0(c, c).recip()?;
            if !piv.is_one() {
                for v in a.row0_mut(c)[c..].iter_mut() {
                    *v *= &piv;
                }
                for v in inv.row0_mut(c).iter_mut() {
                    if !v.is_zero() {
                        *v *= &piv;
                    }
                }
            }
            let pivot_row = a.row0(c)[c..].to_vec();
            let pivot_inv = inv.row0(c).to_vec();
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.get0(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                axpy_neg(&mut a.row0_mut(r)[c..], &f, &pivot_row);
                axpy_neg(inv.row0_mut(r), &f, &pivot_inv);
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = rhs` exactly.
    ///
    /// Returns [`SolveOutcome::Unique`] precisely when
    /// `rank(M) = rank(M | B) = cols`. Rows are reduced one at a time and
    /// elimination stops as soon as the pivot rows reach full column rank;
    /// every remaining row is then only checked against the solution. For a
    /// tall system with `m` rows and `n` columns this costs `O(n^3 + m n)`
    /// multiplications in the full-rank case instead of `O(m n^2)`.
    pub fn solve(&self, rhs: &[ExactScalar]) -> SolveOutcome {
        assert_eq!(self.rows, rhs.len(), "right-hand side length mismatch");
        let n = self.cols;
        // Each pivot row is stored normalized to 1 at its pivot column, with
        // the right-hand side appended.
        let mut pivots: Vec<(usize, Vec<ExactScalar>)> = Vec::with_capacity(n);
        let mut next_row = 0;
        while next_row < self.rows && pivots.len() < n {
            let mut row: Vec<ExactScalar> = self.row0(next_row).to_vec();
            row.push(rhs[next_row].clone());
            next_row += 1;
            for (col, prow) in &pivots {
                let f = row[*col].clone();
                if !f.is_zero() {
                    axpy_neg(&mut row, &f, prow);
                }
            }
            match row[..n].iter().position(|v| !v.is_zero()) {
                Some(col) => {
                    let inv = row[col].recip().expect("pivot is nonzero");
                    for v in row.iter_mut() {
                        if !v.is_zero() {
                            *v *= &inv;
                        }
                    }
                    pivots.push((col, row));
                }
                None => {
                    if !row[n].is_zero() {
                        return SolveOutcome::Inconsistent;
                    }
                }
            }
        }
        if pivots.len() < n {
            return SolveOutcome::Underdetermined;
        }
        // Pivot row k is zero in the pivot columns of rows inserted before
        // it, so back substitution runs in reverse insertion order.
        let mut x = vec![ExactScalar::zero(); n];
        for (col, prow) in pivots.iter().rev() {
            let mut v = prow[n].clone();
            for (j, coeff) in prow[..n].iter().enumerate() {
                if j != *col && !coeff.is_zero() {
                    v -= &(coeff * &x[j]);
                }
            }
            x[*col] = v;
        }
        for (r, b) in rhs.iter().enumerate().skip(next_row) {
            if &dot(self.row0(r), &x) != b {
                return SolveOutcome::Inconsistent;
            }
        }
        SolveOutcome::Unique(x)
    }

    /// Samples `I_{s-1} ⊕ W` with `W` an invertible `(d-s+1) x (d-s+1)`
    /// integer matrix whose entries are uniform in `[-bound, bound]`.
    pub fn random_invertible<R: Rng + ?Sized>(
        d: usize,
        s: usize,
        bound: u32,
        rng: &mut R,
    ) -> Result<Matrix> {
        if d == 0 || s == 0 || s > d {
            return Err(Error::InvalidArgument(format!(
                "random_invertible needs 1 <= s <= d, got d={d}, s={s}"
            )));
        }
        if bound == 0 {
            return Err(Error::InvalidArgument("entry bound must be >= 1".into()));
        }
        let k = d - s + 1;
        let b = i64::from(bound);
        loop {
            let block: Vec<ExactScalar> = (0..k * k)
                .map(|_| ExactScalar::from(rng.gen_range(-b..=b)))
                .collect();
            let w = Matrix::new(k, k, block)?;
            if w.is_invertible() {
                return Matrix::identity(s - 1).direct_sum(&w);
            }
        }
    }

    pub fn random_invertible_seeded(d: usize, s: usize, bound: u32, seed: u64) -> Result<Matrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_invertible(d, s, bound, &mut rng)
    }
}

fn check_index(i: usize, d: usize) -> Result<()> {
    if i == 0 || i > d {
        Err(Error::IndexOutOfRange { index: i, dim: d })
    } else {
        Ok(())
    }
}

pub(crate) fn dot(a: &[ExactScalar], b: &[ExactScalar]) -> ExactScalar {
    let mut acc = ExactScalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// `dst -= f * src`, skipping zero entries of `src`.
pub(crate) fn axpy_neg(dst: &mut [ExactScalar], f: &ExactScalar, src: &[ExactScalar]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= &(f * s);
        }
    }
}

struct Elimination {
    rank: usize,
    negate: bool,
}

/// In-place fraction-free (Bareiss) forward elimination. Columns without a
/// pivot are skipped, so this also yields the rank of rectangular input.
fn bareiss(a: &mut Matrix) -> Elimination {
    let (m, n) = (a.rows, a.cols);
    let mut prev = ExactScalar::one();
    let mut r = 0;
    let mut negate = false;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a.get0(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            a.swap_rows0(p, r);
            negate = !negate;
        }
        let piv = a.get0(r, c).clone();
        for i in r + 1..m {
            let lead = a.get0(i, c).clone();
            for j in c + 1..n {
                let v = &(&piv * a.get0(i, j)) - &(&lead * a.get0(r, j));
                *a.get0_mut(i, j) = v
                    .checked_div(&prev)
                    .expect("Bareiss divisor is a previous nonzero pivot");
            }
            *a.get0_mut(i, c) = ExactScalar::zero();
        }
        prev = piv;
        r += 1;
    }
    Elimination { rank: r, negate }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|j| format!("{:>width$}", cells[i * self.cols + j]))
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
