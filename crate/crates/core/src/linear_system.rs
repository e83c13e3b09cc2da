//! The antisymmetry system whose solution gives the upper transformation at
//! a pivot `s` in the general regime.
//!
//! With `n = d - s`, row `(a, b)` (for `1 <= a, b <= n`) of `M` has entries
//! `G_{a+s, b+s, g+s} - G_{b+s, a+s, g+s}` for `g = 1..n`, and the matching
//! right-hand side entry is `G_{b+s, a+s, s} - G_{a+s, b+s, s}`.
//!
//! For `H = U^{(s,x)} * G` and `i, j != s`,
//! `H_ijs - H_jis = G_ijs - G_jis + sum_g (G_ijg - G_jig) x_g`, so `M x = B`
//! is exactly the condition that `H` is symmetric in its first two indices
//! on the pivot slice.

use crate::matrix::{Matrix, SolveOutcome};
use crate::scalar::ExactScalar;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntisymSystem {
    pub matrix: Matrix,
    pub rhs: Vec<ExactScalar>,
    pub pivot: usize,
    /// Only rows with `a < b` are present.
    pub reduced: bool,
}

impl AntisymSystem {
    /// All `(d - s)^2` rows, indexed `(a - 1)(d - s) + b`.
    pub fn build(g: &Tensor3, s: usize) -> Self {
        let n = checked_size(g, s);
        let pairs = (1..=n).flat_map(|a| (1..=n).map(move |b| (a, b)));
        Self::from_pairs(g, s, n, pairs, false)
    }

    /// Only the `n (n - 1) / 2` rows with `a < b`, in lexicographic order.
    pub fn build_reduced(g: &Tensor3, s: usize) -> Self {
        let n = checked_size(g, s);
        let pairs = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        Self::from_pairs(g, s, n, pairs, true)
    }

    /// Drops the rows with `a >= b`. Row `(b, a)` is the negation of row
    /// `(a, b)` and diagonal rows vanish, so the solution set is unchanged.
    pub fn reduce(&self) -> Self {
        if self.reduced {
            return self.clone();
        }
        let n = self.matrix.cols();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let r = a * n + b;
                rows.push(self.matrix.row0(r).to_vec());
                rhs.push(self.rhs[r].clone());
            }
        }
        let matrix = if rows.is_empty() {
            Matrix::zeros(0, n)
        } else {
            Matrix::from_rows(&rows).expect("rows share a width")
        };
        Self {
            matrix,
            rhs,
            pivot: self.pivot,
            reduced: true,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Rank of `[M | B]`.
    pub fn augmented_rank(&self) -> usize {
        let n = self.matrix.cols();
        let rows: Vec<Vec<ExactScalar>> = (0..self.matrix.rows())
            .map(|r| {
                let mut row = self.matrix.row0(r).to_vec();
                row.push(self.rhs[r].clone());
                row
            })
            .collect();
        if rows.is_empty() {
            return 0;
        }
        let m = Matrix::from_rows(&rows).expect("rows share a width");
        debug_assert_eq!(m.cols(), n + 1);
        m.rank()
    }

    pub fn solve(&self) -> SolveOutcome {
        if self.matrix.rows() == 0 {
            return if self.matrix.cols() == 0 {
                SolveOutcome::Unique(Vec::new())
            } else {
                SolveOutcome::Underdetermined
            };
        }
        self.matrix.solve(&self.rhs)
    }

    fn from_pairs(
        g: &Tensor3,
        s: usize,
        n: usize,
        pairs: impl Iterator<Item = (usize, usize)>,
        reduced: bool,
    ) -> Self {
        let mut entries = Vec::new();
        let mut rhs = Vec::new();
        for (a, b) in pairs {
            let (i, j) = (a + s, b + s);
            for gamma in 1..=n {
                entries.push(g.at(i, j, gamma + s) - g.at(j, i, gamma + s));
            }
            rhs.push(g.at(j, i, s) - g.at(i, j, s));
        }
        let matrix = Matrix::new(rhs.len(), n, entries).expect("entry count matches");
        Self {
            matrix,
            rhs,
            pivot: s,
            reduced,
        }
    }
}

fn checked_size(g: &Tensor3, s: usize) -> usize {
    let d = g.dim();
    assert!((1..=d).contains(&s), "pivot {s} out of range for dim {d}");
    d - s
}
