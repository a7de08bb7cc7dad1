//! Compressed-row complex sparse matrices, just enough for building ladder
//! and Majorana operators and applying them to dense row-major operators.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::linalg::{c64, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct Sparse {
    pub dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl Sparse {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, c64(1.0, 0.0))))
    }

    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            *rows[r].entry(c).or_insert(c64(0.0, 0.0)) += v;
        }
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != c64(0.0, 0.0) {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            dim,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &CMat) -> Self {
        let n = m.nrows();
        Self::from_triplets(
            n,
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c, m[(r, c)]))),
        )
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// `Σ_i c_i S_i` over operators of equal dimension.
    pub fn linear_combination<'a>(dim: usize, terms: impl IntoIterator<Item = (Complex64, &'a Sparse)>) -> Self {
        let mut triplets = Vec::new();
        for (c, s) in terms {
            if c == c64(0.0, 0.0) {
                continue;
            }
            triplets.extend(s.triplets().map(|(r, col, v)| (r, col, c * v)));
        }
        Self::from_triplets(dim, triplets)
    }

    /// `S ⊗ T`.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                triplets.push((r1 * other.dim + r2, c1 * other.dim + c2, v1 * v2));
            }
        }
        Self::from_triplets(dim, triplets)
    }

    /// `out += scale · S X` with `X`, `out` dense row-major `dim × dim`.
    pub fn left_mul_acc(&self, x: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let n = self.dim;
        for r in 0..n {
            let dst = &mut out[r * n..(r + 1) * n];
            for (k, v) in self.row(r) {
                let f = v * scale;
                let src = &x[k * n..(k + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += f * s;
                }
            }
        }
    }

    /// `out += scale · X S` with `X`, `out` dense row-major `dim × dim`.
    pub fn right_mul_acc(&self, x: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let n = self.dim;
        for i in 0..n {
            let src = &x[i * n..(i + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, xv) in src.iter().enumerate() {
                if *xv == c64(0.0, 0.0) {
                    continue;
                }
                let f = xv * scale;
                for (c, v) in self.row(k) {
                    dst[c] += f * v;
                }
            }
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, x)| x * v[c]).sum())
            .collect()
    }

    /// Largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `Tr(S X)` for dense row-major `X`.
    pub fn trace_mul(&self, x: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = c64(0.0, 0.0);
        for r in 0..n {
            for (k, v) in self.row(r) {
                acc += v * x[k * n + r];
            }
        }
        acc
    }
}
