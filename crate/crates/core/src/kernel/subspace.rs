use num_complex::Complex64;

use super::decomp::{nullspace, orthonormalize_against, svd};
use super::matrix::{hs_inner_unchecked, ComplexMatrix};
use crate::error::{Error, Result};

/// A subspace of `n x n` matrices with a basis orthonormal under
/// `<A, B> = Tr(A^dagger B)`.
#[derive(Debug, Clone)]
pub struct MatrixSubspace {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl MatrixSubspace {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// The whole of `M_n`, spanned by the matrix units.
    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| ComplexMatrix::unit(n, i, j))
            .collect();
        Self {
            ambient_dim: n,
            basis,
        }
    }

    /// Gram-Schmidt over `mats` in order. A matrix whose residual after
    /// projection is at most `tol * max(1, ||M||)` is dropped.
    pub fn orthonormalize(ambient_dim: usize, mats: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let mut s = Self::empty(ambient_dim);
        s.extend(mats, tol)?;
        Ok(s)
    }

    /// Appends the parts of `mats` not already spanned. Returns how many
    /// basis elements were added.
    pub fn extend(&mut self, mats: &[ComplexMatrix], tol: f64) -> Result<usize> {
        let n = self.ambient_dim;
        let mut vecs: Vec<Vec<Complex64>> = self.basis.iter().map(|b| b.vectorize()).collect();
        let before = vecs.len();
        for m in mats {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "expected {n}x{n} matrix, got {:?}",
                    m.shape()
                )));
            }
            if !m.is_finite() || !m.hs_norm().is_finite() {
                return Err(Error::NonFinite("subspace element"));
            }
            if vecs.len() >= n * n {
                break;
            }
            let norm = m.hs_norm();
            if norm == 0.0 {
                continue;
            }
            // relative threshold, with an absolute floor for tiny inputs
            let rel = tol * norm.max(1.0) / norm;
            if let Some(u) = orthonormalize_against(&m.vectorize(), &vecs, rel) {
                vecs.push(u);
            }
        }
        for v in &vecs[before..] {
            self.basis.push(ComplexMatrix::devectorize(n, v));
        }
        Ok(vecs.len() - before)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn coefficients(&self, m: &ComplexMatrix) -> Vec<Complex64> {
        self.basis.iter().map(|b| hs_inner_unchecked(b, m)).collect()
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.ambient_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for b in &self.basis {
            let c = hs_inner_unchecked(b, m);
            out += &b.scale(c);
        }
        out
    }

    /// `||M - P(M)||_HS`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.project(m)).hs_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: f64) -> bool {
        self.residual(m) <= tol * m.hs_norm().max(1.0)
    }

    /// Largest residual of `other`'s basis after projecting onto `self`.
    pub fn containment_defect(&self, other: &MatrixSubspace) -> f64 {
        other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0, f64::max)
    }

    /// Sine of the largest principal angle between the two subspaces, or 1
    /// when the dimensions differ.
    pub fn distance(&self, other: &MatrixSubspace) -> f64 {
        if self.ambient_dim != other.ambient_dim || self.dim() != other.dim() {
            return 1.0;
        }
        if self.is_empty() {
            return 0.0;
        }
        self.one_sided_gap(other).max(other.one_sided_gap(self))
    }

    /// `||(I - P_other) P_self||` computed from the residual columns, which
    /// keeps small angles accurate.
    fn one_sided_gap(&self, other: &MatrixSubspace) -> f64 {
        let n = self.ambient_dim;
        let cols: Vec<Vec<Complex64>> = self
            .basis
            .iter()
            .map(|b| (b - &other.project(b)).vectorize())
            .collect();
        let r = ComplexMatrix::from_columns(n * n, &cols);
        match svd(&r) {
            Ok(d) => d.values.first().copied().unwrap_or(0.0),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn same_span(&self, other: &MatrixSubspace, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Intersection via the kernel of `[basis_self | -basis_other]` acting on
    /// stacked coefficient vectors.
    pub fn intersection(&self, other: &MatrixSubspace, tol: f64) -> Result<MatrixSubspace> {
        let n = self.ambient_dim;
        if other.ambient_dim != n {
            return Err(Error::ShapeMismatch("intersection of different ambient dims".into()));
        }
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(n));
        }
        let (da, db) = (self.dim(), other.dim());
        let mut cols: Vec<Vec<Complex64>> = self.basis.iter().map(|b| b.vectorize()).collect();
        cols.extend(other.basis.iter().map(|b| (-b).vectorize()));
        let stacked = ComplexMatrix::from_columns(n * n, &cols);
        let kernel = nullspace(&stacked, tol)?;
        let mut elems = Vec::with_capacity(kernel.len());
        for x in kernel {
            let mut m = ComplexMatrix::zeros(n, n);
            for (j, b) in self.basis.iter().enumerate() {
                m += &b.scale(x[j]);
            }
            debug_assert_eq!(x.len(), da + db);
            elems.push(m);
        }
        MatrixSubspace::orthonormalize(n, &elems, tol)
    }

    /// Orthonormal basis of the part of `self` orthogonal to `sub`.
    pub fn complement_of(&self, sub: &MatrixSubspace, tol: f64) -> Result<MatrixSubspace> {
        let projected: Vec<ComplexMatrix> = self.basis.iter().map(|b| b - &sub.project(b)).collect();
        MatrixSubspace::orthonormalize(self.ambient_dim, &projected, tol)
    }

    /// `max |<B_j, B_k> - delta_jk|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.basis.iter().enumerate() {
            for (k, b) in self.basis.iter().enumerate() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner_unchecked(a, b) - target).norm());
            }
        }
        worst
    }
}
