//! Jacobi-type dense decompositions.
//!
//! Both the Hermitian eigensolver and the SVD use the same complex plane
//! rotation: for a Hermitian 2x2 pivot block `[[a, b], [conj(b), d]]` with
//! `b = g e^{i phi}`, the unitary
//!
//! ```text
//! J = [[ c,            s          ],
//!      [ -s e^{-i phi}, c e^{-i phi} ]]
//! ```
//!
//! first removes the phase of `b` and then applies the real rotation that
//! annihilates it. The eigensolver applies `J` two-sided (`J^dagger A J`);
//! the one-sided SVD applies it to the columns of `A`, which rotates the
//! implicit Gram matrix `A^dagger A` the same way.

use num_complex::Complex64;

use super::matrix::{vdot, vnorm, ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    /// `e^{-i phi}`
    phase: Complex64,
}

impl Rotation {
    /// Rotation diagonalizing `[[a, b], [conj(b), d]]`.
    fn new(a: f64, d: f64, b: Complex64) -> Self {
        let g = b.norm();
        let phase = (b / g).conj();
        let theta = (d - a) / (2.0 * g);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        Self { c, s: t * c, phase }
    }

    /// `M <- M J` on columns `p`, `q`.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for i in 0..m.rows() {
            let mp = m[(i, p)];
            let mq = m[(i, q)];
            m[(i, p)] = mp * self.c - mq * self.phase * self.s;
            m[(i, q)] = mp * self.s + mq * self.phase * self.c;
        }
    }

    /// `M <- J^dagger M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let e = self.phase.conj();
        for j in 0..m.cols() {
            let rp = m[(p, j)];
            let rq = m[(q, j)];
            m[(p, j)] = rp * self.c - rq * e * self.s;
            m[(q, j)] = rp * self.s + rq * e * self.c;
        }
    }
}

/// Spectral decomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// Applies `f` to the spectrum: `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let fk = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Rejects inputs with `||H - H^dagger||_HS > tol`; the Hermitian part is
/// what gets diagonalized.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let defect = h.hermiticity_defect();
    if !defect.is_finite() {
        return Err(Error::NonFinite("eigensolver input norm"));
    }
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let fro = a.hs_norm();
    if !fro.is_finite() {
        return Err(Error::NonFinite("eigensolver input norm"));
    }

    let mut converged = fro == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                if b.norm() <= 1e-300 {
                    continue;
                }
                let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, b);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                rot.apply_right(&mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &v.column(i));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Thin singular value decomposition `A = U diag(sigma) V^dagger`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending.
    pub values: Vec<f64>,
    /// `m x k` left singular vectors, `k = min(m, n)`. Columns belonging to
    /// zero singular values are completed to an orthonormal set.
    pub u: ComplexMatrix,
    /// `n x n` right singular vectors; columns past `k` span the kernel.
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Tall inputs are first reduced to their `n x n` Householder `R` factor,
/// which has the same singular values and right singular vectors.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input"));
    }
    if !a.hs_norm().is_finite() {
        return Err(Error::NonFinite("SVD input norm"));
    }
    let (m, n) = a.shape();
    if m > n {
        // Left vectors are recovered as A v / sigma, so Q is never formed.
        let r = householder_r(a);
        let inner = one_sided_jacobi(r)?;
        let u = left_vectors(a, &inner.values, &inner.v);
        return Ok(Svd {
            values: inner.values,
            u,
            v: inner.v,
        });
    }
    let inner = one_sided_jacobi(a.clone())?;
    let u = left_vectors(a, &inner.values, &inner.v);
    Ok(Svd {
        values: inner.values,
        u,
        v: inner.v,
    })
}

struct Jacobi {
    values: Vec<f64>,
    v: ComplexMatrix,
}

fn one_sided_jacobi(mut a: ComplexMatrix) -> Result<Jacobi> {
    let n = a.cols();
    let mut v = ComplexMatrix::identity(n);
    // columns at rounding level of the whole matrix are treated as zero
    let negligible = (f64::EPSILON * a.hs_norm()).powi(2);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let cp = a.column(p);
                let cq = a.column(q);
                let alpha = cp.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let beta = cq.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gamma = vdot(&cp, &cq);
                if alpha.min(beta) <= negligible
                    || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= 1e-300
                {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }
    let norms: Vec<f64> = (0..n).map(|j| vnorm(&a.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values = order.iter().map(|&j| norms[j]).collect();
    let mut sorted_v = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        sorted_v.set_column(k, &v.column(j));
    }
    Ok(Jacobi {
        values,
        v: sorted_v,
    })
}

fn left_vectors(a: &ComplexMatrix, values: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    let k = m.min(n);
    let smax = values.first().copied().unwrap_or(0.0);
    let av = a.matmul(v);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for j in 0..k {
        if values[j] > 1e-13 * smax && values[j] > 0.0 {
            let col: Vec<Complex64> = av.column(j).iter().map(|z| z / values[j]).collect();
            cols.push(col);
        }
    }
    let kept = cols.len();
    let completion = complete_orthonormal(&cols, m);
    cols.extend(completion.into_iter().take(k - kept));
    ComplexMatrix::from_columns(m, &cols)
}

/// Upper-triangular `n x n` factor of a Householder QR of a tall `m x n`
/// matrix.
pub fn householder_r(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    let mut w = a.clone();
    for k in 0..n.min(m) {
        let x: Vec<Complex64> = (k..m).map(|i| w[(i, k)]).collect();
        let norm_x = vnorm(&x);
        if norm_x == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * norm_x;
        let mut hv = x;
        hv[0] -= alpha;
        let hn = vnorm(&hv);
        if hn == 0.0 {
            continue;
        }
        for z in hv.iter_mut() {
            *z /= hn;
        }
        for j in k..n {
            let s: Complex64 = (k..m).map(|i| hv[i - k].conj() * w[(i, j)]).sum();
            for i in k..m {
                w[(i, j)] -= hv[i - k] * s * 2.0;
            }
        }
        w[(k, k)] = alpha;
        for i in k + 1..m {
            w[(i, k)] = ZERO;
        }
    }
    let mut r = ComplexMatrix::zeros(n, n);
    for i in 0..n.min(m) {
        for j in i..n {
            r[(i, j)] = w[(i, j)];
        }
    }
    r
}

/// Orthonormal basis of `{v : L v = 0}` at relative tolerance.
///
/// A right singular vector is kept when its singular value is at most
/// `tol * sigma_max`. A zero matrix (or one with no rows) annihilates
/// everything.
pub fn nullspace(l: &ComplexMatrix, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    nullspace_scaled(l, tol, 0.0)
}

/// As [`nullspace`], with threshold `tol * max(sigma_max, scale)`. The
/// floor keeps an operator made only of rounding noise from being read
/// as having a small kernel.
pub fn nullspace_scaled(l: &ComplexMatrix, tol: f64, scale: f64) -> Result<Vec<Vec<Complex64>>> {
    let n = l.cols();
    if l.rows() == 0 {
        return Ok((0..n).map(|j| ComplexMatrix::identity(n).column(j)).collect());
    }
    let dec = svd(l)?;
    let smax = dec.values.first().copied().unwrap_or(0.0);
    let threshold = tol * smax.max(scale);
    if threshold == 0.0 {
        return Ok((0..n).map(|j| ComplexMatrix::identity(n).column(j)).collect());
    }
    let mut basis = Vec::new();
    for j in 0..n {
        let sigma = dec.values.get(j).copied().unwrap_or(0.0);
        if sigma <= threshold {
            basis.push(dec.v.column(j));
        }
    }
    Ok(basis)
}

/// Numerical rank: singular values above `tol * sigma_max`.
pub fn rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let dec = svd(a)?;
    let smax = dec.values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(dec.values.iter().filter(|&&s| s > tol * smax).count())
}

/// Extends an orthonormal set to a basis of `C^n` by Gram-Schmidt over the
/// standard basis in index order. Returns only the new vectors.
pub fn complete_orthonormal(existing: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = existing.to_vec();
    let mut added = Vec::new();
    for k in 0..n {
        if basis.len() >= n {
            break;
        }
        let mut e = vec![ZERO; n];
        e[k] = ONE;
        if let Some(u) = orthonormalize_against(&e, &basis, 1e-10) {
            basis.push(u.clone());
            added.push(u);
        }
    }
    added
}

/// Removes the components of `v` along an orthonormal `basis` (two passes)
/// and normalizes the residual; `None` when the residual norm falls to
/// `tol * ||v||` or below.
pub(crate) fn orthonormalize_against(
    v: &[Complex64],
    basis: &[Vec<Complex64>],
    tol: f64,
) -> Option<Vec<Complex64>> {
    let norm0 = vnorm(v);
    if norm0 == 0.0 {
        return None;
    }
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = vdot(b, &r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    let nr = vnorm(&r);
    if nr <= tol * norm0 {
        return None;
    }
    Some(r.into_iter().map(|z| z / nr).collect())
}
