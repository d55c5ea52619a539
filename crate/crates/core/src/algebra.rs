//! Unital *-subalgebras of `M_n`: generation, commutants, centres, maximal
//! abelian subalgebras and the abelian-commutant (Dirac) criterion.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::random::{self, SeededRng};
use crate::kernel::{kron, nullspace_scaled, rank, vnorm, ComplexMatrix, MatrixSubspace, DEFAULT_TOL};

/// Residual allowed for identity membership and product/adjoint closure.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Threshold on principal-angle distance for deciding subspace equality.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// A unital, *-closed, product-closed matrix subspace.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra {
    space: MatrixSubspace,
    contains_identity: bool,
    closure_residual: f64,
}

impl OperatorAlgebra {
    /// Wraps a subspace after checking the algebra axioms at
    /// [`CLOSURE_TOL`].
    pub fn from_subspace(space: MatrixSubspace) -> Result<Self> {
        let n = space.ambient_dim();
        let identity_residual = space.residual(&ComplexMatrix::identity(n));
        let closure_residual = closure_residual(&space);
        let alg = Self {
            space,
            contains_identity: identity_residual <= CLOSURE_TOL,
            closure_residual,
        };
        if !alg.contains_identity {
            return Err(Error::Numerical(format!(
                "algebra does not contain the identity (residual {identity_residual:.3e})"
            )));
        }
        if !(closure_residual <= CLOSURE_TOL) {
            return Err(Error::Numerical(format!(
                "subspace is not closed under products and adjoints (residual {closure_residual:.3e})"
            )));
        }
        Ok(alg)
    }

    /// `C 1`.
    pub fn scalars(n: usize) -> Self {
        let space = MatrixSubspace::orthonormalize(n, &[ComplexMatrix::identity(n)], DEFAULT_TOL)
            .expect("identity is square");
        Self {
            space,
            contains_identity: true,
            closure_residual: 0.0,
        }
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        Self {
            space: MatrixSubspace::full(n),
            contains_identity: true,
            closure_residual: 0.0,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.space.basis()
    }

    pub fn space(&self) -> &MatrixSubspace {
        &self.space
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        self.space.contains(m, SUBSPACE_TOL)
    }

    /// Subspace equality by principal-angle distance.
    pub fn same_span(&self, other: &OperatorAlgebra) -> bool {
        self.space.same_span(&other.space, SUBSPACE_TOL)
    }

    pub fn is_subalgebra_of(&self, other: &OperatorAlgebra) -> bool {
        other.space.containment_defect(&self.space) <= SUBSPACE_TOL
    }

    /// `{X : XB = BX for all B in self}`.
    pub fn commutant(&self) -> Result<OperatorAlgebra> {
        commutant(self.ambient_dim(), self.basis())
    }

    pub fn double_commutant(&self) -> Result<OperatorAlgebra> {
        self.commutant()?.commutant()
    }

    /// `N intersected with N'`.
    pub fn centre(&self) -> Result<OperatorAlgebra> {
        let comm = self.commutant()?;
        let space = self.space.intersection(&comm.space, DEFAULT_TOL)?;
        let centre = OperatorAlgebra::from_subspace(space)?;
        debug_assert!(centre.is_abelian(1e-8));
        Ok(centre)
    }

    /// True when every pair of basis elements commutes to `tol`.
    pub fn is_abelian(&self, tol: f64) -> bool {
        self.max_commutator() <= tol
    }

    pub fn max_commutator(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = 0.0;
        for j in 0..b.len() {
            for k in j + 1..b.len() {
                worst = worst.max(b[j].commutator(&b[k]).hs_norm());
            }
        }
        worst
    }

    /// A superselection structure exists iff the commutant is more than the
    /// scalars.
    pub fn has_ssr(&self) -> Result<bool> {
        Ok(self.commutant()?.dim() > 1)
    }

    /// Random self-adjoint element with independent normal coefficients,
    /// normalized to unit HS norm. Zero only for the zero algebra.
    pub fn random_self_adjoint(&self, rng: &mut SeededRng) -> ComplexMatrix {
        random_self_adjoint_in(&self.space, rng)
    }
}

fn random_self_adjoint_in(space: &MatrixSubspace, rng: &mut SeededRng) -> ComplexMatrix {
    let n = space.ambient_dim();
    if space.is_empty() {
        return ComplexMatrix::zeros(n, n);
    }
    loop {
        let mut x = ComplexMatrix::zeros(n, n);
        for b in space.basis() {
            x += &b.scale(random::complex_normal(rng));
        }
        let h = x.hermitian_part();
        let norm = h.hs_norm();
        if norm > 1e-6 {
            return h.scale_real(1.0 / norm);
        }
    }
}

fn closure_residual(space: &MatrixSubspace) -> f64 {
    let b = space.basis();
    let mut worst: f64 = 0.0;
    for x in b {
        worst = worst.max(space.residual(&x.adjoint()));
    }
    for x in b {
        for y in b {
            worst = worst.max(space.residual(&x.matmul(y)));
        }
    }
    worst
}

fn check_square(n: usize, mats: &[ComplexMatrix]) -> Result<()> {
    for m in mats {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "generator is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Smallest unital *-subalgebra of `M_n` containing `generators`.
///
/// Seeds the span with the identity, the generators and their adjoints,
/// then appends pairwise products round by round until a round adds
/// nothing.
pub fn generate_algebra(n: usize, generators: &[ComplexMatrix], tol: f64) -> Result<OperatorAlgebra> {
    check_square(n, generators)?;
    let mut seed = vec![ComplexMatrix::identity(n)];
    for g in generators {
        seed.push(g.clone());
        seed.push(g.adjoint());
    }
    let mut space = MatrixSubspace::orthonormalize(n, &seed, tol)?;
    let mut fresh_from = 0;
    let max_rounds = (n * n).max(1);
    for _ in 0..max_rounds {
        let basis = space.basis().to_vec();
        let mut products = Vec::new();
        for (j, x) in basis.iter().enumerate() {
            for (k, y) in basis.iter().enumerate() {
                if j >= fresh_from || k >= fresh_from {
                    products.push(x.matmul(y));
                }
            }
        }
        let before = space.dim();
        let added = space.extend(&products, tol)?;
        if added == 0 {
            return OperatorAlgebra::from_subspace(space);
        }
        fresh_from = before;
    }
    Err(Error::Numerical(format!(
        "algebra generation did not stabilize within {max_rounds} rounds"
    )))
}

/// Commutant of `set` together with the adjoints of its members, as the
/// joint kernel of the maps `X -> BX - XB`. Including the adjoints makes
/// the result a *-algebra for any input; for self-adjoint sets it changes
/// nothing.
///
/// With column-stacking, `vec(BX - XB) = (I (x) B - B^T (x) I) vec(X)`; the
/// operators for all `B` are stacked into one tall matrix, each scaled to
/// unit norm.
pub fn commutant(n: usize, set: &[ComplexMatrix]) -> Result<OperatorAlgebra> {
    check_square(n, set)?;
    let id = ComplexMatrix::identity(n);
    let mut blocks = Vec::new();
    for b in set {
        let norm = b.hs_norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("commutant input"));
        }
        if norm == 0.0 {
            continue;
        }
        let b = b.scale_real(1.0 / norm);
        for m in [b.adjoint(), b] {
            blocks.push(&kron(&id, &m) - &kron(&m.transpose(), &id));
        }
    }
    if blocks.is_empty() {
        return Ok(OperatorAlgebra::full(n));
    }
    let vectors = nullspace_scaled(&ComplexMatrix::vstack(&blocks), DEFAULT_TOL, 1.0)?;
    let mats: Vec<ComplexMatrix> = vectors.iter().map(|v| ComplexMatrix::devectorize(n, v)).collect();
    let space = MatrixSubspace::orthonormalize(n, &mats, DEFAULT_TOL)?;
    OperatorAlgebra::from_subspace(space)
}

/// `S''`, the algebra generated by `S`.
pub fn double_commutant(n: usize, set: &[ComplexMatrix]) -> Result<OperatorAlgebra> {
    commutant(n, set)?.commutant()
}

/// An abelian subalgebra `A` of `N` with `A = A' cap N`.
///
/// Starts from the centre of `N` and adjoins random self-adjoint elements
/// of `(A' cap N) - A` until nothing is left; each step strictly grows `A`.
pub fn maximal_abelian_in(alg: &OperatorAlgebra, seed: u64) -> Result<OperatorAlgebra> {
    let n = alg.ambient_dim();
    let mut rng = random::rng(seed);
    let mut abelian = alg.centre()?;
    for _ in 0..=n * n {
        let relative = abelian.commutant()?.space.intersection(&alg.space, DEFAULT_TOL)?;
        let outside = relative.complement_of(&abelian.space, DEFAULT_TOL)?;
        if outside.is_empty() {
            if !abelian.is_abelian(1e-8) {
                return Err(Error::Numerical(format!(
                    "extension lost commutativity (max commutator {:.3e})",
                    abelian.max_commutator()
                )));
            }
            return Ok(abelian);
        }
        let h = random_self_adjoint_in(&outside, &mut rng);
        let mut gens = abelian.basis().to_vec();
        gens.push(h);
        abelian = generate_algebra(n, &gens, DEFAULT_TOL)?;
    }
    Err(Error::Numerical("maximal abelian extension did not terminate".into()))
}

/// Both sides of the equivalence "N' abelian iff a maximal abelian
/// subalgebra of N is maximal abelian in M_n", computed independently.
#[derive(Debug, Clone)]
pub struct DiracReport {
    pub commutant_abelian: bool,
    pub maximal_abelian_subalgebra: OperatorAlgebra,
    pub is_maximal_in_full_algebra: bool,
    /// An element of `A' - A` when `A` is not maximal in `M_n`.
    pub witness: Option<ComplexMatrix>,
}

impl DiracReport {
    pub fn sides_agree(&self) -> bool {
        self.commutant_abelian == self.is_maximal_in_full_algebra
    }
}

pub fn dirac_check(alg: &OperatorAlgebra, seed: u64) -> Result<DiracReport> {
    let comm = alg.commutant()?;
    let commutant_abelian = comm.is_abelian(1e-8);

    let masa = maximal_abelian_in(alg, seed)?;
    let masa_comm = masa.commutant()?;
    let is_maximal = masa_comm.same_span(&masa);

    let witness = if is_maximal {
        None
    } else {
        // Prefer a witness from N', which lies inside A' because A is in N.
        let from_gauge = comm.space.complement_of(&masa.space, DEFAULT_TOL)?;
        let pool = if from_gauge.is_empty() {
            masa_comm.space.complement_of(&masa.space, DEFAULT_TOL)?
        } else {
            from_gauge
        };
        pool.basis().first().cloned()
    };

    Ok(DiracReport {
        commutant_abelian,
        maximal_abelian_subalgebra: masa,
        is_maximal_in_full_algebra: is_maximal,
        witness,
    })
}

/// True when `{B psi : B in N}` spans `C^n` (rank decided at `tol`).
pub fn is_cyclic_vector(alg: &OperatorAlgebra, psi: &[Complex64], tol: f64) -> Result<bool> {
    let n = alg.ambient_dim();
    if psi.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for ambient dimension {n}",
            psi.len()
        )));
    }
    if vnorm(psi) == 0.0 {
        return Err(Error::InvalidInput("cyclic-vector test on the zero vector".into()));
    }
    let orbit: Vec<Vec<Complex64>> = alg.basis().iter().map(|b| b.apply(psi)).collect();
    let m = ComplexMatrix::from_columns(n, &orbit);
    Ok(rank(&m, tol)? == n)
}

/// Tries `trials` seeded random unit vectors.
pub fn find_cyclic_vector(alg: &OperatorAlgebra, trials: usize, seed: u64) -> Result<Option<Vec<Complex64>>> {
    let mut rng = random::rng(seed);
    for _ in 0..trials {
        let psi = random::random_unit_vector(&mut rng, alg.ambient_dim());
        if is_cyclic_vector(alg, &psi, DEFAULT_TOL)? {
            return Ok(Some(psi));
        }
    }
    Ok(None)
}

/// Standard test algebras used across modules, examples and the CLI.
pub mod corpus {
    use super::*;
    use crate::kernel::pauli;

    /// Generators of the block algebra `M_a (+) M_b` on `C^(a+b)`: all matrix
    /// units inside each diagonal block.
    pub fn block_generators(dims: &[usize]) -> Vec<ComplexMatrix> {
        let n: usize = dims.iter().sum();
        let mut gens = Vec::new();
        let mut offset = 0;
        for &d in dims {
            for i in 0..d {
                for j in 0..d {
                    gens.push(ComplexMatrix::unit(n, offset + i, offset + j));
                }
            }
            offset += d;
        }
        gens
    }

    pub fn block_algebra(dims: &[usize]) -> OperatorAlgebra {
        let n = dims.iter().sum();
        generate_algebra(n, &block_generators(dims), DEFAULT_TOL).expect("block algebra")
    }

    /// `{A (x) I_m : A in M_k}`.
    pub fn ampliation(k: usize, m: usize) -> OperatorAlgebra {
        let gens: Vec<_> = block_generators(&[k])
            .iter()
            .map(|a| kron(a, &ComplexMatrix::identity(m)))
            .collect();
        generate_algebra(k * m, &gens, DEFAULT_TOL).expect("ampliation")
    }

    pub fn diagonal(n: usize) -> OperatorAlgebra {
        let gens: Vec<_> = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
        generate_algebra(n, &gens, DEFAULT_TOL).expect("diagonal algebra")
    }

    pub fn pauli_pair() -> Vec<ComplexMatrix> {
        vec![pauli::x(), pauli::z()]
    }
}
