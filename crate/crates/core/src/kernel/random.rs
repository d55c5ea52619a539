//! Seeded sampling helpers. Every randomized routine in the crate takes an
//! explicit seed and draws through these.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::decomp::hermitian_eig;
use super::matrix::{vnorm, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal(rng: &mut SeededRng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian samples")
}

pub fn random_hermitian(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// Eigenbasis of a random Hermitian matrix. Not Haar distributed, which
/// nothing here needs.
pub fn random_unitary(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n);
    hermitian_eig(&h, 1e-9).expect("hermitian by construction").vectors
}

pub fn random_unit_vector(rng: &mut SeededRng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = vnorm(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Uniform phase `e^{i theta}`.
pub fn random_phase(rng: &mut SeededRng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random density matrix `G G^dagger / Tr` of the given rank.
pub fn random_density(rng: &mut SeededRng, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank.max(1));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}
