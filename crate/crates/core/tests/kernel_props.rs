use num_complex::Complex64;
use proptest::prelude::*;
use ssrlab::kernel::random::{self, random_density, random_hermitian};
use ssrlab::kernel::{hermitian_eig, kron, nullspace, partial_trace, svd, vdot, ComplexMatrix, MatrixSubspace, Subsystem};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = random::rng(seed);
        let h = random_hermitian(&mut rng, n);
        let e = hermitian_eig(&h, 1e-10).unwrap();
        let back = e.vectors.matmul(&ComplexMatrix::from_real_diagonal(&e.values)).matmul(&e.vectors.adjoint());
        prop_assert!((&h - &back).hs_norm() / h.hs_norm() <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn nullspace_is_orthogonal_to_rows(seed in any::<u64>(), rows in 1usize..6, extra in 1usize..4) {
        let mut rng = random::rng(seed);
        let cols = rows + extra;
        let l = random::gaussian_matrix(&mut rng, rows, cols);
        let null = nullspace(&l, 1e-8).unwrap();
        prop_assert_eq!(null.len(), extra);
        for v in &null {
            let lv = l.apply(v);
            prop_assert!(lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 1e-9);
        }
        let dec = svd(&l).unwrap();
        for k in 0..rows {
            let row_dir = dec.v.column(k);
            for v in &null {
                prop_assert!(vdot(&row_dir, v).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn orthonormalize_twice_is_stable(seed in any::<u64>(), n in 2usize..4, k in 1usize..6) {
        let mut rng = random::rng(seed);
        let mut mats: Vec<_> = (0..k).map(|_| random::gaussian_matrix(&mut rng, n, n)).collect();
        // a dependent element
        mats.push(&mats[0] + &mats[k - 1].scale(Complex64::new(0.0, 2.0)));
        let once = MatrixSubspace::orthonormalize(n, &mats, 1e-8).unwrap();
        let twice = MatrixSubspace::orthonormalize(n, once.basis(), 1e-8).unwrap();
        prop_assert_eq!(once.dim(), twice.dim());
        prop_assert!(once.distance(&twice) <= 1e-10);
        prop_assert!(once.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn partial_trace_linear_and_trace_preserving(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut rng = random::rng(seed);
        let n = d1 * d2;
        let a = random::gaussian_matrix(&mut rng, n, n);
        let b = random::gaussian_matrix(&mut rng, n, n);
        let s = Complex64::new(0.3, -1.2);
        for which in [Subsystem::First, Subsystem::Second] {
            let lhs = partial_trace(&(&a + &b.scale(s)), (d1, d2), which).unwrap();
            let rhs = &partial_trace(&a, (d1, d2), which).unwrap() + &partial_trace(&b, (d1, d2), which).unwrap().scale(s);
            prop_assert!((&lhs - &rhs).hs_norm() <= 1e-12 * (1.0 + a.hs_norm() + b.hs_norm()));
            prop_assert!((lhs.trace() - (&a + &b.scale(s)).trace()).norm() <= 1e-12 * (1.0 + lhs.hs_norm()));
        }
    }

    #[test]
    fn partial_trace_of_product_state(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut rng = random::rng(seed);
        let r1 = random_density(&mut rng, d1, d1);
        let r2 = random_density(&mut rng, d2, d2);
        let joint = kron(&r1, &r2);
        prop_assert!(partial_trace(&joint, (d1, d2), Subsystem::Second).unwrap().approx_eq(&r1, 1e-12));
        prop_assert!(partial_trace(&joint, (d1, d2), Subsystem::First).unwrap().approx_eq(&r2, 1e-12));
    }

    #[test]
    fn vec_identity(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = random::rng(seed);
        let a = random::gaussian_matrix(&mut rng, n, n);
        let x = random::gaussian_matrix(&mut rng, n, n);
        let b = random::gaussian_matrix(&mut rng, n, n);
        let lhs = a.matmul(&x).matmul(&b).vectorize();
        let rhs = kron(&b.transpose(), &a).apply(&x.vectorize());
        let err: f64 = lhs.iter().zip(&rhs).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * (1.0 + a.hs_norm() * x.hs_norm() * b.hs_norm()));
    }
}
