use proptest::prelude::*;
use ssrlab::algebra::corpus::block_algebra;
use ssrlab::kernel::random::{self, random_density};
use ssrlab::kernel::ComplexMatrix;
use ssrlab::sectors::{
    classify_purity, einselection_sim, reduce_state, sectors_from_algebra, DensityMatrix, PurityClass,
    SectorDecomposition,
};

fn decomposition(dims: &[usize], seed: u64) -> SectorDecomposition {
    sectors_from_algebra(&block_algebra(dims), seed, 3).unwrap()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..3, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projector_axioms(dims in dims_strategy(), seed in any::<u64>()) {
        let s = decomposition(&dims, seed);
        prop_assert_eq!(s.len(), dims.len());
        prop_assert!(s.axiom_defect() <= 1e-9);
    }

    #[test]
    fn block_diagonal_iff_commutes_with_projectors(dims in dims_strategy(), seed in any::<u64>(), pinch in any::<bool>()) {
        prop_assume!(dims.len() > 1);
        let s = decomposition(&dims, seed);
        let n: usize = dims.iter().sum();
        let mut rng = random::rng(seed);
        let mut rho = random_density(&mut rng, n, n);
        if pinch {
            rho = s.pinch(&rho);
        }
        let off = (&rho - &s.pinch(&rho)).hs_norm();
        let comm = s.projectors().iter().map(|p| rho.commutator(p).hs_norm()).fold(0.0, f64::max);
        let c = 10.0 * n as f64;
        prop_assert_eq!(off <= 1e-9, comm <= c * 1e-9);
        prop_assert_eq!(off <= 1e-9, pinch);
    }

    #[test]
    fn reduction_is_idempotent(dims in dims_strategy(), seed in any::<u64>()) {
        let s = decomposition(&dims, seed);
        let n: usize = dims.iter().sum();
        let mut rng = random::rng(seed.wrapping_add(1));
        let rho = DensityMatrix::new(random_density(&mut rng, n, 2)).unwrap();
        let first = reduce_state(&rho, &s, 1e-12).unwrap();
        let again = DensityMatrix::new(first.reconstruct(n)).unwrap();
        let second = reduce_state(&again, &s, 1e-12).unwrap();
        for (a, b) in first.weights.iter().zip(&second.weights) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert_eq!(first.support.clone(), second.support.clone());
        for ((i, x), (j, y)) in first.components.iter().zip(&second.components) {
            prop_assert_eq!(i, j);
            prop_assert!(x.matrix().approx_eq(y.matrix(), 1e-10));
        }
        prop_assert!(second.coherence_defect <= 1e-10);
    }

    #[test]
    fn einselection_conserves_weights(dims in dims_strategy(), seed in any::<u64>(), damping in 0.05f64..1.0) {
        let s = decomposition(&dims, seed);
        let n: usize = dims.iter().sum();
        let mut rng = random::rng(seed);
        let rho = DensityMatrix::new(random_density(&mut rng, n, n)).unwrap();
        let (traj, weights) = einselection_sim(&rho, &s, damping, 12).unwrap();
        for w in &weights {
            for (a, b) in w.iter().zip(&weights[0]) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        for pair in traj.windows(2) {
            prop_assert!(pair[1].coherence_defect <= pair[0].coherence_defect + 1e-15);
        }
    }
}

#[test]
fn sector_counts_are_stable_across_seeds() {
    for dims in [vec![2, 3], vec![1, 1, 1], vec![3], vec![1, 2, 2]] {
        let counts: Vec<_> = (0..5).map(|seed| decomposition(&dims, seed).sector_dims().to_vec()).collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{dims:?}: {counts:?}");
    }
}

#[test]
fn purity_classes() {
    let s = decomposition(&[1, 1], 0);
    let pure0 = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
    let mix = DensityMatrix::maximally_mixed(2);
    let plus = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
    assert_eq!(classify_purity(&pure0, &s).unwrap(), PurityClass::PureInSector);
    assert_eq!(classify_purity(&mix, &s).unwrap(), PurityClass::MixedAcrossSectors);
    assert_eq!(classify_purity(&plus, &s).unwrap(), PurityClass::CoherentViolation);
}
