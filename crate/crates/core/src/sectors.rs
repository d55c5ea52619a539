//! Superselection sectors as minimal central projectors, state reduction
//! into sector components, and the dephasing (einselection) toy model.

use num_complex::Complex64;

use crate::algebra::OperatorAlgebra;
use crate::error::{Error, Result};
use crate::kernel::random::{self, SeededRng};
use crate::kernel::{hermitian_eig, vdot, vnorm, ComplexMatrix};

/// Tolerance of the projector-family axioms.
pub const PROJECTOR_TOL: f64 = 1e-9;

/// Default cutoff for a sector weight to count as present.
pub const DEFAULT_WEIGHT_CUTOFF: f64 = 1e-12;

/// Eigenvalue gaps wider than this fraction of the spectral spread separate
/// sectors.
const GAP_SPLIT: f64 = 1e-6;
/// Gaps at or below this fraction (of `max(spread, ||Z||)`) are rounding
/// noise inside a sector. Gaps between the two thresholds are ambiguous.
const GAP_MERGE: f64 = 1e-9;

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and normalization at `1e-10`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        const TOL: f64 = 1e-10;
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if !(defect <= TOL) {
            return Err(Error::NotDensityMatrix(format!("Hermiticity defect {defect:.3e}")));
        }
        let tr = matrix.trace().re;
        if !((tr - 1.0).abs() <= TOL) {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let eig = hermitian_eig(&matrix, TOL)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a unit vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = vnorm(psi);
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::NotDensityMatrix(format!("state vector has norm {norm}")));
        }
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Complex64 {
        self.matrix.matmul(a).trace()
    }

    pub fn purity_defect(&self) -> f64 {
        (&self.matrix.matmul(&self.matrix) - &self.matrix).hs_norm()
    }
}

/// Exhaustive family of mutually orthogonal projectors.
#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    ambient_dim: usize,
    projectors: Vec<ComplexMatrix>,
    sector_dims: Vec<usize>,
}

impl SectorDecomposition {
    /// Validates the projector axioms at [`PROJECTOR_TOL`] and puts the
    /// family in canonical order.
    pub fn from_projectors(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(Error::InvalidInput("empty projector family".into()));
        };
        let n = first.rows();
        for p in &projectors {
            if p.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "projector of shape {:?} in dimension {n}",
                    p.shape()
                )));
            }
        }
        let decomposition = Self::ordered(n, projectors);
        let defect = decomposition.axiom_defect();
        if !(defect <= PROJECTOR_TOL) {
            return Err(Error::InvalidInput(format!(
                "projectors violate orthogonality/idempotence/exhaustiveness (defect {defect:.3e})"
            )));
        }
        Ok(decomposition)
    }

    /// The trivial decomposition `{I}`.
    pub fn single(n: usize) -> Self {
        Self::ordered(n, vec![ComplexMatrix::identity(n)])
    }

    fn ordered(n: usize, mut projectors: Vec<ComplexMatrix>) -> Self {
        // descending rank; ties by the first basis index the projector touches
        let key = |p: &ComplexMatrix| {
            let rank = p.trace().re.round() as usize;
            let first = (0..n).find(|&k| p[(k, k)].re > 1e-8).unwrap_or(n);
            (std::cmp::Reverse(rank), first)
        };
        projectors.sort_by_key(key);
        let sector_dims = projectors.iter().map(|p| p.trace().re.round() as usize).collect();
        Self {
            ambient_dim: n,
            projectors,
            sector_dims,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn sector_dims(&self) -> &[usize] {
        &self.sector_dims
    }

    /// Largest violation among Hermiticity, idempotence, mutual
    /// orthogonality and exhaustiveness.
    pub fn axiom_defect(&self) -> f64 {
        let n = self.ambient_dim;
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(n, n);
        for (i, p) in self.projectors.iter().enumerate() {
            worst = worst.max(p.hermiticity_defect());
            worst = worst.max((&p.matmul(p) - p).hs_norm());
            for q in &self.projectors[i + 1..] {
                worst = worst.max(p.matmul(q).hs_norm());
            }
            sum += p;
        }
        worst.max((&sum - &ComplexMatrix::identity(n)).hs_norm())
    }

    /// `sum_i P_i X P_i`.
    pub fn pinch(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.ambient_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for p in &self.projectors {
            out += &p.matmul(x).matmul(p);
        }
        out
    }

    /// `||X - sum_i P_i X P_i||_HS`.
    pub fn coherence_defect(&self, x: &ComplexMatrix) -> f64 {
        (x - &self.pinch(x)).hs_norm()
    }

    /// Index of the sector containing `psi` to `tol`, if any.
    pub fn sector_of(&self, psi: &[Complex64], tol: f64) -> Option<usize> {
        self.projectors.iter().position(|p| {
            let proj = p.apply(psi);
            let diff: Vec<Complex64> = proj.iter().zip(psi).map(|(a, b)| a - b).collect();
            vnorm(&diff) <= tol * vnorm(psi).max(1.0)
        })
    }

    /// Largest `||P_i B P_j||` over `i != j` and `B` in the algebra basis.
    pub fn block_leakage(&self, alg: &OperatorAlgebra) -> f64 {
        let mut worst: f64 = 0.0;
        for b in alg.basis() {
            for (i, p) in self.projectors.iter().enumerate() {
                for (j, q) in self.projectors.iter().enumerate() {
                    if i != j {
                        worst = worst.max(p.matmul(b).matmul(q).hs_norm());
                    }
                }
            }
        }
        worst
    }
}

/// Splits the spectrum of a central element into clusters; `None` when some
/// gap is neither clearly a split nor clearly rounding noise.
fn cluster_projectors(z: &ComplexMatrix) -> Result<std::result::Result<Vec<ComplexMatrix>, f64>> {
    let n = z.rows();
    let eig = hermitian_eig(z, 1e-8)?;
    let vals = &eig.values;
    let spread = vals[n - 1] - vals[0];
    let scale = spread.max(z.hs_norm()).max(f64::MIN_POSITIVE);
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        let gap = vals[k] - vals[k - 1];
        if gap > GAP_SPLIT * spread && spread > GAP_MERGE * scale {
            groups.push(vec![k]);
        } else if gap <= GAP_MERGE * scale {
            groups.last_mut().expect("non-empty").push(k);
        } else {
            return Ok(Err(gap));
        }
    }
    let projectors = groups
        .iter()
        .map(|g| {
            let mut p = ComplexMatrix::zeros(n, n);
            for &k in g {
                let v = eig.vector(k);
                p += &ComplexMatrix::outer(&v, &v);
            }
            p
        })
        .collect();
    Ok(Ok(projectors))
}

/// Common refinement of two commuting projector families.
fn refine(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for p in a {
        for q in b {
            let pq = p.matmul(q);
            // a nonzero product of commuting projectors has HS norm >= 1
            if pq.hs_norm() > 0.5 {
                out.push(pq.hermitian_part());
            }
        }
    }
    out
}

/// Minimal central projectors of `alg`.
///
/// Each repeat draws a random self-adjoint central element (standard-normal
/// coefficients), clusters its spectrum and takes spectral projectors; the
/// result is the common refinement over all repeats. Repeats whose spectrum
/// has an ambiguous gap are discarded; if every repeat is ambiguous the gap
/// is reported as a numerical failure.
pub fn sectors_from_algebra(alg: &OperatorAlgebra, seed: u64, repeats: usize) -> Result<SectorDecomposition> {
    let n = alg.ambient_dim();
    let centre = alg.centre()?;
    if centre.dim() <= 1 {
        return Ok(SectorDecomposition::single(n));
    }
    let mut rng = random::rng(seed);
    let mut family: Option<Vec<ComplexMatrix>> = None;
    let mut last_gap = None;
    for _ in 0..repeats.max(1) {
        let z = centre.random_self_adjoint(&mut rng);
        match cluster_projectors(&z)? {
            Ok(ps) => {
                family = Some(match family {
                    None => ps,
                    Some(prev) => refine(&prev, &ps),
                })
            }
            Err(gap) => last_gap = Some(gap),
        }
    }
    let Some(projectors) = family else {
        return Err(Error::Numerical(format!(
            "ambiguous eigenvalue clustering of central elements (gap {:.3e})",
            last_gap.unwrap_or(f64::NAN)
        )));
    };
    let decomposition = SectorDecomposition::ordered(n, projectors);

    let axioms = decomposition.axiom_defect();
    if axioms > PROJECTOR_TOL {
        return Err(Error::Numerical(format!("sector projectors violate the axioms by {axioms:.3e}")));
    }
    for p in decomposition.projectors() {
        let r = centre.space().residual(p);
        if r > 1e-8 {
            return Err(Error::Numerical(format!("sector projector leaves the centre (residual {r:.3e})")));
        }
    }
    let leak = decomposition.block_leakage(alg);
    if leak > 1e-8 {
        return Err(Error::Numerical(format!("observables mix sectors (leakage {leak:.3e})")));
    }
    Ok(decomposition)
}

/// `rho = sum_i lambda_i rho_i` data for a state and a sector family.
#[derive(Debug, Clone)]
pub struct StateReduction {
    /// `lambda_i = Tr(rho P_i)` for every sector.
    pub weights: Vec<f64>,
    /// `(i, rho_i)` for sectors with weight above the cutoff.
    pub components: Vec<(usize, DensityMatrix)>,
    pub support: Vec<usize>,
    pub coherence_defect: f64,
}

impl StateReduction {
    /// `sum_i lambda_i rho_i`.
    pub fn reconstruct(&self, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(n, n);
        for (i, rho) in &self.components {
            out += &rho.matrix().scale_real(self.weights[*i]);
        }
        out
    }
}

pub fn reduce_state(rho: &DensityMatrix, sectors: &SectorDecomposition, cutoff: f64) -> Result<StateReduction> {
    if rho.dim() != sectors.ambient_dim() {
        return Err(Error::ShapeMismatch(format!(
            "state of dimension {} against sectors of dimension {}",
            rho.dim(),
            sectors.ambient_dim()
        )));
    }
    let m = rho.matrix();
    let mut weights = Vec::with_capacity(sectors.len());
    let mut components = Vec::new();
    let mut support = Vec::new();
    for (i, p) in sectors.projectors().iter().enumerate() {
        let lambda = m.matmul(p).trace().re;
        weights.push(lambda);
        if lambda > cutoff {
            let block = p.matmul(m).matmul(p).scale_real(1.0 / lambda);
            // exact Hermitian symmetrization; validation tolerates rounding
            let block = block.hermitian_part();
            components.push((i, DensityMatrix::new(block)?));
            support.push(i);
        }
    }
    Ok(StateReduction {
        weights,
        components,
        support,
        coherence_defect: sectors.coherence_defect(m),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityClass {
    PureInSector,
    MixedAcrossSectors,
    MixedWithinSector,
    CoherentViolation,
}

impl PurityClass {
    pub fn label(self) -> &'static str {
        match self {
            PurityClass::PureInSector => "pure_in_sector",
            PurityClass::MixedAcrossSectors => "mixed_across_sectors",
            PurityClass::MixedWithinSector => "mixed_within_sector",
            PurityClass::CoherentViolation => "coherent_violation",
        }
    }
}

pub fn classify_purity(rho: &DensityMatrix, sectors: &SectorDecomposition) -> Result<PurityClass> {
    const TOL: f64 = 1e-8;
    let red = reduce_state(rho, sectors, DEFAULT_WEIGHT_CUTOFF)?;
    if red.coherence_defect > TOL {
        return Ok(PurityClass::CoherentViolation);
    }
    Ok(match red.support.len() {
        0 | 1 if rho.purity_defect() <= TOL => PurityClass::PureInSector,
        0 | 1 => PurityClass::MixedWithinSector,
        _ => PurityClass::MixedAcrossSectors,
    })
}

/// `sum_i a_i P_i`.
pub fn classical_observable(sectors: &SectorDecomposition, coefficients: &[f64]) -> Result<ComplexMatrix> {
    if coefficients.len() != sectors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficients for {} sectors",
            coefficients.len(),
            sectors.len()
        )));
    }
    let n = sectors.ambient_dim();
    let mut z = ComplexMatrix::zeros(n, n);
    for (p, &a) in sectors.projectors().iter().zip(coefficients) {
        z += &p.scale_real(a);
    }
    Ok(z)
}

/// Evidence that coherent superpositions across two sectors are
/// indistinguishable from the mixture on the given observables.
#[derive(Debug, Clone)]
pub struct InhibitionReport {
    pub sectors: (usize, usize),
    pub samples: usize,
    /// Largest `|<psi+|A|psi+> - (<psi1|A|psi1> + <psi2|A|psi2>)/2|`.
    pub max_superposition_residual: f64,
    /// Largest `|<psi+|A|psi+> - Tr(rho A)|`.
    pub max_mixture_residual: f64,
    /// `|psi1><psi2| + |psi2><psi1|`.
    pub witness: ComplexMatrix,
    /// `<psi1|W|psi2>`.
    pub witness_cross_element: Complex64,
    /// Distance of the witness from the algebra.
    pub witness_outside_residual: f64,
    /// `<psi+|W|psi+> - Tr(rho W)`, nonzero for an operator outside the
    /// algebra.
    pub witness_expectation_gap: f64,
}

pub fn superposition_inhibition_report(
    psi1: &[Complex64],
    psi2: &[Complex64],
    alg: &OperatorAlgebra,
    sectors: &SectorDecomposition,
    samples: usize,
    seed: u64,
) -> Result<InhibitionReport> {
    let n = alg.ambient_dim();
    if psi1.len() != n || psi2.len() != n || sectors.ambient_dim() != n {
        return Err(Error::ShapeMismatch("vectors, algebra and sectors must share a dimension".into()));
    }
    for psi in [psi1, psi2] {
        if (vnorm(psi) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("state vectors must be normalized".into()));
        }
    }
    let i = sectors
        .sector_of(psi1, 1e-9)
        .ok_or_else(|| Error::InvalidInput("first vector is not inside a single sector".into()))?;
    let j = sectors
        .sector_of(psi2, 1e-9)
        .ok_or_else(|| Error::InvalidInput("second vector is not inside a single sector".into()))?;
    if i == j {
        return Err(Error::InvalidInput(format!("both vectors lie in sector {i}; need distinct sectors")));
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus: Vec<Complex64> = psi1.iter().zip(psi2).map(|(a, b)| (a + b) * s).collect();
    let rho = (&ComplexMatrix::outer(psi1, psi1) + &ComplexMatrix::outer(psi2, psi2)).scale_real(0.5);
    let expect = |a: &ComplexMatrix, v: &[Complex64]| vdot(v, &a.apply(v));

    let mut rng: SeededRng = random::rng(seed);
    let mut max_sup: f64 = 0.0;
    let mut max_mix: f64 = 0.0;
    for _ in 0..samples {
        let a = alg.random_self_adjoint(&mut rng);
        let lhs = expect(&a, &plus);
        let avg = (expect(&a, psi1) + expect(&a, psi2)) * 0.5;
        let tr = rho.matmul(&a).trace();
        max_sup = max_sup.max((lhs - avg).norm());
        max_mix = max_mix.max((lhs - tr).norm());
    }

    let witness = &ComplexMatrix::outer(psi1, psi2) + &ComplexMatrix::outer(psi2, psi1);
    let cross = vdot(psi1, &witness.apply(psi2));
    let gap = (expect(&witness, &plus) - rho.matmul(&witness).trace()).norm();
    Ok(InhibitionReport {
        sectors: (i, j),
        samples,
        max_superposition_residual: max_sup,
        max_mixture_residual: max_mix,
        witness_outside_residual: alg.space().residual(&witness),
        witness,
        witness_cross_element: cross,
        witness_expectation_gap: gap,
    })
}

/// One point of an einselection trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub coherence_defect: f64,
}

/// Iterates `rho -> (1 - d) rho + d sum_i P_i rho P_i` and records the
/// off-block norm after each step (step 0 is the initial state). The sector
/// weights are returned alongside for every step.
pub fn einselection_sim(
    rho0: &DensityMatrix,
    sectors: &SectorDecomposition,
    damping: f64,
    steps: usize,
) -> Result<(Vec<TrajectoryPoint>, Vec<Vec<f64>>)> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidInput(format!("damping {damping} outside (0, 1]")));
    }
    if rho0.dim() != sectors.ambient_dim() {
        return Err(Error::ShapeMismatch("state and sectors differ in dimension".into()));
    }
    let weights_of = |m: &ComplexMatrix| -> Vec<f64> {
        sectors.projectors().iter().map(|p| m.matmul(p).trace().re).collect()
    };
    let mut rho = rho0.matrix().clone();
    let mut points = vec![TrajectoryPoint {
        step: 0,
        coherence_defect: sectors.coherence_defect(&rho),
    }];
    let mut weights = vec![weights_of(&rho)];
    for step in 1..=steps {
        let pinched = sectors.pinch(&rho);
        rho = &rho.scale_real(1.0 - damping) + &pinched.scale_real(damping);
        points.push(TrajectoryPoint {
            step,
            coherence_defect: sectors.coherence_defect(&rho),
        });
        weights.push(weights_of(&rho));
    }
    Ok((points, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::corpus::{block_algebra, diagonal};
    use crate::algebra::OperatorAlgebra;

    fn basis_vec(n: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    fn plus_state() -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        v[0] = Complex64::new(s, 0.0);
        v[2] = Complex64::new(s, 0.0);
        v
    }

    #[test]
    fn full_algebra_has_one_sector() {
        let d = sectors_from_algebra(&OperatorAlgebra::full(3), 0, 3).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.projectors()[0].approx_eq(&ComplexMatrix::identity(3), 1e-12));
    }

    #[test]
    fn block_algebra_sectors_in_canonical_order() {
        let d = sectors_from_algebra(&block_algebra(&[2, 3]), 1, 3).unwrap();
        // descending dimension
        assert_eq!(d.sector_dims(), &[3, 2]);
        assert!(d.axiom_defect() < 1e-12);
        let p_small = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(d.projectors()[1].approx_eq(&p_small, 1e-10));
    }

    #[test]
    fn diagonal_algebra_has_one_dimensional_sectors() {
        let d = sectors_from_algebra(&diagonal(3), 2, 3).unwrap();
        assert_eq!(d.sector_dims(), &[1, 1, 1]);
        // ties broken by first basis index
        for (i, p) in d.projectors().iter().enumerate() {
            assert!(p.approx_eq(&ComplexMatrix::unit(3, i, i), 1e-10));
        }
    }

    #[test]
    fn reduce_plus_state_gives_half_half() {
        let d = sectors_from_algebra(&block_algebra(&[2, 2]), 0, 3).unwrap();
        let rho = DensityMatrix::pure(&plus_state()).unwrap();
        let r = reduce_state(&rho, &d, DEFAULT_WEIGHT_CUTOFF).unwrap();
        assert!((r.weights[0] - 0.5).abs() < 1e-12);
        assert!((r.weights[1] - 0.5).abs() < 1e-12);
        let e1 = DensityMatrix::pure(&basis_vec(4, 0)).unwrap();
        let e3 = DensityMatrix::pure(&basis_vec(4, 2)).unwrap();
        assert!(r.components[0].1.matrix().approx_eq(e1.matrix(), 1e-12));
        assert!(r.components[1].1.matrix().approx_eq(e3.matrix(), 1e-12));
        assert!(r.coherence_defect > 0.5);
    }

    #[test]
    fn reduce_single_sector_state() {
        let d = sectors_from_algebra(&block_algebra(&[2, 2]), 0, 3).unwrap();
        let rho = DensityMatrix::pure(&basis_vec(4, 1)).unwrap();
        let r = reduce_state(&rho, &d, DEFAULT_WEIGHT_CUTOFF).unwrap();
        assert!((r.weights[0] - 1.0).abs() < 1e-12 && r.weights[1].abs() < 1e-12);
        assert_eq!(r.support, vec![0]);
        assert!(r.components[0].1.matrix().approx_eq(rho.matrix(), 1e-12));
        assert!(r.coherence_defect < 1e-14);
    }

    #[test]
    fn reduce_maximally_mixed() {
        let d = sectors_from_algebra(&block_algebra(&[3, 1]), 0, 3).unwrap();
        let r = reduce_state(&DensityMatrix::maximally_mixed(4), &d, DEFAULT_WEIGHT_CUTOFF).unwrap();
        assert!((r.weights[0] - 0.75).abs() < 1e-12);
        assert!((r.weights[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn inhibition_report() {
        let alg = block_algebra(&[2, 2]);
        let d = sectors_from_algebra(&alg, 0, 3).unwrap();
        let r = superposition_inhibition_report(&basis_vec(4, 0), &basis_vec(4, 2), &alg, &d, 50, 3).unwrap();
        assert!(r.max_superposition_residual <= 1e-9);
        assert!(r.max_mixture_residual <= 1e-9);
        assert!((r.witness_cross_element - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(r.witness.hermiticity_defect() == 0.0);
        assert!(r.witness_outside_residual > 1.0);
        assert!((r.witness_expectation_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inhibition_rejects_same_sector_and_single_sector() {
        let alg = block_algebra(&[2, 2]);
        let d = sectors_from_algebra(&alg, 0, 3).unwrap();
        let e = basis_vec(4, 0);
        assert!(superposition_inhibition_report(&e, &e, &alg, &d, 5, 0).is_err());

        let full = OperatorAlgebra::full(4);
        let single = sectors_from_algebra(&full, 0, 3).unwrap();
        assert!(superposition_inhibition_report(&e, &basis_vec(4, 2), &full, &single, 5, 0).is_err());
    }

    #[test]
    fn purity_classes() {
        let d = sectors_from_algebra(&block_algebra(&[2, 2]), 0, 3).unwrap();
        let e1 = DensityMatrix::pure(&basis_vec(4, 0)).unwrap();
        assert_eq!(classify_purity(&e1, &d).unwrap(), PurityClass::PureInSector);

        let mix = (&e1.matrix().clone() + DensityMatrix::pure(&basis_vec(4, 2)).unwrap().matrix()).scale_real(0.5);
        let mix = DensityMatrix::new(mix).unwrap();
        assert_eq!(classify_purity(&mix, &d).unwrap(), PurityClass::MixedAcrossSectors);

        let within = (e1.matrix() + DensityMatrix::pure(&basis_vec(4, 1)).unwrap().matrix()).scale_real(0.5);
        let within = DensityMatrix::new(within).unwrap();
        assert_eq!(classify_purity(&within, &d).unwrap(), PurityClass::MixedWithinSector);

        let raw = DensityMatrix::pure(&plus_state()).unwrap();
        assert_eq!(classify_purity(&raw, &d).unwrap(), PurityClass::CoherentViolation);
    }

    #[test]
    fn classical_observables() {
        let alg = block_algebra(&[2, 2]);
        let d = sectors_from_algebra(&alg, 0, 3).unwrap();
        let one = classical_observable(&d, &[1.0, 1.0]).unwrap();
        assert!(one.approx_eq(&ComplexMatrix::identity(4), 1e-12));
        let p1 = classical_observable(&d, &[1.0, 0.0]).unwrap();
        assert!(p1.approx_eq(&d.projectors()[0], 1e-15));
        let z = classical_observable(&d, &[2.0, -1.0]).unwrap();
        assert!(z.approx_eq(&ComplexMatrix::from_real_diagonal(&[2.0, 2.0, -1.0, -1.0]), 1e-10));
        for b in alg.basis() {
            assert!(z.commutator(b).hs_norm() < 1e-8);
        }
        assert!(classical_observable(&d, &[1.0]).is_err());
    }

    #[test]
    fn einselection_examples() {
        let d = sectors_from_algebra(&block_algebra(&[2, 2]), 0, 3).unwrap();
        let block = DensityMatrix::pure(&basis_vec(4, 0)).unwrap();
        let (traj, _) = einselection_sim(&block, &d, 0.3, 5).unwrap();
        assert!(traj.iter().all(|p| p.coherence_defect == 0.0));

        let plus = DensityMatrix::pure(&plus_state()).unwrap();
        let (traj, weights) = einselection_sim(&plus, &d, 0.5, 10).unwrap();
        let ratio = traj[10].coherence_defect / traj[0].coherence_defect;
        assert!((ratio - 2f64.powi(-10)).abs() < 1e-12);
        for w in &weights {
            assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        }

        let (traj, _) = einselection_sim(&plus, &d, 1.0, 1).unwrap();
        assert!(traj[1].coherence_defect < 1e-15);

        assert!(einselection_sim(&plus, &d, 0.0, 1).is_err());
        assert!(einselection_sim(&plus, &d, 1.5, 1).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.0, 0.5]])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn from_projectors_validates() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let q = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!(SectorDecomposition::from_projectors(vec![p.clone(), q]).is_ok());
        assert!(SectorDecomposition::from_projectors(vec![p.clone()]).is_err());
        assert!(SectorDecomposition::from_projectors(vec![p.clone(), p]).is_err());
    }
}
