//! Conserved additive charges on a system-apparatus pair, persistence of the
//! charge selection rule, and the Wigner-Araki-Yanase obstruction for exact
//! von Neumann measurements.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::random::{self, SeededRng};
use crate::kernel::{
    complete_orthonormal, hermitian_eig, kron, kron_vec, partial_trace, svd, vdot, vnorm, ComplexMatrix, Subsystem,
};
use crate::sectors::DensityMatrix;

/// Hermiticity tolerance for charges and observables.
const HERMITIAN_TOL: f64 = 1e-10;

/// Pointer pairs with `|<a_n|a_m>|` at or above `1 - POINTER_COINCIDENCE`
/// are treated as the same pointer position.
pub const POINTER_COINCIDENCE: f64 = 1e-12;

/// Default distance from overlap 1 below which a pair counts as resolved.
pub const DEFAULT_OVERLAP_MARGIN: f64 = 1e-6;

/// Tolerance of the unitarity and pointer-map checks of a model.
pub const MODEL_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are one charge value.
const CHARGE_CLUSTER_TOL: f64 = 1e-8;

/// Safety factor `c = 10 n` for norm propagation through products of
/// operators on an `n`-dimensional space.
pub fn propagation_constant(n: usize) -> f64 {
    10.0 * n as f64
}

/// `Q = Q_S (x) I + I (x) Q_A` with the two local parts.
#[derive(Debug, Clone)]
pub struct AdditiveCharge {
    dim_s: usize,
    dim_a: usize,
    q_s: ComplexMatrix,
    q_a: ComplexMatrix,
    q_total: ComplexMatrix,
}

impl AdditiveCharge {
    pub fn compose(q_s: ComplexMatrix, q_a: ComplexMatrix) -> Result<Self> {
        for q in [&q_s, &q_a] {
            if !q.is_square() {
                return Err(Error::NotSquare {
                    rows: q.rows(),
                    cols: q.cols(),
                });
            }
            if !q.is_finite() {
                return Err(Error::NonFinite("charge"));
            }
            let defect = q.hermiticity_defect();
            if !(defect <= HERMITIAN_TOL) {
                return Err(Error::NotHermitian { defect });
            }
        }
        let (ds, da) = (q_s.rows(), q_a.rows());
        let q_total = &kron(&q_s, &ComplexMatrix::identity(da)) + &kron(&ComplexMatrix::identity(ds), &q_a);
        Ok(Self {
            dim_s: ds,
            dim_a: da,
            q_s,
            q_a,
            q_total,
        })
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_s, self.dim_a)
    }

    pub fn total_dim(&self) -> usize {
        self.dim_s * self.dim_a
    }

    pub fn q_s(&self) -> &ComplexMatrix {
        &self.q_s
    }

    pub fn q_a(&self) -> &ComplexMatrix {
        &self.q_a
    }

    pub fn q_total(&self) -> &ComplexMatrix {
        &self.q_total
    }

    /// Orthonormal bases of the eigenspaces of `Q_total`, by ascending
    /// charge.
    pub fn charge_eigenspaces(&self) -> Result<Vec<(f64, Vec<Vec<Complex64>>)>> {
        eigenspaces(&self.q_total)
    }

    /// `sum_q P_q X P_q` over the eigenprojectors of `Q_total`; the result
    /// commutes with the charge.
    pub fn pinch(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        pinch_by(&self.q_total, x)
    }
}

/// Eigenvalue clusters of a Hermitian matrix with orthonormal bases.
pub fn eigenspaces(h: &ComplexMatrix) -> Result<Vec<(f64, Vec<Vec<Complex64>>)>> {
    let eig = hermitian_eig(h, HERMITIAN_TOL)?;
    let scale = h.max_abs().max(1.0);
    let mut out: Vec<(f64, Vec<Vec<Complex64>>)> = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        match out.last_mut() {
            Some((val, vecs)) if (lam - *val).abs() <= CHARGE_CLUSTER_TOL * scale => vecs.push(eig.vector(k)),
            _ => out.push((lam, vec![eig.vector(k)])),
        }
    }
    Ok(out)
}

fn pinch_by(h: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (_, vecs) in eigenspaces(h)? {
        let mut p = ComplexMatrix::zeros(n, n);
        for v in &vecs {
            p += &ComplexMatrix::outer(v, v);
        }
        out += &p.matmul(x).matmul(&p);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CompositionReport {
    pub system_commutator: f64,
    pub apparatus_commutator: f64,
    pub total_commutator: f64,
    pub precondition_holds: bool,
    pub conclusion_holds: bool,
}

impl CompositionReport {
    /// The implication "local commutation implies total commutation".
    pub fn passed(&self) -> bool {
        !self.precondition_holds || self.conclusion_holds
    }
}

fn require_dims(rho: &DensityMatrix, n: usize, what: &str) -> Result<()> {
    if rho.dim() != n {
        return Err(Error::ShapeMismatch(format!("{what} has dimension {}, expected {n}", rho.dim())));
    }
    Ok(())
}

pub fn persistence_under_composition(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    charge: &AdditiveCharge,
    tol: f64,
) -> Result<CompositionReport> {
    require_dims(rho1, charge.dim_s, "system state")?;
    require_dims(rho2, charge.dim_a, "apparatus state")?;
    let c = propagation_constant(charge.total_dim());
    let s = rho1.matrix().commutator(&charge.q_s).hs_norm();
    let a = rho2.matrix().commutator(&charge.q_a).hs_norm();
    let joint = kron(rho1.matrix(), rho2.matrix());
    let t = joint.commutator(&charge.q_total).hs_norm();
    Ok(CompositionReport {
        system_commutator: s,
        apparatus_commutator: a,
        total_commutator: t,
        precondition_holds: s <= tol && a <= tol,
        conclusion_holds: t <= c * tol,
    })
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub total_commutator: f64,
    pub system_commutator: f64,
    pub apparatus_commutator: f64,
    pub precondition_holds: bool,
    pub conclusion_holds: bool,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        !self.precondition_holds || self.conclusion_holds
    }
}

pub fn persistence_under_reduction(rho: &DensityMatrix, charge: &AdditiveCharge, tol: f64) -> Result<ReductionReport> {
    require_dims(rho, charge.total_dim(), "joint state")?;
    let c = propagation_constant(charge.total_dim());
    let dims = charge.dims();
    let t = rho.matrix().commutator(&charge.q_total).hs_norm();
    let rs = partial_trace(rho.matrix(), dims, Subsystem::Second)?;
    let ra = partial_trace(rho.matrix(), dims, Subsystem::First)?;
    let s = rs.commutator(&charge.q_s).hs_norm();
    let a = ra.commutator(&charge.q_a).hs_norm();
    Ok(ReductionReport {
        total_commutator: t,
        system_commutator: s,
        apparatus_commutator: a,
        precondition_holds: t <= tol,
        conclusion_holds: s <= c * tol && a <= c * tol,
    })
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub hamiltonian_commutator: f64,
    pub initial_commutator: f64,
    pub evolved_commutator: f64,
    pub precondition_holds: bool,
    pub conclusion_holds: bool,
    pub evolved: ComplexMatrix,
}

impl EvolutionReport {
    pub fn passed(&self) -> bool {
        !self.precondition_holds || self.conclusion_holds
    }
}

/// `e^{-iHt}` for Hermitian `H`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, HERMITIAN_TOL)?;
    Ok(eig.map_spectrum(|lam| Complex64::from_polar(1.0, -lam * t)))
}

/// Evolves `rho` under a charge-conserving Hamiltonian. A Hamiltonian that
/// fails to commute with `Q_total` within `tol` is rejected.
pub fn persistence_under_evolution(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    charge: &AdditiveCharge,
    t: f64,
    tol: f64,
) -> Result<EvolutionReport> {
    require_dims(rho, charge.total_dim(), "joint state")?;
    if h.shape() != charge.q_total.shape() {
        return Err(Error::ShapeMismatch(format!(
            "Hamiltonian of shape {:?} on a {}-dimensional space",
            h.shape(),
            charge.total_dim()
        )));
    }
    let hc = h.commutator(&charge.q_total).hs_norm();
    if !(hc <= tol) {
        return Err(Error::NotConserving { commutator: hc });
    }
    let u = unitary_propagator(h, t)?;
    let evolved = u.matmul(rho.matrix()).matmul(&u.adjoint());
    let c = propagation_constant(charge.total_dim());
    let r0 = rho.matrix().commutator(&charge.q_total).hs_norm();
    let rt = evolved.commutator(&charge.q_total).hs_norm();
    Ok(EvolutionReport {
        hamiltonian_commutator: hc,
        initial_commutator: r0,
        evolved_commutator: rt,
        precondition_holds: r0 <= tol,
        conclusion_holds: rt <= c * tol,
        evolved,
    })
}

/// `||[P, Q_S]||_HS`; zero means nothing forbids an exact measurement of `P`.
pub fn way_obstruction(p: &ComplexMatrix, q_s: &ComplexMatrix) -> Result<f64> {
    if p.shape() != q_s.shape() || !p.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "observable {:?} against charge {:?}",
            p.shape(),
            q_s.shape()
        )));
    }
    for m in [p, q_s] {
        let defect = m.hermiticity_defect();
        if !(defect <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { defect });
        }
    }
    Ok(p.commutator(q_s).hs_norm())
}

/// `max_n ||U (s_n (x) a_0) - s_n (x) a_n||`.
pub fn pointer_map_residual(
    u: &ComplexMatrix,
    system_states: &[Vec<Complex64>],
    pointer_states: &[Vec<Complex64>],
    neutral: &[Complex64],
) -> f64 {
    system_states
        .iter()
        .zip(pointer_states)
        .map(|(s, a)| {
            let lhs = u.apply(&kron_vec(s, neutral));
            let rhs = kron_vec(s, a);
            let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
            vnorm(&diff)
        })
        .fold(0.0, f64::max)
}

fn check_unit(v: &[Complex64], what: &str) -> Result<()> {
    let norm = vnorm(v);
    if !norm.is_finite() {
        return Err(Error::NonFinite("state vector"));
    }
    if (norm - 1.0).abs() > MODEL_TOL {
        return Err(Error::InvalidInput(format!("{what} has norm {norm}")));
    }
    Ok(())
}

fn check_orthonormal(states: &[Vec<Complex64>], dim: usize) -> Result<()> {
    for (i, s) in states.iter().enumerate() {
        if s.len() != dim {
            return Err(Error::ShapeMismatch(format!("system state {i} has length {}, expected {dim}", s.len())));
        }
        for (j, t) in states.iter().enumerate().take(i + 1) {
            let target = if i == j { 1.0 } else { 0.0 };
            let g = (vdot(t, s) - target).norm();
            if g > MODEL_TOL {
                return Err(Error::InvalidInput(format!(
                    "system states {j} and {i} are not orthonormal (Gram defect {g:.3e})"
                )));
            }
        }
    }
    Ok(())
}

/// First pair `(n, m)` whose pointers coincide.
fn coinciding_pointers(pointers: &[Vec<Complex64>]) -> Option<(usize, usize, f64)> {
    for n in 0..pointers.len() {
        for m in n + 1..pointers.len() {
            let ov = vdot(&pointers[n], &pointers[m]).norm();
            if ov >= 1.0 - POINTER_COINCIDENCE {
                return Some((n, m, ov));
            }
        }
    }
    None
}

/// A von Neumann measurement of `P` by a pointer shift.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    observable: ComplexMatrix,
    system_states: Vec<Vec<Complex64>>,
    eigenvalues: Vec<f64>,
    pointer_states: Vec<Vec<Complex64>>,
    neutral_pointer: Vec<Complex64>,
    unitary: ComplexMatrix,
    pointer_map_residual: f64,
}

impl MeasurementModel {
    pub fn new(
        observable: ComplexMatrix,
        system_states: Vec<Vec<Complex64>>,
        pointer_states: Vec<Vec<Complex64>>,
        neutral_pointer: Vec<Complex64>,
        unitary: ComplexMatrix,
    ) -> Result<Self> {
        if !observable.is_square() {
            return Err(Error::NotSquare {
                rows: observable.rows(),
                cols: observable.cols(),
            });
        }
        let defect = observable.hermiticity_defect();
        if !(defect <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { defect });
        }
        let ds = observable.rows();
        let da = neutral_pointer.len();
        if system_states.is_empty() {
            return Err(Error::InvalidInput("no system states".into()));
        }
        if system_states.len() != pointer_states.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} system states but {} pointer states",
                system_states.len(),
                pointer_states.len()
            )));
        }
        if unitary.shape() != (ds * da, ds * da) {
            return Err(Error::ShapeMismatch(format!(
                "unitary {:?} on a {ds}x{da} product space",
                unitary.shape()
            )));
        }
        check_orthonormal(&system_states, ds)?;
        check_unit(&neutral_pointer, "neutral pointer")?;
        for (i, a) in pointer_states.iter().enumerate() {
            if a.len() != da {
                return Err(Error::ShapeMismatch(format!("pointer state {i} has length {}", a.len())));
            }
            check_unit(a, "pointer state")?;
        }
        let mut eigenvalues = Vec::with_capacity(system_states.len());
        for (i, s) in system_states.iter().enumerate() {
            let ps = observable.apply(s);
            let p = vdot(s, &ps).re;
            let diff: Vec<Complex64> = ps.iter().zip(s).map(|(x, y)| x - y * p).collect();
            let r = vnorm(&diff);
            if r > MODEL_TOL * observable.max_abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "system state {i} is not an eigenvector of the observable (residual {r:.3e})"
                )));
            }
            eigenvalues.push(p);
        }
        let ud = unitary.unitarity_defect();
        if !(ud <= MODEL_TOL) {
            return Err(Error::NotUnitary { defect: ud });
        }
        if let Some((n, m, overlap)) = coinciding_pointers(&pointer_states) {
            return Err(Error::NotAMeasurement { n, m, overlap });
        }
        let residual = pointer_map_residual(&unitary, &system_states, &pointer_states, &neutral_pointer);
        if !(residual <= MODEL_TOL) {
            return Err(Error::InvalidInput(format!(
                "unitary does not shift the pointer as required (residual {residual:.3e})"
            )));
        }
        Ok(Self {
            observable,
            system_states,
            eigenvalues,
            pointer_states,
            neutral_pointer,
            unitary,
            pointer_map_residual: residual,
        })
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }

    pub fn system_states(&self) -> &[Vec<Complex64>] {
        &self.system_states
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn pointer_states(&self) -> &[Vec<Complex64>] {
        &self.pointer_states
    }

    pub fn neutral_pointer(&self) -> &[Complex64] {
        &self.neutral_pointer
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn pointer_map_residual(&self) -> f64 {
        self.pointer_map_residual
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.observable.rows(), self.neutral_pointer.len())
    }
}

/// How the unitary is fixed off the `s_n (x) a_0` slice.
#[derive(Debug, Clone)]
pub enum Completion {
    /// Pair the Gram-Schmidt complements of domain and image (standard
    /// basis order).
    Canonical,
    /// Best charge-conserving unitary in least squares: one orthogonal
    /// Procrustes problem per eigenspace of the given charge.
    ConservingLeastSquares(ComplexMatrix),
}

#[derive(Debug, Clone)]
pub struct BuiltUnitary {
    pub unitary: ComplexMatrix,
    /// `max_n ||U (s_n (x) a_0) - s_n (x) a_n||`.
    pub pointer_map_residual: f64,
    /// `||[U, Q]||_HS` against the completion charge; `None` for the
    /// canonical strategy.
    pub commutator: Option<f64>,
}

pub fn build_measurement_unitary(
    system_states: &[Vec<Complex64>],
    pointer_states: &[Vec<Complex64>],
    neutral_pointer: &[Complex64],
    completion: &Completion,
) -> Result<BuiltUnitary> {
    let Some(first) = system_states.first() else {
        return Err(Error::InvalidInput("no system states".into()));
    };
    if system_states.len() != pointer_states.len() {
        return Err(Error::ShapeMismatch("system and pointer state counts differ".into()));
    }
    let ds = first.len();
    let da = neutral_pointer.len();
    let n = ds * da;
    check_orthonormal(system_states, ds)?;
    check_unit(neutral_pointer, "neutral pointer")?;
    for a in pointer_states {
        if a.len() != da {
            return Err(Error::ShapeMismatch("pointer states differ in length".into()));
        }
        check_unit(a, "pointer state")?;
    }
    let domain: Vec<Vec<Complex64>> = system_states.iter().map(|s| kron_vec(s, neutral_pointer)).collect();
    let image: Vec<Vec<Complex64>> = system_states
        .iter()
        .zip(pointer_states)
        .map(|(s, a)| kron_vec(s, a))
        .collect();
    // with orthonormal s_n the images are orthonormal; check anyway
    for (i, x) in image.iter().enumerate() {
        for (j, y) in image.iter().enumerate().take(i + 1) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (vdot(y, x) - target).norm() > 1e-10 {
                return Err(Error::InvalidInput(format!("image vectors {j} and {i} are linearly dependent")));
            }
        }
    }

    match completion {
        Completion::Canonical => {
            let dc = complete_orthonormal(&domain, n);
            let ic = complete_orthonormal(&image, n);
            let mut u = ComplexMatrix::zeros(n, n);
            for (x, y) in domain.iter().chain(&dc).zip(image.iter().chain(&ic)) {
                u += &ComplexMatrix::outer(y, x);
            }
            let residual = pointer_map_residual(&u, system_states, pointer_states, neutral_pointer);
            Ok(BuiltUnitary {
                unitary: u,
                pointer_map_residual: residual,
                commutator: None,
            })
        }
        Completion::ConservingLeastSquares(q) => {
            if q.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!("charge {:?} on a {n}-dimensional space", q.shape())));
            }
            let mut u = ComplexMatrix::zeros(n, n);
            for (_, block) in eigenspaces(q)? {
                let d = block.len();
                let b = ComplexMatrix::from_columns(n, &block);
                let bh = b.adjoint();
                // M = sum_k (B^dagger y_k)(B^dagger x_k)^dagger
                let mut m = ComplexMatrix::zeros(d, d);
                for (x, y) in domain.iter().zip(&image) {
                    m += &ComplexMatrix::outer(&bh.apply(y), &bh.apply(x));
                }
                let dec = svd(&m)?;
                let uq = dec.u.matmul(&dec.v.adjoint());
                u += &b.matmul(&uq).matmul(&bh);
            }
            let residual = pointer_map_residual(&u, system_states, pointer_states, neutral_pointer);
            Ok(BuiltUnitary {
                commutator: Some(u.commutator(q).hs_norm()),
                unitary: u,
                pointer_map_residual: residual,
            })
        }
    }
}

/// The five members of the chain for one pair `n != m`.
#[derive(Debug, Clone)]
pub struct PairChain {
    pub n: usize,
    pub m: usize,
    pub eigenvalue_gap: f64,
    pub pointer_overlap: Complex64,
    /// `(p_n - p_m) <s_n|Q_S|s_m>`, then the same through `Q` on
    /// `|s a_0>`, through `U^dagger Q U`, through `Q` on the shifted pointers,
    /// and finally `<a_n|a_m> (p_n - p_m) <s_n|Q_S|s_m>`.
    pub expressions: [Complex64; 5],
    pub max_disagreement: f64,
    /// `<s_n|Q_S|s_m>`.
    pub charge_element: Complex64,
    /// Both eigenvalues differ and the pointers are resolved.
    pub resolved: bool,
    pub conclusion_holds: bool,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub conservation_commutator: f64,
    pub unitarity_defect: f64,
    pub pointer_map_residual: f64,
    pub pairs: Vec<PairChain>,
    pub chain_consistent: bool,
    /// `Q_S` has no matrix elements between resolved eigenvectors of `P`
    /// with different eigenvalues.
    pub block_diagonal: bool,
    pub obstruction: f64,
    /// Whether the block verdict matches `||[P, Q_S]||`; `None` when the
    /// system states do not span the system or some pair is unresolved.
    pub cross_check: Option<bool>,
    pub bound: f64,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.chain_consistent && self.block_diagonal && self.cross_check != Some(false)
    }
}

/// Evaluates the chain of equalities for every pair of system states and
/// the conclusion drawn from it. `margin` is the distance from overlap 1
/// a pointer pair needs before it counts as resolved.
pub fn verify_way_theorem(
    model: &MeasurementModel,
    charge: &AdditiveCharge,
    tol: f64,
    margin: f64,
) -> Result<TheoremReport> {
    const CHAIN_TOL: f64 = 1e-8;
    if model.dims() != charge.dims() {
        return Err(Error::ShapeMismatch(format!(
            "model on {:?} but charge on {:?}",
            model.dims(),
            charge.dims()
        )));
    }
    let u = &model.unitary;
    let q = &charge.q_total;
    let comm = u.commutator(q).hs_norm();
    if !(comm <= tol) {
        return Err(Error::NotConserving { commutator: comm });
    }
    if let Some((n, m, overlap)) = coinciding_pointers(&model.pointer_states) {
        return Err(Error::NotAMeasurement { n, m, overlap });
    }
    let c = propagation_constant(charge.total_dim());
    let bound = c * tol;
    let uqu = u.adjoint().matmul(q).matmul(u);
    let a0 = &model.neutral_pointer;
    let gap_floor = 1e-12 * model.observable.max_abs().max(1.0);

    let k = model.system_states.len();
    let mut pairs = Vec::with_capacity(k * k.saturating_sub(1));
    for n in 0..k {
        for m in 0..k {
            if n == m {
                continue;
            }
            let (sn, sm) = (&model.system_states[n], &model.system_states[m]);
            let (an, am) = (&model.pointer_states[n], &model.pointer_states[m]);
            let d = model.eigenvalues[n] - model.eigenvalues[m];
            let qs = vdot(sn, &charge.q_s.apply(sm));
            let ov = vdot(an, am);
            let bra0 = kron_vec(sn, a0);
            let ket0 = kron_vec(sm, a0);
            let e = [
                qs * d,
                vdot(&bra0, &q.apply(&ket0)) * d,
                vdot(&bra0, &uqu.apply(&ket0)) * d,
                vdot(&kron_vec(sn, an), &q.apply(&kron_vec(sm, am))) * d,
                ov * qs * d,
            ];
            let mut worst: f64 = 0.0;
            for i in 0..5 {
                for j in i + 1..5 {
                    worst = worst.max((e[i] - e[j]).norm());
                }
            }
            let resolved = d.abs() > gap_floor && ov.norm() < 1.0 - margin;
            pairs.push(PairChain {
                n,
                m,
                eigenvalue_gap: d,
                pointer_overlap: ov,
                expressions: e,
                max_disagreement: worst,
                charge_element: qs,
                resolved,
                conclusion_holds: !resolved || qs.norm() <= bound,
            });
        }
    }
    let chain_consistent = pairs.iter().all(|p| p.max_disagreement <= CHAIN_TOL);
    let block_diagonal = pairs.iter().all(|p| p.conclusion_holds);
    let obstruction = way_obstruction(&model.observable, &charge.q_s)?;
    let spans = k == charge.dim_s;
    let all_resolved = pairs
        .iter()
        .all(|p| p.resolved || p.eigenvalue_gap.abs() <= gap_floor);
    let cross_check = (spans && all_resolved).then_some(block_diagonal == (obstruction <= bound));
    Ok(TheoremReport {
        conservation_commutator: comm,
        unitarity_defect: u.unitarity_defect(),
        pointer_map_residual: model.pointer_map_residual,
        pairs,
        chain_consistent,
        block_diagonal,
        obstruction,
        cross_check,
        bound,
    })
}

/// A charge-conserving measurement model built from random data.
///
/// `Q_S` has small integer eigenvalues in a random basis, `P` is diagonal in
/// a random eigenbasis of `Q_S` with a simple spectrum, and the pointers are
/// random unit vectors inside one degenerate eigenspace of `Q_A`. The
/// unitary is the conserving least-squares completion, which is exact here.
pub fn random_conserving_model(dim_s: usize, dim_a: usize, seed: u64) -> Result<(MeasurementModel, AdditiveCharge)> {
    if dim_s == 0 || dim_a < 2 {
        return Err(Error::InvalidInput("need dim_s >= 1 and dim_a >= 2".into()));
    }
    let mut rng: SeededRng = random::rng(seed);
    let charges: Vec<f64> = (0..dim_s).map(|_| rng.random_range(-1i32..=1) as f64).collect();
    let v = random::random_unitary(&mut rng, dim_s);
    let q_s = v
        .matmul(&ComplexMatrix::from_real_diagonal(&charges))
        .matmul(&v.adjoint())
        .hermitian_part();

    // mix eigenvectors within each charge value
    let mut system_states = vec![Vec::new(); dim_s];
    for value in [-1.0, 0.0, 1.0] {
        let idx: Vec<usize> = (0..dim_s).filter(|&i| charges[i] == value).collect();
        if idx.is_empty() {
            continue;
        }
        let w = random::random_unitary(&mut rng, idx.len());
        for (col, _) in idx.iter().enumerate() {
            let mut s = vec![Complex64::new(0.0, 0.0); dim_s];
            for (row, &i) in idx.iter().enumerate() {
                let coef = w[(row, col)];
                for (r, entry) in s.iter_mut().enumerate() {
                    *entry += v[(r, i)] * coef;
                }
            }
            system_states[idx[col]] = s;
        }
    }
    let eigenvalues: Vec<f64> = (0..dim_s).map(|_| random::normal(&mut rng)).collect();
    let mut p = ComplexMatrix::zeros(dim_s, dim_s);
    for (s, &lam) in system_states.iter().zip(&eigenvalues) {
        p += &ComplexMatrix::outer(s, s).scale_real(lam);
    }
    let p = p.hermitian_part();

    // pointer eigenspace: the first `k` columns of a random basis
    let k = if dim_a > 2 { rng.random_range(2..=dim_a) } else { 2 };
    let va = random::random_unitary(&mut rng, dim_a);
    let a_charges: Vec<f64> = (0..dim_a)
        .map(|i| if i < k { 0.0 } else { rng.random_range(1i32..=2) as f64 })
        .collect();
    let q_a = va
        .matmul(&ComplexMatrix::from_real_diagonal(&a_charges))
        .matmul(&va.adjoint())
        .hermitian_part();
    let mut in_pointer_space = || {
        let c = random::random_unit_vector(&mut rng, k);
        (0..dim_a)
            .map(|r| (0..k).map(|j| va[(r, j)] * c[j]).sum::<Complex64>())
            .collect::<Vec<_>>()
    };
    let neutral = in_pointer_space();
    let pointers: Vec<Vec<Complex64>> = (0..dim_s).map(|_| in_pointer_space()).collect();

    let charge = AdditiveCharge::compose(q_s, q_a)?;
    let built = build_measurement_unitary(
        &system_states,
        &pointers,
        &neutral,
        &Completion::ConservingLeastSquares(charge.q_total.clone()),
    )?;
    let model = MeasurementModel::new(p, system_states, pointers, neutral, built.unitary)?;
    Ok((model, charge))
}

/// Qubit system measured in the `sigma_z` basis by a qutrit apparatus with
/// charge `diag(1, 1, -1)`: pointers `|0>`, `|1>` share a charge value, so
/// the controlled pointer shift conserves `sigma_z (x) I + I (x) Q_A`.
pub fn sigma_z_qutrit_model() -> (MeasurementModel, AdditiveCharge) {
    use crate::kernel::pauli;
    let e = |n: usize, k: usize| {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        v
    };
    let charge = AdditiveCharge::compose(pauli::z(), ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0]))
        .expect("hermitian charges");
    let s = vec![e(2, 0), e(2, 1)];
    let a = vec![e(3, 0), e(3, 1)];
    let built = build_measurement_unitary(&s, &a, &e(3, 0), &Completion::Canonical).expect("valid data");
    let model = MeasurementModel::new(pauli::z(), s, a, e(3, 0), built.unitary).expect("valid model");
    (model, charge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pauli;

    fn e(n: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn swap() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
    }

    fn zz() -> AdditiveCharge {
        AdditiveCharge::compose(pauli::z(), pauli::z()).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert!(zz()
            .q_total()
            .approx_eq(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]), 1e-15));
        let q = AdditiveCharge::compose(pauli::z(), ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(q.q_total().approx_eq(&kron(&pauli::z(), &ComplexMatrix::identity(3)), 1e-15));
        let q = AdditiveCharge::compose(ComplexMatrix::identity(2), ComplexMatrix::identity(2)).unwrap();
        assert!(q.q_total().approx_eq(&ComplexMatrix::identity(4).scale_real(2.0), 1e-15));
        let bad = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            AdditiveCharge::compose(bad, pauli::z()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn total_spectrum_is_pairwise_sums() {
        let q = AdditiveCharge::compose(
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            ComplexMatrix::from_real_diagonal(&[-1.0, 0.5, 3.0]),
        )
        .unwrap();
        let mut expected: Vec<f64> = [0.0, 1.0]
            .iter()
            .flat_map(|a| [-1.0, 0.5, 3.0].map(|b| a + b))
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = hermitian_eig(q.q_total(), 1e-12).unwrap().values;
        for (g, x) in got.iter().zip(&expected) {
            assert!((g - x).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_reports() {
        let q = zz();
        let d = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        let r = persistence_under_composition(&d, &d, &q, 1e-9).unwrap();
        assert!(r.precondition_holds && r.total_commutator == 0.0 && r.passed());

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[c(s), c(s)]).unwrap();
        let r = persistence_under_composition(&plus, &d, &q, 1e-9).unwrap();
        assert!(!r.precondition_holds);
        assert!((r.system_commutator - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.total_commutator > 0.1);

        let mixed = DensityMatrix::maximally_mixed(2);
        let r = persistence_under_composition(&mixed, &mixed, &q, 1e-9).unwrap();
        assert_eq!(r.system_commutator + r.apparatus_commutator + r.total_commutator, 0.0);
    }

    #[test]
    fn reduction_reports() {
        let q = zz();
        // Bell-diagonal mixture of |01> +- |10>, both charge 0
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(0.0), c(s), c(s), c(0.0)];
        let phi = [c(0.0), c(s), c(-s), c(0.0)];
        let rho = (&ComplexMatrix::outer(&psi, &psi).scale_real(0.6) + &ComplexMatrix::outer(&phi, &phi).scale_real(0.4))
            .hermitian_part();
        let rho = DensityMatrix::new(rho).unwrap();
        let r = persistence_under_reduction(&rho, &q, 1e-9).unwrap();
        assert!(r.precondition_holds && r.passed());
        assert!(r.system_commutator <= 1e-12 && r.apparatus_commutator <= 1e-12);

        let prod = DensityMatrix::pure(&e(4, 1)).unwrap();
        let r = persistence_under_reduction(&prod, &q, 1e-9).unwrap();
        assert_eq!(r.system_commutator + r.apparatus_commutator, 0.0);

        let r = persistence_under_reduction(&DensityMatrix::maximally_mixed(4), &q, 1e-9).unwrap();
        assert_eq!(r.total_commutator + r.system_commutator + r.apparatus_commutator, 0.0);
    }

    #[test]
    fn evolution_reports() {
        let q = zz();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(0.0), c(s), c(0.0), c(s)];
        let start = DensityMatrix::new(q.pinch(&ComplexMatrix::outer(&psi, &psi)).unwrap()).unwrap();
        for t in [0.0, 0.3, 2.0] {
            let r = persistence_under_evolution(&start, q.q_total(), &q, t, 1e-9).unwrap();
            assert!(r.passed() && r.precondition_holds);
        }
        assert!(swap().commutator(q.q_total()).hs_norm() == 0.0);
        let r = persistence_under_evolution(&start, &swap(), &q, 1.1, 1e-9).unwrap();
        assert!(r.evolved_commutator <= 1e-9);
        let h = kron(&pauli::x(), &ComplexMatrix::identity(2));
        assert!(matches!(
            persistence_under_evolution(&start, &h, &q, 1.0, 1e-9),
            Err(Error::NotConserving { .. })
        ));
    }

    #[test]
    fn obstruction_examples() {
        assert_eq!(way_obstruction(&pauli::z(), &pauli::z()).unwrap(), 0.0);
        let v = way_obstruction(&pauli::x(), &pauli::z()).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(way_obstruction(&ComplexMatrix::identity(2), &pauli::y()).unwrap(), 0.0);
    }

    #[test]
    fn canonical_completion_is_cnot_for_orthogonal_pointers() {
        let s = vec![e(2, 0), e(2, 1)];
        let a = vec![e(2, 0), e(2, 1)];
        let b = build_measurement_unitary(&s, &a, &e(2, 0), &Completion::Canonical).unwrap();
        let cnot = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert!(b.unitary.approx_eq(&cnot, 1e-14));
        assert!(b.pointer_map_residual < 1e-14);
    }

    #[test]
    fn trivial_pointers_give_identity() {
        let s = vec![e(2, 0), e(2, 1)];
        let a = vec![e(2, 0), e(2, 0)];
        let b = build_measurement_unitary(&s, &a, &e(2, 0), &Completion::Canonical).unwrap();
        assert!(b.unitary.approx_eq(&ComplexMatrix::identity(4), 1e-14));
    }

    #[test]
    fn non_orthogonal_pointers_still_unitary() {
        let s = vec![e(2, 0), e(2, 1)];
        let a = vec![e(2, 0), vec![c(0.6), c(0.8)]];
        let b = build_measurement_unitary(&s, &a, &e(2, 0), &Completion::Canonical).unwrap();
        assert!(b.unitary.unitarity_defect() <= 1e-10);
        assert!(b.pointer_map_residual <= 1e-10);
    }

    #[test]
    fn qutrit_apparatus_model_passes() {
        let (model, charge) = sigma_z_qutrit_model();
        let r = verify_way_theorem(&model, &charge, 1e-9, DEFAULT_OVERLAP_MARGIN).unwrap();
        assert!(r.conservation_commutator == 0.0);
        assert!(r.chain_consistent && r.block_diagonal);
        assert_eq!(r.cross_check, Some(true));
        for p in &r.pairs {
            assert_eq!(p.charge_element, c(0.0));
        }
    }

    #[test]
    fn qubit_apparatus_cnot_does_not_conserve() {
        let s = vec![e(2, 0), e(2, 1)];
        let b = build_measurement_unitary(&s, &s, &e(2, 0), &Completion::Canonical).unwrap();
        let model = MeasurementModel::new(pauli::z(), s.clone(), s, e(2, 0), b.unitary).unwrap();
        assert!(matches!(
            verify_way_theorem(&model, &zz(), 1e-9, DEFAULT_OVERLAP_MARGIN),
            Err(Error::NotConserving { .. })
        ));
    }

    #[test]
    fn sigma_x_measurement_is_infeasible() {
        let q = AdditiveCharge::compose(pauli::z(), ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0])).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = vec![vec![c(r), c(r)], vec![c(r), c(-r)]];
        let a = vec![e(3, 0), e(3, 1)];
        let b = build_measurement_unitary(&s, &a, &e(3, 0), &Completion::ConservingLeastSquares(q.q_total().clone()))
            .unwrap();
        assert!(b.commutator.unwrap() < 1e-12);
        assert!(b.unitary.unitarity_defect() < 1e-10);
        assert!(b.pointer_map_residual > 0.1, "{}", b.pointer_map_residual);
    }

    #[test]
    fn zero_charge_is_vacuous() {
        let s = vec![e(2, 0), e(2, 1)];
        let a = vec![e(2, 0), vec![c(0.6), c(0.8)]];
        let b = build_measurement_unitary(&s, &a, &e(2, 0), &Completion::Canonical).unwrap();
        let model = MeasurementModel::new(pauli::z(), s, a, e(2, 0), b.unitary).unwrap();
        let q = AdditiveCharge::compose(ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2)).unwrap();
        let r = verify_way_theorem(&model, &q, 1e-9, DEFAULT_OVERLAP_MARGIN).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn coinciding_pointers_rejected() {
        let s = vec![e(2, 0), e(2, 1)];
        let a = vec![e(2, 0), e(2, 0)];
        let u = ComplexMatrix::identity(4);
        assert!(matches!(
            MeasurementModel::new(pauli::z(), s, a, e(2, 0), u),
            Err(Error::NotAMeasurement { n: 0, m: 1, .. })
        ));
    }

    #[test]
    fn random_models_conserve_and_pass() {
        for seed in 0..20 {
            let (model, charge) = random_conserving_model(3, 3, seed).unwrap();
            let r = verify_way_theorem(&model, &charge, 1e-9, DEFAULT_OVERLAP_MARGIN).unwrap();
            assert!(r.passed(), "seed {seed}");
            assert!(r.pairs.iter().all(|p| p.max_disagreement < 1e-8));
        }
    }
}
