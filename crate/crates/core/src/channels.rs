//! Operations restricted by a symmetry: Kraus-form maps, CPTP checks,
//! covariance under a finite unitary group, twirling, and the invariant
//! projection onto the commutant of the group.

use num_complex::Complex64;

use crate::algebra::{commutant, OperatorAlgebra};
use crate::error::{Error, Result};
use crate::kernel::random::{self, SeededRng};
use crate::kernel::{hermitian_eig, kron, pauli, svd, ComplexMatrix};
use crate::projective::{s3_standard_rep, FiniteGroup};
use crate::sectors::{sectors_from_algebra, DensityMatrix, SectorDecomposition};

/// Trace-preservation and positivity tolerance.
pub const CHANNEL_TOL: f64 = 1e-9;

/// A linear map `rho -> sum_j w_j K_j rho K_j^dagger`.
///
/// Weights default to 1, which is the ordinary Kraus form. Signed weights
/// describe Hermiticity-preserving maps that are not completely positive,
/// such as the transpose; they exist so such maps can be tested.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl QuantumChannel {
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let w = vec![1.0; kraus.len()];
        Self::weighted(kraus, w)
    }

    pub fn weighted(kraus: Vec<ComplexMatrix>, weights: Vec<f64>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidInput("empty Kraus set".into()));
        };
        let (dim_out, dim_in) = first.shape();
        if weights.len() != kraus.len() {
            return Err(Error::ShapeMismatch(format!("{} weights for {} Kraus operators", weights.len(), kraus.len())));
        }
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator of shape {:?}, expected {:?}",
                    k.shape(),
                    (dim_out, dim_in)
                )));
            }
            if !k.is_finite() {
                return Err(Error::NonFinite("Kraus operator"));
            }
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("Kraus weight"));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            weights,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::identity(n)]).expect("identity")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let defect = u.unitarity_defect();
        if !(defect <= 1e-10) {
            return Err(Error::NotUnitary { defect });
        }
        Self::from_kraus(vec![u])
    }

    /// Complete dephasing in the computational basis.
    pub fn dephasing(n: usize) -> Self {
        Self::from_kraus((0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect()).expect("dephasing")
    }

    /// `rho -> (1 - p) rho + p I/n`, written with the `n^2` Weyl operators
    /// `X^a Z^b` as Kraus operators.
    pub fn depolarizing(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let omega = |k: usize| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        let mut kraus = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut w = ComplexMatrix::zeros(n, n);
                for k in 0..n {
                    w[((k + a) % n, k)] = omega(b * k);
                }
                let weight = if a == 0 && b == 0 {
                    1.0 - p + p / (n * n) as f64
                } else {
                    p / (n * n) as f64
                };
                kraus.push(w.scale_real(weight.sqrt()));
            }
        }
        Self::from_kraus(kraus)
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidInput(format!("damping {gamma} outside [0, 1]")));
        }
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
        Self::from_kraus(vec![k0, k1])
    }

    /// Qubit transpose `(rho + X rho X - Y rho Y + Z rho Z) / 2`; not
    /// completely positive.
    pub fn transpose_map() -> Self {
        Self::weighted(
            vec![ComplexMatrix::identity(2), pauli::x(), pauli::y(), pauli::z()],
            vec![0.5, 0.5, -0.5, 0.5],
        )
        .expect("transpose")
    }

    /// Random CPTP map with `rank` Kraus operators from a random isometry.
    pub fn random(rng: &mut SeededRng, n: usize, rank: usize) -> Self {
        let g = random::gaussian_matrix(rng, n * rank, n);
        let dec = svd(&g).expect("finite gaussian matrix");
        let v = dec.u.matmul(&dec.v.adjoint());
        let kraus = (0..rank)
            .map(|j| {
                let mut k = ComplexMatrix::zeros(n, n);
                for r in 0..n {
                    for c in 0..n {
                        k[(r, c)] = v[(j * n + r, c)];
                    }
                }
                k
            })
            .collect();
        Self::from_kraus(kraus).expect("random channel")
    }

    /// `sum_j p_j U_j rho U_j^dagger` with random unitaries and weights.
    pub fn random_unitary_mixture(rng: &mut SeededRng, n: usize, terms: usize) -> Self {
        let raw: Vec<f64> = (0..terms).map(|_| random::normal(rng).abs() + 0.1).collect();
        let total: f64 = raw.iter().sum();
        let kraus = raw
            .iter()
            .map(|p| random::random_unitary(rng, n).scale_real((p / total).sqrt()))
            .collect();
        Self::from_kraus(kraus).expect("mixture")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_j w_j K_j X K_j^dagger` on any `dim_in x dim_in` matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::ShapeMismatch(format!(
                "input of shape {:?} for a channel on dimension {}",
                x.shape(),
                self.dim_in
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            out += &k.matmul(x).matmul(&k.adjoint()).scale_real(w);
        }
        out
    }

    /// `sum_ij E_ij (x) E(E_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.dim_in;
        let mut out = ComplexMatrix::zeros(n * self.dim_out, n * self.dim_out);
        for i in 0..n {
            for j in 0..n {
                let e = ComplexMatrix::unit(n, i, j);
                out += &kron(&e, &self.apply_unchecked(&e));
            }
        }
        out
    }

    /// `||sum_j w_j K_j^dagger K_j - I||_HS`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            s += &k.adjoint().matmul(k).scale_real(w);
        }
        (&s - &ComplexMatrix::identity(self.dim_in)).hs_norm()
    }

    /// Largest `||E(P) - F(P)||_HS` over matrix units `P`.
    pub fn probe_distance(&self, other: &QuantumChannel) -> Result<f64> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::ShapeMismatch("channels act between different dimensions".into()));
        }
        let n = self.dim_in;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let e = ComplexMatrix::unit(n, i, j);
                worst = worst.max((&self.apply_unchecked(&e) - &other.apply_unchecked(&e)).hs_norm());
            }
        }
        Ok(worst)
    }
}

/// The channel's output on a density matrix.
pub fn apply_channel(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = channel.apply(rho.matrix())?;
    DensityMatrix::new(out.hermitian_part())
}

#[derive(Debug, Clone)]
pub struct CptpReport {
    pub trace_defect: f64,
    pub min_choi_eigenvalue: f64,
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

impl CptpReport {
    pub fn passed(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

pub fn is_cptp(channel: &QuantumChannel, tol: f64) -> Result<CptpReport> {
    let td = channel.trace_preservation_defect();
    let eig = hermitian_eig(&channel.choi().hermitian_part(), 1e-9)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    Ok(CptpReport {
        trace_defect: td,
        min_choi_eigenvalue: min,
        trace_preserving: td <= tol,
        completely_positive: min >= -tol,
    })
}

/// A unitary representation `g -> U(g)` with trivial multiplier.
#[derive(Debug, Clone)]
pub struct UnitaryGroupRep {
    group: FiniteGroup,
    unitaries: Vec<ComplexMatrix>,
}

impl UnitaryGroupRep {
    pub fn new(group: FiniteGroup, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if unitaries.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for a group of order {}",
                unitaries.len(),
                group.order()
            )));
        }
        let n = unitaries[0].rows();
        for u in &unitaries {
            if u.shape() != (n, n) {
                return Err(Error::ShapeMismatch("representation matrices differ in shape".into()));
            }
            if !u.is_finite() {
                return Err(Error::NonFinite("representation matrix"));
            }
            let defect = u.unitarity_defect();
            if !(defect <= 1e-10) {
                return Err(Error::NotUnitary { defect });
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let defect = (&unitaries[g].matmul(&unitaries[h]) - &unitaries[group.mul(g, h)]).hs_norm();
                if defect > 1e-9 {
                    return Err(Error::NotProjective { g, h, defect });
                }
            }
        }
        Ok(Self { group, unitaries })
    }

    /// `g -> I_n`.
    pub fn trivial(group: FiniteGroup, n: usize) -> Self {
        let us = vec![ComplexMatrix::identity(n); group.order()];
        Self { group, unitaries: us }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    fn require_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "dimension {n} against a representation of dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub max_residual: f64,
    /// Group element and probe `(i, j)` attaining the maximum.
    pub worst: (usize, usize, usize),
    pub covariant: bool,
}

/// Largest `||E(U P U^dagger) - U E(P) U^dagger||_HS` over the group and
/// matrix units `P`.
pub fn is_covariant(channel: &QuantumChannel, rep: &UnitaryGroupRep, tol: f64) -> Result<CovarianceReport> {
    rep.require_dim(channel.dim_in)?;
    rep.require_dim(channel.dim_out)?;
    let n = channel.dim_in;
    let mut worst = (0.0, (0, 0, 0));
    for (g, u) in rep.unitaries.iter().enumerate() {
        let ud = u.adjoint();
        for i in 0..n {
            for j in 0..n {
                let p = ComplexMatrix::unit(n, i, j);
                let lhs = channel.apply_unchecked(&u.matmul(&p).matmul(&ud));
                let rhs = u.matmul(&channel.apply_unchecked(&p)).matmul(&ud);
                let r = (&lhs - &rhs).hs_norm();
                if r > worst.0 {
                    worst = (r, (g, i, j));
                }
            }
        }
    }
    Ok(CovarianceReport {
        max_residual: worst.0,
        worst: worst.1,
        covariant: worst.0 <= tol,
    })
}

/// `rho -> (1/|G|) sum_g U(g)^dagger E(U(g) rho U(g)^dagger) U(g)`.
pub fn twirl(channel: &QuantumChannel, rep: &UnitaryGroupRep) -> Result<QuantumChannel> {
    rep.require_dim(channel.dim_in)?;
    rep.require_dim(channel.dim_out)?;
    let scale = 1.0 / (rep.group.order() as f64).sqrt();
    let mut kraus = Vec::with_capacity(channel.kraus.len() * rep.group.order());
    let mut weights = Vec::with_capacity(kraus.capacity());
    for u in &rep.unitaries {
        let ud = u.adjoint();
        for (k, &w) in channel.kraus.iter().zip(&channel.weights) {
            kraus.push(ud.matmul(k).matmul(u).scale_real(scale));
            weights.push(w);
        }
    }
    QuantumChannel::weighted(kraus, weights)
}

/// Group average `(1/|G|) sum_g U(g) X U(g)^dagger`.
pub fn project_to_invariant(x: &ComplexMatrix, rep: &UnitaryGroupRep) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    rep.require_dim(x.rows())?;
    let n = x.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for u in &rep.unitaries {
        out += &u.matmul(x).matmul(&u.adjoint());
    }
    Ok(out.scale_real(1.0 / rep.group.order() as f64))
}

/// Largest `||[X, U(g)]||_HS`.
pub fn max_group_commutator(x: &ComplexMatrix, rep: &UnitaryGroupRep) -> f64 {
    rep.unitaries
        .iter()
        .map(|u| x.commutator(u).hs_norm())
        .fold(0.0, f64::max)
}

/// Observables are the commutant of the group; its minimal central
/// projectors are the sectors.
pub fn gauge_sectors(rep: &UnitaryGroupRep, seed: u64) -> Result<(OperatorAlgebra, SectorDecomposition)> {
    let n = rep.dim();
    let observables = commutant(n, &rep.unitaries)?;
    let sectors = sectors_from_algebra(&observables, seed, 3)?;
    Ok((observables, sectors))
}

/// A named channel and group used by tests and demos.
#[derive(Debug, Clone)]
pub struct CovarianceCase {
    pub name: &'static str,
    pub channel: QuantumChannel,
    pub rep: UnitaryGroupRep,
}

/// `Z_2` as `{I, U}` for an involution `U`.
pub fn involution_rep(u: ComplexMatrix) -> Result<UnitaryGroupRep> {
    let n = u.rows();
    UnitaryGroupRep::new(FiniteGroup::cyclic(2), vec![ComplexMatrix::identity(n), u])
}

/// `Z_n` acting by cyclic shift `|k> -> |k + 1>`.
pub fn shift_rep(n: usize) -> UnitaryGroupRep {
    let mut s = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        s[((k + 1) % n, k)] = Complex64::new(1.0, 0.0);
    }
    let mut us = vec![ComplexMatrix::identity(n)];
    for g in 1..n {
        let next = us[g - 1].matmul(&s);
        us.push(next);
    }
    UnitaryGroupRep::new(FiniteGroup::cyclic(n), us).expect("shift representation")
}

/// `Z_n` acting by `diag(w^{gk})`, `w = e^{2 pi i / n}`.
pub fn clock_rep(n: usize) -> UnitaryGroupRep {
    let us = crate::projective::cyclic_clock_rep(n).unitaries().to_vec();
    UnitaryGroupRep::new(FiniteGroup::cyclic(n), us).expect("clock representation")
}

/// Klein group on two qubits: `{II, XX, ZZ, -YY}`.
pub fn klein_two_qubit_rep() -> UnitaryGroupRep {
    let xx = kron(&pauli::x(), &pauli::x());
    let zz = kron(&pauli::z(), &pauli::z());
    let yy = kron(&pauli::y(), &pauli::y()).scale_real(-1.0);
    UnitaryGroupRep::new(FiniteGroup::klein_four(), vec![ComplexMatrix::identity(4), xx, zz, yy])
        .expect("Klein representation")
}

pub fn s3_rep() -> UnitaryGroupRep {
    let p = s3_standard_rep();
    UnitaryGroupRep::new(p.group().clone(), p.unitaries().to_vec()).expect("S3 irrep is proper")
}

pub fn covariance_corpus(seed: u64) -> Vec<CovarianceCase> {
    let mut rng = random::rng(seed);
    vec![
        CovarianceCase {
            name: "dephasing/hadamard",
            channel: QuantumChannel::dephasing(2),
            rep: involution_rep(pauli::hadamard()).expect("H is an involution"),
        },
        CovarianceCase {
            name: "dephasing3/shift",
            channel: QuantumChannel::dephasing(3),
            rep: shift_rep(3),
        },
        CovarianceCase {
            name: "amplitude-damping/phase-flip",
            channel: QuantumChannel::amplitude_damping(0.3).expect("valid damping"),
            rep: involution_rep(pauli::z()).expect("Z is an involution"),
        },
        CovarianceCase {
            name: "unitary-mixture/s3",
            channel: QuantumChannel::random_unitary_mixture(&mut rng, 2, 3),
            rep: s3_rep(),
        },
        CovarianceCase {
            name: "random-kraus/klein",
            channel: QuantumChannel::random(&mut rng, 4, 3),
            rep: klein_two_qubit_rep(),
        },
        CovarianceCase {
            name: "depolarizing/clock4",
            channel: QuantumChannel::depolarizing(4, 0.4).expect("valid probability"),
            rep: clock_rep(4),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(s), c(s)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let rho = plus();
        let out = apply_channel(&QuantumChannel::identity(2), &rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
        let out = apply_channel(&QuantumChannel::dephasing(2), &rho).unwrap();
        assert!(out.matrix().approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
        let h = pauli::hadamard();
        let out = apply_channel(&QuantumChannel::unitary(h.clone()).unwrap(), &rho).unwrap();
        assert!(out
            .matrix()
            .approx_eq(&h.matmul(rho.matrix()).matmul(&h.adjoint()), 1e-15));
        assert!(QuantumChannel::identity(3).apply(rho.matrix()).is_err());
    }

    #[test]
    fn cptp_examples() {
        let r = is_cptp(&QuantumChannel::identity(2), CHANNEL_TOL).unwrap();
        assert!(r.passed() && r.trace_defect == 0.0);
        let r = is_cptp(
            &QuantumChannel::from_kraus(vec![ComplexMatrix::identity(2).scale_real(2.0)]).unwrap(),
            CHANNEL_TOL,
        )
        .unwrap();
        assert!(!r.trace_preserving);
        let t = QuantumChannel::transpose_map();
        let sample = ComplexMatrix::from_rows(&[
            vec![c(0.3), Complex64::new(0.1, 0.2)],
            vec![Complex64::new(0.4, -0.5), c(0.7)],
        ]);
        assert!(t.apply(&sample).unwrap().approx_eq(&sample.transpose(), 1e-15));
        let r = is_cptp(&t, CHANNEL_TOL).unwrap();
        assert!(r.trace_preserving && !r.completely_positive);
        assert!((r.min_choi_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn named_channels_are_cptp() {
        let mut rng = random::rng(0);
        for ch in [
            QuantumChannel::depolarizing(3, 0.7).unwrap(),
            QuantumChannel::amplitude_damping(0.5).unwrap(),
            QuantumChannel::random(&mut rng, 3, 2),
            QuantumChannel::random_unitary_mixture(&mut rng, 3, 4),
        ] {
            assert!(is_cptp(&ch, CHANNEL_TOL).unwrap().passed());
        }
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[
            &[0.5, 0.2, 0.0],
            &[0.2, 0.3, 0.1],
            &[0.0, 0.1, 0.2],
        ]))
        .unwrap();
        let full = QuantumChannel::depolarizing(3, 1.0).unwrap();
        let out = apply_channel(&full, &rho).unwrap();
        assert!(out.matrix().approx_eq(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0), 1e-12));
    }

    #[test]
    fn covariance_examples() {
        let rep = shift_rep(3);
        assert!(is_covariant(&QuantumChannel::identity(3), &rep, CHANNEL_TOL).unwrap().covariant);
        assert!(is_covariant(&QuantumChannel::dephasing(3), &rep, CHANNEL_TOL).unwrap().covariant);
        let h = involution_rep(pauli::hadamard()).unwrap();
        let r = is_covariant(&QuantumChannel::dephasing(2), &h, CHANNEL_TOL).unwrap();
        assert!(!r.covariant && r.max_residual > 0.1);
    }

    #[test]
    fn twirl_contract_on_corpus() {
        for case in covariance_corpus(5) {
            let t = twirl(&case.channel, &case.rep).unwrap();
            assert!(is_cptp(&t, CHANNEL_TOL).unwrap().passed(), "{}", case.name);
            let cov = is_covariant(&t, &case.rep, CHANNEL_TOL).unwrap();
            assert!(cov.covariant, "{} {}", case.name, cov.max_residual);
            let tt = twirl(&t, &case.rep).unwrap();
            assert!(tt.probe_distance(&t).unwrap() <= 1e-9);
            if is_covariant(&case.channel, &case.rep, CHANNEL_TOL).unwrap().covariant {
                assert!(t.probe_distance(&case.channel).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn twirl_matches_brute_force_average() {
        let mut rng = random::rng(8);
        let v = random::random_unitary(&mut rng, 2);
        let e = QuantumChannel::unitary(v).unwrap();
        let rep = s3_rep();
        let t = twirl(&e, &rep).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let p = ComplexMatrix::unit(2, i, j);
                let mut avg = ComplexMatrix::zeros(2, 2);
                for u in rep.unitaries() {
                    let inner = e.apply(&u.matmul(&p).matmul(&u.adjoint())).unwrap();
                    avg += &u.adjoint().matmul(&inner).matmul(u);
                }
                let avg = avg.scale_real(1.0 / 6.0);
                assert!(t.apply(&p).unwrap().approx_eq(&avg, 1e-12));
            }
        }
    }

    #[test]
    fn invariant_projection_examples() {
        let z2 = involution_rep(pauli::x()).unwrap();
        let p = project_to_invariant(&pauli::z(), &z2).unwrap();
        assert!(p.hs_norm() < 1e-15);
        let x = project_to_invariant(&pauli::x(), &z2).unwrap();
        assert!(x.approx_eq(&pauli::x(), 1e-15));
        let s3 = s3_rep();
        let m = ComplexMatrix::from_rows(&[vec![c(1.0), Complex64::new(2.0, 1.0)], vec![c(-0.5), c(3.0)]]);
        let p = project_to_invariant(&m, &s3).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::identity(2).scale_real(2.0), 1e-12));
    }

    #[test]
    fn gauge_sector_examples() {
        let (_, d) = gauge_sectors(&UnitaryGroupRep::trivial(FiniteGroup::cyclic(2), 3), 0).unwrap();
        assert_eq!(d.len(), 1);
        let u = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        let (_, d) = gauge_sectors(&involution_rep(u).unwrap(), 0).unwrap();
        assert_eq!(d.sector_dims(), &[2, 2]);
        assert!(d.projectors()[0].approx_eq(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]), 1e-10));
        let (alg, d) = gauge_sectors(&s3_rep(), 0).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn improper_rep_rejected() {
        let us = vec![ComplexMatrix::identity(2), pauli::x(), pauli::z(), pauli::x().matmul(&pauli::z())];
        assert!(UnitaryGroupRep::new(FiniteGroup::klein_four(), us).is_err());
    }
}
