//! Finite groups, multipliers (2-cocycles with values in U(1)) and
//! projective unitary representations, with the similarity decision that
//! tells when two representations can share one Hilbert space.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{pauli, ComplexMatrix};

/// Cocycle identity tolerance.
pub const COCYCLE_TOL: f64 = 1e-10;
/// Tolerance of `U(g) U(h) U(gh)^dagger` being scalar.
pub const SCALAR_TOL: f64 = 1e-9;
/// Agreement required of a recovered phase function.
pub const PHASE_TOL: f64 = 1e-9;
/// Largest candidate count for which the exhaustive search runs.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;
/// Node budget of the propagation search.
const SEARCH_NODE_LIMIT: usize = 1_000_000;

/// A finite group given by its multiplication table on `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the Latin-square property, associativity, the identity and
    /// inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidGroup(format!("entry {bad} out of range in row {i}")));
            }
        }
        let is_perm = |items: Vec<usize>| {
            let mut seen = vec![false; n];
            items.into_iter().all(|x| !std::mem::replace(&mut seen[x], true))
        };
        for i in 0..n {
            if !is_perm(table[i].clone()) {
                return Err(Error::InvalidGroup(format!("row {i} is not a permutation")));
            }
            if !is_perm((0..n).map(|r| table[r][i]).collect()) {
                return Err(Error::InvalidGroup(format!("column {i} is not a permutation")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity && table[h][g] == identity))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidGroup("missing inverse".into()))?;
        Ok(Self {
            order: n,
            table: table.into_iter().flatten().collect(),
            identity,
            inverses,
        })
    }

    /// `Z_n` with `g h = (g + h) mod n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect();
        Self::new(table).expect("cyclic group table")
    }

    /// `{e, a, b, ab}` as indices `0..4`; the product is bitwise xor.
    pub fn klein_four() -> Self {
        let table = (0..4).map(|g| (0..4).map(|h| g ^ h).collect()).collect();
        Self::new(table).expect("Klein table")
    }

    /// `G x H` with `(g, h)` at index `g * |H| + h`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.order, b.order);
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        Self::new(table).expect("product of groups")
    }

    /// Permutations of three points in lexicographic order, composed as
    /// `(g h)(x) = g(h(x))`.
    pub fn symmetric3() -> Self {
        let perms = s3_permutations();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| {
                        let gh = [g[h[0]], g[h[1]], g[h[2]]];
                        perms.iter().position(|p| *p == gh).expect("closed")
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("S3 table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn commutes(&self, g: usize, h: usize) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..self.order).all(|h| self.commutes(g, h)))
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }
}

fn s3_permutations() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Outcome of checking the cocycle identity on every triple.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleCheck {
    pub holds: bool,
    pub residual: f64,
    pub worst_triple: (usize, usize, usize),
}

/// `max |w(g1,g2) w(g1 g2, g3) - w(g1, g2 g3) w(g2, g3)|` over all triples.
pub fn check_cocycle(group: &FiniteGroup, values: &[Complex64]) -> Result<CocycleCheck> {
    let n = group.order();
    if values.len() != n * n {
        return Err(Error::ShapeMismatch(format!("{} multiplier values for a group of order {n}", values.len())));
    }
    let w = |g: usize, h: usize| values[g * n + h];
    let mut worst = (0.0, (0, 0, 0));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let r = (w(a, b) * w(group.mul(a, b), c) - w(a, group.mul(b, c)) * w(b, c)).norm();
                if r > worst.0 || r.is_nan() {
                    worst = (r, (a, b, c));
                }
            }
        }
    }
    Ok(CocycleCheck {
        holds: worst.0 <= COCYCLE_TOL,
        residual: worst.0,
        worst_triple: worst.1,
    })
}

/// A U(1)-valued 2-cocycle on a finite group.
#[derive(Debug, Clone)]
pub struct Multiplier {
    group: FiniteGroup,
    values: Vec<Complex64>,
}

impl Multiplier {
    /// `values[g * |G| + h] = w(g, h)`.
    pub fn new(group: FiniteGroup, values: Vec<Complex64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !((v.norm() - 1.0).abs() <= 1e-12)) {
            return Err(Error::InvalidInput(format!("multiplier value {v} is not of unit modulus")));
        }
        let check = check_cocycle(&group, &values)?;
        if !check.holds {
            let (a, b, c) = check.worst_triple;
            return Err(Error::InvalidInput(format!(
                "cocycle identity fails at ({a}, {b}, {c}) by {:.3e}",
                check.residual
            )));
        }
        Ok(Self { group, values })
    }

    pub fn trivial(group: FiniteGroup) -> Self {
        let n = group.order();
        Self {
            group,
            values: vec![Complex64::new(1.0, 0.0); n * n],
        }
    }

    /// `w(g, h) = a(g) a(h) / a(gh)`.
    pub fn coboundary(group: FiniteGroup, alpha: &[Complex64]) -> Result<Self> {
        retwist(&Self::trivial(group), alpha)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn get(&self, g: usize, h: usize) -> Complex64 {
        self.values[g * self.group.order() + h]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_distance(&self, other: &Multiplier) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_phases(alpha: &[Complex64], n: usize) -> Result<()> {
    if alpha.len() != n {
        return Err(Error::ShapeMismatch(format!("{} phases for a group of order {n}", alpha.len())));
    }
    if let Some(a) = alpha.iter().find(|a| !((a.norm() - 1.0).abs() <= 1e-12)) {
        return Err(Error::InvalidInput(format!("phase {a} is not of unit modulus")));
    }
    Ok(())
}

/// `w'(g, h) = a(g) a(h) / a(gh) * w(g, h)`.
pub fn retwist(omega: &Multiplier, alpha: &[Complex64]) -> Result<Multiplier> {
    let g = &omega.group;
    let n = g.order();
    check_phases(alpha, n)?;
    let mut values = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let v = alpha[a] * alpha[b] / alpha[g.mul(a, b)] * omega.get(a, b);
            values.push(v / v.norm());
        }
    }
    Ok(Multiplier {
        group: g.clone(),
        values,
    })
}

/// `(g, h, w(g,h) / w(h,g))` for every ordered commuting pair.
pub fn commutator_phase_invariant(omega: &Multiplier) -> Vec<(usize, usize, Complex64)> {
    let g = &omega.group;
    let n = g.order();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if g.commutes(a, b) {
                out.push((a, b, omega.get(a, b) / omega.get(b, a)));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMethod {
    Invariant,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A commuting pair on which the two commutator phases differ.
    CommutatorPhase {
        g: usize,
        h: usize,
        beta1: Complex64,
        beta2: Complex64,
    },
    /// The propagation search ran over every candidate phase function
    /// `a(g)` with `a(g)^|G| = prod_h s(g, h)`, which contains every
    /// solution, and found none.
    NoPhaseFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Similarity {
    /// `w2 = retwist(w1, alpha)`.
    Similar(Vec<Complex64>),
    NotSimilar(Witness),
    Inconclusive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub verdict: Similarity,
    pub method: SimilarityMethod,
    /// Phase functions examined by the exhaustive search, or search nodes
    /// visited by the propagation search.
    pub candidates_examined: u64,
}

impl SimilarityReport {
    pub fn is_similar(&self) -> bool {
        matches!(self.verdict, Similarity::Similar(_))
    }

    pub fn is_not_similar(&self) -> bool {
        matches!(self.verdict, Similarity::NotSimilar(_))
    }
}

fn beta_witness(w1: &Multiplier, w2: &Multiplier) -> Option<Witness> {
    commutator_phase_invariant(w1)
        .into_iter()
        .zip(commutator_phase_invariant(w2))
        .find(|((_, _, b1), (_, _, b2))| (b1 - b2).norm() > PHASE_TOL)
        .map(|((g, h, beta1), (_, _, beta2))| Witness::CommutatorPhase { g, h, beta1, beta2 })
}

/// Decides whether `w2 = retwist(w1, alpha)` for some phase function.
///
/// The invariant method compares commutator phases, then recovers `alpha`
/// by constraint propagation over the finite candidate set. The exhaustive
/// method enumerates every `alpha` valued in the `root_order`-th roots of
/// unity when there are at most [`EXHAUSTIVE_LIMIT`] of them.
pub fn is_similar(
    w1: &Multiplier,
    w2: &Multiplier,
    method: SimilarityMethod,
    root_order: usize,
) -> Result<SimilarityReport> {
    if w1.group != w2.group {
        return Err(Error::GroupMismatch);
    }
    match method {
        SimilarityMethod::Invariant => Ok(invariant_search(w1, w2)),
        SimilarityMethod::Exhaustive => exhaustive_search(w1, w2, root_order),
    }
}

/// `root_order = 2 |G|`.
pub fn default_root_order(group: &FiniteGroup) -> usize {
    2 * group.order()
}

fn verified(w1: &Multiplier, w2: &Multiplier, alpha: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let tw = retwist(w1, &alpha).ok()?;
    (tw.max_distance(w2) <= PHASE_TOL).then_some(alpha)
}

fn invariant_search(w1: &Multiplier, w2: &Multiplier) -> SimilarityReport {
    let report = |verdict, nodes| SimilarityReport {
        verdict,
        method: SimilarityMethod::Invariant,
        candidates_examined: nodes,
    };
    if let Some(w) = beta_witness(w1, w2) {
        return report(Similarity::NotSimilar(w), 0);
    }
    let g = &w1.group;
    let n = g.order();
    let sigma: Vec<Complex64> = w2.values.iter().zip(&w1.values).map(|(b, a)| b / a).collect();
    // any solution has a(g)^n = prod_h s(g, h)
    let base: Vec<Complex64> = (0..n)
        .map(|x| {
            let tau: Complex64 = (0..n).map(|h| sigma[x * n + h]).product();
            Complex64::from_polar(1.0, tau.arg() / n as f64)
        })
        .collect();
    let roots: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
    let mut search = Propagation {
        group: g,
        sigma: &sigma,
        base: &base,
        roots: &roots,
        nodes: 0,
    };
    let mut alpha = vec![None; n];
    let found = search.solve(&mut alpha);
    let nodes = search.nodes as u64;
    match found {
        Some(true) => {
            let alpha: Vec<Complex64> = alpha.into_iter().map(|a| a.expect("complete")).collect();
            match verified(w1, w2, alpha) {
                Some(a) => report(Similarity::Similar(a), nodes),
                None => report(
                    Similarity::Inconclusive("recovered phase function failed verification".into()),
                    nodes,
                ),
            }
        }
        Some(false) => report(Similarity::NotSimilar(Witness::NoPhaseFunction), nodes),
        None => report(
            Similarity::Inconclusive(format!("search budget of {SEARCH_NODE_LIMIT} nodes exhausted")),
            nodes,
        ),
    }
}

struct Propagation<'a> {
    group: &'a FiniteGroup,
    sigma: &'a [Complex64],
    base: &'a [Complex64],
    roots: &'a [Complex64],
    nodes: usize,
}

impl Propagation<'_> {
    fn admissible(&self, x: usize, a: Complex64) -> bool {
        // a / base(x) must be an n-th root of unity
        let r = a / self.base[x];
        self.roots.iter().any(|z| (z - r).norm() <= 1e-7)
    }

    /// Closes `alpha` under `a(gh) = a(g) a(h) / s(g, h)`; false on a
    /// contradiction.
    fn propagate(&self, alpha: &mut [Option<Complex64>]) -> bool {
        let n = self.group.order();
        loop {
            let mut changed = false;
            for g in 0..n {
                let Some(ag) = alpha[g] else { continue };
                for h in 0..n {
                    let Some(ah) = alpha[h] else { continue };
                    let gh = self.group.mul(g, h);
                    let forced = ag * ah / self.sigma[g * n + h];
                    let forced = forced / forced.norm();
                    match alpha[gh] {
                        Some(agh) if (agh - forced).norm() > PHASE_TOL => return false,
                        Some(_) => {}
                        None => {
                            if !self.admissible(gh, forced) {
                                return false;
                            }
                            alpha[gh] = Some(forced);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// `Some(true)` with `alpha` filled in, `Some(false)` if no solution
    /// extends the partial assignment, `None` when over budget.
    fn solve(&mut self, alpha: &mut Vec<Option<Complex64>>) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_LIMIT {
            return None;
        }
        if !self.propagate(alpha) {
            return Some(false);
        }
        let Some(x) = alpha.iter().position(Option::is_none) else {
            return Some(true);
        };
        for z in self.roots {
            let mut trial = alpha.clone();
            trial[x] = Some(self.base[x] * z);
            match self.solve(&mut trial)? {
                true => {
                    *alpha = trial;
                    return Some(true);
                }
                false => continue,
            }
        }
        Some(false)
    }
}

/// Exponent `k` with `z = e^{2 pi i k / r}`, if `z` is such a root.
fn root_exponent(z: Complex64, r: usize) -> Option<usize> {
    let k = (z.arg() / TAU * r as f64).round();
    let k = (k as i64).rem_euclid(r as i64) as usize;
    let root = Complex64::from_polar(1.0, TAU * k as f64 / r as f64);
    ((root - z).norm() <= PHASE_TOL).then_some(k)
}

fn exhaustive_search(w1: &Multiplier, w2: &Multiplier, r: usize) -> Result<SimilarityReport> {
    if r == 0 {
        return Err(Error::InvalidInput("root order must be positive".into()));
    }
    let g = &w1.group;
    let n = g.order();
    let mut exps = Vec::with_capacity(n * n);
    for (a, b) in w1.values.iter().zip(&w2.values) {
        match (root_exponent(*a, r), root_exponent(*b, r)) {
            (Some(x), Some(y)) => exps.push((y + r - x) % r),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "multiplier values are not {r}-th roots of unity"
                )))
            }
        }
    }
    let witness = beta_witness(w1, w2);
    let report = |verdict, examined| SimilarityReport {
        verdict,
        method: SimilarityMethod::Exhaustive,
        candidates_examined: examined,
    };
    let total = (r as u64).checked_pow(n as u32).filter(|&t| t <= EXHAUSTIVE_LIMIT);
    let Some(total) = total else {
        let evidence = match witness {
            Some(Witness::CommutatorPhase { g, h, .. }) => format!("commutator phases differ at ({g}, {h})"),
            _ => "commutator phases agree".into(),
        };
        return Ok(report(
            Similarity::Inconclusive(format!("{r}^{n} candidates exceed the search limit; {evidence}")),
            0,
        ));
    };

    // odometer over exponent vectors k, testing k(g) + k(h) - k(gh) = s(g, h) mod r
    let mut k = vec![0usize; n];
    let mut examined = 0u64;
    loop {
        examined += 1;
        let ok = (0..n).all(|a| (0..n).all(|b| (k[a] + k[b] + r - k[g.mul(a, b)]) % r == exps[a * n + b]));
        if ok {
            let alpha: Vec<Complex64> = k
                .iter()
                .map(|&e| Complex64::from_polar(1.0, TAU * e as f64 / r as f64))
                .collect();
            if let Some(a) = verified(w1, w2, alpha) {
                return Ok(report(Similarity::Similar(a), examined));
            }
        }
        let mut pos = 0;
        while pos < n {
            k[pos] += 1;
            if k[pos] < r {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    debug_assert_eq!(examined, total);
    Ok(match witness {
        Some(w) => report(Similarity::NotSimilar(w), examined),
        None => report(
            Similarity::Inconclusive(format!(
                "no phase function valued in the {r}-th roots of unity; commutator phases agree"
            )),
            examined,
        ),
    })
}

/// Similarity to the constant multiplier 1.
pub fn is_trivial(omega: &Multiplier) -> SimilarityReport {
    invariant_search(&Multiplier::trivial(omega.group.clone()), omega)
}

/// `||X - (Tr X / d) I||_HS`.
pub fn scalar_defect(x: &ComplexMatrix) -> f64 {
    let d = x.rows();
    let c = x.trace() / d as f64;
    (x - &ComplexMatrix::identity(d).scale(c)).hs_norm()
}

/// A map `g -> U(g)` with `U(g) U(h) = w(g, h) U(gh)`.
#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: FiniteGroup,
    dim: usize,
    unitaries: Vec<ComplexMatrix>,
}

impl ProjectiveRep {
    pub fn new(group: FiniteGroup, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if unitaries.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for a group of order {}",
                unitaries.len(),
                group.order()
            )));
        }
        let dim = unitaries[0].rows();
        for u in &unitaries {
            if u.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch(format!("matrix of shape {:?}, expected {dim}x{dim}", u.shape())));
            }
            if !u.is_finite() {
                return Err(Error::NonFinite("representation matrix"));
            }
            let defect = u.unitarity_defect();
            if !(defect <= 1e-10) {
                return Err(Error::NotUnitary { defect });
            }
        }
        let rep = Self { group, dim, unitaries };
        let (g, h, defect) = rep.worst_scalar_defect();
        if defect > SCALAR_TOL {
            return Err(Error::NotProjective { g, h, defect });
        }
        Ok(rep)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn get(&self, g: usize) -> &ComplexMatrix {
        &self.unitaries[g]
    }

    /// `U(g) U(h) U(gh)^dagger`.
    pub fn product_defect_matrix(&self, g: usize, h: usize) -> ComplexMatrix {
        let gh = self.group.mul(g, h);
        self.unitaries[g]
            .matmul(&self.unitaries[h])
            .matmul(&self.unitaries[gh].adjoint())
    }

    /// Pair with the largest non-scalar part of `U(g) U(h) U(gh)^dagger`.
    pub fn worst_scalar_defect(&self) -> (usize, usize, f64) {
        worst_scalar_defect_of(&self.group, &self.unitaries)
    }

    /// `g -> c(g) U(g)`.
    pub fn rephase(&self, c: &[Complex64]) -> Result<ProjectiveRep> {
        check_phases(c, self.group.order())?;
        let unitaries = self.unitaries.iter().zip(c).map(|(u, &z)| u.scale(z)).collect();
        ProjectiveRep::new(self.group.clone(), unitaries)
    }
}

fn worst_scalar_defect_of(group: &FiniteGroup, unitaries: &[ComplexMatrix]) -> (usize, usize, f64) {
    let n = group.order();
    let mut worst = (0, 0, 0.0);
    for g in 0..n {
        for h in 0..n {
            let x = unitaries[g]
                .matmul(&unitaries[h])
                .matmul(&unitaries[group.mul(g, h)].adjoint());
            let d = scalar_defect(&x);
            if d > worst.2 {
                worst = (g, h, d);
            }
        }
    }
    worst
}

/// `w(g, h) = Tr(U(g) U(h) U(gh)^dagger) / d`, normalized to unit modulus.
pub fn extract_multiplier(rep: &ProjectiveRep) -> Result<Multiplier> {
    let n = rep.group.order();
    let mut values = Vec::with_capacity(n * n);
    for g in 0..n {
        for h in 0..n {
            let x = rep.product_defect_matrix(g, h);
            let w = x.trace() / rep.dim as f64;
            if !(w.norm() > 0.5) {
                return Err(Error::NotProjective {
                    g,
                    h,
                    defect: scalar_defect(&x),
                });
            }
            let w = w / w.norm();
            let defect = (&x - &ComplexMatrix::identity(rep.dim).scale(w)).hs_norm();
            if defect > SCALAR_TOL {
                return Err(Error::NotProjective { g, h, defect });
            }
            values.push(w);
        }
    }
    Multiplier::new(rep.group.clone(), values)
}

#[derive(Debug, Clone)]
pub enum DirectSum {
    /// `g -> diag(U1(g), conj(alpha(g)) U2(g))` with
    /// `w2 = retwist(w1, alpha)`.
    Combinable {
        joint: ProjectiveRep,
        alpha: Vec<Complex64>,
    },
    /// The multipliers are not similar. `naive_defect` is the worst
    /// non-scalar defect of the plain block sum `diag(U1(g), U2(g))`.
    Obstructed {
        witness: Witness,
        naive_defect: (usize, usize, f64),
    },
    Undecided(String),
}

pub fn direct_sum_obstruction(rep1: &ProjectiveRep, rep2: &ProjectiveRep) -> Result<DirectSum> {
    if rep1.group != rep2.group {
        return Err(Error::GroupMismatch);
    }
    let w1 = extract_multiplier(rep1)?;
    let w2 = extract_multiplier(rep2)?;
    let report = is_similar(&w1, &w2, SimilarityMethod::Invariant, 0)?;
    Ok(match report.verdict {
        Similarity::Similar(alpha) => {
            let unitaries = rep1
                .unitaries
                .iter()
                .zip(&rep2.unitaries)
                .zip(&alpha)
                .map(|((u1, u2), a)| u1.direct_sum(&u2.scale(a.conj())))
                .collect();
            let joint = ProjectiveRep::new(rep1.group.clone(), unitaries)
                .map_err(|e| Error::Numerical(format!("joint representation failed validation: {e}")))?;
            DirectSum::Combinable { joint, alpha }
        }
        Similarity::NotSimilar(witness) => {
            let naive: Vec<ComplexMatrix> = rep1
                .unitaries
                .iter()
                .zip(&rep2.unitaries)
                .map(|(u1, u2)| u1.direct_sum(u2))
                .collect();
            let naive_defect = worst_scalar_defect_of(&rep1.group, &naive);
            if naive_defect.2 <= SCALAR_TOL {
                return Err(Error::Numerical(
                    "multipliers judged dissimilar but the block sum is projective".into(),
                ));
            }
            DirectSum::Obstructed { witness, naive_defect }
        }
        Similarity::Inconclusive(why) => DirectSum::Undecided(why),
    })
}

/// A named group with a multiplier and representations carrying it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub multiplier: Multiplier,
    pub reps: Vec<ProjectiveRep>,
}

/// Characters of the Klein group: `a -> (-1)^i`, `b -> (-1)^j`.
pub fn klein_characters() -> Vec<ProjectiveRep> {
    let g = FiniteGroup::klein_four();
    let mut reps = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let sa = if i == 0 { 1.0 } else { -1.0 };
            let sb = if j == 0 { 1.0 } else { -1.0 };
            let vals = [1.0, sa, sb, sa * sb];
            let us = vals.iter().map(|&v| ComplexMatrix::from_real_diagonal(&[v])).collect();
            reps.push(ProjectiveRep::new(g.clone(), us).expect("character"));
        }
    }
    reps
}

/// `e -> I, a -> X, b -> Z, ab -> XZ`.
pub fn klein_pauli_rep() -> ProjectiveRep {
    let us = vec![
        ComplexMatrix::identity(2),
        pauli::x(),
        pauli::z(),
        pauli::x().matmul(&pauli::z()),
    ];
    ProjectiveRep::new(FiniteGroup::klein_four(), us).expect("Pauli assignment is projective")
}

/// Two-dimensional irreducible representation of S3 (permutation action on
/// the plane orthogonal to `(1, 1, 1)`).
pub fn s3_standard_rep() -> ProjectiveRep {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r6 = 1.0 / 6f64.sqrt();
    let b = ComplexMatrix::from_real_rows(&[&[r2, r6], &[-r2, r6], &[0.0, -2.0 * r6]]);
    let us = s3_permutations()
        .iter()
        .map(|p| {
            let mut m = ComplexMatrix::zeros(3, 3);
            for (x, &px) in p.iter().enumerate() {
                m[(px, x)] = Complex64::new(1.0, 0.0);
            }
            b.adjoint().matmul(&m).matmul(&b)
        })
        .collect();
    ProjectiveRep::new(FiniteGroup::symmetric3(), us).expect("S3 irrep")
}

/// `Z_n` acting by `g -> diag(w^{gk})_k` on `C^n`, `w = e^{2 pi i / n}`.
pub fn cyclic_clock_rep(n: usize) -> ProjectiveRep {
    let us = (0..n)
        .map(|g| {
            let d: Vec<Complex64> = (0..n)
                .map(|k| Complex64::from_polar(1.0, TAU * (g * k) as f64 / n as f64))
                .collect();
            ComplexMatrix::from_diagonal(&d)
        })
        .collect();
    ProjectiveRep::new(FiniteGroup::cyclic(n), us).expect("clock rep")
}

pub fn builtin_examples() -> Vec<CatalogEntry> {
    let klein = FiniteGroup::klein_four();
    let pauli_rep = klein_pauli_rep();
    let pauli_w = extract_multiplier(&pauli_rep).expect("projective");
    vec![
        CatalogEntry {
            name: "klein-trivial",
            description: "Klein four-group, trivial multiplier, its four characters",
            multiplier: Multiplier::trivial(klein),
            reps: klein_characters(),
        },
        CatalogEntry {
            name: "klein-pauli",
            description: "Klein four-group, Pauli multiplier, two-dimensional projective representation",
            multiplier: pauli_w,
            reps: vec![pauli_rep],
        },
        CatalogEntry {
            name: "cyclic-4",
            description: "Z_4 with trivial multiplier; every multiplier on a cyclic group is a coboundary",
            multiplier: Multiplier::trivial(FiniteGroup::cyclic(4)),
            reps: vec![cyclic_clock_rep(4)],
        },
        CatalogEntry {
            name: "s3-standard",
            description: "S3 with trivial multiplier and its two-dimensional irreducible representation",
            multiplier: Multiplier::trivial(FiniteGroup::symmetric3()),
            reps: vec![s3_standard_rep()],
        },
    ]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    builtin_examples().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::random;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_multiplier() -> Multiplier {
        extract_multiplier(&klein_pauli_rep()).unwrap()
    }

    fn random_alpha(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = random::rng(seed);
        (0..n).map(|_| random::random_phase(&mut rng)).collect()
    }

    #[test]
    fn group_constructors_validate() {
        assert_eq!(FiniteGroup::cyclic(5).order(), 5);
        assert!(FiniteGroup::klein_four().is_abelian());
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let p = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3));
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        // Latin square without associativity
        let bad = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::new(bad), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn cocycle_examples() {
        let k = FiniteGroup::klein_four();
        assert!(check_cocycle(&k, Multiplier::trivial(k.clone()).values()).unwrap().holds);
        assert!(check_cocycle(&k, pauli_multiplier().values()).unwrap().holds);
        let mut vals = vec![c(1.0, 0.0); 16];
        vals[4 + 2] = c(-1.0, 0.0);
        let chk = check_cocycle(&k, &vals).unwrap();
        assert!(!chk.holds);
        let (a, b, cc) = chk.worst_triple;
        let w = |g: usize, h: usize| vals[g * 4 + h];
        let r = (w(a, b) * w(k.mul(a, b), cc) - w(a, k.mul(b, cc)) * w(b, cc)).norm();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(Multiplier::new(k, vals).is_err());
    }

    #[test]
    fn extraction_examples() {
        for ch in klein_characters() {
            let w = extract_multiplier(&ch).unwrap();
            assert!(w.max_distance(&Multiplier::trivial(ch.group().clone())) < 1e-15);
        }
        let w = pauli_multiplier();
        assert!((w.get(1, 2) / w.get(2, 1) - c(-1.0, 0.0)).norm() < 1e-15);

        let alpha = random_alpha(4, 7);
        let us = alpha.iter().map(|&a| ComplexMatrix::from_diagonal(&[a])).collect();
        let rep = ProjectiveRep::new(FiniteGroup::klein_four(), us).unwrap();
        let w = extract_multiplier(&rep).unwrap();
        let k = FiniteGroup::klein_four();
        for g in 0..4 {
            for h in 0..4 {
                let expect = alpha[g] * alpha[h] / alpha[k.mul(g, h)];
                assert!((w.get(g, h) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_projective_rejected() {
        let us = vec![ComplexMatrix::identity(2), pauli::x(), pauli::x(), pauli::z()];
        assert!(matches!(
            ProjectiveRep::new(FiniteGroup::klein_four(), us),
            Err(Error::NotProjective { .. })
        ));
    }

    #[test]
    fn retwist_examples() {
        let w = pauli_multiplier();
        let one = vec![c(1.0, 0.0); 4];
        assert!(retwist(&w, &one).unwrap().max_distance(&w) < 1e-15);
        let alpha = random_alpha(4, 1);
        let cob = Multiplier::coboundary(FiniteGroup::klein_four(), &alpha).unwrap();
        assert!(check_cocycle(cob.group(), cob.values()).unwrap().holds);
        assert!(is_trivial(&cob).is_similar());
        let tw = retwist(&w, &alpha).unwrap();
        assert!((tw.get(1, 2) / tw.get(2, 1) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(retwist(&w, &[c(2.0, 0.0); 4]).is_err());
    }

    #[test]
    fn retwist_is_a_group_action() {
        let w = pauli_multiplier();
        let a = random_alpha(4, 2);
        let b = random_alpha(4, 3);
        let ab: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let lhs = retwist(&retwist(&w, &a).unwrap(), &b).unwrap();
        let rhs = retwist(&w, &ab).unwrap();
        assert!(lhs.max_distance(&rhs) < 1e-12);
    }

    #[test]
    fn commutator_phases() {
        let k = FiniteGroup::klein_four();
        assert!(commutator_phase_invariant(&Multiplier::trivial(k.clone()))
            .iter()
            .all(|(_, _, b)| (b - c(1.0, 0.0)).norm() < 1e-15));
        let beta = commutator_phase_invariant(&pauli_multiplier());
        let ab = beta.iter().find(|(g, h, _)| (*g, *h) == (1, 2)).unwrap().2;
        assert!((ab - c(-1.0, 0.0)).norm() < 1e-15);
        let cob = Multiplier::coboundary(k, &random_alpha(4, 5)).unwrap();
        assert!(commutator_phase_invariant(&cob)
            .iter()
            .all(|(_, _, b)| (b - c(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn similarity_examples() {
        let w = pauli_multiplier();
        let alpha = random_alpha(4, 9);
        let tw = retwist(&w, &alpha).unwrap();
        let r = is_similar(&w, &tw, SimilarityMethod::Invariant, 0).unwrap();
        let Similarity::Similar(found) = r.verdict else { panic!("{r:?}") };
        assert!(retwist(&w, &found).unwrap().max_distance(&tw) <= 1e-9);

        let triv = Multiplier::trivial(FiniteGroup::klein_four());
        let r = is_similar(&triv, &w, SimilarityMethod::Invariant, 0).unwrap();
        assert!(matches!(
            r.verdict,
            Similarity::NotSimilar(Witness::CommutatorPhase { g: 1, h: 2, .. })
        ));
        let r = is_similar(&triv, &w, SimilarityMethod::Exhaustive, 4).unwrap();
        assert!(r.is_not_similar());
        assert_eq!(r.candidates_examined, 256);

        let c1 = Multiplier::coboundary(FiniteGroup::klein_four(), &random_alpha(4, 10)).unwrap();
        let c2 = Multiplier::coboundary(FiniteGroup::klein_four(), &random_alpha(4, 11)).unwrap();
        assert!(is_similar(&c1, &c2, SimilarityMethod::Invariant, 0).unwrap().is_similar());
    }

    #[test]
    fn group_mismatch() {
        let a = Multiplier::trivial(FiniteGroup::klein_four());
        let b = Multiplier::trivial(FiniteGroup::cyclic(4));
        assert_eq!(
            is_similar(&a, &b, SimilarityMethod::Invariant, 0).unwrap_err(),
            Error::GroupMismatch
        );
    }

    #[test]
    fn cyclic_coboundary_found_by_exhaustive_search() {
        let g = FiniteGroup::cyclic(4);
        let alpha: Vec<Complex64> = [0usize, 3, 1, 2]
            .iter()
            .map(|&k| Complex64::from_polar(1.0, TAU * k as f64 / 4.0))
            .collect();
        let w = Multiplier::coboundary(g.clone(), &alpha).unwrap();
        let r = is_similar(&Multiplier::trivial(g), &w, SimilarityMethod::Exhaustive, 4).unwrap();
        assert!(r.is_similar());
        assert!(is_trivial(&w).is_similar());
    }

    #[test]
    fn nonabelian_coboundary_recovered() {
        let g = FiniteGroup::symmetric3();
        let w = Multiplier::coboundary(g, &random_alpha(6, 4)).unwrap();
        assert!(is_trivial(&w).is_similar());
    }

    #[test]
    fn direct_sum_examples() {
        let p = klein_pauli_rep();
        match direct_sum_obstruction(&p, &p).unwrap() {
            DirectSum::Combinable { joint, .. } => assert_eq!(joint.dim(), 4),
            other => panic!("{other:?}"),
        }
        let triv = &klein_characters()[0];
        match direct_sum_obstruction(triv, &p).unwrap() {
            DirectSum::Obstructed { naive_defect, .. } => {
                assert!(naive_defect.2 > 0.5);
                let naive: Vec<ComplexMatrix> = triv
                    .unitaries()
                    .iter()
                    .zip(p.unitaries())
                    .map(|(a, b)| a.direct_sum(b))
                    .collect();
                // ab -> XZ makes w(a, b) = 1, so the clash shows up at (b, a)
                let x = naive[1].matmul(&naive[2]).matmul(&naive[3].adjoint());
                assert!(scalar_defect(&x) < 1e-15);
                let x = naive[2].matmul(&naive[1]).matmul(&naive[3].adjoint());
                assert!(scalar_defect(&x) > 0.5);
            }
            other => panic!("{other:?}"),
        }
        let twisted = p.rephase(&random_alpha(4, 12)).unwrap();
        match direct_sum_obstruction(&p, &twisted).unwrap() {
            DirectSum::Combinable { joint, .. } => assert!(joint.worst_scalar_defect().2 <= 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn catalog_contract() {
        let cat = builtin_examples();
        assert!(cat.len() >= 3);
        for e in &cat {
            assert!(check_cocycle(e.multiplier.group(), e.multiplier.values()).unwrap().holds);
            for rep in &e.reps {
                let w = extract_multiplier(rep).unwrap();
                assert!(is_similar(&e.multiplier, &w, SimilarityMethod::Invariant, 0).unwrap().is_similar());
            }
        }
        assert!(is_trivial(&catalog_entry("klein-pauli").unwrap().multiplier).is_not_similar());
    }
}
