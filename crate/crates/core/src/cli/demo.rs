//! Built-in end-to-end scenarios.

use num_complex::Complex64;
use serde_json::json;

use super::commands::Params;
use super::report::{clean, Report, Status};
use crate::algebra::corpus::block_algebra;
use crate::error::{Error, Result};
use crate::kernel::{pauli, ComplexMatrix};
use crate::projective::{direct_sum_obstruction, klein_characters, klein_pauli_rep, DirectSum};
use crate::sectors::{einselection_sim, sectors_from_algebra, DensityMatrix};
use crate::way::{
    build_measurement_unitary, sigma_z_qutrit_model, verify_way_theorem, way_obstruction, AdditiveCharge, Completion,
    DEFAULT_OVERLAP_MARGIN,
};

pub const DEMOS: [&str; 3] = ["einselection", "univalence", "way"];

pub fn run(name: &str, p: Params) -> Result<Report> {
    match name {
        "einselection" => einselection(p),
        "univalence" => univalence(),
        "way" => way(p),
        other => Err(Error::InvalidInput(format!(
            "unknown demo {other:?}; available: {}",
            DEMOS.join(", ")
        ))),
    }
}

/// Dephasing of `(|0> + |2>)/sqrt(2)` across the sectors of `M_2 + M_2`.
fn einselection(p: Params) -> Result<Report> {
    const DAMPING: f64 = 0.5;
    const STEPS: usize = 20;
    let alg = block_algebra(&[2, 2]);
    let sectors = sectors_from_algebra(&alg, p.seed, 3)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let psi = [Complex64::new(s, 0.0), zero, Complex64::new(s, 0.0), zero];
    let rho = DensityMatrix::pure(&psi)?;
    let (traj, weights) = einselection_sim(&rho, &sectors, DAMPING, STEPS)?;

    let d0 = traj[0].coherence_defect;
    let mut r = Report::new(Status::Pass);
    r.line(format!("damping {DAMPING}, {STEPS} steps, sectors of M_2 + M_2"));
    r.line("k  defect                  closed form             weights");
    let mut rows = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    for (pt, w) in traj.iter().zip(&weights) {
        let closed = (1.0 - DAMPING).powi(pt.step as i32) * d0;
        worst_gap = worst_gap.max((pt.coherence_defect - closed).abs());
        for (a, b) in w.iter().zip(&weights[0]) {
            worst_drift = worst_drift.max((a - b).abs());
        }
        r.line(format!(
            "{:<2} {:<23e} {:<23e} {}",
            pt.step,
            pt.coherence_defect,
            closed,
            w.iter().map(|x| clean(*x).to_string()).collect::<Vec<_>>().join(", ")
        ));
        rows.push(json!({"k": pt.step, "defect": pt.coherence_defect, "closed_form": closed, "weights": w}));
    }
    let ok = worst_gap <= 1e-10 && worst_drift <= 1e-12;
    r.status = Status::from_check(ok);
    r.line(format!(
        "max |defect - closed form| = {worst_gap:e}; max weight drift = {worst_drift:e}"
    ));
    r.set("damping", DAMPING);
    r.set("trajectory", rows);
    r.set("max_closed_form_gap", worst_gap);
    r.set("max_weight_drift", worst_drift);
    Ok(r)
}

/// One-dimensional character and the Pauli projective representation of
/// the Klein group cannot share a Hilbert space.
fn univalence() -> Result<Report> {
    let triv = &klein_characters()[0];
    let pauli_rep = klein_pauli_rep();
    let mut r = Report::new(Status::Pass);
    r.line("Klein four-group: trivial character (integer-spin shadow) + Pauli representation (half-integer shadow)");
    match direct_sum_obstruction(triv, &pauli_rep)? {
        DirectSum::Obstructed { naive_defect, .. } => {
            r.line(format!(
                "direct sum: obstructed; block sum defect {} at ({}, {})",
                clean(naive_defect.2),
                naive_defect.0,
                naive_defect.1
            ));
            r.set("mixed_sum", "obstructed");
            r.set("naive_defect", naive_defect.2);
        }
        _ => {
            r.status = Status::Fail;
            r.line("direct sum: unexpectedly combinable");
            r.set("mixed_sum", "combinable");
        }
    }
    match direct_sum_obstruction(&pauli_rep, &pauli_rep)? {
        DirectSum::Combinable { joint, .. } => {
            r.line(format!("Pauli + Pauli: combinable, joint dim {}", joint.dim()));
            r.set("pauli_sum", "combinable");
        }
        _ => {
            r.status = Status::Fail;
            r.line("Pauli + Pauli: unexpectedly not combinable");
            r.set("pauli_sum", "not combinable");
        }
    }
    Ok(r)
}

fn way(p: Params) -> Result<Report> {
    let mut r = Report::new(Status::Pass);
    let (model, charge) = sigma_z_qutrit_model();
    let t = verify_way_theorem(&model, &charge, p.tol, DEFAULT_OVERLAP_MARGIN)?;
    r.line(format!(
        "sigma_z on a qubit, qutrit apparatus Q_A = diag(1, 1, -1): theorem {} (chain consistent {}, block-diagonal {})",
        Status::from_check(t.passed()).label(),
        t.chain_consistent,
        t.block_diagonal
    ));
    r.set("sigma_z_model_passed", t.passed());

    let obstruction = way_obstruction(&pauli::x(), &pauli::z())?;
    let q = AdditiveCharge::compose(pauli::z(), ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0]))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    let e = |k: usize| {
        let mut v = vec![c(0.0); 3];
        v[k] = c(1.0);
        v
    };
    let s = vec![vec![c(h), c(h)], vec![c(h), c(-h)]];
    let built = build_measurement_unitary(
        &s,
        &[e(0), e(1)],
        &e(0),
        &Completion::ConservingLeastSquares(q.q_total().clone()),
    )?;
    r.line(format!(
        "sigma_x with Q_S = sigma_z: ||[P, Q_S]||_HS = {obstruction}; best conserving unitary misses the pointer shift by {}",
        built.pointer_map_residual
    ));
    r.set("sigma_x_obstruction", obstruction);
    r.set("sigma_x_best_residual", built.pointer_map_residual);
    if !t.passed() || built.pointer_map_residual <= 1e-9 {
        r.status = Status::Fail;
    }
    Ok(r)
}
