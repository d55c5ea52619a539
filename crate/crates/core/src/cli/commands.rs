//! One function per subcommand: parsed input in, report out.

use num_complex::Complex64;
use serde_json::{json, Value};

use super::input::{self, AnalyzeInput, ChannelInput, RayRepInput, ReduceInput, WayInput};
use super::report::{self as rep, clean, clean_complex, fmt_complex, join_usize, yes_no, Report, Status};
use crate::algebra::{dirac_check, generate_algebra};
use crate::channels::{is_covariant, is_cptp, twirl, QuantumChannel, UnitaryGroupRep};
use crate::error::{Error, Result};
use crate::kernel::hermitian_eig;
use crate::projective::{
    self, catalog_entry, check_cocycle, direct_sum_obstruction, extract_multiplier, is_similar, is_trivial,
    DirectSum, Multiplier, ProjectiveRep, Similarity, SimilarityMethod, SimilarityReport, Witness,
};
use crate::sectors::{classify_purity, reduce_state, sectors_from_algebra, DensityMatrix, SectorDecomposition};
use crate::way::{
    build_measurement_unitary, verify_way_theorem, way_obstruction, AdditiveCharge, Completion, MeasurementModel,
    TheoremReport, DEFAULT_OVERLAP_MARGIN, MODEL_TOL,
};

/// Shared command parameters.
#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub seed: u64,
    pub tol: f64,
}

const SECTOR_REPEATS: usize = 3;

pub fn sector_json(d: &SectorDecomposition) -> Value {
    json!({
        "count": d.len(),
        "dims": d.sector_dims(),
        "projectors": d.projectors().iter().map(rep::matrix).collect::<Vec<_>>(),
    })
}

pub fn analyze(text: &str, p: Params) -> Result<Report> {
    let inp: AnalyzeInput = input::parse(text)?;
    let gens = input::matrices(&inp.matrices)?;
    let n = match (gens.first(), inp.dim) {
        (Some(g), Some(d)) if g.rows() != d => {
            return Err(Error::ShapeMismatch(format!("declared dim {d} but matrices are {}x{}", g.rows(), g.cols())))
        }
        (Some(g), _) => g.rows(),
        (None, Some(d)) if d > 0 => d,
        _ => return Err(Error::InvalidInput("empty generator list needs a positive \"dim\"".into())),
    };
    let alg = generate_algebra(n, &gens, p.tol)?;
    let comm = alg.commutant()?;
    let centre = alg.centre()?;
    let has_ssr = comm.dim() > 1;
    let abelian = comm.is_abelian(p.tol);
    let sectors = sectors_from_algebra(&alg, p.seed, SECTOR_REPEATS)?;
    let dirac = dirac_check(&alg, p.seed)?;

    let mut r = Report::new(Status::Ok);
    r.set("ambient_dim", n);
    r.set("algebra_dim", alg.dim());
    r.set("commutant_dim", comm.dim());
    r.set("centre_dim", centre.dim());
    r.set("has_ssr", has_ssr);
    r.set("abelian_ssr", has_ssr && abelian);
    r.set("commutant_abelian", abelian);
    r.set("sectors", sector_json(&sectors));
    r.set(
        "dirac",
        json!({
            "commutant_abelian": dirac.commutant_abelian,
            "maximal_abelian_dim": dirac.maximal_abelian_subalgebra.dim(),
            "maximal_in_full_algebra": dirac.is_maximal_in_full_algebra,
            "sides_agree": dirac.sides_agree(),
            "witness": dirac.witness.as_ref().map(rep::matrix),
        }),
    );
    let warning = (has_ssr && !abelian).then_some(
        "commutant is non-abelian: sector labels alone do not classify pure states (non-abelian SSR)",
    );
    r.set("warning", warning);

    let dims = if sectors.len() > 1 {
        format!("{} (dims {})", sectors.len(), join_usize(sectors.sector_dims()))
    } else {
        "1".to_string()
    };
    r.line(format!(
        "sectors: {dims}; SSR: {}; abelian: {}",
        yes_no(has_ssr),
        yes_no(has_ssr && abelian)
    ));
    r.line(format!(
        "algebra dim: {}; commutant dim: {}; centre dim: {}",
        alg.dim(),
        comm.dim(),
        centre.dim()
    ));
    r.line(format!(
        "classical observables: real span of the {} sector projector(s)",
        sectors.len()
    ));
    r.line(format!(
        "dirac: commutant abelian {}, maximal abelian subalgebra (dim {}) maximal in M_{n} {}, agree {}",
        yes_no(dirac.commutant_abelian),
        dirac.maximal_abelian_subalgebra.dim(),
        yes_no(dirac.is_maximal_in_full_algebra),
        yes_no(dirac.sides_agree())
    ));
    if let Some(w) = warning {
        r.line(format!("warning: {w}"));
    }
    Ok(r)
}

pub fn reduce(text: &str, p: Params) -> Result<Report> {
    let inp: ReduceInput = input::parse(text)?;
    let rho = DensityMatrix::new(inp.state.to_matrix()?)?;
    let sectors = SectorDecomposition::from_projectors(input::matrices(&inp.projectors)?)?;
    if sectors.ambient_dim() != rho.dim() {
        return Err(Error::ShapeMismatch(format!(
            "state of dimension {} with projectors of dimension {}",
            rho.dim(),
            sectors.ambient_dim()
        )));
    }
    let red = reduce_state(&rho, &sectors, crate::sectors::DEFAULT_WEIGHT_CUTOFF)?;
    let class = classify_purity(&rho, &sectors)?;
    let coherent = red.coherence_defect > p.tol;

    let mut r = Report::new(Status::from_check(!coherent));
    r.set("weights", red.weights.clone());
    r.set("support", red.support.clone());
    r.set(
        "components",
        red.components
            .iter()
            .map(|(i, c)| json!({"sector": i, "state": rep::matrix(c.matrix())}))
            .collect::<Vec<_>>(),
    );
    r.set("coherence_defect", red.coherence_defect);
    r.set("purity_class", class.label());
    r.set("sector_dims", sectors.sector_dims().to_vec());

    let weights: Vec<String> = red.weights.iter().map(|w| clean(*w).to_string()).collect();
    r.line(format!("weights: {}", weights.join(", ")));
    r.line(format!("coherence defect: {}", clean(red.coherence_defect)));
    r.line(format!("purity class: {}", class.label()));
    if coherent {
        r.line("flag: coherences between sectors exceed tol");
    }
    Ok(r)
}

fn theorem_json(t: &TheoremReport) -> Value {
    json!({
        "conservation_commutator": t.conservation_commutator,
        "unitarity_defect": t.unitarity_defect,
        "pointer_map_residual": t.pointer_map_residual,
        "chain_consistent": t.chain_consistent,
        "block_diagonal": t.block_diagonal,
        "obstruction": t.obstruction,
        "cross_check": t.cross_check,
        "bound": t.bound,
        "pairs": t.pairs.iter().map(|c| json!({
            "n": c.n,
            "m": c.m,
            "eigenvalue_gap": c.eigenvalue_gap,
            "pointer_overlap": rep::complex(c.pointer_overlap),
            "expressions": c.expressions.iter().map(|&z| rep::complex(z)).collect::<Vec<_>>(),
            "max_disagreement": c.max_disagreement,
            "charge_element": rep::complex(c.charge_element),
            "resolved": c.resolved,
            "conclusion_holds": c.conclusion_holds,
        })).collect::<Vec<_>>(),
    })
}

pub fn way_check(text: &str, p: Params) -> Result<Report> {
    let inp: WayInput = input::parse(text)?;
    let obs = inp.p.to_matrix()?;
    let charge = AdditiveCharge::compose(inp.q_s.to_matrix()?, inp.q_a.to_matrix()?)?;
    let obstruction = way_obstruction(&obs, charge.q_s())?;
    let s_states = match &inp.s_states {
        Some(list) => list.iter().map(|v| input::vector(v)).collect::<Result<Vec<_>>>()?,
        None => {
            let eig = hermitian_eig(&obs, 1e-10)?;
            (0..obs.rows()).map(|k| eig.vector(k)).collect()
        }
    };
    let a_states = inp.a_states.iter().map(|v| input::vector(v)).collect::<Result<Vec<_>>>()?;
    let a0 = input::vector(&inp.a0)?;
    let margin = inp.overlap_margin.unwrap_or(DEFAULT_OVERLAP_MARGIN);

    let mut r = Report::new(Status::Pass);
    r.set("obstruction", obstruction);
    r.line(format!("obstruction ||[P, Q_S]||_HS = {}", clean(obstruction)));

    let u = match &inp.u {
        Some(m) => m.to_matrix()?,
        None => {
            let built = build_measurement_unitary(
                &s_states,
                &a_states,
                &a0,
                &Completion::ConservingLeastSquares(charge.q_total().clone()),
            )?;
            r.set("search_residual", built.pointer_map_residual);
            if built.pointer_map_residual > MODEL_TOL {
                r.fail();
                r.set("verdict", "no charge-conserving unitary shifts the pointer as required");
                r.line(format!(
                    "no charge-conserving unitary realizes the pointer shift (best residual {})",
                    built.pointer_map_residual
                ));
                return Ok(r);
            }
            r.line(format!(
                "conserving unitary found (pointer residual {:e})",
                built.pointer_map_residual
            ));
            built.unitary
        }
    };

    let model = MeasurementModel::new(obs, s_states, a_states, a0, u);
    let report = model.and_then(|m| verify_way_theorem(&m, &charge, p.tol, margin));
    match report {
        Ok(t) => {
            if !t.passed() {
                r.fail();
            }
            r.line(format!(
                "conservation ||[U, Q]||_HS = {:e}; chain consistent: {}; Q_S block-diagonal: {}",
                t.conservation_commutator,
                yes_no(t.chain_consistent),
                yes_no(t.block_diagonal)
            ));
            for c in &t.pairs {
                r.line(format!(
                    "pair ({}, {}): gap {}, overlap {}, <s_n|Q_S|s_m> = {}, chain spread {:e}{}",
                    c.n,
                    c.m,
                    clean(c.eigenvalue_gap),
                    fmt_complex(clean_complex(c.pointer_overlap)),
                    fmt_complex(clean_complex(c.charge_element)),
                    c.max_disagreement,
                    if c.resolved { "" } else { " (unresolved)" }
                ));
            }
            r.set("theorem", theorem_json(&t));
        }
        Err(e @ (Error::NotConserving { .. } | Error::NotAMeasurement { .. })) => {
            r.fail();
            r.set("verdict", e.to_string());
            r.line(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::CommutatorPhase { g, h, beta1, beta2 } => format!(
            "beta({g},{h}) = {} vs {}",
            fmt_complex(clean_complex(*beta1)),
            fmt_complex(clean_complex(*beta2))
        ),
        Witness::NoPhaseFunction => "no phase function solves the coboundary equation".into(),
    }
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::CommutatorPhase { g, h, beta1, beta2 } => {
            json!({"kind": "commutator_phase", "g": g, "h": h, "beta1": rep::complex(*beta1), "beta2": rep::complex(*beta2)})
        }
        Witness::NoPhaseFunction => json!({"kind": "no_phase_function"}),
    }
}

fn similarity_json(s: &SimilarityReport) -> Value {
    let method = match s.method {
        SimilarityMethod::Invariant => "invariant",
        SimilarityMethod::Exhaustive => "exhaustive",
    };
    let verdict = match &s.verdict {
        Similarity::Similar(a) => json!({"similar": true, "alpha": rep::vector(a)}),
        Similarity::NotSimilar(w) => json!({"similar": false, "witness": witness_json(w)}),
        Similarity::Inconclusive(why) => json!({"similar": null, "reason": why}),
    };
    json!({"method": method, "candidates_examined": s.candidates_examined, "verdict": verdict})
}

fn similarity_text(s: &SimilarityReport, yes: &str, no: &str) -> String {
    match &s.verdict {
        Similarity::Similar(_) => yes.to_string(),
        Similarity::NotSimilar(w) => format!("{no} (witness {})", witness_text(w)),
        Similarity::Inconclusive(why) => format!("INCONCLUSIVE ({why})"),
    }
}

fn multiplier_json(w: &Multiplier) -> Value {
    let n = w.group().order();
    Value::Array(
        (0..n)
            .map(|g| Value::Array((0..n).map(|h| rep::complex(w.get(g, h))).collect()))
            .collect(),
    )
}

pub fn ray_rep(text: &str, _p: Params) -> Result<Report> {
    let inp: RayRepInput = input::parse(text)?;
    let mut r = Report::new(Status::Pass);

    let (group, omega_values, mut reps) = if let Some(name) = &inp.catalog {
        let entry =
            catalog_entry(name).ok_or_else(|| Error::InvalidInput(format!("unknown catalog entry {name:?}")))?;
        r.set("catalog", entry.name);
        r.line(format!("catalog: {} ({})", entry.name, entry.description));
        let g = entry.multiplier.group().clone();
        (g, Some(entry.multiplier.values().to_vec()), entry.reps)
    } else {
        let g = inp
            .group
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("need \"catalog\" or \"group\"".into()))?
            .to_group()?;
        let w = inp.multiplier.as_ref().map(|t| input::multiplier_values(&g, t)).transpose()?;
        (g, w, Vec::new())
    };
    if let Some(list) = &inp.reps {
        reps = list
            .iter()
            .map(|ms| ProjectiveRep::new(group.clone(), input::matrices(ms)?))
            .collect::<Result<Vec<_>>>()?;
    }
    r.set("group_order", group.order());
    let root_order = inp.root_order.unwrap_or_else(|| projective::default_root_order(&group));

    let omega = match omega_values {
        Some(vals) => {
            let chk = check_cocycle(&group, &vals)?;
            r.set(
                "cocycle",
                json!({"holds": chk.holds, "residual": chk.residual, "worst_triple": [chk.worst_triple.0, chk.worst_triple.1, chk.worst_triple.2]}),
            );
            if !chk.holds {
                r.fail();
                let (a, b, c) = chk.worst_triple;
                r.line(format!("cocycle FAILED at ({a}, {b}, {c}), residual {}", chk.residual));
                return Ok(r);
            }
            Some(Multiplier::new(group.clone(), vals)?)
        }
        None => reps.first().map(extract_multiplier).transpose()?,
    };

    if let Some(w) = &omega {
        let triv = is_trivial(w);
        let mut line = format!("cocycle OK; trivial: {}", similarity_text(&triv, "YES", "NO"));
        r.set("multiplier", multiplier_json(w));
        r.set("trivial", similarity_json(&triv));
        let one = Multiplier::trivial(group.clone());
        match is_similar(&one, w, SimilarityMethod::Exhaustive, root_order) {
            Ok(ex) => {
                line.push_str(&format!(
                    "; exhaustive search at root order {root_order}: {} ({} candidates)",
                    similarity_text(&ex, "YES", "NO"),
                    ex.candidates_examined
                ));
                r.set("trivial_exhaustive", similarity_json(&ex));
            }
            Err(Error::InvalidInput(why)) => {
                r.set("trivial_exhaustive", json!({"skipped": why}));
            }
            Err(e) => return Err(e),
        }
        r.line(line);

        if let Some(t) = &inp.compare {
            let w2 = Multiplier::new(group.clone(), input::multiplier_values(&group, t)?)?;
            let s = is_similar(w, &w2, SimilarityMethod::Invariant, root_order)?;
            r.line(format!("similar to comparison multiplier: {}", similarity_text(&s, "YES", "NO")));
            r.set("comparison", similarity_json(&s));
        }
    }

    if reps.len() >= 2 {
        match direct_sum_obstruction(&reps[0], &reps[1])? {
            DirectSum::Combinable { joint, alpha } => {
                r.line(format!(
                    "direct sum: combinable(alpha = [{}]), joint dim {}",
                    alpha.iter().map(|&z| fmt_complex(clean_complex(z))).collect::<Vec<_>>().join(", "),
                    joint.dim()
                ));
                r.set(
                    "direct_sum",
                    json!({"verdict": "combinable", "alpha": rep::vector(&alpha), "joint_dim": joint.dim(), "joint_scalar_defect": joint.worst_scalar_defect().2}),
                );
            }
            DirectSum::Obstructed { witness, naive_defect } => {
                r.line(format!(
                    "direct sum: obstructed ({}); block sum fails at ({}, {}) with non-scalar defect {}",
                    witness_text(&witness),
                    naive_defect.0,
                    naive_defect.1,
                    clean(naive_defect.2)
                ));
                r.set(
                    "direct_sum",
                    json!({"verdict": "obstructed", "witness": witness_json(&witness), "naive_defect": {"g": naive_defect.0, "h": naive_defect.1, "defect": naive_defect.2}}),
                );
            }
            DirectSum::Undecided(why) => {
                r.line(format!("direct sum: undecided ({why})"));
                r.set("direct_sum", json!({"verdict": "undecided", "reason": why}));
            }
        }
    }
    if omega.is_none() && reps.is_empty() {
        return Err(Error::InvalidInput("nothing to analyze: give a multiplier or representations".into()));
    }
    Ok(r)
}

pub fn channel(text: &str, p: Params) -> Result<Report> {
    let inp: ChannelInput = input::parse(text)?;
    let kraus = input::matrices(&inp.kraus)?;
    let ch = match inp.weights {
        Some(w) => QuantumChannel::weighted(kraus, w)?,
        None => QuantumChannel::from_kraus(kraus)?,
    };
    let mut r = Report::new(Status::Pass);
    let cp = is_cptp(&ch, p.tol)?;
    if !cp.passed() {
        r.fail();
    }
    r.set(
        "cptp",
        json!({"trace_defect": cp.trace_defect, "min_choi_eigenvalue": cp.min_choi_eigenvalue, "trace_preserving": cp.trace_preserving, "completely_positive": cp.completely_positive}),
    );
    r.line(format!(
        "CPTP: {} (trace defect {:e}, min Choi eigenvalue {})",
        Status::from_check(cp.passed()).label(),
        cp.trace_defect,
        clean(cp.min_choi_eigenvalue)
    ));

    if let Some(rj) = &inp.rep {
        let group = rj.group.to_group()?;
        let urep = UnitaryGroupRep::new(group, input::matrices(&rj.unitaries)?)?;
        let cov = is_covariant(&ch, &urep, p.tol)?;
        if !cov.covariant {
            r.fail();
        }
        r.set(
            "covariance",
            json!({"covariant": cov.covariant, "max_residual": cov.max_residual, "worst": [cov.worst.0, cov.worst.1, cov.worst.2]}),
        );
        r.line(format!(
            "covariance: {} (max residual {:e} at g = {})",
            Status::from_check(cov.covariant).label(),
            cov.max_residual,
            cov.worst.0
        ));
        let tw = twirl(&ch, &urep)?;
        let tcov = is_covariant(&tw, &urep, p.tol)?;
        let tcp = is_cptp(&tw, p.tol)?;
        r.set(
            "twirl",
            json!({"covariant": tcov.covariant, "max_residual": tcov.max_residual, "cptp": tcp.passed(), "kraus_count": tw.kraus().len()}),
        );
        r.line(format!(
            "twirled channel: covariance {} (max residual {:e}), CPTP {}",
            Status::from_check(tcov.covariant).label(),
            tcov.max_residual,
            Status::from_check(tcp.passed()).label()
        ));
    }
    Ok(r)
}

pub fn complex_list(v: &[Complex64]) -> String {
    v.iter().map(|&z| fmt_complex(clean_complex(z))).collect::<Vec<_>>().join(", ")
}
