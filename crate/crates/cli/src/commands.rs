use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crosscal::calibration::{
    brane_test, classify_complex_plane, comass_scan, equivalence_scan, hodge_duality, instanton_test,
    normal_closure_check, t_map, tau_decomposition_check,
};
use crosscal::complex_vcp::{cvcp_defect_of, CVcpKind, CVcpStructure, HamiltonResiduals};
use crosscal::grassmann::{minimize, nonexistence_scan, Objective, OptResult, OptimizerConfig};
use crosscal::knot::{self, DiscretizedKnot, FieldJson, NormalField};
use crosscal::octonion::{cross3_form, multiplication_table};
use crosscal::sampling::derive_seed;
use crosscal::vcp::{chi_axiom_check, norm_identity_check, tau_g_perp_check, vcp_form_defect, VcpKind, VcpStructure};
use crosscal::OrientedPlane;

use crate::{
    Check, Common, FindArgs, InputError, KnotArgs, KnotCheck, ObjectiveArg, Outcome, Selector, StructureArgs,
    VerifyArgs,
};

fn selector(text: &str) -> Result<Selector, InputError> {
    text.parse().map_err(InputError)
}

fn coordinate_plane(dim: usize, axes: &[usize]) -> OrientedPlane {
    OrientedPlane::coordinate(dim, axes).expect("valid axes")
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    crosscal::linalg::unit(n, i)
}

pub fn tables(_common: &Common, args: &StructureArgs) -> Result<Outcome, InputError> {
    match selector(&args.structure)? {
        Selector::Real(kind) => {
            let s = VcpStructure::new(kind)?;
            let algebra = s.automorphism_algebra();
            let expected = kind.expected_automorphism_dim();
            let mut data = json!({
                "n": s.n(),
                "r": s.r(),
                "phi": s.phi(),
                "automorphism_dim": algebra.dim,
                "expected_automorphism_dim": expected,
            });
            if kind == VcpKind::G2 {
                data["octonion_table"] = json!(multiplication_table());
                data["cross3_form"] = json!(cross3_form());
            }
            let check = Check::flag("automorphism_dim", algebra.dim as f64, algebra.dim == expected)
                .with_detail(json!({ "gap_decades": algebra.gap_decades() }));
            Ok(Outcome {
                checks: vec![check],
                data,
            })
        }
        Selector::Complex(kind) => {
            let s = CVcpStructure::new(kind)?;
            let mut data = json!({
                "complex_dim": s.n(),
                "r": s.r(),
                "omega": s.omega(),
                "big_omega": s.big_omega(),
            });
            if let Some(hk) = s.hk() {
                data["omega_i"] = json!(hk.omega_i);
                data["omega_k"] = json!(hk.omega_k);
            }
            let checks = match kind {
                CVcpKind::CalabiYau(_) => {
                    let vp = s.volume_pairing()?;
                    vec![Check::at_most("volume_pairing", vp.residual, 1e-9).with_detail(&vp)]
                }
                CVcpKind::Hyperkahler(_) => {
                    let (i, j, k) = s.hk_triple()?;
                    let h = HamiltonResiduals::of(&i, &j, &k);
                    vec![Check::at_most("hamilton_relations", h.max(), 1e-12).with_detail(&h)]
                }
            };
            Ok(Outcome { checks, data })
        }
    }
}

pub fn verify(common: &Common, args: &VerifyArgs) -> Result<Outcome, InputError> {
    let checks = match selector(&args.structure)? {
        Selector::Real(kind) => verify_real(common, kind)?,
        Selector::Complex(kind) => verify_complex(common, kind, args.theta)?,
    };
    Ok(Outcome {
        checks,
        data: Value::Null,
    })
}

fn verify_real(common: &Common, kind: VcpKind) -> Result<Vec<Check>, InputError> {
    let s = VcpStructure::new(kind)?;
    let (n, seed) = (common.samples, common.seed);
    let sub = |k: u64| derive_seed(seed, k);
    let mut checks = Vec::new();

    let defect = vcp_form_defect(s.phi(), s.r(), n, sub(0))?;
    checks.push(Check::at_most("vcp_form_defect", defect.max_defect, 1e-9));
    checks.push(Check::at_most(
        "chi_axioms",
        chi_axiom_check(&s, n, sub(1)).max_residual,
        1e-10,
    ));
    checks.push(Check::at_most(
        "norm_identity",
        norm_identity_check(&s, n, sub(2)).max_residual,
        1e-9,
    ));

    let algebra = s.automorphism_algebra();
    let expected = kind.expected_automorphism_dim();
    checks.push(
        Check::flag(
            "automorphism_dim",
            algebra.dim as f64,
            algebra.dim == expected && algebra.gap_decades() > 6.0,
        )
        .with_detail(json!({ "expected": expected, "gap_decades": algebra.gap_decades() })),
    );
    checks.push(Check::at_most(
        "tau_g_perp",
        tau_g_perp_check(&s, &algebra, n, sub(3)).max_residual,
        1e-9,
    ));

    let eq = equivalence_scan(&s, n, sub(4));
    checks.push(
        Check::flag(
            "instanton_equivalence",
            eq.discrepancies as f64,
            eq.discrepancies == 0 && eq.calibrated_confirmed == eq.calibrated_planes,
        )
        .with_detail(&eq),
    );
    let comass = comass_scan(&s, n, sub(5));
    checks.push(
        Check::flag(
            "comass",
            comass.max_value,
            comass.max_value <= 1.0 + 1e-9 && (comass.calibrated_value - 1.0).abs() < 1e-12,
        )
        .with_detail(&comass),
    );
    let closure_samples = (n / 10).max(1);
    checks.push(Check::at_most(
        "normal_closure",
        normal_closure_check(&s, closure_samples, sub(6)).max_residual,
        1e-9,
    ));
    checks.push(Check::at_most(
        "tau_decomposition",
        tau_decomposition_check(&s, closure_samples, sub(7)).max_residual,
        1e-9,
    ));

    if kind == VcpKind::G2 {
        let coassoc = coordinate_plane(7, &[4, 5, 6, 7]);
        let brane = brane_test(&s, &coassoc, 1e-8)?;
        checks.push(Check::flag("coassociative_brane", brane.residual, brane.is_brane));
        let t = t_map(&s, &coassoc, &unit(7, 0), 1e-8)?;
        let t_defect = vcp_form_defect(&t, 1, closure_samples, sub(8))?;
        checks.push(Check::at_most("t_map_vcp_defect", t_defect.max_defect, 1e-9));
        let (sign, residual) = hodge_duality(&t);
        checks.push(Check::at_most("t_map_duality", residual, 1e-12).with_detail(json!({ "sign": sign })));
    }
    Ok(checks)
}

fn verify_complex(common: &Common, kind: CVcpKind, theta: f64) -> Result<Vec<Check>, InputError> {
    let s = CVcpStructure::new(kind)?;
    let (n, seed) = (common.samples, common.seed);
    let sub = |k: u64| derive_seed(seed, k);
    let mut checks = Vec::new();

    let defect = s.cvcp_defect(n, sub(0));
    checks.push(
        Check::at_most("cvcp_defect", defect.report.max_defect, 1e-9).with_detail(json!({ "target": defect.target })),
    );
    checks.push(Check::at_most("type", s.type_check(n, sub(1)).max_residual, 1e-9));
    checks.push(Check::at_most(
        "kahler_compatibility",
        s.kahler_compatibility_residual(),
        1e-12,
    ));
    if let CVcpKind::CalabiYau(_) = kind {
        let vp = s.volume_pairing()?;
        checks.push(Check::at_most("volume_pairing", vp.residual, 1e-9).with_detail(&vp));
    }
    let rotated = cvcp_defect_of(&s.phase_rotate(theta), s.j(), n, sub(2));
    checks.push(
        Check::at_most("rotated_cvcp_defect", rotated.report.max_defect, 1e-9).with_detail(json!({ "theta": theta })),
    );

    let dim = s.dim_real();
    match kind {
        CVcpKind::Hyperkahler(_) => {
            let (i, j, k) = s.hk_triple()?;
            let h = HamiltonResiduals::of(&i, &j, &k);
            checks.push(Check::at_most("hamilton_relations", h.max(), 1e-12).with_detail(&h));
            let jt = s.j_theta(theta)?;
            let sq = (&jt * &jt + DMatrix::<f64>::identity(dim, dim)).amax();
            checks.push(Check::at_most("j_theta_squared", sq, 1e-12));
        }
        CVcpKind::CalabiYau(m) => {
            let reals: Vec<usize> = (0..m).map(|k| 2 * k + 1).collect();
            let mut rotated_axes = reals.clone();
            *rotated_axes.last_mut().expect("m >= 1") = 2 * m;
            let hyper: Vec<usize> = (3..=dim).collect();
            let real = classify_complex_plane(&s, &coordinate_plane(dim, &reals), 0.0, 1e-9)?;
            checks.push(
                Check::flag("real_slice_slag", real.re_value, real.slag && !real.slag_flipped).with_detail(&real),
            );
            let p = coordinate_plane(dim, &rotated_axes);
            let at_zero = classify_complex_plane(&s, &p, 0.0, 1e-9)?;
            let at_minus = classify_complex_plane(&s, &p, -FRAC_PI_2, 1e-9)?;
            checks.push(
                Check::flag("rotated_slice_slag", at_minus.re_value, at_minus.slag && at_zero.dbrane)
                    .with_detail(json!({ "phase_minus_half_pi": at_minus, "phase_zero": at_zero })),
            );
            if m >= 2 {
                let h = classify_complex_plane(&s, &coordinate_plane(dim, &hyper), 0.0, 1e-9)?;
                checks.push(Check::flag("complex_hyperplane_nbrane", 0.0, h.nbrane).with_detail(&h));
            }
        }
    }
    Ok(checks)
}

fn run_summary(runs: &[OptResult]) -> Value {
    json!(runs
        .iter()
        .map(|r| json!({ "defect": r.defect, "iterations": r.iterations, "converged": r.converged }))
        .collect::<Vec<_>>())
}

fn best_run(runs: &[OptResult]) -> Option<&OptResult> {
    runs.iter().min_by(|a, b| a.defect.total_cmp(&b.defect))
}

pub fn find(common: &Common, args: &FindArgs) -> Result<Outcome, InputError> {
    let kind = match selector(&args.structure)? {
        Selector::Real(kind) => kind,
        Selector::Complex(_) => {
            return Err(InputError(
                "find needs a real structure (complex, volume, g2, spin7)".into(),
            ))
        }
    };
    let s = VcpStructure::new(kind)?;
    let cfg = OptimizerConfig {
        restarts: args.restarts,
        max_iter: args.max_iter,
        tol: common.tol.unwrap_or(1e-10),
        seed: common.seed,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    let k = match (args.k, args.objective) {
        (Some(k), _) => k,
        (None, ObjectiveArg::Instanton) => s.r() + 1,
        (None, ObjectiveArg::Brane) => {
            let twice = s.n() + s.r() - 1;
            if twice % 2 == 1 {
                return Err(InputError("no brane dimension for this structure; pass --k".into()));
            }
            twice / 2
        }
    };
    let mut checks = Vec::new();
    let data = match args.objective {
        ObjectiveArg::Brane if kind == VcpKind::Spin7 && k == 5 => {
            let scan = nonexistence_scan(&s, k, &cfg)?;
            checks.push(Check::flag(
                "min_brane_residual",
                scan.min_residual,
                scan.min_residual > 0.01,
            ));
            checks.push(Check::flag(
                "converged_runs",
                scan.converged_runs as f64,
                scan.converged_runs == 0,
            ));
            json!({ "k": k, "objective": "brane", "runs": run_summary(&scan.runs) })
        }
        objective => {
            let obj = match objective {
                ObjectiveArg::Instanton => Objective::Instanton,
                ObjectiveArg::Brane => Objective::Brane,
            };
            let runs = minimize(&s, obj, k, &cfg)?;
            let converged: Vec<&OptResult> = runs.iter().filter(|r| r.converged).collect();
            checks.push(Check::flag(
                "converged_runs",
                converged.len() as f64,
                !converged.is_empty(),
            ));
            let mut confirmed = 0;
            for r in &converged {
                let ok = match obj {
                    Objective::Instanton => instanton_test(&s, &r.plane, 1e-6)?.is_instanton,
                    Objective::Brane => brane_test(&s, &r.plane, 1e-6)?.form_vanishes,
                };
                confirmed += ok as usize;
            }
            checks.push(Check::flag(
                "converged_confirmed",
                confirmed as f64,
                confirmed == converged.len(),
            ));
            json!({
                "k": k,
                "objective": objective,
                "runs": run_summary(&runs),
                "best_plane": best_run(&runs).map(|r| &r.plane),
            })
        }
    };
    Ok(Outcome { checks, data })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn real_structure(sel: Selector) -> Result<VcpStructure, InputError> {
    match sel {
        Selector::Real(kind) => Ok(VcpStructure::new(kind)?),
        Selector::Complex(_) => Err(InputError("this knot check needs a real structure".into())),
    }
}

fn two_fields(fields: &[NormalField]) -> Result<(&NormalField, &NormalField), InputError> {
    match fields {
        [a, b] => Ok((a, b)),
        _ => Err(InputError(format!(
            "this check needs exactly two --field files, got {}",
            fields.len()
        ))),
    }
}

pub fn knot(common: &Common, args: &KnotArgs) -> Result<Outcome, InputError> {
    let sel = selector(&args.structure)?;
    let k: DiscretizedKnot = read_json(&args.input)?;
    let fields = args
        .field
        .iter()
        .map(|p| Ok(NormalField::from_json(&k, read_json::<FieldJson>(p)?)?))
        .collect::<Result<Vec<_>, InputError>>()?;
    let (n, seed) = (common.samples, common.seed);
    let check = match args.check {
        KnotCheck::Compatibility => {
            let s = real_structure(sel)?;
            Check::at_most(
                "compatibility",
                knot::compatibility_check(&s, &k, n, seed)?.max_residual,
                1e-9,
            )
        }
        KnotCheck::JSquared => {
            let s = real_structure(sel)?;
            Check::at_most("j_squared", knot::j_squared_check(&s, &k, n, seed)?.max_residual, 1e-10)
        }
        KnotCheck::Omega => {
            let s = real_structure(sel)?;
            let (u, v) = two_fields(&fields)?;
            let t = knot::Transgression::new(&s, &k)?;
            let omega = t.omega(u, v)?;
            let g = knot::g_k(&k, &t.j(u)?, v)?;
            Check::at_most("omega", (omega - g).abs(), 1e-9).with_detail(json!({ "omega": omega, "g_ju_v": g }))
        }
        KnotCheck::Isotropy => {
            let omega = match sel {
                Selector::Complex(kind) => CVcpStructure::new(kind)?.omega().clone(),
                Selector::Real(VcpKind::Complex(m)) => crosscal::vcp::kahler_form(m)?,
                Selector::Real(_) => return Err(InputError("isotropy needs a Kähler structure".into())),
            };
            Check::at_most(
                "isotropy",
                knot::isotropy_check(&k, &omega)?,
                common.tol.unwrap_or(1e-8),
            )
        }
        KnotCheck::Quotient => {
            let s = match sel {
                Selector::Complex(kind @ CVcpKind::CalabiYau(_)) => CVcpStructure::new(kind)?,
                _ => return Err(InputError("quotient needs a cy:n structure".into())),
            };
            let q = knot::quotient_structures(&s, &k)?;
            let hamilton = knot::hamilton_check(&q);
            let normalization = knot::fiber_cvcp_defect(&q, (n / 100).max(1), seed);
            let invariance = knot::fiber_j_invariance(&s, &q);
            let worst = hamilton.max(normalization).max(invariance);
            Check::at_most("quotient", worst, 1e-9).with_detail(json!({
                "fiber_rank": q.fibers.first().map(|f| f.basis.len()),
                "hamilton": hamilton,
                "fiber_cvcp_defect": normalization,
                "j_invariance": invariance,
                "isotropy": q.isotropy,
            }))
        }
        KnotCheck::Submersion => {
            let s = real_structure(sel)?;
            let (nu, mu) = two_fields(&fields)?;
            let rep = knot::submersion_inequality_check(&s, &k, nu, mu)?;
            Check::flag("submersion", rep.slack, rep.holds).with_detail(&rep)
        }
    };
    let data = json!({
        "check": args.check,
        "residual": check.value,
        "pass": check.pass,
        "witnesses": check.detail,
    });
    Ok(Outcome {
        checks: vec![check],
        data,
    })
}
