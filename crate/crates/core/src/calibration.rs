//! Pointwise predicates on oriented planes: calibration, instantons, branes and the t-map.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::complex_vcp::CVcpStructure;
use crate::error::{Error, Result};
use crate::exterior::AlternatingTensor;
use crate::linalg;
use crate::plane::OrientedPlane;
use crate::sampling;
use crate::vcp::{random_orthonormal_frame, SampleCheck, VcpKind, VcpStructure};

/// Default tolerance for the predicates.
pub const DEFAULT_TOL: f64 = 1e-8;

/// `φ(ξ_P)`, signed.
pub fn calibration_value(phi: &AlternatingTensor, p: &OrientedPlane) -> Result<f64> {
    if phi.grade() != p.k() {
        return Err(Error::GradeMismatch {
            expected: phi.grade(),
            found: p.k(),
        });
    }
    phi.evaluate(p.frame())
}

/// Returns the plane oriented so that `φ(ξ_P) ≥ 0`, and whether it was flipped.
pub fn align_orientation(phi: &AlternatingTensor, p: &OrientedPlane) -> Result<(OrientedPlane, bool)> {
    if calibration_value(phi, p)? < 0.0 {
        Ok((p.flipped(), true))
    } else {
        Ok((p.clone(), false))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstantonReport {
    pub is_instanton: bool,
    pub tau_norm: f64,
    pub cal_value: f64,
    /// `|φ(ξ)|² + |τ|² − 1`; small means the two tests agree.
    pub norm_identity_residual: f64,
}

pub fn instanton_test(s: &VcpStructure, p: &OrientedPlane, tol: f64) -> Result<InstantonReport> {
    if p.k() != s.r() + 1 || p.dim_ambient() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.r() + 1,
            found: p.k(),
        });
    }
    let tau_norm = s.tau(p.frame())?.norm();
    let cal_value = calibration_value(s.phi(), p)?;
    Ok(InstantonReport {
        is_instanton: tau_norm < tol,
        tau_norm,
        cal_value,
        norm_identity_residual: (cal_value * cal_value + tau_norm * tau_norm - 1.0).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BraneReport {
    pub form_vanishes: bool,
    pub dim_ok: bool,
    pub is_brane: bool,
    /// `‖φ|_C‖`.
    pub residual: f64,
}

pub fn brane_test(s: &VcpStructure, c: &OrientedPlane, tol: f64) -> Result<BraneReport> {
    if c.dim_ambient() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: c.dim_ambient(),
        });
    }
    let residual = if c.k() > s.r() {
        s.phi().restrict(c)?.norm()
    } else {
        0.0
    };
    let form_vanishes = residual < tol;
    let dim_ok = 2 * c.k() == s.n() + s.r() - 1;
    Ok(BraneReport {
        form_vanishes,
        dim_ok,
        is_brane: form_vanishes && dim_ok,
        residual,
    })
}

/// `t(α)(u₁,…,u_r) = α(χ(u₁,…,u_r))` on the brane `C`, in `C`'s frame coordinates.
pub fn t_map(s: &VcpStructure, c: &OrientedPlane, alpha: &DVector<f64>, tol: f64) -> Result<AlternatingTensor> {
    let brane = brane_test(s, c, tol)?;
    if !brane.is_brane {
        return Err(Error::NotBrane(format!(
            "dim_ok = {}, |φ|_C| = {:e}",
            brane.dim_ok, brane.residual
        )));
    }
    if alpha.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: alpha.len(),
        });
    }
    let tangential = (c.projector() * alpha).norm();
    if tangential > tol {
        return Err(Error::NotNormalToPlane { residual: tangential });
    }
    if (alpha.norm() - 1.0).abs() > tol {
        return Err(Error::InvalidParameter(format!(
            "α has norm {} (expected 1)",
            alpha.norm()
        )));
    }
    // α(χ(u…)) = φ(u…, α♯) = (−1)^r (ι_α φ)(u…)
    let sign = if s.r().is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(s.phi().interior_vector(alpha)?.pullback(c.frame())?.scaled(sign))
}

/// Sign `s` with `*t = s·t`, and the residual of that relation.
pub fn hodge_duality(t: &AlternatingTensor) -> (f64, f64) {
    let star = t.hodge_star();
    if star.grade() != t.grade() {
        return (0.0, f64::INFINITY);
    }
    let self_dual = star.max_abs_diff(t);
    let anti = star.max_abs_diff(&t.scaled(-1.0));
    if self_dual <= anti {
        (1.0, self_dual)
    } else {
        (-1.0, anti)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BoundaryOutcome {
    Orthogonal { residual: f64 },
    NotOrthogonal { residual: f64 },
    NotInstanton { tau_norm: f64 },
    FormNonvanishing { residual: f64 },
    FrameNotInIntersection { residual: f64 },
    FrameNotOrthonormal { residual: f64 },
}

impl BoundaryOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, BoundaryOutcome::Orthogonal { .. })
    }
}

/// Whether `χ(u₁,…,u_r) ⊥ C` for a frame of `A ∩ C`.
pub fn boundary_orthogonality_check(
    s: &VcpStructure,
    a: &OrientedPlane,
    c: &OrientedPlane,
    us: &[DVector<f64>],
) -> Result<BoundaryOutcome> {
    if us.len() != s.r() {
        return Err(Error::Arity {
            expected: s.r(),
            found: us.len(),
        });
    }
    let inst = instanton_test(s, a, DEFAULT_TOL)?;
    if !inst.is_instanton {
        return Ok(BoundaryOutcome::NotInstanton {
            tau_norm: inst.tau_norm,
        });
    }
    let brane = brane_test(s, c, DEFAULT_TOL)?;
    if !brane.form_vanishes {
        return Ok(BoundaryOutcome::FormNonvanishing {
            residual: brane.residual,
        });
    }
    let ortho = linalg::orthonormality_residual(us);
    if ortho > 1e-10 {
        return Ok(BoundaryOutcome::FrameNotOrthonormal { residual: ortho });
    }
    let outside = us.iter().map(|u| a.distance(u).max(c.distance(u))).fold(0.0, f64::max);
    if outside > 1e-10 {
        return Ok(BoundaryOutcome::FrameNotInIntersection { residual: outside });
    }
    let chi = s.chi(us)?;
    let residual = (c.projector() * chi).norm();
    Ok(if residual < 1e-10 {
        BoundaryOutcome::Orthogonal { residual }
    } else {
        BoundaryOutcome::NotOrthogonal { residual }
    })
}

/// `‖Π J Π − J Π‖_max`; zero iff the plane is `J`-invariant.
pub fn j_invariance_residual(p: &OrientedPlane, j: &DMatrix<f64>) -> f64 {
    let pi = p.projector();
    (&pi * j * &pi - j * &pi).amax()
}

fn restricted_norm(form: &AlternatingTensor, p: &OrientedPlane) -> Result<f64> {
    if form.grade() > p.k() {
        return Ok(0.0);
    }
    Ok(form.restrict(p)?.norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexPlaneClass {
    /// Special Lagrangian of phase θ (up to orientation).
    pub slag: bool,
    /// Whether orientation had to be reversed to reach `Re(e^{iθ}Ω)(ξ) = +1`.
    pub slag_flipped: bool,
    pub nbrane: bool,
    pub dbrane: bool,
    pub re_value: f64,
}

pub fn classify_complex_plane(s: &CVcpStructure, p: &OrientedPlane, theta: f64, tol: f64) -> Result<ComplexPlaneClass> {
    if p.dim_ambient() != s.dim_real() {
        return Err(Error::DimensionMismatch {
            expected: s.dim_real(),
            found: p.dim_ambient(),
        });
    }
    let n = s.n();
    let rotated = s.phase_rotate(theta);
    let omega_vanishes = restricted_norm(s.omega(), p)? < tol;
    let grade = s.big_omega().grade();

    let (mut slag, mut slag_flipped, mut re_value) = (false, false, 0.0);
    if p.k() == grade {
        re_value = rotated.re().evaluate(p.frame())?;
        let im_vanishes = restricted_norm(rotated.im(), p)? < tol;
        slag = p.k() == n && omega_vanishes && im_vanishes && (re_value.abs() - 1.0).abs() < tol;
        slag_flipped = slag && re_value < 0.0;
    }

    let nbrane = p.k() == n + s.r() - 1
        && restricted_norm(s.big_omega().re(), p)? < tol
        && restricted_norm(s.big_omega().im(), p)? < tol
        && j_invariance_residual(p, s.j()) < tol;

    let dbrane = p.k() == n && omega_vanishes && restricted_norm(rotated.re(), p)? < tol;

    Ok(ComplexPlaneClass {
        slag,
        slag_flipped,
        nbrane,
        dbrane,
        re_value,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HkInstantonReport {
    pub is_instanton: bool,
    /// `Re(e^{iθ}Ω)(ξ_P)`.
    pub value: f64,
    pub j_theta_residual: f64,
    /// J_θ-invariance agrees with `|value| = 1`.
    pub consistent: bool,
}

pub fn hk_instanton_test(s: &CVcpStructure, p: &OrientedPlane, theta: f64, tol: f64) -> Result<HkInstantonReport> {
    if p.k() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.k(),
        });
    }
    let j_theta = s.j_theta(theta)?;
    let value = s.phase_rotate(theta).re().evaluate(p.frame())?;
    let j_theta_residual = j_invariance_residual(p, &j_theta);
    let invariant = j_theta_residual < tol;
    Ok(HkInstantonReport {
        is_instanton: (value - 1.0).abs() < tol,
        value,
        j_theta_residual,
        consistent: invariant == ((value.abs() - 1.0).abs() < tol),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    pub preserves_chi: bool,
    pub chi_residual: f64,
    pub fixed_dim: usize,
    /// Present when σ preserves χ and the fixed set has dimension r+1.
    pub fixed_is_instanton: Option<bool>,
}

/// Checks an orthogonal involution against χ and tests its fixed set.
pub fn involution_fixed_check(
    s: &VcpStructure,
    sigma: &DMatrix<f64>,
    samples: usize,
    seed: u64,
) -> Result<InvolutionReport> {
    let n = s.n();
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigma.nrows(),
        });
    }
    let id = DMatrix::<f64>::identity(n, n);
    let residual = (sigma * sigma - &id)
        .amax()
        .max((sigma.transpose() * sigma - &id).amax());
    if residual > 1e-10 {
        return Err(Error::NotInvolution { residual });
    }
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let vs: Vec<DVector<f64>> = (0..s.r()).map(|_| linalg::random_unit_vector(rng, n)).collect();
        let moved: Vec<DVector<f64>> = vs.iter().map(|v| sigma * v).collect();
        let lhs = sigma * s.chi(&vs).expect("shapes agree");
        (lhs - s.chi(&moved).expect("shapes agree")).amax()
    });
    let chi_residual = residuals.iter().fold(0.0, |m: f64, r| m.max(*r));
    let preserves_chi = chi_residual < 1e-9;

    let half = (&id + sigma) * 0.5;
    let columns: Vec<DVector<f64>> = (0..n).map(|i| half.column(i).into_owned()).collect();
    let fixed = fixed_basis(&columns);
    let fixed_dim = fixed.len();

    let fixed_is_instanton = if preserves_chi && fixed_dim == s.r() + 1 {
        let plane = OrientedPlane::new(fixed)?;
        Some(instanton_test(s, &plane, DEFAULT_TOL)?.is_instanton)
    } else {
        None
    };
    Ok(InvolutionReport {
        preserves_chi,
        chi_residual,
        fixed_dim,
        fixed_is_instanton,
    })
}

/// Orthonormal basis of the column span, dropping near-zero residuals.
fn fixed_basis(columns: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in columns {
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&w);
                w.axpy(-d, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / norm);
        }
    }
    basis
}

/// A calibrated (r+1)-plane with `φ(ξ) = +1`.
pub fn standard_calibrated_plane(s: &VcpStructure) -> OrientedPlane {
    let axes: Vec<usize> = match s.kind() {
        VcpKind::Complex(_) => vec![1, 2],
        VcpKind::Volume(n) => (1..=n).collect(),
        VcpKind::G2 => vec![1, 2, 3],
        VcpKind::Spin7 => vec![1, 2, 3, 4],
    };
    let p = OrientedPlane::coordinate(s.n(), &axes).expect("valid axes");
    align_orientation(s.phi(), &p).expect("grade matches").0
}

/// A calibrated plane moved by a random element of the automorphism group.
pub fn random_calibrated_plane<R: Rng + ?Sized>(
    s: &VcpStructure,
    algebra: &[DMatrix<f64>],
    rng: &mut R,
) -> OrientedPlane {
    let n = s.n();
    let mut x = DMatrix::zeros(n, n);
    for z in algebra {
        x += z * rng.random_range(-2.0..2.0);
    }
    let g = x.exp();
    let frame: Vec<DVector<f64>> = standard_calibrated_plane(s).frame().iter().map(|f| &g * f).collect();
    OrientedPlane::from_vectors(&frame).expect("rotation keeps the frame independent")
}

/// Uniformly random oriented k-plane.
pub fn random_plane<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> OrientedPlane {
    OrientedPlane::new(random_orthonormal_frame(rng, n, k)).expect("orthonormal by construction")
}

#[derive(Clone, Debug, Serialize)]
pub struct ComassScan {
    pub samples: usize,
    pub max_value: f64,
    pub calibrated_value: f64,
}

/// Sup of `|φ(ξ)|` over random (r+1)-planes and the value at a known calibrated plane.
pub fn comass_scan(s: &VcpStructure, samples: usize, seed: u64) -> ComassScan {
    let k = s.r() + 1;
    let values = sampling::par_map_seeded(samples, seed, |_, rng| {
        let frame = random_orthonormal_frame(rng, s.n(), k);
        s.phi().evaluate(&frame).expect("shapes agree").abs()
    });
    ComassScan {
        samples,
        max_value: values.iter().fold(0.0, |m: f64, v| m.max(*v)),
        calibrated_value: calibration_value(s.phi(), &standard_calibrated_plane(s)).expect("grade matches"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceScan {
    pub random_planes: usize,
    /// Calibrated planes tested, the standard one included.
    pub calibrated_planes: usize,
    /// Calibrated planes on which both tests agreed positively.
    pub calibrated_confirmed: usize,
    /// Planes where `|φ(ξ)| > 1 − 1e−8` and `|τ| < 1e−8` disagree.
    pub discrepancies: usize,
}

/// Compares the calibration and instanton tests on `samples` random planes,
/// `samples / 10` random calibrated planes and the standard calibrated plane.
pub fn equivalence_scan(s: &VcpStructure, samples: usize, seed: u64) -> EquivalenceScan {
    let algebra = s.automorphism_algebra().elements;
    let calibrated = (samples / 10).max(1);
    let outcome = |p: &OrientedPlane| {
        let rep = instanton_test(s, p, 1e-8).expect("shapes agree");
        (rep.cal_value.abs() > 1.0 - 1e-8, rep.is_instanton)
    };
    let random = sampling::par_map_seeded(samples, seed, |_, rng| outcome(&random_plane(rng, s.n(), s.r() + 1)));
    let mut known = sampling::par_map_seeded(calibrated, sampling::derive_seed(seed, u64::MAX), |_, rng| {
        outcome(&random_calibrated_plane(s, &algebra, rng))
    });
    known.push(outcome(&standard_calibrated_plane(s)));
    let disagree = |v: &[(bool, bool)]| v.iter().filter(|(a, b)| a != b).count();
    EquivalenceScan {
        random_planes: samples,
        calibrated_planes: known.len(),
        calibrated_confirmed: known.iter().filter(|(a, b)| *a && *b).count(),
        discrepancies: disagree(&random) + disagree(&known),
    }
}

/// Tangential part of `χ(u₁,…,u_{r−1},ν)` for tangent `u` and normal `ν` of random instanton planes.
pub fn normal_closure_check(s: &VcpStructure, samples: usize, seed: u64) -> SampleCheck {
    let algebra = s.automorphism_algebra().elements;
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let a = random_calibrated_plane(s, &algebra, rng);
        let normals = a.complement();
        if normals.is_empty() {
            return 0.0;
        }
        let mut args: Vec<DVector<f64>> = (0..s.r() - 1).map(|_| random_in_span(rng, a.frame())).collect();
        args.push(random_in_span(rng, &normals));
        (a.projector() * s.chi(&args).expect("shapes agree")).norm()
    });
    SampleCheck::from_residuals(&residuals)
}

/// Components of `τ(p₁,…,p_r,ν)` in `Λ²P` and `Λ²N` for random instanton planes.
pub fn tau_decomposition_check(s: &VcpStructure, samples: usize, seed: u64) -> SampleCheck {
    let algebra = s.automorphism_algebra().elements;
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let a = random_calibrated_plane(s, &algebra, rng);
        let normals = a.complement();
        if normals.is_empty() {
            return 0.0;
        }
        let mut args: Vec<DVector<f64>> = (0..s.r()).map(|_| random_in_span(rng, a.frame())).collect();
        args.push(random_in_span(rng, &normals));
        let tau = s.tau(&args).expect("shapes agree");
        let on_p = tau.pullback(a.frame()).expect("shapes agree").norm();
        let on_n = if normals.len() >= 2 {
            tau.pullback(&normals).expect("shapes agree").norm()
        } else {
            0.0
        };
        on_p.max(on_n)
    });
    SampleCheck::from_residuals(&residuals)
}

fn random_in_span<R: Rng + ?Sized>(rng: &mut R, basis: &[DVector<f64>]) -> DVector<f64> {
    let coeffs = linalg::random_unit_vector(rng, basis.len());
    let mut v = DVector::zeros(basis[0].len());
    for (c, b) in coeffs.iter().zip(basis) {
        v.axpy(*c, b, 1.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_vcp::CVcpKind;
    use crate::vcp::vcp_form_defect;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn e(n: usize, i: usize) -> DVector<f64> {
        linalg::unit(n, i - 1)
    }

    fn plane(n: usize, axes: &[usize]) -> OrientedPlane {
        OrientedPlane::coordinate(n, axes).unwrap()
    }

    #[test]
    fn calibration_values() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert_eq!(calibration_value(g2.phi(), &plane(7, &[1, 2, 3])).unwrap(), 1.0);
        assert_eq!(calibration_value(g2.phi(), &plane(7, &[1, 2, 4])).unwrap(), 0.0);
        let c = VcpStructure::new(VcpKind::Complex(2)).unwrap();
        assert_eq!(calibration_value(c.phi(), &plane(4, &[1, 2])).unwrap(), 1.0);
        assert!(calibration_value(c.phi(), &plane(4, &[1])).is_err());
    }

    #[test]
    fn instanton_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let r = instanton_test(&g2, &plane(7, &[1, 2, 3]), DEFAULT_TOL).unwrap();
        assert!(r.is_instanton);
        let r = instanton_test(&g2, &plane(7, &[1, 2, 4]), DEFAULT_TOL).unwrap();
        assert!(!r.is_instanton);
        assert!((r.tau_norm - 1.0).abs() < 1e-14);
        let v = VcpStructure::new(VcpKind::Volume(4)).unwrap();
        let mut rng = sampling::rng_for(0, 0);
        assert!(
            instanton_test(&v, &random_plane(&mut rng, 4, 4), DEFAULT_TOL)
                .unwrap()
                .is_instanton
        );
        assert!(instanton_test(&g2, &plane(7, &[1, 2]), DEFAULT_TOL).is_err());
    }

    #[test]
    fn brane_examples() {
        let c = VcpStructure::new(VcpKind::Complex(3)).unwrap();
        assert!(brane_test(&c, &plane(6, &[1, 3, 5]), DEFAULT_TOL).unwrap().is_brane);
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert!(brane_test(&g2, &plane(7, &[4, 5, 6, 7]), DEFAULT_TOL).unwrap().is_brane);
        let s7 = VcpStructure::new(VcpKind::Spin7).unwrap();
        let mut rng = sampling::rng_for(1, 0);
        for _ in 0..50 {
            let r = brane_test(&s7, &random_plane(&mut rng, 8, 5), DEFAULT_TOL).unwrap();
            assert!(r.dim_ok && !r.form_vanishes && !r.is_brane);
        }
    }

    #[test]
    fn t_map_examples() {
        let c = VcpStructure::new(VcpKind::Complex(2)).unwrap();
        let lag = plane(4, &[1, 3]);
        let t = t_map(&c, &lag, &e(4, 2), DEFAULT_TOL).unwrap();
        // Oracle: dy¹(J u) on the frame (∂x¹, ∂x²).
        let j = crate::complex_vcp::complex_structure(2);
        for (i, u) in lag.frame().iter().enumerate() {
            assert_eq!(t.evaluate(&[linalg::unit(2, i)]).unwrap(), (&j * u)[1]);
        }
        assert_eq!(t, AlternatingTensor::basis(2, &[1]).unwrap());

        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let coassoc = plane(7, &[4, 5, 6, 7]);
        let t = t_map(&g2, &coassoc, &e(7, 1), DEFAULT_TOL).unwrap();
        assert!(vcp_form_defect(&t, 1, 1000, 3).unwrap().max_defect < 1e-9);
        let (sign, residual) = hodge_duality(&t);
        assert_eq!(sign, -1.0);
        assert!(residual < 1e-15);

        let v = VcpStructure::new(VcpKind::Volume(4)).unwrap();
        let t = t_map(&v, &plane(4, &[1, 2, 3]), &e(4, 4), DEFAULT_TOL).unwrap();
        assert_eq!(t.norm(), 1.0);
        assert_eq!(t.num_terms(), 1);

        assert!(matches!(
            t_map(&g2, &coassoc, &e(7, 4), DEFAULT_TOL),
            Err(Error::NotNormalToPlane { .. })
        ));
        assert!(matches!(
            t_map(&g2, &plane(7, &[1, 2, 3, 4]), &e(7, 5), DEFAULT_TOL),
            Err(Error::NotBrane(_))
        ));
    }

    #[test]
    fn t_map_duality_sign_is_uniform() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let coassoc = plane(7, &[4, 5, 6, 7]);
        let mut rng = sampling::rng_for(8, 0);
        for _ in 0..100 {
            let a = linalg::random_unit_vector(&mut rng, 3);
            let alpha = DVector::from_fn(7, |i, _| if i < 3 { a[i] } else { 0.0 });
            let t = t_map(&g2, &coassoc, &alpha, DEFAULT_TOL).unwrap();
            let (sign, residual) = hodge_duality(&t);
            assert_eq!(sign, -1.0);
            assert!(residual < 1e-12);
        }
    }

    #[test]
    fn boundary_examples() {
        let c = VcpStructure::new(VcpKind::Complex(2)).unwrap();
        let out = boundary_orthogonality_check(&c, &plane(4, &[1, 2]), &plane(4, &[1, 3]), &[e(4, 1)]).unwrap();
        assert!(out.holds());

        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let a = plane(7, &[1, 2, 3]);
        let out = boundary_orthogonality_check(&g2, &a, &plane(7, &[4, 5, 6, 7]), &[e(7, 1), e(7, 2)]).unwrap();
        assert!(matches!(out, BoundaryOutcome::FrameNotInIntersection { .. }));

        let cc = plane(7, &[1, 2, 5, 6]);
        assert!(brane_test(&g2, &cc, DEFAULT_TOL).unwrap().form_vanishes);
        let out = boundary_orthogonality_check(&g2, &a, &cc, &[e(7, 1), e(7, 2)]).unwrap();
        assert!(out.holds(), "{out:?}");

        let out = boundary_orthogonality_check(&g2, &plane(7, &[1, 2, 4]), &cc, &[e(7, 1), e(7, 2)]).unwrap();
        assert!(matches!(out, BoundaryOutcome::NotInstanton { .. }));
    }

    #[test]
    fn complex_plane_examples() {
        for n in 2..=4 {
            let s = CVcpStructure::new(CVcpKind::CalabiYau(n)).unwrap();
            let reals: Vec<usize> = (0..n).map(|k| 2 * k + 1).collect();
            let c = classify_complex_plane(&s, &plane(2 * n, &reals), 0.0, DEFAULT_TOL).unwrap();
            assert!(c.slag && !c.slag_flipped && !c.dbrane);

            let mut mixed = reals.clone();
            *mixed.last_mut().unwrap() = 2 * n;
            let p = plane(2 * n, &mixed);
            let c = classify_complex_plane(&s, &p, 0.0, DEFAULT_TOL).unwrap();
            assert!(c.dbrane && !c.slag);
            let c = classify_complex_plane(&s, &p, -FRAC_PI_2, DEFAULT_TOL).unwrap();
            assert!(c.slag);

            let hyper: Vec<usize> = (3..=2 * n).collect();
            let c = classify_complex_plane(&s, &plane(2 * n, &hyper), 0.0, DEFAULT_TOL).unwrap();
            assert!(c.nbrane);
            if n >= 3 {
                assert!(!c.slag);
            }
        }
    }

    #[test]
    fn hk_instanton_examples() {
        let s = CVcpStructure::new(CVcpKind::Hyperkahler(1)).unwrap();
        let r = hk_instanton_test(&s, &plane(4, &[1, 3]), 0.0, DEFAULT_TOL).unwrap();
        assert!(r.is_instanton && r.consistent);
        let r = hk_instanton_test(&s, &plane(4, &[1, 2]), 0.0, DEFAULT_TOL).unwrap();
        assert!(!r.is_instanton && r.consistent);
        let mut rng = sampling::rng_for(3, 0);
        for _ in 0..20 {
            let p = random_plane(&mut rng, 4, 2);
            let theta = rng.random_range(0.0..PI);
            let a = hk_instanton_test(&s, &p, theta, DEFAULT_TOL).unwrap();
            let b = hk_instanton_test(&s, &p, theta + 2.0 * PI, DEFAULT_TOL).unwrap();
            assert_eq!(a.is_instanton, b.is_instanton);
            assert!(a.consistent);
        }
    }

    #[test]
    fn involution_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]));
        let r = involution_fixed_check(&g2, &sigma, 200, 1).unwrap();
        assert!(r.preserves_chi);
        assert_eq!(r.fixed_dim, 3);
        assert_eq!(r.fixed_is_instanton, Some(true));

        let id = DMatrix::identity(7, 7);
        let r = involution_fixed_check(&g2, &id, 10, 1).unwrap();
        assert_eq!((r.fixed_dim, r.fixed_is_instanton), (7, None));

        let v = VcpStructure::new(VcpKind::Volume(3)).unwrap();
        let r = involution_fixed_check(&v, &DMatrix::identity(3, 3), 10, 1).unwrap();
        assert_eq!(r.fixed_is_instanton, Some(true));

        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
        assert!(matches!(
            involution_fixed_check(&v, &bad, 10, 1),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn sampled_calibration_properties() {
        for kind in [VcpKind::Complex(2), VcpKind::Volume(4), VcpKind::G2, VcpKind::Spin7] {
            let s = VcpStructure::new(kind).unwrap();
            let scan = comass_scan(&s, 5000, 2);
            assert!(scan.max_value <= 1.0 + 1e-9, "{kind:?}");
            assert!(scan.calibrated_value >= 1.0 - 1e-6);
            let scan = equivalence_scan(&s, 500, 2);
            assert_eq!(scan.discrepancies, 0);
            assert_eq!(scan.calibrated_confirmed, scan.calibrated_planes);
            assert!(normal_closure_check(&s, 200, 2).max_residual < 1e-10, "{kind:?}");
            assert!(tau_decomposition_check(&s, 200, 2).max_residual < 1e-10, "{kind:?}");
        }
    }
}
