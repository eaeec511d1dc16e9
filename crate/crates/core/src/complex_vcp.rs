//! Complex vector cross products on ℂⁿ ≅ ℝ²ⁿ (interleaved basis `x¹,y¹,x²,y²,…`).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{AlternatingTensor, ComplexAlternatingTensor, MAX_DIM};
use crate::linalg;
use crate::sampling;
use crate::vcp::{kahler_form, DefectReport, SampleCheck};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CVcpKind {
    /// Holomorphic volume form `dz¹∧…∧dzⁿ` on ℂⁿ.
    CalabiYau(usize),
    /// Holomorphic symplectic form `Σ dz^{2j−1}∧dz^{2j}` on ℂ²ᵐ.
    Hyperkahler(usize),
}

impl CVcpKind {
    /// Complex dimension and fold.
    pub fn dims(self) -> (usize, usize) {
        match self {
            CVcpKind::CalabiYau(n) => (n, n.saturating_sub(1)),
            CVcpKind::Hyperkahler(m) => (2 * m, 1),
        }
    }

    pub fn label(self) -> String {
        match self {
            CVcpKind::CalabiYau(n) => format!("cy:{n}"),
            CVcpKind::Hyperkahler(m) => format!("hk:{m}"),
        }
    }
}

/// Standard complex structure: `J∂x^j = ∂y^j`, `J∂y^j = −∂x^j`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// `dz^j = dx^j + i dy^j` on ℂⁿ (1-based `j`).
pub fn dz(n: usize, j: usize) -> Result<ComplexAlternatingTensor> {
    ComplexAlternatingTensor::new(
        AlternatingTensor::basis(2 * n, &[2 * j - 1])?,
        AlternatingTensor::basis(2 * n, &[2 * j])?,
    )
}

/// Endomorphism `A` with `form(u, v) = ⟨Au, v⟩`.
pub fn endomorphism_from_form(form: &AlternatingTensor) -> Result<DMatrix<f64>> {
    Ok(form.to_skew_matrix()?.transpose())
}

#[derive(Clone, Debug, PartialEq)]
pub struct HkData {
    pub omega_i: AlternatingTensor,
    pub omega_k: AlternatingTensor,
    pub i: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CVcpStructure {
    kind: CVcpKind,
    n: usize,
    r: usize,
    j: DMatrix<f64>,
    omega: AlternatingTensor,
    big_omega: ComplexAlternatingTensor,
    hk: Option<HkData>,
}

impl CVcpStructure {
    pub fn new(kind: CVcpKind) -> Result<Self> {
        let (n, r) = kind.dims();
        if n == 0 || 2 * n > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "{} exceeds the supported real dimension {MAX_DIM}",
                kind.label()
            )));
        }
        let big_omega = match kind {
            CVcpKind::CalabiYau(_) => {
                let mut acc = dz(n, 1)?;
                for j in 2..=n {
                    acc = acc.wedge(&dz(n, j)?)?;
                }
                acc
            }
            CVcpKind::Hyperkahler(m) => {
                let mut acc = dz(n, 1)?.wedge(&dz(n, 2)?)?;
                for p in 2..=m {
                    acc = acc.try_add(&dz(n, 2 * p - 1)?.wedge(&dz(n, 2 * p)?)?)?;
                }
                acc
            }
        };
        let hk = match kind {
            CVcpKind::Hyperkahler(_) => {
                let omega_i = big_omega.re().clone();
                let omega_k = big_omega.im().scaled(-1.0);
                Some(HkData {
                    i: endomorphism_from_form(&omega_i)?,
                    k: endomorphism_from_form(&omega_k)?,
                    omega_i,
                    omega_k,
                })
            }
            CVcpKind::CalabiYau(_) => None,
        };
        Ok(Self {
            kind,
            n,
            r,
            j: complex_structure(n),
            omega: kahler_form(n)?,
            big_omega,
            hk,
        })
    }

    pub fn kind(&self) -> CVcpKind {
        self.kind
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_real(&self) -> usize {
        2 * self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// Kähler form `ω = Σ dx^j∧dy^j`.
    pub fn omega(&self) -> &AlternatingTensor {
        &self.omega
    }

    pub fn big_omega(&self) -> &ComplexAlternatingTensor {
        &self.big_omega
    }

    pub fn hk(&self) -> Option<&HkData> {
        self.hk.as_ref()
    }

    /// `e^{iθ}Ω`.
    pub fn phase_rotate(&self, theta: f64) -> ComplexAlternatingTensor {
        self.big_omega.phase_rotate(theta)
    }

    /// `(I, J, K)` for the hyperkähler model.
    pub fn hk_triple(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let hk = self
            .hk
            .as_ref()
            .ok_or_else(|| Error::KindMismatch(format!("{} has no hyperkähler triple", self.kind.label())))?;
        Ok((hk.i.clone(), self.j.clone(), hk.k.clone()))
    }

    /// `J_θ = cos θ · I + sin θ · K`.
    pub fn j_theta(&self, theta: f64) -> Result<DMatrix<f64>> {
        let (i, _, k) = self.hk_triple()?;
        Ok(i * theta.cos() + k * theta.sin())
    }

    /// Sup of `| |ι_{ẽ₁∧…∧ẽ_r} Ω| − 2^{(r+1)/2} |` over sampled unitary frames.
    pub fn cvcp_defect(&self, samples: usize, seed: u64) -> CvcpDefect {
        cvcp_defect_of(&self.big_omega, &self.j, samples, seed)
    }

    /// Sup of `|ι_{Jv}Ω − i ι_vΩ|` over random unit `v`.
    pub fn type_check(&self, samples: usize, seed: u64) -> SampleCheck {
        type_check_of(&self.big_omega, &self.j, samples, seed)
    }

    /// `max |Jᵀ W J − W|` for the matrix `W` of ω.
    pub fn kahler_compatibility_residual(&self) -> f64 {
        let w = self.omega.to_skew_matrix().expect("ω has grade 2");
        (self.j.transpose() * &w * &self.j - w).amax()
    }

    /// Brute-force constant in `Ω∧Ω̄ = c · ωⁿ`.
    pub fn volume_pairing(&self) -> Result<VolumePairing> {
        if !matches!(self.kind, CVcpKind::CalabiYau(_)) {
            return Err(Error::KindMismatch("volume pairing needs a Calabi–Yau model".into()));
        }
        let n = self.n;
        let lhs = self.big_omega.wedge(&self.big_omega.conj())?;
        let mut omega_n = AlternatingTensor::scalar(2 * n, 1.0)?;
        for _ in 0..n {
            omega_n = omega_n.wedge(&self.omega)?;
        }
        let top: Vec<usize> = (1..=2 * n).collect();
        let denom = omega_n.coeff(&top);
        let (c_re, c_im) = (lhs.re().coeff(&top) / denom, lhs.im().coeff(&top) / denom);
        let residual = lhs
            .re()
            .max_abs_diff(&omega_n.scaled(c_re))
            .max(lhs.im().max_abs_diff(&omega_n.scaled(c_im)));
        let (half_scale_re, half_scale_im) = half_scale_volume_constant(n);
        Ok(VolumePairing {
            n,
            c_re,
            c_im,
            residual,
            half_scale_re,
            half_scale_im,
        })
    }
}

/// The alternative normalization `iⁿ(−1)^{n(n−1)/2} 2^{−n}/n!` as (re, im).
pub fn half_scale_volume_constant(n: usize) -> (f64, f64) {
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if (n * (n.saturating_sub(1)) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let mag = sign * 0.5f64.powi(n as i32) / factorial;
    match n % 4 {
        0 => (mag, 0.0),
        1 => (0.0, mag),
        2 => (-mag, 0.0),
        _ => (0.0, -mag),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumePairing {
    pub n: usize,
    pub c_re: f64,
    pub c_im: f64,
    /// Distance of `Ω∧Ω̄` from `c·ωⁿ`.
    pub residual: f64,
    pub half_scale_re: f64,
    pub half_scale_im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CvcpDefect {
    pub target: f64,
    /// `inf` when no unitary r-frame exists or the form has the wrong shape.
    pub report: DefectReport,
}

/// Unitary r-frame `a₁,…,a_r` (orthonormal with `a_i ⊥ J a_j`), or `None` if `r > n`.
pub fn random_unitary_frame<R: Rng + ?Sized>(rng: &mut R, j: &DMatrix<f64>, r: usize) -> Option<Vec<DVector<f64>>> {
    let dim = j.nrows();
    if 2 * r > dim {
        return None;
    }
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2 * r);
    let mut frame = Vec::with_capacity(r);
    while frame.len() < r {
        let mut a = linalg::gaussian_vector(rng, dim);
        let scale = a.norm();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&a);
                a.axpy(-c, q, 1.0);
            }
        }
        let norm = a.norm();
        if norm <= linalg::PIVOT_TOLERANCE * scale {
            continue;
        }
        let a = a / norm;
        let ja = j * &a;
        basis.push(a.clone());
        basis.push(ja);
        frame.push(a);
    }
    Some(frame)
}

/// `ι_{ẽ₁∧…∧ẽ_r} Ω` with `ẽ = (a − iJa)/√2`.
pub fn contract_unitary_frame(
    omega: &ComplexAlternatingTensor,
    j: &DMatrix<f64>,
    frame: &[DVector<f64>],
) -> Result<ComplexAlternatingTensor> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut acc = omega.clone();
    for a in frame {
        let q = -(j * a) * s;
        acc = acc.interior_complex(&(a * s), &q)?;
    }
    Ok(acc)
}

pub fn cvcp_defect_of(omega: &ComplexAlternatingTensor, j: &DMatrix<f64>, samples: usize, seed: u64) -> CvcpDefect {
    let grade = omega.grade();
    let r = grade.saturating_sub(1);
    let target = 2f64.powf(grade as f64 / 2.0);
    let infeasible = grade == 0 || j.nrows() != omega.dim() || 2 * r > omega.dim();
    if infeasible {
        return CvcpDefect {
            target,
            report: DefectReport {
                max_defect: f64::INFINITY,
                samples: 0,
                worst_frame: Vec::new(),
            },
        };
    }
    let results = sampling::par_map_seeded(samples, seed, |_, rng| {
        let frame = random_unitary_frame(rng, j, r).expect("feasibility checked");
        let value = contract_unitary_frame(omega, j, &frame).expect("shapes agree").norm();
        ((value - target).abs(), frame)
    });
    CvcpDefect {
        target,
        report: crate::vcp::worst_of(results),
    }
}

pub fn type_residual(omega: &ComplexAlternatingTensor, j: &DMatrix<f64>, v: &DVector<f64>) -> Result<f64> {
    let jv = j * v;
    let lhs = omega.interior_vector(&jv)?;
    let rhs = omega.interior_vector(v)?;
    // i·(A + iB) = −B + iA
    let re = lhs.re().try_add(rhs.im())?;
    let im = lhs.im().try_sub(rhs.re())?;
    Ok((re.norm_squared() + im.norm_squared()).sqrt())
}

pub fn type_check_of(omega: &ComplexAlternatingTensor, j: &DMatrix<f64>, samples: usize, seed: u64) -> SampleCheck {
    let dim = omega.dim();
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let v = linalg::random_unit_vector(rng, dim);
        type_residual(omega, j, &v).unwrap_or(f64::INFINITY)
    });
    SampleCheck::from_residuals(&residuals)
}

/// Residuals of the quaternion relations among `I`, `J`, `K`.
#[derive(Clone, Debug, Serialize)]
pub struct HamiltonResiduals {
    pub i_squared: f64,
    pub j_squared: f64,
    pub k_squared: f64,
    pub ijk: f64,
    pub ij_anticommute: f64,
    pub kj_anticommute: f64,
    pub i_eq_minus_kj: f64,
    pub k_eq_ij: f64,
}

impl HamiltonResiduals {
    pub fn of(i: &DMatrix<f64>, j: &DMatrix<f64>, k: &DMatrix<f64>) -> Self {
        let id = DMatrix::<f64>::identity(i.nrows(), i.ncols());
        HamiltonResiduals {
            i_squared: (i * i + &id).amax(),
            j_squared: (j * j + &id).amax(),
            k_squared: (k * k + &id).amax(),
            ijk: (i * j * k + &id).amax(),
            ij_anticommute: (i * j + j * i).amax(),
            kj_anticommute: (k * j + j * k).amax(),
            i_eq_minus_kj: (i + k * j).amax(),
            k_eq_ij: (k - i * j).amax(),
        }
    }

    pub fn max(&self) -> f64 {
        [
            self.i_squared,
            self.j_squared,
            self.k_squared,
            self.ijk,
            self.ij_anticommute,
            self.kj_anticommute,
            self.i_eq_minus_kj,
            self.k_eq_ij,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
