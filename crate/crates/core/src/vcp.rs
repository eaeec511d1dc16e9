//! The four real vector cross products, their forms, χ, τ and the automorphism algebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{subsets, AlternatingTensor, MAX_DIM};
use crate::linalg;
use crate::sampling;

/// Singular-value threshold for the automorphism nullspace.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VcpKind {
    /// 1-fold product (the complex structure) on ℂᵐ.
    Complex(usize),
    /// (n−1)-fold product from the volume form on ℝⁿ.
    Volume(usize),
    G2,
    Spin7,
}

impl VcpKind {
    /// Ambient dimension and fold.
    pub fn dims(self) -> (usize, usize) {
        match self {
            VcpKind::Complex(m) => (2 * m, 1),
            VcpKind::Volume(n) => (n, n.saturating_sub(1)),
            VcpKind::G2 => (7, 2),
            VcpKind::Spin7 => (8, 3),
        }
    }

    pub fn label(self) -> String {
        match self {
            VcpKind::Complex(m) => format!("complex:{m}"),
            VcpKind::Volume(n) => format!("volume:{n}"),
            VcpKind::G2 => "g2".into(),
            VcpKind::Spin7 => "spin7".into(),
        }
    }

    /// Expected dimension of the automorphism algebra (u(m), so(n), g₂, spin(7)).
    pub fn expected_automorphism_dim(self) -> usize {
        match self {
            VcpKind::Complex(m) => m * m,
            VcpKind::Volume(n) => n * (n - 1) / 2,
            VcpKind::G2 => 14,
            VcpKind::Spin7 => 21,
        }
    }
}

/// The G₂ 3-form on ℝ⁷.
pub fn g2_form() -> AlternatingTensor {
    AlternatingTensor::from_terms(
        7,
        3,
        [
            (vec![1, 2, 3], 1.0),
            (vec![1, 6, 7], -1.0),
            (vec![1, 4, 5], 1.0),
            (vec![2, 5, 7], 1.0),
            (vec![2, 4, 6], 1.0),
            (vec![3, 5, 6], -1.0),
            (vec![3, 4, 7], 1.0),
        ],
    )
    .expect("constant form")
}

/// The Cayley 4-form on ℝ⁸, assembled from its factored expression.
pub fn cayley_form() -> AlternatingTensor {
    let dx = |i: usize, j: usize| AlternatingTensor::basis(8, &[i, j]).expect("valid indices");
    let sum = |a: AlternatingTensor, b: AlternatingTensor| &a + &b;
    let pair = |a: AlternatingTensor, b: AlternatingTensor| a.wedge(&b).expect("grade 4 fits");
    let mut theta = &AlternatingTensor::basis(8, &[1, 2, 3, 4]).unwrap() * -1.0;
    theta = &theta - &AlternatingTensor::basis(8, &[5, 6, 7, 8]).unwrap();
    theta = &theta - &pair(sum(dx(2, 1), dx(3, 4)), sum(dx(6, 5), dx(7, 8)));
    theta = &theta - &pair(sum(dx(3, 1), dx(4, 2)), sum(dx(7, 5), dx(8, 6)));
    theta = &theta - &pair(sum(dx(4, 1), dx(2, 3)), sum(dx(8, 5), dx(6, 7)));
    theta
}

/// `Σ_j dx^j∧dy^j` in the interleaved basis `(x¹,y¹,x²,y²,…)`.
pub fn kahler_form(m: usize) -> Result<AlternatingTensor> {
    AlternatingTensor::from_terms(2 * m, 2, (1..=m).map(|j| (vec![2 * j - 1, 2 * j], 1.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VcpStructure {
    kind: VcpKind,
    n: usize,
    r: usize,
    phi: AlternatingTensor,
}

impl VcpStructure {
    pub fn new(kind: VcpKind) -> Result<Self> {
        let (n, r) = kind.dims();
        let phi = match kind {
            VcpKind::Complex(m) => {
                if m == 0 || 2 * m > MAX_DIM {
                    return Err(Error::InvalidParameter(format!(
                        "complex dimension m = {m} must be in 1..=6"
                    )));
                }
                kahler_form(m)?
            }
            VcpKind::Volume(n) => {
                if !(2..=MAX_DIM).contains(&n) {
                    return Err(Error::InvalidParameter(format!(
                        "volume dimension n = {n} must be in 2..=12"
                    )));
                }
                AlternatingTensor::volume(n)?
            }
            VcpKind::G2 => g2_form(),
            VcpKind::Spin7 => cayley_form(),
        };
        Ok(Self { kind, n, r, phi })
    }

    pub fn kind(&self) -> VcpKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn phi(&self) -> &AlternatingTensor {
        &self.phi
    }

    fn check_vectors(&self, vs: &[DVector<f64>], arity: usize) -> Result<()> {
        if vs.len() != arity {
            return Err(Error::Arity {
                expected: arity,
                found: vs.len(),
            });
        }
        for v in vs {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    /// `χ(v₁,…,v_r)`, the metric dual of `ι_{v₁∧…∧v_r} φ`.
    pub fn chi(&self, vs: &[DVector<f64>]) -> Result<DVector<f64>> {
        self.check_vectors(vs, self.r)?;
        self.phi.interior_vectors(vs)?.to_vector()
    }

    /// `φ(v₁,…,v_{r+1})`.
    pub fn phi_value(&self, vs: &[DVector<f64>]) -> Result<f64> {
        self.check_vectors(vs, self.r + 1)?;
        self.phi.evaluate(vs)
    }

    /// `τ(v₁,…,v_{r+1}) = (r+1)^{-1/2} Σ_k (−1)^{k−1} v_k ∧ χ(v₁,…,v̂_k,…,v_{r+1})`.
    pub fn tau(&self, vs: &[DVector<f64>]) -> Result<AlternatingTensor> {
        self.check_vectors(vs, self.r + 1)?;
        let mut acc = AlternatingTensor::zero(self.n, 2)?;
        for k in 0..vs.len() {
            let rest: Vec<DVector<f64>> = vs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, v)| v.clone())
                .collect();
            let chi = self.chi(&rest)?;
            let term = AlternatingTensor::wedge_vectors(self.n, &[vs[k].clone(), chi])?;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc.try_add(&term.scaled(sign))?;
        }
        Ok(acc.scaled(1.0 / ((self.r + 1) as f64).sqrt()))
    }

    /// Nullspace of the derivation constraints over skew matrices.
    pub fn automorphism_algebra(&self) -> LieSubalgebraBasis {
        automorphism_algebra_of(&self.phi)
    }

    /// The form `ι_ν φ` restricted to `ν^⊥`, with the basis used for `ν^⊥`.
    pub fn induced_hypersurface_vcp(&self, nu: &DVector<f64>) -> Result<InducedForm> {
        if nu.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: nu.len(),
            });
        }
        let norm = nu.norm();
        if norm < linalg::PIVOT_TOLERANCE {
            return Err(Error::ZeroVector);
        }
        let nu = nu / norm;
        let basis = oriented_complement(&nu);
        let form = self.phi.interior_vector(&nu)?.pullback(&basis)?;
        Ok(InducedForm { form, basis })
    }
}

/// Orthonormal basis `b` of `ν^⊥` with `(ν, b₁,…,b_{n−1})` positively oriented.
///
/// Built by Gram–Schmidt on the standard basis with the axis of largest `|ν_i|` left out,
/// so `ν = e_n` yields `(e₁,…,e_{n−1})`.
pub fn oriented_complement(nu: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = nu.len();
    let drop = nu.iamax();
    let mut vectors = vec![nu.clone()];
    vectors.extend((0..n).filter(|&i| i != drop).map(|i| linalg::unit(n, i)));
    let mut q = linalg::gram_schmidt(&vectors, 1e-12).expect("ν has a nonzero entry on the dropped axis");
    let m = DMatrix::from_columns(&q);
    if m.determinant() < 0.0 {
        let last = q.len() - 1;
        q[last] = -q[last].clone();
    }
    q.remove(0);
    q
}

#[derive(Clone, Debug)]
pub struct InducedForm {
    pub form: AlternatingTensor,
    pub basis: Vec<DVector<f64>>,
}

/// Orthonormal basis of a subalgebra of so(n).
#[derive(Clone, Debug)]
pub struct LieSubalgebraBasis {
    pub elements: Vec<DMatrix<f64>>,
    pub dim: usize,
    /// Smallest singular value classified as nonzero.
    pub smallest_kept: f64,
    /// Largest singular value classified as zero.
    pub largest_null: f64,
}

impl LieSubalgebraBasis {
    /// `log₁₀(smallest_kept / largest_null)`; large means a clean rank decision.
    pub fn gap_decades(&self) -> f64 {
        (self.smallest_kept / self.largest_null.max(f64::MIN_POSITIVE)).log10()
    }
}

/// `E_ab = e_a e_bᵀ − e_b e_aᵀ` for `a < b`; unit length under `½ tr(AᵀB)`.
fn skew_basis(n: usize) -> Vec<(usize, usize)> {
    subsets(n, 2).into_iter().map(|s| (s[0], s[1])).collect()
}

fn skew_from_coords(n: usize, coords: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for (c, (a, b)) in coords.iter().zip(skew_basis(n)) {
        m[(a, b)] += c;
        m[(b, a)] -= c;
    }
    m
}

/// `Σ_i φ(e_{j₁},…,ζe_{j_i},…,e_{j_{k}})` over every k-subset `J`.
pub fn derivation_residual(phi: &AlternatingTensor, zeta: &DMatrix<f64>) -> f64 {
    let n = phi.dim();
    let k = phi.grade();
    let mut worst: f64 = 0.0;
    for j in subsets(n, k) {
        let mut total = 0.0;
        for slot in 0..k {
            let mut seq = j.clone();
            for c in 0..n {
                let z = zeta[(c, j[slot])];
                if z != 0.0 {
                    seq[slot] = c;
                    total += z * phi.coeff_seq(&seq);
                }
            }
        }
        worst = worst.max(total.abs());
    }
    worst
}

pub fn automorphism_algebra_of(phi: &AlternatingTensor) -> LieSubalgebraBasis {
    let n = phi.dim();
    let k = phi.grade();
    let pairs = skew_basis(n);
    let rows = subsets(n, k);
    let mut a = DMatrix::zeros(rows.len(), pairs.len());
    for (row, j) in rows.iter().enumerate() {
        for (col, &(p, q)) in pairs.iter().enumerate() {
            // E_pq e_q = e_p and E_pq e_p = −e_q.
            let mut total = 0.0;
            for slot in 0..k {
                let mut seq = j.clone();
                if j[slot] == q {
                    seq[slot] = p;
                    total += phi.coeff_seq(&seq);
                } else if j[slot] == p {
                    seq[slot] = q;
                    total -= phi.coeff_seq(&seq);
                }
            }
            a[(row, col)] = total;
        }
    }
    let ns = linalg::null_space(&a, RANK_TOLERANCE);
    let elements: Vec<DMatrix<f64>> = ns.basis.iter().map(|v| skew_from_coords(n, v)).collect();
    LieSubalgebraBasis {
        dim: elements.len(),
        elements,
        smallest_kept: ns.smallest_kept,
        largest_null: ns.largest_null,
    }
}

/// `⟨β, ζ̄⟩ = Σ_{a<b} β_ab ⟨ζe_a, e_b⟩` where `ζ̄(u,v) = ⟨ζu, v⟩`.
pub fn g_perp_pairing(s: &VcpStructure, beta: &AlternatingTensor, zeta: &DMatrix<f64>) -> Result<f64> {
    if beta.dim() != s.n || zeta.nrows() != s.n || zeta.ncols() != s.n {
        return Err(Error::DimensionMismatch {
            expected: s.n,
            found: if beta.dim() != s.n { beta.dim() } else { zeta.nrows() },
        });
    }
    if beta.grade() != 2 {
        return Err(Error::GradeMismatch {
            expected: 2,
            found: beta.grade(),
        });
    }
    Ok(beta
        .blades()
        .map(|(b, c)| {
            let idx = b.indices();
            c * zeta[(idx[1], idx[0])]
        })
        .sum())
}

/// Outcome of a sampled sup-norm estimate.
#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    pub max_defect: f64,
    pub samples: usize,
    pub worst_frame: Vec<Vec<f64>>,
}

/// Uniformly random orthonormal k-frame in ℝⁿ (pivoted Gram–Schmidt, redraw on failure).
pub fn random_orthonormal_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<DVector<f64>> {
    loop {
        let vs: Vec<DVector<f64>> = (0..k).map(|_| linalg::gaussian_vector(rng, n)).collect();
        if let Some(frame) = linalg::gram_schmidt(&vs, linalg::PIVOT_TOLERANCE) {
            return frame;
        }
    }
}

/// Sup over sampled orthonormal r-frames of `| |ι_frame φ| − 1 |`.
pub fn vcp_form_defect(phi: &AlternatingTensor, r: usize, samples: usize, seed: u64) -> Result<DefectReport> {
    if phi.grade() != r + 1 {
        return Err(Error::GradeMismatch {
            expected: r + 1,
            found: phi.grade(),
        });
    }
    let n = phi.dim();
    let results = sampling::par_map_seeded(samples, seed, |_, rng| {
        let frame = random_orthonormal_frame(rng, n, r);
        let d = (phi.interior_vectors(&frame).expect("shapes agree").norm() - 1.0).abs();
        (d, frame)
    });
    Ok(worst_of(results))
}

/// Defect on a single frame.
pub fn frame_defect(phi: &AlternatingTensor, frame: &[DVector<f64>]) -> Result<f64> {
    Ok((phi.interior_vectors(frame)?.norm() - 1.0).abs())
}

pub(crate) fn worst_of(results: Vec<(f64, Vec<DVector<f64>>)>) -> DefectReport {
    let samples = results.len();
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    match sampling::argmax(&values) {
        Some((i, v)) => DefectReport {
            max_defect: v,
            samples,
            worst_frame: results[i].1.iter().map(|v| v.iter().copied().collect()).collect(),
        },
        None => DefectReport {
            max_defect: 0.0,
            samples,
            worst_frame: Vec::new(),
        },
    }
}

/// Maximum residual of a sampled identity.
#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    pub samples: usize,
    pub max_residual: f64,
}

impl SampleCheck {
    pub(crate) fn from_residuals(residuals: &[f64]) -> Self {
        SampleCheck {
            samples: residuals.len(),
            max_residual: residuals.iter().fold(0.0, |m: f64, r| m.max(*r)),
        }
    }
}

fn random_unit_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<DVector<f64>> {
    (0..k).map(|_| linalg::random_unit_vector(rng, n)).collect()
}

/// `‖v₁∧…∧v_k‖`.
pub fn wedge_norm(n: usize, vs: &[DVector<f64>]) -> f64 {
    AlternatingTensor::wedge_vectors(n, vs).map(|w| w.norm()).unwrap_or(0.0)
}

/// Both axioms for χ on random unit tuples: `χ ⊥ v_i` and `|χ| = ‖v₁∧…∧v_r‖`.
pub fn chi_axiom_check(s: &VcpStructure, samples: usize, seed: u64) -> SampleCheck {
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let vs = random_unit_tuple(rng, s.n, s.r);
        let chi = s.chi(&vs).expect("shapes agree");
        let ortho = vs.iter().fold(0.0, |m: f64, v| m.max(chi.dot(v).abs()));
        let norm = (chi.norm() - wedge_norm(s.n, &vs)).abs();
        ortho.max(norm)
    });
    SampleCheck::from_residuals(&residuals)
}

/// `|φ(v)|² + |τ(v)|² − ‖v₁∧…∧v_{r+1}‖²` on random unit tuples.
pub fn norm_identity_check(s: &VcpStructure, samples: usize, seed: u64) -> SampleCheck {
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let vs = random_unit_tuple(rng, s.n, s.r + 1);
        norm_identity_residual(s, &vs).expect("shapes agree")
    });
    SampleCheck::from_residuals(&residuals)
}

pub fn norm_identity_residual(s: &VcpStructure, vs: &[DVector<f64>]) -> Result<f64> {
    let phi = s.phi_value(vs)?;
    let tau = s.tau(vs)?.norm_squared();
    let w = wedge_norm(s.n, vs);
    Ok((phi * phi + tau - w * w).abs())
}

/// `⟨τ(v), ζ̄⟩` over random tuples and every basis element of the algebra.
pub fn tau_g_perp_check(s: &VcpStructure, algebra: &LieSubalgebraBasis, samples: usize, seed: u64) -> SampleCheck {
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let vs = random_unit_tuple(rng, s.n, s.r + 1);
        let tau = s.tau(&vs).expect("shapes agree");
        algebra
            .elements
            .iter()
            .map(|z| g_perp_pairing(s, &tau, z).expect("shapes agree").abs())
            .fold(0.0, f64::max)
    });
    SampleCheck::from_residuals(&residuals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::{cross2, cross3_form, Octonion};

    fn e(n: usize, i: usize) -> DVector<f64> {
        linalg::unit(n, i - 1)
    }

    #[test]
    fn structure_coefficients() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert_eq!(g2.phi().coeff(&[1, 2, 3]), 1.0);
        let s7 = VcpStructure::new(VcpKind::Spin7).unwrap();
        assert_eq!(s7.phi().coeff(&[1, 2, 3, 4]), -1.0);
        assert_eq!(s7.phi().coeff(&[1, 2, 5, 6]), -1.0);
        assert_eq!(s7.phi().num_terms(), 14);
    }

    #[test]
    fn cayley_expansion_matches_hand_expansion() {
        // Oracle: expansion of the factored expression done term by term.
        let expected = [
            ([1, 2, 3, 4], -1.0),
            ([1, 2, 5, 6], -1.0),
            ([1, 2, 7, 8], 1.0),
            ([1, 3, 5, 7], -1.0),
            ([1, 3, 6, 8], -1.0),
            ([1, 4, 5, 8], -1.0),
            ([1, 4, 6, 7], 1.0),
            ([2, 3, 5, 8], 1.0),
            ([2, 3, 6, 7], -1.0),
            ([2, 4, 5, 7], -1.0),
            ([2, 4, 6, 8], -1.0),
            ([3, 4, 5, 6], 1.0),
            ([3, 4, 7, 8], -1.0),
            ([5, 6, 7, 8], -1.0),
        ];
        let theta = cayley_form();
        for (idx, c) in expected {
            assert_eq!(theta.coeff(&idx), c, "{idx:?}");
        }
    }

    #[test]
    fn cayley_form_is_the_cross3_form() {
        assert_eq!(cross3_form(), cayley_form());
    }

    #[test]
    fn chi_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert_eq!(g2.chi(&[e(7, 1), e(7, 2)]).unwrap(), e(7, 3));
        let c = VcpStructure::new(VcpKind::Complex(2)).unwrap();
        assert_eq!(c.chi(&[e(4, 1)]).unwrap(), e(4, 2));
        let v = VcpStructure::new(VcpKind::Volume(3)).unwrap();
        assert_eq!(v.chi(&[e(3, 1), e(3, 2)]).unwrap(), e(3, 3));
        assert!(matches!(g2.chi(&[e(7, 1)]), Err(Error::Arity { .. })));
    }

    #[test]
    fn chi_agrees_with_octonion_cross2() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let mut rng = sampling::rng_for(1, 0);
        for _ in 0..200 {
            let a = linalg::gaussian_vector(&mut rng, 7);
            let b = linalg::gaussian_vector(&mut rng, 7);
            let chi = g2.chi(&[a.clone(), b.clone()]).unwrap();
            let oct = cross2(
                Octonion::from_imaginary(&a).unwrap(),
                Octonion::from_imaginary(&b).unwrap(),
            )
            .unwrap();
            assert!((chi - oct.imaginary_part()).amax() < 1e-12);
        }
    }

    #[test]
    fn defect_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert!(vcp_form_defect(g2.phi(), 2, 10_000, 1).unwrap().max_defect < 1e-10);
        let s7 = VcpStructure::new(VcpKind::Spin7).unwrap();
        assert!(vcp_form_defect(s7.phi(), 3, 10_000, 1).unwrap().max_defect < 1e-10);
        let lone = AlternatingTensor::basis(7, &[1, 2, 3]).unwrap();
        assert_eq!(frame_defect(&lone, &[e(7, 1), e(7, 4)]).unwrap(), 1.0);
        assert!(vcp_form_defect(&lone, 1, 10, 1).is_err());
    }

    #[test]
    fn tau_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        assert!(g2.tau(&[e(7, 1), e(7, 2), e(7, 3)]).unwrap().is_zero());
        let t = g2.tau(&[e(7, 1), e(7, 2), e(7, 4)]).unwrap();
        assert!((t.norm_squared() - 1.0).abs() < 1e-14);
        assert!(g2.tau(&[e(7, 5), e(7, 5), e(7, 1)]).unwrap().is_zero());
    }

    #[test]
    fn automorphism_dimensions() {
        for (kind, dim) in [
            (VcpKind::G2, 14),
            (VcpKind::Spin7, 21),
            (VcpKind::Complex(2), 4),
            (VcpKind::Complex(3), 9),
        ] {
            let alg = VcpStructure::new(kind).unwrap().automorphism_algebra();
            assert_eq!(alg.dim, dim, "{kind:?}");
            assert!(alg.gap_decades() > 3.0);
        }
        for n in 3..=8 {
            let alg = VcpStructure::new(VcpKind::Volume(n)).unwrap().automorphism_algebra();
            assert_eq!(alg.dim, n * (n - 1) / 2);
        }
    }

    #[test]
    fn automorphism_elements_are_orthonormal_derivations() {
        let s = VcpStructure::new(VcpKind::G2).unwrap();
        let alg = s.automorphism_algebra();
        for (i, a) in alg.elements.iter().enumerate() {
            assert!(derivation_residual(s.phi(), a) < 1e-9);
            assert!((a + a.transpose()).amax() < 1e-15);
            for (j, b) in alg.elements.iter().enumerate() {
                let ip = 0.5 * (a.transpose() * b).trace();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn g_perp_examples() {
        let s = VcpStructure::new(VcpKind::Volume(3)).unwrap();
        let mut rot = DMatrix::zeros(3, 3);
        rot[(1, 0)] = 1.0;
        rot[(0, 1)] = -1.0;
        let e12 = AlternatingTensor::basis(3, &[1, 2]).unwrap();
        assert_eq!(g_perp_pairing(&s, &e12, &rot).unwrap(), 1.0);
        let zero = AlternatingTensor::zero(3, 2).unwrap();
        assert_eq!(g_perp_pairing(&s, &zero, &rot).unwrap(), 0.0);
    }

    #[test]
    fn identities_hold_for_every_structure() {
        for kind in [VcpKind::Complex(2), VcpKind::Volume(4), VcpKind::G2, VcpKind::Spin7] {
            let s = VcpStructure::new(kind).unwrap();
            assert!(chi_axiom_check(&s, 2000, 3).max_residual < 1e-10, "{kind:?}");
            assert!(norm_identity_check(&s, 2000, 3).max_residual < 1e-9, "{kind:?}");
            let alg = s.automorphism_algebra();
            assert!(tau_g_perp_check(&s, &alg, 300, 3).max_residual < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn induced_hypersurface_examples() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let induced = g2.induced_hypersurface_vcp(&e(7, 7)).unwrap();
        let expected =
            AlternatingTensor::from_terms(6, 2, [(vec![1, 6], -1.0), (vec![2, 5], 1.0), (vec![3, 4], 1.0)]).unwrap();
        assert_eq!(induced.form, expected);

        for n in 3..=6 {
            let v = VcpStructure::new(VcpKind::Volume(n)).unwrap();
            let f = v.induced_hypersurface_vcp(&e(n, n)).unwrap().form;
            assert!(f.max_abs_diff(&AlternatingTensor::volume(n - 1).unwrap()) < 1e-15);
        }

        let s7 = VcpStructure::new(VcpKind::Spin7).unwrap();
        let f = s7.induced_hypersurface_vcp(&e(8, 8)).unwrap().form;
        assert!(vcp_form_defect(&f, 2, 2000, 9).unwrap().max_defect < 1e-9);

        assert!(matches!(
            g2.induced_hypersurface_vcp(&DVector::zeros(7)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn oriented_complement_is_positive() {
        let mut rng = sampling::rng_for(2, 0);
        for _ in 0..50 {
            let nu = linalg::random_unit_vector(&mut rng, 6);
            let b = oriented_complement(&nu);
            let mut cols = vec![nu];
            cols.extend(b);
            assert!(linalg::orthonormality_residual(&cols) < 1e-12);
            assert!((DMatrix::from_columns(&cols).determinant() - 1.0).abs() < 1e-12);
        }
    }
}
