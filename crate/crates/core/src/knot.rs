//! Discretized knot spaces.
//!
//! A knot is an oriented closed `s`-manifold sampled at `m` vertices, each with
//! a quadrature weight and an orthonormal tangent frame. Integrals over the
//! knot are vertex-weighted sums, reduced pairwise so the result does not
//! depend on scheduling.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex_vcp::{cvcp_defect_of, endomorphism_from_form, CVcpKind, CVcpStructure, HamiltonResiduals};
use crate::error::{Error, Result};
use crate::exterior::{AlternatingTensor, ComplexAlternatingTensor, MAX_DIM};
use crate::linalg::{self, pairwise_sum};
use crate::plane::OrientedPlane;
use crate::sampling;
use crate::vcp::{SampleCheck, VcpStructure};

pub const FRAME_TOLERANCE: f64 = 1e-10;
pub const NORMAL_TOLERANCE: f64 = 1e-8;
pub const CONTAINMENT_TOLERANCE: f64 = 1e-8;
pub const MAX_SPHERE_DEPTH: usize = 6;

/// Vertex connectivity, needed only to deform the knot.
#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Unknown,
    /// Vertices in cyclic order (curves).
    Cycle,
    /// Outward-oriented triangles (surfaces).
    Triangles(Vec<[usize; 3]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotJson", into = "KnotJson")]
pub struct DiscretizedKnot {
    n: usize,
    s: usize,
    vertices: Vec<DVector<f64>>,
    weights: Vec<f64>,
    frames: Vec<Vec<DVector<f64>>>,
    topology: Topology,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `v` minus its component along the orthonormal `frame`.
fn project_out(v: &DVector<f64>, frame: &[DVector<f64>]) -> DVector<f64> {
    let mut w = v.clone();
    for _ in 0..2 {
        for f in frame {
            let c = f.dot(&w);
            w.axpy(-c, f, 1.0);
        }
    }
    w
}

fn tangential_norm(v: &DVector<f64>, frame: &[DVector<f64>]) -> f64 {
    frame.iter().map(|f| f.dot(v).powi(2)).sum::<f64>().sqrt()
}

impl DiscretizedKnot {
    pub fn new(
        n: usize,
        s: usize,
        vertices: Vec<DVector<f64>>,
        weights: Vec<f64>,
        frames: Vec<Vec<DVector<f64>>>,
        topology: Topology,
    ) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if s == 0 || s >= n {
            return Err(Error::InvalidParameter(format!(
                "knot dimension s = {s} must satisfy 1 <= s < n = {n}"
            )));
        }
        let m = vertices.len();
        if m == 0 {
            return Err(Error::InvalidParameter("knot has no vertices".into()));
        }
        check_len(m, weights.len())?;
        check_len(m, frames.len())?;
        for (x, frame) in vertices.iter().zip(&frames) {
            check_len(n, x.len())?;
            check_len(s, frame.len())?;
            for f in frame {
                check_len(n, f.len())?;
            }
            let residual = linalg::orthonormality_residual(frame);
            if residual.is_nan() || residual >= FRAME_TOLERANCE {
                return Err(Error::NotOrthonormal { residual });
            }
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("weight {w} is not positive")));
        }
        match &topology {
            Topology::Cycle if s != 1 => {
                return Err(Error::InvalidParameter("cyclic order needs s = 1".into()));
            }
            Topology::Triangles(tris) => {
                if s != 2 {
                    return Err(Error::InvalidParameter("triangles need s = 2".into()));
                }
                if let Some(t) = tris.iter().find(|t| t.iter().any(|&i| i >= m)) {
                    return Err(Error::InvalidIndex(t.to_vec()));
                }
            }
            _ => {}
        }
        Ok(Self {
            n,
            s,
            vertices,
            weights,
            frames,
            topology,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn frames(&self) -> &[Vec<DVector<f64>>] {
        &self.frames
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Copy in `ℝ^{n_new}` with old coordinate `i` sent to axis `axes[i]` (0-based).
    pub fn embed(&self, n_new: usize, axes: &[usize]) -> Result<Self> {
        check_len(self.n, axes.len())?;
        let mut seen = vec![false; n_new];
        for &a in axes {
            if a >= n_new || seen[a] {
                return Err(Error::InvalidIndex(axes.to_vec()));
            }
            seen[a] = true;
        }
        let map = |v: &DVector<f64>| {
            let mut w = DVector::zeros(n_new);
            for (i, &a) in axes.iter().enumerate() {
                w[a] = v[i];
            }
            w
        };
        Self::new(
            n_new,
            self.s,
            self.vertices.iter().map(map).collect(),
            self.weights.clone(),
            self.frames.iter().map(|f| f.iter().map(map).collect()).collect(),
            self.topology.clone(),
        )
    }

    /// Largest distance of a vertex or frame vector from `span(C)`.
    pub fn containment_residual(&self, c: &OrientedPlane) -> Result<f64> {
        check_len(self.n, c.dim_ambient())?;
        let p = c.projector();
        let mut worst: f64 = 0.0;
        for (x, frame) in self.vertices.iter().zip(&self.frames) {
            worst = worst.max((x - &p * x).norm());
            for f in frame {
                worst = worst.max((f - &p * f).norm());
            }
        }
        Ok(worst)
    }

    /// Per-vertex tangent multivectors of the mesh at the given positions.
    ///
    /// Curves use the centered difference `(x_{i+1} − x_{i−1})/2`; surfaces give
    /// each vertex a third of the area bivectors of its triangles.
    fn tangent_multivectors(&self, positions: &[DVector<f64>]) -> Result<Vec<AlternatingTensor>> {
        let m = positions.len();
        match &self.topology {
            Topology::Unknown => Err(Error::MissingTopology),
            Topology::Cycle => (0..m)
                .map(|i| {
                    let d = (&positions[(i + 1) % m] - &positions[(i + m - 1) % m]) * 0.5;
                    AlternatingTensor::from_vector(&d)
                })
                .collect(),
            Topology::Triangles(tris) => {
                let mut acc = vec![AlternatingTensor::zero(self.n, 2)?; m];
                for t in tris {
                    let a = &positions[t[1]] - &positions[t[0]];
                    let b = &positions[t[2]] - &positions[t[0]];
                    let area = AlternatingTensor::wedge_vectors(self.n, &[a, b])?.scaled(1.0 / 6.0);
                    for &i in t {
                        acc[i] = acc[i].try_add(&area)?;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// `Σ_i η(x_i)(B_i)` with the mesh multivectors `B_i` at `positions`.
    fn discrete_flux(&self, eta: &AffineForm, positions: &[DVector<f64>]) -> Result<f64> {
        let bs = self.tangent_multivectors(positions)?;
        let values = positions
            .iter()
            .zip(&bs)
            .map(|(x, b)| eta.at(x)?.inner(b))
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&values))
    }
}

/// Unit circle in the `(x¹,x²)`-plane of `ℝⁿ`, counterclockwise.
pub fn make_circle(n: usize, m: usize) -> Result<DiscretizedKnot> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "circle needs at least 3 vertices, got {m}"
        )));
    }
    let h = std::f64::consts::TAU / m as f64;
    let mut vertices = Vec::with_capacity(m);
    let mut frames = Vec::with_capacity(m);
    for j in 0..m {
        let (sin, cos) = (h * j as f64).sin_cos();
        let mut x = DVector::zeros(n);
        x[0] = cos;
        x[1] = sin;
        let mut t = DVector::zeros(n);
        t[0] = -sin;
        t[1] = cos;
        vertices.push(x);
        frames.push(vec![t]);
    }
    DiscretizedKnot::new(n, 1, vertices, vec![h; m], frames, Topology::Cycle)
}

/// Spherical excess of the triangle `abc` on the unit sphere.
fn spherical_area(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let triple =
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    2.0 * triple.abs().atan2(1.0 + dot(a, b) + dot(b, c) + dot(c, a))
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit sphere in the `(x¹,x²,x³)`-subspace of `ℝⁿ`, from an octahedron
/// subdivided `depth` times.
///
/// Weights are a third of the spherical areas of the adjacent triangles, so
/// they sum to 4π for every depth.
pub fn make_sphere(n: usize, depth: usize) -> Result<DiscretizedKnot> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if depth > MAX_SPHERE_DEPTH {
        return Err(Error::InvalidParameter(format!(
            "subdivision depth {depth} exceeds {MAX_SPHERE_DEPTH}"
        )));
    }
    let mut pts: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                tris.push([x, y, z]);
            }
        }
    }
    for _ in 0..depth {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(4 * tris.len());
        for t in &tris {
            let mut m = [0; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let (p, q) = (pts[a], pts[b]);
                    pts.push(normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    pts.len() - 1
                });
            }
            next.push([t[0], m[0], m[2]]);
            next.push([m[0], t[1], m[1]]);
            next.push([m[2], m[1], t[2]]);
            next.push([m[0], m[1], m[2]]);
        }
        tris = next;
    }
    // orient every triangle outward
    for t in &mut tris {
        let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
        let normal = cross3(
            &[b[0] - a[0], b[1] - a[1], b[2] - a[2]],
            &[c[0] - a[0], c[1] - a[1], c[2] - a[2]],
        );
        if normal[0] * a[0] + normal[1] * a[1] + normal[2] * a[2] < 0.0 {
            t.swap(1, 2);
        }
    }
    let mut weights = vec![0.0; pts.len()];
    for t in &tris {
        let area = spherical_area(&pts[t[0]], &pts[t[1]], &pts[t[2]]) / 3.0;
        for &i in t {
            weights[i] += area;
        }
    }
    let lift = |v: [f64; 3]| {
        let mut w = DVector::zeros(n);
        w[0] = v[0];
        w[1] = v[1];
        w[2] = v[2];
        w
    };
    let mut frames = Vec::with_capacity(pts.len());
    for p in &pts {
        let projected: Vec<[f64; 3]> = (0..3)
            .map(|i| {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                [e[0] - p[i] * p[0], e[1] - p[i] * p[1], e[2] - p[i] * p[2]]
            })
            .collect();
        let norm = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let mut best = 0;
        for i in 1..3 {
            if norm(&projected[i]) > norm(&projected[best]) + 1e-12 {
                best = i;
            }
        }
        let f1 = normalize3(projected[best]);
        let f2 = cross3(p, &f1);
        frames.push(vec![lift(f1), lift(f2)]);
    }
    DiscretizedKnot::new(
        n,
        2,
        pts.into_iter().map(lift).collect(),
        weights,
        frames,
        Topology::Triangles(tris),
    )
}

/// A section of the normal bundle, one vector per vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "FieldJson")]
pub struct NormalField {
    vectors: Vec<DVector<f64>>,
}

impl NormalField {
    pub fn new(knot: &DiscretizedKnot, vectors: Vec<DVector<f64>>) -> Result<Self> {
        check_len(knot.len(), vectors.len())?;
        for (vertex, (v, frame)) in vectors.iter().zip(&knot.frames).enumerate() {
            check_len(knot.n, v.len())?;
            let residual = tangential_norm(v, frame);
            if residual.is_nan() || residual >= NORMAL_TOLERANCE {
                return Err(Error::NotNormal { vertex, residual });
            }
        }
        Ok(Self { vectors })
    }

    /// Normal parts of arbitrary vectors.
    pub fn projected(knot: &DiscretizedKnot, vectors: Vec<DVector<f64>>) -> Result<Self> {
        check_len(knot.len(), vectors.len())?;
        for v in &vectors {
            check_len(knot.n, v.len())?;
        }
        let vectors = vectors
            .iter()
            .zip(&knot.frames)
            .map(|(v, f)| project_out(v, f))
            .collect();
        Ok(Self { vectors })
    }

    /// Field `f(vertex, position, frame)`, checked for normality.
    pub fn from_fn<F>(knot: &DiscretizedKnot, f: F) -> Result<Self>
    where
        F: Fn(usize, &DVector<f64>, &[DVector<f64>]) -> DVector<f64>,
    {
        let vectors = (0..knot.len())
            .map(|i| f(i, &knot.vertices[i], &knot.frames[i]))
            .collect();
        Self::new(knot, vectors)
    }

    pub fn zero(knot: &DiscretizedKnot) -> Self {
        Self {
            vectors: vec![DVector::zeros(knot.n); knot.len()],
        }
    }

    /// Gaussian vectors projected to the normal spaces.
    pub fn random<R: Rng + ?Sized>(knot: &DiscretizedKnot, rng: &mut R) -> Self {
        let vectors = knot
            .frames
            .iter()
            .map(|f| project_out(&linalg::gaussian_vector(rng, knot.n), f))
            .collect();
        Self { vectors }
    }

    pub fn from_json(knot: &DiscretizedKnot, json: FieldJson) -> Result<Self> {
        Self::new(knot, json.vectors.into_iter().map(DVector::from_vec).collect())
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            vectors: self.vectors.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    fn check(&self, knot: &DiscretizedKnot) -> Result<()> {
        check_len(knot.len(), self.vectors.len())?;
        for v in &self.vectors {
            check_len(knot.n, v.len())?;
        }
        Ok(())
    }
}

/// `g^K(u,v) = Σ_i w_i ⟨u_i, v_i⟩`.
pub fn g_k(knot: &DiscretizedKnot, u: &NormalField, v: &NormalField) -> Result<f64> {
    u.check(knot)?;
    v.check(knot)?;
    let terms: Vec<f64> = (0..knot.len())
        .map(|i| knot.weights[i] * u.vectors[i].dot(&v.vectors[i]))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Per-vertex 2-forms `ι_{frame_i} φ` as skew matrices, `ω_i(u,v) = uᵀ M_i v`.
pub struct Transgression<'a> {
    knot: &'a DiscretizedKnot,
    forms: Vec<DMatrix<f64>>,
}

impl<'a> Transgression<'a> {
    pub fn new(s: &VcpStructure, knot: &'a DiscretizedKnot) -> Result<Self> {
        if knot.s + 1 != s.r() {
            return Err(Error::FoldMismatch { s: knot.s, r: s.r() });
        }
        check_len(s.n(), knot.n)?;
        let forms = knot
            .frames
            .iter()
            .map(|frame| s.phi().interior_vectors(frame)?.to_skew_matrix())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { knot, forms })
    }

    fn pair(&self, us: &[DVector<f64>], vs: &[DVector<f64>]) -> f64 {
        let terms: Vec<f64> = (0..self.knot.len())
            .map(|i| self.knot.weights[i] * us[i].dot(&(&self.forms[i] * &vs[i])))
            .collect();
        pairwise_sum(&terms)
    }

    /// `ω^K(u,v) = Σ_i w_i φ(frame_i, u_i, v_i)`.
    pub fn omega(&self, u: &NormalField, v: &NormalField) -> Result<f64> {
        u.check(self.knot)?;
        v.check(self.knot)?;
        Ok(self.pair(&u.vectors, &v.vectors))
    }

    /// `J^K(u)_i = χ(frame_i, u_i)`.
    pub fn j(&self, u: &NormalField) -> Result<NormalField> {
        u.check(self.knot)?;
        let vectors = self.forms.iter().zip(&u.vectors).map(|(m, v)| m.tr_mul(v)).collect();
        Ok(NormalField { vectors })
    }
}

pub fn omega_k(s: &VcpStructure, knot: &DiscretizedKnot, u: &NormalField, v: &NormalField) -> Result<f64> {
    Transgression::new(s, knot)?.omega(u, v)
}

pub fn j_k(s: &VcpStructure, knot: &DiscretizedKnot, u: &NormalField) -> Result<NormalField> {
    Transgression::new(s, knot)?.j(u)
}

/// Residual of `ω^K(u,v) = g^K(J^K u, v)` over random field pairs.
pub fn compatibility_check(s: &VcpStructure, knot: &DiscretizedKnot, samples: usize, seed: u64) -> Result<SampleCheck> {
    let t = Transgression::new(s, knot)?;
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let u = NormalField::random(knot, rng);
        let v = NormalField::random(knot, rng);
        let lhs = t.pair(&u.vectors, &v.vectors);
        let ju = t.j(&u).expect("shapes agree");
        (lhs - g_k(knot, &ju, &v).expect("shapes agree")).abs()
    });
    Ok(SampleCheck::from_residuals(&residuals))
}

/// Largest entry of `J^K J^K u + u` over random fields.
pub fn j_squared_check(s: &VcpStructure, knot: &DiscretizedKnot, samples: usize, seed: u64) -> Result<SampleCheck> {
    let t = Transgression::new(s, knot)?;
    let residuals = sampling::par_map_seeded(samples, seed, |_, rng| {
        let u = NormalField::random(knot, rng);
        let jju = t.j(&t.j(&u).expect("shapes agree")).expect("shapes agree");
        jju.max_abs_diff(&u.scaled(-1.0))
    });
    Ok(SampleCheck::from_residuals(&residuals))
}

/// A form whose coefficients are affine: `η(x) = η₀ + Σ_j x^j η_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineForm {
    constant: AlternatingTensor,
    linear: Vec<AlternatingTensor>,
}

impl AffineForm {
    pub fn new(constant: AlternatingTensor, linear: Vec<AlternatingTensor>) -> Result<Self> {
        check_len(constant.dim(), linear.len())?;
        for l in &linear {
            check_len(constant.dim(), l.dim())?;
            if l.grade() != constant.grade() {
                return Err(Error::GradeMismatch {
                    expected: constant.grade(),
                    found: l.grade(),
                });
            }
        }
        Ok(Self { constant, linear })
    }

    pub fn constant(form: AlternatingTensor) -> Self {
        let zero = AlternatingTensor::zero(form.dim(), form.grade()).expect("shape already valid");
        Self {
            linear: vec![zero; form.dim()],
            constant: form,
        }
    }

    /// Sum of monomial terms `(variables, indices, c)` meaning `c·x^{v₁}⋯x^{v_d} dx^{indices}`,
    /// all 1-based. Monomials of degree above 1 are rejected.
    pub fn from_monomials(dim: usize, grade: usize, terms: &[(Vec<usize>, Vec<usize>, f64)]) -> Result<Self> {
        let zero = AlternatingTensor::zero(dim, grade)?;
        let mut out = Self {
            constant: zero.clone(),
            linear: vec![zero; dim],
        };
        for (vars, idx, c) in terms {
            let term = AlternatingTensor::from_terms(dim, grade, [(idx.clone(), *c)])?;
            match vars.as_slice() {
                [] => out.constant = out.constant.try_add(&term)?,
                [j] if (1..=dim).contains(j) => out.linear[j - 1] = out.linear[j - 1].try_add(&term)?,
                [_] => return Err(Error::InvalidIndex(vars.clone())),
                _ => return Err(Error::UnsupportedDegree(vars.len())),
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn grade(&self) -> usize {
        self.constant.grade()
    }

    pub fn at(&self, x: &DVector<f64>) -> Result<AlternatingTensor> {
        check_len(self.dim(), x.len())?;
        let mut acc = self.constant.clone();
        for (j, l) in self.linear.iter().enumerate() {
            if x[j] != 0.0 && !l.is_zero() {
                acc = acc.try_add(&l.scaled(x[j]))?;
            }
        }
        Ok(acc)
    }

    /// `dη = Σ_j dx^j ∧ η_j`.
    pub fn exterior_derivative(&self) -> Result<AlternatingTensor> {
        let mut acc = AlternatingTensor::zero(self.dim(), self.grade() + 1)?;
        for (j, l) in self.linear.iter().enumerate() {
            acc = acc.try_add(&AlternatingTensor::basis(self.dim(), &[j + 1])?.wedge(l)?)?;
        }
        Ok(acc)
    }
}

/// The vector field `x ↦ b + A x`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineVectorField {
    pub constant: DVector<f64>,
    pub linear: DMatrix<f64>,
}

impl AffineVectorField {
    pub fn constant(v: DVector<f64>) -> Self {
        let n = v.len();
        Self {
            constant: v,
            linear: DMatrix::zeros(n, n),
        }
    }

    pub fn at(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.constant + &self.linear * x
    }
}

/// `F_η = Σ_i w_i η(x_i)(frame_i)`.
pub fn hamiltonian_value(knot: &DiscretizedKnot, eta: &AffineForm) -> Result<f64> {
    check_len(knot.n, eta.dim())?;
    if eta.grade() != knot.s {
        return Err(Error::GradeMismatch {
            expected: knot.s,
            found: eta.grade(),
        });
    }
    let terms = (0..knot.len())
        .map(|i| Ok(knot.weights[i] * eta.at(&knot.vertices[i])?.evaluate(&knot.frames[i])?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingReport {
    pub finite_difference: f64,
    pub omega: f64,
    pub residual: f64,
    /// `max |ι_{v(x)}φ − dη|` over the sample points.
    pub pair_residual: f64,
}

/// Compares the first variation of `F_η` along `delta` with `ω^K(V, delta)`.
///
/// Both flux values come from the mesh multivectors (centered differences or
/// triangle bivectors) at the original and the moved vertices, so the
/// variation sees the change of the quadrature along with the change of `η`.
pub fn hamiltonian_pairing_check(
    s: &VcpStructure,
    knot: &DiscretizedKnot,
    eta: &AffineForm,
    v: &AffineVectorField,
    delta: &NormalField,
    fd_step: f64,
) -> Result<PairingReport> {
    let t = Transgression::new(s, knot)?;
    check_len(knot.n, eta.dim())?;
    check_len(knot.n, v.constant.len())?;
    if eta.grade() != knot.s {
        return Err(Error::GradeMismatch {
            expected: knot.s,
            found: eta.grade(),
        });
    }
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {fd_step} must be positive"
        )));
    }
    delta.check(knot)?;
    let d_eta = eta.exterior_derivative()?;
    let mut points: Vec<DVector<f64>> = vec![DVector::zeros(knot.n)];
    points.extend((0..knot.n).map(|i| linalg::unit(knot.n, i)));
    points.extend(knot.vertices.iter().cloned());
    let mut pair_residual: f64 = 0.0;
    for x in &points {
        let lhs = s.phi().interior_vector(&v.at(x))?;
        pair_residual = pair_residual.max(lhs.max_abs_diff(&d_eta));
    }
    if pair_residual > 1e-9 {
        return Err(Error::InvalidHamiltonianPair(pair_residual));
    }
    let moved: Vec<DVector<f64>> = knot
        .vertices
        .iter()
        .zip(&delta.vectors)
        .map(|(x, d)| x + d * fd_step)
        .collect();
    let f0 = knot.discrete_flux(eta, &knot.vertices)?;
    let f1 = knot.discrete_flux(eta, &moved)?;
    let finite_difference = (f1 - f0) / fd_step;
    let vs: Vec<DVector<f64>> = knot.vertices.iter().map(|x| v.at(x)).collect();
    let omega = t.pair(&vs, &delta.vectors);
    Ok(PairingReport {
        finite_difference,
        omega,
        residual: (finite_difference - omega).abs(),
        pair_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub vertex: usize,
    pub direction: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianProbe {
    pub vanishes_on_c: bool,
    /// Largest `|ω^K|` among pairs of the supplied tangent fields.
    pub max_pairing: f64,
    pub maximality_witness: Option<Witness>,
}

/// Orthonormal basis of `span(vs)`, dropping dependent vectors.
fn span_basis(vs: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let w = project_out(v, &out);
        let norm = w.norm();
        if norm > tol {
            out.push(w / norm);
        }
    }
    out
}

/// Tests whether `ω^K` vanishes on fields tangent to `C` and looks for a
/// maximality witness among bump fields at the vertex where `outward` leaves
/// `C` the most.
///
/// The bump basis is finite, so a missing witness is not a proof that none
/// exists.
pub fn lagrangian_probe(
    s: &VcpStructure,
    c: &OrientedPlane,
    knot: &DiscretizedKnot,
    tangent_fields: &[NormalField],
    outward: &NormalField,
    tol: f64,
) -> Result<LagrangianProbe> {
    let t = Transgression::new(s, knot)?;
    let contained = knot.containment_residual(c)?;
    if contained > CONTAINMENT_TOLERANCE {
        return Err(Error::NotContained(contained));
    }
    let p = c.projector();
    for u in tangent_fields {
        u.check(knot)?;
        let off = u.vectors.iter().map(|v| (v - &p * v).norm()).fold(0.0, f64::max);
        if off > CONTAINMENT_TOLERANCE {
            return Err(Error::NotContained(off));
        }
    }
    outward.check(knot)?;
    let mut max_pairing: f64 = 0.0;
    for (a, u) in tangent_fields.iter().enumerate() {
        for v in &tangent_fields[a + 1..] {
            max_pairing = max_pairing.max(t.pair(&u.vectors, &v.vectors).abs());
        }
    }
    let outside: Vec<f64> = outward.vectors.iter().map(|v| (v - &p * v).norm()).collect();
    let mut witness = None;
    if let Some((vertex, off)) = sampling::argmax(&outside) {
        if off > tol {
            let candidates: Vec<DVector<f64>> =
                c.frame().iter().map(|f| project_out(f, &knot.frames[vertex])).collect();
            let mut best: Option<Witness> = None;
            for d in span_basis(&candidates, 1e-8) {
                let value = knot.weights[vertex] * d.dot(&(&t.forms[vertex] * &outward.vectors[vertex]));
                if value.abs() > tol && best.as_ref().is_none_or(|b| value.abs() > b.value.abs()) {
                    best = Some(Witness {
                        vertex,
                        direction: d.iter().copied().collect(),
                        value,
                    });
                }
            }
            witness = best;
        }
    }
    Ok(LagrangianProbe {
        vanishes_on_c: max_pairing < tol,
        max_pairing,
        maximality_witness: witness,
    })
}

/// `max |ω(f_a, f_b)|` over vertices and pairs of frame vectors.
pub fn isotropy_check(knot: &DiscretizedKnot, omega: &AlternatingTensor) -> Result<f64> {
    check_len(knot.n, omega.dim())?;
    if omega.grade() != 2 {
        return Err(Error::GradeMismatch {
            expected: 2,
            found: omega.grade(),
        });
    }
    let mut worst: f64 = 0.0;
    for frame in &knot.frames {
        for a in 0..frame.len() {
            for b in a + 1..frame.len() {
                worst = worst.max(omega.evaluate(&[frame[a].clone(), frame[b].clone()])?.abs());
            }
        }
    }
    Ok(worst)
}

/// Quotient data at one vertex, all in the J-adapted fiber basis `(u₁, Ju₁, u₂, Ju₂, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberData {
    pub basis: Vec<DVector<f64>>,
    pub omega_j: AlternatingTensor,
    pub omega_i: AlternatingTensor,
    pub omega_k: AlternatingTensor,
    pub i: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

impl FiberData {
    /// `ω_I − iω_K` on the fiber.
    pub fn holomorphic_form(&self) -> ComplexAlternatingTensor {
        ComplexAlternatingTensor::new(self.omega_i.clone(), self.omega_k.scaled(-1.0)).expect("same shape")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientFiberData {
    pub fibers: Vec<FiberData>,
    pub isotropy: f64,
}

/// Fiberwise quotient `(TΣ + J·TΣ)^⊥` of an isotropic knot in a Calabi–Yau space.
pub fn quotient_structures(s: &CVcpStructure, knot: &DiscretizedKnot) -> Result<QuotientFiberData> {
    let n = match s.kind() {
        CVcpKind::CalabiYau(n) => n,
        other => {
            return Err(Error::KindMismatch(format!(
                "quotient needs a Calabi-Yau structure, got {}",
                other.label()
            )))
        }
    };
    check_len(2 * n, knot.n)?;
    if knot.s + 2 != n {
        return Err(Error::InvalidParameter(format!(
            "quotient needs s = n - 2 = {}, got s = {}",
            n.saturating_sub(2),
            knot.s
        )));
    }
    let isotropy = isotropy_check(knot, s.omega())?;
    if isotropy >= 1e-8 {
        return Err(Error::NotIsotropic(isotropy));
    }
    let dim = knot.n;
    let jm = s.j();
    let mut fibers = Vec::with_capacity(knot.len());
    for (vertex, frame) in knot.frames.iter().enumerate() {
        let mut d: Vec<DVector<f64>> = frame.clone();
        d.extend(frame.iter().map(|f| jm * f));
        let rank = span_basis(&d, 1e-8).len();
        if rank != 2 * knot.s || linalg::orthonormality_residual(&d) > 1e-8 {
            return Err(Error::RankDefect {
                vertex,
                expected: 2 * knot.s,
                found: rank,
            });
        }
        let mut basis = Vec::with_capacity(dim - d.len());
        while d.len() < dim {
            let u = linalg::complement_basis(dim, &d).swap_remove(0);
            let ju = jm * &u;
            d.push(u.clone());
            d.push(ju.clone());
            basis.push(u);
            basis.push(ju);
        }
        let beta = s.big_omega().re().interior_vectors(frame)?.pullback(&basis)?;
        let beta_im = s.big_omega().im().interior_vectors(frame)?.pullback(&basis)?;
        let omega_i = beta;
        let omega_k = beta_im.scaled(-1.0);
        let omega_j = s.omega().pullback(&basis)?;
        let j = DMatrix::from_fn(basis.len(), basis.len(), |b, a| basis[b].dot(&(jm * &basis[a])));
        fibers.push(FiberData {
            i: endomorphism_from_form(&omega_i)?,
            k: endomorphism_from_form(&omega_k)?,
            j,
            basis,
            omega_j,
            omega_i,
            omega_k,
        });
    }
    Ok(QuotientFiberData { fibers, isotropy })
}

/// Worst quaternion-relation residual over the fibers.
pub fn hamilton_check(q: &QuotientFiberData) -> f64 {
    q.fibers
        .iter()
        .map(|f| HamiltonResiduals::of(&f.i, &f.j, &f.k).max())
        .fold(0.0, f64::max)
}

/// Worst `| |ι_ẽ(ω_I − iω_K)| − 2 |` over vertices and sampled unit `(1,0)` vectors.
pub fn fiber_cvcp_defect(q: &QuotientFiberData, samples: usize, seed: u64) -> f64 {
    q.fibers
        .iter()
        .enumerate()
        .map(|(i, f)| {
            cvcp_defect_of(
                &f.holomorphic_form(),
                &f.j,
                samples,
                sampling::derive_seed(seed, i as u64),
            )
            .report
            .max_defect
        })
        .fold(0.0, f64::max)
}

/// Largest entry of `PJP − JP` for the fiber projectors `P`.
pub fn fiber_j_invariance(s: &CVcpStructure, q: &QuotientFiberData) -> f64 {
    let jm = s.j();
    q.fibers
        .iter()
        .map(|f| {
            let mut p = DMatrix::zeros(jm.nrows(), jm.ncols());
            for b in &f.basis {
                p += b * b.transpose();
            }
            (&p * jm * &p - jm * &p).amax()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct FormProbe {
    pub max_abs: f64,
    pub vanishes: bool,
    /// Field indices of the pair attaining `max_abs`.
    pub witness: Option<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexLagrangianProbe {
    pub omega_j: FormProbe,
    pub omega_i: FormProbe,
    pub omega_k: FormProbe,
}

/// Which of the transgressed `ω_J`, `ω_I`, `ω_K` vanish on fields tangent to `C`.
pub fn complex_lagrangian_probe(
    q: &QuotientFiberData,
    knot: &DiscretizedKnot,
    c: &OrientedPlane,
    fields: &[NormalField],
    tol: f64,
) -> Result<ComplexLagrangianProbe> {
    check_len(knot.len(), q.fibers.len())?;
    let contained = knot.containment_residual(c)?;
    if contained > CONTAINMENT_TOLERANCE {
        return Err(Error::NotContained(contained));
    }
    let p = c.projector();
    let mut coords: Vec<Vec<DVector<f64>>> = Vec::with_capacity(fields.len());
    for u in fields {
        u.check(knot)?;
        let off = u.vectors.iter().map(|v| (v - &p * v).norm()).fold(0.0, f64::max);
        if off > CONTAINMENT_TOLERANCE {
            return Err(Error::NotContained(off));
        }
        coords.push(
            q.fibers
                .iter()
                .zip(&u.vectors)
                .map(|(f, v)| DVector::from_iterator(f.basis.len(), f.basis.iter().map(|b| b.dot(v))))
                .collect(),
        );
    }
    let probe = |pick: fn(&FiberData) -> &AlternatingTensor| -> Result<FormProbe> {
        let mats = q
            .fibers
            .iter()
            .map(|f| pick(f).to_skew_matrix())
            .collect::<Result<Vec<_>>>()?;
        let mut best: (f64, Option<[usize; 2]>) = (0.0, None);
        for a in 0..coords.len() {
            for b in a + 1..coords.len() {
                let terms: Vec<f64> = (0..knot.len())
                    .map(|i| knot.weights[i] * coords[a][i].dot(&(&mats[i] * &coords[b][i])))
                    .collect();
                let value = pairwise_sum(&terms).abs();
                if value > best.0 {
                    best = (value, Some([a, b]));
                }
            }
        }
        Ok(FormProbe {
            max_abs: best.0,
            vanishes: best.0 < tol,
            witness: if best.0 < tol { None } else { best.1 },
        })
    };
    Ok(ComplexLagrangianProbe {
        omega_j: probe(|f| &f.omega_j)?,
        omega_i: probe(|f| &f.omega_i)?,
        omega_k: probe(|f| &f.omega_k)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmersionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
    /// Weighted mean and variance of `|ν(x)|/|μ(x)|` over vertices where both are nonzero.
    pub ratio_mean: f64,
    pub ratio_variance: f64,
    /// Weighted mean and variance of the angle between `ν(x)` and `μ(x)`.
    pub angle_mean: f64,
    pub angle_variance: f64,
}

fn weighted_mean_variance(values: &[(f64, f64)]) -> (f64, f64) {
    let total = pairwise_sum(&values.iter().map(|(w, _)| *w).collect::<Vec<_>>());
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(&values.iter().map(|(w, x)| w * x).collect::<Vec<_>>()) / total;
    let var = pairwise_sum(&values.iter().map(|(w, x)| w * (x - mean).powi(2)).collect::<Vec<_>>()) / total;
    (mean, var)
}

/// `ω^K(ν,μ) ≤ (|ν|²|μ|² − ⟨ν,μ⟩²)^{1/2}` in the knot metric, with the
/// pointwise length-ratio and angle spread that decide equality.
pub fn submersion_inequality_check(
    s: &VcpStructure,
    knot: &DiscretizedKnot,
    nu: &NormalField,
    mu: &NormalField,
) -> Result<SubmersionReport> {
    let t = Transgression::new(s, knot)?;
    let lhs = t.omega(nu, mu)?;
    let (nn, mm, nm) = (g_k(knot, nu, nu)?, g_k(knot, mu, mu)?, g_k(knot, nu, mu)?);
    let rhs = (nn * mm - nm * nm).max(0.0).sqrt();
    let slack = rhs - lhs;
    let mut ratios = Vec::new();
    let mut angles = Vec::new();
    for i in 0..knot.len() {
        let (a, b) = (&nu.vectors[i], &mu.vectors[i]);
        let (na, nb) = (a.norm(), b.norm());
        if na > 1e-14 && nb > 1e-14 {
            let w = knot.weights[i];
            ratios.push((w, na / nb));
            angles.push((w, (a.dot(b) / (na * nb)).clamp(-1.0, 1.0).acos()));
        }
    }
    let (ratio_mean, ratio_variance) = weighted_mean_variance(&ratios);
    let (angle_mean, angle_variance) = weighted_mean_variance(&angles);
    Ok(SubmersionReport {
        lhs,
        rhs,
        slack,
        holds: slack >= -1e-10,
        equality: slack.abs() <= 1e-9 * rhs.max(1.0),
        ratio_mean,
        ratio_variance,
        angle_mean,
        angle_variance,
    })
}

#[derive(Serialize, Deserialize)]
pub struct KnotJson {
    pub n: usize,
    pub s: usize,
    pub vertices: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub frames: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangles: Option<Vec<[usize; 3]>>,
}

impl TryFrom<KnotJson> for DiscretizedKnot {
    type Error = Error;

    fn try_from(j: KnotJson) -> Result<Self> {
        let topology = match (j.triangles, j.s) {
            (Some(t), _) => Topology::Triangles(t),
            (None, 1) => Topology::Cycle,
            (None, _) => Topology::Unknown,
        };
        DiscretizedKnot::new(
            j.n,
            j.s,
            j.vertices.into_iter().map(DVector::from_vec).collect(),
            j.weights,
            j.frames
                .into_iter()
                .map(|f| f.into_iter().map(DVector::from_vec).collect())
                .collect(),
            topology,
        )
    }
}

impl From<DiscretizedKnot> for KnotJson {
    fn from(k: DiscretizedKnot) -> Self {
        let to_vec = |v: &DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
        KnotJson {
            n: k.n,
            s: k.s,
            vertices: k.vertices.iter().map(to_vec).collect(),
            weights: k.weights,
            frames: k.frames.iter().map(|f| f.iter().map(to_vec).collect()).collect(),
            triangles: match k.topology {
                Topology::Triangles(t) => Some(t),
                _ => None,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct FieldJson {
    pub vectors: Vec<Vec<f64>>,
}

impl From<NormalField> for FieldJson {
    fn from(f: NormalField) -> Self {
        FieldJson {
            vectors: f.vectors.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vcp::VcpKind;
    use std::f64::consts::{PI, TAU};

    fn e(n: usize, i: usize) -> DVector<f64> {
        linalg::unit(n, i - 1)
    }

    fn radial(knot: &DiscretizedKnot) -> NormalField {
        NormalField::from_fn(knot, |_, x, _| {
            let mut r = DVector::zeros(x.len());
            r[0] = x[0];
            r[1] = x[1];
            r / (x[0].hypot(x[1]))
        })
        .unwrap()
    }

    fn constant(knot: &DiscretizedKnot, v: DVector<f64>) -> NormalField {
        NormalField::new(knot, vec![v; knot.len()]).unwrap()
    }

    fn volume3() -> VcpStructure {
        VcpStructure::new(VcpKind::Volume(3)).unwrap()
    }

    #[test]
    fn circle_construction() {
        let c = make_circle(3, 100).unwrap();
        assert!((c.total_weight() - TAU).abs() < 1e-12);
        assert!((&c.frames()[0][0] - e(3, 2)).amax() < 1e-15);
        assert!(make_circle(3, 2).is_err());
        assert!(make_circle(2, 10).is_err());
    }

    #[test]
    fn sphere_area_against_flat_mesh() {
        // flat triangle areas converge to 4π from below
        for depth in [2, 3, 4] {
            let sphere = make_sphere(3, depth).unwrap();
            let Topology::Triangles(tris) = sphere.topology() else {
                panic!()
            };
            let v = sphere.vertices();
            let flat: f64 = tris
                .iter()
                .map(|t| {
                    let a = &v[t[1]] - &v[t[0]];
                    let b = &v[t[2]] - &v[t[0]];
                    0.5 * AlternatingTensor::wedge_vectors(3, &[a, b]).unwrap().norm()
                })
                .sum();
            assert!((sphere.total_weight() - 4.0 * PI).abs() < 1e-10);
            assert!(flat < 4.0 * PI && flat > 4.0 * PI * 0.95, "{flat}");
        }
        let s3 = make_sphere(3, 3).unwrap();
        assert!((s3.total_weight() - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
        assert!(make_sphere(3, MAX_SPHERE_DEPTH + 1).is_err());
    }

    #[test]
    fn sphere_frames_are_outward_and_tangent() {
        let s = make_sphere(3, 2).unwrap();
        for (x, f) in s.vertices().iter().zip(s.frames()) {
            let orient = AlternatingTensor::wedge_vectors(3, &[x.clone(), f[0].clone(), f[1].clone()]).unwrap();
            assert!((orient.coeff(&[1, 2, 3]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_examples() {
        let c = make_circle(3, 100).unwrap();
        let z = constant(&c, e(3, 3));
        assert!((g_k(&c, &z, &z).unwrap() - TAU).abs() < 1e-12);
        let r = radial(&c);
        assert!(g_k(&c, &z, &r).unwrap().abs() < 1e-15);
        assert!((g_k(&c, &z.scaled(3.0), &z).unwrap() - 3.0 * TAU).abs() < 1e-12);
    }

    #[test]
    fn normal_field_rejects_tangent_vectors() {
        let c = make_circle(3, 10).unwrap();
        let err = NormalField::new(&c, vec![e(3, 2); 10]).unwrap_err();
        assert!(matches!(err, Error::NotNormal { vertex: 0, .. }));
    }

    #[test]
    fn omega_and_j_on_the_circle() {
        let s = volume3();
        let c = make_circle(3, 100).unwrap();
        let z = constant(&c, e(3, 3));
        let r = radial(&c);
        assert!((omega_k(&s, &c, &z, &r).unwrap() - TAU).abs() < 1e-12);
        assert!(omega_k(&s, &c, &r, &r).unwrap().abs() < 1e-15);
        let jz = j_k(&s, &c, &z).unwrap();
        assert!(jz.max_abs_diff(&r) < 1e-14);
        let jj = j_k(&s, &c, &jz).unwrap();
        assert!(jj.max_abs_diff(&z.scaled(-1.0)) < 1e-10);
        assert!(
            j_k(&s, &c, &NormalField::zero(&c))
                .unwrap()
                .max_abs_diff(&NormalField::zero(&c))
                == 0.0
        );
    }

    #[test]
    fn fold_mismatch_is_rejected() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        let sphere = make_sphere(7, 1).unwrap();
        let u = NormalField::zero(&sphere);
        assert!(matches!(
            omega_k(&g2, &sphere, &u, &u),
            Err(Error::FoldMismatch { s: 2, r: 2 })
        ));
        let c = make_circle(3, 10).unwrap();
        let bad = DiscretizedKnot::new(
            3,
            0,
            c.vertices().to_vec(),
            c.weights().to_vec(),
            vec![vec![]; 10],
            Topology::Unknown,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn compatibility_and_j_squared_on_builtin_knots() {
        let cases = [
            (VcpKind::Volume(3), make_circle(3, 50).unwrap()),
            (VcpKind::G2, make_circle(7, 50).unwrap()),
            (VcpKind::Volume(4), make_sphere(4, 2).unwrap()),
            (VcpKind::Spin7, make_sphere(8, 1).unwrap()),
        ];
        for (kind, knot) in cases {
            let s = VcpStructure::new(kind).unwrap();
            let compat = compatibility_check(&s, &knot, 200, 1).unwrap();
            let jj = j_squared_check(&s, &knot, 200, 2).unwrap();
            assert!(compat.max_residual < 1e-9, "{kind:?} {}", compat.max_residual);
            assert!(jj.max_residual < 1e-10, "{kind:?} {}", jj.max_residual);
        }
    }

    #[test]
    fn refinement_of_polynomial_fields() {
        // ω^K(e_z, (1 + x¹²) e_r): exact value 2π + π = 3π, error O(1/m²) or better
        let s = volume3();
        let value = |m: usize| {
            let c = make_circle(3, m).unwrap();
            let z = constant(&c, e(3, 3));
            let r = NormalField::from_fn(&c, |_, x, _| {
                DVector::from_vec(vec![x[0], x[1], 0.0]) * (1.0 + x[0] * x[0])
            })
            .unwrap();
            omega_k(&s, &c, &z, &r).unwrap()
        };
        for m in [8, 16, 32] {
            assert!((value(m) - 3.0 * PI).abs() < 1e-10);
        }
    }

    fn x1_dx2() -> AffineForm {
        AffineForm::from_monomials(3, 1, &[(vec![1], vec![2], 1.0)]).unwrap()
    }

    #[test]
    fn hamiltonian_values() {
        let c = make_circle(3, 100).unwrap();
        let f = hamiltonian_value(&c, &x1_dx2()).unwrap();
        assert!((f - PI).abs() < 0.01 * PI);
        let exact = AffineForm::constant(AlternatingTensor::basis(3, &[2]).unwrap());
        assert!(hamiltonian_value(&c, &exact).unwrap().abs() < 1e-12);
        let zero = AffineForm::from_monomials(3, 1, &[]).unwrap();
        assert_eq!(hamiltonian_value(&c, &zero).unwrap(), 0.0);
        assert!(matches!(
            AffineForm::from_monomials(3, 1, &[(vec![1, 1], vec![2], 1.0)]),
            Err(Error::UnsupportedDegree(2))
        ));
    }

    #[test]
    fn hamiltonian_pairing() {
        let s = volume3();
        let c = make_circle(3, 200).unwrap();
        let v = AffineVectorField::constant(e(3, 3));
        let r = radial(&c);
        let rep = hamiltonian_pairing_check(&s, &c, &x1_dx2(), &v, &r, 1e-4).unwrap();
        assert!(rep.residual < 1e-3, "{rep:?}");
        assert!((rep.omega - TAU).abs() < 1e-12);
        let rep = hamiltonian_pairing_check(&s, &c, &x1_dx2(), &v, &NormalField::zero(&c), 1e-4).unwrap();
        assert_eq!(rep.residual, 0.0);
        let zero_eta = AffineForm::from_monomials(3, 1, &[]).unwrap();
        let zero_v = AffineVectorField::constant(DVector::zeros(3));
        let rep = hamiltonian_pairing_check(&s, &c, &zero_eta, &zero_v, &r, 1e-4).unwrap();
        assert_eq!(rep.residual, 0.0);
        let wrong = AffineVectorField::constant(e(3, 1));
        assert!(matches!(
            hamiltonian_pairing_check(&s, &c, &x1_dx2(), &wrong, &r, 1e-4),
            Err(Error::InvalidHamiltonianPair(_))
        ));
        let mut loose = c.clone();
        loose.topology = Topology::Unknown;
        assert!(matches!(
            hamiltonian_pairing_check(&s, &loose, &x1_dx2(), &v, &NormalField::zero(&loose), 1e-4),
            Err(Error::MissingTopology)
        ));
    }

    #[test]
    fn hamiltonian_pairing_on_a_sphere() {
        // Volume(4): v = ∂x⁴ and η = x¹ dx²∧dx³ satisfy ι_vφ = −dη, so use η' = −η
        let s = VcpStructure::new(VcpKind::Volume(4)).unwrap();
        let sphere = make_sphere(4, 4).unwrap();
        let v = AffineVectorField::constant(e(4, 4));
        let eta = AffineForm::from_monomials(4, 2, &[(vec![1], vec![2, 3], -1.0)]).unwrap();
        let delta = NormalField::from_fn(&sphere, |_, x, _| {
            let mut d = x.clone();
            d[3] = 0.0;
            d
        })
        .unwrap();
        let rep = hamiltonian_pairing_check(&s, &sphere, &eta, &v, &delta, 1e-5).unwrap();
        // F = −vol(ball) r³ has derivative −4π at r = 1
        assert!((rep.omega + 4.0 * PI).abs() < 1e-10, "{rep:?}");
        assert!(rep.residual < 0.05 * 4.0 * PI, "{rep:?}");
    }

    #[test]
    fn lagrangian_probe_volume3() {
        let s = volume3();
        let c = make_circle(3, 100).unwrap();
        let plane = OrientedPlane::coordinate(3, &[1, 2]).unwrap();
        let r = radial(&c);
        let bump = NormalField::from_fn(&c, |_, x, _| DVector::from_vec(vec![x[0], x[1], 0.0]) * (1.0 + x[0])).unwrap();
        let out = constant(&c, e(3, 3));
        let p = lagrangian_probe(&s, &plane, &c, &[r, bump], &out, 1e-9).unwrap();
        assert!(p.vanishes_on_c);
        assert!(p.maximality_witness.unwrap().value.abs() > 0.05);
    }

    #[test]
    fn lagrangian_probe_g2() {
        let g2 = VcpStructure::new(VcpKind::G2).unwrap();
        // circle in the (x⁴,x⁵)-plane
        let axes = [3, 4, 0, 1, 2, 5, 6];
        let c = make_circle(7, 60).unwrap().embed(7, &axes).unwrap();
        let radial7 = NormalField::from_fn(&c, |_, x, _| {
            let mut r = DVector::zeros(7);
            r[3] = x[3];
            r[4] = x[4];
            r
        })
        .unwrap();
        let fields = vec![radial7.clone(), constant(&c, e(7, 6)), constant(&c, e(7, 7))];
        let coassoc = OrientedPlane::coordinate(7, &[4, 5, 6, 7]).unwrap();
        let out = constant(&c, e(7, 1));
        let p = lagrangian_probe(&g2, &coassoc, &c, &fields, &out, 1e-9).unwrap();
        assert!(p.vanishes_on_c, "{p:?}");
        assert!(p.maximality_witness.is_some());

        let c12 = make_circle(7, 60).unwrap();
        let r12 = radial(&c12);
        let fields = vec![r12, constant(&c12, e(7, 3)), constant(&c12, e(7, 4))];
        let four = OrientedPlane::coordinate(7, &[1, 2, 3, 4]).unwrap();
        let p = lagrangian_probe(&g2, &four, &c12, &fields, &constant(&c12, e(7, 5)), 1e-9).unwrap();
        assert!(!p.vanishes_on_c);

        let outside = OrientedPlane::coordinate(7, &[5, 6, 7]).unwrap();
        assert!(matches!(
            lagrangian_probe(&g2, &outside, &c12, &[], &constant(&c12, e(7, 5)), 1e-9),
            Err(Error::NotContained(_))
        ));
    }

    #[test]
    fn isotropy_examples() {
        let cy3 = CVcpStructure::new(CVcpKind::CalabiYau(3)).unwrap();
        let c = make_circle(6, 40).unwrap();
        assert_eq!(isotropy_check(&c, cy3.omega()).unwrap(), 0.0);
        let cy4 = CVcpStructure::new(CVcpKind::CalabiYau(4)).unwrap();
        let real = make_sphere(3, 2).unwrap().embed(8, &[0, 2, 4]).unwrap();
        assert!(isotropy_check(&real, cy4.omega()).unwrap() < 1e-10);
        let complex = make_sphere(3, 2).unwrap().embed(8, &[0, 1, 2]).unwrap();
        assert!(isotropy_check(&complex, cy4.omega()).unwrap() > 0.1);
        assert!(matches!(
            quotient_structures(&cy4, &complex),
            Err(Error::NotIsotropic(_))
        ));
    }

    #[test]
    fn quotient_fibers_and_hamilton_relations() {
        let cy3 = CVcpStructure::new(CVcpKind::CalabiYau(3)).unwrap();
        let circle = make_circle(3, 40).unwrap().embed(6, &[0, 2, 4]).unwrap();
        let q = quotient_structures(&cy3, &circle).unwrap();
        assert!(q.fibers.iter().all(|f| f.basis.len() == 4));
        // at angle 0 the fiber is span(e_r, Je_r, ∂x³, J∂x³) = span(∂x¹, ∂y¹, ∂x³, ∂y³)
        let f0 = &q.fibers[0];
        for axis in [0, 1, 4, 5] {
            let v = linalg::unit(6, axis);
            let proj: f64 = f0.basis.iter().map(|b| b.dot(&v).powi(2)).sum();
            assert!((proj - 1.0).abs() < 1e-12);
        }
        assert!(hamilton_check(&q) < 1e-9);
        assert!(fiber_cvcp_defect(&q, 20, 3) < 1e-9);
        assert!(fiber_j_invariance(&cy3, &q) < 1e-9);

        let cy4 = CVcpStructure::new(CVcpKind::CalabiYau(4)).unwrap();
        let sphere = make_sphere(3, 2).unwrap().embed(8, &[0, 2, 4]).unwrap();
        let q = quotient_structures(&cy4, &sphere).unwrap();
        assert!(q.fibers.iter().all(|f| f.basis.len() == 4));
        assert!(hamilton_check(&q) < 1e-9);
        assert!(fiber_cvcp_defect(&q, 10, 4) < 1e-9);
        assert!(fiber_j_invariance(&cy4, &q) < 1e-9);

        let hk = CVcpStructure::new(CVcpKind::Hyperkahler(1)).unwrap();
        assert!(matches!(quotient_structures(&hk, &circle), Err(Error::KindMismatch(_))));
    }

    /// Circle in ℂ³ along the given real axes, with the fiber-tangent fields `e_r`,
    /// `Je_r`, and constants.
    fn probe_setup(axes: [usize; 3], extra: &[usize]) -> (DiscretizedKnot, QuotientFiberData, Vec<NormalField>) {
        let cy3 = CVcpStructure::new(CVcpKind::CalabiYau(3)).unwrap();
        let circle = make_circle(3, 40).unwrap().embed(6, &axes).unwrap();
        let q = quotient_structures(&cy3, &circle).unwrap();
        let er = NormalField::from_fn(&circle, |_, x, _| {
            let mut r = DVector::zeros(6);
            r[axes[0]] = x[axes[0]];
            r[axes[1]] = x[axes[1]];
            r
        })
        .unwrap();
        let mut fields = vec![er.clone()];
        for &a in extra {
            fields.push(constant(&circle, linalg::unit(6, a)));
        }
        (circle, q, fields)
    }

    #[test]
    fn complex_hyperplane_pattern() {
        // {z¹ = 0}: circle in the (x², x³)-plane, fields e_r and Je_r
        let (circle, q, mut fields) = probe_setup([2, 4, 0], &[]);
        let cy3 = CVcpStructure::new(CVcpKind::CalabiYau(3)).unwrap();
        let jer = NormalField::new(&circle, fields[0].vectors().iter().map(|v| cy3.j() * v).collect()).unwrap();
        fields.push(jer);
        let c = OrientedPlane::coordinate(6, &[3, 4, 5, 6]).unwrap();
        let p = complex_lagrangian_probe(&q, &circle, &c, &fields, 1e-9).unwrap();
        assert!(p.omega_i.vanishes && p.omega_k.vanishes, "{p:?}");
        assert!(!p.omega_j.vanishes && p.omega_j.witness.is_some());
    }

    #[test]
    fn special_lagrangian_patterns() {
        // span(∂x¹, ∂x², ∂y³): phase −π/2
        let (circle, q, fields) = probe_setup([0, 2, 5], &[5]);
        let c = OrientedPlane::coordinate(6, &[1, 3, 6]).unwrap();
        let p = complex_lagrangian_probe(&q, &circle, &c, &fields, 1e-9).unwrap();
        assert!(p.omega_j.vanishes && p.omega_i.vanishes, "{p:?}");
        assert!(p.omega_k.max_abs > 0.1);

        // ℝ³: phase 0
        let (circle, q, fields) = probe_setup([0, 2, 4], &[4]);
        let c = OrientedPlane::coordinate(6, &[1, 3, 5]).unwrap();
        let p = complex_lagrangian_probe(&q, &circle, &c, &fields, 1e-9).unwrap();
        assert!(p.omega_j.vanishes && p.omega_k.vanishes, "{p:?}");
        assert!(p.omega_i.max_abs > 0.1);
    }

    #[test]
    fn submersion_inequality() {
        let s = volume3();
        let c = make_circle(3, 100).unwrap();
        let z = constant(&c, e(3, 3));
        let r = radial(&c);
        let eq = submersion_inequality_check(&s, &c, &z, &r).unwrap();
        assert!(eq.equality && (eq.lhs - TAU).abs() < 1e-12 && (eq.rhs - TAU).abs() < 1e-12);
        assert!(eq.ratio_variance < 1e-20 && eq.angle_variance < 1e-20);
        let same = submersion_inequality_check(&s, &c, &r, &r).unwrap();
        assert!(same.lhs.abs() < 1e-15 && same.rhs.abs() < 1e-6);
        let bump = NormalField::from_fn(&c, |_, x, _| e(3, 3) * (1.0 + 0.5 * x[0])).unwrap();
        let strict = submersion_inequality_check(&s, &c, &bump, &r).unwrap();
        assert!(strict.holds && strict.slack > 1e-3 && !strict.equality);
        assert!(strict.ratio_variance > 0.0);
    }

    #[test]
    fn knot_json_round_trip() {
        let sphere = make_sphere(3, 1).unwrap();
        let text = serde_json::to_string(&sphere).unwrap();
        assert!(text.contains("\"triangles\""));
        let back: DiscretizedKnot = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sphere);
        let circle = make_circle(3, 5).unwrap();
        let back: DiscretizedKnot = serde_json::from_str(&serde_json::to_string(&circle).unwrap()).unwrap();
        assert_eq!(back.topology(), &Topology::Cycle);
        let bad = r#"{"n":3,"s":1,"vertices":[[1,0,0]],"weights":[1.0],"frames":[[[1,1,0]]]}"#;
        assert!(serde_json::from_str::<DiscretizedKnot>(bad).is_err());
        let field = serde_json::to_value(radial(&circle)).unwrap();
        let parsed = NormalField::from_json(&circle, serde_json::from_value(field).unwrap()).unwrap();
        assert!(parsed.max_abs_diff(&radial(&circle)) == 0.0);
    }
}
