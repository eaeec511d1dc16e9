//! Exterior algebra over Euclidean ℝⁿ with exact index bookkeeping.
//!
//! A grade-k tensor is stored as a sparse map from basis blades (strictly
//! increasing index sets) to real coefficients. The standard basis is
//! orthonormal, so vectors and covectors are identified through the metric
//! and the same type carries forms (φ, ω, Ω, Θ) and multivectors
//! (v₁∧…∧v_k).
//!
//! Conventions:
//! - indices are 0-based internally and 1-based in the JSON schema and in the
//!   `basis`/`from_terms` constructors, matching `dx^{123}` notation;
//! - contraction fills the first slots: `(ι_{v₁∧…∧v_j} a)(w…) = a(v₁,…,v_j,w…)`;
//! - the Hodge star satisfies `e_I ∧ *e_I = vol` with `vol = e₁∧…∧e_n`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::OrientedPlane;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 12;

/// Coefficients below this magnitude are dropped by [`AlternatingTensor::normalized`].
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Sign of the permutation that sorts `seq`, or 0 if `seq` has a repeated entry.
pub fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            match seq[i].cmp(&seq[j]) {
                Ordering::Equal => return 0,
                Ordering::Greater => inversions += 1,
                Ordering::Less => {}
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A basis blade `e_{i₁}∧…∧e_{i_k}`, stored as a bitmask of 0-based indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u16);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub fn from_mask(mask: u16) -> Self {
        Blade(mask)
    }

    /// Builds a blade from strictly increasing 0-based indices.
    pub fn from_sorted(indices: &[usize]) -> Self {
        Blade(indices.iter().fold(0u16, |m, &i| m | (1 << i)))
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Sorted 0-based indices.
    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Sorted 0-based indices without allocating.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                return None;
            }
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        })
    }

    /// Sign of `e_self ∧ e_other`, or `None` when the blades overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<f64> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each index of `other` must move past every larger index of `self`.
        let swaps: u32 = other.iter().map(|j| (self.0 >> (j + 1)).count_ones()).sum();
        Some(if swaps.is_multiple_of(2) { 1.0 } else { -1.0 })
    }

    /// `ι_{e_i} e_self = sign · e_rest`, with `sign = (-1)^position`.
    fn contract(self, i: usize) -> Option<(Blade, f64)> {
        if !self.contains(i) {
            return None;
        }
        let position = (self.0 & ((1u16 << i) - 1)).count_ones();
        let sign = if position.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((Blade(self.0 & !(1 << i)), sign))
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        // Same grade: the smallest index in the symmetric difference decides.
        self.grade().cmp(&other.grade()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & diff & diff.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "e{{{}}}", idx.join(","))
    }
}

/// Graded skew-symmetric tensor on ℝⁿ.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorJson", into = "TensorJson")]
pub struct AlternatingTensor {
    dim: usize,
    grade: usize,
    coeffs: BTreeMap<Blade, f64>,
}

impl AlternatingTensor {
    pub fn zero(dim: usize, grade: usize) -> Result<Self> {
        check_dim(dim)?;
        if grade > dim {
            return Err(Error::GradeOverflow { grade, dim });
        }
        Ok(Self {
            dim,
            grade,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        let mut t = Self::zero(dim, 0)?;
        t.add_term(Blade::EMPTY, value);
        Ok(t.normalized())
    }

    /// `dx^{i₁}∧…∧dx^{i_k}` from 1-based indices in any order.
    ///
    /// Unsorted input picks up the sign of the sorting permutation; repeated
    /// indices give the zero tensor.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        Self::from_terms(dim, indices.len(), [(indices.to_vec(), 1.0)])
    }

    /// Sum of signed basis terms given with 1-based, possibly unsorted indices.
    pub fn from_terms<I>(dim: usize, grade: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut t = Self::zero(dim, grade)?;
        for (idx, c) in terms {
            if idx.len() != grade {
                return Err(Error::GradeMismatch {
                    expected: grade,
                    found: idx.len(),
                });
            }
            if idx.iter().any(|&i| i == 0 || i > dim) {
                return Err(Error::InvalidIndex(idx));
            }
            let sign = permutation_sign(&idx);
            if sign == 0 {
                continue;
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            t.add_term(Blade::from_sorted(&zero_based), f64::from(sign) * c);
        }
        Ok(t.normalized())
    }

    /// Grade-1 tensor with the components of `v`.
    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        let mut t = Self::zero(v.len(), 1)?;
        for (i, &c) in v.iter().enumerate() {
            t.add_term(Blade::from_sorted(&[i]), c);
        }
        Ok(t.normalized())
    }

    /// The grade-2 tensor `Σ_{i<j} M[(i,j)] e_i∧e_j` for a skew matrix.
    pub fn from_skew_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
        let mut t = Self::zero(n, 2)?;
        for i in 0..n {
            for j in (i + 1)..n {
                t.add_term(Blade::from_sorted(&[i, j]), m[(i, j)]);
            }
        }
        Ok(t.normalized())
    }

    /// `v₁∧…∧v_k` for vectors of a common dimension.
    pub fn wedge_vectors(dim: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        let mut acc = Self::scalar(dim, 1.0)?;
        for v in vectors {
            check_len(dim, v.len())?;
            acc = acc.wedge(&Self::from_vector(v)?)?;
        }
        Ok(acc)
    }

    /// `e₁∧…∧e_n`.
    pub fn volume(dim: usize) -> Result<Self> {
        let idx: Vec<usize> = (1..=dim).collect();
        Self::basis(dim, &idx)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Raw blade/coefficient pairs in blade order.
    pub fn blades(&self) -> impl Iterator<Item = (Blade, f64)> + '_ {
        self.coeffs.iter().map(|(&b, &c)| (b, c))
    }

    /// Terms as (1-based sorted indices, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        self.coeffs
            .iter()
            .map(|(b, &c)| (b.indices().into_iter().map(|i| i + 1).collect(), c))
            .collect()
    }

    /// Coefficient of `dx^{idx}` for 1-based indices in any order (signed).
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        if idx.len() != self.grade || idx.iter().any(|&i| i == 0 || i > self.dim) {
            return 0.0;
        }
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        self.coeff_seq(&zero_based)
    }

    /// `a(e_{s₁},…,e_{s_k})` for a 0-based index sequence.
    pub fn coeff_seq(&self, seq: &[usize]) -> f64 {
        let sign = permutation_sign(seq);
        if sign == 0 {
            return 0.0;
        }
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        f64::from(sign) * self.coeffs.get(&Blade::from_sorted(&sorted)).copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, blade: Blade, c: f64) {
        *self.coeffs.entry(blade).or_insert(0.0) += c;
    }

    /// Drops coefficients below [`ZERO_THRESHOLD`].
    pub fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| c.abs() >= ZERO_THRESHOLD);
        self
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        check_len(self.dim, other.dim)?;
        if self.grade != other.grade {
            return Err(Error::GradeMismatch {
                expected: self.grade,
                found: other.grade,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (&b, &c) in &other.coeffs {
            out.add_term(b, c);
        }
        Ok(out.normalized())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            grade: self.grade,
            coeffs: self.coeffs.iter().map(|(&b, &c)| (b, c * s)).collect(),
        }
        .normalized()
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_len(self.dim, other.dim)?;
        let grade = self.grade + other.grade;
        if grade > self.dim {
            return Err(Error::GradeOverflow { grade, dim: self.dim });
        }
        let mut out = Self::zero(self.dim, grade)?;
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                if let Some(sign) = a.wedge_sign(b) {
                    out.add_term(Blade(a.0 | b.0), sign * ca * cb);
                }
            }
        }
        Ok(out.normalized())
    }

    /// `ι_v a` for a single vector `v`.
    pub fn interior_vector(&self, v: &DVector<f64>) -> Result<Self> {
        check_len(self.dim, v.len())?;
        if self.grade == 0 {
            return Err(Error::GradeOverflow { grade: 1, dim: 0 });
        }
        let mut out = Self::zero(self.dim, self.grade - 1)?;
        for (&b, &c) in &self.coeffs {
            for i in b.iter() {
                if v[i] == 0.0 {
                    continue;
                }
                let (rest, sign) = b.contract(i).expect("index in blade");
                out.add_term(rest, sign * v[i] * c);
            }
        }
        Ok(out.normalized())
    }

    /// `ι_{v₁∧…∧v_j} a = a(v₁,…,v_j,·)`.
    pub fn interior_vectors(&self, vs: &[DVector<f64>]) -> Result<Self> {
        if vs.len() > self.grade {
            return Err(Error::GradeMismatch {
                expected: self.grade,
                found: vs.len(),
            });
        }
        let mut acc = self.clone();
        for v in vs {
            acc = acc.interior_vector(v)?;
        }
        Ok(acc)
    }

    /// Interior product by a multivector `x` of grade ≤ grade(self).
    pub fn interior(x: &Self, a: &Self) -> Result<Self> {
        check_len(a.dim, x.dim)?;
        if x.grade > a.grade {
            return Err(Error::GradeMismatch {
                expected: a.grade,
                found: x.grade,
            });
        }
        let mut out = Self::zero(a.dim, a.grade - x.grade)?;
        for (&xb, &xc) in &x.coeffs {
            for (&ab, &ac) in &a.coeffs {
                let mut blade = ab;
                let mut sign = 1.0;
                let mut alive = true;
                for i in xb.iter() {
                    match blade.contract(i) {
                        Some((rest, s)) => {
                            blade = rest;
                            sign *= s;
                        }
                        None => {
                            alive = false;
                            break;
                        }
                    }
                }
                if alive {
                    out.add_term(blade, sign * xc * ac);
                }
            }
        }
        Ok(out.normalized())
    }

    /// Hodge star for the standard orientation.
    pub fn hodge_star(&self) -> Self {
        let full: u16 = if self.dim == 16 {
            u16::MAX
        } else {
            (1u16 << self.dim) - 1
        };
        let mut out = Self {
            dim: self.dim,
            grade: self.dim - self.grade,
            coeffs: BTreeMap::new(),
        };
        for (&b, &c) in &self.coeffs {
            let comp = Blade(full & !b.0);
            let sign = b.wedge_sign(comp).expect("complement is disjoint");
            out.add_term(comp, sign * c);
        }
        out.normalized()
    }

    /// Inner product in which basis blades are orthonormal.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .map(|(b, c)| c * other.coeffs.get(b).copied().unwrap_or(0.0))
            .sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest coefficient difference; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.try_sub(other) {
            Ok(d) => d.coeffs.values().fold(0.0, |m, c| m.max(c.abs())),
            Err(_) => f64::INFINITY,
        }
    }

    /// `a(v₁,…,v_k)` by summing coefficient-weighted minors.
    pub fn evaluate(&self, vectors: &[DVector<f64>]) -> Result<f64> {
        if vectors.len() != self.grade {
            return Err(Error::Arity {
                expected: self.grade,
                found: vectors.len(),
            });
        }
        for v in vectors {
            check_len(self.dim, v.len())?;
        }
        let k = self.grade;
        if k == 0 {
            return Ok(self.coeffs.get(&Blade::EMPTY).copied().unwrap_or(0.0));
        }
        let mut minor = vec![0.0; k * k];
        let mut total = 0.0;
        for (b, &c) in &self.coeffs {
            for (row, i) in b.iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    minor[row * k + col] = v[i];
                }
            }
            total += c * determinant(&mut minor, k);
        }
        Ok(total)
    }

    /// Pullback along the linear map whose columns are `frame`; the result lives
    /// on ℝ^{frame.len()} with the frame as its standard basis.
    pub fn pullback(&self, frame: &[DVector<f64>]) -> Result<Self> {
        let m = frame.len();
        check_dim(m.max(1))?;
        for v in frame {
            check_len(self.dim, v.len())?;
        }
        let mut out = Self::zero(m, self.grade).map_err(|_| Error::GradeOverflow {
            grade: self.grade,
            dim: m,
        })?;
        for subset in subsets(m, self.grade) {
            let vs: Vec<DVector<f64>> = subset.iter().map(|&j| frame[j].clone()).collect();
            let value = self.evaluate(&vs)?;
            out.add_term(Blade::from_sorted(&subset), value);
        }
        Ok(out.normalized())
    }

    /// Restriction to an oriented plane, in the plane's frame coordinates.
    pub fn restrict(&self, plane: &OrientedPlane) -> Result<Self> {
        check_len(self.dim, plane.dim_ambient())?;
        plane.check_orthonormal(crate::plane::FRAME_TOLERANCE)?;
        self.pullback(plane.frame())
    }

    /// Metric dual of a grade-1 tensor.
    pub fn to_vector(&self) -> Result<DVector<f64>> {
        if self.grade != 1 {
            return Err(Error::GradeMismatch {
                expected: 1,
                found: self.grade,
            });
        }
        let mut v = DVector::zeros(self.dim);
        for (b, &c) in &self.coeffs {
            v[b.indices()[0]] = c;
        }
        Ok(v)
    }

    /// Skew matrix `M[(i,j)] = a(e_i, e_j)` of a grade-2 tensor.
    pub fn to_skew_matrix(&self) -> Result<DMatrix<f64>> {
        if self.grade != 2 {
            return Err(Error::GradeMismatch {
                expected: 2,
                found: self.grade,
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (b, &c) in &self.coeffs {
            let idx = b.indices();
            m[(idx[0], idx[1])] = c;
            m[(idx[1], idx[0])] = -c;
        }
        Ok(m)
    }
}

impl fmt::Debug for AlternatingTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlternatingTensor(dim={}, grade={}, ", self.dim, self.grade)?;
        f.debug_map().entries(self.coeffs.iter()).finish()?;
        write!(f, ")")
    }
}

impl Add for &AlternatingTensor {
    type Output = AlternatingTensor;

    /// Panics on shape mismatch; use [`AlternatingTensor::try_add`] otherwise.
    fn add(self, rhs: Self) -> AlternatingTensor {
        self.try_add(rhs).expect("tensor shapes must agree")
    }
}

impl Sub for &AlternatingTensor {
    type Output = AlternatingTensor;

    fn sub(self, rhs: Self) -> AlternatingTensor {
        self.try_sub(rhs).expect("tensor shapes must agree")
    }
}

impl Neg for &AlternatingTensor {
    type Output = AlternatingTensor;

    fn neg(self) -> AlternatingTensor {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &AlternatingTensor {
    type Output = AlternatingTensor;

    fn mul(self, rhs: f64) -> AlternatingTensor {
        self.scaled(rhs)
    }
}

/// Complex-valued form stored as a pair of real tensors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexJson", into = "ComplexJson")]
pub struct ComplexAlternatingTensor {
    re: AlternatingTensor,
    im: AlternatingTensor,
}

impl ComplexAlternatingTensor {
    pub fn new(re: AlternatingTensor, im: AlternatingTensor) -> Result<Self> {
        re.same_shape(&im)?;
        Ok(Self { re, im })
    }

    pub fn from_real(re: AlternatingTensor) -> Self {
        let im = AlternatingTensor::zero(re.dim, re.grade).expect("shape already valid");
        Self { re, im }
    }

    pub fn re(&self) -> &AlternatingTensor {
        &self.re
    }

    pub fn im(&self) -> &AlternatingTensor {
        &self.im
    }

    pub fn dim(&self) -> usize {
        self.re.dim
    }

    pub fn grade(&self) -> usize {
        self.re.grade
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.scaled(-1.0),
        }
    }

    /// Multiplication by the complex scalar `a + ib`.
    pub fn scale_complex(&self, a: f64, b: f64) -> Self {
        Self {
            re: &self.re.scaled(a) - &self.im.scaled(b),
            im: &self.re.scaled(b) + &self.im.scaled(a),
        }
    }

    /// `e^{iθ}` times this form.
    pub fn phase_rotate(&self, theta: f64) -> Self {
        self.scale_complex(theta.cos(), theta.sin())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.try_add(&other.re)?,
            im: self.im.try_add(&other.im)?,
        })
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let re = self.re.wedge(&other.re)?.try_sub(&self.im.wedge(&other.im)?)?;
        let im = self.re.wedge(&other.im)?.try_add(&self.im.wedge(&other.re)?)?;
        Ok(Self { re, im })
    }

    /// Contraction by the real vector `v`.
    pub fn interior_vector(&self, v: &DVector<f64>) -> Result<Self> {
        Ok(Self {
            re: self.re.interior_vector(v)?,
            im: self.im.interior_vector(v)?,
        })
    }

    /// Contraction by the complex vector `p + iq`.
    pub fn interior_complex(&self, p: &DVector<f64>, q: &DVector<f64>) -> Result<Self> {
        let (rp, ip) = (self.re.interior_vector(p)?, self.im.interior_vector(p)?);
        let (rq, iq) = (self.re.interior_vector(q)?, self.im.interior_vector(q)?);
        Ok(Self {
            re: rp.try_sub(&iq)?,
            im: ip.try_add(&rq)?,
        })
    }

    /// Value `(re, im)` on real vectors.
    pub fn evaluate(&self, vectors: &[DVector<f64>]) -> Result<(f64, f64)> {
        Ok((self.re.evaluate(vectors)?, self.im.evaluate(vectors)?))
    }

    pub fn pullback(&self, frame: &[DVector<f64>]) -> Result<Self> {
        Ok(Self {
            re: self.re.pullback(frame)?,
            im: self.im.pullback(frame)?,
        })
    }

    pub fn restrict(&self, plane: &OrientedPlane) -> Result<Self> {
        Ok(Self {
            re: self.re.restrict(plane)?,
            im: self.im.restrict(plane)?,
        })
    }

    /// `|a|² = |re|² + |im|²`.
    pub fn norm(&self) -> f64 {
        (self.re.norm_squared() + self.im.norm_squared()).sqrt()
    }
}

/// Determinant of the row-major `k × k` matrix in `a` (destroyed).
pub(crate) fn determinant(a: &mut [f64], k: usize) -> f64 {
    match k {
        0 => return 1.0,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        3 => {
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {}
    }
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))
            .unwrap();
        if a[pivot * k + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        let p = a[col * k + col];
        det *= p;
        for row in (col + 1)..k {
            let factor = a[row * k + col] / p;
            if factor != 0.0 {
                for c in col..k {
                    a[row * k + c] -= factor * a[col * k + c];
                }
            }
        }
    }
    det
}

/// All strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    idx: Vec<usize>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    dim: usize,
    grade: usize,
    terms: Vec<TermJson>,
}

impl From<AlternatingTensor> for TensorJson {
    fn from(t: AlternatingTensor) -> Self {
        TensorJson {
            dim: t.dim,
            grade: t.grade,
            terms: t.terms().into_iter().map(|(idx, c)| TermJson { idx, c }).collect(),
        }
    }
}

impl TryFrom<TensorJson> for AlternatingTensor {
    type Error = Error;

    fn try_from(j: TensorJson) -> Result<Self> {
        for term in &j.terms {
            let increasing = term.idx.windows(2).all(|w| w[0] < w[1]);
            if !increasing || term.idx.iter().any(|&i| i == 0 || i > j.dim) {
                return Err(Error::InvalidIndex(term.idx.clone()));
            }
        }
        Self::from_terms(j.dim, j.grade, j.terms.into_iter().map(|t| (t.idx, t.c)))
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: AlternatingTensor,
    im: AlternatingTensor,
}

impl From<ComplexAlternatingTensor> for ComplexJson {
    fn from(t: ComplexAlternatingTensor) -> Self {
        ComplexJson { re: t.re, im: t.im }
    }
}

impl TryFrom<ComplexJson> for ComplexAlternatingTensor {
    type Error = Error;

    fn try_from(j: ComplexJson) -> Result<Self> {
        ComplexAlternatingTensor::new(j.re, j.im)
    }
}
