//! Small dense helpers shared by the structure modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Residual norm below which Gram–Schmidt treats a vector as dependent.
pub const PIVOT_TOLERANCE: f64 = 1e-8;

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > PIVOT_TOLERANCE {
            return v / norm;
        }
    }
}

/// Order-preserving modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Returns `None` if some vector is dependent on its predecessors to within
/// `tol` (relative to its own norm).
pub fn gram_schmidt(vectors: &[DVector<f64>], tol: f64) -> Option<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            return None;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= tol * scale {
            return None;
        }
        out.push(w / norm);
    }
    Some(out)
}

/// Gram–Schmidt that always takes the remaining vector with the largest
/// residual next. Output order follows the pivots.
pub fn gram_schmidt_pivoted(vectors: &[DVector<f64>], tol: f64) -> Option<Vec<DVector<f64>>> {
    let mut rest: Vec<DVector<f64>> = vectors.to_vec();
    let scales: Vec<f64> = rest.iter().map(|v| v.norm()).collect();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    let mut alive: Vec<usize> = (0..rest.len()).collect();
    while !alive.is_empty() {
        let (pos, &best) = alive
            .iter()
            .enumerate()
            .max_by(|a, b| (rest[*a.1].norm() / scales[*a.1]).total_cmp(&(rest[*b.1].norm() / scales[*b.1])))?;
        let norm = rest[best].norm();
        if scales[best] == 0.0 || norm <= tol * scales[best] {
            return None;
        }
        let q = &rest[best] / norm;
        alive.remove(pos);
        for &i in &alive {
            for _ in 0..2 {
                let c = q.dot(&rest[i]);
                rest[i].axpy(-c, &q, 1.0);
            }
        }
        out.push(q);
    }
    Some(out)
}

/// Largest entry of `FᵀF − I`.
pub fn orthonormality_residual(frame: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// Orthonormal basis of `span(vs)^⊥`, built from the standard basis with pivoting.
pub fn complement_basis(n: usize, vs: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let base = gram_schmidt_pivoted(vs, PIVOT_TOLERANCE).unwrap_or_default();
    let mut basis = base.clone();
    let mut out = Vec::new();
    while basis.len() < n {
        let candidate = (0..n)
            .map(|i| {
                let mut w = unit(n, i);
                for _ in 0..2 {
                    for q in &basis {
                        let c = q.dot(&w);
                        w.axpy(-c, q, 1.0);
                    }
                }
                w
            })
            .reduce(|best, w| if w.norm() > best.norm() + 1e-12 { w } else { best })
            .expect("n > 0");
        let q = &candidate / candidate.norm();
        basis.push(q.clone());
        out.push(q);
    }
    out
}

/// Orthonormal basis of the nullspace of `a` together with the gap between
/// the largest discarded and smallest kept singular value.
pub struct NullSpace {
    pub basis: Vec<DVector<f64>>,
    /// Smallest singular value above the tolerance (`inf` if none).
    pub smallest_kept: f64,
    /// Largest singular value at or below the tolerance (0 if none).
    pub largest_null: f64,
}

pub fn null_space(a: &DMatrix<f64>, tol: f64) -> NullSpace {
    let cols = a.ncols();
    let padded = if a.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut basis = Vec::new();
    let mut smallest_kept = f64::INFINITY;
    let mut largest_null: f64 = 0.0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            largest_null = largest_null.max(s);
            basis.push(v_t.row(i).transpose());
        } else {
            smallest_kept = smallest_kept.min(s);
        }
    }
    NullSpace {
        basis,
        smallest_kept,
        largest_null,
    }
}

/// Pairwise (cascade) summation; order depends only on the slice layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gram_schmidt_detects_dependence() {
        let a = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 2.0, 0.0]);
        assert!(gram_schmidt(&[a.clone(), b.clone()], PIVOT_TOLERANCE).is_none());
        assert!(gram_schmidt_pivoted(&[a, b], PIVOT_TOLERANCE).is_none());
    }

    #[test]
    fn complement_spans_the_rest() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vs: Vec<_> = (0..3).map(|_| gaussian_vector(&mut rng, 7)).collect();
        let c = complement_basis(7, &vs);
        assert_eq!(c.len(), 4);
        let mut all = gram_schmidt(&vs, 1e-8).unwrap();
        all.extend(c);
        assert!(orthonormality_residual(&all) < 1e-12);
    }

    #[test]
    fn null_space_of_projection() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-9);
        assert_eq!(ns.basis.len(), 1);
        assert!((ns.basis[0][2].abs() - 1.0).abs() < 1e-12);
        assert!((ns.smallest_kept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), xs.iter().sum::<f64>());
    }
}
