use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::AlternatingTensor;
use crate::linalg;

/// Orthonormality tolerance for frames.
pub const FRAME_TOLERANCE: f64 = 1e-12;

/// Oriented k-plane in ℝⁿ given by an ordered orthonormal frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlaneJson", into = "PlaneJson")]
pub struct OrientedPlane {
    dim: usize,
    frame: Vec<DVector<f64>>,
}

impl OrientedPlane {
    /// Wraps a frame that must already be orthonormal to within [`FRAME_TOLERANCE`].
    pub fn new(frame: Vec<DVector<f64>>) -> Result<Self> {
        let dim = frame
            .first()
            .map(|v| v.len())
            .ok_or(Error::InvalidParameter("empty frame".into()))?;
        Self::with_dim(dim, frame)
    }

    fn with_dim(dim: usize, frame: Vec<DVector<f64>>) -> Result<Self> {
        if dim == 0 || dim > crate::exterior::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if frame.len() > dim {
            return Err(Error::GradeOverflow {
                grade: frame.len(),
                dim,
            });
        }
        for v in &frame {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let plane = Self { dim, frame };
        plane.check_orthonormal(FRAME_TOLERANCE)?;
        Ok(plane)
    }

    /// Orthonormalizes `vectors` in order (orientation preserving).
    pub fn from_vectors(vectors: &[DVector<f64>]) -> Result<Self> {
        let frame = linalg::gram_schmidt(vectors, linalg::PIVOT_TOLERANCE).ok_or(Error::ZeroVector)?;
        Self::new(frame)
    }

    /// Coordinate plane `span(e_{a₁},…,e_{a_k})` for 1-based axes.
    pub fn coordinate(dim: usize, axes: &[usize]) -> Result<Self> {
        let mut frame = Vec::with_capacity(axes.len());
        for &a in axes {
            if a == 0 || a > dim {
                return Err(Error::InvalidIndex(axes.to_vec()));
            }
            frame.push(linalg::unit(dim, a - 1));
        }
        Self::with_dim(dim, frame)
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[DVector<f64>] {
        &self.frame
    }

    /// Unit k-vector `f₁∧…∧f_k`.
    pub fn xi(&self) -> AlternatingTensor {
        AlternatingTensor::wedge_vectors(self.dim, &self.frame).expect("frame fits the ambient space")
    }

    /// Largest entry of `FᵀF − I`.
    pub fn orthonormality_residual(&self) -> f64 {
        linalg::orthonormality_residual(&self.frame)
    }

    pub fn check_orthonormal(&self, tol: f64) -> Result<()> {
        let residual = self.orthonormality_residual();
        if residual > tol {
            Err(Error::NotOrthonormal { residual })
        } else {
            Ok(())
        }
    }

    /// Same plane with the opposite orientation.
    pub fn flipped(&self) -> Self {
        let mut frame = self.frame.clone();
        if let Some(last) = frame.last_mut() {
            *last = -last.clone();
        }
        Self { dim: self.dim, frame }
    }

    /// Orthogonal projector onto the plane.
    pub fn projector(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.dim, self.dim);
        for f in &self.frame {
            p += f * f.transpose();
        }
        p
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Vec<DVector<f64>> {
        linalg::complement_basis(self.dim, &self.frame)
    }

    /// `|v − Pv|`, zero exactly when `v` lies in the plane.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.projector() * v).norm()
    }
}

#[derive(Serialize, Deserialize)]
struct PlaneJson {
    dim: usize,
    frame: Vec<Vec<f64>>,
}

impl From<OrientedPlane> for PlaneJson {
    fn from(p: OrientedPlane) -> Self {
        PlaneJson {
            dim: p.dim,
            frame: p.frame.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<PlaneJson> for OrientedPlane {
    type Error = Error;

    fn try_from(j: PlaneJson) -> Result<Self> {
        let frame = j.frame.into_iter().map(DVector::from_vec).collect();
        OrientedPlane::with_dim(j.dim, frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_plane_xi() {
        let p = OrientedPlane::coordinate(4, &[3, 1]).unwrap();
        assert_eq!(p.xi().terms(), vec![(vec![1, 3], -1.0)]);
        assert_eq!(p.flipped().xi().terms(), vec![(vec![1, 3], 1.0)]);
    }

    #[test]
    fn from_vectors_keeps_orientation() {
        let p = OrientedPlane::from_vectors(&[
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
            DVector::from_vec(vec![1.0, 3.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(p.xi().terms(), vec![(vec![1, 2], 1.0)]);
        assert!(
            OrientedPlane::from_vectors(&[DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![2.0, 0.0])])
                .is_err()
        );
    }

    #[test]
    fn json_shape() {
        let p = OrientedPlane::coordinate(3, &[1, 2]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":3,"frame":[[1.0,0.0,0.0],[0.0,1.0,0.0]]}"#);
        let bad = r#"{"dim":3,"frame":[[1.0,0.0,0.0],[1.0,1.0,0.0]]}"#;
        assert!(serde_json::from_str::<OrientedPlane>(bad).is_err());
    }

    #[test]
    fn complement_is_orthogonal() {
        let p = OrientedPlane::coordinate(5, &[2, 4]).unwrap();
        let c = p.complement();
        assert_eq!(c.len(), 3);
        for u in &c {
            assert!(p.distance(u) > 0.999);
        }
    }
}
