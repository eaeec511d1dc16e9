//! Vector cross products, calibrations and knot-space transgression on ℝⁿ and ℂⁿ.
//!
//! Everything is pointwise linear algebra on flat model spaces. Sampling
//! routines take an explicit seed and are reproducible across thread counts.

pub mod calibration;
pub mod complex_vcp;
pub mod error;
pub mod exterior;
pub mod grassmann;
pub mod knot;
pub mod linalg;
pub mod octonion;
pub mod plane;
pub mod sampling;
pub mod vcp;

pub use error::{Error, Result};
pub use exterior::{AlternatingTensor, ComplexAlternatingTensor};
pub use plane::OrientedPlane;
pub use vcp::{VcpKind, VcpStructure};
