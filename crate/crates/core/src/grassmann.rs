//! Defect minimization over Grassmannians of oriented planes.
//!
//! Frames are updated by projected gradient steps with central finite-difference
//! gradients and a Gram–Schmidt retraction. A run stops when the defect drops
//! below `tol²`, when the line search stalls, or at `max_iter`; it is reported
//! converged when the final defect is below `tol`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::plane::OrientedPlane;
use crate::sampling;
use crate::vcp::{random_orthonormal_frame, VcpKind, VcpStructure};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub step0: f64,
    pub shrink: f64,
    pub tol: f64,
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iter: 500,
            step0: 0.1,
            shrink: 0.5,
            tol: 1e-10,
            fd_step: 1e-5,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive =
            self.restarts > 0 && self.max_iter > 0 && self.step0 > 0.0 && self.tol > 0.0 && self.fd_step > 0.0;
        if !positive || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "optimizer config out of range: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `|τ(frame)|²` on (r+1)-planes.
    Instanton,
    /// `‖φ|_C‖²`.
    Brane,
}

impl Objective {
    pub fn evaluate(self, s: &VcpStructure, frame: &[DVector<f64>]) -> f64 {
        match self {
            Objective::Instanton => s.tau(frame).map(|t| t.norm_squared()).unwrap_or(f64::INFINITY),
            Objective::Brane => {
                if frame.len() <= s.r() {
                    0.0
                } else {
                    s.phi()
                        .pullback(frame)
                        .map(|t| t.norm_squared())
                        .unwrap_or(f64::INFINITY)
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptResult {
    pub plane: OrientedPlane,
    pub defect: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Defect before the first step and after every accepted step.
    pub history: Vec<f64>,
}

/// Random oriented k-plane from Gaussian draws.
pub fn random_plane(n: usize, k: usize, seed: u64) -> Result<OrientedPlane> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "plane dimension k = {k} must be in 1..={n}"
        )));
    }
    let mut rng = sampling::rng_for(seed, 0);
    OrientedPlane::new(random_orthonormal_frame(&mut rng, n, k))
}

/// `|τ(frame of P)|²`.
pub fn instanton_defect(s: &VcpStructure, p: &OrientedPlane) -> Result<f64> {
    if p.k() != s.r() + 1 || p.dim_ambient() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.r() + 1,
            found: p.k(),
        });
    }
    Ok(s.tau(p.frame())?.norm_squared())
}

/// `‖φ|_C‖²`.
pub fn brane_residual(s: &VcpStructure, c: &OrientedPlane) -> Result<f64> {
    if c.dim_ambient() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: c.dim_ambient(),
        });
    }
    Ok(Objective::Brane.evaluate(s, c.frame()))
}

fn retract(frame: &DMatrix<f64>) -> Option<Vec<DVector<f64>>> {
    let cols: Vec<DVector<f64>> = frame.column_iter().map(|c| c.into_owned()).collect();
    linalg::gram_schmidt(&cols, linalg::PIVOT_TOLERANCE)
}

fn value_at(s: &VcpStructure, objective: Objective, frame: &DMatrix<f64>) -> f64 {
    match retract(frame) {
        Some(q) => objective.evaluate(s, &q),
        None => f64::INFINITY,
    }
}

/// Central finite-difference gradient of `F ↦ f(GS(F))` in the frame entries.
pub fn fd_gradient(s: &VcpStructure, objective: Objective, frame: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let mut grad = DMatrix::zeros(frame.nrows(), frame.ncols());
    let mut probe = frame.clone();
    for j in 0..frame.ncols() {
        for i in 0..frame.nrows() {
            let x = frame[(i, j)];
            probe[(i, j)] = x + h;
            let up = value_at(s, objective, &probe);
            probe[(i, j)] = x - h;
            let down = value_at(s, objective, &probe);
            probe[(i, j)] = x;
            grad[(i, j)] = (up - down) / (2.0 * h);
        }
    }
    grad
}

/// Descent from a given start plane.
pub fn minimize_from(
    s: &VcpStructure,
    objective: Objective,
    start: &OrientedPlane,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    cfg.validate()?;
    if start.dim_ambient() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: start.dim_ambient(),
        });
    }
    let stop = cfg.tol * cfg.tol;
    let mut frame = DMatrix::from_columns(start.frame());
    let mut f = objective.evaluate(s, start.frame());
    let mut history = vec![f];
    let mut step = cfg.step0;
    let mut iterations = 0;

    while iterations < cfg.max_iter && f > stop {
        let raw = fd_gradient(s, objective, &frame, cfg.fd_step);
        // Horizontal part: remove the in-plane component.
        let grad = &raw - &frame * (frame.transpose() * &raw);
        let gnorm2 = grad.norm_squared();
        if gnorm2 == 0.0 || !gnorm2.is_finite() {
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..60 {
            if let Some(q) = retract(&(&frame - &grad * t)) {
                let trial = objective.evaluate(s, &q);
                if trial <= f - 1e-4 * t * gnorm2 && trial < f {
                    accepted = Some((q, trial, t));
                    break;
                }
            }
            t *= cfg.shrink;
        }
        let Some((q, trial, t)) = accepted else {
            break;
        };
        frame = DMatrix::from_columns(&q);
        f = trial;
        history.push(f);
        iterations += 1;
        step = (t * 2.0).min(1.0);
    }

    let cols: Vec<DVector<f64>> = frame.column_iter().map(|c| c.into_owned()).collect();
    Ok(OptResult {
        plane: OrientedPlane::new(cols)?,
        defect: f,
        iterations,
        converged: f < cfg.tol,
        history,
    })
}

/// One run per restart from seeded random starts, in restart order.
pub fn minimize(s: &VcpStructure, objective: Objective, k: usize, cfg: &OptimizerConfig) -> Result<Vec<OptResult>> {
    cfg.validate()?;
    if k == 0 || k > s.n() {
        return Err(Error::InvalidParameter(format!(
            "plane dimension k = {k} must be in 1..={}",
            s.n()
        )));
    }
    if objective == Objective::Instanton && k != s.r() + 1 {
        return Err(Error::InvalidParameter(format!(
            "instanton search needs k = r + 1 = {}",
            s.r() + 1
        )));
    }
    (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let start = random_plane(s.n(), k, sampling::derive_seed(cfg.seed, i as u64))?;
            minimize_from(s, objective, &start, cfg)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub min_residual: f64,
    pub converged_runs: usize,
    pub runs: Vec<OptResult>,
}

/// Brane-residual minimization over 5-planes of the Spin(7) model.
pub fn nonexistence_scan(s: &VcpStructure, k: usize, cfg: &OptimizerConfig) -> Result<ScanReport> {
    if s.kind() != VcpKind::Spin7 || k != 5 {
        return Err(Error::KindMismatch(
            "nonexistence scan is defined for spin7 with k = 5".into(),
        ));
    }
    let runs = minimize(s, Objective::Brane, k, cfg)?;
    Ok(ScanReport {
        min_residual: runs.iter().map(|r| r.defect).fold(f64::INFINITY, f64::min),
        converged_runs: runs.iter().filter(|r| r.converged).count(),
        runs,
    })
}

/// Richardson consistency of the finite-difference gradient: the difference
/// between the step-`h` and step-`h/2` estimates, relative to the gradient size.
pub fn gradient_consistency(s: &VcpStructure, objective: Objective, frame: &[DVector<f64>], h: f64) -> f64 {
    let m = DMatrix::from_columns(frame);
    let g1 = fd_gradient(s, objective, &m, h);
    let g2 = fd_gradient(s, objective, &m, h / 2.0);
    (g1 - &g2).amax() / g2.amax().max(1e-300)
}
