//! Structural regularizers and the combined training objective.
//!
//! Four interchangeable penalty kinds, all of the form
//! `loss = sum_ij |w_ij| * m_ij` for a nonnegative multiplier matrix `m`:
//!
//! * `L1`         — `m = 1`, plain sparsification;
//! * `SpaceOnly`  — `m = D`, wiring cost in lattice distance;
//! * `CommOnly`   — `m = C(W)`, cost on well-connected routes;
//! * `SpaceComm`  — `m = D .* C(W)`, the spatially embedded objective
//!   (long *and* heavily used connections pay the most).
//!
//! The multiplier is gradient-stopped: optimizer steps treat `D` and `C` as
//! constants, so the penalty gradient is `sign(w_ij) * m_ij` — a reweighted
//! L1. `C` is recomputed from the live weights at every step, which is what
//! couples the penalty to the network's evolving topology without ever
//! differentiating through a matrix exponential.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::DistanceLattice;
use crate::error::{Error, Result};
use crate::numerics::matrix_exp;
use crate::Matrix;

/// Default floor for node strengths, keeping `S^{-1/2}` finite when a neuron
/// is fully disconnected.
pub const DEFAULT_STRENGTH_FLOOR: f64 = 1e-6;

/// Which structural penalty a run trains under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegularizerKind {
    /// Plain L1 on the recurrent weights.
    #[serde(rename = "l1")]
    L1,
    /// Distance-and-communicability weighted L1 (the spatially embedded
    /// objective; CLI name `sernn`).
    #[serde(rename = "sernn")]
    SpaceComm,
    /// Distance-weighted L1 only.
    #[serde(rename = "space")]
    SpaceOnly,
    /// Communicability-weighted L1 only.
    #[serde(rename = "comm")]
    CommOnly,
}

impl RegularizerKind {
    /// All kinds, in the order used by sweep outputs.
    pub const ALL: [RegularizerKind; 4] = [
        RegularizerKind::L1,
        RegularizerKind::SpaceComm,
        RegularizerKind::SpaceOnly,
        RegularizerKind::CommOnly,
    ];

    /// Short stable name used in CLI flags, directory names, and CSV cells.
    pub fn as_str(self) -> &'static str {
        match self {
            RegularizerKind::L1 => "l1",
            RegularizerKind::SpaceComm => "sernn",
            RegularizerKind::SpaceOnly => "space",
            RegularizerKind::CommOnly => "comm",
        }
    }
}

impl fmt::Display for RegularizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegularizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(RegularizerKind::L1),
            "sernn" => Ok(RegularizerKind::SpaceComm),
            "space" => Ok(RegularizerKind::SpaceOnly),
            "comm" => Ok(RegularizerKind::CommOnly),
            other => Err(Error::InvalidArg(format!(
                "unknown regularizer kind {other:?} (expected l1, sernn, space, or comm)"
            ))),
        }
    }
}

/// Everything a penalty evaluation needs besides the weights themselves.
#[derive(Debug, Clone)]
pub struct ConstraintContext {
    lattice: DistanceLattice,
    strength_floor: f64,
}

impl ConstraintContext {
    pub fn new(lattice: DistanceLattice) -> Self {
        ConstraintContext {
            lattice,
            strength_floor: DEFAULT_STRENGTH_FLOOR,
        }
    }

    pub fn lattice(&self) -> &DistanceLattice {
        &self.lattice
    }

    pub fn strength_floor(&self) -> f64 {
        self.strength_floor
    }
}

/// Total (in + out) absolute strength per node, floored at `floor`.
///
/// "Strength" for a directed graph is taken as `sum_j |w_ij| + sum_j |w_ji|`;
/// the floor keeps the normalization invertible for isolated neurons.
pub fn strength_diagonal(w: &Matrix, floor: f64) -> Result<Vec<f64>> {
    w.require_square()?;
    let n = w.rows();
    let mut s = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let a = w.get(i, j).abs();
            s[i] += a;
            s[j] += a;
        }
    }
    for v in &mut s {
        *v = v.max(floor);
    }
    Ok(s)
}

/// Network communicability `C = exp(S^{-1/2} |W| S^{-1/2})`.
///
/// `C_ij` sums all walks from `i` to `j` with an inverse-factorial discount
/// on length, on the strength-normalized absolute weights. Entries are
/// nonnegative and the diagonal is at least 1 (the identity term of the
/// series).
pub fn communicability(w: &Matrix, floor: f64) -> Result<Matrix> {
    let s = strength_diagonal(w, floor)?;
    let inv_sqrt: Vec<f64> = s.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let n = w.rows();
    let normalized = Matrix::from_fn(n, n, |i, j| w.get(i, j).abs() * inv_sqrt[i] * inv_sqrt[j]);
    matrix_exp(&normalized)
}

/// Penalty value and its gradient-stopped multiplier for one kind.
///
/// The training gradient of the returned loss with respect to `w_ij` is
/// `sign(w_ij) * m_ij`, with `sign(0) = 0`; callers must treat the
/// multiplier as a constant for the step and re-call this per step so the
/// communicability factor tracks the live weights.
pub fn constraint_loss(
    w: &Matrix,
    kind: RegularizerKind,
    ctx: &ConstraintContext,
) -> Result<(f64, Matrix)> {
    w.require_square()?;
    let n = w.rows();
    if n != ctx.lattice.len() {
        return Err(Error::DimMismatch(format!(
            "weights are {n}x{n} but the lattice has {} neurons",
            ctx.lattice.len()
        )));
    }
    let d = ctx.lattice.distances();
    let multiplier = match kind {
        RegularizerKind::L1 => Matrix::from_fn(n, n, |_, _| 1.0),
        RegularizerKind::SpaceOnly => d.clone(),
        RegularizerKind::CommOnly => communicability(w, ctx.strength_floor)?,
        RegularizerKind::SpaceComm => {
            let c = communicability(w, ctx.strength_floor)?;
            c.hadamard(d)?
        }
    };
    let mut loss = 0.0;
    for i in 0..n {
        for j in 0..n {
            loss += w.get(i, j).abs() * multiplier.get(i, j);
        }
    }
    Ok((loss, multiplier))
}

/// Subgradient of `|w|` with the convention `sign(0) = 0`.
///
/// `f64::signum` maps `+0.0` to `1.0`, which would push exactly-zero weights
/// off zero under the penalty; dedicated helper so every caller shares the
/// zero-stays-zero convention.
pub fn abs_subgradient(w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else if w > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Gradient of a penalty with its multiplier frozen: `sign(w_ij) * m_ij`.
pub fn penalty_gradient(w: &Matrix, multiplier: &Matrix) -> Result<Matrix> {
    w.zip_map(multiplier, |wij, mij| abs_subgradient(wij) * mij)
}

/// Combined objective `L_total = L_task + gamma * L_constraint`.
pub fn total_loss(task_loss: f64, gamma: f64, constraint: f64) -> Result<f64> {
    if !(task_loss.is_finite() && gamma.is_finite() && constraint.is_finite()) {
        return Err(Error::NonFinite("total_loss input"));
    }
    if gamma < 0.0 {
        return Err(Error::InvalidArg(format!(
            "regularization strength must be >= 0, got {gamma}"
        )));
    }
    Ok(task_loss + gamma * constraint)
}
