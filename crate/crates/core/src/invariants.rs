//! Restriction and conservation relations between the qubit, partner and
//! Moon Schmidt weights.
//!
//! On the Moon-dominant branch (sin²θ ≥ cos²θ) the square-root coordinates
//! `√(2/K − 1)` obey
//!
//! ```text
//! √(2/K_A − 1) − √(2/K_M − 1) = 2(1 − p) cos²θ
//! √(2/K_a − 1) − √(2/K_M − 1) = 2p cos²θ
//! √(2/K_A − 1) + √(2/K_a − 1) = 1 + √(2/K_M − 1)
//! ```
//!
//! On the other branch only the signed identity is checked.

use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::schmidt::Branch;
use crate::schmidt::{moon_coordinate, sqrt_coordinate, FlowCoordinate, PreparationAngle};

const SLOPE_DEAD_ZONE: f64 = 1e-8;

fn require_branch(branch: Branch) -> Result<()> {
    match branch {
        Branch::MoonDominant => Ok(()),
        Branch::QubitDominant => Err(Error::Branch),
    }
}

/// Residuals of the two restriction relations, `(qubit, partner)`.
///
/// The right-hand sides are written through `p` for every model:
/// `2(1 − p)cos²θ` and `2p cos²θ`.
pub fn restriction_residuals(
    p: FlowCoordinate,
    theta: PreparationAngle,
    k_qubit: f64,
    k_partner: f64,
) -> Result<(f64, f64)> {
    require_branch(theta.branch())?;
    coordinate_restriction_residuals(p, theta, sqrt_coordinate(k_qubit)?, sqrt_coordinate(k_partner)?)
}

/// [`restriction_residuals`] on square-root coordinates `y = √(2/K − 1)`.
pub fn coordinate_restriction_residuals(
    p: FlowCoordinate,
    theta: PreparationAngle,
    y_qubit: f64,
    y_partner: f64,
) -> Result<(f64, f64)> {
    require_branch(theta.branch())?;
    let moon = moon_coordinate(theta);
    let c2 = theta.cos_sq();
    let rhs_qubit = 2.0 * (1.0 - p.value()) * c2;
    let rhs_partner = 2.0 * p.value() * c2;
    Ok(((y_qubit - moon - rhs_qubit).abs(), (y_partner - moon - rhs_partner).abs()))
}

/// `|√(2/K_A − 1) + √(2/K_a − 1) − 1 − √(2/K_M − 1)|`.
pub fn conservation_residual(k_qubit: f64, k_partner: f64, k_moon: f64, branch: Branch) -> Result<f64> {
    require_branch(branch)?;
    coordinate_conservation_residual(
        sqrt_coordinate(k_qubit)?,
        sqrt_coordinate(k_partner)?,
        sqrt_coordinate(k_moon)?,
        branch,
    )
}

/// [`conservation_residual`] on square-root coordinates `y = √(2/K − 1)`.
pub fn coordinate_conservation_residual(y_qubit: f64, y_partner: f64, y_moon: f64, branch: Branch) -> Result<f64> {
    require_branch(branch)?;
    Ok((y_qubit + y_partner - 1.0 - y_moon).abs())
}

/// `|(2p cos²θ − 1) + (2(1 − p)cos²θ − 1) − (2cos²θ − 2)|`, valid on both
/// branches.
pub fn signed_conservation_residual(p: FlowCoordinate, theta: PreparationAngle) -> f64 {
    let c2 = theta.cos_sq();
    let p = p.value();
    ((2.0 * p * c2 - 1.0) + (2.0 * (1.0 - p) * c2 - 1.0) - (2.0 * c2 - 2.0)).abs()
}

/// All relations evaluated at one trajectory point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub t: f64,
    pub k_qubit: f64,
    pub k_partner: f64,
    pub k_moon: f64,
    /// Zero on the qubit-dominant branch, where the relation is not stated.
    pub restrict_qubit_residual: f64,
    pub restrict_partner_residual: f64,
    pub conservation_residual: f64,
    pub signed_residual: f64,
    pub branch: Branch,
}

impl RelationReport {
    pub fn evaluate(
        t: f64,
        p: FlowCoordinate,
        theta: PreparationAngle,
        k_qubit: f64,
        k_partner: f64,
        k_moon: f64,
    ) -> Result<Self> {
        let branch = theta.branch();
        let (restrict_qubit_residual, restrict_partner_residual, conservation) = match branch {
            Branch::MoonDominant => {
                let (a, b) = restriction_residuals(p, theta, k_qubit, k_partner)?;
                (a, b, conservation_residual(k_qubit, k_partner, k_moon, branch)?)
            }
            Branch::QubitDominant => (0.0, 0.0, 0.0),
        };
        Ok(Self {
            t,
            k_qubit,
            k_partner,
            k_moon,
            restrict_qubit_residual,
            restrict_partner_residual,
            conservation_residual: conservation,
            signed_residual: signed_conservation_residual(p, theta),
            branch,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementarityVerdict {
    pub pass: bool,
    /// Intervals where both weights moved in the same direction.
    pub violations: usize,
    /// Intervals where both slopes cleared the dead zone.
    pub checked: usize,
}

/// Checks that `K_A` and `K_a` move in opposite directions on every grid
/// interval where both finite-difference slopes exceed `1e-8`.
pub fn complementarity_check(
    times: &[f64],
    k_qubit: &[f64],
    k_partner: &[f64],
    branch: Branch,
) -> Result<ComplementarityVerdict> {
    require_branch(branch)?;
    if times.len() != k_qubit.len() || times.len() != k_partner.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} times, {} qubit, {} partner",
            times.len(),
            k_qubit.len(),
            k_partner.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let mut violations = 0;
    let mut checked = 0;
    for i in 0..times.len().saturating_sub(1) {
        let dt = times[i + 1] - times[i];
        let slope_qubit = (k_qubit[i + 1] - k_qubit[i]) / dt;
        let slope_partner = (k_partner[i + 1] - k_partner[i]) / dt;
        if slope_qubit.abs() > SLOPE_DEAD_ZONE && slope_partner.abs() > SLOPE_DEAD_ZONE {
            checked += 1;
            if slope_qubit.signum() == slope_partner.signum() {
                violations += 1;
            }
        }
    }
    Ok(ComplementarityVerdict { pass: violations == 0, violations, checked })
}
