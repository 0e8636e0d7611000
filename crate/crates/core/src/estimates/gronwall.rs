//! A-priori bound on `E(t) = ‖φ(t)‖_{H^k} + ‖φ_t(t)‖_{H^{k-1}}`.
//!
//! From the cosine/sine representation of the Klein–Gordon solution with
//! source `⟨βψ,ψ⟩ + c₀φ`, `|cos|, |sin| ≤ 1` and the product estimate,
//!
//! ```text
//! E(t) ≤ 2E(0) + 2C_k Q t + 2|c₀| ∫₀ᵗ E,
//! ```
//!
//! and Gronwall gives `E(t) ≤ (2E(0) + 2C_k Q t) e^{2|c₀|t}`. The monitor
//! checks this with a multiplicative slack.

use serde::Serialize;

use super::product::product_constant;
use crate::dkg_state::Params;
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::scalar::Real;
use crate::spectral_grid::SpectralGrid;

pub const GRONWALL_SLACK: f64 = 1.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallPoint<T> {
    pub time: T,
    pub energy: T,
    pub bound: T,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GronwallReport<T> {
    pub k: T,
    pub slack: T,
    pub constant: T,
    pub charge: T,
    pub points: Vec<GronwallPoint<T>>,
    /// Times at which the bound fails.
    pub violations: Vec<T>,
}

impl<T: Real> GronwallReport<T> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest `energy / bound`.
    pub fn max_fraction(&self) -> T {
        self.points
            .iter()
            .filter(|p| p.bound > T::zero())
            .fold(T::zero(), |m, p| m.max(p.energy / p.bound))
    }
}

/// `slack·(2E₀ + 2C_k Q t)·e^{2|c₀|t}` with `t` measured from the start.
pub fn gronwall_bound<T: Real>(e0: T, constant: T, charge: T, c0: T, t: T, slack: T) -> T {
    let two = T::lit(2.0);
    slack * (two * e0 + two * constant * charge * t) * (two * c0.abs() * t).exp()
}

/// Checks every recorded snapshot. The trajectory's norm exponent `k` must be
/// the one requested.
pub fn gronwall_monitor<T: Real>(
    traj: &Trajectory<T>,
    grid: &SpectralGrid<T>,
    k: T,
    params: &Params<T>,
    slack: T,
) -> Result<GronwallReport<T>> {
    if traj.norms().k != k {
        return Err(Error::InvalidArgument(format!(
            "trajectory records H^{} norms, monitor asked for k = {k}",
            traj.norms().k
        )));
    }
    let diags = traj.diagnostics();
    let first = diags
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let e0 = first.hk_phi + first.hkm1_phit;
    let constant = product_constant(grid, k);
    let charge = first.charge;
    let c0 = params.c0();
    let mut points = Vec::with_capacity(diags.len());
    let mut violations = Vec::new();
    for d in diags {
        let energy = d.hk_phi + d.hkm1_phit;
        let bound = gronwall_bound(e0, constant, charge, c0, d.time - first.time, slack);
        let holds = energy <= bound;
        if !holds {
            violations.push(d.time);
        }
        points.push(GronwallPoint {
            time: d.time,
            energy,
            bound,
            holds,
        });
    }
    Ok(GronwallReport {
        k,
        slack,
        constant,
        charge,
        points,
        violations,
    })
}
