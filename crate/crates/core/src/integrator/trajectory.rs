use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dkg_state::{charge, to_physical, DiagonalState};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const TRAJECTORY_COLUMNS: [&str; 7] = [
    "time",
    "charge",
    "hneg_l_psi",
    "hk_phi",
    "hkm1_phit",
    "reality_residue",
    "projection_residue",
];

/// Regularity exponents used for the recorded norms: `‖ψ‖_{H^{-l}}`,
/// `‖φ‖_{H^k}`, `‖φ_t‖_{H^{k-1}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec<T> {
    pub l: T,
    pub k: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    pub time: T,
    pub charge: T,
    pub hneg_l_psi: T,
    pub hk_phi: T,
    pub hkm1_phit: T,
    pub reality_residue: T,
    pub projection_residue: T,
}

impl<T: Real> Diagnostics<T> {
    pub fn of(state: &DiagonalState<T>, norms: NormSpec<T>) -> Result<Self> {
        let (p, _) = to_physical(state)?;
        Ok(Diagnostics {
            time: state.time,
            charge: charge(&p.psi),
            hneg_l_psi: p.psi.sobolev_norm(-norms.l),
            hk_phi: p.phi.sobolev_norm(norms.k),
            hkm1_phit: p.phi_t.sobolev_norm(norms.k - T::one()),
            reality_residue: state.reality_residue(),
            projection_residue: state.projection_residue(),
        })
    }

    pub fn values(&self) -> [T; 7] {
        [
            self.time,
            self.charge,
            self.hneg_l_psi,
            self.hk_phi,
            self.hkm1_phit,
            self.reality_residue,
            self.projection_residue,
        ]
    }
}

/// Snapshots at save times with their diagnostics.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    norms: NormSpec<T>,
    keep_states: bool,
    diagnostics: Vec<Diagnostics<T>>,
    states: Vec<DiagonalState<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(norms: NormSpec<T>, keep_states: bool) -> Self {
        Trajectory {
            norms,
            keep_states,
            diagnostics: Vec::new(),
            states: Vec::new(),
        }
    }

    /// Appends a snapshot; times must increase strictly.
    pub fn record(&mut self, state: &DiagonalState<T>) -> Result<()> {
        if let Some(last) = self.diagnostics.last() {
            if !(state.time > last.time) {
                return Err(Error::InvalidArgument(format!(
                    "snapshot time {} does not follow {}",
                    state.time, last.time
                )));
            }
        }
        self.diagnostics.push(Diagnostics::of(state, self.norms)?);
        if self.keep_states {
            self.states.push(state.clone());
        }
        Ok(())
    }

    pub fn norms(&self) -> NormSpec<T> {
        self.norms
    }

    pub fn diagnostics(&self) -> &[Diagnostics<T>] {
        &self.diagnostics
    }

    /// Stored snapshots; empty unless the trajectory keeps states.
    pub fn states(&self) -> &[DiagonalState<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.diagnostics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }

    /// Largest `|Q(t) - Q(0)| / Q(0)`; absolute when `Q(0) = 0`.
    pub fn max_charge_drift(&self) -> T {
        let Some(first) = self.diagnostics.first() else {
            return T::zero();
        };
        let q0 = first.charge;
        self.diagnostics
            .iter()
            .map(|d| {
                let diff = (d.charge - q0).abs();
                if q0 > T::zero() {
                    diff / q0
                } else {
                    diff
                }
            })
            .fold(T::zero(), |m, x| m.max(x))
    }

    pub fn max_projection_residue(&self) -> T {
        self.diagnostics
            .iter()
            .fold(T::zero(), |m, d| m.max(d.projection_residue))
    }

    pub fn max_reality_residue(&self) -> T {
        self.diagnostics
            .iter()
            .fold(T::zero(), |m, d| m.max(d.reality_residue))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", TRAJECTORY_COLUMNS.join(","))?;
        for d in &self.diagnostics {
            let row: Vec<String> = d.values().iter().map(|v| format!("{:.16e}", v.to_f64_lossy())).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
