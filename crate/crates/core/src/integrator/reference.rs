//! Solver for the undiagonalized system
//!
//! ```text
//! ψ_t = -αψ_x - iMβψ + igφβψ
//! φ_tt - φ_xx + m²φ = ⟨βψ, ψ⟩
//! ```
//!
//! The Dirac equation is the one obtained by multiplying the original form
//! `-iβψ_t + iαβψ_x + Mψ = gφψ` by `β`. Its linear part, mass included, is
//! solved exactly per mode; the Klein–Gordon part is advanced in first-order
//! form `(φ, φ_t)` with the exact trigonometric rotation at frequency
//! `√(ξ² + m²)` as integrating factor. Both use classical RK4 in the
//! integrating-factor variables. No half-wave split and no `c₀` source are
//! involved, so agreement with the diagonal solver is a genuine check.

use std::sync::Arc;

use num_complex::Complex;

use super::{lawson_rk4, stack_healthy, step_count, Semilinear, Stack};
use crate::dirac_algebra::{DiracMatrices, Matrix2};
use crate::dkg_state::{Params, PhysicalState};
use crate::error::{Error, Result};
use crate::nonlinearity::{scalar_times_spinor, self_nullform};
use crate::scalar::Real;
use crate::spectral_grid::{Field, SpectralGrid};

use super::linear::dirac_propagator;

struct PhysicalSystem<T: Real> {
    grid: Arc<SpectralGrid<T>>,
    params: Params<T>,
    dirac: DiracMatrices<T>,
    kg_freq: Vec<T>,
}

impl<T: Real> PhysicalSystem<T> {
    fn unpack(&self, u: &Stack<T>) -> (Field<T>, Field<T>) {
        let psi = Field::from_spectral(&self.grid, vec![u[0].clone(), u[1].clone()]).expect("stack matches grid");
        let phi = Field::from_spectral(&self.grid, vec![u[2].clone()]).expect("stack matches grid");
        (psi, phi)
    }
}

impl<T: Real> Semilinear<T> for PhysicalSystem<T> {
    fn flow(&self, u: &mut Stack<T>, h: T) {
        if h == T::zero() {
            return;
        }
        let mass = Complex::new(self.params.dirac_mass, T::zero());
        for k in 0..self.grid.n() {
            let m: Matrix2<T> = dirac_propagator(&self.dirac, self.grid.wavenumber(k), mass, h);
            let [a, b] = m.apply([u[0][k], u[1][k]]);
            u[0][k] = a;
            u[1][k] = b;
            let w = self.kg_freq[k];
            let (s, c) = (w * h).sin_cos();
            let (p, q) = (u[2][k], u[3][k]);
            u[2][k] = p * c + q * (s / w);
            u[3][k] = p * (-w * s) + q * c;
        }
    }

    fn nonlinear(&self, u: &Stack<T>) -> Result<Stack<T>> {
        let (psi, phi) = self.unpack(u);
        let d = &self.dirac;
        let ig = Complex::new(T::zero(), self.params.coupling);
        let coupling = d
            .apply_constant(&scalar_times_spinor(&phi, &psi)?, &d.beta)?
            .scale(ig)
            .into_coeffs();
        let source = self_nullform(d, &psi)?.into_coeffs();
        let zero = vec![Complex::new(T::zero(), T::zero()); self.grid.n()];
        let mut out = coupling;
        out.push(zero);
        out.extend(source);
        Ok(out)
    }
}

/// States of a reference run at the save times.
#[derive(Clone, Debug)]
pub struct ReferenceRun<T: Real> {
    pub states: Vec<PhysicalState<T>>,
}

impl<T: Real> ReferenceRun<T> {
    pub fn final_state(&self) -> &PhysicalState<T> {
        self.states.last().expect("initial state is always stored")
    }
}

/// Integrates `(ψ, φ, φ_t)` from `p0` over `[0, final_time]` with step `dt`,
/// storing the state every `save_every` steps and at the end.
pub fn reference_solve<T: Real>(
    p0: &PhysicalState<T>,
    params: &Params<T>,
    dt: T,
    final_time: T,
    save_every: usize,
) -> Result<ReferenceRun<T>> {
    params.validate()?;
    if !(dt > T::zero()) || !(final_time >= dt) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dt <= T, got dt = {dt}, T = {final_time}"
        )));
    }
    let grid = Arc::clone(p0.psi.grid());
    let m2 = params.kg_mass * params.kg_mass;
    let sys = PhysicalSystem {
        kg_freq: grid.wavenumbers().iter().map(|x| (*x * *x + m2).sqrt()).collect(),
        grid: Arc::clone(&grid),
        params: *params,
        dirac: DiracMatrices::standard(),
    };
    let mut u: Stack<T> = vec![
        p0.psi.coeffs(0).to_vec(),
        p0.psi.coeffs(1).to_vec(),
        p0.phi.coeffs(0).to_vec(),
        p0.phi_t.coeffs(0).to_vec(),
    ];
    let pack = |u: &Stack<T>, time: T| -> Result<PhysicalState<T>> {
        let mut phi = Field::from_spectral(&grid, vec![u[2].clone()])?;
        let mut phi_t = Field::from_spectral(&grid, vec![u[3].clone()])?;
        phi.enforce_reality();
        phi_t.enforce_reality();
        PhysicalState::new(
            Field::from_spectral(&grid, vec![u[0].clone(), u[1].clone()])?,
            phi,
            phi_t,
            time,
        )
    };
    let save_every = save_every.max(1);
    let steps = step_count(final_time, dt);
    let end = p0.time + final_time;
    let mut time = p0.time;
    let mut states = vec![p0.clone()];
    for i in 1..=steps {
        let h = if i == steps { end - time } else { dt };
        u = lawson_rk4(&sys, &u, h)?;
        time = time + h;
        if !stack_healthy(&u) {
            return Err(Error::NumericalFailure {
                time: time.to_f64_lossy(),
                what: "reference solver produced a non-finite state".into(),
            });
        }
        if i % save_every == 0 || i == steps {
            states.push(pack(&u, time)?);
        }
    }
    Ok(ReferenceRun { states })
}
