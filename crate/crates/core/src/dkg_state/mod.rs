//! Physical and diagonalized state containers, conversions between them, and
//! the charge functional.
//!
//! The half-wave split always uses unit mass inside `A = -∂²/∂x² + 1`, so
//! `A^{s/2}` is exactly the `⟨ξ⟩^s` multiplier. A Klein–Gordon mass `m ≠ 1` is
//! carried by the linear source `c₀φ`, `c₀ = 1 - m²`.

mod random;
mod snapshot;

pub use random::{random_sobolev_field, spectral_cutoff, DataSpec, ROUGH_OFFSET};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dirac_algebra::{DiracMatrices, Sign};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_grid::{Field, Multiplier};

/// Physical constants of the system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    /// Dirac mass `M`.
    pub dirac_mass: T,
    /// Klein–Gordon mass `m > 0`.
    pub kg_mass: T,
    /// Yukawa coupling `g`.
    pub coupling: T,
}

impl<T: Real> Params<T> {
    pub fn new(dirac_mass: T, kg_mass: T, coupling: T) -> Result<Self> {
        let p = Params {
            dirac_mass,
            kg_mass,
            coupling,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kg_mass > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "Klein-Gordon mass must be positive, got {}",
                self.kg_mass
            )));
        }
        if !self.dirac_mass.is_finite() || !self.coupling.is_finite() {
            return Err(Error::InvalidArgument("non-finite parameter".into()));
        }
        Ok(())
    }

    /// `c₀ = 1 - m²`.
    pub fn c0(&self) -> T {
        T::one() - self.kg_mass * self.kg_mass
    }

    /// The uncoupled, massless Dirac / unit-mass Klein–Gordon system.
    pub fn free() -> Self {
        Params {
            dirac_mass: T::zero(),
            kg_mass: T::one(),
            coupling: T::zero(),
        }
    }
}

/// `(ψ, φ, φ_t)` at time `t`.
#[derive(Clone, Debug)]
pub struct PhysicalState<T: Real> {
    pub psi: Field<T>,
    pub phi: Field<T>,
    pub phi_t: Field<T>,
    pub time: T,
}

/// `(ψ₊, ψ₋, φ₊, φ₋)` at time `t`.
#[derive(Clone, Debug)]
pub struct DiagonalState<T: Real> {
    pub psi_plus: Field<T>,
    pub psi_minus: Field<T>,
    pub phi_plus: Field<T>,
    pub phi_minus: Field<T>,
    pub time: T,
}

impl<T: Real> PhysicalState<T> {
    pub fn new(psi: Field<T>, phi: Field<T>, phi_t: Field<T>, time: T) -> Result<Self> {
        let s = PhysicalState {
            psi,
            phi,
            phi_t,
            time,
        };
        s.check_shape()?;
        Ok(s)
    }

    fn check_shape(&self) -> Result<()> {
        expect_components(&self.psi, 2)?;
        expect_components(&self.phi, 1)?;
        expect_components(&self.phi_t, 1)?;
        self.psi.grid().check_same(self.phi.grid())?;
        self.psi.grid().check_same(self.phi_t.grid())?;
        Ok(())
    }

    /// Rough data `ψ₀ ∈ H^{-l}`, `φ₀ ∈ H^k`, `φ₁ ∈ H^{k-1}` drawn from the
    /// seeded coefficient law of [`random_sobolev_field`], each scaled to the
    /// requested norm in its own space.
    pub fn random(grid: &std::sync::Arc<crate::SpectralGrid<T>>, spec: &DataSpec<T>) -> Self {
        spec.build(grid)
    }

    /// `L²` distance summed over `ψ`, `φ` and `φ_t`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        let a = self.psi.distance(&other.psi)?;
        let b = self.phi.distance(&other.phi)?;
        let c = self.phi_t.distance(&other.phi_t)?;
        Ok((a * a + b * b + c * c).sqrt())
    }

    pub fn charge(&self) -> T {
        charge(&self.psi)
    }
}

impl<T: Real> DiagonalState<T> {
    pub fn check_shape(&self) -> Result<()> {
        expect_components(&self.psi_plus, 2)?;
        expect_components(&self.psi_minus, 2)?;
        expect_components(&self.phi_plus, 1)?;
        expect_components(&self.phi_minus, 1)?;
        let g = self.psi_plus.grid();
        g.check_same(self.psi_minus.grid())?;
        g.check_same(self.phi_plus.grid())?;
        g.check_same(self.phi_minus.grid())?;
        Ok(())
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::SpectralGrid<T>> {
        self.psi_plus.grid()
    }

    /// `ψ = ψ₊ + ψ₋`.
    pub fn psi(&self) -> Field<T> {
        self.psi_plus
            .add(&self.psi_minus)
            .expect("diagonal state components share a grid")
    }

    /// Largest relative defect `‖π±ψ± - ψ±‖ / ‖ψ±‖` over both signs; absolute
    /// when a component vanishes.
    pub fn projection_residue(&self) -> T {
        let dirac = DiracMatrices::standard();
        [(Sign::Plus, &self.psi_plus), (Sign::Minus, &self.psi_minus)]
            .into_iter()
            .map(|(sign, psi)| {
                let projected = dirac.project(psi, sign).expect("spinor component");
                let defect = projected.distance(psi).expect("same grid");
                let norm = psi.l2_norm();
                if norm > T::zero() {
                    defect / norm
                } else {
                    defect
                }
            })
            .fold(T::zero(), |m, r| m.max(r))
    }

    /// `‖φ₋ - conj φ₊‖_{L²} / max(1, ‖φ₊‖_{L²})`; zero for states that come
    /// from real physical data.
    pub fn reality_residue(&self) -> T {
        let grid = self.phi_plus.grid();
        let n = grid.n();
        let (p, m) = (self.phi_plus.coeffs(0), self.phi_minus.coeffs(0));
        let sum = (0..n).fold(T::zero(), |acc, k| {
            acc + (m[k] - p[grid.partner(k)].conj()).norm_sqr()
        });
        (grid.length() * sum).sqrt() / T::one().max(self.phi_plus.l2_norm())
    }

    pub fn is_finite(&self) -> bool {
        self.psi_plus.is_finite()
            && self.psi_minus.is_finite()
            && self.phi_plus.is_finite()
            && self.phi_minus.is_finite()
    }

    /// `L²` distance summed over all four components.
    pub fn distance(&self, other: &Self) -> Result<T> {
        let parts = [
            self.psi_plus.distance(&other.psi_plus)?,
            self.psi_minus.distance(&other.psi_minus)?,
            self.phi_plus.distance(&other.phi_plus)?,
            self.phi_minus.distance(&other.phi_minus)?,
        ];
        Ok(parts.iter().fold(T::zero(), |a, x| a + *x * *x).sqrt())
    }
}

fn expect_components<T: Real>(f: &Field<T>, n: usize) -> Result<()> {
    if f.components() == n {
        Ok(())
    } else {
        Err(Error::ComponentMismatch {
            expected: n,
            found: f.components(),
        })
    }
}

/// Half-wave split: `ψ± = π±(D)ψ`, `φ± = φ ± i A^{-1/2} φ_t`.
pub fn to_diagonal<T: Real>(p: &PhysicalState<T>) -> Result<DiagonalState<T>> {
    p.check_shape()?;
    let dirac = DiracMatrices::standard();
    let grid = p.psi.grid();
    let inv_sqrt_a = Multiplier::bracket_power(grid, -T::one());
    let correction = p
        .phi_t
        .apply_multiplier(&inv_sqrt_a)?
        .scale(Complex::new(T::zero(), T::one()));
    Ok(DiagonalState {
        psi_plus: dirac.project(&p.psi, Sign::Plus)?,
        psi_minus: dirac.project(&p.psi, Sign::Minus)?,
        phi_plus: p.phi.add(&correction)?,
        phi_minus: p.phi.sub(&correction)?,
        time: p.time,
    })
}

/// Inverse split: `ψ = ψ₊ + ψ₋`, `φ = ½(φ₊ + φ₋)`, `φ_t = (1/2i) A^{1/2}(φ₊ - φ₋)`.
///
/// `φ` and `φ_t` are symmetrized to real fields; the returned scalar is the
/// largest reality residue removed by that step (above `1e-10` signals a state
/// that did not come from real data).
pub fn to_physical<T: Real>(d: &DiagonalState<T>) -> Result<(PhysicalState<T>, T)> {
    d.check_shape()?;
    let grid = d.grid();
    let half = T::lit(0.5);
    let mut phi = d.phi_plus.add(&d.phi_minus)?.scale_real(half);
    let sqrt_a = Multiplier::bracket_power(grid, T::one());
    let mut phi_t = d
        .phi_plus
        .sub(&d.phi_minus)?
        .apply_multiplier(&sqrt_a)?
        .scale(Complex::new(T::zero(), -half));
    let r1 = phi.enforce_reality();
    let r2 = phi_t.enforce_reality();
    let state = PhysicalState {
        psi: d.psi(),
        phi,
        phi_t,
        time: d.time,
    };
    Ok((state, r1.max(r2)))
}

/// Discrete `∫|ψ|² dx = L Σ_ξ (|ψ̂₁(ξ)|² + |ψ̂₂(ξ)|²)`.
pub fn charge<T: Real>(psi: &Field<T>) -> T {
    let n = psi.l2_norm();
    n * n
}
