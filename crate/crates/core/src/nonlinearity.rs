//! Quadratic terms: the null form `⟨βψ, ψ'⟩`, its sign-projected pieces, and
//! the right-hand sides of the diagonalized system.
//!
//! The `C²` inner product is linear in the first slot and conjugate-linear in
//! the second: `⟨u, v⟩ = u₁ v̄₁ + u₂ v̄₂`. Every product is formed pointwise on
//! the grid and truncated by the 2/3 rule.

use std::sync::Arc;

use num_complex::Complex;

use crate::dirac_algebra::{DiracMatrices, Sign, SignPair};
use crate::dkg_state::{DiagonalState, Params};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_grid::{Field, Multiplier, SpectralGrid};

fn spinor_check<T: Real>(f: &Field<T>) -> Result<()> {
    if f.components() == 2 {
        Ok(())
    } else {
        Err(Error::ComponentMismatch {
            expected: 2,
            found: f.components(),
        })
    }
}

/// Dealiased `⟨βψ, ψ'⟩ = ψ₂ ψ̄'₁ + ψ₁ ψ̄'₂` in the standard representation.
pub fn nullform<T: Real>(psi: &Field<T>, psi_prime: &Field<T>) -> Result<Field<T>> {
    nullform_with(&DiracMatrices::standard(), psi, psi_prime)
}

/// Dealiased `⟨βψ, ψ'⟩` for an arbitrary representation.
pub fn nullform_with<T: Real>(
    dirac: &DiracMatrices<T>,
    psi: &Field<T>,
    psi_prime: &Field<T>,
) -> Result<Field<T>> {
    spinor_check(psi)?;
    spinor_check(psi_prime)?;
    psi.grid().check_same(psi_prime.grid())?;
    let grid = psi.grid();
    let beta_psi = dirac.apply_constant(psi, &dirac.beta)?.physical();
    let other = psi_prime.physical();
    let values: Vec<Complex<T>> = (0..grid.n())
        .map(|j| beta_psi[0][j] * other[0][j].conj() + beta_psi[1][j] * other[1][j].conj())
        .collect();
    let mut coeffs = grid.forward(&values);
    grid.dealias(&mut coeffs);
    Field::from_spectral(grid, vec![coeffs])
}

/// `⟨βψ, ψ⟩`, which is real pointwise; round-off in the imaginary part is
/// removed and the result is flagged real.
pub fn self_nullform<T: Real>(dirac: &DiracMatrices<T>, psi: &Field<T>) -> Result<Field<T>> {
    let mut out = nullform_with(dirac, psi, psi)?;
    out.enforce_reality();
    Ok(out)
}

/// `⟨β π_{s₁}(D)ψ, π_{s₂}(D)ψ'⟩` by projecting first and multiplying on the grid.
pub fn projected_nullform<T: Real>(
    dirac: &DiracMatrices<T>,
    psi: &Field<T>,
    psi_prime: &Field<T>,
    pair: SignPair,
) -> Result<Field<T>> {
    let a = dirac.project(psi, pair.first)?;
    let b = dirac.project(psi_prime, pair.second)?;
    nullform_with(dirac, &a, &b)
}

/// The same quantity through the symbol `γ`: a direct double sum over the
/// frequency `ξ₁` of `ψ` and the mode `η` of `ψ'` (so `ξ₂ = -η`), landing in
/// output slot `ξ₁ - η` modulo the grid and then truncated by the 2/3 rule.
///
/// Costs `O(n²)`; meant for verification, not for time stepping.
pub fn projected_nullform_spectral<T: Real>(
    dirac: &DiracMatrices<T>,
    psi: &Field<T>,
    psi_prime: &Field<T>,
    pair: SignPair,
) -> Result<Field<T>> {
    spinor_check(psi)?;
    spinor_check(psi_prime)?;
    psi.grid().check_same(psi_prime.grid())?;
    let grid = psi.grid();
    let n = grid.n();
    let table = dirac.gamma_table();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; n];
    for k1 in 0..n {
        let a = [psi.coeffs(0)[k1], psi.coeffs(1)[k1]];
        if a[0] == zero && a[1] == zero {
            continue;
        }
        let sgn1 = Sign::of(grid.wavenumber(k1));
        for eta in 0..n {
            let b = [psi_prime.coeffs(0)[eta], psi_prime.coeffs(1)[eta]];
            let sgn2 = -Sign::of(grid.wavenumber(eta));
            let g = table.get(pair, sgn1, sgn2);
            if g.is_zero() {
                continue;
            }
            let ga = g.apply(a);
            let slot = (k1 + n - eta) % n;
            out[slot] = out[slot] + ga[0] * b[0].conj() + ga[1] * b[1].conj();
        }
    }
    grid.dealias(&mut out);
    Field::from_spectral(grid, vec![out])
}

/// Dealiased pointwise product of a scalar field with each spinor component.
pub fn scalar_times_spinor<T: Real>(phi: &Field<T>, psi: &Field<T>) -> Result<Field<T>> {
    spinor_check(psi)?;
    phi.grid().check_same(psi.grid())?;
    let grid = psi.grid();
    let p = phi.physical_component(0);
    let coeffs = psi
        .physical()
        .into_iter()
        .map(|comp| {
            let prod: Vec<_> = comp.iter().zip(&p).map(|(u, v)| u * v).collect();
            let mut c = grid.forward(&prod);
            grid.dealias(&mut c);
            c
        })
        .collect();
    Field::from_spectral(grid, coeffs)
}

/// Forcing terms of the diagonal system
/// `∂ₜψ± = ∓i|D|ψ± + iF±`, `∂ₜφ± = ∓i⟨D⟩φ± - iG±`.
#[derive(Clone, Debug)]
pub struct RhsBundle<T: Real> {
    pub f_plus: Field<T>,
    pub f_minus: Field<T>,
    pub g_plus: Field<T>,
    pub g_minus: Field<T>,
}

/// Evaluates the nonlinear and mass terms of the diagonal system on a fixed
/// grid.
#[derive(Clone, Debug)]
pub struct DkgRhs<T: Real> {
    params: Params<T>,
    dirac: DiracMatrices<T>,
    grid: Arc<SpectralGrid<T>>,
    inv_bracket: Multiplier<T>,
}

impl<T: Real> DkgRhs<T> {
    pub fn new(grid: &Arc<SpectralGrid<T>>, params: Params<T>) -> Result<Self> {
        params.validate()?;
        Ok(DkgRhs {
            params,
            dirac: DiracMatrices::standard(),
            grid: Arc::clone(grid),
            inv_bracket: Multiplier::bracket_power(grid, -T::one()),
        })
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    /// `F± = -Mβψ∓ + g π±(D)[φ βψ]` with `φ = ½(φ₊ + φ₋)`, `ψ = ψ₊ + ψ₋`.
    pub fn dirac_rhs(&self, state: &DiagonalState<T>) -> Result<(Field<T>, Field<T>)> {
        state.check_shape()?;
        self.grid.check_same(state.grid())?;
        let d = &self.dirac;
        let psi = state.psi();
        let phi = self.phi(state)?;
        let coupling = d.apply_constant(&scalar_times_spinor(&phi, &psi)?, &d.beta)?;
        let mass = |p: &Field<T>| d.apply_constant(p, &d.beta.scale_real(-self.params.dirac_mass));
        let g = self.params.coupling;
        let f_plus = mass(&state.psi_minus)?.add(&d.project(&coupling, Sign::Plus)?.scale_real(g))?;
        let f_minus = mass(&state.psi_plus)?.add(&d.project(&coupling, Sign::Minus)?.scale_real(g))?;
        Ok((f_plus, f_minus))
    }

    /// `G± = ∓⟨D⟩⁻¹[⟨βψ, ψ⟩ + c₀φ]` with `φ = ½(φ₊ + φ₋)`, `c₀ = 1 - m²`.
    pub fn kg_rhs(&self, state: &DiagonalState<T>) -> Result<(Field<T>, Field<T>)> {
        state.check_shape()?;
        self.grid.check_same(state.grid())?;
        let psi = state.psi();
        let source = self_nullform(&self.dirac, &psi)?
            .add(&self.phi(state)?.scale_real(self.params.c0()))?
            .apply_multiplier(&self.inv_bracket)?;
        Ok((source.scale_real(-T::one()), source))
    }

    pub fn evaluate(&self, state: &DiagonalState<T>) -> Result<RhsBundle<T>> {
        let (f_plus, f_minus) = self.dirac_rhs(state)?;
        let (g_plus, g_minus) = self.kg_rhs(state)?;
        Ok(RhsBundle {
            f_plus,
            f_minus,
            g_plus,
            g_minus,
        })
    }

    /// Time derivative minus the free flow: `(iF₊, iF₋, -iG₊, -iG₋)`.
    pub fn nonlinear(&self, state: &DiagonalState<T>) -> Result<DiagonalState<T>> {
        let b = self.evaluate(state)?;
        let i = Complex::new(T::zero(), T::one());
        Ok(DiagonalState {
            psi_plus: b.f_plus.scale(i),
            psi_minus: b.f_minus.scale(i),
            phi_plus: b.g_plus.scale(-i),
            phi_minus: b.g_minus.scale(-i),
            time: state.time,
        })
    }

    fn phi(&self, state: &DiagonalState<T>) -> Result<Field<T>> {
        Ok(state.phi_plus.add(&state.phi_minus)?.scale_real(T::lit(0.5)))
    }
}
