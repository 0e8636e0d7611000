//! Exact solutions of the uncoupled (`g = 0`) system, used as oracles.

use num_complex::Complex;

use crate::dirac_algebra::{DiracMatrices, Matrix2};
use crate::dkg_state::{DiagonalState, Params, PhysicalState};
use crate::error::Result;
use crate::scalar::Real;
use crate::spectral_grid::Field;

fn sinc<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(1e-3) {
        let z2 = z * z;
        let one = Complex::new(T::one(), T::zero());
        one - z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0) - z2 * z2 * z2 / T::lit(5040.0)
    } else {
        z.sin() / z
    }
}

/// `exp(-it(ξα + μβ))` for a possibly complex mass `μ`. Since
/// `(ξα + μβ)² = (ξ² + μ²)I`, this is `cos(tω)I - it·sinc(tω)(ξα + μβ)`
/// with `ω² = ξ² + μ²`; both terms are even in `ω`, so any square root works.
pub(crate) fn dirac_propagator<T: Real>(
    dirac: &DiracMatrices<T>,
    xi: T,
    mass: Complex<T>,
    t: T,
) -> Matrix2<T> {
    let h = dirac.alpha.scale_real(xi) + dirac.beta.scale(mass);
    let omega = (Complex::new(xi * xi, T::zero()) + mass * mass).sqrt();
    let tw = omega * t;
    Matrix2::identity().scale(tw.cos()) + h.scale(Complex::new(T::zero(), -t) * sinc(tw))
}

fn evolve_spinor<T: Real>(dirac: &DiracMatrices<T>, psi: &Field<T>, mass: Complex<T>, t: T) -> Vec<Vec<Complex<T>>> {
    let grid = psi.grid();
    let (a, b) = (psi.coeffs(0), psi.coeffs(1));
    let mut out = vec![Vec::with_capacity(grid.n()), Vec::with_capacity(grid.n())];
    for k in 0..grid.n() {
        let [x, y] = dirac_propagator(dirac, grid.wavenumber(k), mass, t).apply([a[k], b[k]]);
        out[0].push(x);
        out[1].push(y);
    }
    out
}

/// Exact solution at time `p.time + t` of the system with `g = 0`: the massive
/// Dirac equation `ψ_t = -αψ_x - iMβψ` and the Klein–Gordon equation with mass
/// `m`, mode by mode.
pub fn exact_linear_flow<T: Real>(p: &PhysicalState<T>, params: &Params<T>, t: T) -> Result<PhysicalState<T>> {
    let dirac = DiracMatrices::standard();
    let grid = p.psi.grid();
    let psi = Field::from_spectral(
        grid,
        evolve_spinor(&dirac, &p.psi, Complex::new(params.dirac_mass, T::zero()), t),
    )?;
    let m2 = params.kg_mass * params.kg_mass;
    let (f0, f1) = (p.phi.coeffs(0), p.phi_t.coeffs(0));
    let mut phi = Vec::with_capacity(grid.n());
    let mut phi_t = Vec::with_capacity(grid.n());
    for k in 0..grid.n() {
        let xi = grid.wavenumber(k);
        let w = (xi * xi + m2).sqrt();
        let (s, c) = (w * t).sin_cos();
        phi.push(f0[k] * c + f1[k] * (s / w));
        phi_t.push(f0[k] * (-w * s) + f1[k] * c);
    }
    let mut phi = Field::from_spectral(grid, vec![phi])?;
    let mut phi_t = Field::from_spectral(grid, vec![phi_t])?;
    if p.phi.is_real() {
        phi.set_real_flag(true);
    }
    if p.phi_t.is_real() {
        phi_t.set_real_flag(true);
    }
    PhysicalState::new(psi, phi, phi_t, p.time + t)
}

/// Predicted successive-iterate differences of the Picard iteration for the
/// linear problem `g = 0`.
///
/// The `j`-th Picard iterate is the order-`j` truncation of the expansion of
/// `exp(-it(ξα + λMβ))ψ₀` in powers of `λ` at `λ = 1`, so consecutive iterates
/// differ by the `λʲ` coefficient. Those coefficients are extracted with a
/// Cauchy integral on `|λ| = 1` discretized by `contour_points` nodes.
/// Returns `sup_t ‖Dⱼ(t)‖_{L²}` over `times` for `j = 1..=orders`.
pub fn dyson_differences<T: Real>(
    d0: &DiagonalState<T>,
    dirac_mass: T,
    times: &[T],
    orders: usize,
    contour_points: usize,
) -> Vec<T> {
    let dirac = DiracMatrices::standard();
    let psi0 = d0.psi();
    let grid = psi0.grid();
    let n = grid.n();
    let kq = contour_points.max(2 * orders + 2);
    let mut sup = vec![T::zero(); orders];
    let zero = Complex::new(T::zero(), T::zero());
    for &t in times {
        let mut coeff = vec![vec![vec![zero; n]; 2]; orders];
        for q in 0..kq {
            let angle = T::TAU() * T::from_usize_lossy(q) / T::from_usize_lossy(kq);
            let lambda = Complex::new(angle.cos(), angle.sin());
            let sol = evolve_spinor(&dirac, &psi0, lambda * dirac_mass, t);
            for (j, c) in coeff.iter_mut().enumerate() {
                let w = lambda.powi(-(j as i32 + 1)) / T::from_usize_lossy(kq);
                for comp in 0..2 {
                    for k in 0..n {
                        c[comp][k] = c[comp][k] + sol[comp][k] * w;
                    }
                }
            }
        }
        for (j, c) in coeff.iter().enumerate() {
            let sum = c.iter().flat_map(|x| x.iter()).fold(T::zero(), |a, z| a + z.norm_sqr());
            sup[j] = sup[j].max((grid.length() * sum).sqrt());
        }
    }
    sup
}
