use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use super::PhysicalState;
use crate::scalar::Real;
use crate::spectral_grid::{Field, SpectralGrid};

/// Extra decay beyond `⟨ξ⟩^{-s-1/2}` that puts the random field in `H^s`.
pub const ROUGH_OFFSET: f64 = 0.01;

/// Smooth spectral taper: one for `|k| ≤ n/6`, a `cos²` ramp down to zero at
/// `|k| = n/3`, zero above. Its support sits inside the 2/3 dealiasing band.
pub fn spectral_cutoff(k: i64, n: usize) -> f64 {
    let r = 3.0 * k.unsigned_abs() as f64 / n as f64;
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let c = (std::f64::consts::PI * (r - 0.5)).cos();
        c * c
    }
}

/// Random field with coefficients `⟨ξ⟩^{-s-1/2-0.01} σ(k) z_k`, `z_k`
/// standard complex Gaussians drawn from SplitMix64 seeded by `seed`.
///
/// Draws are taken component by component in FFT slot order. With `real`
/// set, the field is Hermitian-symmetrized afterwards. The result depends on
/// `(seed, n, s)` and the period only.
pub fn random_sobolev_field<T: Real>(
    grid: &Arc<SpectralGrid<T>>,
    s: T,
    components: usize,
    seed: u64,
    real: bool,
) -> Field<T> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let n = grid.n();
    let exponent = -(s + T::lit(0.5 + ROUGH_OFFSET));
    let norm = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let coeffs = (0..components)
        .map(|_| {
            (0..n)
                .map(|k| {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    let envelope = grid.wavenumber(k).bracket().powf(exponent)
                        * T::lit(spectral_cutoff(grid.signed_index(k), n));
                    Complex::new(T::lit(a), T::lit(b)) * (envelope * norm)
                })
                .collect()
        })
        .collect();
    let mut field = Field::from_spectral(grid, coeffs).expect("shape matches grid");
    if real {
        field.enforce_reality();
    }
    field
}

/// Recipe for rough initial data `ψ₀ ∈ H^{-l}`, `φ₀ ∈ H^k`, `φ₁ ∈ H^{k-1}`.
#[derive(Clone, Copy, Debug)]
pub struct DataSpec<T> {
    pub l: T,
    pub k: T,
    pub seed: u64,
    /// Norm of `ψ₀` in `H^{-l}`.
    pub psi_size: T,
    /// Norm of `φ₀` in `H^k` and of `φ₁` in `H^{k-1}`.
    pub phi_size: T,
}

impl<T: Real> DataSpec<T> {
    pub(super) fn build(&self, grid: &Arc<SpectralGrid<T>>) -> PhysicalState<T> {
        let seeds = sub_seeds(self.seed);
        let psi = normalized(random_sobolev_field(grid, -self.l, 2, seeds[0], false), -self.l, self.psi_size);
        let phi = normalized(random_sobolev_field(grid, self.k, 1, seeds[1], true), self.k, self.phi_size);
        let phi_t = normalized(
            random_sobolev_field(grid, self.k - T::one(), 1, seeds[2], true),
            self.k - T::one(),
            self.phi_size,
        );
        PhysicalState {
            psi,
            phi,
            phi_t,
            time: T::zero(),
        }
    }
}

fn normalized<T: Real>(f: Field<T>, s: T, size: T) -> Field<T> {
    let norm = f.sobolev_norm(s);
    if norm > T::zero() {
        f.scale_real(size / norm)
    } else {
        f
    }
}

fn sub_seeds(seed: u64) -> [u64; 3] {
    let mut rng = SplitMix64::seed_from_u64(seed);
    [rng.random(), rng.random(), rng.random()]
}
