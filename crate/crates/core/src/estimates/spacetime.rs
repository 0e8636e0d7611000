//! Doubly periodic space-time grids, their 2-D transform and `X^{s,b}` norms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dirac_algebra::Sign;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n × n_t` grid on `[0, L) × [0, T_box)`.
///
/// Spectral arrays are stored time-major (`index = kt·n + kx`), each axis in
/// FFT slot order. Frequencies are `ξ = kx·2π/L`, `τ = kt·2π/T_box`. The
/// forward transform is `ũ(ξ, τ) = (1/(n n_t)) Σ u(x, t) e^{-i(ξx + τt)}` and
/// `‖u‖²_{L²} = L·T_box·Σ |ũ|²`.
pub struct SpaceTimeGrid<T: Real> {
    n: usize,
    nt: usize,
    length: T,
    t_box: T,
    fft_x: (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>),
    fft_t: (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>),
}

impl<T: Real> fmt::Debug for SpaceTimeGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceTimeGrid")
            .field("n", &self.n)
            .field("nt", &self.nt)
            .field("length", &self.length)
            .field("t_box", &self.t_box)
            .finish()
    }
}

fn signed(n: usize, k: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl<T: Real> SpaceTimeGrid<T> {
    pub fn new(n: usize, nt: usize, length: T, t_box: T) -> Result<Arc<Self>> {
        for (name, v) in [("n", n), ("n_t", nt)] {
            if v < 8 || v % 2 != 0 {
                return Err(Error::InvalidGrid(format!("{name} must be even and >= 8, got {v}")));
            }
        }
        if !(length > T::zero()) || !(t_box > T::zero()) {
            return Err(Error::InvalidGrid("space and time periods must be positive".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(SpaceTimeGrid {
            n,
            nt,
            length,
            t_box,
            fft_x: (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)),
            fft_t: (planner.plan_fft_forward(nt), planner.plan_fft_inverse(nt)),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn t_box(&self) -> T {
        self.t_box
    }

    pub fn len(&self) -> usize {
        self.n * self.nt
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same periods, both point counts doubled.
    pub fn refined(&self) -> Result<Arc<Self>> {
        Self::new(2 * self.n, 2 * self.nt, self.length, self.t_box)
    }

    pub fn index(&self, kx: usize, kt: usize) -> usize {
        kt * self.n + kx
    }

    /// Signed indices `(kx, kt)` held at flat position `i`.
    pub fn signed_indices(&self, i: usize) -> (i64, i64) {
        (signed(self.n, i % self.n), signed(self.nt, i / self.n))
    }

    /// Flat position of signed indices, taken modulo the grid.
    pub fn slot(&self, kx: i64, kt: i64) -> usize {
        let x = kx.rem_euclid(self.n as i64) as usize;
        let t = kt.rem_euclid(self.nt as i64) as usize;
        self.index(x, t)
    }

    pub fn xi(&self, i: usize) -> T {
        let (kx, _) = self.signed_indices(i);
        T::lit(kx as f64) * T::TAU() / self.length
    }

    pub fn tau(&self, i: usize) -> T {
        let (_, kt) = self.signed_indices(i);
        T::lit(kt as f64) * T::TAU() / self.t_box
    }

    fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.nt == other.nt && self.length == other.length && self.t_box == other.t_box
    }

    fn transform(&self, data: &mut [Complex<T>], forward: bool) {
        let (fx, ft) = if forward {
            (&self.fft_x.0, &self.fft_t.0)
        } else {
            (&self.fft_x.1, &self.fft_t.1)
        };
        for row in data.chunks_mut(self.n) {
            fx.process(row);
        }
        let mut col = vec![Complex::new(T::zero(), T::zero()); self.nt];
        for kx in 0..self.n {
            for (kt, c) in col.iter_mut().enumerate() {
                *c = data[kt * self.n + kx];
            }
            ft.process(&mut col);
            for (kt, c) in col.iter().enumerate() {
                data[kt * self.n + kx] = *c;
            }
        }
        if forward {
            let scale = T::one() / T::from_usize_lossy(self.n * self.nt);
            data.iter_mut().for_each(|z| *z = *z * scale);
        }
    }

    /// Physical samples (time-major, `x_j = jL/n`, `t_m = m T_box/n_t`) to
    /// coefficients.
    pub fn forward(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(values.len(), self.len(), "sample count must equal grid size");
        let mut buf = values.to_vec();
        self.transform(&mut buf, true);
        buf
    }

    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(coeffs.len(), self.len(), "coefficient count must equal grid size");
        let mut buf = coeffs.to_vec();
        self.transform(&mut buf, false);
        buf
    }
}

/// Scalar or spinor field on a space-time grid, held in spectral form.
#[derive(Clone, Debug)]
pub struct SpaceTimeField<T: Real> {
    grid: Arc<SpaceTimeGrid<T>>,
    coeffs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> SpaceTimeField<T> {
    pub fn zeros(grid: &Arc<SpaceTimeGrid<T>>, components: usize) -> Self {
        SpaceTimeField {
            grid: Arc::clone(grid),
            coeffs: vec![vec![Complex::new(T::zero(), T::zero()); grid.len()]; components],
        }
    }

    pub fn from_spectral(grid: &Arc<SpaceTimeGrid<T>>, coeffs: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "space-time field needs components of length {}",
                grid.len()
            )));
        }
        Ok(SpaceTimeField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    pub fn from_physical(grid: &Arc<SpaceTimeGrid<T>>, values: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if values.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "space-time field needs components of length {}",
                grid.len()
            )));
        }
        Self::from_spectral(grid, values.iter().map(|v| grid.forward(v)).collect())
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid<T>> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self, c: usize) -> &[Complex<T>] {
        &self.coeffs[c]
    }

    pub fn coeffs_mut(&mut self, c: usize) -> &mut [Complex<T>] {
        &mut self.coeffs[c]
    }

    pub fn physical(&self) -> Vec<Vec<Complex<T>>> {
        self.coeffs.iter().map(|c| self.grid.inverse(c)).collect()
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("{:?}", self.grid),
                right: format!("{:?}", other.grid),
            })
        }
    }

    pub fn l2_norm(&self) -> T {
        xsb_norm(self, XsbParams::new(T::zero(), T::zero(), Sign::Plus))
    }
}

/// Exponents and sign of a weight `⟨ξ⟩^s ⟨τ + sign·|ξ|⟩^b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XsbParams<T> {
    pub s: T,
    pub b: T,
    pub sign: Sign,
}

impl<T: Real> XsbParams<T> {
    pub fn new(s: T, b: T, sign: Sign) -> Self {
        XsbParams { s, b, sign }
    }

    pub fn weight(&self, xi: T, tau: T) -> T {
        let sigma = tau + self.sign.real::<T>() * xi.abs();
        xi.bracket().powf(self.s) * sigma.bracket().powf(self.b)
    }
}

/// `‖⟨ξ⟩^s ⟨τ + sign·|ξ|⟩^b ũ‖` with the grid's Parseval constant, summed over
/// components.
pub fn xsb_norm<T: Real>(u: &SpaceTimeField<T>, p: XsbParams<T>) -> T {
    let g = &u.grid;
    let weights: Vec<T> = (0..g.len()).map(|i| p.weight(g.xi(i), g.tau(i))).collect();
    let sum = u.coeffs.iter().fold(T::zero(), |acc, c| {
        c.iter()
            .zip(&weights)
            .fold(acc, |a, (z, w)| a + (*w * *w) * z.norm_sqr())
    });
    (g.length * g.t_box * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    type C = Complex<f64>;

    #[test]
    fn round_trip() {
        let g = SpaceTimeGrid::<f64>::new(16, 32, 3.0, 5.0).unwrap();
        let mut rng = SplitMix64::seed_from_u64(1);
        let v: Vec<C> = (0..g.len()).map(|_| C::new(rng.random(), rng.random())).collect();
        let back = g.inverse(&g.forward(&v));
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn plane_wave_lands_in_its_slot() {
        let g = SpaceTimeGrid::<f64>::new(8, 8, std::f64::consts::TAU, std::f64::consts::TAU).unwrap();
        let mut vals = Vec::new();
        for m in 0..8 {
            for j in 0..8 {
                let (x, t) = (j as f64 * std::f64::consts::TAU / 8.0, m as f64 * std::f64::consts::TAU / 8.0);
                let ph = 1.0 * x - 1.0 * t;
                vals.push(C::new(ph.cos(), ph.sin()));
            }
        }
        let f = SpaceTimeField::from_physical(&g, vec![vals]).unwrap();
        let s = g.slot(1, -1);
        assert!((f.coeffs(0)[s] - C::new(1.0, 0.0)).norm() < 1e-14);
        assert!((g.xi(s) - 1.0).abs() < 1e-15 && (g.tau(s) + 1.0).abs() < 1e-15);
        // On the characteristic τ = -|ξ| the X_+ weight is ⟨0⟩^b = 1.
        let mass = f.l2_norm();
        let w = xsb_norm(&f, XsbParams::new(0.0, 1.0, Sign::Plus));
        assert!((w - mass).abs() < 1e-13);
        assert!((mass - std::f64::consts::TAU).abs() < 1e-12);
    }
}
