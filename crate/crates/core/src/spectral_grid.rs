//! Periodic spatial grid, discrete Fourier transform, Fourier multipliers and
//! Sobolev norms.
//!
//! Conventions, fixed for the whole crate:
//!
//! * points `x_j = j L / n`, `j = 0..n`;
//! * frequencies `ξ = k (2π / L)` with signed index `k ∈ {-n/2, …, n/2 - 1}`;
//! * spectral arrays are stored in FFT order: slot `k < n/2` holds `k`, slot
//!   `k >= n/2` holds `k - n` (so slot `n/2` is the Nyquist mode `-n/2`);
//! * forward transform `f̂(ξ) = (1/n) Σ_j f(x_j) e^{-iξx_j}`, inverse
//!   `f(x_j) = Σ_ξ f̂(ξ) e^{iξx_j}`;
//! * discrete `L²` norm `‖f‖² = L Σ_ξ |f̂(ξ)|² = (L/n) Σ_j |f(x_j)|²`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub struct SpectralGrid<T: Real> {
    n: usize,
    length: T,
    wavenumbers: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Real> SpectralGrid<T> {
    /// Builds a grid with `n` points on a torus of period `length`.
    ///
    /// `n` must be even and at least 8. Powers of two are fastest but not
    /// required.
    pub fn new(n: usize, length: T) -> Result<Arc<Self>> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and >= 8, got {n}"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let unit = T::TAU() / length;
        let wavenumbers = (0..n)
            .map(|k| T::lit(signed_index(n, k) as f64) * unit)
            .collect();
        Ok(Arc::new(SpectralGrid {
            n,
            length,
            wavenumbers,
            forward,
            inverse,
        }))
    }

    /// Grid of period `2π`, where every frequency is an integer.
    pub fn periodic(n: usize) -> Result<Arc<Self>> {
        Self::new(n, T::TAU())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn spacing(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    /// Signed frequency index held in FFT slot `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        signed_index(self.n, k)
    }

    /// FFT slot holding signed index `k` (taken modulo `n`).
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Slot of the mirrored frequency `-ξ`; the Nyquist slot maps to itself.
    pub fn partner(&self, k: usize) -> usize {
        (self.n - k) % self.n
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    pub fn wavenumber(&self, k: usize) -> T {
        self.wavenumbers[k]
    }

    /// Frequencies in FFT slot order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Frequencies in increasing order, `-n/2 … n/2 - 1` times `2π/L`.
    pub fn frequency_set(&self) -> Vec<T> {
        let half = (self.n / 2) as i64;
        (-half..half).map(|k| self.wavenumbers[self.slot(k)]).collect()
    }

    pub fn points(&self) -> Vec<T> {
        let h = self.spacing();
        (0..self.n).map(|j| T::from_usize_lossy(j) * h).collect()
    }

    /// Whether slot `k` survives the 2/3-rule truncation (`3|k| < n`).
    pub fn is_retained(&self, k: usize) -> bool {
        3 * self.signed_index(k).unsigned_abs() < self.n as u64
    }

    /// Largest retained `|k|` under the 2/3 rule.
    pub fn retained_band(&self) -> usize {
        (self.n - 1) / 3
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("n={} L={}", self.n, self.length),
                right: format!("n={} L={}", other.n, other.length),
            })
        }
    }

    /// Physical samples to spectral coefficients (average convention).
    pub fn forward(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(values.len(), self.n, "sample count must equal grid size");
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = T::one() / T::from_usize_lossy(self.n);
        buf.iter_mut().for_each(|c| *c = *c * scale);
        buf
    }

    /// Spectral coefficients to physical samples.
    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(coeffs.len(), self.n, "coefficient count must equal grid size");
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    /// Zeroes every slot removed by the 2/3 rule.
    pub fn dealias(&self, coeffs: &mut [Complex<T>]) {
        for (k, c) in coeffs.iter_mut().enumerate() {
            if !self.is_retained(k) {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
    }
}

fn signed_index(n: usize, k: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Spectral symbol `m(ξ)` tabulated on a grid's frequency set.
#[derive(Clone, Debug)]
pub struct Multiplier<T: Real> {
    n: usize,
    length: T,
    symbol: Vec<Complex<T>>,
}

impl<T: Real> Multiplier<T> {
    pub fn from_fn(grid: &SpectralGrid<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        Multiplier {
            n: grid.n,
            length: grid.length,
            symbol: grid.wavenumbers.iter().map(|&xi| f(xi)).collect(),
        }
    }

    pub fn from_real_fn(grid: &SpectralGrid<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |xi| Complex::new(f(xi), T::zero()))
    }

    /// Symbol given as a table in FFT slot order.
    pub fn from_table(grid: &SpectralGrid<T>, table: Vec<Complex<T>>) -> Result<Self> {
        if table.len() != grid.n {
            return Err(Error::InvalidArgument(format!(
                "symbol table has {} entries, grid has {} modes",
                table.len(),
                grid.n
            )));
        }
        Ok(Multiplier {
            n: grid.n,
            length: grid.length,
            symbol: table,
        })
    }

    pub fn identity(grid: &SpectralGrid<T>) -> Self {
        Self::from_real_fn(grid, |_| T::one())
    }

    /// `⟨ξ⟩^s`; with unit Klein–Gordon mass this is `A^{s/2}`.
    pub fn bracket_power(grid: &SpectralGrid<T>, s: T) -> Self {
        Self::from_real_fn(grid, |xi| xi.bracket().powf(s))
    }

    /// `|D|`.
    pub fn abs_derivative(grid: &SpectralGrid<T>) -> Self {
        Self::from_real_fn(grid, |xi| xi.abs())
    }

    /// `∂/∂x`, symbol `iξ`.
    pub fn derivative(grid: &SpectralGrid<T>) -> Self {
        Self::from_fn(grid, |xi| Complex::new(T::zero(), xi))
    }

    pub fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    pub fn len(&self) -> usize {
        self.symbol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbol.is_empty()
    }

    /// Pointwise product of two symbols on the same grid.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_pair(other.n, other.length)?;
        Ok(Multiplier {
            n: self.n,
            length: self.length,
            symbol: self
                .symbol
                .iter()
                .zip(&other.symbol)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `m(-ξ) = conj m(ξ)` on every paired mode. The self-paired Nyquist slot is
    /// not checked: reality enforcement zeroes its imaginary part instead.
    pub fn is_hermitian(&self) -> bool {
        let tol = T::lit(64.0) * T::epsilon();
        (0..self.n).filter(|&k| k != self.n / 2).all(|k| {
            let p = (self.n - k) % self.n;
            let a = self.symbol[k];
            let b = self.symbol[p].conj();
            (a - b).norm() <= tol * (T::one() + a.norm())
        })
    }

    fn check_pair(&self, n: usize, length: T) -> Result<()> {
        if self.n == n && self.length == length {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("n={} L={}", self.n, self.length),
                right: format!("n={} L={}", n, length),
            })
        }
    }
}

/// Scalar (one component) or spinor (two components) field on a grid, held
/// in spectral form.
#[derive(Clone, Debug)]
pub struct Field<T: Real> {
    grid: Arc<SpectralGrid<T>>,
    coeffs: Vec<Vec<Complex<T>>>,
    real: bool,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: &Arc<SpectralGrid<T>>, components: usize) -> Self {
        Field {
            grid: Arc::clone(grid),
            coeffs: vec![vec![Complex::new(T::zero(), T::zero()); grid.n]; components],
            real: false,
        }
    }

    pub fn from_spectral(grid: &Arc<SpectralGrid<T>>, coeffs: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("field needs at least one component".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.len() != grid.n) {
            return Err(Error::InvalidArgument(format!(
                "component has {} coefficients, grid has {} modes",
                bad.len(),
                grid.n
            )));
        }
        Ok(Field {
            grid: Arc::clone(grid),
            coeffs,
            real: false,
        })
    }

    pub fn from_physical(grid: &Arc<SpectralGrid<T>>, values: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|c| c.len() != grid.n) {
            return Err(Error::InvalidArgument(format!(
                "component has {} samples, grid has {} points",
                bad.len(),
                grid.n
            )));
        }
        let coeffs = values.iter().map(|v| grid.forward(v)).collect();
        Self::from_spectral(grid, coeffs)
    }

    /// Samples `f(x)` at the grid points; `f` returns one value per component.
    pub fn from_fn(
        grid: &Arc<SpectralGrid<T>>,
        components: usize,
        f: impl Fn(T) -> Vec<Complex<T>>,
    ) -> Result<Self> {
        let mut values = vec![Vec::with_capacity(grid.n); components];
        for x in grid.points() {
            let v = f(x);
            if v.len() != components {
                return Err(Error::ComponentMismatch {
                    expected: components,
                    found: v.len(),
                });
            }
            for (c, z) in v.into_iter().enumerate() {
                values[c].push(z);
            }
        }
        Self::from_physical(grid, values)
    }

    /// Real scalar field sampled from `f(x)`, flagged real.
    pub fn from_real_fn(grid: &Arc<SpectralGrid<T>>, f: impl Fn(T) -> T) -> Self {
        let values = grid
            .points()
            .into_iter()
            .map(|x| Complex::new(f(x), T::zero()))
            .collect::<Vec<_>>();
        let mut field = Field {
            grid: Arc::clone(grid),
            coeffs: vec![grid.forward(&values)],
            real: false,
        };
        field.enforce_reality();
        field
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self, component: usize) -> &[Complex<T>] {
        &self.coeffs[component]
    }

    /// Mutable spectral coefficients. Editing does not touch the reality flag.
    pub fn coeffs_mut(&mut self, component: usize) -> &mut [Complex<T>] {
        &mut self.coeffs[component]
    }

    pub fn all_coeffs(&self) -> &[Vec<Complex<T>>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Vec<Complex<T>>> {
        self.coeffs
    }

    pub fn physical(&self) -> Vec<Vec<Complex<T>>> {
        self.coeffs.iter().map(|c| self.grid.inverse(c)).collect()
    }

    pub fn physical_component(&self, component: usize) -> Vec<Complex<T>> {
        self.grid.inverse(&self.coeffs[component])
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Sets the reality flag without touching the data.
    pub fn set_real_flag(&mut self, real: bool) {
        self.real = real;
    }

    /// Largest violation of `f̂(-ξ) = conj f̂(ξ)`, including the imaginary part
    /// of the self-paired zero and Nyquist modes.
    pub fn reality_residue(&self) -> T {
        let n = self.grid.n;
        let mut worst = T::zero();
        for comp in &self.coeffs {
            for k in 0..n {
                let p = (n - k) % n;
                worst = worst.max((comp[k] - comp[p].conj()).norm());
            }
        }
        worst
    }

    /// Projects onto real fields by Hermitian symmetrization, sets the flag and
    /// returns the residue measured before symmetrizing.
    pub fn enforce_reality(&mut self) -> T {
        let residue = self.reality_residue();
        let n = self.grid.n;
        let half = T::lit(0.5);
        for comp in &mut self.coeffs {
            let old = comp.clone();
            for k in 0..n {
                let p = (n - k) % n;
                comp[k] = (old[k] + old[p].conj()) * half;
            }
        }
        self.real = true;
        residue
    }

    /// `( L Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|² )^{1/2}`, summed over components.
    pub fn sobolev_norm(&self, s: T) -> T {
        sobolev_norm(self, s)
    }

    pub fn l2_norm(&self) -> T {
        let sum: T = self
            .coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (self.grid.length * sum).sqrt()
    }

    /// `((L/n) Σ_j |f(x_j)|²)^{1/2}` computed from physical samples.
    pub fn physical_l2_norm(&self) -> T {
        let h = self.grid.spacing();
        let sum = self
            .physical()
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (h * sum).sqrt()
    }

    /// Pointwise spectral product `m(ξ) f̂(ξ)`.
    pub fn apply_multiplier(&self, m: &Multiplier<T>) -> Result<Self> {
        m.check_pair(self.grid.n, self.grid.length)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.iter().zip(&m.symbol).map(|(a, b)| a * b).collect())
            .collect();
        let mut out = Field {
            grid: Arc::clone(&self.grid),
            coeffs,
            real: false,
        };
        if self.real && m.is_hermitian() {
            out.enforce_reality();
        }
        Ok(out)
    }

    pub fn dealias(&mut self) {
        for c in &mut self.coeffs {
            self.grid.dealias(c);
        }
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Field {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|z| z * a).collect())
                .collect(),
            real: self.real && a.im == T::zero(),
        }
    }

    pub fn scale_real(&self, a: T) -> Self {
        self.scale(Complex::new(a, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `‖self - other‖_{L²}`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.l2_norm())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.components() != other.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: other.components(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        Ok(Field {
            grid: Arc::clone(&self.grid),
            coeffs,
            real: self.real && other.real,
        })
    }
}

/// `( L Σ_ξ ⟨ξ⟩^{2s} |f̂(ξ)|² )^{1/2}`, summed over all components.
pub fn sobolev_norm<T: Real>(f: &Field<T>, s: T) -> T {
    let grid = &f.grid;
    let two_s = s + s;
    let weights: Vec<T> = grid
        .wavenumbers
        .iter()
        .map(|xi| xi.bracket().powf(two_s))
        .collect();
    let sum = f.coeffs.iter().fold(T::zero(), |acc, comp| {
        comp.iter()
            .zip(&weights)
            .fold(acc, |acc, (z, w)| acc + *w * z.norm_sqr())
    });
    (grid.length * sum).sqrt()
}
