//! Random lower-bound sampling of the two bilinear null-form estimates.
//!
//! For a sign pair `(s₁, s₂)` the left side is `⟨βπ_{s₁}(D)ψ, π_{s₂}(D)ψ'⟩`
//! measured in `Y^{s,b}_±`; the right side is a product of `X^{s,b}_{s₁}` and
//! `X^{s,b}_{s₂}` norms.
//!
//! Test fields are drawn so that their right-hand norms are well defined in
//! the continuum: `ψ̃ = v / w` with `w` the right-hand weight and
//! `v = z·⟨ξ⟩⁻¹⟨τ + s|ξ|⟩⁻¹`, where `z` is a complex Gaussian keyed by
//! `(seed, trial, field, component, kx, kt)`. The band is `|kx| < n/4`,
//! `|kt| < n_t/4`, so the product is alias free, and on the doubled grid every
//! coarse mode keeps its value: the fine field is the coarse field plus a tail.

use std::sync::Arc;

use num_complex::Complex;
use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spacetime::{xsb_norm, SpaceTimeField, SpaceTimeGrid, XsbParams};
use crate::dirac_algebra::{DiracMatrices, Sign, SignPair};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_EPS_PRIME: f64 = 0.01;

pub const PROBE_COLUMNS: [&str; 11] = [
    "l", "k", "eps_prime", "pair", "phi_sign", "grid_n", "grid_nt", "trial", "lhs", "rhs", "ratio",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimate {
    /// `Y^{k-1, -½+2ε'}` on the left, `X^{-l, ½+ε'} × X^{-l, ½+ε'}` on the right.
    Star2,
    /// `Y^{-k, -½-ε'}` on the left, `X^{-l, ½+ε'} × X^{l, ½-2ε'}` on the right.
    Star3,
}

/// `(s, b)` exponents of the three norms in an estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateWeights<T> {
    pub lhs: (T, T),
    pub first: (T, T),
    pub second: (T, T),
}

impl Estimate {
    pub fn name(self) -> &'static str {
        match self {
            Estimate::Star2 => "star2",
            Estimate::Star3 => "star3",
        }
    }

    pub fn weights<T: Real>(self, l: T, k: T, eps: T) -> EstimateWeights<T> {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        match self {
            Estimate::Star2 => EstimateWeights {
                lhs: (k - T::one(), -half + two * eps),
                first: (-l, half + eps),
                second: (-l, half + eps),
            },
            Estimate::Star3 => EstimateWeights {
                lhs: (-k, -half - eps),
                first: (-l, half + eps),
                second: (l, half - two * eps),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig<T> {
    pub l: T,
    pub k: T,
    pub eps_prime: T,
    pub trials: usize,
    pub seed: u64,
}

impl<T: Real> ProbeConfig<T> {
    pub fn new(l: T, k: T, trials: usize, seed: u64) -> Self {
        ProbeConfig {
            l,
            k,
            eps_prime: T::lit(DEFAULT_EPS_PRIME),
            trials,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("probe needs at least one trial".into()));
        }
        if !(self.eps_prime > T::zero() && self.eps_prime <= T::lit(0.1)) {
            return Err(Error::InvalidArgument(format!(
                "eps_prime must lie in (0, 0.1], got {}",
                self.eps_prime
            )));
        }
        if !self.l.is_finite() || !self.k.is_finite() {
            return Err(Error::InvalidArgument("probe exponents must be finite".into()));
        }
        Ok(())
    }
}

/// One evaluated trial; `ratio` is zero when the right side vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSample<T> {
    pub trial: usize,
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

#[derive(Clone, Debug)]
pub struct ProbeStats<T> {
    pub grid_n: usize,
    pub grid_nt: usize,
    pub samples: Vec<ProbeSample<T>>,
    pub max: T,
    pub mean: T,
    /// Trials skipped because the right side was zero.
    pub degenerate: usize,
}

impl<T: Real> ProbeStats<T> {
    fn from_samples(grid_n: usize, grid_nt: usize, samples: Vec<ProbeSample<T>>) -> Self {
        let live: Vec<T> = samples.iter().filter(|s| s.rhs > T::zero()).map(|s| s.ratio).collect();
        let degenerate = samples.len() - live.len();
        let max = live.iter().copied().fold(T::zero(), T::max);
        let mean = if live.is_empty() {
            T::zero()
        } else {
            live.iter().copied().fold(T::zero(), |a, b| a + b) / T::from_usize_lossy(live.len())
        };
        ProbeStats {
            grid_n,
            grid_nt,
            samples,
            max,
            mean,
            degenerate,
        }
    }
}

/// Statistics on a grid and on its doubling, for one pair and left-norm sign.
#[derive(Clone, Debug)]
pub struct ProbeReport<T> {
    pub estimate: Estimate,
    pub pair: SignPair,
    pub phi_sign: Sign,
    pub config: ProbeConfig<T>,
    pub coarse: ProbeStats<T>,
    pub fine: ProbeStats<T>,
    /// `max_fine / max_coarse`.
    pub growth: T,
}

impl<T: Real> ProbeReport<T> {
    /// CSV rows in `PROBE_COLUMNS` order, coarse grid first.
    pub fn csv_rows(&self) -> Vec<String> {
        let f = |x: T| format!("{:.16e}", x.to_f64_lossy());
        let c = &self.config;
        let mut rows = Vec::new();
        for stats in [&self.coarse, &self.fine] {
            for s in &stats.samples {
                rows.push(format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    f(c.l),
                    f(c.k),
                    f(c.eps_prime),
                    pair_label(self.pair),
                    self.phi_sign,
                    stats.grid_n,
                    stats.grid_nt,
                    s.trial,
                    f(s.lhs),
                    f(s.rhs),
                    f(s.ratio)
                ));
            }
        }
        rows
    }
}

/// `"+-"` style label, free of the comma used by the `Display` form.
pub fn pair_label(pair: SignPair) -> String {
    format!("{}{}", pair.first, pair.second)
}

fn check_spinor<T: Real>(f: &SpaceTimeField<T>) -> Result<()> {
    if f.components() != 2 {
        return Err(Error::ComponentMismatch {
            expected: 2,
            found: f.components(),
        });
    }
    Ok(())
}

fn project<T: Real>(dirac: &DiracMatrices<T>, f: &SpaceTimeField<T>, sign: Sign) -> SpaceTimeField<T> {
    let g = f.grid();
    let mut out = f.clone();
    let (p, m) = (dirac.projection(sign, Sign::Plus), dirac.projection(sign, Sign::Minus));
    for i in 0..g.len() {
        let proj = if Sign::of(g.xi(i)) == Sign::Plus { &p } else { &m };
        let [a, b] = proj.apply([f.coeffs(0)[i], f.coeffs(1)[i]]);
        out.coeffs_mut(0)[i] = a;
        out.coeffs_mut(1)[i] = b;
    }
    out
}

/// Space-time null form `⟨βπ_{s₁}(D)ψ, π_{s₂}(D)ψ'⟩`, second slot conjugated,
/// computed by pointwise multiplication without truncation.
pub fn spacetime_nullform<T: Real>(
    psi: &SpaceTimeField<T>,
    psi_prime: &SpaceTimeField<T>,
    pair: SignPair,
) -> Result<SpaceTimeField<T>> {
    check_spinor(psi)?;
    check_spinor(psi_prime)?;
    psi.check_same_grid(psi_prime)?;
    let dirac = DiracMatrices::standard();
    let a = project(&dirac, psi, pair.first).physical();
    let b = project(&dirac, psi_prime, pair.second).physical();
    let beta = dirac.beta;
    let g = psi.grid();
    let prod: Vec<Complex<T>> = (0..g.len())
        .map(|i| {
            let [x, y] = beta.apply([a[0][i], a[1][i]]);
            x * b[0][i].conj() + y * b[1][i].conj()
        })
        .collect();
    SpaceTimeField::from_physical(g, vec![prod])
}

/// LHS, RHS and ratio for given fields; returns the left side for both
/// left-norm signs `[+, -]`.
pub fn probe_ratio<T: Real>(
    estimate: Estimate,
    l: T,
    k: T,
    eps_prime: T,
    pair: SignPair,
    psi: &SpaceTimeField<T>,
    psi_prime: &SpaceTimeField<T>,
) -> Result<[ProbeSample<T>; 2]> {
    let w = estimate.weights(l, k, eps_prime);
    let form = spacetime_nullform(psi, psi_prime, pair)?;
    let rhs = xsb_norm(psi, XsbParams::new(w.first.0, w.first.1, pair.first))
        * xsb_norm(psi_prime, XsbParams::new(w.second.0, w.second.1, pair.second));
    let sample = |sign: Sign| {
        let lhs = xsb_norm(&form, XsbParams::new(w.lhs.0, w.lhs.1, sign));
        let ratio = if rhs > T::zero() { lhs / rhs } else { T::zero() };
        ProbeSample {
            trial: 0,
            lhs,
            rhs,
            ratio,
        }
    };
    Ok([sample(Sign::Plus), sample(Sign::Minus)])
}

fn mix(key: u64, part: u64) -> u64 {
    SplitMix64::seed_from_u64(key ^ part.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
}

fn band<T: Real>(g: &SpaceTimeGrid<T>, i: usize) -> bool {
    let (kx, kt) = g.signed_indices(i);
    4 * kx.unsigned_abs() < g.n() as u64 && 4 * kt.unsigned_abs() < g.nt() as u64
}

/// Random spinor field of the probe ensemble. `field` distinguishes the two
/// arguments; `(s, b, sign)` is the right-hand norm it will be measured in.
pub fn ensemble_field<T: Real>(
    grid: &Arc<SpaceTimeGrid<T>>,
    seed: u64,
    trial: usize,
    field: u64,
    rhs_norm: XsbParams<T>,
) -> SpaceTimeField<T> {
    let mut out = SpaceTimeField::zeros(grid, 2);
    let base = mix(mix(seed, trial as u64), field);
    let inv = T::one() / T::lit(std::f64::consts::SQRT_2);
    for i in 0..grid.len() {
        if !band(grid, i) {
            continue;
        }
        let (kx, kt) = grid.signed_indices(i);
        let (xi, tau) = (grid.xi(i), grid.tau(i));
        let decay = XsbParams::new(-T::one(), -T::one(), rhs_norm.sign).weight(xi, tau);
        let scale = decay / rhs_norm.weight(xi, tau) * inv;
        for comp in 0..2u64 {
            let key = mix(mix(mix(base, comp), kx as u64), kt as u64);
            let mut rng = SplitMix64::seed_from_u64(key);
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            out.coeffs_mut(comp as usize)[i] = Complex::new(T::lit(re), T::lit(im)) * scale;
        }
    }
    out
}

/// Evaluates all trials on one grid, returning statistics for the `+` and `-`
/// left norms.
pub fn probe_on_grid<T: Real>(
    estimate: Estimate,
    cfg: &ProbeConfig<T>,
    pair: SignPair,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<[ProbeStats<T>; 2]> {
    cfg.validate()?;
    let w = estimate.weights(cfg.l, cfg.k, cfg.eps_prime);
    let per_trial: Vec<[ProbeSample<T>; 2]> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let psi = ensemble_field(grid, cfg.seed, trial, 1, XsbParams::new(w.first.0, w.first.1, pair.first));
            let psi_prime =
                ensemble_field(grid, cfg.seed, trial, 2, XsbParams::new(w.second.0, w.second.1, pair.second));
            let mut s = probe_ratio(estimate, cfg.l, cfg.k, cfg.eps_prime, pair, &psi, &psi_prime)?;
            s.iter_mut().for_each(|x| x.trial = trial);
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let stats = |idx: usize| {
        ProbeStats::from_samples(grid.n(), grid.nt(), per_trial.iter().map(|s| s[idx]).collect())
    };
    Ok([stats(0), stats(1)])
}

/// Both left-norm signs for one pair, on `grid` and on its doubling.
pub fn probe_pair<T: Real>(
    estimate: Estimate,
    cfg: &ProbeConfig<T>,
    pair: SignPair,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<[ProbeReport<T>; 2]> {
    let fine_grid = grid.refined()?;
    let [cp, cm] = probe_on_grid(estimate, cfg, pair, grid)?;
    let [fp, fm] = probe_on_grid(estimate, cfg, pair, &fine_grid)?;
    let report = |phi_sign, coarse: ProbeStats<T>, fine: ProbeStats<T>| {
        let growth = if coarse.max > T::zero() {
            fine.max / coarse.max
        } else {
            T::one()
        };
        ProbeReport {
            estimate,
            pair,
            phi_sign,
            config: *cfg,
            coarse,
            fine,
            growth,
        }
    };
    Ok([report(Sign::Plus, cp, fp), report(Sign::Minus, cm, fm)])
}

/// All four sign pairs and both left-norm signs.
pub fn probe_all<T: Real>(
    estimate: Estimate,
    cfg: &ProbeConfig<T>,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<Vec<ProbeReport<T>>> {
    let mut out = Vec::with_capacity(8);
    for pair in SignPair::ALL {
        out.extend(probe_pair(estimate, cfg, pair, grid)?);
    }
    Ok(out)
}

fn single<T: Real>(
    estimate: Estimate,
    l: T,
    k: T,
    eps_prime: T,
    pair: SignPair,
    phi_sign: Sign,
    trials: usize,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ProbeReport<T>> {
    let cfg = ProbeConfig {
        l,
        k,
        eps_prime,
        trials,
        seed: 0,
    };
    let [plus, minus] = probe_pair(estimate, &cfg, pair, grid)?;
    Ok(if phi_sign == Sign::Plus { plus } else { minus })
}

#[allow(clippy::too_many_arguments)]
pub fn probe_estimate_star2<T: Real>(
    l: T,
    k: T,
    eps_prime: T,
    pair: SignPair,
    phi_sign: Sign,
    trials: usize,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ProbeReport<T>> {
    single(Estimate::Star2, l, k, eps_prime, pair, phi_sign, trials, grid)
}

#[allow(clippy::too_many_arguments)]
pub fn probe_estimate_star3<T: Real>(
    l: T,
    k: T,
    eps_prime: T,
    pair: SignPair,
    phi_sign: Sign,
    trials: usize,
    grid: &Arc<SpaceTimeGrid<T>>,
) -> Result<ProbeReport<T>> {
    single(Estimate::Star3, l, k, eps_prime, pair, phi_sign, trials, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn fine_field_extends_coarse() {
        let g = SpaceTimeGrid::<f64>::new(16, 16, TAU, TAU).unwrap();
        let f = g.refined().unwrap();
        let p = XsbParams::new(-0.2, 0.51, Sign::Plus);
        let a = ensemble_field(&g, 7, 3, 1, p);
        let b = ensemble_field(&f, 7, 3, 1, p);
        for i in 0..g.len() {
            if !band(&g, i) {
                continue;
            }
            let (kx, kt) = g.signed_indices(i);
            for c in 0..2 {
                assert_eq!(a.coeffs(c)[i], b.coeffs(c)[f.slot(kx, kt)]);
            }
        }
    }

    #[test]
    fn nullform_matches_direct_convolution() {
        let g = SpaceTimeGrid::<f64>::new(8, 8, TAU, TAU).unwrap();
        let p = XsbParams::new(0.0, 0.0, Sign::Plus);
        let psi = ensemble_field(&g, 1, 0, 1, p);
        let chi = ensemble_field(&g, 1, 0, 2, p);
        let pair = SignPair::new(Sign::Plus, Sign::Minus);
        let fast = spacetime_nullform(&psi, &chi, pair).unwrap();
        let d = DiracMatrices::<f64>::standard();
        let (a, b) = (project(&d, &psi, pair.first), project(&d, &chi, pair.second));
        let mut slow = vec![Complex::new(0.0, 0.0); g.len()];
        for i in 0..g.len() {
            for j in 0..g.len() {
                let (x1, t1) = g.signed_indices(i);
                let (x2, t2) = g.signed_indices(j);
                let [u, v] = d.beta.apply([a.coeffs(0)[i], a.coeffs(1)[i]]);
                let out = g.slot(x1 - x2, t1 - t2);
                slow[out] += u * b.coeffs(0)[j].conj() + v * b.coeffs(1)[j].conj();
            }
        }
        let err = slow.iter().zip(fast.coeffs(0)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }
}
