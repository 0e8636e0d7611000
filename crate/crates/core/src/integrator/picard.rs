use super::{combine, from_stack, stack_healthy, stack_norm, to_stack, DiagonalSystem, PicardConfig, Semilinear, Stack};
use crate::dkg_state::{DiagonalState, Params};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct PicardResult<T: Real> {
    /// Quadrature nodes on `[0, T_p]`, relative to the initial time.
    pub times: Vec<T>,
    /// Last computed iterate at every node.
    pub iterate: Vec<DiagonalState<T>>,
    /// `dⱼ = sup_t ‖u⁽ʲ⁾(t) - u⁽ʲ⁻¹⁾(t)‖_{L²}` for `j = 1, 2, …`, with
    /// `u⁽⁰⁾` the free flow of the data.
    pub differences: Vec<T>,
    /// `d_{j+1} / d_j`.
    pub ratios: Vec<T>,
    /// The same differences restricted to the spinor components `ψ±`.
    pub spinor_differences: Vec<T>,
    pub converged: bool,
}

impl<T: Real> PicardResult<T> {
    pub fn final_state(&self) -> &DiagonalState<T> {
        self.iterate.last().expect("at least two nodes")
    }

    pub fn max_ratio(&self) -> Option<T> {
        self.ratios.iter().copied().reduce(|a, b| a.max(b))
    }
}

/// Fixed-point iteration on the Duhamel form
/// `u(t) = E(t)u₀ + ∫₀ᵗ E(t - s) N(u(s)) ds`, with the integral taken by the
/// composite trapezoid rule on uniform nodes.
///
/// Stops when a difference drops below the tolerance, after
/// `max_iterations`, or when an iterate stops being finite; a diverging
/// sequence is returned as data with `converged = false`.
pub fn picard_solve<T: Real>(d0: &DiagonalState<T>, params: &Params<T>, cfg: &PicardConfig<T>) -> Result<PicardResult<T>> {
    if cfg.nodes < 2 {
        return Err(Error::InvalidArgument("Picard needs at least 2 quadrature nodes".into()));
    }
    if !(cfg.interval > T::zero()) {
        return Err(Error::InvalidArgument("Picard interval must be positive".into()));
    }
    let grid = d0.grid();
    let sys = DiagonalSystem::new(grid, *params)?;
    let nodes = cfg.nodes;
    let h = cfg.interval / T::from_usize_lossy(nodes - 1);
    let half = h * T::lit(0.5);
    let times: Vec<T> = (0..nodes).map(|i| T::from_usize_lossy(i) * h).collect();

    let u0 = to_stack(d0);
    let mut free = Vec::with_capacity(nodes);
    let mut cur = u0.clone();
    free.push(cur.clone());
    for _ in 1..nodes {
        sys.flow(&mut cur, h);
        free.push(cur.clone());
    }

    let mut iterate: Vec<Stack<T>> = free.clone();
    let mut differences = Vec::new();
    let mut spinor_differences = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        let forcing = iterate.iter().map(|u| sys.nonlinear(u)).collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(nodes);
        next.push(u0.clone());
        // acc = Σ_{m ≤ i} E(t_i - t_m) h N_m, first = E(t_i) N_0.
        let mut acc = combine(&zero_like(&u0), &[(h, &forcing[0])]);
        let mut first = forcing[0].clone();
        for i in 1..nodes {
            sys.flow(&mut acc, h);
            sys.flow(&mut first, h);
            acc = combine(&acc, &[(h, &forcing[i])]);
            next.push(combine(&free[i], &[(T::one(), &acc), (-half, &first), (-half, &forcing[i])]));
        }
        let mut diff = T::zero();
        let mut spinor_diff = T::zero();
        for (a, b) in next.iter().zip(&iterate) {
            let delta = combine(a, &[(-T::one(), b)]);
            diff = diff.max(stack_norm(&delta, grid.length()));
            spinor_diff = spinor_diff.max(stack_norm(&delta[..4], grid.length()));
        }
        let healthy = diff.is_finite() && next.iter().all(stack_healthy);
        if !healthy {
            break;
        }
        differences.push(diff);
        spinor_differences.push(spinor_diff);
        iterate = next;
        if diff <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let ratios = differences.windows(2).map(|w| w[1] / w[0]).collect();
    let iterate = iterate
        .into_iter()
        .zip(&times)
        .map(|(s, t)| from_stack(grid, s, d0.time + *t))
        .collect();
    Ok(PicardResult {
        times,
        iterate,
        differences,
        ratios,
        spinor_differences,
        converged,
    })
}

fn zero_like<T: Real>(s: &Stack<T>) -> Stack<T> {
    s.iter()
        .map(|c| vec![num_complex::Complex::new(T::zero(), T::zero()); c.len()])
        .collect()
}
