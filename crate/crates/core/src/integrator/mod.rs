//! Time stepping of the diagonal system: exact free flow, Lawson-RK4 and
//! Strang one-step schemes, a Picard iteration on the Duhamel form, and a
//! reference solver for the undiagonalized equations.

mod linear;
mod picard;
mod reference;
mod trajectory;

pub use linear::{dyson_differences, exact_linear_flow};
pub use picard::{picard_solve, PicardResult};
pub use reference::{reference_solve, ReferenceRun};
pub use trajectory::{Diagnostics, NormSpec, Trajectory, TRAJECTORY_COLUMNS};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dkg_state::{DiagonalState, Params};
use crate::error::{Error, Result};
use crate::nonlinearity::DkgRhs;
use crate::scalar::Real;
use crate::spectral_grid::{Field, SpectralGrid};

/// States whose largest coefficient exceeds this are treated as blown up.
pub const OVERFLOW_LIMIT: f64 = 1e100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    LawsonRk4,
    Strang,
    Picard,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::LawsonRk4 => "lawson-rk4",
            Scheme::Strang => "strang",
            Scheme::Picard => "picard",
        }
    }

    /// Formal order of accuracy of the one-step schemes.
    pub fn order(self) -> Option<u32> {
        match self {
            Scheme::LawsonRk4 => Some(4),
            Scheme::Strang => Some(2),
            Scheme::Picard => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lawson-rk4" => Ok(Scheme::LawsonRk4),
            "strang" => Ok(Scheme::Strang),
            "picard" => Ok(Scheme::Picard),
            other => Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardConfig<T> {
    /// Length `T_p` of the iteration interval.
    pub interval: T,
    /// Quadrature nodes on `[0, T_p]`, endpoints included.
    pub nodes: usize,
    pub max_iterations: usize,
    /// Stop once the sup-in-time difference of successive iterates drops
    /// below this.
    pub tolerance: T,
}

impl<T: Real> PicardConfig<T> {
    /// Node count at which the fastest phase turns by at most `π/8` between
    /// nodes: `8·T_p·max|ξ|/π`, at least 2.
    pub fn recommended_nodes(interval: T, max_frequency: T) -> usize {
        let r = (T::lit(8.0) * interval * max_frequency / T::PI()).ceil();
        r.to_usize().unwrap_or(2).max(2) + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig<T> {
    pub scheme: Scheme,
    pub dt: T,
    pub final_time: T,
    pub picard: PicardConfig<T>,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(scheme: Scheme, dt: T, final_time: T) -> Result<Self> {
        let cfg = SchemeConfig {
            scheme,
            dt,
            final_time,
            picard: PicardConfig {
                interval: final_time,
                nodes: 33,
                max_iterations: 30,
                tolerance: T::lit(1e-13),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.final_time >= self.dt) {
            return Err(Error::InvalidArgument(format!(
                "final time {} is shorter than dt {}",
                self.final_time, self.dt
            )));
        }
        if self.picard.nodes < 2 {
            return Err(Error::InvalidArgument("Picard needs at least 2 quadrature nodes".into()));
        }
        if !(self.picard.interval > T::zero()) {
            return Err(Error::InvalidArgument("Picard interval must be positive".into()));
        }
        Ok(())
    }
}

/// Stacked spectral arrays: `ψ₊` (2), `ψ₋` (2), `φ₊`, `φ₋`.
pub(crate) type Stack<T> = Vec<Vec<Complex<T>>>;

pub(crate) fn to_stack<T: Real>(d: &DiagonalState<T>) -> Stack<T> {
    let mut s = Vec::with_capacity(6);
    s.extend(d.psi_plus.all_coeffs().iter().cloned());
    s.extend(d.psi_minus.all_coeffs().iter().cloned());
    s.extend(d.phi_plus.all_coeffs().iter().cloned());
    s.extend(d.phi_minus.all_coeffs().iter().cloned());
    s
}

pub(crate) fn from_stack<T: Real>(grid: &Arc<SpectralGrid<T>>, mut s: Stack<T>, time: T) -> DiagonalState<T> {
    let phi_minus = vec![s.pop().expect("six arrays")];
    let phi_plus = vec![s.pop().expect("six arrays")];
    let psi_minus = s.split_off(2);
    let field = |c| Field::from_spectral(grid, c).expect("stack arrays match grid");
    DiagonalState {
        psi_plus: field(s),
        psi_minus: field(psi_minus),
        phi_plus: field(phi_plus),
        phi_minus: field(phi_minus),
        time,
    }
}

/// `a + Σ cᵢ bᵢ`.
pub(crate) fn combine<T: Real>(a: &Stack<T>, terms: &[(T, &Stack<T>)]) -> Stack<T> {
    let mut out = a.clone();
    for (c, b) in terms {
        for (o, x) in out.iter_mut().zip(b.iter()) {
            for (u, v) in o.iter_mut().zip(x) {
                *u = *u + *v * *c;
            }
        }
    }
    out
}

pub(crate) fn stack_norm<T: Real>(s: &[Vec<Complex<T>>], length: T) -> T {
    let sum = s
        .iter()
        .flat_map(|c| c.iter())
        .fold(T::zero(), |acc, z| acc + z.norm_sqr());
    (length * sum).sqrt()
}

pub(crate) fn stack_healthy<T: Real>(s: &Stack<T>) -> bool {
    let limit = T::lit(OVERFLOW_LIMIT);
    s.iter()
        .flat_map(|c| c.iter())
        .all(|z| z.re.is_finite() && z.im.is_finite() && z.norm() < limit)
}

/// A semilinear system `u' = Lu + N(u)` with exactly solvable `L`.
pub(crate) trait Semilinear<T: Real> {
    fn flow(&self, u: &mut Stack<T>, h: T);
    fn nonlinear(&self, u: &Stack<T>) -> Result<Stack<T>>;
}

pub(crate) fn lawson_rk4<T: Real, S: Semilinear<T>>(sys: &S, u: &Stack<T>, h: T) -> Result<Stack<T>> {
    let half = h * T::lit(0.5);
    let flowed = |mut v: Stack<T>, t: T| {
        sys.flow(&mut v, t);
        v
    };
    let k1 = sys.nonlinear(u)?;
    let u_half = flowed(u.clone(), half);
    let k2 = sys.nonlinear(&flowed(combine(u, &[(half, &k1)]), half))?;
    let k3 = sys.nonlinear(&combine(&u_half, &[(half, &k2)]))?;
    let k3_half = flowed(k3, half);
    let u_full = flowed(u.clone(), h);
    let k4 = sys.nonlinear(&combine(&u_full, &[(h, &k3_half)]))?;
    let k1_full = flowed(k1, h);
    let k2_half = flowed(k2, half);
    let sixth = h / T::lit(6.0);
    let third = sixth + sixth;
    Ok(combine(
        &u_full,
        &[(sixth, &k1_full), (third, &k2_half), (third, &k3_half), (sixth, &k4)],
    ))
}

/// Half free flow, explicit midpoint on `u' = N(u)`, half free flow.
pub(crate) fn strang<T: Real, S: Semilinear<T>>(sys: &S, u: &Stack<T>, h: T) -> Result<Stack<T>> {
    let half = h * T::lit(0.5);
    let mut v = u.clone();
    sys.flow(&mut v, half);
    let k1 = sys.nonlinear(&v)?;
    let k2 = sys.nonlinear(&combine(&v, &[(half, &k1)]))?;
    let mut w = combine(&v, &[(h, &k2)]);
    sys.flow(&mut w, half);
    Ok(w)
}

/// Free Dirac and Klein–Gordon phases on the diagonal variables.
#[derive(Clone, Debug)]
pub(crate) struct FreeFlow<T: Real> {
    abs_xi: Vec<T>,
    bracket: Vec<T>,
}

impl<T: Real> FreeFlow<T> {
    pub(crate) fn new(grid: &SpectralGrid<T>) -> Self {
        FreeFlow {
            abs_xi: grid.wavenumbers().iter().map(|x| x.abs()).collect(),
            bracket: grid.wavenumbers().iter().map(|x| x.bracket()).collect(),
        }
    }

    pub(crate) fn apply(&self, u: &mut Stack<T>, t: T) {
        if t == T::zero() {
            return;
        }
        for (idx, comp) in u.iter_mut().enumerate() {
            // Arrays 0..2 and 4 travel with e^{-i t ω}, arrays 2..4 and 5 with e^{+i t ω}.
            let (symbol, sign) = match idx {
                0 | 1 => (&self.abs_xi, -T::one()),
                2 | 3 => (&self.abs_xi, T::one()),
                4 => (&self.bracket, -T::one()),
                _ => (&self.bracket, T::one()),
            };
            for (z, w) in comp.iter_mut().zip(symbol) {
                let theta = sign * t * *w;
                *z = *z * Complex::new(theta.cos(), theta.sin());
            }
        }
    }
}

/// Diagonal system `u' = Lu + N(u)` on a stack.
pub(crate) struct DiagonalSystem<T: Real> {
    pub(crate) rhs: DkgRhs<T>,
    pub(crate) free: FreeFlow<T>,
}

impl<T: Real> DiagonalSystem<T> {
    pub(crate) fn new(grid: &Arc<SpectralGrid<T>>, params: Params<T>) -> Result<Self> {
        Ok(DiagonalSystem {
            rhs: DkgRhs::new(grid, params)?,
            free: FreeFlow::new(grid),
        })
    }
}

impl<T: Real> Semilinear<T> for DiagonalSystem<T> {
    fn flow(&self, u: &mut Stack<T>, h: T) {
        self.free.apply(u, h);
    }

    fn nonlinear(&self, u: &Stack<T>) -> Result<Stack<T>> {
        let state = from_stack(self.rhs.grid(), u.clone(), T::zero());
        Ok(to_stack(&self.rhs.nonlinear(&state)?))
    }
}

/// Exact linear evolution: `ψ± ↦ e^{∓it|D|}ψ±`, `φ± ↦ e^{∓it⟨D⟩}φ±`.
///
/// Negative `t` runs the flow backwards.
pub fn free_flow<T: Real>(d: &DiagonalState<T>, t: T) -> DiagonalState<T> {
    let grid = d.grid();
    let mut s = to_stack(d);
    FreeFlow::new(grid).apply(&mut s, t);
    from_stack(grid, s, d.time + t)
}

/// Fixed-step driver for the one-step schemes.
pub struct Stepper<T: Real> {
    system: DiagonalSystem<T>,
    scheme: Scheme,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &Arc<SpectralGrid<T>>, params: Params<T>, scheme: Scheme) -> Result<Self> {
        if scheme == Scheme::Picard {
            return Err(Error::InvalidArgument("picard is not a one-step scheme".into()));
        }
        Ok(Stepper {
            system: DiagonalSystem::new(grid, params)?,
            scheme,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// One step of size `h`; non-finite or overflowing results are errors.
    pub fn step(&self, d: &DiagonalState<T>, h: T) -> Result<DiagonalState<T>> {
        self.system.rhs.grid().check_same(d.grid())?;
        let u = to_stack(d);
        let next = match self.scheme {
            Scheme::LawsonRk4 => lawson_rk4(&self.system, &u, h)?,
            Scheme::Strang => strang(&self.system, &u, h)?,
            Scheme::Picard => unreachable!("rejected in Stepper::new"),
        };
        let time = d.time + h;
        if !stack_healthy(&next) {
            return Err(Error::NumericalFailure {
                time: time.to_f64_lossy(),
                what: format!("{} step produced a non-finite or overflowing state", self.scheme),
            });
        }
        Ok(from_stack(d.grid(), next, time))
    }
}

/// One step of the configured scheme with the configured `dt`.
pub fn step<T: Real>(d: &DiagonalState<T>, params: &Params<T>, cfg: &SchemeConfig<T>) -> Result<DiagonalState<T>> {
    cfg.validate()?;
    Stepper::new(d.grid(), *params, cfg.scheme)?.step(d, cfg.dt)
}

/// Outcome of a time integration. On a numerical failure the trajectory
/// holds everything up to the last good state and `failure` is set.
#[derive(Debug)]
pub struct Run<T: Real> {
    pub trajectory: Trajectory<T>,
    pub last_good: DiagonalState<T>,
    pub failure: Option<Error>,
}

/// Integrates from `d0` to `cfg.final_time` with steps of `cfg.dt` (the last
/// one shortened if needed), recording diagnostics every `save_every` steps
/// and at the final time. `keep_states` also stores the snapshots.
pub fn evolve<T: Real>(
    d0: &DiagonalState<T>,
    params: &Params<T>,
    cfg: &SchemeConfig<T>,
    save_every: usize,
    norms: NormSpec<T>,
    keep_states: bool,
) -> Result<Run<T>> {
    cfg.validate()?;
    let stepper = Stepper::new(d0.grid(), *params, cfg.scheme)?;
    let save_every = save_every.max(1);
    let mut traj = Trajectory::new(norms, keep_states);
    traj.record(d0)?;
    let end = d0.time + cfg.final_time;
    let steps = step_count(cfg.final_time, cfg.dt);
    let mut state = d0.clone();
    for i in 1..=steps {
        let h = if i == steps { end - state.time } else { cfg.dt };
        match stepper.step(&state, h) {
            Ok(next) => state = next,
            Err(e @ Error::NumericalFailure { .. }) => {
                return Ok(Run {
                    trajectory: traj,
                    last_good: state,
                    failure: Some(e),
                })
            }
            Err(e) => return Err(e),
        }
        if i % save_every == 0 || i == steps {
            traj.record(&state)?;
        }
    }
    Ok(Run {
        trajectory: traj,
        last_good: state,
        failure: None,
    })
}

/// Number of steps of size at most `dt` covering `[0, t]`, tolerant of
/// round-off in `t / dt`.
pub fn step_count<T: Real>(t: T, dt: T) -> usize {
    let r = t / dt;
    let nearest = r.round();
    let n = if (r - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        r.ceil()
    };
    n.to_usize().unwrap_or(1).max(1)
}
