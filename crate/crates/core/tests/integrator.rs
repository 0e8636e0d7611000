use dkg_core::dkg_state::DataSpec;
use dkg_core::integrator::{evolve, exact_linear_flow, free_flow, NormSpec, Scheme, SchemeConfig, Stepper};
use dkg_core::{to_diagonal, to_physical, DiagonalState, Grid, Params, PhysicalState, SpectralGrid};

fn data(n: usize, l: f64, k: f64, seed: u64) -> DiagonalState<f64> {
    let grid = Grid::periodic(n).unwrap();
    let spec = DataSpec {
        l,
        k,
        seed,
        psi_size: 1.0,
        phi_size: 1.0,
    };
    to_diagonal(&PhysicalState::random(&grid, &spec)).unwrap()
}

#[test]
fn zero_coupling_and_mass_is_free_flow() {
    // The Klein-Gordon source carries no coupling constant, so at g = M = 0
    // the spinor flows freely while φ is still driven by ψ.
    let d0 = data(64, 0.2, 0.3, 1);
    let params = Params::new(0.0, 1.0, 0.0).unwrap();
    let mut vacuum = d0.clone();
    vacuum.psi_plus = vacuum.psi_plus.scale_real(0.0);
    vacuum.psi_minus = vacuum.psi_minus.scale_real(0.0);
    for scheme in [Scheme::LawsonRk4, Scheme::Strang] {
        let stepper = Stepper::new(d0.grid(), params, scheme).unwrap();
        let one = stepper.step(&d0, 0.37).unwrap();
        let free = free_flow(&d0, 0.37);
        assert!(one.psi_plus.distance(&free.psi_plus).unwrap() < 1e-13, "{scheme:?}");
        assert!(one.psi_minus.distance(&free.psi_minus).unwrap() < 1e-13, "{scheme:?}");
        assert!(one.phi_plus.distance(&free.phi_plus).unwrap() > 1e-3, "{scheme:?}");
        let one = stepper.step(&vacuum, 0.37).unwrap();
        assert!(one.distance(&free_flow(&vacuum, 0.37)).unwrap() < 1e-13, "{scheme:?}");
    }
}

#[test]
fn free_flow_is_a_group() {
    let d0 = data(64, 0.0, 0.4, 2);
    let there = free_flow(&free_flow(&d0, 0.8), 1.3);
    assert!(there.distance(&free_flow(&d0, 2.1)).unwrap() < 1e-13);
    let back = free_flow(&there, -2.1);
    assert!(back.distance(&d0).unwrap() < 1e-13);
}

#[test]
fn coupled_steps_are_time_reversible() {
    let d0 = data(64, -1.0, 2.0, 3);
    let params = Params::new(1.0, 1.0, 1.0).unwrap();
    let stepper = Stepper::new(d0.grid(), params, Scheme::LawsonRk4).unwrap();
    let mut u = d0.clone();
    for _ in 0..50 {
        u = stepper.step(&u, 0.01).unwrap();
    }
    for _ in 0..50 {
        u = stepper.step(&u, -0.01).unwrap();
    }
    // RK4 is not symmetric, so reversal is only accurate to its local error.
    assert!(u.distance(&d0).unwrap() < 1e-8);
}

#[test]
fn linear_mass_coupling_matches_exact_solve() {
    // Only the spinor is linear at g = 0.
    let d0 = data(64, 0.0, 0.5, 4);
    let params = Params::new(1.0, 1.0, 0.0).unwrap();
    let (p0, _) = to_physical(&d0).unwrap();
    let exact = exact_linear_flow(&p0, &params, 1.0).unwrap();
    let err = |dt: f64| {
        let cfg = SchemeConfig::new(Scheme::LawsonRk4, dt, 1.0).unwrap();
        let run = evolve(&d0, &params, &cfg, usize::MAX, NormSpec { l: 0.0, k: 0.0 }, false).unwrap();
        let (p, _) = to_physical(&run.last_good).unwrap();
        p.psi.distance(&exact.psi).unwrap()
    };
    let (a, b) = (err(0.05), err(0.025));
    assert!(a < 1e-3, "error {a:e}");
    assert!((a / b).log2() > 3.5, "order {}", (a / b).log2());
}

#[test]
fn evolve_records_save_points_and_final_time() {
    let d0 = data(32, 0.2, 0.3, 5);
    let params = Params::new(1.0, 1.0, 1.0).unwrap();
    let cfg = SchemeConfig::new(Scheme::Strang, 0.03, 0.5).unwrap();
    let run = evolve(&d0, &params, &cfg, 5, NormSpec { l: 0.2, k: 0.3 }, true).unwrap();
    assert!(run.failure.is_none());
    let times: Vec<f64> = run.trajectory.diagnostics().iter().map(|d| d.time).collect();
    assert_eq!(times[0], 0.0);
    assert!((times.last().unwrap() - 0.5).abs() < 1e-14);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(run.trajectory.states().len(), times.len());
}

#[test]
fn single_precision_runs() {
    let grid = SpectralGrid::<f32>::periodic(32).unwrap();
    let spec = DataSpec {
        l: 0.0f32,
        k: 0.3,
        seed: 6,
        psi_size: 1.0,
        phi_size: 1.0,
    };
    let d0 = to_diagonal(&PhysicalState::random(&grid, &spec)).unwrap();
    let params = Params::new(1.0f32, 1.0, 1.0).unwrap();
    let cfg = SchemeConfig::new(Scheme::LawsonRk4, 0.01f32, 0.5).unwrap();
    let run = evolve(&d0, &params, &cfg, 10, NormSpec { l: 0.0, k: 0.3 }, false).unwrap();
    assert!(run.failure.is_none());
    assert!(run.trajectory.max_charge_drift() < 1e-5);
}

#[test]
fn invalid_scheme_configs_are_rejected() {
    assert!(SchemeConfig::new(Scheme::LawsonRk4, 0.0, 1.0).is_err());
    assert!(SchemeConfig::new(Scheme::LawsonRk4, 0.1, 0.01).is_err());
    let d0 = data(32, 0.0, 0.3, 7);
    assert!(Stepper::new(d0.grid(), Params::new(1.0, 1.0, 1.0).unwrap(), Scheme::Picard).is_err());
}
