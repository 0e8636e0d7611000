use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex;
use serde_json::{json, Value};

use dkg_core::dkg_state::{random_sobolev_field, write_snapshot, DataSpec};
use dkg_core::estimates::{
    gronwall_monitor, inequality_scan, pair_label, probe_all, product_estimate_check, Estimate, ProbeConfig,
    SpaceTimeGrid, GRONWALL_SLACK, PROBE_COLUMNS,
};
use dkg_core::integrator::{
    evolve, picard_solve, NormSpec, PicardConfig, Run, SchemeConfig, Stepper, TRAJECTORY_COLUMNS,
};
use dkg_core::nonlinearity::projected_nullform;
use dkg_core::{to_diagonal, DiagonalState, DiracMatrices, Field, Grid, Params, PhysicalState, Sign, SignPair};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::LabError;

/// Files written by one run.
#[derive(Debug)]
pub struct Outcome {
    pub summary_path: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

struct Sink {
    dir: PathBuf,
    stem: String,
    files: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: &Path, experiment: Experiment, hash: &str) -> Result<Self, LabError> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(format!("creating {}", dir.display()), e))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            stem: format!("{experiment}-{hash}"),
            files: Vec::new(),
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    fn write(&mut self, suffix: &str, bytes: &[u8]) -> Result<PathBuf, LabError> {
        let path = self.path(suffix);
        let mut f = fs::File::create(&path).map_err(|e| LabError::io(format!("creating {}", path.display()), e))?;
        f.write_all(bytes)
            .map_err(|e| LabError::io(format!("writing {}", path.display()), e))?;
        self.files.push(path.clone());
        Ok(path)
    }

    fn csv(&mut self, suffix: &str, header: &[&str], rows: &[String]) -> Result<PathBuf, LabError> {
        let mut text = header.join(",");
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        self.write(suffix, text.as_bytes())
    }
}

fn grid(cfg: &ExperimentConfig) -> Result<std::sync::Arc<Grid>, LabError> {
    Ok(Grid::new(cfg.n, cfg.length)?)
}

fn params(cfg: &ExperimentConfig) -> Result<Params<f64>, LabError> {
    Ok(Params::new(cfg.dirac_mass, cfg.kg_mass, cfg.coupling)?)
}

fn initial_state(cfg: &ExperimentConfig) -> Result<DiagonalState<f64>, LabError> {
    let spec = DataSpec {
        l: cfg.l,
        k: cfg.k,
        seed: cfg.seed,
        psi_size: cfg.psi_amplitude,
        phi_size: cfg.phi_amplitude,
    };
    Ok(to_diagonal(&PhysicalState::random(&grid(cfg)?, &spec))?)
}

/// Runs `experiment`, writing its CSV, summary JSON and, on a numerical
/// failure, the last good snapshot.
pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let hash = cfg.hash();
    let mut sink = Sink::new(&cfg.output_dir, experiment, &hash)?;
    let (results, failure) = match experiment {
        Experiment::Simulate => simulate(cfg, &mut sink)?,
        Experiment::Picard => (picard(cfg, &mut sink)?, None),
        Experiment::Converge => converge(cfg, &mut sink)?,
        Experiment::NullCheck => (null_check(cfg, &mut sink)?, None),
        Experiment::ProbeStar2 => (probe(cfg, Estimate::Star2, &mut sink)?, None),
        Experiment::ProbeStar3 => (probe(cfg, Estimate::Star3, &mut sink)?, None),
        Experiment::InequalityScan => (scan(cfg, &mut sink)?, None),
        Experiment::ProductCheck => (product(cfg, &mut sink)?, None),
        Experiment::Gronwall => gronwall(cfg, &mut sink)?,
    };
    let summary = json!({
        "experiment": experiment.name(),
        "config_hash": hash,
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": dkg_core::VERSION,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "failure": failure,
        "outputs": sink.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "results": results,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let summary_path = sink.write(".summary.json", text.as_bytes())?;
    if let Some(msg) = failure {
        return Err(LabError::Numerical(format!(
            "{msg}; last good state in {}",
            sink.path(".last-good.json").display()
        )));
    }
    Ok(Outcome {
        summary_path,
        files: sink.files,
        summary,
    })
}

type Step = (Value, Option<String>);

fn trajectory_run(cfg: &ExperimentConfig, k: f64, sink: &mut Sink) -> Result<(Run<f64>, Option<String>), LabError> {
    let d0 = initial_state(cfg)?;
    let sc = SchemeConfig::new(cfg.scheme, cfg.dt, cfg.final_time)?;
    let run = evolve(&d0, &params(cfg)?, &sc, cfg.save_every, NormSpec { l: cfg.l, k }, false)?;
    let mut buf = Vec::new();
    run.trajectory.write_csv(&mut buf)?;
    sink.write(".csv", &buf)?;
    let failure = match &run.failure {
        Some(e) => {
            let path = sink.path(".last-good.json");
            write_snapshot(&path, &run.last_good, &params(cfg)?)?;
            sink.files.push(path);
            Some(e.to_string())
        }
        None => None,
    };
    Ok((run, failure))
}

fn simulate(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Step, LabError> {
    let (run, failure) = trajectory_run(cfg, cfg.k, sink)?;
    let t = &run.trajectory;
    Ok((
        json!({
            "columns": TRAJECTORY_COLUMNS,
            "snapshots": t.len(),
            "final_time": run.last_good.time,
            "max_charge_drift": t.max_charge_drift(),
            "max_projection_residue": t.max_projection_residue(),
            "max_reality_residue": t.max_reality_residue(),
        }),
        failure,
    ))
}

fn gronwall(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Step, LabError> {
    let (run, failure) = trajectory_run(cfg, cfg.k, sink)?;
    let report = gronwall_monitor(&run.trajectory, &*grid(cfg)?, cfg.k, &params(cfg)?, GRONWALL_SLACK)?;
    let rows: Vec<String> = report
        .points
        .iter()
        .map(|p| format!("{},{},{},{}", fmt(p.time), fmt(p.energy), fmt(p.bound), p.holds))
        .collect();
    sink.csv(".bound.csv", &["time", "energy", "bound", "holds"], &rows)?;
    Ok((
        json!({
            "holds": report.holds(),
            "violations": report.violations,
            "max_fraction_of_bound": report.max_fraction(),
            "product_constant": report.constant,
            "charge": report.charge,
            "slack": report.slack,
        }),
        failure,
    ))
}

fn picard(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Value, LabError> {
    let d0 = initial_state(cfg)?;
    let p = params(cfg)?;
    let pc = PicardConfig {
        interval: cfg.picard_interval,
        nodes: cfg.picard_nodes,
        max_iterations: cfg.picard_max_iterations,
        tolerance: cfg.picard_tolerance,
    };
    let res = picard_solve(&d0, &p, &pc)?;
    let rows: Vec<String> = res
        .differences
        .iter()
        .enumerate()
        .map(|(j, d)| {
            let ratio = if j == 0 { f64::NAN } else { res.ratios[j - 1] };
            format!("{},{},{},{}", j + 1, fmt(*d), fmt(res.spinor_differences[j]), fmt(ratio))
        })
        .collect();
    sink.csv(".csv", &["iteration", "difference", "spinor_difference", "ratio"], &rows)?;

    // Compare the limit with a fine Lawson-RK4 run over the same interval.
    let steps = 200;
    let h = cfg.picard_interval / steps as f64;
    let stepper = Stepper::new(d0.grid(), p, dkg_core::integrator::Scheme::LawsonRk4)?;
    let mut u = d0.clone();
    for _ in 0..steps {
        u = stepper.step(&u, h)?;
    }
    let lrk4_difference = res.final_state().distance(&u)?;
    Ok(json!({
        "iterations": res.differences.len(),
        "converged": res.converged,
        "max_ratio": res.max_ratio(),
        "ratios": res.ratios,
        "lawson_rk4_difference": lrk4_difference,
        "lawson_rk4_steps": steps,
    }))
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_order(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn converge(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Step, LabError> {
    let d0 = initial_state(cfg)?;
    let p = params(cfg)?;
    let dts: Vec<f64> = (0..cfg.dt_levels).map(|i| cfg.dt / 2f64.powi(i as i32)).collect();
    let mut finals = Vec::with_capacity(dts.len());
    for &dt in &dts {
        let sc = SchemeConfig::new(cfg.scheme, dt, cfg.final_time)?;
        let run = evolve(&d0, &p, &sc, usize::MAX, NormSpec { l: cfg.l, k: cfg.k }, false)?;
        if let Some(e) = run.failure {
            let path = sink.path(".last-good.json");
            write_snapshot(&path, &run.last_good, &p)?;
            sink.files.push(path);
            return Ok((json!({ "failed_dt": dt }), Some(e.to_string())));
        }
        finals.push(run.last_good);
    }
    let diffs = finals
        .windows(2)
        .map(|w| w[0].distance(&w[1]))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<String> = dts.iter().zip(&diffs).map(|(dt, d)| format!("{},{}", fmt(*dt), fmt(*d))).collect();
    sink.csv(".csv", &["dt", "difference"], &rows)?;
    let local: Vec<f64> = diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order = fitted_order(&dts[..diffs.len()], &diffs);
    Ok((
        json!({
            "scheme": cfg.scheme,
            "order": order,
            "local_orders": local,
            "expected_order": cfg.scheme.order(),
        }),
        None,
    ))
}

fn null_check(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Value, LabError> {
    let g = grid(cfg)?;
    let dirac = DiracMatrices::standard();
    let table = dirac.gamma_table();
    let c = |re, im| Complex::new(re, im);
    let mut rows = Vec::new();
    let mut zero_max = 0f64;
    let mut table_max = 0f64;
    for pair in SignPair::ALL {
        for sgn1 in Sign::BOTH {
            for sgn2 in Sign::BOTH {
                let gamma = table.get(pair, sgn1, sgn2);
                let deviation = gamma.max_abs_diff(&dirac.gamma_by_product(pair, sgn1, sgn2));
                // ψ at ξ₁ = sgn1, ψ' at mode η = -sgn2 so that ξ₂ = sgn2.
                let (k1, eta) = (sgn1.value() as f64, -(sgn2.value() as f64));
                let psi = Field::from_fn(&g, 2, |x| {
                    let e = c((k1 * x).cos(), (k1 * x).sin());
                    vec![e * c(0.3, 0.7), e * c(-1.1, 0.2)]
                })?;
                let psi_prime = Field::from_fn(&g, 2, |x| {
                    let e = c((eta * x).cos(), (eta * x).sin());
                    vec![e * c(0.9, -0.4), e * c(0.5, 0.6)]
                })?;
                let out = projected_nullform(&dirac, &psi, &psi_prime, pair)?;
                let max_output = out.coeffs(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if gamma.is_zero() {
                    zero_max = zero_max.max(max_output);
                }
                table_max = table_max.max(deviation);
                rows.push(format!(
                    "{},{},{},{},{},{}",
                    pair_label(pair),
                    sgn1,
                    sgn2,
                    gamma.is_zero(),
                    fmt(deviation),
                    fmt(max_output)
                ));
            }
        }
    }
    sink.csv(
        ".csv",
        &["pair", "sgn1", "sgn2", "gamma_is_zero", "table_deviation", "max_output"],
        &rows,
    )?;
    Ok(json!({
        "zero_cells": table.zero_cells().len(),
        "max_zero_cell_output": zero_max,
        "max_table_deviation": table_max,
        "passed": zero_max <= 1e-12 && table_max <= 1e-15,
    }))
}

fn probe(cfg: &ExperimentConfig, estimate: Estimate, sink: &mut Sink) -> Result<Value, LabError> {
    let st = SpaceTimeGrid::new(cfg.n, cfg.n_t, cfg.length, cfg.t_box)?;
    let pc = ProbeConfig {
        l: cfg.l,
        k: cfg.k,
        eps_prime: cfg.eps_prime,
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let reports = probe_all(estimate, &pc, &st)?;
    let rows: Vec<String> = reports.iter().flat_map(|r| r.csv_rows()).collect();
    sink.csv(".csv", &PROBE_COLUMNS, &rows)?;
    let per: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "pair": pair_label(r.pair),
                "phi_sign": r.phi_sign,
                "coarse": { "n": r.coarse.grid_n, "n_t": r.coarse.grid_nt, "max": r.coarse.max, "mean": r.coarse.mean, "degenerate": r.coarse.degenerate },
                "fine": { "n": r.fine.grid_n, "n_t": r.fine.grid_nt, "max": r.fine.max, "mean": r.fine.mean, "degenerate": r.fine.degenerate },
                "growth": r.growth,
            })
        })
        .collect();
    let worst = reports.iter().map(|r| (r.growth - 1.0).abs()).fold(0.0, f64::max);
    Ok(json!({
        "estimate": estimate.name(),
        "configurations": per,
        "max_growth_deviation": worst,
        "grid_stable": worst <= 0.1,
    }))
}

fn scan(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Value, LabError> {
    let reports = inequality_scan(cfg.samples, cfg.seed)?;
    let rows: Vec<String> = reports
        .iter()
        .map(|r| format!("{},{},{},{}", r.case, r.samples, r.violations, fmt(r.min_slack)))
        .collect();
    sink.csv(".csv", &["case", "samples", "violations", "min_slack"], &rows)?;
    let total: usize = reports.iter().map(|r| r.violations).sum();
    Ok(json!({ "cases": reports, "violations": total }))
}

fn product(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Value, LabError> {
    let g = grid(cfg)?;
    let mut rows = Vec::with_capacity(cfg.samples);
    let mut max_ratio = 0f64;
    let mut constant = 0f64;
    for trial in 0..cfg.samples {
        let seed = cfg.seed.wrapping_add(2 * trial as u64);
        // Regularities from rough to smooth so both aliasing and low modes show up.
        let s = -0.5 + (trial % 5) as f64 * 0.5;
        let u = random_sobolev_field(&g, s, 1, seed, trial % 2 == 0);
        let v = random_sobolev_field(&g, s, 1, seed + 1, trial % 3 == 0);
        let r = product_estimate_check(&u, &v, cfg.k)?;
        max_ratio = max_ratio.max(r.ratio);
        constant = r.constant;
        rows.push(format!("{},{},{},{}", trial, fmt(r.lhs), fmt(r.rhs_bound), fmt(r.ratio)));
    }
    sink.csv(".csv", &["trial", "lhs", "rhs_bound", "ratio"], &rows)?;
    Ok(json!({
        "constant": constant,
        "max_ratio": max_ratio,
        "all_within_bound": max_ratio <= 1.0,
    }))
}
