use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dkg_core::estimates::admissibility::{
    global_theory_violations, local_theory_violations, star2_violations, star3_violations, Violation,
};
use dkg_core::integrator::Scheme;

use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Picard,
    Converge,
    NullCheck,
    ProbeStar2,
    ProbeStar3,
    InequalityScan,
    ProductCheck,
    Gronwall,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Simulate,
        Experiment::Picard,
        Experiment::Converge,
        Experiment::NullCheck,
        Experiment::ProbeStar2,
        Experiment::ProbeStar3,
        Experiment::InequalityScan,
        Experiment::ProductCheck,
        Experiment::Gronwall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Picard => "picard",
            Experiment::Converge => "converge",
            Experiment::NullCheck => "null-check",
            Experiment::ProbeStar2 => "probe-star2",
            Experiment::ProbeStar3 => "probe-star3",
            Experiment::InequalityScan => "inequality-scan",
            Experiment::ProductCheck => "product-check",
            Experiment::Gronwall => "gronwall",
        }
    }

    pub fn is_probe(self) -> bool {
        matches!(self, Experiment::ProbeStar2 | Experiment::ProbeStar3)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment {s:?}; expected one of {}", names.join(", "))
            })
    }
}

fn tau() -> f64 {
    std::f64::consts::TAU
}

/// Flat experiment configuration. Every key is optional; unknown keys are
/// rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the experiment named on the command line when present.
    pub experiment: Option<Experiment>,

    pub n: usize,
    pub length: f64,
    pub n_t: usize,
    pub t_box: f64,

    pub dirac_mass: f64,
    pub kg_mass: f64,
    pub coupling: f64,

    pub l: f64,
    pub k: f64,
    pub seed: u64,
    /// `H^{-l}` norm of `ψ₀`.
    pub psi_amplitude: f64,
    /// `H^k` norm of `φ₀` and `H^{k-1}` norm of `φ₁`.
    pub phi_amplitude: f64,

    pub scheme: Scheme,
    pub dt: f64,
    pub final_time: f64,
    pub save_every: usize,

    /// Number of step sizes `dt, dt/2, …` for `converge`.
    pub dt_levels: usize,

    pub picard_interval: f64,
    pub picard_nodes: usize,
    pub picard_max_iterations: usize,
    pub picard_tolerance: f64,

    pub eps_prime: f64,
    pub trials: usize,
    /// Tuples per case for `inequality-scan`, field pairs for `product-check`.
    pub samples: usize,

    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            n: 128,
            length: tau(),
            n_t: 32,
            t_box: tau(),
            dirac_mass: 1.0,
            kg_mass: 1.0,
            coupling: 1.0,
            l: 0.2,
            k: 0.3,
            seed: 0,
            psi_amplitude: 1.0,
            phi_amplitude: 1.0,
            scheme: Scheme::LawsonRk4,
            dt: 1e-3,
            final_time: 1.0,
            save_every: 10,
            dt_levels: 4,
            picard_interval: 0.05,
            picard_nodes: 65,
            picard_max_iterations: 40,
            picard_tolerance: 1e-12,
            eps_prime: 0.01,
            trials: 200,
            samples: 1000,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// A config problem, with the 1-based line of the offending key when known.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigIssue {
    pub key: &'static str,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

/// Line of the first occurrence of `"key"` followed by a colon.
pub fn key_line(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().enumerate().find_map(|(i, line)| {
        let pos = line.find(&quoted)?;
        line[pos + quoted.len()..]
            .trim_start()
            .starts_with(':')
            .then_some(i + 1)
    })
}

impl ExperimentConfig {
    /// Parses JSON text; syntax and type errors carry serde's line and column.
    pub fn parse(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    /// Stable hash of the effective configuration, first 12 hex digits.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..6])
    }

    /// Every violated constraint for running `experiment`. Exponent
    /// constraints of the probes are dropped when `override_admissibility`
    /// is set.
    pub fn validate(&self, experiment: Experiment, text: &str, override_admissibility: bool) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut push = |key: &'static str, message: String| {
            out.push(ConfigIssue {
                key,
                line: key_line(text, key),
                message,
            })
        };
        if let Some(e) = self.experiment {
            if e != experiment {
                push("experiment", format!("config names {e} but {experiment} was requested"));
            }
        }
        let grid_n = |n: usize| n >= 8 && n % 2 == 0;
        if !grid_n(self.n) {
            push("n", format!("must be even and at least 8, got {}", self.n));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            push("length", format!("must be positive, got {}", self.length));
        }
        if experiment.is_probe() {
            if !grid_n(self.n_t) {
                push("n_t", format!("must be even and at least 8, got {}", self.n_t));
            }
            if !(self.t_box > 0.0 && self.t_box.is_finite()) {
                push("t_box", format!("must be positive, got {}", self.t_box));
            }
            if !(self.eps_prime > 0.0 && self.eps_prime <= 0.1) {
                push("eps_prime", format!("must lie in (0, 0.1], got {}", self.eps_prime));
            }
            if self.trials == 0 {
                push("trials", "must be at least 1".into());
            }
        }
        if !(self.kg_mass > 0.0 && self.kg_mass.is_finite()) {
            push("kg_mass", format!("must be positive, got {}", self.kg_mass));
        }
        if !self.dirac_mass.is_finite() {
            push("dirac_mass", "must be finite".into());
        }
        if !self.coupling.is_finite() {
            push("coupling", "must be finite".into());
        }
        if !(self.psi_amplitude >= 0.0 && self.psi_amplitude.is_finite()) {
            push("psi_amplitude", "must be finite and nonnegative".into());
        }
        if !(self.phi_amplitude >= 0.0 && self.phi_amplitude.is_finite()) {
            push("phi_amplitude", "must be finite and nonnegative".into());
        }
        let evolves = matches!(
            experiment,
            Experiment::Simulate | Experiment::Converge | Experiment::Gronwall
        );
        if evolves {
            if self.scheme == Scheme::Picard {
                push("scheme", "picard is not a one-step scheme; use the picard experiment".into());
            }
            if !(self.dt > 0.0 && self.dt.is_finite()) {
                push("dt", format!("must be positive, got {}", self.dt));
            }
            if !(self.final_time >= self.dt && self.final_time.is_finite()) {
                push("final_time", format!("must be finite and at least dt, got {}", self.final_time));
            }
            if self.save_every == 0 {
                push("save_every", "must be at least 1".into());
            }
        }
        if experiment == Experiment::Converge && self.dt_levels < 3 {
            push("dt_levels", format!("need at least 3 levels, got {}", self.dt_levels));
        }
        if experiment == Experiment::Picard {
            if !(self.picard_interval > 0.0 && self.picard_interval.is_finite()) {
                push("picard_interval", "must be positive".into());
            }
            if self.picard_nodes < 2 {
                push("picard_nodes", "need at least 2 nodes".into());
            }
            if self.picard_max_iterations == 0 {
                push("picard_max_iterations", "must be at least 1".into());
            }
        }
        if matches!(experiment, Experiment::InequalityScan | Experiment::ProductCheck) && self.samples == 0 {
            push("samples", "must be at least 1".into());
        }

        let exponent_issues: Vec<Violation> = match experiment {
            Experiment::Simulate | Experiment::Picard | Experiment::Converge => local_theory_violations(self.l, self.k),
            Experiment::Gronwall => {
                let mut v = global_theory_violations(self.k);
                if self.l != 0.0 {
                    v.extend(local_theory_violations(self.l, self.k));
                }
                v
            }
            Experiment::ProductCheck => global_theory_violations(self.k),
            Experiment::ProbeStar2 if !override_admissibility => star2_violations(self.l, self.k),
            Experiment::ProbeStar3 if !override_admissibility => star3_violations(self.l, self.k),
            _ => Vec::new(),
        };
        for v in exponent_issues {
            let key = if v.constraint.contains('l') { "l" } else { "k" };
            push(
                key,
                format!(
                    "(l, k) = ({}, {}) violates {} [{:?}]",
                    self.l, self.k, v.constraint, v.clause
                ),
            );
        }
        out
    }
}
