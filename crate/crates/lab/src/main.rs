use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dkg_lab::{run, Experiment, ExperimentConfig, LabError, THREADS_ENV};

/// Run one laboratory experiment from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "dkg-lab", version)]
struct Cli {
    /// simulate, picard, converge, null-check, probe-star2, probe-star3,
    /// inequality-scan, product-check or gronwall
    experiment: Experiment,

    #[arg(long)]
    config: PathBuf,

    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Let probes run with exponents outside the hypotheses of their estimate.
    #[arg(long)]
    override_admissibility: bool,
}

fn configure_threads() -> Result<(), LabError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| LabError::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::Config(format!("cannot size thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<(), LabError> {
    configure_threads()?;
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    let issues = cfg.validate(cli.experiment, &text, cli.override_admissibility);
    if !issues.is_empty() {
        let lines: Vec<String> = issues.iter().map(|i| format!("  {}: {i}", cli.config.display())).collect();
        return Err(LabError::Config(format!("invalid configuration\n{}", lines.join("\n"))));
    }
    cfg.experiment = Some(cli.experiment);
    let outcome = run(cli.experiment, &cfg)?;
    println!("{}", outcome.summary_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dkg-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
