use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kahler_quant::harness::{emit_report, run_experiment, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "kahler-quant",
    version,
    about = "Run a quantization experiment and write its report"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lipschitz ratio of FS on random diagonal pairs.
    Lipschitz(Flags),
    /// Linear growth of d_p along FS images of matrix geodesics.
    Quasigeo(Flags),
    /// The block path diag(1, e^t) and its bounded zero-block variant.
    Counterexample(Flags),
    /// FS paths of Hilbert endpoints against the weak geodesic.
    Bergman(Flags),
    /// The three-step quantization ladder for the semi-positive form.
    Ladder(Flags),
    /// Weak geodesic invariants and the envelope-sweep cross-check.
    Geodesic(Flags),
}

#[derive(Args)]
struct Flags {
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    degree: Option<Vec<usize>>,
    /// Quadrature nodes in the radial variable.
    #[arg(long)]
    grid: Option<usize>,
    /// Exponent of the d_p distance.
    #[arg(long)]
    p: Option<f64>,
    /// Largest |t| along matrix geodesic paths.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of seeded samples (pairs, directions or time points).
    #[arg(long)]
    samples: Option<usize>,
    /// Base seed; every sample draws from its own stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Compact set x ∈ [δ, 1/δ] for sup errors.
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// `key = value` file; its entries override flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Lipschitz(f) => (Experiment::Lipschitz, f),
            Command::Quasigeo(f) => (Experiment::Quasigeo, f),
            Command::Counterexample(f) => (Experiment::Counterexample, f),
            Command::Bergman(f) => (Experiment::Bergman, f),
            Command::Ladder(f) => (Experiment::Ladder, f),
            Command::Geodesic(f) => (Experiment::Geodesic, f),
        }
    }
}

fn configure(experiment: Experiment, flags: &Flags) -> kahler_quant::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(d) = &flags.degree {
        cfg.degrees = d.clone();
    }
    if let Some(v) = flags.grid {
        cfg.grid = v;
    }
    if let Some(v) = flags.p {
        cfg.p = v;
    }
    if let Some(v) = flags.tmax {
        cfg.tmax = v;
    }
    if let Some(v) = flags.samples {
        cfg.samples = v;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = flags.delta {
        cfg.delta = v;
    }
    if let Some(path) = &flags.config {
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let (experiment, flags) = Cli::parse().command.split();
    let report = match configure(experiment, &flags).and_then(|cfg| run_experiment(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_report(&report, &flags.out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for v in &report.verdicts {
        println!(
            "{} {:<48} measured {:>12.5e}  threshold {:>12.5e}  slack {:>12.5e}",
            if v.passed { "pass" } else { "FAIL" },
            v.name,
            v.measured,
            v.threshold,
            v.slack
        );
    }
    println!(
        "{experiment}: {} of {} verdicts pass; report in {}",
        report.verdicts.iter().filter(|v| v.passed).count(),
        report.verdicts.len(),
        flags.out.display()
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
