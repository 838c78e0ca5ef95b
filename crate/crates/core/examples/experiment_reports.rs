//! Running an experiment from a config file and reading its report back.

use kahler_quant::harness::{
    emit_report, parse_report, run_experiment, Experiment, ExperimentConfig,
};

fn main() -> kahler_quant::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Experiment::Quasigeo);
    cfg.apply_text("degree = 2\nsamples = 41\np = 1\n")?;
    print!("{}", cfg.to_text());
    println!("config hash {}", cfg.hash());

    let report = run_experiment(&cfg)?;
    for v in report.verdicts.iter().take(6) {
        println!("{:<40} passed {} slack {:.3e}", v.name, v.passed, v.slack);
    }
    let dir = std::env::temp_dir().join("kahler-quant-report");
    for path in emit_report(&report, &dir)? {
        println!("wrote {}", path.display());
    }
    assert_eq!(parse_report(&dir, Experiment::Quasigeo)?, report);
    println!("all verdicts pass: {}", report.passed());
    Ok(())
}
