//! One line per acceptance criterion; exits non-zero when any fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{ode_residual, relative_spectrum_oracle};
use kahler_quant::harness::sampling::{cell_rng, random_log_diagonal, random_metric};
use kahler_quant::harness::{
    eigenvalue_band, emit_report, run_experiment, Experiment, ExperimentConfig, ExperimentReport,
};
use kahler_quant::hermgeo::{geodesic_through, hat_distance, HermitianMatrix, MatrixGeodesic};
use kahler_quant::linalg::{random_gaussian_matrix, CMatrix, C64};
use kahler_quant::quantmaps::{fs, hilb};
use kahler_quant::toric::{build_model, InvariantPotential, LineBundleModel};
use kahler_quant::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let lf = |m: usize| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

/// Checks the named verdicts and lists the failing ones.
fn verdicts_pass(report: &ExperimentReport, names: &[String]) -> (bool, Vec<String>) {
    let mut failing = Vec::new();
    for name in names {
        match report.verdict(name) {
            Some(v) if v.passed => {}
            Some(v) => failing.push(format!(
                "{name} = {:.4e} vs {:.4e}",
                v.measured, v.threshold
            )),
            None => failing.push(format!("{name} missing")),
        }
    }
    (failing.is_empty(), failing)
}

fn symmetric_space() -> Result<Outcome> {
    let mut worst_closed = 0.0f64;
    let mut worst_congruence = 0.0f64;
    for i in 0..100u64 {
        let n = 1 + (i as usize % 16);
        let mut rng = cell_rng(1, i);
        let h0 = random_metric(n, &mut rng)?;
        let h1 = random_metric(n, &mut rng)?;
        let mu = relative_spectrum_oracle(&h0, &h1);
        let closed = (mu.iter().map(|m| m.ln().powi(2)).sum::<f64>() / n as f64).sqrt();
        let d = hat_distance(&h0, &h1)?;
        worst_closed = worst_closed.max((d - closed).abs());
        let q = random_gaussian_matrix(n, &mut rng) + CMatrix::identity(n, n) * C64::new(2.0, 0.0);
        let moved = hat_distance(&h0.congruence(&q)?, &h1.congruence(&q)?)?;
        worst_congruence = worst_congruence.max((d - moved).abs());
    }
    let mut ratios = Vec::new();
    for i in 0..5u64 {
        let mut rng = cell_rng(2, i);
        let n = 2 + i as usize;
        let g = geodesic_through(&random_metric(n, &mut rng)?, &random_metric(n, &mut rng)?)?;
        ratios.push(ode_residual(&g, 0.4, 0.02) / ode_residual(&g, 0.4, 0.01));
    }
    let second_order = ratios.iter().all(|r| (3.0..5.0).contains(r));
    outcome(
        worst_closed <= 1e-9 && worst_congruence <= 1e-9 && second_order,
        format!(
            "closed form {worst_closed:.2e}, congruence {worst_congruence:.2e}, residual ratios under halving {:.2}..{:.2}",
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(0.0, f64::max)
        ),
    )
}

fn quantization_oracles() -> Result<Outcome> {
    let mut beta = 0.0f64;
    let mut constant = 0.0f64;
    for d in [2, 4, 8] {
        let model = build_model(d, 512)?;
        let h = hilb(&InvariantPotential::zero(model.grid()), &model)?;
        for (j, g) in h.diagonal().iter().enumerate() {
            let want = (-((d + 1) as f64).ln() - ln_binomial(d, j)).exp();
            beta = beta.max((g - want).abs());
        }
        let c = ((d + 1) as f64).ln() / d as f64;
        let u = fs(&h, &model)?;
        constant = constant.max(u.values().iter().fold(0.0, |m, v| m.max((v - c).abs())));
    }
    outcome(
        beta <= 1e-9 && constant <= 1e-8,
        format!("beta integrals {beta:.2e}, roundtrip constant {constant:.2e}"),
    )
}

fn eigenvalue_band_criterion() -> Result<Outcome> {
    let times: Vec<f64> = (0..=200).map(|i| -5.0 + 0.05 * i as f64).collect();
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for d in [1, 2, 4] {
        let model = LineBundleModel::new(d, common::gl_grid(256))?;
        for i in 0..20u64 {
            let mut rng = cell_rng(3, (d as u64) << 32 | i);
            let a = random_log_diagonal(d + 1, &mut rng);
            let g = MatrixGeodesic::new(
                CMatrix::identity(d + 1, d + 1),
                HermitianMatrix::from_real_diagonal(&a),
            )?;
            let band = eigenvalue_band(&g, &model, &times)?;
            lower = lower.min(band.lower_slack);
            upper = upper.min(band.upper_slack);
        }
    }
    outcome(
        lower >= -1e-9 && upper >= -1e-9,
        format!("smallest slack below {lower:.2e}, above {upper:.2e}"),
    )
}

fn counterexample(r: &ExperimentReport) -> Result<Outcome> {
    let names: Vec<String> = [
        "proxy_tail_variation",
        "hat_distance_linear",
        "not_quasi_geodesic",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let (passed, failing) = verdicts_pass(r, &names);
    let zero_block: Vec<String> = names.iter().map(|n| format!("zero_block_{n}")).collect();
    let (zb, _) = verdicts_pass(r, &zero_block);
    outcome(
        passed,
        format!(
            "d=1 path: {}; zero-block variant at d=2 {}",
            if failing.is_empty() {
                "all verdicts hold".into()
            } else {
                failing.join(", ")
            },
            if zb { "passes" } else { "fails" }
        ),
    )
}

fn quasi_geodesic(r: &ExperimentReport) -> Result<Outcome> {
    let names: Vec<String> = r
        .verdicts
        .iter()
        .map(|v| v.name.clone())
        .filter(|n| n.contains("definite") || n.contains("mixed"))
        .collect();
    let (passed, failing) = verdicts_pass(r, &names);
    let residual = r
        .constants
        .iter()
        .filter(|(k, _)| k.ends_with("relative_residual") && !k.contains("with_zeros"))
        .fold(0.0f64, |m, (_, v)| m.max(*v));
    outcome(
        passed && !names.is_empty(),
        format!(
            "{} verdicts, largest residual {residual:.3e} {}",
            names.len(),
            failing.join(", ")
        ),
    )
}

fn contraction(r: &ExperimentReport) -> Result<Outcome> {
    let (passed, failing) = verdicts_pass(
        r,
        &["contraction_d32".into(), "ratios_non_increasing".into()],
    );
    let v = r
        .verdict("contraction_d32")
        .map(|v| v.measured)
        .unwrap_or(f64::NAN);
    outcome(
        passed,
        format!("max ratio at d=32 {v:.4} {}", failing.join(", ")),
    )
}

fn all_verdicts(r: &ExperimentReport, what: &str) -> Result<Outcome> {
    let failing: Vec<String> = r
        .failures()
        .map(|v| format!("{} = {:.4e} vs {:.4e}", v.name, v.measured, v.threshold))
        .collect();
    outcome(
        failing.is_empty(),
        format!(
            "{} {what} verdicts {}",
            r.verdicts.len(),
            failing.join(", ")
        ),
    )
}

fn weak_geodesic(r: &ExperimentReport) -> Result<Outcome> {
    let names: Vec<String> = [
        "boundary_exact",
        "t_convexity",
        "t_lipschitz",
        "oracle_agreement",
        "endpoint_spread",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let (passed, failing) = verdicts_pass(r, &names);
    let oracle = r
        .verdict("oracle_agreement")
        .map(|v| v.measured)
        .unwrap_or(f64::NAN);
    let spread = r
        .verdict("endpoint_spread")
        .map(|v| v.measured)
        .unwrap_or(f64::NAN);
    outcome(
        passed,
        format!(
            "oracle gap {oracle:.2e} resolutions, endpoint spread {spread:.2e} {}",
            failing.join(", ")
        ),
    )
}

fn ladder(r: &ExperimentReport) -> Result<Outcome> {
    let names: Vec<String> = r
        .verdicts
        .iter()
        .map(|v| v.name.clone())
        .filter(|n| {
            n.ends_with("budget") || n.ends_with("replay") || n == "total_strictly_decreasing"
        })
        .collect();
    let (passed, failing) = verdicts_pass(r, &names);
    let totals = r
        .series("rungs")
        .and_then(|s| s.column("total"))
        .unwrap_or_default();
    outcome(
        passed && names.len() == 7,
        format!("totals {totals:.3?} {}", failing.join(", ")),
    )
}

fn emitted_bytes(report: &ExperimentReport, dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for path in emit_report(report, dir)? {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.insert(name, std::fs::read(&path)?);
    }
    Ok(out)
}

fn determinism(first: &[ExperimentReport]) -> Result<Outcome> {
    let root = tempfile::tempdir()?;
    let mut differing = Vec::new();
    for report in first {
        let exp = report.experiment();
        let again = run_experiment(&report.config)?;
        let a = emitted_bytes(report, &root.path().join(format!("{exp}_a")))?;
        let b = emitted_bytes(&again, &root.path().join(format!("{exp}_b")))?;
        if a != b || report.config_hash != again.config_hash {
            differing.push(exp.to_string());
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} experiments re-run {}",
            first.len(),
            differing.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut reports: Vec<ExperimentReport> = Vec::new();
    let mut line = |n: usize,
                    title: &str,
                    limit: Option<Duration>,
                    run: &mut dyn FnMut() -> Result<Outcome>| {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all_pass &= passed;
        let budget = limit
            .map(|l| format!(" / {} s", l.as_secs()))
            .unwrap_or_default();
        println!(
            "criterion {n:>2} {} {title:<28} {:>7.2} s{budget}  {detail}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    };
    let experiment =
        |exp: Experiment, reports: &mut Vec<ExperimentReport>| -> Result<ExperimentReport> {
            let report = run_experiment(&ExperimentConfig::defaults(exp))?;
            reports.push(report.clone());
            Ok(report)
        };

    line(
        1,
        "symmetric-space exactness",
        Some(Duration::from_secs(5)),
        &mut symmetric_space,
    );
    line(
        2,
        "quantization oracles",
        Some(Duration::from_secs(5)),
        &mut quantization_oracles,
    );
    line(3, "eigenvalue band", None, &mut eigenvalue_band_criterion);
    line(
        4,
        "counterexample",
        Some(Duration::from_secs(10)),
        &mut || counterexample(&experiment(Experiment::Counterexample, &mut reports)?),
    );
    line(5, "quasi-geodesic images", None, &mut || {
        quasi_geodesic(&experiment(Experiment::Quasigeo, &mut reports)?)
    });
    line(6, "contraction", None, &mut || {
        contraction(&experiment(Experiment::Lipschitz, &mut reports)?)
    });
    line(
        7,
        "Bergman convergence",
        Some(Duration::from_secs(60)),
        &mut || {
            all_verdicts(
                &experiment(Experiment::Bergman, &mut reports)?,
                "convergence",
            )
        },
    );
    line(8, "weak geodesic solver", None, &mut || {
        weak_geodesic(&experiment(Experiment::Geodesic, &mut reports)?)
    });
    line(
        9,
        "quantization ladder",
        Some(Duration::from_secs(600)),
        &mut || ladder(&experiment(Experiment::Ladder, &mut reports)?),
    );
    line(10, "determinism", None, &mut || determinism(&reports));

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
