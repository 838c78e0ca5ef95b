mod common;

use common::{big_potential, gl_grid};
use kahler_quant::ladder::{
    lift_potential, lower_potential, quantize_endpoints, quantized_slice, run_ladder, LadderConfig,
};
use kahler_quant::mabuchi::smooth_decreasing;
use kahler_quant::toric::{BackgroundForm, InvariantPotential};
use kahler_quant::Error;
use proptest::prelude::*;

fn form() -> BackgroundForm {
    BackgroundForm::semipositive_big()
}

fn config(rungs: Vec<usize>) -> LadderConfig {
    LadderConfig {
        ell_max: 4,
        rungs,
        grid_size: 128,
        ..LadderConfig::default()
    }
}

fn pair(grid_size: usize) -> (InvariantPotential, InvariantPotential) {
    let grid = gl_grid(grid_size);
    (
        big_potential(&grid, &[0.3, -0.5, 0.1]),
        big_potential(&grid, &[-0.6, 0.4, 0.2]),
    )
}

#[test]
fn equal_endpoints_leave_only_the_smoothing_and_quantization_steps() {
    let (u, _) = pair(128);
    let run = run_ladder(&u, &u, &form(), &config(vec![1, 2, 4])).unwrap();
    assert_eq!(run.report.rungs[0].j_chosen, 1);
    for r in &run.report.rungs {
        assert!(r.step1_error <= 1e-12, "{r:?}");
        assert!(r.total_error_on_k <= 2.0 / r.ell as f64, "{r:?}");
    }
}

#[test]
fn finer_rungs_need_larger_indices() {
    let (u0, u1) = pair(128);
    let run = run_ladder(&u0, &u1, &form(), &config(vec![1, 2, 4])).unwrap();
    let rungs = &run.report.rungs;
    for w in rungs.windows(2) {
        assert!(w[1].j_chosen >= w[0].j_chosen, "{rungs:?}");
        assert!(w[1].k_chosen >= w[0].k_chosen, "{rungs:?}");
        assert!(w[1].total_error_on_k < w[0].total_error_on_k, "{rungs:?}");
    }
    for r in rungs {
        let budget = 3.0 / r.ell as f64;
        assert!(r.step2_error <= 1.0 / r.ell as f64 && r.step3_error <= 1.0 / r.ell as f64);
        assert!(r.total_error_on_k <= r.step1_error + r.step2_error + r.step3_error + 1e-12);
        assert!(r.total_error_on_k <= budget + r.step1_error);
        assert_eq!(r.degree, r.k_chosen * (2 * r.ell + 1));
    }
    for a in &run.rungs {
        assert!(a.quantized.replays(u0.grid()).unwrap());
    }
}

#[test]
fn tiny_cap_is_reported() {
    let (u0, u1) = pair(128);
    let cfg = LadderConfig {
        ell_max: 64,
        rungs: vec![64],
        k_cap: 1,
        ..config(vec![])
    };
    match run_ladder(&u0, &u1, &form(), &cfg) {
        Err(Error::LadderStep { source, .. }) => {
            assert!(matches!(*source, Error::CapExhausted { .. }), "{source}")
        }
        Err(Error::CapExhausted { .. }) => {}
        Err(e) => panic!("expected an exhausted cap, got {e}"),
        Ok(run) => panic!("expected an exhausted cap, got {:?}", run.report.rungs),
    }
}

#[test]
fn smoothed_endpoints_decrease_in_j() {
    let (u, _) = pair(128);
    let eps = 0.25;
    let rows: Vec<InvariantPotential> = (1..=12)
        .map(|j| smooth_decreasing(&u, j, &form(), eps).unwrap())
        .collect();
    for w in rows.windows(2) {
        for (a, b) in w[1].values().iter().zip(w[0].values()) {
            assert!(a <= &(b + 1e-12));
        }
    }
}

#[test]
fn constant_direction_gives_a_static_path() {
    let (u, _) = pair(128);
    let g = quantize_endpoints(&u, &u, 2, 3).unwrap();
    let a = quantized_slice(&g, u.grid(), 2, 0.0).unwrap();
    let b = quantized_slice(&g, u.grid(), 2, 0.7).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lift_and_lower_are_inverse(ell in 1usize..12, a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let grid = gl_grid(64);
        let u = big_potential(&grid, &[a, b, c]);
        let w = lift_potential(&u, ell).unwrap();
        let back = lower_potential(w.values(), &grid, ell);
        for (x, y) in back.iter().zip(u.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }
}
