mod common;

use common::{big_potential, fs_potential, gl_grid};
use kahler_quant::toric::{
    build_model, integrate, is_psh, ma_masses, node_masses, BackgroundForm, InvariantPotential,
    QuadratureGrid,
};
use proptest::prelude::*;

#[test]
fn model_sizes_and_fiber_norms() {
    for d in [1, 2, 5, 16] {
        let model = build_model(d, 64).unwrap();
        assert_eq!(model.dim_sections(), d + 1);
        assert_eq!(model.grid().len(), 64);
        // Σ_j C(d, j) |z^j|^2 = 1
        for x in [1e-6, 0.3, 1.0, 7.0, 1e5] {
            let total: f64 = (0..=d)
                .map(|j| model.ln_binomial(j).exp() * model.fiber_norm(j, x))
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "d = {d}, x = {x}");
        }
        for i in [0, 31, 63] {
            let x = model.grid().nodes()[i];
            let direct = model.fiber_norm(d / 2, x).ln();
            assert!((model.log_fiber_norm(d / 2, i) - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }
    assert!(build_model(0, 64).is_err());
}

#[test]
fn integration_examples() {
    let grid = QuadratureGrid::gauss_legendre(64).unwrap();
    let rho = grid.reference_density();
    let one = integrate(&vec![1.0; 64], &rho, &grid).unwrap();
    assert!((one - 1.0).abs() < 1e-13);
    let s: Vec<f64> = grid.nodes().iter().map(|x| x / (1.0 + x)).collect();
    assert!((integrate(&s, &rho, &grid).unwrap() - 0.5).abs() < 1e-13);
    let s2: Vec<f64> = s.iter().map(|v| v * v).collect();
    assert!((integrate(&s2, &rho, &grid).unwrap() - 1.0 / 3.0).abs() < 1e-13);
    let mixed: Vec<f64> = s.iter().zip(&s2).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
    let lin =
        2.0 * integrate(&s, &rho, &grid).unwrap() - 3.0 * integrate(&s2, &rho, &grid).unwrap();
    assert!((integrate(&mixed, &rho, &grid).unwrap() - lin).abs() < 1e-13);
    assert!(integrate(&s[..10], &rho, &grid).is_err());
}

#[test]
fn semipositive_density_integrates_to_its_mass() {
    let grid = QuadratureGrid::gauss_legendre(256).unwrap();
    let form = BackgroundForm::semipositive_big();
    let total = integrate(&vec![1.0; 256], &form.density_on(&grid), &grid).unwrap();
    assert!((total - 2.0).abs() < 1e-8, "{total}");
}

#[test]
fn csv_round_trip() {
    let grid = gl_grid(48);
    let u = fs_potential(&grid, &[0.3, -0.7, 1.1]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    u.write_csv(&path).unwrap();
    let back = InvariantPotential::read_csv(&grid, &path).unwrap();
    assert_eq!(back, u);
    let other = gl_grid(32);
    assert!(InvariantPotential::read_csv(&other, &path).is_err());
}

#[test]
fn non_psh_potential_is_rejected() {
    let grid = gl_grid(64);
    let u = InvariantPotential::from_log_fn(&grid, |t| -2.0 * (1.0 + t * t).ln()).unwrap();
    assert!(!is_psh(&u, &BackgroundForm::fubini_study()));
    assert!(ma_masses(&u, &BackgroundForm::fubini_study()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masses_are_conserved(c in prop::collection::vec(-2.0f64..2.0, 2..6), m in 16usize..200) {
        let grid = gl_grid(m);
        let u = fs_potential(&grid, &c);
        let form = BackgroundForm::fubini_study();
        let masses = ma_masses(&u, &form).unwrap();
        prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(masses.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn big_masses_are_conserved(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, eps in 0.0f64..0.5) {
        let grid = gl_grid(96);
        let u = big_potential(&grid, &[a, b, c]);
        let form = BackgroundForm::semipositive_big().with_epsilon(eps);
        let masses = ma_masses(&u, &form).unwrap();
        prop_assert!((masses.iter().sum::<f64>() - form.mass()).abs() <= 1e-12);
    }

    #[test]
    fn node_masses_telescope(psi in prop::collection::vec(-5.0f64..5.0, 3..40), mass in 0.5f64..3.0) {
        let tau: Vec<f64> = (0..psi.len()).map(|i| i as f64 * 0.3).collect();
        let total: f64 = node_masses(&psi, &tau, mass).iter().sum();
        prop_assert!((total - mass).abs() <= 1e-9);
    }
}
