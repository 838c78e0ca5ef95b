mod common;

use common::{ode_residual, random_pd, relative_spectrum_oracle};
use kahler_quant::hermgeo::{
    geodesic_eval, geodesic_speed, geodesic_through, hat_distance, metric_inner, HermitianMatrix,
    MatrixGeodesic, PosDefMetric,
};
use kahler_quant::linalg::{random_gaussian_matrix, CMatrix, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_direction(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = random_gaussian_matrix(n, rng);
    HermitianMatrix::new((&g + g.adjoint()) * C64::new(0.25, 0.0)).unwrap()
}

#[test]
fn hat_distance_matches_cholesky_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=16 {
        let h0 = random_pd(n, &mut rng);
        let h1 = random_pd(n, &mut rng);
        let mu = relative_spectrum_oracle(&h0, &h1);
        let want = (mu.iter().map(|m| m.ln().powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!(
            (hat_distance(&h0, &h1).unwrap() - want).abs() < 1e-9,
            "n = {n}"
        );
    }
}

#[test]
fn geodesic_solves_the_ode_to_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [2, 3, 5] {
        let h0 = random_pd(n, &mut rng);
        let h1 = random_pd(n, &mut rng);
        let g = geodesic_through(&h0, &h1).unwrap();
        let coarse = ode_residual(&g, 0.4, 0.02);
        let fine = ode_residual(&g, 0.4, 0.01);
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "n = {n}: ratio {ratio}");
    }
}

#[test]
fn geodesic_through_uses_the_hermitian_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h0 = random_pd(4, &mut rng);
    let h1 = random_pd(4, &mut rng);
    let g = geodesic_through(&h0, &h1).unwrap();
    let p = g.base_factor();
    assert!((p - p.adjoint()).norm() < 1e-12);
    assert!(g.start().relative_error(&h0) < 1e-10);
    assert!(g.eval(1.0).relative_error(&h1) < 1e-10);
    let again = g.direction().eigenvalues();
    for (a, b) in again.iter().zip(g.eigenvalues()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn non_positive_inputs_are_errors() {
    assert!(PosDefMetric::from_diagonal(&[1.0, 0.0]).is_err());
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(1.0, 0.0),
        ],
    );
    assert!(PosDefMetric::new(m).is_err());
    let v = HermitianMatrix::identity(3);
    assert!(metric_inner(&PosDefMetric::identity(2), &v, &v).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn congruence_invariance(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h0 = random_pd(n, &mut rng);
        let h1 = random_pd(n, &mut rng);
        let q = random_gaussian_matrix(n, &mut rng) + CMatrix::identity(n, n) * C64::new(2.0, 0.0);
        let d = hat_distance(&h0, &h1).unwrap();
        let moved = hat_distance(&h0.congruence(&q).unwrap(), &h1.congruence(&q).unwrap()).unwrap();
        prop_assert!((d - moved).abs() <= 1e-9, "{d} vs {moved}");
    }

    #[test]
    fn geodesic_additivity(seed in any::<u64>(), n in 1usize..6, s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h0 = random_pd(n, &mut rng);
        // Spectral radius 1/2 keeps `γ(s)^{-1} γ(t)` well conditioned on [−5, 5].
        let a = random_direction(n, &mut rng);
        let r = a.eigenvalues().iter().fold(1e-12f64, |m, l| m.max(l.abs()));
        let a = HermitianMatrix::new(a.as_matrix() * C64::new(0.5 / r, 0.0)).unwrap();
        let p = h0.as_matrix().clone().cholesky().unwrap().l();
        let g = MatrixGeodesic::new(p, a).unwrap();
        let d = hat_distance(&geodesic_eval(&g, s), &geodesic_eval(&g, t)).unwrap();
        let want = geodesic_speed(&g) * (t - s).abs();
        prop_assert!((d - want).abs() <= 1e-9 * (1.0 + want), "{d} vs {want}");
    }

    #[test]
    fn metric_inner_is_positive(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_pd(n, &mut rng);
        let v = random_direction(n, &mut rng);
        let w = random_direction(n, &mut rng);
        prop_assert!(metric_inner(&h, &v, &v).unwrap() > 0.0);
        let vw = metric_inner(&h, &v, &w).unwrap();
        let wv = metric_inner(&h, &w, &v).unwrap();
        prop_assert!((vw - wv).abs() <= 1e-10 * (1.0 + vw.abs()));
    }

    #[test]
    fn diagonal_closed_form(mu in prop::collection::vec(0.01f64..100.0, 1..10)) {
        let n = mu.len();
        let h = PosDefMetric::from_diagonal(&mu).unwrap();
        let want = (mu.iter().map(|m| m.ln().powi(2)).sum::<f64>() / n as f64).sqrt();
        prop_assert!((hat_distance(&PosDefMetric::identity(n), &h).unwrap() - want).abs() <= 1e-12);
    }
}
