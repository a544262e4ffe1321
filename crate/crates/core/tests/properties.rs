use num_complex::Complex64;
use proptest::prelude::*;
use zerostab_core::ivp::presets;
use zerostab_core::propagation::impulse_gaps;
use zerostab_core::{
    find_roots, in_stability_region, integrate, make_scheme, zerosnet_coeffs, Polynomial, Scheme, ZeroSLambda,
    DEFAULT_CONSISTENCY_TOL, DEFAULT_STABILITY_TOL,
};

fn lambda_away_from_boundaries() -> impl Strategy<Value = f64> {
    (-50.0..50.0f64).prop_filter("away from 0, -1 and 1/3", |l| {
        [0.0, -1.0, 1.0 / 3.0].iter().all(|s| (l - s).abs() > 1e-3)
    })
}

/// `C^n e_0` by explicit matrix products of the companion matrix.
fn companion_power_column(s: &Scheme, n: usize) -> Vec<f64> {
    let d = s.order();
    let mut c = vec![vec![0.0; d]; d];
    c[0].copy_from_slice(s.alphas());
    for i in 1..d {
        c[i][i - 1] = 1.0;
    }
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    for _ in 0..n {
        v = (0..d).map(|i| (0..d).map(|j| c[i][j] * v[j]).sum()).collect();
    }
    v
}

proptest! {
    #[test]
    fn family_members_are_consistent(l in lambda_away_from_boundaries()) {
        let c = zerosnet_coeffs(ZeroSLambda::new(l).unwrap()).consistency(DEFAULT_CONSISTENCY_TOL);
        prop_assert!(c.consistent, "{c:?}");
    }

    #[test]
    fn region_test_matches_numeric_roots(l in lambda_away_from_boundaries()) {
        let lam = ZeroSLambda::new(l).unwrap();
        let report = zerosnet_coeffs(lam).root_condition(DEFAULT_STABILITY_TOL).unwrap();
        prop_assert_eq!(report.zero_stable, in_stability_region(lam));
    }

    #[test]
    fn roots_are_recovered_from_their_product(
        re in prop::collection::vec(-2.0..2.0f64, 1..6),
        spread in 0.05..0.5f64,
    ) {
        // distinct roots: perturb each by its index
        let roots: Vec<Complex64> = re
            .iter()
            .enumerate()
            .map(|(i, r)| Complex64::new(r + spread * i as f64, 0.3 * i as f64))
            .collect();
        let p = Polynomial::from_roots(&roots);
        let found = find_roots(&p, 1e-10).unwrap().expanded();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let nearest = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-7, "root {r} nearest {nearest}");
        }
    }

    #[test]
    fn impulse_window_follows_companion_powers(
        alphas in prop::collection::vec(-1.5..1.5f64, 1..5),
        n in 0usize..40,
    ) {
        let s = make_scheme(&alphas, 1.0).unwrap();
        let d = s.order();
        let gaps = impulse_gaps(&s, n);
        let v = companion_power_column(&s, n);
        let expected = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        prop_assert!((gaps[n] - expected).abs() <= 1e-9 * expected.max(1.0), "{} vs {expected} (d = {d})", gaps[n]);
    }

    #[test]
    fn zero_stable_members_keep_constants(l in lambda_away_from_boundaries(), c in -5.0..5.0f64) {
        let lam = ZeroSLambda::new(l).unwrap();
        prop_assume!(in_stability_region(lam));
        let s = zerosnet_coeffs(lam);
        let p = presets::constant(vec![c]).unwrap();
        let traj = integrate(&s, &p, 0.05, 17).unwrap();
        for y in &traj.states {
            prop_assert!((y[0] - c).abs() <= 1e-10 * c.abs().max(1.0), "{} vs {c}", y[0]);
        }
    }
}

#[test]
fn spectral_radius_matches_the_dominant_root() {
    for alphas in [[1.0, 1.0, 1.0], [3.75, -4.0, 1.25], [-3.0, 5.0, -1.0], [-0.75, 2.0, -0.25]] {
        let s = make_scheme(&alphas, 1.0).unwrap();
        let est = s.companion_spectral_radius(400);
        let dominant = s.root_condition(DEFAULT_STABILITY_TOL).unwrap().dominant_modulus();
        assert!((est.radius - dominant).abs() < 1e-6 * dominant, "{alphas:?}: {} vs {dominant}", est.radius);
    }
}
