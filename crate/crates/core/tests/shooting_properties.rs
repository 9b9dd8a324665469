use nodal_radial::shooting::{solve_shooting, tail_state, ShootingInput, ShootingResult};
use nodal_radial::specfun::{radial_eigenvalue, DimensionParams};
use proptest::prelude::*;

fn solve(n: u32, gamma: f64) -> ShootingResult {
    solve_shooting(&ShootingInput::new(DimensionParams::new(n).unwrap(), gamma)).unwrap()
}

/// Largest `|y(t)| / (|y'(T)| (T - t))` over 200 points below each zero.
fn worst_zero_bound(r: &ShootingResult) -> f64 {
    let t_min = r.trajectory.t_min();
    let mut worst: f64 = 0.0;
    for (&z, &s) in r.zeros.iter().zip(&r.slopes) {
        for i in 1..=200 {
            let t = t_min + (z - t_min) * i as f64 / 201.0;
            let (y, _) = r.evaluate(t).unwrap();
            worst = worst.max(y.abs() / (s.abs() * (z - t)));
        }
    }
    worst
}

#[test]
fn zero_bound_holds_strictly() {
    for n in 3..=6 {
        for gamma in [1e-3, 0.5, 1.0, 10.0, 1e3, 1e4] {
            let w = worst_zero_bound(&solve(n, gamma));
            assert!(w < 1.0, "N={n} gamma={gamma}: ratio {w}");
        }
    }
}

#[test]
fn five_dimensional_slope_law() {
    let r = solve(5, 1e4);
    let k: f64 = 8.0 / 3.0;
    let target = (k - 1.0).powf(1.0 / (k - 2.0));
    let got = 1e4 * r.slopes[0];
    assert!((got / target - 1.0).abs() < 0.02, "{got} vs {target}");
}

#[test]
fn three_dimensional_first_zero_is_bounded() {
    let t1: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&g| solve(3, g).zeros[0]).collect();
    let (lo, hi) = t1.iter().fold((f64::MAX, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    assert!(lo > 0.6 && hi < 0.7, "{t1:?}");
}

#[test]
fn half_gamma_in_six_dimensions_lies_below_first_eigenvalue() {
    let d = DimensionParams::new(6).unwrap();
    let r = solve(6, 0.5);
    let lam = 16.0 * r.zeros[0].powf(-0.5);
    assert!(lam > 0.0 && lam < radial_eigenvalue(&d, 1).unwrap(), "{lam}");
}

#[test]
fn refined_events_are_tight() {
    for n in 3..=6 {
        for gamma in [0.1, 100.0] {
            let r = solve(n, gamma);
            let max_slope = r.slopes.iter().fold(0.0f64, |a, s| a.max(s.abs()));
            for &z in &r.zeros {
                assert!(r.evaluate(z).unwrap().0.abs() <= 1e-10 * gamma);
            }
            assert!(r.evaluate(r.t0).unwrap().1.abs() <= 1e-10 * max_slope);
        }
    }
}

#[test]
fn negative_and_zero_gamma_are_rejected() {
    let d = DimensionParams::new(4).unwrap();
    for g in [0.0, -1.0, f64::NAN] {
        assert!(solve_shooting(&ShootingInput::new(d, g)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn structure_and_terminal_consistency(n in 3u32..=6, lg in -3.0f64..4.0) {
        let gamma = 10f64.powf(lg);
        let d = DimensionParams::new(n).unwrap();
        let r = solve(n, gamma);
        prop_assert!(r.structural_violations().is_empty(), "{:?}", r.structural_violations());
        let (y, yp) = tail_state(&d, gamma, r.t_start);
        prop_assert!(y > 0.0 && y < gamma);
        prop_assert!(yp > 0.0);
        prop_assert!(r.zeros.len() >= 3);
        prop_assert!(r.zeros[1] < r.t0 && r.t0 < r.zeros[0]);
        prop_assert!(r.y0 < 0.0);
    }

    #[test]
    fn reruns_are_bit_identical(n in 3u32..=6, lg in -2.0f64..4.0) {
        let gamma = 10f64.powf(lg);
        prop_assert_eq!(solve(n, gamma), solve(n, gamma));
    }

    #[test]
    fn zero_bound_at_random_gamma(n in 3u32..=6, lg in -3.0f64..4.0) {
        let w = worst_zero_bound(&solve(n, 10f64.powf(lg)));
        prop_assert!(w < 1.0, "ratio {}", w);
    }
}
