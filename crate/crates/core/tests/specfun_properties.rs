use nodal_radial::specfun::{
    alpha_fn, alpha_zero, bessel_j_zero, bubble_eval, radial_eigenfunction, radial_eigenvalue,
    sobolev_constant, BubbleSpec,
};
use nodal_radial::DimensionParams;
use proptest::prelude::*;

fn dim(n: u32) -> DimensionParams {
    DimensionParams::new(n).unwrap()
}

/// `|alpha'' + t^-k alpha|` by a sixth-order central difference, scaled by `1 + |alpha|`.
/// The step follows the local wavelength `t^(k/2)`.
fn alpha_residual(d: &DimensionParams, t: f64) -> f64 {
    const C: [f64; 4] = [-49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0];
    let h = 1e-2 * t.min(t.powf(d.k / 2.0));
    let a = |s: f64| alpha_fn(d, s).unwrap();
    let a0 = a(t);
    let mut second = C[0] * a0;
    for (j, c) in C.iter().enumerate().skip(1) {
        let s = j as f64 * h;
        second += c * (a(t + s) + a(t - s));
    }
    second /= h * h;
    (second + t.powf(-d.k) * a0).abs() / (1.0 + a0.abs())
}

#[test]
fn alpha_solves_its_equation_on_a_grid() {
    for n in 3..=6 {
        let d = dim(n);
        let (t1, t2) = (alpha_zero(&d, 1).unwrap(), alpha_zero(&d, 2).unwrap());
        let (lo, hi) = (0.5 * t2, 10.0 * t1);
        for i in 0..=400 {
            let t = lo * (hi / lo).powf(i as f64 / 400.0);
            let res = alpha_residual(&d, t);
            assert!(res <= 1e-6, "N={n} t={t:e} residual {res:e}");
        }
    }
}

#[test]
fn eigenvalues_are_squared_bessel_zeros() {
    for n in 3..=6 {
        let d = dim(n);
        for idx in 1..=2 {
            let j = bessel_j_zero(d.nu, idx).unwrap();
            let lam = radial_eigenvalue(&d, idx).unwrap();
            assert!((lam - j * j).abs() <= 1e-8 * j * j, "N={n} n={idx}: {lam} vs {}", j * j);
        }
    }
}

#[test]
fn second_eigenfunction_residual() {
    for n in 3..=6 {
        let d = dim(n);
        let tau2 = alpha_zero(&d, 2).unwrap();
        let mu2 = radial_eigenvalue(&d, 2).unwrap();
        let phi = |r: f64| radial_eigenfunction(&d, tau2, r).unwrap();
        let h = 1e-4;
        let radii: Vec<f64> = (1..=199).map(|i| 0.05 + 0.9 * i as f64 / 200.0).collect();
        let sup = radii.iter().map(|&r| phi(r).abs()).fold(1.0f64, f64::max);
        for &r in &radii {
            let (pm, p0, pp) = (phi(r - h), phi(r), phi(r + h));
            let d2 = (pp - 2.0 * p0 + pm) / (h * h);
            let d1 = (pp - pm) / (2.0 * h);
            let res = (d2 + (d.nf() - 1.0) / r * d1 + mu2 * p0).abs();
            assert!(res <= 1e-5 * sup, "N={n} r={r}: {res:e}");
        }
        assert!(phi(1.0).abs() < 1e-9);
    }
}

#[test]
fn sobolev_constants() {
    let pi = std::f64::consts::PI;
    assert!((sobolev_constant(4).unwrap() - 8.0 * pi / 6f64.sqrt()).abs() < 1e-10);
    assert!((sobolev_constant(3).unwrap() - 5.4779).abs() < 1e-4);
    let s6 = 24.0 * pi * (1.0f64 / 60.0).powf(1.0 / 3.0);
    assert!((sobolev_constant(6).unwrap() - s6).abs() < 1e-10);
}

proptest! {
    #[test]
    fn alpha_residual_at_random_points(n in 3u32..=6, u in 0.0f64..1.0) {
        let d = dim(n);
        let lo = 0.5 * alpha_zero(&d, 2).unwrap();
        let hi = 10.0 * alpha_zero(&d, 1).unwrap();
        let t = lo * (hi / lo).powf(u);
        prop_assert!(alpha_residual(&d, t) <= 1e-6);
    }

    #[test]
    fn bubble_is_positive_decreasing_and_capped(n in 3u32..=8, mu in 0.05f64..20.0, r in 0.0f64..50.0, dr in 1e-3f64..5.0) {
        let b = BubbleSpec::new(n, mu).unwrap();
        let (v0, v1, v2) = (bubble_eval(&b, 0.0), bubble_eval(&b, r), bubble_eval(&b, r + dr));
        prop_assert!(v2 > 0.0);
        prop_assert!(v2 < v1);
        prop_assert!(v1 <= v0);
    }

    #[test]
    fn alpha_zeros_decrease(n in 3u32..=7) {
        let d = dim(n);
        let z: Vec<f64> = (1..=4).map(|i| alpha_zero(&d, i).unwrap()).collect();
        prop_assert!(z.windows(2).all(|w| w[1] < w[0]));
    }
}
