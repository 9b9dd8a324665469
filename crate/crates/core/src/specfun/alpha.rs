use super::bessel::{self, bessel_j_normalised};
use super::DimensionParams;
use crate::error::{Error, Result};

/// Bessel argument `2 nu t^(-1/(2 nu))` at which `alpha(t)` samples `J_nu`.
#[inline]
fn bessel_argument(dim: &DimensionParams, t: f64) -> f64 {
    2.0 * dim.nu * t.powf(-1.0 / (2.0 * dim.nu))
}

#[inline]
fn t_of_argument(dim: &DimensionParams, s: f64) -> f64 {
    (2.0 * dim.nu / s).powf(2.0 * dim.nu)
}

/// Solution of the linear problem `a'' + t^(-k) a = 0`, `a(t) -> 1` as `t -> inf`:
/// `alpha(t) = A_nu sqrt(t) J_nu(2 nu t^(-1/(2 nu)))`, `A_nu = nu^(-nu) Gamma(nu+1)`.
///
/// Evaluated through the normalised Bessel function, since
/// `A_nu sqrt(t) (s/2)^nu = Gamma(nu+1)` exactly.
pub fn alpha_fn(dim: &DimensionParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("alpha needs t > 0, got {t}")));
    }
    bessel_j_normalised(dim.nu, bessel_argument(dim, t))
}

/// n-th zero of `alpha`, counted from the largest (`tau_1 > tau_2 > ...`).
///
/// The zeros are bracketed on a logarithmic grid in `t` and refined by
/// bisection.
pub fn alpha_zero(dim: &DimensionParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("alpha zero index starts at 1"));
    }
    let nu = dim.nu;
    // j_{nu,1} > nu and j_{nu,n} < (n + nu/2 + 1) pi for the orders in use
    let s_lo = nu.max(1.0) * 0.5;
    let s_hi = ((n as f64 + nu / 2.0 + 1.0) * std::f64::consts::PI).min(bessel::MAX_ARGUMENT);
    let t_hi = t_of_argument(dim, s_lo);
    let t_lo = t_of_argument(dim, s_hi);
    let samples = 200 * n + 200;
    let log_hi = t_hi.ln();
    let log_lo = t_lo.ln();
    let at = |i: usize| (log_hi + (log_lo - log_hi) * i as f64 / samples as f64).exp();

    let mut t_prev = at(0);
    let mut a_prev = alpha_fn(dim, t_prev)?;
    let mut found = 0;
    for i in 1..=samples {
        let t = at(i);
        let a = alpha_fn(dim, t)?;
        if a_prev * a < 0.0 {
            found += 1;
            if found == n {
                let g = |log_t: f64| alpha_fn(dim, log_t.exp()).expect("bracket inside range");
                let log_root = bessel::bisect(g, t.ln(), t_prev.ln(), 1e-16)?;
                return Ok(log_root.exp());
            }
        }
        t_prev = t;
        a_prev = a;
    }
    Err(Error::numeric(
        "alpha_zero",
        format!(
            "bracketing failed: {found} sign changes of alpha on [{t_lo:.6e}, {t_hi:.6e}] \
             (N = {}, {samples} samples), wanted zero #{n}",
            dim.n
        ),
    ))
}

/// n-th radial Dirichlet eigenvalue of `-Laplace` on the unit ball of `R^N`,
/// `lambda_n(B_1) = (N-2)^2 tau_n^(-2/(N-2))`.
pub fn radial_eigenvalue(dim: &DimensionParams, n: usize) -> Result<f64> {
    Ok(dim.lambda_from_zero(alpha_zero(dim, n)?))
}

/// Radial eigenfunction `phi_n(r) = alpha(tau_n r^(-(N-2)))`, normalised to 1 at the origin.
pub fn radial_eigenfunction(dim: &DimensionParams, tau_n: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(1.0);
    }
    alpha_fn(dim, tau_n * r.powf(-dim.m()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dim(n: u32) -> DimensionParams {
        DimensionParams::new(n).unwrap()
    }

    #[test]
    fn three_dimensional_closed_form() {
        // nu = 1/2: alpha(t) = t sin(1/t)
        let d = dim(3);
        assert!((alpha_fn(&d, 10.0).unwrap() - 10.0 * (0.1f64).sin()).abs() < 1e-14);
        assert!((alpha_fn(&d, 10.0).unwrap() - 0.998_334_166_468_281_5).abs() < 1e-14);
        assert!(alpha_fn(&d, 1.0 / PI).unwrap().abs() < 1e-10);
        for t in [0.05, 0.2, 0.7, 3.0, 1e3] {
            assert!((alpha_fn(&d, t).unwrap() - t * (1.0 / t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn tends_to_one() {
        for n in [3, 4] {
            assert!((alpha_fn(&dim(n), 1e8).unwrap() - 1.0).abs() < 1e-6);
        }
        // alpha(t) = 1 - nu^2 t^(-1/nu) / (nu + 1) + O(t^(-2/nu))
        for n in 3..=7 {
            let d = dim(n);
            for t in [1e6, 1e8, 1e12] {
                let lead = d.nu * d.nu * f64::powf(t, -1.0 / d.nu) / (d.nu + 1.0);
                let rest = alpha_fn(&d, t).unwrap() - 1.0 + lead;
                assert!(rest.abs() <= lead * lead + 1e-15, "N = {n}, t = {t}: {rest}");
            }
        }
    }

    #[test]
    fn zeros_in_three_dimensions() {
        let d = dim(3);
        let t1 = alpha_zero(&d, 1).unwrap();
        let t2 = alpha_zero(&d, 2).unwrap();
        assert!((t1 - 1.0 / PI).abs() < 1e-10 / PI);
        assert!((t2 - 1.0 / (2.0 * PI)).abs() < 1e-10 / (2.0 * PI));
    }

    #[test]
    fn zeros_decrease() {
        for n in 3..=7 {
            let d = dim(n);
            let z: Vec<f64> = (1..=3).map(|i| alpha_zero(&d, i).unwrap()).collect();
            assert!(z[0] > z[1] && z[1] > z[2], "N = {n}: {z:?}");
        }
    }

    #[test]
    fn eigenvalues() {
        let d3 = dim(3);
        assert!((radial_eigenvalue(&d3, 1).unwrap() - PI * PI).abs() < 1e-8 * PI * PI);
        assert!((radial_eigenvalue(&d3, 2).unwrap() - 4.0 * PI * PI).abs() < 4e-8 * PI * PI);
        let j11: f64 = 3.831_705_970_207_512_3;
        assert!((radial_eigenvalue(&dim(4), 1).unwrap() - j11 * j11).abs() < 1e-8 * j11 * j11);
        // 4 / tau_1 = j_{1,1}^2 in four dimensions
        let tau = alpha_zero(&dim(4), 1).unwrap();
        assert!((4.0 / tau - 14.681_970_642_123_9).abs() < 1e-7);
    }

    #[test]
    fn zero_index_validated() {
        assert!(alpha_zero(&dim(4), 0).is_err());
        assert!(alpha_fn(&dim(4), 0.0).is_err());
    }
}
