//! Bessel functions of the first kind for real order `nu >= 0` and real
//! argument `0 <= s <= 60`.
//!
//! Small arguments use the power series. Above [`SERIES_LIMIT`] the
//! alternating series loses too many digits to cancellation, so the value is
//! obtained by Miller's backward recurrence normalised with the Neumann sum
//! `(s/2)^nu = sum_k c_k J_{nu+2k}(s)`.

use super::gamma_fn;
use crate::error::{Error, Result};

/// Largest argument accepted.
pub const MAX_ARGUMENT: f64 = 60.0;
/// Arguments up to this value are evaluated with the power series.
pub const SERIES_LIMIT: f64 = 8.0;
const SERIES_MAX_TERMS: usize = 200;
const SERIES_REL_CUTOFF: f64 = 1e-18;

fn check_args(nu: f64, s: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("Bessel order must be >= 0, got {nu}")));
    }
    if !(s >= 0.0) {
        return Err(Error::domain(format!("Bessel argument must be >= 0, got {s}")));
    }
    if s > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "Bessel argument {s} exceeds supported range [0, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// `sum_j (-1)^j (s/2)^(2j) / (j! (nu+1)_j)`, i.e. `Gamma(nu+1) (2/s)^nu J_nu(s)`.
///
/// Truncated once the next term falls below `1e-18` of the partial sum; the
/// remainder of the alternating tail is bounded by that term.
fn normalised_series(nu: f64, s: f64) -> f64 {
    let q = -(s * s) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..SERIES_MAX_TERMS {
        let jf = j as f64;
        term *= q / (jf * (jf + nu));
        sum += term;
        if term.abs() < SERIES_REL_CUTOFF * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

fn miller(nu: f64, s: f64) -> f64 {
    // start order well above the turning point nu + m ~ s
    let mut top = (2.0 * s).ceil() as usize + 40;
    if top % 2 == 1 {
        top += 1;
    }
    // Gamma(nu + k)/k!, built upward; the normalisation needs it for even
    // offsets m = 2k, so precompute c_k.
    let half = top / 2;
    let mut coeff = Vec::with_capacity(half + 1);
    let g1 = gamma_fn(nu + 1.0).expect("nu + 1 > 0");
    coeff.push(g1);
    let mut ratio = g1; // Gamma(nu+1)/1!
    for k in 1..=half {
        let kf = k as f64;
        if k > 1 {
            ratio *= (nu + kf - 1.0) / kf;
        }
        coeff.push((nu + 2.0 * kf) * ratio);
    }

    let mut f_next = 0.0; // J_{nu+m+1}, unnormalised
    let mut f_cur = 1e-30; // J_{nu+m}
    let mut norm = coeff[half] * f_cur;
    for m in (1..=top).rev() {
        let f_prev = 2.0 * (nu + m as f64) / s * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        let order = m - 1;
        if order % 2 == 0 {
            norm += coeff[order / 2] * f_cur;
        }
        if f_cur.abs() > 1e250 {
            f_cur *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    f_cur * (s / 2.0).powf(nu) / norm
}

/// `J_nu(s)` with absolute error below `1e-12` on `[0, 60]`.
pub fn bessel_j(nu: f64, s: f64) -> Result<f64> {
    check_args(nu, s)?;
    if s == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if s <= SERIES_LIMIT {
        let lead = (s / 2.0).powf(nu) / gamma_fn(nu + 1.0)?;
        Ok(lead * normalised_series(nu, s))
    } else {
        Ok(miller(nu, s))
    }
}

/// `Gamma(nu+1) (2/s)^nu J_nu(s)`, equal to 1 at `s = 0`.
///
/// This is the entire function `0F1(; nu+1; -s^2/4)`; it avoids the
/// `(s/2)^nu` prefactor that under- or overflows when it is cancelled later.
pub fn bessel_j_normalised(nu: f64, s: f64) -> Result<f64> {
    check_args(nu, s)?;
    if s <= SERIES_LIMIT {
        Ok(normalised_series(nu, s))
    } else {
        Ok(gamma_fn(nu + 1.0)? * (2.0 / s).powf(nu) * miller(nu, s))
    }
}

/// n-th positive zero of `J_nu`, by a scan in `s` followed by bisection.
pub fn bessel_j_zero(nu: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("zero index starts at 1"));
    }
    let step = 0.05;
    let mut s_prev = 1e-3;
    let mut v_prev = bessel_j_normalised(nu, s_prev)?;
    let mut found = 0;
    let mut s = s_prev;
    while s < MAX_ARGUMENT {
        s = (s + step).min(MAX_ARGUMENT);
        let v = bessel_j_normalised(nu, s)?;
        if v_prev * v < 0.0 {
            found += 1;
            if found == n {
                return bisect(|x| bessel_j_normalised(nu, x).expect("in range"), s_prev, s, 1e-15);
            }
        }
        s_prev = s;
        v_prev = v;
    }
    Err(Error::numeric(
        "bessel_j_zero",
        format!("only {found} zeros of J_{nu} found below s = {MAX_ARGUMENT}, wanted {n}"),
    ))
}

pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa * fb > 0.0 {
        return Err(Error::numeric(
            "bisection",
            format!("no sign change on [{a}, {b}]: f = ({fa}, {fb})"),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * mid.abs() || mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}
