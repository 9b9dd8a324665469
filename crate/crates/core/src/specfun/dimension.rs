use serde::Serialize;

use crate::error::{Error, Result};

/// Exponents attached to a space dimension `N >= 3`.
///
/// * `p = (N+2)/(N-2)`: critical power of the nonlinearity.
/// * `two_star = 2N/(N-2)`: critical Sobolev exponent.
/// * `k = 2(N-1)/(N-2)`: exponent of the Emden-Fowler weight `t^(-k)`.
/// * `nu = (N-2)/2 = 1/(k-2)`: Bessel order of the linearised problem.
/// * `beta = 2/(N-2)`: exponent of the concentration rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionParams {
    pub n: u32,
    pub p: f64,
    pub two_star: f64,
    pub k: f64,
    pub nu: f64,
    pub beta: f64,
}

impl DimensionParams {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("dimension must be >= 3, got {n}")));
        }
        let nf = f64::from(n);
        let m = nf - 2.0;
        Ok(Self {
            n,
            p: (nf + 2.0) / m,
            two_star: 2.0 * nf / m,
            k: 2.0 * (nf - 1.0) / m,
            nu: m / 2.0,
            beta: 2.0 / m,
        })
    }

    /// `N` as a float.
    #[inline]
    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// `N - 2`, the exponent of the radial change of variables.
    #[inline]
    pub fn m(&self) -> f64 {
        f64::from(self.n) - 2.0
    }

    /// Nonlinearity `f(y) = y + |y|^(p-1) y`.
    #[inline]
    pub fn f(&self, y: f64) -> f64 {
        y + y.abs().powf(self.p - 1.0) * y
    }

    /// Amplitude factor `lambda^(1/(p-1)) = lambda^((N-2)/4)` linking `u` and `y`.
    #[inline]
    pub fn amplitude(&self, lambda: f64) -> f64 {
        lambda.powf(self.m() / 4.0)
    }

    /// Maps a zero `T` of the Emden-Fowler solution to the parameter
    /// `(N-2)^2 T^(-2/(N-2))` that puts it on the unit sphere.
    #[inline]
    pub fn lambda_from_zero(&self, t: f64) -> f64 {
        let m = self.m();
        m * m * t.powf(-2.0 / m)
    }

    /// Surface area of the unit sphere in `R^N`: `2 pi^(N/2) / Gamma(N/2)`.
    pub fn sphere_area(&self) -> f64 {
        let half = self.nf() / 2.0;
        2.0 * std::f64::consts::PI.powf(half) / super::gamma_fn(half).expect("N/2 > 0")
    }
}
