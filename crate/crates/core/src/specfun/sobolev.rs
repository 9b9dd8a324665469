use std::f64::consts::PI;

use serde::Serialize;

use super::{gamma_fn, DimensionParams};
use crate::error::{Error, Result};

/// Best constant `S` of the Sobolev embedding `D^{1,2}(R^N) -> L^{2*}(R^N)`:
/// `S = pi N (N-2) (Gamma(N/2) / Gamma(N))^(2/N)`.
pub fn sobolev_constant(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("Sobolev constant needs N >= 3, got {n}")));
    }
    let nf = f64::from(n);
    let ratio = gamma_fn(nf / 2.0)? / gamma_fn(nf)?;
    Ok(PI * nf * (nf - 2.0) * ratio.powf(2.0 / nf))
}

/// Energy level `S^(N/2) / N` of one bubble.
pub fn bubble_energy(n: u32) -> Result<f64> {
    let nf = f64::from(n);
    Ok(sobolev_constant(n)?.powf(nf / 2.0) / nf)
}

/// Radial bubble `U_{0,mu}(x) = [N(N-2) mu^2]^((N-2)/4) / [mu^2 + |x|^2]^((N-2)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleSpec {
    pub n: u32,
    pub mu: f64,
}

impl BubbleSpec {
    pub fn new(n: u32, mu: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("bubble needs N >= 3, got {n}")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!("bubble concentration must be > 0, got {mu}")));
        }
        Ok(Self { n, mu })
    }

    /// The bubble with `U(0) = 1`, `mu = sqrt(N(N-2))`.
    pub fn unit(dim: &DimensionParams) -> Self {
        Self {
            n: dim.n,
            mu: (dim.nf() * dim.m()).sqrt(),
        }
    }

    pub fn eval(&self, radius: f64) -> f64 {
        let nf = f64::from(self.n);
        let m = nf - 2.0;
        let mu2 = self.mu * self.mu;
        (nf * m * mu2).powf(m / 4.0) / (mu2 + radius * radius).powf(m / 2.0)
    }

    /// Radial derivative `dU/dr`.
    pub fn derivative(&self, radius: f64) -> f64 {
        let nf = f64::from(self.n);
        let m = nf - 2.0;
        let mu2 = self.mu * self.mu;
        -m * radius * self.eval(radius) / (mu2 + radius * radius)
    }
}

/// Convenience wrapper for [`BubbleSpec::eval`].
pub fn bubble_eval(spec: &BubbleSpec, radius: f64) -> f64 {
    spec.eval(radius)
}
