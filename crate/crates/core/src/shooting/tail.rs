use crate::error::{Error, Result};
use crate::specfun::DimensionParams;

/// Loosest tail tolerance honoured; looser requests are clamped to this.
pub const TAIL_EPS_MAX: f64 = 1e-2;

/// First correction of the terminal condition:
/// `y(t) = gamma - f(gamma) t^(2-k) / ((k-1)(k-2)) + ...`,
/// `y'(t) = f(gamma) t^(1-k) / (k-1) + ...`.
pub fn tail_state(dim: &DimensionParams, gamma: f64, t: f64) -> (f64, f64) {
    let k = dim.k;
    let fg = dim.f(gamma);
    let y = gamma - fg * t.powf(2.0 - k) / ((k - 1.0) * (k - 2.0));
    let yp = fg * t.powf(1.0 - k) / (k - 1.0);
    (y, yp)
}

/// Start of the backward integration: the smallest `t` at which the one-term
/// tail correction is at most `tail_eps * gamma`.
///
/// `tail_eps` above [`TAIL_EPS_MAX`] is treated as `TAIL_EPS_MAX`, which gives
/// the minimal admissible start.
pub fn tail_start(dim: &DimensionParams, gamma: f64, tail_eps: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::config(format!("terminal value must be > 0, got {gamma}")));
    }
    if !(tail_eps > 0.0) {
        return Err(Error::config(format!("tail tolerance must be > 0, got {tail_eps}")));
    }
    let k = dim.k;
    let eps = tail_eps.min(TAIL_EPS_MAX);
    let ratio = dim.f(gamma) / ((k - 1.0) * (k - 2.0) * eps * gamma);
    let t = ratio.powf(1.0 / (k - 2.0));
    if !t.is_finite() || t > 1e250 {
        return Err(Error::config(format!(
            "tail start overflows for N = {}, gamma = {gamma}, tail_eps = {tail_eps} (k - 2 = {})",
            dim.n,
            k - 2.0
        )));
    }
    Ok(t)
}
