//! Radial PDE profiles reconstructed from Emden-Fowler orbits.
//!
//! With `lambda = (N-2)^2 T_n^(-2/(N-2))` and `L = lambda^((N-2)/4)`,
//! `u(r) = L y(T_n r^(-(N-2)))` solves
//! `u'' + (N-1)/r u' + lambda u + |u|^(2*-2) u = 0` on the unit ball with
//! `u(1) = 0` and `n` nodal regions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shooting::{tail_state, ShootingResult, Trajectory};
use crate::specfun::DimensionParams;

/// Default number of mesh radii.
pub const DEFAULT_MESH: usize = 2000;

/// `lambda_n(gamma) = (N-2)^2 T_n^(-2/(N-2))`.
pub fn lambda_n_of_gamma(dim: &DimensionParams, result: &ShootingResult, n: usize) -> Result<f64> {
    Ok(dim.lambda_from_zero(result.zero(n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub u: f64,
    pub u_prime: f64,
}

/// Evaluates `u` and `u'` through the change of variables.
#[derive(Debug, Clone)]
struct Mapping {
    dim: DimensionParams,
    gamma: f64,
    scale: f64,
    amplitude: f64,
    t_start: f64,
    trajectory: Arc<Trajectory>,
}

impl Mapping {
    fn eval(&self, r: f64) -> (f64, f64) {
        let m = self.dim.m();
        if r <= 0.0 {
            return (self.amplitude * self.gamma, 0.0);
        }
        let t = self.scale * r.powf(-m);
        let (y, yp) = if t >= self.t_start {
            tail_state(&self.dim, self.gamma, t)
        } else {
            self.trajectory
                .evaluate(t.clamp(self.trajectory.t_min(), self.trajectory.t_start()))
                .expect("t clamped into the trajectory range")
        };
        let du = -self.amplitude * m * self.scale * r.powf(-(m + 1.0)) * yp;
        (self.amplitude * y, du)
    }
}

/// Radial solution `u_lambda` on `(0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub dim: DimensionParams,
    pub gamma: f64,
    pub n_nodal: usize,
    pub lambda: f64,
    /// `T_n`, the zero sent to `r = 1`.
    pub scale: f64,
    /// `lambda^((N-2)/4)`.
    pub amplitude: f64,
    /// Smallest sampled radius, the image of `t_start`.
    pub r_eps: f64,
    pub samples: Vec<ProfileSample>,
    pub r_node: Option<f64>,
    pub s_min: Option<f64>,
    pub m_plus: f64,
    pub m_minus: f64,
    /// Zeros `T_1 > ... > T_n` of the orbit.
    pub zeros: Vec<f64>,
    pub t0: Option<f64>,
    #[serde(skip)]
    map: Mapping,
}

impl RadialProfile {
    /// `(u(r), u'(r))`; radii below `r_eps` use the terminal asymptotics.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(format!("radius {r} outside [0, 1]")));
        }
        Ok(self.map.eval(r))
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.map.trajectory
    }

    pub(crate) fn t_start(&self) -> f64 {
        self.map.t_start
    }

    /// Radius corresponding to the orbit time `t`.
    pub fn radius_of(&self, t: f64) -> f64 {
        (self.scale / t).powf(1.0 / self.dim.m())
    }
}

/// Mesh on `[r_eps, 1]`: log grading down to a fraction of the core radius,
/// a uniform part and a refinement band around `[0.9, 1.1] r_node` with
/// smooth edges.
fn mesh(r_eps: f64, core: f64, node: Option<f64>, size: usize) -> Vec<f64> {
    let rc = 0.1 * core;
    let span = 1.0 - r_eps;
    let log_mass = ((1.0 + rc) / (r_eps + rc)).ln();
    // weights: 65% log-graded, 20% uniform, 15% node band
    let a = 0.65 / log_mass;
    let b = if node.is_some() { 0.2 } else { 0.35 } / span;
    // band density c (tanh((r - lo)/w) - tanh((r - hi)/w)) / 2 and its primitive
    let band = node.map(|rn| (0.9 * rn, 1.1 * rn, 0.05 * rn));
    let lncosh = |v: f64| v.abs() + (-2.0 * v.abs()).exp().ln_1p() - std::f64::consts::LN_2;
    let band_cdf = |r: f64| {
        band.map_or(0.0, |(lo, hi, w)| {
            0.5 * w * (lncosh((r - lo) / w) - lncosh((r - hi) / w))
        })
    };
    let c = band.map_or(0.0, |_| 0.15 / (band_cdf(1.0) - band_cdf(r_eps)));
    let cdf = |r: f64| {
        a * ((r + rc) / (r_eps + rc)).ln() + b * (r - r_eps) + c * (band_cdf(r) - band_cdf(r_eps))
    };
    let total = cdf(1.0);
    let mut out = Vec::with_capacity(size);
    out.push(r_eps);
    let mut lo = r_eps;
    for i in 1..size - 1 {
        let target = total * i as f64 / (size - 1) as f64;
        let (mut l, mut h) = (lo, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (l + h);
            if cdf(mid) < target {
                l = mid;
            } else {
                h = mid;
            }
            if h - l <= 4.0 * f64::EPSILON * h {
                break;
            }
        }
        lo = 0.5 * (l + h);
        out.push(lo);
    }
    out.push(1.0);
    out
}

/// Builds `u_lambda` with `n_nodal` nodal regions from a shooting orbit.
pub fn build_radial_profile(
    dim: &DimensionParams,
    result: &ShootingResult,
    n_nodal: usize,
) -> Result<RadialProfile> {
    build_radial_profile_with_mesh(dim, result, n_nodal, DEFAULT_MESH)
}

pub fn build_radial_profile_with_mesh(
    dim: &DimensionParams,
    result: &ShootingResult,
    n_nodal: usize,
    mesh_size: usize,
) -> Result<RadialProfile> {
    if !(1..=2).contains(&n_nodal) {
        return Err(Error::domain(format!(
            "profiles with {n_nodal} nodal regions are not supported (1 or 2)"
        )));
    }
    if mesh_size < 3 {
        return Err(Error::domain(format!("mesh needs at least 3 radii, got {mesh_size}")));
    }
    let m = dim.m();
    let scale = result.zero(n_nodal)?;
    let lambda = dim.lambda_from_zero(scale);
    let amplitude = dim.amplitude(lambda);
    let m_plus = amplitude * result.input.gamma;
    let map = Mapping {
        dim: *dim,
        gamma: result.input.gamma,
        scale,
        amplitude,
        t_start: result.t_start,
        trajectory: Arc::new(result.trajectory.clone()),
    };
    let r_eps = (scale / result.t_start).powf(1.0 / m);
    let (r_node, s_min, m_minus, t0) = if n_nodal == 2 {
        let t1 = result.zero(1)?;
        (
            Some((scale / t1).powf(1.0 / m)),
            Some((scale / result.t0).powf(1.0 / m)),
            amplitude * result.y0.abs(),
            Some(result.t0),
        )
    } else {
        (None, None, 0.0, None)
    };
    let core = m_plus.powf(-dim.beta);
    let samples = mesh(r_eps, core, r_node, mesh_size)
        .into_iter()
        .map(|r| {
            let (u, u_prime) = map.eval(r);
            ProfileSample { r, u, u_prime }
        })
        .collect();
    Ok(RadialProfile {
        dim: *dim,
        gamma: result.input.gamma,
        n_nodal,
        lambda,
        scale,
        amplitude,
        r_eps,
        samples,
        r_node,
        s_min,
        m_plus,
        m_minus,
        zeros: result.zeros[..n_nodal].to_vec(),
        t0,
        map,
    })
}

/// Positive part blown up at the concentration scale:
/// `u~(rho) = u(rho / M^beta) / M` on `[0, sigma]`, `sigma = M^beta r_node`.
#[derive(Debug, Clone, Serialize)]
pub struct RescaledProfile {
    pub dim: DimensionParams,
    pub sigma: f64,
    /// `M_plus^beta`.
    pub stretch: f64,
    /// Pairs `(rho, u~(rho))`.
    pub samples: Vec<(f64, f64)>,
    #[serde(skip)]
    map: Mapping,
    #[serde(skip)]
    m_plus: f64,
}

impl RescaledProfile {
    /// `(u~(rho), u~'(rho))` for `rho` in `[0, sigma]`.
    pub fn eval(&self, rho: f64) -> Result<(f64, f64)> {
        if !(rho >= 0.0 && rho <= self.sigma) {
            return Err(Error::domain(format!(
                "rho = {rho} outside [0, {}]",
                self.sigma
            )));
        }
        let (u, du) = self.map.eval(rho / self.stretch);
        Ok((u / self.m_plus, du / (self.m_plus * self.stretch)))
    }
}

pub fn rescale_positive_part(profile: &RadialProfile) -> Result<RescaledProfile> {
    let r_node = profile.r_node.ok_or_else(|| {
        Error::domain("rescaling needs a profile with two nodal regions")
    })?;
    if !(profile.m_plus > 0.0) {
        return Err(Error::domain("rescaling needs u(0) > 0"));
    }
    let stretch = profile.m_plus.powf(profile.dim.beta);
    let mut samples = vec![(0.0, 1.0)];
    samples.extend(
        profile
            .samples
            .iter()
            .filter(|s| s.r <= r_node)
            .map(|s| (s.r * stretch, s.u / profile.m_plus)),
    );
    Ok(RescaledProfile {
        dim: profile.dim,
        sigma: stretch * r_node,
        stretch,
        samples,
        map: profile.map.clone(),
        m_plus: profile.m_plus,
    })
}

/// Largest three-point residual of
/// `u'' + (N-1)/r u' + lambda u + |u|^(2*-2) u` over the samples, where `u'`
/// and `u''` are both taken from second-order differences of `u`.
///
/// The residual is divided by `lambda M + M^(2*-1)` with `M = sup |u|`, the
/// size of the reaction term at the maximum.
pub fn ode_residual(profile: &RadialProfile) -> Result<f64> {
    sampled_residual(&profile.dim, profile.lambda, &profile.samples)
}

pub fn sampled_residual(dim: &DimensionParams, lambda: f64, samples: &[ProfileSample]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::domain(format!(
            "residual needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let sup = samples.iter().map(|s| s.u.abs()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let q = dim.two_star - 2.0;
    let norm = lambda.abs() * sup + sup.powf(q + 1.0);
    let mut worst: f64 = 0.0;
    for w in samples.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let h0 = b.r - a.r;
        let h1 = c.r - b.r;
        let d1 = (-h1 / (h0 * (h0 + h1))) * a.u
            + ((h1 - h0) / (h0 * h1)) * b.u
            + (h0 / (h1 * (h0 + h1))) * c.u;
        let d2 = 2.0 * (a.u / (h0 * (h0 + h1)) - b.u / (h0 * h1) + c.u / (h1 * (h0 + h1)));
        let res = d2 + (dim.nf() - 1.0) / b.r * d1 + lambda * b.u + b.u.abs().powf(q) * b.u;
        worst = worst.max(res.abs());
    }
    Ok(worst / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::{solve_shooting, ShootingInput};

    fn profile(n: u32, gamma: f64) -> RadialProfile {
        let d = DimensionParams::new(n).unwrap();
        let r = solve_shooting(&ShootingInput::new(d, gamma)).unwrap();
        build_radial_profile(&d, &r, 2).unwrap()
    }

    #[test]
    fn mesh_is_sorted_and_spans_the_interval() {
        let m = mesh(1e-12, 1e-4, Some(0.3), 2000);
        assert_eq!(m.len(), 2000);
        assert_eq!(m[0], 1e-12);
        assert_eq!(m[1999], 1.0);
        assert!(m.windows(2).all(|w| w[1] > w[0]));
        let band = m.iter().filter(|&&r| (0.27..=0.33).contains(&r)).count();
        assert!(band >= 200, "{band}");
        let ratio = m.windows(3).map(|w| (w[2] - w[1]) / (w[1] - w[0])).fold(1.0f64, |a, q| a.max(q.max(1.0 / q)));
        assert!(ratio < 1.1, "{ratio}");
    }

    #[test]
    fn profile_invariants() {
        for n in 3..=6 {
            let p = profile(n, 100.0);
            let rn = p.r_node.unwrap();
            let sm = p.s_min.unwrap();
            assert!(0.0 < rn && rn < sm && sm < 1.0);
            let last = p.samples.last().unwrap();
            assert!(last.u.abs() <= 1e-8 * p.m_plus);
            for s in &p.samples[..p.samples.len() - 1] {
                if s.r < rn * (1.0 - 1e-9) {
                    assert!(s.u > 0.0);
                } else if s.r > rn * (1.0 + 1e-9) {
                    assert!(s.u < 0.0, "N={n} r={} u={}", s.r, s.u);
                }
            }
            let (u0, _) = p.eval(0.0).unwrap();
            assert_eq!(u0, p.m_plus);
            let (umin, dmin) = p.eval(sm).unwrap();
            assert!((umin.abs() - p.m_minus).abs() <= 1e-12 * p.m_minus);
            assert!(dmin.abs() <= 1e-8 * p.m_plus * p.dim.m());
            let (_, dnode) = p.eval(rn).unwrap();
            assert!(dnode < 0.0);
        }
    }

    #[test]
    fn residual_of_solver_profiles() {
        for n in 3..=6 {
            for gamma in [1.0, 1e2, 1e4] {
                let p = profile(n, gamma);
                let res = ode_residual(&p).unwrap();
                assert!(res <= 1e-4, "N={n} gamma={gamma}: {res}");
            }
        }
    }

    #[test]
    fn residual_detects_scaling() {
        let p = profile(4, 10.0);
        let doubled: Vec<ProfileSample> = p
            .samples
            .iter()
            .map(|s| ProfileSample { u: 2.0 * s.u, u_prime: 2.0 * s.u_prime, ..*s })
            .collect();
        assert!(sampled_residual(&p.dim, p.lambda, &doubled).unwrap() > 1e-2);
        let zero: Vec<ProfileSample> = p
            .samples
            .iter()
            .map(|s| ProfileSample { u: 0.0, u_prime: 0.0, r: s.r })
            .collect();
        assert_eq!(sampled_residual(&p.dim, p.lambda, &zero).unwrap(), 0.0);
        assert!(sampled_residual(&p.dim, p.lambda, &zero[..2]).is_err());
    }

    #[test]
    fn rescaled_positive_part() {
        let p = profile(6, 1e2);
        let s = rescale_positive_part(&p).unwrap();
        assert_eq!(s.eval(0.0).unwrap().0, 1.0);
        assert!(s.eval(s.sigma).unwrap().0.abs() < 1e-9);
        assert!(s.samples.iter().all(|&(_, v)| v > 0.0 && v <= 1.0));
        let one = build_radial_profile(
            &p.dim,
            &solve_shooting(&ShootingInput::new(p.dim, 0.5)).unwrap(),
            1,
        )
        .unwrap();
        assert!(rescale_positive_part(&one).is_err());
        assert!(one.r_node.is_none() && one.m_minus == 0.0);
    }

    #[test]
    fn lambda_index_checked() {
        let d = DimensionParams::new(5).unwrap();
        let r = solve_shooting(&ShootingInput::new(d, 3.0)).unwrap();
        assert!(lambda_n_of_gamma(&d, &r, 4).is_err());
        let l2 = lambda_n_of_gamma(&d, &r, 2).unwrap();
        assert_eq!(l2, 9.0 * r.zeros[1].powf(-2.0 / 3.0));
    }
}
