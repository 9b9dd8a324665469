//! Energies, asymptotic fits and the per-dimension studies.

mod energy;
mod fit;
mod studies;

pub use energy::{energy, EnergyReport};
pub use fit::{fit_power_law, FitModel, FitReport};
pub use studies::{
    lambda0_six, lambda2_limit_study, negative_part_study, slope_law_check, t0_y0_asymptotics,
    tail_start_index, zero_law_study, Lambda0Report, Lambda2Limit, NegativePartReport,
    SlopeLawReport, T0Y0Report, ZeroLawReport,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shooting::{solve_shooting, ShootingInput, ShootingResult};
use crate::specfun::DimensionParams;
use crate::transform::{build_radial_profile_with_mesh, ode_residual, RadialProfile, DEFAULT_MESH};

/// Solver and sampling settings shared by every solve of a study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub rel_tol: f64,
    /// `None` means `1e-12 max(1, gamma)`.
    pub abs_tol: Option<f64>,
    pub tail_eps: f64,
    pub mesh: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: None,
            tail_eps: 1e-10,
            mesh: DEFAULT_MESH,
        }
    }
}

impl Settings {
    pub fn input(&self, dim: DimensionParams, gamma: f64) -> ShootingInput {
        let mut input = ShootingInput::new(dim, gamma)
            .with_rel_tol(self.rel_tol)
            .with_tail_eps(self.tail_eps);
        if let Some(a) = self.abs_tol {
            input = input.with_abs_tol(a);
        }
        input
    }
}

/// `points_per_decade` log-spaced values from `min` to `max`, both included.
pub fn log_grid(min: f64, max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && min.is_finite() && max.is_finite()) {
        return Err(Error::config(format!("invalid gamma range [{min}, {max}]")));
    }
    if points_per_decade == 0 {
        return Err(Error::config("points per decade must be positive"));
    }
    let decades = (max / min).log10();
    let n = ((decades * points_per_decade as f64).round() as usize).max(1);
    if min == max {
        return Ok(vec![min]);
    }
    let (lo, hi) = (min.log10(), max.log10());
    Ok((0..=n)
        .map(|i| match i {
            0 => min,
            i if i == n => max,
            i => 10f64.powf(lo + (hi - lo) * i as f64 / n as f64),
        })
        .collect())
}

/// Everything computed for one terminal value.
#[derive(Debug, Clone)]
pub struct GammaRun {
    pub result: ShootingResult,
    pub profile: RadialProfile,
    pub energy: EnergyReport,
    pub ode_residual: f64,
}

pub fn run_gamma(dim: DimensionParams, gamma: f64, settings: &Settings) -> Result<GammaRun> {
    let result = solve_shooting(&settings.input(dim, gamma))?;
    let profile = build_radial_profile_with_mesh(&dim, &result, 2, settings.mesh)?;
    let energy = energy(&profile)?;
    let ode_residual = ode_residual(&profile)?;
    Ok(GammaRun {
        result,
        profile,
        energy,
        ode_residual,
    })
}

/// One line of a `lambda_2(gamma)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub gamma: f64,
    pub lambda2: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t0: f64,
    pub y0: f64,
    /// `y'(T_1)`
    pub slope1: f64,
    pub r_node: f64,
    pub s_min: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub j_plus: f64,
    pub j_minus: f64,
    pub nehari_plus: f64,
    pub nehari_minus: f64,
    pub ode_residual: f64,
}

impl From<&GammaRun> for SweepRow {
    fn from(run: &GammaRun) -> Self {
        let r = &run.result;
        let p = &run.profile;
        Self {
            n: p.dim.n,
            gamma: p.gamma,
            lambda2: p.lambda,
            t1: r.zeros[0],
            t2: r.zeros[1],
            t3: r.zeros.get(2).copied().unwrap_or(f64::NAN),
            t0: r.t0,
            y0: r.y0,
            slope1: r.slopes[0],
            r_node: p.r_node.unwrap_or(f64::NAN),
            s_min: p.s_min.unwrap_or(f64::NAN),
            m_plus: p.m_plus,
            m_minus: p.m_minus,
            j_plus: run.energy.j_plus,
            j_minus: run.energy.j_minus,
            nehari_plus: run.energy.nehari_residual_plus,
            nehari_minus: run.energy.nehari_residual_minus,
            ode_residual: run.ode_residual,
        }
    }
}

/// Independent solves in parallel; results come back in `gammas` order.
pub fn sweep_runs(dim: DimensionParams, gammas: &[f64], settings: &Settings) -> Result<Vec<GammaRun>> {
    gammas
        .par_iter()
        .map(|&g| run_gamma(dim, g, settings))
        .collect()
}

pub fn sweep(dim: DimensionParams, gammas: &[f64], settings: &Settings) -> Result<Vec<SweepRow>> {
    gammas
        .par_iter()
        .map(|&g| run_gamma(dim, g, settings).map(|r| SweepRow::from(&r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_density() {
        let g = log_grid(1e2, 1e4, 12).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!((g[0], g[24]), (1e2, 1e4));
        assert!((g[12] - 1e3).abs() < 1e-9);
        assert_eq!(log_grid(5.0, 5.0, 3).unwrap(), vec![5.0]);
        assert!(log_grid(-1.0, 5.0, 3).is_err());
        assert!(log_grid(10.0, 5.0, 3).is_err());
    }

    #[test]
    fn sweep_order_is_deterministic() {
        let d = DimensionParams::new(4).unwrap();
        let gammas = log_grid(1.0, 1e2, 3).unwrap();
        let s = Settings::default();
        let a = sweep(d, &gammas, &s).unwrap();
        let b = sweep(d, &gammas, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().zip(&gammas).all(|(r, &g)| r.gamma == g));
    }
}
