use std::f64::consts::PI;

use serde::Serialize;

use super::{fit_power_law, FitModel, FitReport, GammaRun, Settings, SweepRow};
use crate::error::{Error, Result};
use crate::shooting::solve_shooting;
use crate::specfun::{radial_eigenvalue, zero_prefactor_candidates, DimensionParams, PrefactorCandidates};
use crate::transform::{build_radial_profile_with_mesh, RadialProfile};

/// First index of the sweep tail: the upper quarter of the points.
pub fn tail_start_index(len: usize) -> usize {
    len - (len / 4).max(1)
}

fn dim_of(rows: &[SweepRow]) -> Result<DimensionParams> {
    let first = rows
        .first()
        .ok_or_else(|| Error::domain("empty sweep"))?;
    if rows.iter().any(|r| r.n != first.n) {
        return Err(Error::domain("sweep mixes dimensions"));
    }
    DimensionParams::new(first.n)
}

/// Law of the first zero `T_1(gamma)`.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroLawReport {
    pub n: u32,
    /// Power fit for `2 < k < 3`, log fit for `k = 3`, none for `k = 4`.
    pub fit: Option<FitReport>,
    pub expected_exponent: Option<f64>,
    /// `T_1 / (2 ln gamma)` (N = 4) or `T_1 / gamma^(6-2k)` (N >= 5) at the largest gamma.
    pub ratio_at_max: Option<f64>,
    pub t1_min: f64,
    pub t1_max: f64,
    pub prefactor_candidates: Option<PrefactorCandidates>,
    /// Reading of `A(k)` closest to `ratio_at_max` and its relative distance.
    pub closest_parse: Option<(String, f64)>,
}

pub fn zero_law_study(rows: &[SweepRow]) -> Result<ZeroLawReport> {
    let dim = dim_of(rows)?;
    let k = dim.k;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.gamma, r.t1)).collect();
    let last = rows[rows.len() - 1];
    let t1_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let t1_max = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut out = ZeroLawReport {
        n: dim.n,
        fit: None,
        expected_exponent: None,
        ratio_at_max: None,
        t1_min,
        t1_max,
        prefactor_candidates: None,
        closest_parse: None,
    };
    if dim.n == 4 {
        out.fit = Some(fit_power_law(&pts, FitModel::Log)?);
        out.expected_exponent = Some(1.0);
        out.ratio_at_max = Some(last.t1 / (2.0 * last.gamma.ln()));
    } else if k < 3.0 {
        let e = 6.0 - 2.0 * k;
        out.fit = Some(fit_power_law(&pts, FitModel::Power)?);
        out.expected_exponent = Some(e);
        let ratio = last.t1 / last.gamma.powf(e);
        out.ratio_at_max = Some(ratio);
        let c = zero_prefactor_candidates(k)?;
        let ds = (ratio - c.split_quotient).abs() / c.split_quotient;
        let dg = (ratio - c.gamma_of_quotient).abs() / c.gamma_of_quotient;
        out.closest_parse = Some(if dg <= ds {
            ("gamma_of_quotient".to_string(), dg)
        } else {
            ("split_quotient".to_string(), ds)
        });
        out.prefactor_candidates = Some(c);
    }
    Ok(out)
}

/// `gamma y'(T_1)` against `(k-1)^(1/(k-2))`.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeLawReport {
    pub n: u32,
    pub fit: FitReport,
    pub target: f64,
    pub value_at_max: f64,
    pub rel_error: f64,
    pub values: Vec<(f64, f64)>,
}

pub fn slope_law_check(rows: &[SweepRow]) -> Result<SlopeLawReport> {
    let dim = dim_of(rows)?;
    let values: Vec<(f64, f64)> = rows.iter().map(|r| (r.gamma, r.gamma * r.slope1)).collect();
    let fit = fit_power_law(&values, FitModel::Constant)?;
    let target = (dim.k - 1.0).powf(1.0 / (dim.k - 2.0));
    let value_at_max = values[values.len() - 1].1;
    Ok(SlopeLawReport {
        n: dim.n,
        fit,
        target,
        value_at_max,
        rel_error: (value_at_max - target).abs() / target,
        values,
    })
}

/// Last extremum for N = 6: `y_0 -> -1/2`, `t_0 ~ (2 gamma / 9)^(2/3)`.
#[derive(Debug, Clone, Serialize)]
pub struct T0Y0Report {
    pub y0_fit: FitReport,
    pub t0_ratio_fit: FitReport,
    pub y0_at_max: f64,
    pub t0_ratio_at_max: f64,
    /// `|y_0 + 1/2|` non-increasing along the sweep.
    pub y0_gap_nonincreasing: bool,
}

pub fn t0_y0_asymptotics(rows: &[SweepRow]) -> Result<T0Y0Report> {
    let dim = dim_of(rows)?;
    if dim.n != 6 {
        return Err(Error::domain(format!(
            "t0/y0 asymptotics are stated for N = 6, got N = {}",
            dim.n
        )));
    }
    let y0: Vec<(f64, f64)> = rows.iter().map(|r| (r.gamma, r.y0)).collect();
    let t0r: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.gamma, r.t0 / (2.0 * r.gamma / 9.0).powf(2.0 / 3.0)))
        .collect();
    let gaps: Vec<f64> = rows.iter().map(|r| (r.y0 + 0.5).abs()).collect();
    Ok(T0Y0Report {
        y0_fit: fit_power_law(&y0, FitModel::Constant)?,
        t0_ratio_fit: fit_power_law(&t0r, FitModel::Constant)?,
        y0_at_max: y0[y0.len() - 1].1,
        t0_ratio_at_max: t0r[t0r.len() - 1].1,
        y0_gap_nonincreasing: gaps.windows(2).all(|w| w[1] <= w[0]),
    })
}

/// `lambda_0` for N = 6 by two routes.
#[derive(Debug, Clone, Serialize)]
pub struct Lambda0Report {
    /// Route A: `16 T_1(1/2)^(-1/2)`.
    pub lambda0: f64,
    pub t1_half: f64,
    /// Route B: Richardson extrapolation of `lambda_2(gamma)`.
    pub route_b: f64,
    pub route_b_gammas: [f64; 3],
    pub route_b_values: [f64; 3],
    pub rel_gap: f64,
    /// Positive solution with `u_0(0) = lambda_0 / 2`.
    #[serde(skip)]
    pub u0: RadialProfile,
}

/// Terminal values used by route B: a geometric triple at the top of the
/// admissible range, where `lambda_2(gamma)` approaches `lambda_0` monotonically.
pub const ROUTE_B_GAMMAS: [f64; 3] = [1e5, 3e5, 1e6];

pub fn lambda0_six(settings: &Settings, tolerance: f64) -> Result<Lambda0Report> {
    let dim = DimensionParams::new(6)?;
    let half = solve_shooting(&settings.input(dim, 0.5))?;
    let t1_half = half.zeros[0];
    let u0 = build_radial_profile_with_mesh(&dim, &half, 1, settings.mesh)?;
    let lambda0 = u0.lambda;

    let g = ROUTE_B_GAMMAS;
    let vals: Vec<f64> = g
        .iter()
        .map(|&gm| solve_shooting(&settings.input(dim, gm)).map(|r| dim.lambda_from_zero(r.zeros[1])))
        .collect::<Result<_>>()?;
    let (d1, d2) = (vals[1] - vals[0], vals[2] - vals[1]);
    let rho = d1 / d2;
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::numeric(
            "lambda0 route B",
            format!("lambda_2 differences {d1}, {d2} are not geometrically decaying"),
        ));
    }
    let route_b = vals[2] + d2 / (rho - 1.0);
    let rel_gap = (route_b - lambda0).abs() / lambda0;
    let allowed = tolerance.max(0.01);
    if rel_gap > allowed {
        return Err(Error::numeric(
            "lambda0 routes",
            format!("route A {lambda0} and route B {route_b} differ by {rel_gap:.3e} > {allowed}"),
        ));
    }
    Ok(Lambda0Report {
        lambda0,
        t1_half,
        route_b,
        route_b_gammas: g,
        route_b_values: [vals[0], vals[1], vals[2]],
        rel_gap,
        u0,
    })
}

/// Behaviour of the negative part along a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct NegativePartReport {
    pub n: u32,
    pub gammas: Vec<f64>,
    pub m_minus: Vec<f64>,
    /// `M_minus` strictly decreasing on the sweep tail.
    pub tail_decreasing: bool,
    /// `M_minus(gamma_max) / M_minus(gamma_min)`.
    pub last_over_first: f64,
    /// N = 6: `M_minus / (lambda_2 / 2)` per gamma.
    pub half_lambda_ratio: Option<Vec<f64>>,
    /// N = 6: `sup_{r in [0.1, 1]} |u^-(r) - u_0(r)| / sup u_0` per gamma.
    pub u0_deviation: Option<Vec<f64>>,
}

pub fn negative_part_study(runs: &[GammaRun], u0: Option<&RadialProfile>) -> Result<NegativePartReport> {
    if runs.len() < 3 {
        return Err(Error::domain("negative part study needs at least 3 gammas"));
    }
    let n = runs[0].profile.dim.n;
    let gammas: Vec<f64> = runs.iter().map(|r| r.profile.gamma).collect();
    if gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("gammas must be increasing"));
    }
    let m_minus: Vec<f64> = runs.iter().map(|r| r.profile.m_minus).collect();
    let tail = &m_minus[tail_start_index(m_minus.len())..];
    let tail_decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let (half_lambda_ratio, u0_deviation) = if n == 6 {
        let ratios = runs
            .iter()
            .map(|r| r.profile.m_minus / (r.profile.lambda / 2.0))
            .collect();
        let dev = match u0 {
            Some(u0) => {
                let sup = u0.m_plus;
                let mut out = Vec::with_capacity(runs.len());
                for run in runs {
                    let mut worst: f64 = 0.0;
                    for i in 0..=900 {
                        let r = 0.1 + 0.001 * i as f64;
                        let (u, _) = run.profile.eval(r)?;
                        let (v, _) = u0.eval(r)?;
                        worst = worst.max(((-u).max(0.0) - v).abs());
                    }
                    out.push(worst / sup);
                }
                Some(out)
            }
            None => None,
        };
        (Some(ratios), dev)
    } else {
        (None, None)
    };
    Ok(NegativePartReport {
        n,
        last_over_first: m_minus[m_minus.len() - 1] / m_minus[0],
        gammas,
        m_minus,
        tail_decreasing,
        half_lambda_ratio,
        u0_deviation,
    })
}

/// `lambda_2(gamma)` at the end of a sweep against its limit.
#[derive(Debug, Clone, Serialize)]
pub struct Lambda2Limit {
    pub n: u32,
    /// Limit value; `None` for N >= 7 (limit 0).
    pub limit: Option<f64>,
    pub lambda2_at_max: f64,
    pub rel_error: Option<f64>,
    /// Side condition: N = 4 above `lambda_1(B_1)` everywhere, N = 5 below it on
    /// the tail, N >= 7 decreasing with `lambda_2(max) < 0.2 lambda_2(min)`.
    pub side_condition: Option<bool>,
    /// `lambda_2(gamma) < lambda_2(B_1)` at every point.
    pub below_second_eigenvalue: bool,
}

pub fn lambda2_limit_study(rows: &[SweepRow], lambda0: Option<f64>) -> Result<Lambda2Limit> {
    let dim = dim_of(rows)?;
    let lam1 = radial_eigenvalue(&dim, 1)?;
    let lam2 = radial_eigenvalue(&dim, 2)?;
    let values: Vec<f64> = rows.iter().map(|r| r.lambda2).collect();
    let at_max = values[values.len() - 1];
    let tail = &values[tail_start_index(values.len())..];
    let (limit, side) = match dim.n {
        3 => (Some(2.25 * PI * PI), None),
        4 => (Some(lam1), Some(values.iter().all(|&v| v > lam1))),
        5 => (Some(lam1), Some(tail.iter().all(|&v| v < lam1))),
        6 => (lambda0, None),
        _ => (
            None,
            Some(values.windows(2).all(|w| w[1] < w[0]) && at_max < 0.2 * values[0]),
        ),
    };
    Ok(Lambda2Limit {
        n: dim.n,
        limit,
        lambda2_at_max: at_max,
        rel_error: limit.map(|l| (at_max - l).abs() / l),
        side_condition: side,
        below_second_eigenvalue: values.iter().all(|&v| v < lam2),
    })
}
