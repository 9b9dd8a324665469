//! Acceptance gates: each gate bundles a few numeric checks and passes only
//! when every required check passes.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    lambda0_six, lambda2_limit_study, log_grid, negative_part_study, run_gamma, slope_law_check,
    sweep_runs, t0_y0_asymptotics, zero_law_study, GammaRun, Lambda0Report, Settings, SweepRow,
};
use crate::error::Result;
use crate::quadrature::radial_norms;
use crate::shooting::{solve_shooting, ShootingResult};
use crate::specfun::{
    bessel_j_zero, bubble_energy, radial_eigenvalue, sobolev_constant, BubbleSpec, DimensionParams,
};
use crate::transform::rescale_positive_part;

/// Tolerances of the gates; defaults are the published acceptance values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eigen_rel: f64,
    pub exponent_abs: f64,
    pub log_ratio_window: (f64, f64),
    pub bounded_factor: f64,
    pub slope_rel: f64,
    pub y0_window: (f64, f64),
    pub t0_window: (f64, f64),
    pub lambda_limit_rel: f64,
    pub lambda0_rel: f64,
    pub small_gamma_rel: f64,
    pub energy_window: (f64, f64),
    pub nehari: f64,
    pub bubble_sup: f64,
    pub node_window: (f64, f64),
    pub node_product_rel: f64,
    pub minus_window: (f64, f64),
    pub u0_sup_rel: f64,
    pub minus_decay: f64,
    pub rescaling_rel: f64,
    pub ode_residual: f64,
    pub halving_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen_rel: 1e-8,
            exponent_abs: 0.05,
            log_ratio_window: (0.9, 1.1),
            bounded_factor: 2.0,
            slope_rel: 0.02,
            y0_window: (-0.51, -0.49),
            t0_window: (0.95, 1.05),
            lambda_limit_rel: 0.02,
            lambda0_rel: 0.01,
            small_gamma_rel: 0.01,
            energy_window: (0.95, 1.05),
            nehari: 1e-4,
            bubble_sup: 0.02,
            node_window: (0.3267, 0.3400),
            node_product_rel: 0.02,
            minus_window: (0.95, 1.05),
            u0_sup_rel: 0.05,
            minus_decay: 0.1,
            rescaling_rel: 1e-6,
            ode_residual: 1e-4,
            halving_factor: 10.0,
        }
    }
}

/// One numeric check inside a gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub observed: String,
    pub passed: bool,
    /// Optional checks are reported but do not decide the gate.
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl GateOutcome {
    fn new(id: u32, name: &str, checks: Vec<Check>) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: checks.iter().all(|c| c.optional || c.passed),
            checks,
        }
    }

    fn failed(id: u32, name: &str, err: impl std::fmt::Display) -> Self {
        Self::new(id, name, vec![check("evaluation", format!("error: {err}"), false)])
    }

    /// One line: verdict, id, name and the failing checks.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let failing: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                let tag = if c.optional { " (optional)" } else { "" };
                format!("{}{tag}: {}", c.label, c.observed)
            })
            .collect();
        let mut line = format!("{verdict} [{:>2}] {}", self.id, self.name);
        if !failing.is_empty() {
            line.push_str(" | failing: ");
            line.push_str(&failing.join("; "));
        }
        line
    }
}

fn check(label: impl Into<String>, observed: impl Into<String>, passed: bool) -> Check {
    Check {
        label: label.into(),
        observed: observed.into(),
        passed,
        optional: false,
    }
}

fn optional(label: impl Into<String>, observed: impl Into<String>, passed: bool) -> Check {
    Check {
        optional: true,
        ..check(label, observed, passed)
    }
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Gamma at which the asymptotic claims are read off.
pub const GAMMA_LARGE: f64 = 1e4;
/// Lower end of the asymptotic sweeps.
pub const GAMMA_SWEEP_MIN: f64 = 1e2;
/// Sweep density.
pub const POINTS_PER_DECADE: usize = 12;
/// Terminal value of the near-linear regime.
pub const GAMMA_SMALL: f64 = 1e-3;

/// Shared data for all gates, computed once.
pub struct GateContext {
    pub settings: Settings,
    pub tol: Tolerances,
    /// Sweeps over `[1e2, 1e4]` for N = 3..7 (index N - 3).
    pub runs: Vec<Vec<GammaRun>>,
    /// Small-gamma sweeps `[1e-3, 1e0]` for N = 3..6.
    pub small: Vec<Vec<GammaRun>>,
    pub lambda0: Result<Lambda0Report>,
}

impl GateContext {
    pub fn compute(settings: Settings, tol: Tolerances) -> Result<Self> {
        Self::compute_with_density(settings, tol, POINTS_PER_DECADE)
    }

    /// Same as [`GateContext::compute`] with a custom density of the large-gamma sweeps.
    pub fn compute_with_density(settings: Settings, tol: Tolerances, points_per_decade: usize) -> Result<Self> {
        let big = log_grid(GAMMA_SWEEP_MIN, GAMMA_LARGE, points_per_decade)?;
        let small_grid = log_grid(GAMMA_SMALL, 1.0, 4)?;
        let runs = (3..=7u32)
            .into_par_iter()
            .map(|n| sweep_runs(DimensionParams::new(n)?, &big, &settings))
            .collect::<Result<Vec<_>>>()?;
        let small = (3..=6u32)
            .into_par_iter()
            .map(|n| sweep_runs(DimensionParams::new(n)?, &small_grid, &settings))
            .collect::<Result<Vec<_>>>()?;
        let lambda0 = lambda0_six(&settings, tol.lambda0_rel);
        Ok(Self {
            settings,
            tol,
            runs,
            small,
            lambda0,
        })
    }

    pub fn runs(&self, n: u32) -> &[GammaRun] {
        &self.runs[(n - 3) as usize]
    }

    pub fn rows(&self, n: u32) -> Vec<SweepRow> {
        self.runs(n).iter().map(SweepRow::from).collect()
    }

    fn last(&self, n: u32) -> &GammaRun {
        let r = self.runs(n);
        &r[r.len() - 1]
    }

    fn first(&self, n: u32) -> &GammaRun {
        &self.runs(n)[0]
    }

    pub fn evaluate_all(&self) -> Vec<GateOutcome> {
        type Gate = fn(&GateContext) -> Result<GateOutcome>;
        let gates: [(u32, &str, Gate); 12] = [
            (1, "radial eigenvalues against Bessel zeros", gate_eigenvalues),
            (2, "growth laws of the first zero", gate_zero_laws),
            (3, "slope law at the first zero", gate_slope_law),
            (4, "last extremum for N = 6", gate_last_extremum),
            (5, "limits of lambda_2(gamma)", gate_lambda2_limits),
            (6, "lambda_2 below the second Dirichlet eigenvalue", gate_below_second),
            (7, "energy of the positive part", gate_positive_energy),
            (8, "rescaled positive part against the bubble", gate_bubble),
            (9, "node in three dimensions", gate_node_three),
            (10, "negative part for N = 6", gate_negative_six),
            (11, "vanishing negative part for N = 3, 4, 5", gate_negative_vanishes),
            (12, "property suites", gate_properties),
        ];
        gates
            .par_iter()
            .map(|(id, name, g)| match g(self) {
                Ok(mut o) => {
                    o.id = *id;
                    o.name = name.to_string();
                    o
                }
                Err(e) => GateOutcome::failed(*id, name, e),
            })
            .collect()
    }
}

fn gate_eigenvalues(ctx: &GateContext) -> Result<GateOutcome> {
    let tol = ctx.tol.eigen_rel;
    let mut checks = Vec::new();
    for n in 3..=6u32 {
        let d = DimensionParams::new(n)?;
        for i in 1..=2 {
            let lam = radial_eigenvalue(&d, i)?;
            let j = bessel_j_zero(d.nu, i)?;
            let e = rel(lam, j * j);
            checks.push(check(format!("N={n} n={i} vs j^2"), format!("{e:.2e}"), e <= tol));
            if n == 3 {
                let e = rel(lam, (i as f64 * PI).powi(2));
                checks.push(check(format!("N=3 n={i} vs n^2 pi^2"), format!("{e:.2e}"), e <= tol));
            }
        }
    }
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_zero_laws(ctx: &GateContext) -> Result<GateOutcome> {
    let t = &ctx.tol;
    let mut checks = Vec::new();
    for n in 3..=6u32 {
        let z = zero_law_study(&ctx.rows(n))?;
        match n {
            3 => {
                let f = z.t1_max / z.t1_min;
                checks.push(check(
                    "N=3 T1 max/min",
                    format!("{f:.4} (T1 in [{:.6}, {:.6}])", z.t1_min, z.t1_max),
                    f <= t.bounded_factor,
                ));
            }
            4 => {
                let r = z.ratio_at_max.unwrap_or(f64::NAN);
                checks.push(check(
                    "N=4 T1/(2 ln gamma) at 1e4",
                    format!("{r:.4}"),
                    within(r, t.log_ratio_window),
                ));
            }
            _ => {
                let fit = z.fit.expect("power fit for N = 5, 6");
                let want = z.expected_exponent.unwrap_or(f64::NAN);
                let (parse, dist) = z.closest_parse.clone().unwrap_or_default();
                checks.push(check(
                    format!("N={n} exponent vs {want:.4}"),
                    format!(
                        "{:.4} (T1/gamma^e at 1e4 = {:.4}, closest A(k) reading {parse} at {:.1}%)",
                        fit.exponent,
                        z.ratio_at_max.unwrap_or(f64::NAN),
                        100.0 * dist
                    ),
                    (fit.exponent - want).abs() <= t.exponent_abs,
                ));
            }
        }
    }
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_slope_law(ctx: &GateContext) -> Result<GateOutcome> {
    let mut checks = Vec::new();
    for n in 3..=6u32 {
        let s = slope_law_check(&ctx.rows(n))?;
        checks.push(check(
            format!("N={n} gamma y'(T1) vs {:.6}", s.target),
            format!("{:.6} ({:.2}%)", s.value_at_max, 100.0 * s.rel_error),
            s.rel_error <= ctx.tol.slope_rel,
        ));
    }
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_last_extremum(ctx: &GateContext) -> Result<GateOutcome> {
    let r = t0_y0_asymptotics(&ctx.rows(6))?;
    Ok(GateOutcome::new(
        0,
        "",
        vec![
            check("y0(1e4)", format!("{:.6}", r.y0_at_max), within(r.y0_at_max, ctx.tol.y0_window)),
            check(
                "t0(1e4)/(2e4/9)^(2/3)",
                format!("{:.6}", r.t0_ratio_at_max),
                within(r.t0_ratio_at_max, ctx.tol.t0_window),
            ),
        ],
    ))
}

fn gate_lambda2_limits(ctx: &GateContext) -> Result<GateOutcome> {
    let t = &ctx.tol;
    let mut checks = Vec::new();
    for n in 3..=5u32 {
        let l = lambda2_limit_study(&ctx.rows(n), None)?;
        let e = l.rel_error.unwrap_or(f64::NAN);
        checks.push(check(
            format!("N={n} lambda2(1e4) vs {:.6}", l.limit.unwrap_or(f64::NAN)),
            format!("{:.6} ({:.2}%)", l.lambda2_at_max, 100.0 * e),
            e <= t.lambda_limit_rel,
        ));
        if let Some(side) = l.side_condition {
            let label = if n == 4 {
                "N=4 lambda2 > lambda1(B1) at every sweep point"
            } else {
                "N=5 lambda2 < lambda1(B1) on the sweep tail"
            };
            checks.push(check(label, side.to_string(), side));
        }
    }
    match &ctx.lambda0 {
        Ok(l0) => {
            let l2 = ctx.last(6).profile.lambda;
            let e = rel(l2, l0.lambda0);
            checks.push(check(
                format!("N=6 lambda2(1e4) vs lambda0 = {:.6}", l0.lambda0),
                format!("{l2:.6} ({:.2}%)", 100.0 * e),
                e <= t.lambda0_rel,
            ));
        }
        Err(e) => checks.push(check("N=6 lambda0", format!("error: {e}"), false)),
    }
    let l7 = lambda2_limit_study(&ctx.rows(7), None)?;
    let side = l7.side_condition.unwrap_or(false);
    checks.push(optional(
        "N=7 lambda2 decreasing, lambda2(1e4) < 0.2 lambda2(1e2)",
        format!(
            "lambda2(1e2) = {:.4}, lambda2(1e4) = {:.4}",
            ctx.first(7).profile.lambda,
            l7.lambda2_at_max
        ),
        side,
    ));
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_below_second(ctx: &GateContext) -> Result<GateOutcome> {
    let mut checks = Vec::new();
    for n in 3..=6u32 {
        let d = DimensionParams::new(n)?;
        let lam2 = radial_eigenvalue(&d, 2)?;
        let all: Vec<f64> = ctx
            .runs(n)
            .iter()
            .chain(&ctx.small[(n - 3) as usize])
            .map(|r| r.profile.lambda)
            .collect();
        let worst = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        checks.push(check(
            format!("N={n} max lambda2 < lambda2(B1) = {lam2:.6}"),
            format!("{worst:.8}"),
            worst < lam2,
        ));
        let small = ctx.small[(n - 3) as usize][0].profile.lambda;
        let e = rel(small, lam2);
        checks.push(check(
            format!("N={n} lambda2(1e-3) vs lambda2(B1)"),
            format!("{small:.8} ({e:.2e})"),
            e <= ctx.tol.small_gamma_rel,
        ));
    }
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_positive_energy(ctx: &GateContext) -> Result<GateOutcome> {
    let mut checks = Vec::new();
    let mut worst_nehari: f64 = 0.0;
    for n in 3..=6u32 {
        let target = bubble_energy(n)?;
        let q = ctx.last(n).energy.j_plus / target;
        checks.push(check(
            format!("N={n} J(u+)/(S^(N/2)/N) at 1e4"),
            format!("{q:.6}"),
            within(q, ctx.tol.energy_window),
        ));
    }
    for run in ctx.runs.iter().flatten().chain(ctx.small.iter().flatten()) {
        worst_nehari = worst_nehari
            .max(run.energy.nehari_residual_plus)
            .max(run.energy.nehari_residual_minus);
    }
    checks.push(check(
        "largest Nehari residual over all sweeps",
        format!("{worst_nehari:.2e}"),
        worst_nehari <= ctx.tol.nehari,
    ));
    Ok(GateOutcome::new(0, "", checks))
}

fn bubble_deviation(run: &GammaRun) -> Result<f64> {
    let rescaled = rescale_positive_part(&run.profile)?;
    let bubble = BubbleSpec::unit(&run.profile.dim);
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let rho = 0.005 * i as f64;
        let (u, _) = rescaled.eval(rho)?;
        worst = worst.max((u - bubble.eval(rho)).abs());
    }
    Ok(worst)
}

fn gate_bubble(ctx: &GateContext) -> Result<GateOutcome> {
    let mut checks = Vec::new();
    for n in 3..=6u32 {
        let hi = bubble_deviation(ctx.last(n))?;
        let lo = bubble_deviation(ctx.first(n))?;
        checks.push(check(
            format!("N={n} sup_[0,5] |u~ - U| at 1e4"),
            format!("{hi:.3e} (1e2: {lo:.3e})"),
            hi <= ctx.tol.bubble_sup && hi < lo,
        ));
    }
    Ok(GateOutcome::new(0, "", checks))
}

fn gate_node_three(ctx: &GateContext) -> Result<GateOutcome> {
    let p = &ctx.last(3).profile;
    let rn = p.r_node.unwrap_or(f64::NAN);
    let prod = p.lambda * rn * rn;
    let target = PI * PI / 4.0;
    Ok(GateOutcome::new(
        0,
        "",
        vec![
            check("r_node(1e4)", format!("{rn:.6}"), within(rn, ctx.tol.node_window)),
            check(
                "lambda2 r_node^2 vs pi^2/4",
                format!("{prod:.6} ({:.3}%)", 100.0 * rel(prod, target)),
                rel(prod, target) <= ctx.tol.node_product_rel,
            ),
        ],
    ))
}

fn gate_negative_six(ctx: &GateContext) -> Result<GateOutcome> {
    let t = &ctx.tol;
    let l0 = match &ctx.lambda0 {
        Ok(l) => l,
        Err(e) => return Ok(GateOutcome::failed(0, "", e)),
    };
    let runs = ctx.runs(6);
    let study = negative_part_study(runs, Some(&l0.u0))?;
    let last = ctx.last(6);
    let ratio = study.half_lambda_ratio.as_ref().map_or(f64::NAN, |v| v[v.len() - 1]);
    let dev = study.u0_deviation.as_ref().map_or(f64::NAN, |v| v[v.len() - 1]);
    let lam1 = radial_eigenvalue(&DimensionParams::new(6)?, 1)?;
    let bound = PI.powi(3) / 36.0 * (lam1 / 2.0).powi(3);
    let s3 = sobolev_constant(6)?.powi(3) / 3.0;
    let centre = l0.u0.eval(0.0)?.0 / l0.lambda0;
    Ok(GateOutcome::new(
        0,
        "",
        vec![
            check("M_minus/(lambda2/2) at 1e4", format!("{ratio:.6}"), within(ratio, t.minus_window)),
            check(
                "J(u-) <= (pi^3/36)(lambda1/2)^3",
                format!("{:.4} vs {bound:.4}", last.energy.j_minus),
                last.energy.j_minus <= bound,
            ),
            check(
                "J(u) < S^3/3",
                format!("{:.4} vs {s3:.4}", last.energy.j_total),
                last.energy.j_total < s3,
            ),
            check(
                "sup_[0.1,1] |u- - u0| / sup u0 at 1e4",
                format!("{dev:.4}"),
                dev <= t.u0_sup_rel,
            ),
            check("u0(0)/lambda0", format!("{centre}"), centre == 0.5),
        ],
    ))
}

fn gate_negative_vanishes(ctx: &GateContext) -> Result<GateOutcome> {
    let mut checks = Vec::new();
    for n in 3..=5u32 {
        let s = negative_part_study(ctx.runs(n), None)?;
        checks.push(check(
            format!("N={n} M_minus decreasing on the tail"),
            s.tail_decreasing.to_string(),
            s.tail_decreasing,
        ));
        checks.push(check(
            format!("N={n} M_minus(1e4)/M_minus(1e2)"),
            format!("{:.4e}", s.last_over_first),
            s.last_over_first < ctx.tol.minus_decay,
        ));
    }
    Ok(GateOutcome::new(0, "", checks))
}

/// Largest `|y(t)| / (|y'(T)| (T - t))` over 200 points below each zero.
pub fn zero_bound_ratio(result: &ShootingResult) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let t_min = result.trajectory.t_min();
    for (&z, &s) in result.zeros.iter().zip(&result.slopes) {
        for i in 1..=200 {
            let t = t_min + (z - t_min) * i as f64 / 201.0;
            let (y, _) = result.evaluate(t)?;
            worst = worst.max(y.abs() / (s.abs() * (z - t)));
        }
    }
    Ok(worst)
}

/// Relative change of `T_1, T_2, t_0` when `rel_tol` is halved, divided by `rel_tol`.
pub fn halving_sensitivity(dim: DimensionParams, gamma: f64, settings: &Settings) -> Result<f64> {
    let a = solve_shooting(&settings.input(dim, gamma))?;
    let half = Settings {
        rel_tol: settings.rel_tol / 2.0,
        ..*settings
    };
    let b = solve_shooting(&half.input(dim, gamma))?;
    let pairs = [(a.zeros[0], b.zeros[0]), (a.zeros[1], b.zeros[1]), (a.t0, b.t0)];
    Ok(pairs
        .iter()
        .map(|&(x, y)| rel(y, x))
        .fold(0.0, f64::max)
        / settings.rel_tol)
}

/// Largest relative defect of the rescaling identities `u~(y) = s^((N-2)/2) u(s y)`.
pub fn rescaling_defect(run: &GammaRun) -> f64 {
    let p = &run.profile;
    let d = &p.dim;
    let core = p.m_plus.powf(-d.beta);
    let s = core;
    let base = radial_norms(d, 1.0, core, 3000, |r| p.eval(r).expect("r in [0, 1]"));
    let k = s.powf(d.m() / 2.0);
    let scaled = radial_norms(d, 1.0 / s, 1.0, 4000, |y| {
        let (u, du) = p.eval((s * y).min(1.0)).expect("r in [0, 1]");
        (k * u, k * s * du)
    });
    [
        rel(scaled.dirichlet, base.dirichlet),
        rel(scaled.lcrit, base.lcrit),
        rel(s * s * scaled.l2, base.l2),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn gate_properties(ctx: &GateContext) -> Result<GateOutcome> {
    let t = &ctx.tol;
    let all: Vec<&GammaRun> = ctx.runs.iter().flatten().chain(ctx.small.iter().flatten()).collect();
    let bound = all
        .par_iter()
        .map(|r| zero_bound_ratio(&r.result))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let ordering: Vec<String> = all
        .iter()
        .flat_map(|r| {
            r.result
                .structural_violations()
                .into_iter()
                .map(move |v| format!("N={} gamma={}: {v}", r.profile.dim.n, r.profile.gamma))
        })
        .collect();
    let rescale = (3..=6u32)
        .into_par_iter()
        .map(|n| rescaling_defect(ctx.last(n)).max(rescaling_defect(ctx.first(n))))
        .reduce(|| 0.0, f64::max);
    let residual = all.iter().map(|r| r.ode_residual).fold(0.0, f64::max);
    let dim6 = DimensionParams::new(6)?;
    let again = run_gamma(dim6, GAMMA_LARGE, &ctx.settings)?;
    let det = again.result == ctx.last(6).result && again.profile.samples == ctx.last(6).profile.samples;
    let (halving, h_n, h_g) = (3..=6u32)
        .into_par_iter()
        .flat_map_iter(|n| [1.0, 1e2, GAMMA_LARGE].map(move |g| (n, g)))
        .map(|(n, g)| Ok((halving_sensitivity(DimensionParams::new(n)?, g, &ctx.settings)?, n, g)))
        .collect::<Result<Vec<(f64, u32, f64)>>>()?
        .into_iter()
        .fold((0.0, 0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(GateOutcome::new(
        0,
        "",
        vec![
            check("zero bound |y(t)| < |y'(T)|(T - t), worst ratio", format!("{bound:.6}"), bound < 1.0),
            check(
                "zero, slope and extremum orderings",
                if ordering.is_empty() { "none violated".to_string() } else { ordering.join("; ") },
                ordering.is_empty(),
            ),
            check("rescaling identities", format!("{rescale:.2e}"), rescale <= t.rescaling_rel),
            check("ODE residual over all profiles", format!("{residual:.2e}"), residual <= t.ode_residual),
            check("bit-identical rerun", det.to_string(), det),
            check(
                "tolerance halving change / rel_tol",
                format!("{halving:.3} (worst N={h_n}, gamma={h_g:e})"),
                halving < t.halving_factor,
            ),
        ],
    ))
}
