use serde_json::Value;

use nodal_radial::analysis::{
    lambda0_six, lambda2_limit_study, negative_part_study, run_gamma, slope_law_check, sweep,
    sweep_runs, t0_y0_asymptotics, zero_law_study, FitModel, FitReport, Settings, SweepRow,
};
use nodal_radial::gates::{GateContext, Tolerances};
use nodal_radial::shooting::solve_shooting;
use nodal_radial::specfun::{bubble_energy, radial_eigenvalue, BubbleSpec};
use nodal_radial::transform::rescale_positive_part;

use crate::config::{Common, PointArgs, RangeArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::format::{csv_key_values, csv_table, num, nums, object, opt_num, sci, to_json};
use crate::plot::{emit, OutFile, Plot, Series};

/// Everything a command produces; files are written by the caller.
#[derive(Debug, Default)]
pub struct Output {
    pub out_dir: std::path::PathBuf,
    pub stdout: String,
    pub files: Vec<OutFile>,
    pub warnings: Vec<String>,
}

impl Output {
    /// Files for the chosen formats; stdout gets the JSON when requested, the CSV otherwise.
    fn tables(rc: &RunConfig, stem: &str, json: &Value, csv: String) -> Self {
        let json_text = to_json(json);
        let mut out = Output {
            out_dir: rc.out_dir.clone(),
            stdout: if rc.json { json_text.clone() } else { csv.clone() },
            ..Output::default()
        };
        if rc.json {
            out.files.push(OutFile {
                name: format!("{stem}.json"),
                contents: json_text,
            });
        }
        if rc.csv {
            out.files.push(OutFile {
                name: format!("{stem}.csv"),
                contents: csv,
            });
        }
        out
    }

    fn add_plot(&mut self, plot: &Plot) -> CliResult<()> {
        let files = emit(plot)?;
        if files.is_empty() {
            self.warnings.push(format!("warning: no data for plot {}, nothing written", plot.stem));
        }
        self.files.extend(files);
        Ok(())
    }
}

fn settings_json(s: &Settings) -> CliResult<Value> {
    Ok(object(vec![
        ("rel_tol", num(s.rel_tol)?),
        ("abs_tol", opt_num(s.abs_tol)?),
        ("tail_eps", num(s.tail_eps)?),
        ("mesh", Value::from(s.mesh)),
    ]))
}

fn fit_json(f: &FitReport) -> CliResult<Value> {
    let model = match f.model {
        FitModel::Power => "power",
        FitModel::Log => "log",
        FitModel::Constant => "constant",
    };
    Ok(object(vec![
        ("model", Value::from(model)),
        ("exponent", num(f.exponent)?),
        ("prefactor", num(f.prefactor)?),
        ("rms_residual", num(f.rms_residual)?),
        ("max_deviation", num(f.max_deviation)?),
        ("gamma_min", num(f.gamma_min)?),
        ("gamma_max", num(f.gamma_max)?),
        ("n_points", Value::from(f.n_points)),
    ]))
}

pub fn shoot(args: &PointArgs) -> CliResult<Output> {
    let rc = RunConfig::resolve(&args.common)?;
    let dim = rc.dim(args.dim)?;
    let gamma = rc.gamma(args.gamma, dim)?;
    let r = solve_shooting(&rc.settings.input(dim, gamma))?;
    let lambda2 = dim.lambda_from_zero(r.zeros[1]);
    let extrema = r
        .extrema
        .iter()
        .map(|e| Ok(object(vec![("t", num(e.t)?), ("y", num(e.y)?)])))
        .collect::<CliResult<Vec<_>>>()?;
    let json = object(vec![
        ("command", Value::from("shoot")),
        ("N", Value::from(dim.n)),
        ("gamma", num(gamma)?),
        ("T1", num(r.zeros[0])?),
        ("T2", num(r.zeros[1])?),
        ("t0", num(r.t0)?),
        ("y0", num(r.y0)?),
        ("lambda2", num(lambda2)?),
        ("zeros", nums(&r.zeros)?),
        ("slopes", nums(&r.slopes)?),
        ("extrema", Value::Array(extrema)),
        ("t_start", num(r.t_start)?),
        (
            "settings",
            object(vec![
                ("rel_tol", num(r.input.rel_tol)?),
                ("abs_tol", num(r.input.abs_tol)?),
                ("tail_eps", num(r.input.tail_eps)?),
            ]),
        ),
        (
            "steps",
            object(vec![
                ("accepted", Value::from(r.stats.accepted_steps)),
                ("rejected", Value::from(r.stats.rejected_steps)),
            ]),
        ),
    ]);
    let mut header = vec!["gamma".to_string()];
    let mut row = vec![sci(gamma)?];
    for (i, (z, s)) in r.zeros.iter().zip(&r.slopes).enumerate() {
        header.push(format!("T{}", i + 1));
        row.push(sci(*z)?);
        header.push(format!("slope{}", i + 1));
        row.push(sci(*s)?);
    }
    header.extend(["t0", "y0", "lambda2"].map(String::from));
    row.extend([sci(r.t0)?, sci(r.y0)?, sci(lambda2)?]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = csv_table(&header, &[row]);
    Ok(Output::tables(&rc, &format!("shoot_N{}", dim.n), &json, csv))
}

pub const CURVE_HEADER: [&str; 12] = [
    "gamma", "lambda2", "T1", "T2", "t0", "y0", "r_node", "s_min", "M_plus", "M_minus", "J_plus", "J_minus",
];

fn curve_cells(r: &SweepRow) -> [f64; 12] {
    [
        r.gamma, r.lambda2, r.t1, r.t2, r.t0, r.y0, r.r_node, r.s_min, r.m_plus, r.m_minus, r.j_plus, r.j_minus,
    ]
}

pub fn curve(args: &RangeArgs) -> CliResult<Output> {
    let rc = RunConfig::resolve(&args.common)?;
    let dim = rc.dim(args.dim)?;
    let grid = rc.grid(args, dim)?;
    let rows = sweep(dim, &grid, &rc.settings)?;
    let cells = rows.iter().map(curve_cells).collect::<Vec<_>>();
    let csv_rows = cells
        .iter()
        .map(|c| c.iter().map(|&x| sci(x)).collect::<CliResult<Vec<_>>>())
        .collect::<CliResult<Vec<_>>>()?;
    let json_rows = cells
        .iter()
        .map(|c| {
            Ok(Value::Object(
                CURVE_HEADER
                    .iter()
                    .zip(c)
                    .map(|(k, &x)| Ok((k.to_string(), num(x)?)))
                    .collect::<CliResult<_>>()?,
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let lambda1 = radial_eigenvalue(&dim, 1)?;
    let json = object(vec![
        ("command", Value::from("curve")),
        ("N", Value::from(dim.n)),
        ("lambda1_ball", num(lambda1)?),
        ("lambda2_ball", num(radial_eigenvalue(&dim, 2)?)?),
        ("settings", settings_json(&rc.settings)?),
        ("rows", Value::Array(json_rows)),
    ]);
    let stem = format!("curve_N{}", dim.n);
    let mut out = Output::tables(&rc, &stem, &json, csv_table(&CURVE_HEADER, &csv_rows));
    if rc.plot {
        out.add_plot(&Plot {
            stem: format!("lambda2_N{}", dim.n),
            title: format!("lambda_2(gamma), N = {}", dim.n),
            x_label: "gamma".into(),
            y_label: "lambda_2".into(),
            log_x: true,
            log_y: false,
            series: vec![Series {
                label: "lambda_2(gamma)".into(),
                file_stem: format!("lambda2_N{}", dim.n),
                columns: ["gamma", "lambda2"],
                points: rows.iter().map(|r| (r.gamma, r.lambda2)).collect(),
            }],
            reference: Some(("lambda_1(B_1)".into(), lambda1)),
        })?;
    }
    Ok(out)
}

/// Radii at which the rescaled positive part is compared with the bubble.
const OVERLAY_RHO_MAX: f64 = 5.0;
const OVERLAY_POINTS: usize = 501;

pub fn solution(args: &PointArgs) -> CliResult<Output> {
    let rc = RunConfig::resolve(&args.common)?;
    let dim = rc.dim(args.dim)?;
    let gamma = rc.gamma(args.gamma, dim)?;
    let run = run_gamma(dim, gamma, &rc.settings)?;
    let p = &run.profile;
    let col = |f: fn(&nodal_radial::transform::ProfileSample) -> f64| p.samples.iter().map(f).collect::<Vec<_>>();
    let (r, u, du) = (col(|s| s.r), col(|s| s.u), col(|s| s.u_prime));
    let json = object(vec![
        ("command", Value::from("solution")),
        ("N", Value::from(dim.n)),
        ("gamma", num(gamma)?),
        ("lambda", num(p.lambda)?),
        ("r_node", opt_num(p.r_node)?),
        ("s_min", opt_num(p.s_min)?),
        ("M_plus", num(p.m_plus)?),
        ("M_minus", num(p.m_minus)?),
        ("r_eps", num(p.r_eps)?),
        ("ode_residual", num(run.ode_residual)?),
        ("settings", settings_json(&rc.settings)?),
        (
            "samples",
            object(vec![("r", nums(&r)?), ("u", nums(&u)?), ("u_prime", nums(&du)?)]),
        ),
    ]);
    let rows = p
        .samples
        .iter()
        .map(|s| Ok(vec![sci(s.r)?, sci(s.u)?, sci(s.u_prime)?]))
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = Output::tables(&rc, &format!("solution_N{}", dim.n), &json, csv_table(&["r", "u", "u_prime"], &rows));
    if rc.plot {
        out.add_plot(&Plot {
            stem: format!("profile_N{}", dim.n),
            title: format!("u(r), N = {}, gamma = {}", dim.n, sci(gamma)?),
            x_label: "r".into(),
            y_label: "u".into(),
            log_x: false,
            log_y: false,
            series: vec![Series {
                label: "u(r)".into(),
                file_stem: format!("profile_N{}", dim.n),
                columns: ["r", "u"],
                points: r.iter().copied().zip(u.iter().copied()).collect(),
            }],
            reference: None,
        })?;
        let scaled = rescale_positive_part(p)?;
        let bubble = BubbleSpec::unit(&dim);
        let top = OVERLAY_RHO_MAX.min(scaled.sigma);
        let rhos: Vec<f64> = (0..OVERLAY_POINTS)
            .map(|i| top * i as f64 / (OVERLAY_POINTS - 1) as f64)
            .collect();
        let tilde = rhos
            .iter()
            .map(|&rho| Ok((rho, scaled.eval(rho)?.0)))
            .collect::<CliResult<Vec<_>>>()?;
        out.add_plot(&Plot {
            stem: format!("overlay_N{}", dim.n),
            title: format!("rescaled positive part and bubble, N = {}", dim.n),
            x_label: "rho".into(),
            y_label: "u".into(),
            log_x: false,
            log_y: false,
            series: vec![
                Series {
                    label: "rescaled u+".into(),
                    file_stem: format!("overlay_rescaled_N{}", dim.n),
                    columns: ["rho", "u_tilde"],
                    points: tilde,
                },
                Series {
                    label: "bubble".into(),
                    file_stem: format!("overlay_bubble_N{}", dim.n),
                    columns: ["rho", "U"],
                    points: rhos.iter().map(|&rho| (rho, bubble.eval(rho))).collect(),
                },
            ],
            reference: None,
        })?;
    }
    Ok(out)
}

pub fn energy(args: &PointArgs) -> CliResult<Output> {
    let rc = RunConfig::resolve(&args.common)?;
    let dim = rc.dim(args.dim)?;
    let gamma = rc.gamma(args.gamma, dim)?;
    let run = run_gamma(dim, gamma, &rc.settings)?;
    let e = &run.energy;
    let bubble = bubble_energy(dim.n)?;
    let json = object(vec![
        ("command", Value::from("energy")),
        ("N", Value::from(dim.n)),
        ("gamma", num(gamma)?),
        ("lambda", num(run.profile.lambda)?),
        ("J_plus", num(e.j_plus)?),
        ("J_minus", num(e.j_minus)?),
        ("J_total", num(e.j_total)?),
        ("dirichlet_plus", num(e.dirichlet_plus)?),
        ("dirichlet_minus", num(e.dirichlet_minus)?),
        ("l2_plus", num(e.l2_plus)?),
        ("l2_minus", num(e.l2_minus)?),
        ("lcrit_plus", num(e.lcrit_plus)?),
        ("lcrit_minus", num(e.lcrit_minus)?),
        ("nehari_residual_plus", num(e.nehari_residual_plus)?),
        ("nehari_residual_minus", num(e.nehari_residual_minus)?),
        ("bubble_energy", num(bubble)?),
        ("J_plus_over_bubble", num(e.j_plus / bubble)?),
        ("settings", settings_json(&rc.settings)?),
    ]);
    let csv = csv_key_values(&json);
    Ok(Output::tables(&rc, &format!("energy_N{}", dim.n), &json, csv))
}

/// Points needed by the least-squares fits.
const MIN_FIT_POINTS: usize = 4;

pub fn asymptotics(args: &RangeArgs) -> CliResult<Output> {
    let rc = RunConfig::resolve(&args.common)?;
    let dim = rc.dim(args.dim)?;
    let grid = rc.grid(args, dim)?;
    if grid.len() < MIN_FIT_POINTS {
        return Err(CliError::usage(format!(
            "asymptotics needs at least {MIN_FIT_POINTS} grid points, the range gives {}",
            grid.len()
        )));
    }
    let runs = sweep_runs(dim, &grid, &rc.settings)?;
    let rows: Vec<SweepRow> = runs.iter().map(SweepRow::from).collect();
    let six = dim.n == 6;
    let l0 = if six {
        Some(lambda0_six(&rc.settings, Tolerances::default().lambda0_rel)?)
    } else {
        None
    };
    let zero = zero_law_study(&rows)?;
    let slope = slope_law_check(&rows)?;
    let limit = lambda2_limit_study(&rows, l0.as_ref().map(|l| l.lambda0))?;
    let neg = negative_part_study(&runs, l0.as_ref().map(|l| &l.u0))?;
    let t0y0 = if six { Some(t0_y0_asymptotics(&rows)?) } else { None };

    let zero_json = object(vec![
        ("fit", zero.fit.as_ref().map_or(Ok(Value::Null), fit_json)?),
        ("expected_exponent", opt_num(zero.expected_exponent)?),
        ("ratio_at_max", opt_num(zero.ratio_at_max)?),
        ("T1_min", num(zero.t1_min)?),
        ("T1_max", num(zero.t1_max)?),
        (
            "prefactor_candidates",
            match &zero.prefactor_candidates {
                Some(c) => object(vec![
                    ("split_quotient", num(c.split_quotient)?),
                    ("gamma_of_quotient", num(c.gamma_of_quotient)?),
                ]),
                None => Value::Null,
            },
        ),
        (
            "closest_parse",
            match &zero.closest_parse {
                Some((name, d)) => object(vec![("reading", Value::from(name.as_str())), ("rel_distance", num(*d)?)]),
                None => Value::Null,
            },
        ),
    ]);
    let (sg, sv): (Vec<f64>, Vec<f64>) = slope.values.iter().copied().unzip();
    let slope_json = object(vec![
        ("fit", fit_json(&slope.fit)?),
        ("target", num(slope.target)?),
        ("value_at_max", num(slope.value_at_max)?),
        ("rel_error", num(slope.rel_error)?),
        ("gamma", nums(&sg)?),
        ("gamma_slope", nums(&sv)?),
    ]);
    let limit_json = object(vec![
        ("limit", opt_num(limit.limit)?),
        ("lambda2_at_max", num(limit.lambda2_at_max)?),
        ("rel_error", opt_num(limit.rel_error)?),
        ("side_condition", limit.side_condition.map_or(Value::Null, Value::from)),
        ("below_second_eigenvalue", Value::from(limit.below_second_eigenvalue)),
    ]);
    let opt_nums = |v: &Option<Vec<f64>>| v.as_deref().map_or(Ok(Value::Null), nums);
    let neg_json = object(vec![
        ("gamma", nums(&neg.gammas)?),
        ("M_minus", nums(&neg.m_minus)?),
        ("tail_decreasing", Value::from(neg.tail_decreasing)),
        ("last_over_first", num(neg.last_over_first)?),
        ("half_lambda_ratio", opt_nums(&neg.half_lambda_ratio)?),
        ("u0_deviation", opt_nums(&neg.u0_deviation)?),
    ]);
    let t0y0_json = match &t0y0 {
        Some(t) => object(vec![
            ("y0_fit", fit_json(&t.y0_fit)?),
            ("t0_ratio_fit", fit_json(&t.t0_ratio_fit)?),
            ("y0_at_max", num(t.y0_at_max)?),
            ("t0_ratio_at_max", num(t.t0_ratio_at_max)?),
            ("y0_gap_nonincreasing", Value::from(t.y0_gap_nonincreasing)),
        ]),
        None => Value::Null,
    };
    let json = object(vec![
        ("command", Value::from("asymptotics")),
        ("N", Value::from(dim.n)),
        ("settings", settings_json(&rc.settings)?),
        ("zero_law", zero_json),
        ("slope_law", slope_json),
        ("lambda2_limit", limit_json),
        ("negative_part", neg_json),
        ("last_extremum", t0y0_json),
        ("lambda0", opt_num(l0.as_ref().map(|l| l.lambda0))?),
    ]);
    let mut out = Output::tables(&rc, &format!("asymptotics_N{}", dim.n), &json, csv_key_values(&json));
    if rc.plot {
        let mut series = vec![Series {
            label: "T_1(gamma)".into(),
            file_stem: format!("t1_N{}", dim.n),
            columns: ["gamma", "T1"],
            points: rows.iter().map(|r| (r.gamma, r.t1)).collect(),
        }];
        if let Some(f) = &zero.fit {
            let law = |g: f64| match f.model {
                FitModel::Log => f.prefactor * g.ln().powf(f.exponent),
                _ => f.prefactor * g.powf(f.exponent),
            };
            series.push(Series {
                label: format!("fit, exponent {:.4}", f.exponent),
                file_stem: format!("t1_fit_N{}", dim.n),
                columns: ["gamma", "T1_fit"],
                points: rows.iter().map(|r| (r.gamma, law(r.gamma))).collect(),
            });
        }
        out.add_plot(&Plot {
            stem: format!("t1_N{}", dim.n),
            title: format!("first zero T_1(gamma), N = {}", dim.n),
            x_label: "gamma".into(),
            y_label: "T_1".into(),
            log_x: true,
            log_y: true,
            series,
            reference: None,
        })?;
    }
    Ok(out)
}

pub fn lambda0(common: &Common) -> CliResult<Output> {
    let rc = RunConfig::resolve(common)?;
    let l0 = lambda0_six(&rc.settings, Tolerances::default().lambda0_rel)?;
    let dim = l0.u0.dim;
    let json = object(vec![
        ("command", Value::from("lambda0")),
        ("N", Value::from(dim.n)),
        ("lambda0", num(l0.lambda0)?),
        ("T1_half", num(l0.t1_half)?),
        ("route_b", num(l0.route_b)?),
        ("route_b_gammas", nums(&l0.route_b_gammas)?),
        ("route_b_values", nums(&l0.route_b_values)?),
        ("rel_gap", num(l0.rel_gap)?),
        ("lambda1_ball", num(radial_eigenvalue(&dim, 1)?)?),
        ("u0_at_origin", num(l0.u0.m_plus)?),
        ("settings", settings_json(&rc.settings)?),
    ]);
    Ok(Output::tables(&rc, "lambda0", &json, csv_key_values(&json)))
}

pub fn report(common: &Common) -> CliResult<Output> {
    let rc = RunConfig::resolve(common)?;
    let ctx = GateContext::compute_with_density(rc.settings, Tolerances::default(), rc.points_per_decade())?;
    let outcomes = ctx.evaluate_all();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut text = String::from("acceptance gates\n");
    for o in &outcomes {
        text.push_str(&o.summary_line());
        text.push('\n');
    }
    text.push_str(&format!("{passed} of {} gates passed\n", outcomes.len()));
    let gates = outcomes
        .iter()
        .map(|o| {
            object(vec![
                ("id", Value::from(o.id)),
                ("name", Value::from(o.name.as_str())),
                ("passed", Value::from(o.passed)),
                (
                    "checks",
                    Value::Array(
                        o.checks
                            .iter()
                            .map(|c| {
                                object(vec![
                                    ("label", Value::from(c.label.as_str())),
                                    ("observed", Value::from(c.observed.as_str())),
                                    ("passed", Value::from(c.passed)),
                                    ("optional", Value::from(c.optional)),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ])
        })
        .collect();
    let json = object(vec![
        ("command", Value::from("report")),
        ("settings", settings_json(&rc.settings)?),
        ("points_per_decade", Value::from(rc.points_per_decade())),
        ("passed", Value::from(passed)),
        ("total", Value::from(outcomes.len())),
        ("gates", Value::Array(gates)),
    ]);
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            let failing: Vec<&str> = o.checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()).collect();
            vec![
                o.id.to_string(),
                o.name.clone(),
                if o.passed { "PASS" } else { "FAIL" }.to_string(),
                failing.join("; "),
            ]
        })
        .collect();
    let mut out = Output::tables(&rc, "report", &json, csv_table(&["id", "name", "verdict", "failing_checks"], &rows));
    if !rc.json {
        out.stdout = text.clone();
    }
    out.files.push(OutFile {
        name: "report.txt".into(),
        contents: text,
    });
    Ok(out)
}
