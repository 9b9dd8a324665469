use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use nodal_radial::analysis::{log_grid, Settings};
use nodal_radial::shooting::TAIL_EPS_MAX;
use nodal_radial::DimensionParams;

use crate::error::{CliError, CliResult};

/// Fallback output directory when neither a flag nor the config file sets one.
pub const OUT_DIR_ENV: &str = "NODAL_RADIAL_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

const GAMMA_MIN_DEFAULT: f64 = 1e2;
const GAMMA_MAX_DEFAULT: f64 = 1e4;
const PPD_DEFAULT: usize = 12;
const PPD_FAST: usize = 4;
const MESH_FAST: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "nodal-radial",
    version,
    about = "Nodal radial solutions of the critical semilinear Dirichlet problem on the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the terminal-value problem for one gamma
    Shoot(PointArgs),
    /// Tabulate lambda_2(gamma) and derived quantities over a log grid
    Curve(RangeArgs),
    /// Radial profile u(r) on [0, 1] for one gamma
    Solution(PointArgs),
    /// Energies of the positive and negative parts for one gamma
    Energy(PointArgs),
    /// Asymptotic laws over a gamma sweep
    Asymptotics(RangeArgs),
    /// lambda_0 for N = 6 by two independent routes
    Lambda0(Common),
    /// Full study with a verdict per acceptance gate
    Report(Common),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Dimension N >= 3
    #[arg(long)]
    pub dim: Option<u32>,
    /// Terminal value gamma > 0
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Dimension N >= 3
    #[arg(long)]
    pub dim: Option<u32>,
    /// Smallest gamma of the grid [default: 1e2]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_min: Option<f64>,
    /// Largest gamma of the grid [default: 1e4]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_max: Option<f64>,
    /// Grid density [default: 12, 4 with --fast]
    #[arg(long)]
    pub points_per_decade: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML file with defaults for any of the long options (kebab-case keys)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: $NODAL_RADIAL_OUT_DIR, else ./out]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Write JSON (also printed on stdout)
    #[arg(long)]
    pub json: bool,
    /// Write CSV (the default when no format is chosen)
    #[arg(long)]
    pub csv: bool,
    /// Also write .dat files and SVG plots
    #[arg(long)]
    pub plot: bool,
    /// Coarser grids and radial mesh
    #[arg(long)]
    pub fast: bool,
    /// Integrator relative tolerance [default: 1e-10]
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Integrator absolute tolerance [default: 1e-12 max(1, gamma)]
    #[arg(long, allow_negative_numbers = true)]
    pub abs_tol: Option<f64>,
    /// Relative size of the dropped tail correction [default: 1e-10]
    #[arg(long, allow_negative_numbers = true)]
    pub tail_eps: Option<f64>,
    /// Number of radii in sampled profiles [default: 2000, 1000 with --fast]
    #[arg(long)]
    pub mesh: Option<usize>,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub dim: Option<u32>,
    pub gamma: Option<f64>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub points_per_decade: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub json: Option<bool>,
    pub csv: Option<bool>,
    pub plot: Option<bool>,
    pub fast: Option<bool>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub tail_eps: Option<f64>,
    pub mesh: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}

/// Options shared by every command after merging flags, file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub settings: Settings,
    pub out_dir: PathBuf,
    pub json: bool,
    pub csv: bool,
    pub plot: bool,
    pub fast: bool,
    file: FileConfigValues,
}

/// Command-specific values the file may supply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct FileConfigValues {
    dim: Option<u32>,
    gamma: Option<f64>,
    gamma_min: Option<f64>,
    gamma_max: Option<f64>,
    points_per_decade: Option<usize>,
}

fn first<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

impl RunConfig {
    pub fn resolve(common: &Common) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let fast = common.fast || file.fast.unwrap_or(false);
        let json = common.json || file.json.unwrap_or(false);
        let csv = common.csv || file.csv.unwrap_or(false) || !json;
        let out_dir = first(common.out_dir.clone(), file.out_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let defaults = Settings::default();
        let settings = Settings {
            rel_tol: first(common.rel_tol, file.rel_tol).unwrap_or(defaults.rel_tol),
            abs_tol: first(common.abs_tol, file.abs_tol),
            tail_eps: first(common.tail_eps, file.tail_eps).unwrap_or(defaults.tail_eps),
            mesh: first(common.mesh, file.mesh).unwrap_or(if fast { MESH_FAST } else { defaults.mesh }),
        };
        for (name, v) in [("--rel-tol", Some(settings.rel_tol)), ("--abs-tol", settings.abs_tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 1e-4) {
                    return Err(CliError::usage(format!("{name} must lie in (0, 1e-4], got {v}")));
                }
            }
        }
        if !(settings.tail_eps > 0.0 && settings.tail_eps <= TAIL_EPS_MAX) {
            return Err(CliError::usage(format!(
                "--tail-eps must lie in (0, {TAIL_EPS_MAX}], got {}",
                settings.tail_eps
            )));
        }
        if settings.mesh < 10 {
            return Err(CliError::usage(format!("--mesh must be at least 10, got {}", settings.mesh)));
        }
        Ok(Self {
            settings,
            out_dir,
            json,
            csv,
            plot: common.plot || file.plot.unwrap_or(false),
            fast,
            file: FileConfigValues {
                dim: file.dim,
                gamma: file.gamma,
                gamma_min: file.gamma_min,
                gamma_max: file.gamma_max,
                points_per_decade: file.points_per_decade,
            },
        })
    }

    pub fn dim(&self, flag: Option<u32>) -> CliResult<DimensionParams> {
        let n = first(flag, self.file.dim).ok_or_else(|| CliError::usage("--dim is required"))?;
        DimensionParams::new(n).map_err(|_| CliError::usage(format!("--dim must be >= 3, got {n}")))
    }

    /// Gamma for single-solve commands, checked against the solver's input rules.
    pub fn gamma(&self, flag: Option<f64>, dim: DimensionParams) -> CliResult<f64> {
        let g = first(flag, self.file.gamma).ok_or_else(|| CliError::usage("--gamma is required"))?;
        self.settings
            .input(dim, g)
            .validate()
            .map_err(|e| CliError::usage(format!("--gamma: {e}")))?;
        Ok(g)
    }

    /// Log grid for sweep commands; every member is validated like a single gamma.
    pub fn grid(&self, args: &RangeArgs, dim: DimensionParams) -> CliResult<Vec<f64>> {
        let lo = first(args.gamma_min, self.file.gamma_min).unwrap_or(GAMMA_MIN_DEFAULT);
        let hi = first(args.gamma_max, self.file.gamma_max).unwrap_or(GAMMA_MAX_DEFAULT);
        let ppd = first(args.points_per_decade, self.file.points_per_decade)
            .unwrap_or(if self.fast { PPD_FAST } else { PPD_DEFAULT });
        if !(lo > 0.0 && lo.is_finite()) {
            return Err(CliError::usage(format!("--gamma-min must be > 0, got {lo}")));
        }
        if !(hi >= lo && hi.is_finite()) {
            return Err(CliError::usage(format!("--gamma-max must be >= --gamma-min, got {hi}")));
        }
        let grid = log_grid(lo, hi, ppd).map_err(|e| CliError::usage(e.to_string()))?;
        for &g in [lo, hi].iter() {
            self.settings
                .input(dim, g)
                .validate()
                .map_err(|e| CliError::usage(format!("gamma range: {e}")))?;
        }
        Ok(grid)
    }

    pub fn points_per_decade(&self) -> usize {
        self.file
            .points_per_decade
            .unwrap_or(if self.fast { PPD_FAST } else { PPD_DEFAULT })
    }
}
