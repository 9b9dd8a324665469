//! Backward shooting for the Emden-Fowler terminal-value problem
//!
//! ```text
//! y'' + t^(-k) (y + |y|^(p-1) y) = 0,    y(t) -> gamma  as t -> inf
//! ```
//!
//! The integration runs in `x = -ln t` (so decreasing `t` is increasing `x`)
//! on the state `(y, w = t y')`:
//!
//! ```text
//! dy/dx = -w,    dw/dx = -w + t^(2-k) f(y)
//! ```
//!
//! Zeros of `y` and critical points (zeros of `w`) are detected by strict sign
//! changes over accepted steps and then located by Brent iteration on
//! partial Runge-Kutta steps from the left end of the step.

mod tail;
mod trajectory;

use serde::Serialize;

pub use tail::{tail_start, tail_state, TAIL_EPS_MAX};
pub use trajectory::{Breakpoint, Trajectory};

use crate::error::{Error, Result};
use crate::ode::{dp_step, StepControl, Stepper, System};
use crate::root::brent;
use crate::specfun::DimensionParams;

/// Largest terminal value accepted in six or more dimensions.
pub const GAMMA_MAX_HIGH_DIM: f64 = 1e6;

/// Parameters of one shooting solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingInput {
    pub dim: DimensionParams,
    pub gamma: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub n_zeros: usize,
    pub tail_eps: f64,
}

impl ShootingInput {
    /// Default tolerances: `rel_tol = 1e-10`, `abs_tol = 1e-12 max(1, gamma)`,
    /// three zeros, `tail_eps = 1e-10`.
    pub fn new(dim: DimensionParams, gamma: f64) -> Self {
        Self {
            dim,
            gamma,
            rel_tol: 1e-10,
            abs_tol: 1e-12 * gamma.max(1.0),
            n_zeros: 3,
            tail_eps: 1e-10,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_zeros(mut self, n_zeros: usize) -> Self {
        self.n_zeros = n_zeros;
        self
    }

    pub fn with_tail_eps(mut self, tail_eps: f64) -> Self {
        self.tail_eps = tail_eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::config(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.dim.n >= 6 && self.gamma > GAMMA_MAX_HIGH_DIM {
            return Err(Error::config(format!(
                "gamma = {} above the supported limit {GAMMA_MAX_HIGH_DIM:e} for N = {}",
                self.gamma, self.dim.n
            )));
        }
        if self.n_zeros < 2 {
            return Err(Error::config(format!("need at least 2 zeros, got {}", self.n_zeros)));
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(Error::config(format!("{name} must lie in (0, 1e-4], got {v}")));
            }
        }
        if !(self.tail_eps > 0.0) {
            return Err(Error::config(format!("tail_eps must be > 0, got {}", self.tail_eps)));
        }
        Ok(())
    }
}

/// A local extremum `(t, y(t))` of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub t: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Output of [`solve_shooting`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingResult {
    pub input: ShootingInput,
    pub t_start: f64,
    /// `T_1 > T_2 > ... > T_n`.
    pub zeros: Vec<f64>,
    /// `y'(T_i)`.
    pub slopes: Vec<f64>,
    /// Largest critical point: `y' > 0` on `(t0, inf)`.
    pub t0: f64,
    pub y0: f64,
    /// Every captured critical point, by decreasing `t`. The first one is `(t0, y0)`.
    pub extrema: Vec<Extremum>,
    #[serde(skip)]
    pub trajectory: Trajectory,
    pub stats: SolveStats,
}

impl ShootingResult {
    pub fn zero(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.zeros.len() {
            return Err(Error::domain(format!(
                "zero #{n} requested, {} captured",
                self.zeros.len()
            )));
        }
        Ok(self.zeros[n - 1])
    }

    pub fn evaluate(&self, t: f64) -> Result<(f64, f64)> {
        self.trajectory.evaluate(t)
    }

    /// Structural properties every solve must satisfy. Returns the list of
    /// violated properties (empty when all hold).
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.slopes.first().is_none_or(|s| *s <= 0.0) {
            out.push("y'(T_1) must be positive".to_string());
        }
        for (i, w) in self.slopes.windows(2).enumerate() {
            if w[0].signum() == w[1].signum() {
                out.push(format!("slopes at T_{} and T_{} do not alternate", i + 1, i + 2));
            }
            if w[0].abs() >= w[1].abs() {
                out.push(format!(
                    "|y'(T_{})| = {} not below |y'(T_{})| = {}",
                    i + 1,
                    w[0].abs(),
                    i + 2,
                    w[1].abs()
                ));
            }
        }
        for (i, w) in self.zeros.windows(2).enumerate() {
            if w[0] <= w[1] {
                out.push(format!("zeros T_{} and T_{} not decreasing", i + 1, i + 2));
            }
        }
        for (i, w) in self.extrema.windows(2).enumerate() {
            if w[0].y.abs() <= w[1].y.abs() {
                out.push(format!(
                    "extremum magnitudes {} (#{}) and {} (#{}) do not decrease towards t = 0",
                    w[0].y.abs(),
                    i + 1,
                    w[1].y.abs(),
                    i + 2
                ));
            }
        }
        if self.y0 >= 0.0 {
            out.push(format!("y0 = {} must be negative", self.y0));
        }
        if self.zeros.len() >= 2 && !(self.zeros[1] < self.t0 && self.t0 < self.zeros[0]) {
            out.push(format!("t0 = {} not inside (T_2, T_1)", self.t0));
        }
        let tr = &self.trajectory;
        if let (Some(first), Some(last)) = (self.zeros.first(), self.zeros.last()) {
            if !(tr.t_start() > *first && tr.t_min() < *last) {
                out.push("trajectory does not bracket the captured zeros".to_string());
            }
        }
        out
    }
}

struct EmdenFowler {
    dim: DimensionParams,
}

impl System<2> for EmdenFowler {
    #[inline]
    fn rhs(&self, x: f64, z: &[f64; 2]) -> [f64; 2] {
        let weight = ((self.dim.k - 2.0) * x).exp(); // t^(2-k)
        [-z[1], -z[1] + weight * self.dim.f(z[0])]
    }
}

impl EmdenFowler {
    /// Second derivatives of `(y, w)` in `x`, given the first ones.
    fn second(&self, x: f64, z: &[f64; 2], dz: &[f64; 2]) -> [f64; 2] {
        let d = &self.dim;
        let weight = ((d.k - 2.0) * x).exp();
        let df = 1.0 + d.p * z[0].abs().powf(d.p - 1.0);
        [-dz[1], -dz[1] + weight * ((d.k - 2.0) * d.f(z[0]) + df * dz[0])]
    }

    fn breakpoint(&self, x: f64, z: [f64; 2], dz: [f64; 2]) -> Breakpoint {
        Breakpoint::new(x, z, dz, self.second(x, &z, &dz))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Zero,
    Critical,
}

/// Step length in `x` after which the Hermite dense output is still accurate.
const H_MAX: f64 = 0.25;

/// Integrates backward from the tail and captures zeros and critical points.
pub fn solve_shooting(input: &ShootingInput) -> Result<ShootingResult> {
    input.validate()?;
    let dim = input.dim;
    let gamma = input.gamma;
    let t_start = tail_start(&dim, gamma, input.tail_eps)?;
    let (y_start, yp_start) = tail_state(&dim, gamma, t_start);
    let sys = EmdenFowler { dim };
    let x_start = -t_start.ln();
    let z_start = [y_start, t_start * yp_start];
    let ctrl = StepControl {
        rel_tol: input.rel_tol,
        abs_tol: input.abs_tol,
        h_max: H_MAX,
        h_min_rel: 1e-14,
        max_steps: 2_000_000,
    };
    let mut stepper = Stepper::new(&sys, ctrl, x_start, z_start, 1e-2);
    let mut points = vec![sys.breakpoint(x_start, z_start, sys.rhs(x_start, &z_start))];
    let mut zeros = Vec::with_capacity(input.n_zeros);
    let mut slopes = Vec::with_capacity(input.n_zeros);
    let mut extrema: Vec<Extremum> = Vec::new();
    // localisation to ~1e-14 in x, i.e. relative 1e-14 in t
    let x_tol = 1e-14;

    'outer: loop {
        let step = stepper.advance().map_err(|e| match e {
            Error::Numeric { stage, message } => Error::Numeric {
                stage,
                message: format!(
                    "{message} (after {} zeros, N = {}, gamma = {gamma})",
                    zeros.len(),
                    dim.n
                ),
            },
            other => other,
        })?;
        let h = step.x1 - step.x0;
        let mut events: Vec<(f64, EventKind)> = Vec::new();
        for (comp, kind) in [(0usize, EventKind::Zero), (1, EventKind::Critical)] {
            let (a, b) = (step.z0[comp], step.z1[comp]);
            if a * b < 0.0 {
                let g = |dx: f64| dp_step(&sys, step.x0, &step.z0, &step.dz0, dx).0[comp];
                let dx = brent(g, 0.0, h, a, b, x_tol)?;
                events.push((dx, kind));
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (dx, kind) in events {
            let x = step.x0 + dx;
            if !(x > points.last().expect("non-empty").x) {
                continue;
            }
            let z = dp_step(&sys, step.x0, &step.z0, &step.dz0, dx).0;
            let bp = sys.breakpoint(x, z, sys.rhs(x, &z));
            points.push(bp);
            match kind {
                EventKind::Zero => {
                    zeros.push(bp.t);
                    slopes.push(bp.y_prime);
                }
                EventKind::Critical => {
                    extrema.push(Extremum { t: bp.t, y: bp.y });
                    if zeros.len() >= input.n_zeros {
                        break 'outer;
                    }
                }
            }
        }
        if step.x1 > points.last().expect("non-empty").x {
            points.push(sys.breakpoint(step.x1, step.z1, step.dz1));
        }
    }

    let first = extrema.first().copied().ok_or_else(|| {
        Error::numeric("shooting", "no critical point captured before the last zero")
    })?;
    Ok(ShootingResult {
        input: *input,
        t_start,
        zeros,
        slopes,
        t0: first.t,
        y0: first.y,
        extrema,
        trajectory: Trajectory::new(points),
        stats: SolveStats {
            accepted_steps: stepper.accepted,
            rejected_steps: stepper.rejected,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::alpha_zero;

    fn solve(n: u32, gamma: f64) -> ShootingResult {
        solve_shooting(&ShootingInput::new(DimensionParams::new(n).unwrap(), gamma)).unwrap()
    }

    #[test]
    fn structure_holds_across_dimensions() {
        for n in 3..=7 {
            for gamma in [1e-2, 1.0, 1e2] {
                let r = solve(n, gamma);
                assert_eq!(r.zeros.len(), 3);
                let v = r.structural_violations();
                assert!(v.is_empty(), "N={n} gamma={gamma}: {v:?}");
            }
        }
    }

    #[test]
    fn small_gamma_approaches_linear_zeros() {
        // y ~ gamma alpha(t) for gamma -> 0
        for n in 3..=6 {
            let d = DimensionParams::new(n).unwrap();
            let r = solve(n, 1e-6);
            for i in 1..=2 {
                let tau = alpha_zero(&d, i).unwrap();
                let z = r.zero(i).unwrap();
                assert!((z / tau - 1.0).abs() < 1e-4, "N={n} i={i}: {z} vs {tau}");
            }
        }
    }

    #[test]
    fn refined_events_sit_on_the_interpolant() {
        let r = solve(5, 30.0);
        let (y, _) = r.evaluate(r.zeros[0]).unwrap();
        assert!(y.abs() <= 1e-10 * 30.0);
        let (_, yp) = r.evaluate(r.t0).unwrap();
        let max_slope = r.slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!(yp.abs() <= 1e-10 * max_slope);
    }

    #[test]
    fn rejects_invalid_input() {
        let d = DimensionParams::new(6).unwrap();
        assert!(solve_shooting(&ShootingInput::new(d, -1.0)).is_err());
        assert!(solve_shooting(&ShootingInput::new(d, 2e6)).is_err());
        assert!(solve_shooting(&ShootingInput::new(d, 1.0).with_zeros(1)).is_err());
        assert!(solve_shooting(&ShootingInput::new(d, 1.0).with_rel_tol(1e-3)).is_err());
        assert!(matches!(
            solve_shooting(&ShootingInput::new(d, 0.0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_index_out_of_range() {
        let r = solve(4, 1.0);
        assert!(r.zero(4).is_err());
        assert!(r.zero(0).is_err());
    }
}
