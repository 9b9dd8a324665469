//! Dormand-Prince 5(4) explicit Runge-Kutta pair with PI step-size control.
//!
//! The stepper only advances; callers own the event logic and keep the
//! accepted steps they need.

use crate::error::{Error, Result};

/// Right-hand side of `z' = F(x, z)`.
pub trait System<const D: usize> {
    fn rhs(&self, x: f64, z: &[f64; D]) -> [f64; D];
}

impl<const D: usize, F> System<D> for F
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    fn rhs(&self, x: f64, z: &[f64; D]) -> [f64; D] {
        self(x, z)
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// fifth-order weights; also the last stage row (FSAL)
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// B - B*, with the seventh (FSAL) stage
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_max: f64,
    /// Minimum step relative to `1 + |x|`.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_max: f64::INFINITY,
            h_min_rel: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

/// Result of a trial step.
struct Trial<const D: usize> {
    z: [f64; D],
    dz: [f64; D],
    err: f64,
}

#[inline]
fn axpy<const D: usize>(z: &[f64; D], h: f64, terms: &[(&[f64; D], f64)]) -> [f64; D] {
    let mut out = *z;
    for (k, a) in terms {
        for i in 0..D {
            out[i] += h * a * k[i];
        }
    }
    out
}

/// One Dormand-Prince step of length `h` from `(x, z)` with `dz = F(x, z)`.
/// Returns the fifth-order solution and its derivative at `x + h`, plus the
/// embedded error estimate per component.
pub fn dp_step<const D: usize, S: System<D>>(
    sys: &S,
    x: f64,
    z: &[f64; D],
    dz: &[f64; D],
    h: f64,
) -> ([f64; D], [f64; D], [f64; D]) {
    let k1 = *dz;
    let k2 = sys.rhs(x + C[1] * h, &axpy(z, h, &[(&k1, A21)]));
    let k3 = sys.rhs(x + C[2] * h, &axpy(z, h, &[(&k1, A3[0]), (&k2, A3[1])]));
    let k4 = sys.rhs(
        x + C[3] * h,
        &axpy(z, h, &[(&k1, A4[0]), (&k2, A4[1]), (&k3, A4[2])]),
    );
    let k5 = sys.rhs(
        x + C[4] * h,
        &axpy(z, h, &[(&k1, A5[0]), (&k2, A5[1]), (&k3, A5[2]), (&k4, A5[3])]),
    );
    let k6 = sys.rhs(
        x + C[5] * h,
        &axpy(
            z,
            h,
            &[(&k1, A6[0]), (&k2, A6[1]), (&k3, A6[2]), (&k4, A6[3]), (&k5, A6[4])],
        ),
    );
    let z_new = axpy(
        z,
        h,
        &[(&k1, B[0]), (&k3, B[2]), (&k4, B[3]), (&k5, B[4]), (&k6, B[5])],
    );
    let k7 = sys.rhs(x + h, &z_new);
    let mut err = [0.0; D];
    for i in 0..D {
        err[i] = h
            * (E[0] * k1[i] + E[2] * k3[i] + E[3] * k4[i] + E[4] * k5[i] + E[5] * k6[i] + E[6] * k7[i]);
    }
    (z_new, k7, err)
}

/// One accepted step `[x0, x1]` with states and derivatives at both ends.
#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep<const D: usize> {
    pub x0: f64,
    pub z0: [f64; D],
    pub dz0: [f64; D],
    pub x1: f64,
    pub z1: [f64; D],
    pub dz1: [f64; D],
}

/// Adaptive stepper advancing in the positive `x` direction.
pub struct Stepper<'a, S, const D: usize> {
    sys: &'a S,
    ctrl: StepControl,
    x: f64,
    z: [f64; D],
    dz: [f64; D],
    h: f64,
    err_prev: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl<'a, S: System<D>, const D: usize> Stepper<'a, S, D> {
    pub fn new(sys: &'a S, ctrl: StepControl, x0: f64, z0: [f64; D], h0: f64) -> Self {
        let dz = sys.rhs(x0, &z0);
        Self {
            sys,
            ctrl,
            x: x0,
            z: z0,
            dz,
            h: h0.min(ctrl.h_max),
            err_prev: 1e-4,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn state(&self) -> [f64; D] {
        self.z
    }

    fn trial(&self, h: f64) -> Trial<D> {
        let (z, dz, e) = dp_step(self.sys, self.x, &self.z, &self.dz, h);
        let mut err: f64 = 0.0;
        for i in 0..D {
            let scale = self.ctrl.abs_tol + self.ctrl.rel_tol * self.z[i].abs().max(z[i].abs());
            err = err.max((e[i] / scale).abs());
        }
        Trial { z, dz, err }
    }

    /// Takes one accepted step, shrinking the trial step as often as needed.
    pub fn advance(&mut self) -> Result<AcceptedStep<D>> {
        const SAFETY: f64 = 0.9;
        const BETA: f64 = 0.04;
        const ALPHA: f64 = 0.2 - 0.75 * BETA;
        if self.accepted + self.rejected >= self.ctrl.max_steps {
            return Err(Error::numeric(
                "integrator",
                format!(
                    "step budget of {} exhausted at x = {:.6e}, state = {:?}",
                    self.ctrl.max_steps, self.x, self.z
                ),
            ));
        }
        let mut rejected_here = false;
        loop {
            let h = self.h;
            if !(h > self.ctrl.h_min_rel * (1.0 + self.x.abs())) {
                return Err(Error::numeric(
                    "integrator",
                    format!(
                        "step size underflow (h = {h:.3e}) at x = {:.12e}; last good state {:?}",
                        self.x, self.z
                    ),
                ));
            }
            let trial = self.trial(h);
            if trial.err.is_finite() && trial.err <= 1.0 {
                let err = trial.err.max(1e-10);
                let mut fac = SAFETY * err.powf(-ALPHA) * self.err_prev.powf(BETA);
                fac = fac.clamp(0.2, 10.0);
                if rejected_here {
                    fac = fac.min(1.0);
                }
                let step = AcceptedStep {
                    x0: self.x,
                    z0: self.z,
                    dz0: self.dz,
                    x1: self.x + h,
                    z1: trial.z,
                    dz1: trial.dz,
                };
                self.x += h;
                self.z = trial.z;
                self.dz = trial.dz;
                self.err_prev = err;
                self.h = (h * fac).min(self.ctrl.h_max);
                self.accepted += 1;
                return Ok(step);
            }
            self.rejected += 1;
            rejected_here = true;
            let fac = if trial.err.is_finite() {
                (SAFETY * trial.err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            self.h = h * fac;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let sys = |_x: f64, z: &[f64; 2]| [z[1], -z[0]];
        let ctrl = StepControl {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..Default::default()
        };
        let mut st = Stepper::new(&sys, ctrl, 0.0, [1.0, 0.0], 1e-3);
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut last = None;
        while st.x() < two_pi {
            last = Some(st.advance().unwrap());
        }
        let step = last.unwrap();
        // land exactly on 2 pi with a partial step from the last accepted start
        let (z, _, _) = dp_step(&sys, step.x0, &step.z0, &step.dz0, two_pi - step.x0);
        assert!((z[0] - 1.0).abs() < 1e-9, "{z:?}");
        assert!(z[1].abs() < 1e-9);
    }

    #[test]
    fn fifth_order_convergence() {
        // z' = z: error of one step scales like h^6
        let sys = |_x: f64, z: &[f64; 1]| [z[0]];
        let err = |h: f64| {
            let (z, _, _) = dp_step(&sys, 0.0, &[1.0], &[1.0], h);
            (z[0] - h.exp()).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!(ratio > 50.0 && ratio < 80.0, "ratio {ratio}");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let sys = |_x: f64, z: &[f64; 1]| [z[0]];
        let ctrl = StepControl {
            max_steps: 3,
            h_max: 1e-3,
            ..Default::default()
        };
        let mut st = Stepper::new(&sys, ctrl, 0.0, [1.0], 1e-3);
        for _ in 0..3 {
            st.advance().unwrap();
        }
        assert!(matches!(st.advance(), Err(Error::Numeric { .. })));
    }
}
