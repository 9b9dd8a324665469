use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// Stored state at one breakpoint.
///
/// The integration variable is `x = -ln t`; the state is `(y, w)` with
/// `w = t y'`. `dy`, `dw` and `ddy`, `ddw` are first and second derivatives
/// with respect to `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub t: f64,
    pub y: f64,
    pub y_prime: f64,
    #[serde(skip)]
    pub(crate) x: f64,
    #[serde(skip)]
    pub(crate) w: f64,
    #[serde(skip)]
    pub(crate) dy: f64,
    #[serde(skip)]
    pub(crate) dw: f64,
    #[serde(skip)]
    pub(crate) ddy: f64,
    #[serde(skip)]
    pub(crate) ddw: f64,
}

impl Breakpoint {
    pub(crate) fn new(x: f64, z: [f64; 2], dz: [f64; 2], ddz: [f64; 2]) -> Self {
        let t = (-x).exp();
        Self {
            t,
            y: z[0],
            y_prime: z[1] / t,
            x,
            w: z[1],
            dy: dz[0],
            dw: dz[1],
            ddy: ddz[0],
            ddw: ddz[1],
        }
    }
}

/// Dense solution of the Emden-Fowler problem between `t_min` and `t_start`.
///
/// Breakpoints are ordered by decreasing `t`. Between breakpoints both `y`
/// and `w = t y'` are quintic Hermite interpolants in `x = -ln t`, matching
/// values, first and second derivatives at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    points: Vec<Breakpoint>,
}

#[inline]
fn hermite(s: f64, h: f64, left: (f64, f64, f64), right: (f64, f64, f64)) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    h0 * left.0
        + h * (h1 * left.1 + h4 * right.1)
        + h * h * (h2 * left.2 + h3 * right.2)
        + h5 * right.0
}

impl Trajectory {
    pub(crate) fn new(points: Vec<Breakpoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].x < w[1].x));
        Self { points }
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn t_start(&self) -> f64 {
        self.points[0].t
    }

    pub fn t_min(&self) -> f64 {
        self.points[self.points.len() - 1].t
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(y, y')` at `t`; `t` must lie in `[t_min, t_start]`.
    pub fn evaluate(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= self.t_min() && t <= self.t_start()) {
            return Err(Error::domain(format!(
                "t = {t} outside trajectory range [{}, {}]",
                self.t_min(),
                self.t_start()
            )));
        }
        // exact hits return the stored values
        let found = self
            .points
            .binary_search_by(|p| t.partial_cmp(&p.t).unwrap_or(Ordering::Equal));
        if let Ok(i) = found {
            let p = &self.points[i];
            return Ok((p.y, p.y_prime));
        }
        let (y, w) = self.eval_x(-t.ln());
        Ok((y, w / t))
    }

    /// `(y, w)` as functions of `x = -ln t`, clamped to the stored range.
    pub(crate) fn eval_x(&self, x: f64) -> (f64, f64) {
        let pts = &self.points;
        let last = pts.len() - 1;
        let i = match pts.binary_search_by(|p| p.x.partial_cmp(&x).unwrap_or(Ordering::Equal)) {
            Ok(i) => return (pts[i].y, pts[i].w),
            Err(0) => return (pts[0].y, pts[0].w),
            Err(i) if i > last => return (pts[last].y, pts[last].w),
            Err(i) => i - 1,
        };
        let (a, b) = (&pts[i], &pts[i + 1]);
        let h = b.x - a.x;
        let s = (x - a.x) / h;
        (
            hermite(s, h, (a.y, a.dy, a.ddy), (b.y, b.dy, b.ddy)),
            hermite(s, h, (a.w, a.dw, a.ddw), (b.w, b.dw, b.ddw)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trajectory {
        // y = sin(x), w = cos(x) stored on a coarse grid
        let xs: Vec<f64> = (0..=20).map(|i| -3.0 + 0.15 * i as f64).collect();
        Trajectory::new(
            xs.iter()
                .map(|&x| {
                    Breakpoint::new(x, [x.sin(), x.cos()], [x.cos(), -x.sin()], [-x.sin(), -x.cos()])
                })
                .collect(),
        )
    }

    #[test]
    fn reproduces_breakpoints() {
        let tr = sample();
        for p in tr.breakpoints() {
            assert_eq!(tr.evaluate(p.t).unwrap(), (p.y, p.y_prime));
        }
    }

    #[test]
    fn sixth_order_interpolation() {
        let tr = sample();
        let mut worst: f64 = 0.0;
        for i in 0..300 {
            let x = -2.99 + 0.01 * i as f64;
            let (y, w) = tr.eval_x(x);
            worst = worst.max((y - x.sin()).abs()).max((w - x.cos()).abs());
        }
        // h^6 / 46080 with h = 0.15
        assert!(worst < 0.15f64.powi(6) / 46080.0 * 1.1, "{worst}");
    }

    #[test]
    fn rejects_out_of_range() {
        let tr = sample();
        assert!(tr.evaluate(tr.t_start() * 1.01).is_err());
        assert!(tr.evaluate(tr.t_min() * 0.99).is_err());
    }
}
