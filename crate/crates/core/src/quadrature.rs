use std::f64::consts::PI;

use crate::specfun::DimensionParams;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                dp = 1.0;
                x = 0.0;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n == 1 {
            weights[0] = 2.0;
        }
        Self { nodes, weights }
    }

    /// Calls `f(x, weight)` for every node mapped to `[a, b]`.
    pub fn for_each(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64)) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            f(c + h * x, w * h);
        }
    }

    /// `int_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

/// Dirichlet, `L^2` and `L^2*` integrals of a radial function over a ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNorms {
    /// `int |grad u|^2`
    pub dirichlet: f64,
    /// `int u^2`
    pub l2: f64,
    /// `int |u|^2*`
    pub lcrit: f64,
}

/// Radial integrals over the ball of radius `radius` by composite
/// Gauss-Legendre quadrature on panels that are geometric above `core` and
/// uniform below it.
///
/// `eval(r)` returns `(u(r), u'(r))`.
pub fn radial_norms(
    dim: &DimensionParams,
    radius: f64,
    core: f64,
    panels: usize,
    eval: impl Fn(f64) -> (f64, f64),
) -> RadialNorms {
    let rule = GaussLegendre::new(10);
    let mut edges = Vec::new();
    let core = core.min(radius);
    let inner = (panels / 10).max(1);
    for i in 0..inner {
        edges.push(core * i as f64 / inner as f64);
    }
    let outer = panels.saturating_sub(inner).max(1);
    let ratio = (radius / core).ln();
    for i in 0..=outer {
        edges.push(core * (ratio * i as f64 / outer as f64).exp());
    }
    *edges.last_mut().unwrap() = radius;
    let omega = dim.sphere_area();
    let n1 = dim.nf() - 1.0;
    let q = dim.two_star;
    let mut acc = RadialNorms { dirichlet: 0.0, l2: 0.0, lcrit: 0.0 };
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (mut d, mut l, mut c) = (0.0, 0.0, 0.0);
        rule.for_each(w[0], w[1], |r, wt| {
            let (u, du) = eval(r);
            let jac = wt * r.powf(n1);
            d += du * du * jac;
            l += u * u * jac;
            c += u.abs().powf(q) * jac;
        });
        acc.dirichlet += d;
        acc.l2 += l;
        acc.lcrit += c;
    }
    RadialNorms {
        dirichlet: omega * acc.dirichlet,
        l2: omega * acc.l2,
        lcrit: omega * acc.lcrit,
    }
}
