use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::transform::RadialProfile;

/// Energy `J(u) = (int |grad u|^2 - lambda u^2) / 2 - int |u|^2* / 2*` of a
/// profile and of its positive and negative parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub j_plus: f64,
    pub j_minus: f64,
    pub j_total: f64,
    pub dirichlet_plus: f64,
    pub dirichlet_minus: f64,
    pub l2_plus: f64,
    pub l2_minus: f64,
    pub lcrit_plus: f64,
    pub lcrit_minus: f64,
    /// `|D - lambda L2 - C| / D` for the positive part.
    pub nehari_residual_plus: f64,
    pub nehari_residual_minus: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Integrals {
    d: f64,
    l2: f64,
    c: f64,
}

const RULE_POINTS: usize = 8;

/// Integrates over the orbit in `x = -ln t` between `x_lo` and `x_hi`.
///
/// Returns `int w^2 (T/t) dx`, `int y^2 (T/t)^(N/m) dx` and
/// `int |y|^2* (T/t)^(N/m) dx`, i.e. the radial integrals up to constants.
fn orbit_integrals(profile: &RadialProfile, rule: &GaussLegendre, x_lo: f64, x_hi: f64) -> Integrals {
    let dim = &profile.dim;
    let traj = profile.trajectory();
    let n_over_m = dim.nf() / dim.m();
    let ln_scale = profile.scale.ln();
    let mut out = Integrals::default();
    for w in traj.breakpoints().windows(2) {
        let a = w[0].x.max(x_lo);
        let b = w[1].x.min(x_hi);
        if b <= a {
            continue;
        }
        // two panels per step keep the quintic interpolant well inside the rule's degree
        let mid = 0.5 * (a + b);
        for (p, q) in [(a, mid), (mid, b)] {
            rule.for_each(p, q, |x, wt| {
                let (y, wv) = traj.eval_x(x);
                let r_m = (ln_scale + x).exp();
                let r_n = (n_over_m * (ln_scale + x)).exp();
                out.d += wt * wv * wv * r_m;
                out.l2 += wt * y * y * r_n;
                out.c += wt * y.abs().powf(dim.two_star) * r_n;
            });
        }
    }
    out
}

/// Energies by quadrature along the orbit plus a closed-form tail for
/// `t > t_start`, where `y` is replaced by its one-term asymptotics.
pub fn energy(profile: &RadialProfile) -> Result<EnergyReport> {
    let dim = &profile.dim;
    let m = dim.m();
    let k = dim.k;
    let n_over_m = dim.nf() / m;
    let gamma = profile.gamma;
    let omega = dim.sphere_area();
    let amp2 = profile.amplitude * profile.amplitude;
    let lambda = profile.lambda;
    let scale = profile.scale;
    let rule = GaussLegendre::new(RULE_POINTS);

    let x_start = -profile.t_start().ln();
    let x_t1 = -profile.zeros[0].ln();
    let mut plus = orbit_integrals(profile, &rule, x_start, x_t1);

    // tail t > t_start: y' ~ f t^(1-k) / (k-1), y ~ gamma
    let ts = profile.t_start();
    let fg = dim.f(gamma);
    let rs_n = (scale / ts).powf(n_over_m);
    plus.d += fg * fg / ((k - 1.0) * (k - 1.0)) * scale * ts.powf(3.0 - 2.0 * k) / (2.0 * k - 3.0);
    plus.l2 += gamma * gamma * rs_n / n_over_m;
    plus.c += gamma.powf(dim.two_star) * rs_n / n_over_m;

    let minus = if profile.n_nodal == 2 {
        let x_t2 = -profile.zeros[1].ln();
        orbit_integrals(profile, &rule, x_t1, x_t2)
    } else {
        Integrals::default()
    };

    // D = omega L^2 m T int y'^2 dt; L2 = omega L^2 / m T^(N/m) int y^2 t^(-N/m-1) dt;
    // C = omega lambda^(N/2) / m T^(N/m) int |y|^2* t^(-N/m-1) dt
    let crit_amp = lambda.powf(dim.nf() / 2.0);
    let scaled = |i: Integrals| {
        (
            omega * amp2 * m * i.d,
            omega * amp2 / m * i.l2,
            omega * crit_amp / m * i.c,
        )
    };
    let (dp, lp, cp) = scaled(plus);
    let (dm, lm, cm) = scaled(minus);
    for v in [dp, lp, cp, dm, lm, cm] {
        if !v.is_finite() {
            return Err(Error::numeric("energy quadrature", format!("non-finite integral {v}")));
        }
    }
    let j = |d: f64, l: f64, c: f64| 0.5 * (d - lambda * l) - c / dim.two_star;
    let nehari = |d: f64, l: f64, c: f64| if d > 0.0 { (d - lambda * l - c).abs() / d } else { 0.0 };
    let j_plus = j(dp, lp, cp);
    let j_minus = j(dm, lm, cm);
    Ok(EnergyReport {
        j_plus,
        j_minus,
        j_total: j_plus + j_minus,
        dirichlet_plus: dp,
        dirichlet_minus: dm,
        l2_plus: lp,
        l2_minus: lm,
        lcrit_plus: cp,
        lcrit_minus: cm,
        nehari_residual_plus: nehari(dp, lp, cp),
        nehari_residual_minus: nehari(dm, lm, cm),
    })
}
