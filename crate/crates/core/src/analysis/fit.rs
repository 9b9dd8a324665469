use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// `value = prefactor * gamma^exponent`
    Power,
    /// `value = prefactor * (ln gamma)^exponent`
    Log,
    /// `value = prefactor`
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub model: FitModel,
    /// Zero for the constant model.
    pub exponent: f64,
    /// Fitted prefactor; the mean for the constant model.
    pub prefactor: f64,
    /// RMS residual in log space (power, log) or in value (constant).
    pub rms_residual: f64,
    /// Largest absolute deviation from the mean (constant model only).
    pub max_deviation: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub n_points: usize,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, icpt, rms)
}

/// Least-squares fit of `(gamma, value)` pairs.
pub fn fit_power_law(points: &[(f64, f64)], model: FitModel) -> Result<FitReport> {
    if points.len() < 4 {
        return Err(Error::domain(format!(
            "fits need at least 4 points, got {}",
            points.len()
        )));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::domain("gamma values must be strictly increasing"));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::domain("fit data must be finite"));
    }
    let gamma_min = points[0].0;
    let gamma_max = points[points.len() - 1].0;
    let n_points = points.len();
    let positive = |what: &str| -> Result<()> {
        if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::domain(format!(
                "{what} model needs positive values, got {} at gamma = {}",
                p.1, p.0
            )));
        }
        Ok(())
    };
    let report = match model {
        FitModel::Power | FitModel::Log => {
            positive(if model == FitModel::Power { "power" } else { "log" })?;
            let xs: Vec<f64> = match model {
                FitModel::Power => points.iter().map(|p| p.0.ln()).collect(),
                _ => {
                    if gamma_min <= 1.0 {
                        return Err(Error::domain("log model needs gamma > 1"));
                    }
                    points.iter().map(|p| p.0.ln().ln()).collect()
                }
            };
            let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
            let (slope, icpt, rms) = line_fit(&xs, &ys);
            FitReport {
                model,
                exponent: slope,
                prefactor: icpt.exp(),
                rms_residual: rms,
                max_deviation: 0.0,
                gamma_min,
                gamma_max,
                n_points,
            }
        }
        FitModel::Constant => {
            let n = n_points as f64;
            let mean = points.iter().map(|p| p.1).sum::<f64>() / n;
            let rms = (points.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / n).sqrt();
            let max_dev = points.iter().map(|p| (p.1 - mean).abs()).fold(0.0, f64::max);
            FitReport {
                model,
                exponent: 0.0,
                prefactor: mean,
                rms_residual: rms,
                max_deviation: max_dev,
                gamma_min,
                gamma_max,
                n_points,
            }
        }
    };
    Ok(report)
}
