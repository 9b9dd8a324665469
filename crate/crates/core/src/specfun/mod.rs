//! Special functions: Gamma, Bessel `J_nu`, the linearised Emden-Fowler
//! solution `alpha`, radial Dirichlet eigenvalues of the unit ball, the
//! Sobolev constant and the radial bubble.

mod alpha;
mod bessel;
mod dimension;
mod gamma;
mod sobolev;

pub use alpha::{alpha_fn, alpha_zero, radial_eigenfunction, radial_eigenvalue};
pub use bessel::{bessel_j, bessel_j_normalised, bessel_j_zero};
pub use dimension::DimensionParams;
pub use gamma::gamma_fn;
pub use sobolev::{bubble_energy, bubble_eval, sobolev_constant, BubbleSpec};


/// The two readings of the prefactor in `T_1(gamma) ~ A(k) gamma^(6-2k)`
/// for `2 < k < 3`. The printed formula is ambiguous about whether the
/// first Gamma factor is `Gamma(3-k)/(k-2)` or `Gamma((3-k)/(k-2))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PrefactorCandidates {
    /// `(k-1)^((k-3)/(k-2)) * [Gamma(3-k)/(k-2)] * Gamma((k-1)/(k-2)) / Gamma(2/(k-2))`
    pub split_quotient: f64,
    /// `(k-1)^((k-3)/(k-2)) * Gamma((3-k)/(k-2)) * Gamma((k-1)/(k-2)) / Gamma(2/(k-2))`
    pub gamma_of_quotient: f64,
}

pub fn zero_prefactor_candidates(k: f64) -> crate::Result<PrefactorCandidates> {
    if !(k > 2.0 && k < 3.0) {
        return Err(crate::Error::Domain(format!(
            "prefactor A(k) is defined for 2 < k < 3, got {k}"
        )));
    }
    let common = (k - 1.0).powf((k - 3.0) / (k - 2.0)) * gamma_fn((k - 1.0) / (k - 2.0))?
        / gamma_fn(2.0 / (k - 2.0))?;
    Ok(PrefactorCandidates {
        split_quotient: common * gamma_fn(3.0 - k)? / (k - 2.0),
        gamma_of_quotient: common * gamma_fn((3.0 - k) / (k - 2.0))?,
    })
}
