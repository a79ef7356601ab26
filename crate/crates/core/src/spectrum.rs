//! Level spectra whose energies scale as the inverse square of the width.
//!
//! Everything is in natural units: for the square well the combination
//! `π²ℏ²/(2m)` is set to one, so `E_n(V) = n²/V²`; for the harmonic
//! oscillator `ℏ = 1` and the width is the characteristic length `1/√ω`,
//! so `E_n(V) = (n + 1/2)/V²`. Both models therefore share one equation
//! of state, only the level coefficients differ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Relative slack allowed when a constraint value sits on the ground level
/// but was produced by floating-point arithmetic (for instance `V4·√E_C`).
pub(crate) const GROUND_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumModel {
    /// Particle in an infinite one-dimensional well, `c(n) = n²`, `n ≥ 1`.
    SquareWell,
    /// Harmonic oscillator, `c(n) = n + 1/2`, `n ≥ 0`.
    Harmonic,
}

impl SpectrumModel {
    /// First level index of the model's own indexing.
    pub fn n_min(self) -> usize {
        match self {
            SpectrumModel::SquareWell => 1,
            SpectrumModel::Harmonic => 0,
        }
    }

    /// Dimensionless level coefficient `c(n)`; no range check.
    #[inline]
    pub fn coefficient(self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            SpectrumModel::SquareWell => x * x,
            SpectrumModel::Harmonic => x + 0.5,
        }
    }

    /// `c(n_min)`, the smallest admissible value of `λ_eff²`.
    pub fn ground_coefficient(self) -> f64 {
        self.coefficient(self.n_min())
    }

    /// The `count` lowest coefficients, starting at `n_min`.
    pub fn coefficients(self, count: usize) -> Vec<f64> {
        (self.n_min()..self.n_min() + count)
            .map(|n| self.coefficient(n))
            .collect()
    }

    fn check_level(self, n: usize) -> Result<()> {
        if n < self.n_min() {
            return Err(Error::Domain(format!(
                "level {n} is below the first level {} of the {self} spectrum",
                self.n_min()
            )));
        }
        Ok(())
    }

    /// `E_n(V) = c(n)/V²`.
    pub fn level_energy(self, n: usize, width: f64) -> Result<f64> {
        self.check_level(n)?;
        ensure_positive("width", width)?;
        Ok(self.coefficient(n) / (width * width))
    }

    /// Force exerted on the walls by level `n`, `f_n = -dE_n/dV = 2c(n)/V³`.
    ///
    /// Evaluated as `2·E_n/V` so that `f_n·V = 2·E_n` up to a single rounding.
    pub fn level_force(self, n: usize, width: f64) -> Result<f64> {
        let energy = self.level_energy(n, width)?;
        Ok(2.0 * energy / width)
    }

    /// Classifies `lambda_sq` against the ground coefficient.
    ///
    /// Returns `Ok(true)` when the value is on the ground level within
    /// rounding slack, `Ok(false)` when above it.
    pub(crate) fn classify_constraint(self, lambda_sq: f64) -> Result<bool> {
        let ground = self.ground_coefficient();
        if !lambda_sq.is_finite() {
            return Err(Error::Domain(format!("lambda_eff^2 must be finite, got {lambda_sq}")));
        }
        if lambda_sq < ground * (1.0 - GROUND_SLACK) {
            return Err(Error::Infeasible { lambda_sq, ground });
        }
        Ok(lambda_sq <= ground * (1.0 + GROUND_SLACK))
    }
}

impl fmt::Display for SpectrumModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumModel::SquareWell => "square-well",
            SpectrumModel::Harmonic => "harmonic",
        })
    }
}

impl FromStr for SpectrumModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square-well" | "square_well" | "squarewell" => Ok(SpectrumModel::SquareWell),
            "harmonic" => Ok(SpectrumModel::Harmonic),
            other => Err(Error::Domain(format!("unknown spectrum model `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energies_in_natural_units() {
        let sw = SpectrumModel::SquareWell;
        assert_eq!(sw.level_energy(1, 1.0).unwrap(), 1.0);
        assert_eq!(sw.level_energy(3, 2.0).unwrap(), 2.25);
        assert_eq!(SpectrumModel::Harmonic.level_energy(0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn forces() {
        let sw = SpectrumModel::SquareWell;
        assert_eq!(sw.level_force(1, 1.0).unwrap(), 2.0);
        assert_eq!(sw.level_force(2, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let sw = SpectrumModel::SquareWell;
        assert!(matches!(sw.level_energy(0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(sw.level_energy(1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(sw.level_force(1, -2.0), Err(Error::Domain(_))));
        assert!(SpectrumModel::Harmonic.level_energy(0, f64::NAN).is_err());
    }

    #[test]
    fn coefficients_strictly_increasing_and_positive() {
        for model in [SpectrumModel::SquareWell, SpectrumModel::Harmonic] {
            let c = model.coefficients(200);
            assert!(c[0] > 0.0);
            assert!(c.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn ground_classification() {
        let sw = SpectrumModel::SquareWell;
        assert_eq!(sw.classify_constraint(1.0), Ok(true));
        assert_eq!(sw.classify_constraint(1.0 - 1e-16), Ok(true));
        assert_eq!(sw.classify_constraint(1.0 + 4e-16), Ok(true));
        assert_eq!(sw.classify_constraint(1.5), Ok(false));
        assert!(matches!(sw.classify_constraint(0.25), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn parses_model_names() {
        assert_eq!("square-well".parse::<SpectrumModel>().unwrap(), SpectrumModel::SquareWell);
        assert_eq!("harmonic".parse::<SpectrumModel>().unwrap(), SpectrumModel::Harmonic);
        assert!("morse".parse::<SpectrumModel>().is_err());
    }
}
