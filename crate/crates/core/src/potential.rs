//! Mean-zero, 1-periodic driving potentials as finite trigonometric series.
//!
//! ```text
//! psi(x) = sum_{k=1..K} a_k cos(2 pi k x) + b_k sin(2 pi k x)
//! ```
//!
//! There is no constant mode, so the period mean of `psi` is zero exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Grid used by [`PeriodicPotential::is_antisymmetric`].
const SYMMETRY_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialCoeffs", into = "PotentialCoeffs")]
pub struct PeriodicPotential {
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

/// Wire form: `{"cos": [...], "sin": [...]}`, coefficient `k` at index `k-1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialCoeffs {
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl TryFrom<PotentialCoeffs> for PeriodicPotential {
    type Error = crate::Error;

    fn try_from(c: PotentialCoeffs) -> Result<Self> {
        PeriodicPotential::new(c.cos, c.sin)
    }
}

impl From<PeriodicPotential> for PotentialCoeffs {
    fn from(p: PeriodicPotential) -> Self {
        PotentialCoeffs {
            cos: p.cos_coeffs,
            sin: p.sin_coeffs,
        }
    }
}

impl PeriodicPotential {
    /// Builds a potential from cosine and sine coefficients of equal length.
    pub fn new(cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if cos_coeffs.len() != sin_coeffs.len() {
            return Err(invalid(format!(
                "coefficient lists differ in length ({} cos, {} sin)",
                cos_coeffs.len(),
                sin_coeffs.len()
            )));
        }
        if let Some(bad) = cos_coeffs
            .iter()
            .chain(&sin_coeffs)
            .find(|c| !c.is_finite())
        {
            return Err(invalid(format!("non-finite coefficient {bad}")));
        }
        Ok(Self {
            cos_coeffs,
            sin_coeffs,
        })
    }

    pub fn zero() -> Self {
        Self {
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    /// `amplitude * sin(2 pi x)`, the standard test potential.
    pub fn sine(amplitude: f64) -> Self {
        Self {
            cos_coeffs: vec![0.0],
            sin_coeffs: vec![amplitude],
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.cos_coeffs.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .all(|&c| c == 0.0)
    }

    /// Sum of coefficient magnitudes; bounds `|psi|` from above.
    pub fn coeff_l1(&self) -> f64 {
        self.cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .map(|c| c.abs())
            .sum()
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.cos_coeffs
            .iter()
            .zip(&self.sin_coeffs)
            .enumerate()
            .map(|(i, (&a, &b))| ((i + 1) as f64, a, b))
    }

    pub fn eval(&self, x: f64) -> f64 {
        // Reducing the argument first keeps eval(x + 1) == eval(x) to rounding.
        let x = x.rem_euclid(1.0);
        self.terms()
            .map(|(k, a, b)| {
                let (s, c) = (TAU * k * x).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        let x = x.rem_euclid(1.0);
        self.terms()
            .map(|(k, a, b)| {
                let (s, c) = (TAU * k * x).sin_cos();
                TAU * k * (b * c - a * s)
            })
            .sum()
    }

    /// Samples `psi` on the uniform grid `i / n`, `i = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }

    /// The mirrored potential `x -> psi(-x)`.
    pub fn mirrored(&self) -> Self {
        Self {
            cos_coeffs: self.cos_coeffs.clone(),
            sin_coeffs: self.sin_coeffs.iter().map(|b| -b).collect(),
        }
    }

    /// Trapezoid value of the `j`-th moment `int_0^1 psi^j`.
    ///
    /// Requires `n_points >= 4 K j`, which makes the uniform rule exact for the
    /// trigonometric polynomial `psi^j`.
    pub fn moment(&self, j: u32, n_points: usize) -> Result<f64> {
        if j == 0 {
            return Ok(1.0);
        }
        let needed = (4 * self.bandwidth() * j as usize).max(1);
        if n_points < needed {
            return Err(invalid(format!(
                "moment of order {j} needs at least {needed} points, got {n_points}"
            )));
        }
        let sum: f64 = (0..n_points)
            .map(|i| self.eval(i as f64 / n_points as f64).powi(j as i32))
            .sum();
        Ok(sum / n_points as f64)
    }

    /// Checks `psi(x) = -psi(-x)` on a 256-point grid.
    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..SYMMETRY_GRID).all(|i| {
            let x = i as f64 / SYMMETRY_GRID as f64;
            (self.eval(x) + self.eval(-x)).abs() <= tol
        })
    }
}
