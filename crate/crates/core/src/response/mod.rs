//! Inverse direction: from the response current back to the potential.
//!
//! The correlation function
//!
//! ```text
//! F(sigma, z) = int_0^1 exp((psi(x) - psi(x + z)) / sigma) dx
//! ```
//!
//! is tied to the reduced current by
//! `int_{-1}^0 e^{-V z/sigma} F(sigma, z) dz = (e^{V/sigma} - 1) / J(V, sigma)`.
//! At `V = 0` this gives the resistance `(dI/dV)^{-1} = int_{-1}^0 F dz`,
//! whose expansion in `1/sigma` carries the moments of `psi`.

mod inversion;
mod series;

pub use inversion::{gaver_stehfest_recover_F, stehfest_coefficients, InversionEstimate};
pub use series::{
    fit_series_coefficients, recover_even_moments, recover_moments,
    series_coefficients_from_moments, SeriesFit, MAX_CONDITION, MAX_FIT_ORDER, MAX_SERIES_ORDER,
    MIN_FIT_SIGMA,
};

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::fmt_sig;
use crate::potential::PeriodicPotential;
use crate::quadrature::CompositeGauss;
use crate::steady::{reduced_current, steady_current, ChannelParams, QuadratureSpec, EXP_LIMIT};

/// `F(sigma, z)` on `z_j = -1 + j/m`, `j = 0..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub sigma: f64,
    pub z_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CorrelationProfile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "z,F")?;
        for (z, f) in self.z_grid.iter().zip(&self.values) {
            writeln!(out, "{},{}", fmt_sig(*z), fmt_sig(*f))?;
        }
        Ok(())
    }
}

/// Zero-voltage resistance sampled over temperatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceCurve {
    pub sigmas: Vec<f64>,
    pub resistance: Vec<f64>,
}

impl ResistanceCurve {
    pub fn new(sigmas: Vec<f64>, resistance: Vec<f64>) -> Result<Self> {
        if sigmas.len() != resistance.len() {
            return Err(invalid("sigma and resistance lengths differ"));
        }
        if sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid("sigmas must be positive and finite"));
        }
        if resistance.iter().any(|r| !r.is_finite()) {
            return Err(invalid("resistance values must be finite"));
        }
        Ok(Self { sigmas, resistance })
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "sigma,R")?;
        for (s, r) in self.sigmas.iter().zip(&self.resistance) {
            writeln!(out, "{},{}", fmt_sig(*s), fmt_sig(*r))?;
        }
        Ok(())
    }
}

/// Output of the moment pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecovery {
    #[serde(rename = "c")]
    pub coeffs: Vec<f64>,
    #[serde(rename = "M_even")]
    pub even_moments: Vec<f64>,
    #[serde(rename = "residual")]
    pub fit_residual: f64,
    #[serde(rename = "condition")]
    pub condition_estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "sigma must be positive and finite, got {sigma}"
        )))
    }
}

/// Same guard as the steady weights: `|psi(x) - psi(y)| / sigma <= 2 sum|c| / sigma`.
fn exponent_guard(p: &PeriodicPotential, sigma: f64) -> Result<()> {
    check_sigma(sigma)?;
    let bound = 2.0 * p.coeff_l1() / sigma;
    if bound > EXP_LIMIT {
        return Err(Error::OverflowRisk {
            bound,
            limit: EXP_LIMIT,
        });
    }
    Ok(())
}

/// `e^{psi/sigma}` and `e^{-psi/sigma}` on `x_i = i/n`.
fn boltzmann_factors(p: &PeriodicPotential, sigma: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let psi = p.sample(n);
    let up = psi.iter().map(|v| (v / sigma).exp()).collect();
    let down = psi.iter().map(|v| (-v / sigma).exp()).collect();
    (up, down)
}

/// Trapezoid value of `F(sigma, z)` with `q.n_points()` nodes in `x`.
#[allow(non_snake_case)]
pub fn correlation_F(p: &PeriodicPotential, sigma: f64, z: f64, q: QuadratureSpec) -> Result<f64> {
    exponent_guard(p, sigma)?;
    if !z.is_finite() {
        return Err(invalid(format!("z must be finite, got {z}")));
    }
    if p.is_zero() {
        return Ok(1.0);
    }
    let n = q.n_points();
    let total: f64 = (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            ((p.eval(x) - p.eval(x + z)) / sigma).exp()
        })
        .sum();
    Ok(total / n as f64)
}

/// `F(sigma, -1 + j/n)` for `j = 0..=n` from grid products.
fn profile_values(p: &PeriodicPotential, sigma: f64, n: usize) -> Vec<f64> {
    if p.is_zero() {
        return vec![1.0; n + 1];
    }
    let (up, down) = boltzmann_factors(p, sigma, n);
    // x_i + z_j lands on node (i + j) mod n
    let mut values: Vec<f64> = (0..n)
        .map(|j| {
            let (head, tail) = up.split_at(n - j);
            let acc: f64 = head.iter().zip(&down[j..]).map(|(u, d)| u * d).sum::<f64>()
                + tail.iter().zip(&down[..j]).map(|(u, d)| u * d).sum::<f64>();
            acc / n as f64
        })
        .collect();
    values.push(values[0]);
    values
}

/// `F(sigma, z)` on the `n_points + 1` nodes of `[-1, 0]`.
pub fn correlation_profile(
    p: &PeriodicPotential,
    sigma: f64,
    q: QuadratureSpec,
) -> Result<CorrelationProfile> {
    exponent_guard(p, sigma)?;
    let n = q.n_points();
    Ok(CorrelationProfile {
        sigma,
        z_grid: (0..=n).map(|j| -1.0 + j as f64 / n as f64).collect(),
        values: profile_values(p, sigma, n),
    })
}

/// Kernels `(h+(z), h-(z))`, supported on `[0, 1]` and `[-1, 0]`:
///
/// ```text
/// h+(z) = int_z^1  exp((psi(x - z) - psi(x)) / sigma) dx
/// h-(z) = int_-z^1 exp((psi(x) - psi(x + z)) / sigma) dx
/// ```
///
/// Evaluated by composite Gauss-Legendre, independently of the trapezoid
/// route used for `F`.
pub fn h_kernels(
    p: &PeriodicPotential,
    sigma: f64,
    z: f64,
    q: QuadratureSpec,
) -> Result<(f64, f64)> {
    exponent_guard(p, sigma)?;
    if !z.is_finite() {
        return Err(invalid(format!("z must be finite, got {z}")));
    }
    let rule = CompositeGauss::new(16);
    let panels = (q.n_points() / 32).max(4);
    let h_plus = if (0.0..=1.0).contains(&z) {
        rule.integrate(
            |x| ((p.eval(x - z) - p.eval(x)) / sigma).exp(),
            z,
            1.0,
            panels,
        )
    } else {
        0.0
    };
    let h_minus = if (-1.0..=0.0).contains(&z) {
        rule.integrate(
            |x| ((p.eval(x) - p.eval(x + z)) / sigma).exp(),
            -z,
            1.0,
            panels,
        )
    } else {
        0.0
    };
    Ok((h_plus, h_minus))
}

/// Relative residual of the forward transform identity at `(sigma, V)`.
///
/// The left side is the trapezoid rule on the `F` profile with its endpoint
/// correction `-(h^2/12) a expm1(a)`, `a = V/sigma` (uses `F(0) = F(-1) = 1`,
/// `F'(0) = F'(-1) = 0`).  The right side uses only the reduced current.
pub fn transform_identity_residual(
    p: &PeriodicPotential,
    sigma: f64,
    v: f64,
    q: QuadratureSpec,
) -> Result<f64> {
    if v == 0.0 {
        return Err(invalid(
            "the transform identity needs V != 0; use resistance at V = 0",
        ));
    }
    let c = ChannelParams::new(sigma, v)?;
    exponent_guard(p, sigma)?;
    let a = c.tilt();
    if a.abs() > EXP_LIMIT {
        return Err(Error::OverflowRisk {
            bound: a.abs(),
            limit: EXP_LIMIT,
        });
    }
    let n = q.n_points();
    let h = 1.0 / n as f64;
    let f = profile_values(p, sigma, n);
    let g: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(j, fj)| (-a * (-1.0 + j as f64 * h)).exp() * fj)
        .collect();
    let trapezoid = h * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[n]));
    let lhs = trapezoid - h * h / 12.0 * a * a.exp_m1();
    let rhs = a.exp_m1() / reduced_current(p, c, q)?;
    Ok(((lhs - rhs) / rhs).abs())
}

/// Finite-difference step for the resistance, relative to `sigma`.
pub const RESISTANCE_FD_STEP: f64 = 1e-4;

/// Double-integral resistance, i.e. the trapezoid mean of the `F` profile.
fn resistance_integral(p: &PeriodicPotential, sigma: f64, n: usize) -> f64 {
    if p.is_zero() {
        return 1.0;
    }
    // the double trapezoid sum over (x, z) factorises into two grid means
    let (up, down) = boltzmann_factors(p, sigma, n);
    let m = n as f64;
    (up.iter().sum::<f64>() / m) * (down.iter().sum::<f64>() / m)
}

/// `(r_integral, r_fd)`: the double integral of `F` over `z in [-1, 0]` and
/// a central difference of the physical current at `V = 0`.
pub fn resistance(p: &PeriodicPotential, sigma: f64, q: QuadratureSpec) -> Result<(f64, f64)> {
    exponent_guard(p, sigma)?;
    let r_integral = resistance_integral(p, sigma, q.n_points());
    let h = RESISTANCE_FD_STEP * sigma;
    let up = steady_current(p, ChannelParams::new(sigma, h)?, q)?;
    let down = steady_current(p, ChannelParams::new(sigma, -h)?, q)?;
    let slope = (up - down) / (2.0 * h);
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "current slope at V = 0 is {slope:e} for sigma = {sigma}"
        )));
    }
    Ok((r_integral, 1.0 / slope))
}

/// Resistance curve from the double integral, one value per `sigma`, in input order.
pub fn resistance_curve(
    p: &PeriodicPotential,
    sigmas: &[f64],
    q: QuadratureSpec,
) -> Result<ResistanceCurve> {
    if sigmas.is_empty() {
        return Err(invalid("resistance curve needs at least one sigma"));
    }
    let resistance = sigmas
        .par_iter()
        .map(|&s| {
            exponent_guard(p, s)?;
            Ok(resistance_integral(p, s, q.n_points()))
        })
        .collect::<Result<Vec<f64>>>()?;
    ResistanceCurve::new(sigmas.to_vec(), resistance)
}

/// `count` geometrically spaced values from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && min.is_finite() && max.is_finite()) || count == 0 {
        return Err(invalid(format!(
            "geometric grid needs 0 < min <= max and count >= 1 (min={min}, max={max}, count={count})"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|k| min * (ratio * k as f64).exp()).collect();
    grid[count - 1] = max;
    Ok(grid)
}
