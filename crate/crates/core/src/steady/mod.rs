//! Moving-frame steady state of the tilted Fokker-Planck problem
//!
//! ```text
//! sigma rho' + (psi' + V) rho = I,   rho periodic,   int_0^1 rho = 1
//! ```
//!
//! The closed form uses the weights `f+- = exp(+-(V z + psi)/sigma)`, their
//! primitives `F+-`, and `H+ = int F+ f-`, `H- = int F- f+`:
//!
//! ```text
//! rho(z) = f-(z) [beta + J F+(z)],    J = (1 - e^{-V/sigma}) / (H+ + e^{-V/sigma} H-)
//! ```
//!
//! `J` is the reduced current; the flux constant above is `I = sigma J`.
//! All integrals are evaluated spectrally on the periodic parts of the
//! weights, see [`crate::spectral`].

mod oracle;

pub use oracle::ode_oracle_current;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::fmt_sig;
use crate::potential::PeriodicPotential;
use crate::spectral::Spectrum;

/// Exponent bound above which unscaled weights are refused.
pub const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    sigma: f64,
    v: f64,
}

impl ChannelParams {
    pub fn new(sigma: f64, v: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if !v.is_finite() {
            return Err(invalid(format!("voltage must be finite, got {v}")));
        }
        Ok(Self { sigma, v })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Tilt rate `V / sigma`.
    pub fn tilt(&self) -> f64 {
        self.v / self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    n_points: usize,
}

impl QuadratureSpec {
    pub const DEFAULT_POINTS: usize = 1024;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 64 || !n_points.is_power_of_two() {
            return Err(invalid(format!(
                "quadrature needs a power of two >= 64 points, got {n_points}"
            )));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_points: Self::DEFAULT_POINTS,
        }
    }
}

/// Unscaled weights on `z_j = j/n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTables {
    pub z: Vec<f64>,
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub cum_plus: Vec<f64>,
    pub cum_minus: Vec<f64>,
}

/// Weights with the periodic factors rescaled to a maximum of one.
///
/// `f+ = e^{psi_max/sigma} e^{a z} P+` and `f- = e^{-psi_min/sigma} e^{-a z} P-`
/// with `a = V/sigma`; every quantity below carries those factors implicitly.
struct ScaledWeights {
    tilt: f64,
    plus: Spectrum,
    minus: Spectrum,
    psi_max: f64,
    psi_min: f64,
    sigma: f64,
}

impl ScaledWeights {
    fn new(p: &PeriodicPotential, c: ChannelParams, q: QuadratureSpec) -> Result<Self> {
        let tilt = c.tilt();
        if tilt.abs() > EXP_LIMIT {
            return Err(Error::OverflowRisk {
                bound: tilt.abs(),
                limit: EXP_LIMIT,
            });
        }
        let psi = p.sample(q.n_points());
        let psi_max = psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let psi_min = psi.iter().copied().fold(f64::INFINITY, f64::min);
        let s = c.sigma();
        let plus = Spectrum::from_samples(psi.iter().map(|v| ((v - psi_max) / s).exp()).collect());
        let minus =
            Spectrum::from_samples(psi.iter().map(|v| (-(v - psi_min) / s).exp()).collect());
        Ok(Self {
            tilt,
            plus,
            minus,
            psi_max,
            psi_min,
            sigma: s,
        })
    }

    fn n(&self) -> usize {
        self.plus.len()
    }

    fn cum_plus(&self) -> Vec<f64> {
        self.plus.exp_weighted_cumulative(self.tilt)
    }

    fn cum_minus(&self) -> Vec<f64> {
        self.minus.exp_weighted_cumulative(-self.tilt)
    }

    fn h_plus(&self) -> f64 {
        self.plus.cross_integral(self.tilt, &self.minus)
    }

    fn h_minus(&self) -> f64 {
        self.minus.cross_integral(-self.tilt, &self.plus)
    }

    /// Reduced current in scaled units; `J = j_hat * e^{-(psi_max - psi_min)/sigma}`.
    fn j_hat(&self) -> f64 {
        let a = self.tilt;
        if a == 0.0 {
            return 0.0;
        }
        let (hp, hm) = (self.h_plus(), self.h_minus());
        if a > 0.0 {
            -(-a).exp_m1() / (hp + (-a).exp() * hm)
        } else {
            // multiplied through by e^{a} so nothing overflows for a << 0
            a.exp_m1() / (a.exp() * hp + hm)
        }
    }

    fn barrier(&self) -> f64 {
        (self.psi_max - self.psi_min) / self.sigma
    }
}

pub fn weight_tables(
    p: &PeriodicPotential,
    c: ChannelParams,
    q: QuadratureSpec,
) -> Result<WeightTables> {
    let bound = (c.v().abs() + 2.0 * p.coeff_l1()) / c.sigma();
    if bound > EXP_LIMIT {
        return Err(Error::OverflowRisk {
            bound,
            limit: EXP_LIMIT,
        });
    }
    let w = ScaledWeights::new(p, c, q)?;
    let n = w.n();
    let z: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let s = c.sigma();
    let g = |zj: f64| (c.v() * zj + p.eval(zj)) / s;
    let up = (w.psi_max / s).exp();
    let down = (-w.psi_min / s).exp();
    Ok(WeightTables {
        f_plus: z.iter().map(|&zj| g(zj).exp()).collect(),
        f_minus: z.iter().map(|&zj| (-g(zj)).exp()).collect(),
        cum_plus: w.cum_plus().into_iter().map(|v| v * up).collect(),
        cum_minus: w.cum_minus().into_iter().map(|v| v * down).collect(),
        z,
    })
}

/// Reduced current `J` from the `H+`/`H-` formula, with no shortcut for constant `psi`.
fn closed_form_reduced_current(
    p: &PeriodicPotential,
    c: ChannelParams,
    q: QuadratureSpec,
) -> Result<f64> {
    let w = ScaledWeights::new(p, c, q)?;
    Ok(w.j_hat() * (-w.barrier()).exp())
}

/// Physical steady current `I` (the flux constant), `I = sigma J`.
pub fn steady_current(p: &PeriodicPotential, c: ChannelParams, q: QuadratureSpec) -> Result<f64> {
    if c.v() == 0.0 {
        return Ok(0.0);
    }
    if p.is_zero() {
        // rho = 1 solves the flux equation with I = V
        return Ok(c.v());
    }
    Ok(c.sigma() * closed_form_reduced_current(p, c, q)?)
}

/// Reduced current `J = I / sigma` used by the response identities.
pub fn reduced_current(p: &PeriodicPotential, c: ChannelParams, q: QuadratureSpec) -> Result<f64> {
    Ok(steady_current(p, c, q)? / c.sigma())
}

/// Discretised periodic steady state on `z_j = j/n`, `j = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SteadyWire", try_from = "SteadyWire")]
pub struct SteadyState {
    pub params: ChannelParams,
    pub rho: Vec<f64>,
    /// Physical current, the constant value of `sigma rho' + (psi' + V) rho`.
    pub current: f64,
    /// Integration constant of `rho = f- (beta + J F+)` with the reduced current `J`.
    pub beta: f64,
    pub kappa: f64,
}

/// Flat JSON form: `{sigma, v, current, beta, kappa, n, rho}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteadyWire {
    sigma: f64,
    v: f64,
    current: f64,
    beta: f64,
    kappa: f64,
    n: usize,
    rho: Vec<f64>,
}

impl From<SteadyState> for SteadyWire {
    fn from(s: SteadyState) -> Self {
        Self {
            sigma: s.params.sigma(),
            v: s.params.v(),
            current: s.current,
            beta: s.beta,
            kappa: s.kappa,
            n: s.rho.len(),
            rho: s.rho,
        }
    }
}

impl TryFrom<SteadyWire> for SteadyState {
    type Error = Error;

    fn try_from(w: SteadyWire) -> Result<Self> {
        if w.n != w.rho.len() {
            return Err(invalid(format!(
                "n = {} but rho has {} entries",
                w.n,
                w.rho.len()
            )));
        }
        Ok(Self {
            params: ChannelParams::new(w.sigma, w.v)?,
            rho: w.rho,
            current: w.current,
            beta: w.beta,
            kappa: w.kappa,
        })
    }
}

impl SteadyState {
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|j| j as f64 / n as f64).collect()
    }

    pub fn reduced_current(&self) -> f64 {
        self.current / self.params.sigma()
    }

    /// Trapezoid integral of `rho` over one period.
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() / self.n() as f64
    }

    /// Spectral interpolation of the density at arbitrary points.
    pub fn density_at(&self, points: &[f64]) -> Vec<f64> {
        let s = Spectrum::from_samples(self.rho.clone());
        points.iter().map(|&z| s.eval(z.rem_euclid(1.0))).collect()
    }

    /// Exact slope from the flux equation at the grid points.
    pub fn density_slope(&self, p: &PeriodicPotential) -> Vec<f64> {
        let (s, v) = (self.params.sigma(), self.params.v());
        self.grid()
            .iter()
            .zip(&self.rho)
            .map(|(&z, &r)| (self.current - (p.eval_derivative(z) + v) * r) / s)
            .collect()
    }

    /// Pointwise residual `sigma rho' + (psi' + V) rho - I`, with `rho'` spectral.
    pub fn flux_residual(&self, p: &PeriodicPotential) -> Vec<f64> {
        let (s, v) = (self.params.sigma(), self.params.v());
        let d = Spectrum::from_samples(self.rho.clone()).derivative();
        self.grid()
            .iter()
            .zip(self.rho.iter().zip(&d))
            .map(|(&z, (&r, &dr))| s * dr + (p.eval_derivative(z) + v) * r - self.current)
            .collect()
    }

    /// Writes `z,rho` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "z,rho")?;
        for (z, r) in self.grid().iter().zip(&self.rho) {
            writeln!(out, "{},{}", fmt_sig(*z), fmt_sig(*r))?;
        }
        Ok(())
    }
}

pub fn steady_density(
    p: &PeriodicPotential,
    c: ChannelParams,
    q: QuadratureSpec,
) -> Result<SteadyState> {
    let n = q.n_points();
    if p.is_zero() {
        return Ok(SteadyState {
            params: c,
            rho: vec![1.0; n],
            current: c.v(),
            beta: flat_beta(c.tilt()),
            kappa: 0.0,
        });
    }
    let w = ScaledWeights::new(p, c, q)?;
    let a = w.tilt;
    let j_hat = w.j_hat();
    // rho is proportional to e^{-psi/sigma} Q with a Q + Q' = e^{psi/sigma}, Q periodic;
    // Q is a positive average of e^{psi/sigma}, so no cancellation can flip a sign
    let shape: Vec<f64> = if a == 0.0 {
        w.minus.samples().to_vec()
    } else {
        w.plus
            .resolvent(a)
            .iter()
            .zip(w.minus.samples())
            .map(|(q, m)| q * m)
            .collect()
    };
    let total = shape.iter().sum::<f64>() / n as f64;
    let rho: Vec<f64> = shape.iter().map(|v| v / total).collect();
    if let Some((j, r)) = rho
        .iter()
        .enumerate()
        .find(|(_, r)| !(**r > 0.0 && r.is_finite()))
    {
        return Err(Error::InternalConsistency(format!(
            "non-positive density {r:e} at grid index {j}"
        )));
    }
    // rho(0) = f-(0) beta
    let beta = rho[0] * (p.eval(0.0) / c.sigma()).exp();
    let current = c.sigma() * j_hat * (-w.barrier()).exp();
    Ok(SteadyState {
        params: c,
        rho,
        current,
        beta,
        kappa: c.v() - current,
    })
}

/// `beta` for constant `psi`: `(1 - J H+) / F-(1)` with `J = a`.
fn flat_beta(a: f64) -> f64 {
    if a == 0.0 {
        return 1.0;
    }
    // F-(1) = (1 - e^{-a})/a and H+ = (e^{-a} - 1 + a)/a^2
    let f_minus = -(-a).exp_m1() / a;
    let h_plus = ((-a).exp_m1() + a) / (a * a);
    (1.0 - a * h_plus) / f_minus
}

/// `(V - I, V (1 - 1/int rho^{-1}))`.
pub fn mean_velocity(ss: &SteadyState) -> (f64, f64) {
    let v = ss.params.v();
    let inv_mean = ss.rho.iter().map(|r| 1.0 / r).sum::<f64>() / ss.n() as f64;
    (v - ss.current, v * (1.0 - 1.0 / inv_mean))
}
