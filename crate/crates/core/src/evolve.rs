//! Time-dependent Fokker-Planck solver on the periodic unit cell
//!
//! ```text
//! rho_t = (sigma rho_x + U_x rho)_x
//! ```
//!
//! with `U = psi(z) + V z` in the moving frame and `U = psi(x - V t)` in the
//! lab frame.  Cells are centred at `x_i = (i + 1/2)/n`; the flux through the
//! face between cells `i` and `i+1` is the Scharfetter-Gummel form
//!
//! ```text
//! Phi_i = (sigma/h) [B(d_i) rho_i - B(-d_i) rho_{i+1}],   B(x) = x / (e^x - 1)
//! ```
//!
//! where `d_i = (U(x_{i+1}) - U(x_i))/sigma` is the potential drop across the
//! face.  The flux vanishes on the discrete Boltzmann profile.  Time stepping
//! is a theta scheme solved with one cyclic tridiagonal solve per step.

use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::export::fmt_sig;
use crate::potential::PeriodicPotential;
use crate::steady::{steady_density, ChannelParams, QuadratureSpec};
use crate::tridiag::solve_cyclic;

/// Cell averages of a probability density on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    time: f64,
    renormalized: bool,
}

impl DensityField {
    /// Accepts any nonnegative data and rescales it to unit mass; the
    /// `renormalized` flag records whether rescaling was needed.
    pub fn new(values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() < 4 {
            return Err(invalid(format!(
                "density grid needs >= 4 cells, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!(
                "density values must be finite and >= 0, got {v}"
            )));
        }
        let n = values.len() as f64;
        let mass = values.iter().sum::<f64>() / n;
        if mass <= 0.0 {
            return Err(invalid("density has zero mass"));
        }
        let renormalized = (mass - 1.0).abs() > 1e-12;
        let values = if renormalized {
            values.into_iter().map(|v| v / mass).collect()
        } else {
            values
        };
        Ok(Self {
            values,
            time,
            renormalized,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n], 0.0)
    }

    /// Samples `f` at the cell centres and normalises.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(cell_centers(n).into_iter().map(f).collect(), 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid_n(&self) -> usize {
        self.values.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn centers(&self) -> Vec<f64> {
        cell_centers(self.grid_n())
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid_n() as f64
    }

    /// `int |rho - other|` with the cell-average rule.
    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        assert_eq!(self.grid_n(), other.len());
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / self.grid_n() as f64
    }

    /// Appends `t,x,rho` rows (no header).
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> io::Result<()> {
        let t = fmt_sig(self.time);
        for (x, r) in self.centers().iter().zip(&self.values) {
            writeln!(out, "{t},{},{}", fmt_sig(*x), fmt_sig(*r))?;
        }
        Ok(())
    }
}

pub const SNAPSHOT_HEADER: &str = "t,x,rho";

pub fn cell_centers(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Moving,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    dt: f64,
    frame: Frame,
    theta: f64,
}

impl EvolveConfig {
    pub const MAX_DT: f64 = 0.5;

    pub fn new(dt: f64, frame: Frame, theta: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= Self::MAX_DT) {
            return Err(invalid(format!(
                "dt must lie in (0, {}], got {dt}",
                Self::MAX_DT
            )));
        }
        if !(0.5..=1.0).contains(&theta) {
            return Err(invalid(format!("theta must lie in [0.5, 1], got {theta}")));
        }
        Ok(Self { dt, frame, theta })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            frame: Frame::Moving,
            theta: 1.0,
        }
    }
}

fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

/// One theta step for the potential `U(x) = psi(x - shift) + drift x`.
fn theta_step(
    field: &DensityField,
    p: &PeriodicPotential,
    sigma: f64,
    shift: f64,
    drift: f64,
    cfg: &EvolveConfig,
) -> Result<DensityField> {
    let n = field.grid_n();
    let h = 1.0 / n as f64;
    let centers = field.centers();
    let psi: Vec<f64> = centers.iter().map(|&x| p.eval(x - shift)).collect();
    let psi_wrap = p.eval(centers[n - 1] + h - shift);
    // drop across the face between cell i and i+1
    let drops: Vec<f64> = (0..n)
        .map(|i| {
            let next = if i + 1 < n { psi[i + 1] } else { psi_wrap };
            (next - psi[i] + drift * h) / sigma
        })
        .collect();
    let fwd: Vec<f64> = drops.iter().map(|&d| bernoulli(d)).collect();
    let bwd: Vec<f64> = drops.iter().map(|&d| bernoulli(-d)).collect();
    let k = cfg.dt * sigma / (h * h);
    let prev = |i: usize| (i + n - 1) % n;

    let rho = &field.values;
    let t = cfg.theta * k;
    let diag: Vec<f64> = (0..n).map(|i| 1.0 + t * (fwd[i] + bwd[prev(i)])).collect();
    let sup: Vec<f64> = (0..n).map(|i| -t * bwd[i]).collect();
    let sub: Vec<f64> = (0..n).map(|i| -t * fwd[prev(i)]).collect();
    // increment form (1 - t A) delta = k A rho: roundoff scales with the change,
    // not with k, so mass does not drift over long runs at large dt/h^2
    let a_rho: Vec<f64> = (0..n)
        .map(|i| {
            let j = prev(i);
            k * (bwd[i] * rho[(i + 1) % n] + fwd[j] * rho[j] - (fwd[i] + bwd[j]) * rho[i])
        })
        .collect();
    let delta = solve_cyclic(&sub, &diag, &sup, &a_rho)?;
    let mut values: Vec<f64> = rho.iter().zip(&delta).map(|(r, d)| r + d).collect();
    if cfg.theta == 1.0 && values.iter().any(|v| *v < 0.0) {
        // the direct M-matrix solve keeps the sign exactly
        values = solve_cyclic(&sub, &diag, &sup, rho)?;
    }
    Ok(DensityField {
        values,
        time: field.time + cfg.dt,
        renormalized: field.renormalized,
    })
}

pub fn step_moving_frame(
    field: &DensityField,
    p: &PeriodicPotential,
    c: ChannelParams,
    cfg: &EvolveConfig,
) -> Result<DensityField> {
    if cfg.frame != Frame::Moving {
        return Err(invalid("step_moving_frame needs a moving-frame config"));
    }
    theta_step(field, p, c.sigma(), 0.0, c.v(), cfg)
}

/// Lab-frame step; the traveling potential is frozen at `t + theta dt`.
pub fn step_lab_frame(
    field: &DensityField,
    p: &PeriodicPotential,
    c: ChannelParams,
    cfg: &EvolveConfig,
) -> Result<DensityField> {
    if cfg.frame != Frame::Lab {
        return Err(invalid("step_lab_frame needs a lab-frame config"));
    }
    let t_mid = field.time + cfg.theta * cfg.dt;
    theta_step(field, p, c.sigma(), c.v() * t_mid, 0.0, cfg)
}

/// Dispatches on the configured frame.
pub fn step(
    field: &DensityField,
    p: &PeriodicPotential,
    c: ChannelParams,
    cfg: &EvolveConfig,
) -> Result<DensityField> {
    match cfg.frame {
        Frame::Moving => step_moving_frame(field, p, c, cfg),
        Frame::Lab => step_lab_frame(field, p, c, cfg),
    }
}

#[derive(Debug, Clone)]
pub struct Relaxation {
    pub field: DensityField,
    /// L1 distance from the closed-form steady density at the cell centres.
    pub l1_gap: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Closed-form steady density sampled at the cell centres of an `n`-cell grid.
pub fn steady_at_centers(p: &PeriodicPotential, c: ChannelParams, n: usize) -> Result<Vec<f64>> {
    let q = QuadratureSpec::new(
        (2 * n)
            .next_power_of_two()
            .max(QuadratureSpec::DEFAULT_POINTS),
    )?;
    Ok(steady_density(p, c, q)?.density_at(&cell_centers(n)))
}

/// Steps in the moving frame until the per-step L1 change drops below `tol * dt`.
///
/// Running out of steps is not an error: the result carries `converged = false`.
pub fn relax_to_steady(
    field: &DensityField,
    p: &PeriodicPotential,
    c: ChannelParams,
    cfg: &EvolveConfig,
    tol: f64,
    max_steps: usize,
) -> Result<Relaxation> {
    relax_with(field, p, c, cfg, tol, max_steps, |_| {})
}

/// [`relax_to_steady`] with a callback invoked after every step.
pub fn relax_with(
    field: &DensityField,
    p: &PeriodicPotential,
    c: ChannelParams,
    cfg: &EvolveConfig,
    tol: f64,
    max_steps: usize,
    mut on_step: impl FnMut(&DensityField),
) -> Result<Relaxation> {
    if cfg.frame != Frame::Moving {
        return Err(invalid("relaxation runs in the moving frame"));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut current = field.clone();
    let mut steps = 0;
    let mut converged = false;
    while steps < max_steps {
        let next = step_moving_frame(&current, p, c, cfg)?;
        let change = next.l1_distance(&current.values);
        current = next;
        steps += 1;
        on_step(&current);
        if change < tol * cfg.dt {
            converged = true;
            break;
        }
    }
    let target = steady_at_centers(p, c, current.grid_n())?;
    Ok(Relaxation {
        l1_gap: current.l1_distance(&target),
        field: current,
        steps,
        converged,
    })
}
