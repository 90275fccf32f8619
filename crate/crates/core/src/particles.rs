//! Deterministic orbits of the probability velocity field
//!
//! ```text
//! v(x, t) = -Psi_x(x, t) - sigma rho_x / rho,     dx/dt = v(x(t), t)
//! ```
//!
//! The long-time slope of an orbit is the mean velocity `kappa`.

use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::evolve::{DensityField, Frame};
use crate::export::fmt_sig;
use crate::interp::PeriodicCubic;
use crate::potential::PeriodicPotential;
use crate::steady::{ChannelParams, SteadyState};

const MIN_DENSITY: f64 = 1e-300;
const MAX_STEP_FRACTION: f64 = 0.25;

/// Where the density in the velocity field comes from.
#[derive(Debug, Clone, Copy)]
pub enum DensitySource<'a> {
    /// Moving-frame steady density, carried along as `rho(x - V t)`.
    Steady(&'a SteadyState),
    /// A frozen snapshot; in the moving frame it is carried along like the steady density.
    Snapshot {
        field: &'a DensityField,
        frame: Frame,
    },
}

/// Velocity field with its density interpolant prepared once.
#[derive(Debug, Clone)]
pub struct VelocityField<'a> {
    p: &'a PeriodicPotential,
    params: ChannelParams,
    density: PeriodicCubic,
    comoving: bool,
}

impl<'a> VelocityField<'a> {
    pub fn new(
        source: DensitySource<'_>,
        p: &'a PeriodicPotential,
        c: ChannelParams,
    ) -> Result<Self> {
        let (density, comoving) = match source {
            DensitySource::Steady(ss) => {
                if ss.params != c {
                    return Err(invalid(
                        "steady state was computed for different parameters",
                    ));
                }
                // Hermite data with the exact slope from the flux equation
                let interp = PeriodicCubic::with_slopes(0.0, ss.rho.clone(), ss.density_slope(p));
                (interp, true)
            }
            DensitySource::Snapshot { field, frame } => {
                let offset = 0.5 / field.grid_n() as f64;
                let interp = PeriodicCubic::from_values(offset, field.values().to_vec());
                (interp, frame == Frame::Moving)
            }
        };
        Ok(Self {
            p,
            params: c,
            density,
            comoving,
        })
    }

    /// Lab-frame velocity at `(x, t)`.
    pub fn at(&self, x: f64, t: f64) -> Result<f64> {
        let z = x - self.params.v() * t;
        let (rho, drho) = self.density.eval(if self.comoving { z } else { x });
        if !(rho >= MIN_DENSITY) {
            return Err(Error::DegenerateDensity { x, value: rho });
        }
        Ok(-self.p.eval_derivative(z) - self.params.sigma() * drho / rho)
    }
}

/// One-off evaluation of the velocity field.
pub fn velocity_field(
    source: DensitySource<'_>,
    p: &PeriodicPotential,
    c: ChannelParams,
    x: f64,
    t: f64,
) -> Result<f64> {
    VelocityField::new(source, p, c)?.at(x, t)
}

/// Orbit samples with unwrapped positions.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl OrbitPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x")?;
        for (t, x) in self.times.iter().zip(&self.positions) {
            writeln!(out, "{},{}", fmt_sig(*t), fmt_sig(*x))?;
        }
        Ok(())
    }
}

fn rk4(
    x0: f64,
    t_end: f64,
    dt: f64,
    mut rhs: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<OrbitPath> {
    if !(dt > 0.0 && t_end >= dt) || !x0.is_finite() || !t_end.is_finite() {
        return Err(invalid(format!(
            "need dt > 0 and t_end >= dt (dt={dt}, t_end={t_end})"
        )));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let (mut t, mut x) = (0.0, x0);
    times.push(t);
    positions.push(x);
    for step in 0..steps {
        let k1 = rhs(x, t)?;
        let displacement = k1.abs() * h;
        if displacement > MAX_STEP_FRACTION {
            return Err(Error::StepTooLarge {
                step,
                displacement,
                limit: MAX_STEP_FRACTION,
            });
        }
        let k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h)?;
        let k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h)?;
        let k4 = rhs(x + h * k3, t + h)?;
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (step + 1) as f64 * h;
        times.push(t);
        positions.push(x);
    }
    Ok(OrbitPath { times, positions })
}

/// Lab-frame orbit `dx/dt = v(x, t)` by classical RK4.
pub fn integrate_orbit(
    source: DensitySource<'_>,
    p: &PeriodicPotential,
    c: ChannelParams,
    x0: f64,
    t_end: f64,
    dt: f64,
) -> Result<OrbitPath> {
    let field = VelocityField::new(source, p, c)?;
    rk4(x0, t_end, dt, |x, t| field.at(x, t))
}

/// Moving-frame orbit `dz/dt = -I / rho(z)`; `z(t) + V t` is the lab orbit.
pub fn moving_frame_orbit(ss: &SteadyState, z0: f64, t_end: f64, dt: f64) -> Result<OrbitPath> {
    let density = PeriodicCubic::from_values(0.0, ss.rho.clone());
    let current = ss.current;
    rk4(z0, t_end, dt, |z, _| {
        let (rho, _) = density.eval(z);
        if !(rho >= MIN_DENSITY) {
            return Err(Error::DegenerateDensity { x: z, value: rho });
        }
        Ok(-current / rho)
    })
}

/// Least-squares slope of position against time after discarding the first
/// `burn_in_fraction` of the samples.
pub fn empirical_mean_velocity(path: &OrbitPath, burn_in_fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(invalid(format!(
            "burn-in fraction must be in [0, 1), got {burn_in_fraction}"
        )));
    }
    let start = (path.len() as f64 * burn_in_fraction).floor() as usize;
    let t = &path.times[start.min(path.len())..];
    let x = &path.positions[start.min(path.len())..];
    if path.len() < 16 || t.len() < 2 {
        return Err(invalid(format!(
            "need at least 16 orbit samples, got {}",
            path.len()
        )));
    }
    let m = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / m;
    let x_mean = x.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, xi) in t.iter().zip(x) {
        let dt = ti - t_mean;
        sxy += dt * (xi - x_mean);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}
