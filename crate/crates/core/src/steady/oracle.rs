//! Collocation oracle for the steady flux equation.
//!
//! Solves the bordered system
//!
//! ```text
//! sigma (D rho)_i + (psi'(z_i) + V) rho_i - I = 0,   i = 0..n
//! (1/n) sum_i rho_i = 1
//! ```
//!
//! with the dense Fourier differentiation matrix `D`.  It deliberately shares
//! nothing with the closed-form route except the potential.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::ChannelParams;
use crate::error::{invalid, Error, Result};
use crate::potential::PeriodicPotential;

/// Returns the physical current and the density at `z_i = i/n`.
pub fn ode_oracle_current(
    p: &PeriodicPotential,
    c: ChannelParams,
    n: usize,
) -> Result<(f64, Vec<f64>)> {
    if n < 128 {
        return Err(invalid(format!("oracle grid needs n >= 128, got {n}")));
    }
    let h = 1.0 / n as f64;
    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = i as isize - j as isize;
                let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                m[(i, j)] = c.sigma() * PI * sign / (PI * d as f64 * h).tan();
            }
        }
        m[(i, i)] = p.eval_derivative(i as f64 * h) + c.v();
        m[(i, n)] = -1.0;
        m[(n, i)] = h;
    }
    let mut rhs = DVector::<f64>::zeros(n + 1);
    rhs[n] = 1.0;
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure("singular collocation system".into()))?;
    Ok((sol[n], sol.as_slice()[..n].to_vec()))
}
