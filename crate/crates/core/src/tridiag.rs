//! Cyclic tridiagonal systems.
//!
//! Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` with
//! indices taken mod `n`, so `sub[0]` and `sup[n-1]` are the corner entries.
//!
//! The solver eliminates the leading `(n-1) x (n-1)` tridiagonal block with two
//! Thomas sweeps (right-hand side and corner spike) and closes with the last
//! row.  For M-matrices every intermediate combines terms of one sign only, so
//! a nonnegative right-hand side yields a nonnegative solution in floating point.

use crate::error::{invalid, Error, Result};

pub fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(invalid("cyclic system bands must all have length n"));
    }
    if n < 3 {
        return Err(invalid(format!("cyclic system needs n >= 3, got {n}")));
    }
    let m = n - 1;
    // spike column coupling rows 0..m to x[m]
    let mut spike = vec![0.0; m];
    spike[0] = sub[0];
    spike[m - 1] += sup[m - 1];

    let mut c_prime = vec![0.0; m];
    let mut y = rhs[..m].to_vec();
    let mut w = spike;
    let mut pivot = diag[0];
    check_pivot(pivot, 0)?;
    c_prime[0] = sup[0] / pivot;
    y[0] /= pivot;
    w[0] /= pivot;
    for i in 1..m {
        pivot = diag[i] - sub[i] * c_prime[i - 1];
        check_pivot(pivot, i)?;
        c_prime[i] = sup[i] / pivot;
        y[i] = (y[i] - sub[i] * y[i - 1]) / pivot;
        w[i] = (w[i] - sub[i] * w[i - 1]) / pivot;
    }
    for i in (0..m - 1).rev() {
        y[i] -= c_prime[i] * y[i + 1];
        w[i] -= c_prime[i] * w[i + 1];
    }

    let denom = diag[m] - sup[m] * w[0] - sub[m] * w[m - 1];
    check_pivot(denom, m)?;
    let last = (rhs[m] - sup[m] * y[0] - sub[m] * y[m - 1]) / denom;
    let mut x: Vec<f64> = y.iter().zip(&w).map(|(yi, wi)| yi - wi * last).collect();
    x.push(last);
    Ok(x)
}

fn check_pivot(pivot: f64, row: usize) -> Result<()> {
    if pivot == 0.0 || !pivot.is_finite() {
        Err(Error::NumericalFailure(format!(
            "zero pivot in cyclic tridiagonal solve at row {row}"
        )))
    } else {
        Ok(())
    }
}
