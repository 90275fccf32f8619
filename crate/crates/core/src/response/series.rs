//! Large-temperature expansion `R(sigma) = 1 + sum_k c_k sigma^{-k}` and the
//! even-moment recursion for antisymmetric potentials.

use nalgebra::{DMatrix, DVector};

use super::{resistance_curve, MomentRecovery, ResistanceCurve};
use crate::error::{invalid, Error, Result};
use crate::potential::PeriodicPotential;
use crate::steady::QuadratureSpec;

/// Highest series order accepted by the moment formulas.
pub const MAX_SERIES_ORDER: usize = 12;
/// Highest order accepted by the least-squares fit.
pub const MAX_FIT_ORDER: usize = 8;
/// Smallest temperature allowed in a fit.
pub const MIN_FIT_SIGMA: f64 = 4.0;
/// Condition estimate above which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// `c_k = (1/k!) sum_j (-1)^j C(k, j) M_j M_{k-j}` from `moments = [M_0, M_1, ..]`.
pub fn series_coefficients_from_moments(moments: &[f64], k: usize) -> Result<f64> {
    if moments.is_empty() || (moments[0] - 1.0).abs() > 1e-12 {
        return Err(invalid("moments must start with M_0 = 1"));
    }
    let top = moments.len() - 1;
    if top > MAX_SERIES_ORDER {
        return Err(invalid(format!(
            "at most {MAX_SERIES_ORDER} moments beyond M_0 are supported, got {top}"
        )));
    }
    if k == 0 || k > top {
        return Err(invalid(format!("series order {k} outside 1..={top}")));
    }
    let sum: f64 = (0..=k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(k, j) * moments[j] * moments[k - j]
        })
        .sum();
    Ok(sum / factorial(k))
}

/// Least-squares coefficients with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    /// `c_1..c_K`.
    pub coeffs: Vec<f64>,
    /// Euclidean norm of the fit residual.
    pub residual: f64,
    /// Ratio of extreme singular values of the column-scaled design matrix.
    pub condition: f64,
}

/// Fits `R(sigma) - 1` against `sigma^{-1}..sigma^{-K}`.
pub fn fit_series_coefficients(curve: &ResistanceCurve, k: usize) -> Result<SeriesFit> {
    if k == 0 || k > MAX_FIT_ORDER {
        return Err(invalid(format!(
            "fit order must be in 1..={MAX_FIT_ORDER}, got {k}"
        )));
    }
    let m = curve.len();
    if m < k + 3 {
        return Err(invalid(format!(
            "fit of order {k} needs at least {} samples, got {m}",
            k + 3
        )));
    }
    if let Some(s) = curve.sigmas.iter().find(|s| **s < MIN_FIT_SIGMA) {
        return Err(invalid(format!(
            "fit needs sigma >= {MIN_FIT_SIGMA}, got {s}"
        )));
    }
    let mut a = DMatrix::<f64>::from_fn(m, k, |i, j| curve.sigmas[i].powi(-(j as i32 + 1)));
    let scales: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let y = DVector::from_iterator(m, curve.resistance.iter().map(|r| r - 1.0));
    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            condition,
            limit: MAX_CONDITION,
        });
    }
    let scaled = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::NumericalFailure(format!("least-squares solve failed: {e}")))?;
    let residual = (&a * &scaled - &y).norm();
    let coeffs = scaled.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(SeriesFit {
        coeffs,
        residual,
        condition,
    })
}

/// Even moments `[M_2, M_4, .., M_{m_max}]` from `coeffs = [c_1, c_2, ..]`,
/// assuming all odd moments vanish.
pub fn recover_even_moments(coeffs: &[f64], m_max: usize) -> Result<Vec<f64>> {
    if m_max < 2 || m_max % 2 != 0 {
        return Err(invalid(format!(
            "highest moment order must be even and >= 2, got {m_max}"
        )));
    }
    if m_max > coeffs.len() {
        return Err(invalid(format!(
            "moment M_{m_max} needs c_{m_max}, only {} coefficients given",
            coeffs.len()
        )));
    }
    if m_max > MAX_SERIES_ORDER {
        return Err(invalid(format!(
            "moment order above {MAX_SERIES_ORDER} is not supported"
        )));
    }
    // moments[j] = M_j, odd entries stay zero
    let mut moments = vec![0.0; m_max + 1];
    moments[0] = 1.0;
    for k in (2..=m_max).step_by(2) {
        let cross: f64 = (2..=k - 2)
            .step_by(2)
            .map(|j| binomial(k, j) * moments[j] * moments[k - j])
            .sum();
        moments[k] = (factorial(k) * coeffs[k - 1] - cross) / 2.0;
    }
    Ok(moments.into_iter().skip(2).step_by(2).collect())
}

/// Potential to resistance curve to series fit to even moments.
///
/// The highest recovered moment is the largest even order not above `k`.
/// Symmetry of `p` is the caller's business.
pub fn recover_moments(
    p: &PeriodicPotential,
    sigmas: &[f64],
    k: usize,
    q: QuadratureSpec,
) -> Result<(MomentRecovery, ResistanceCurve)> {
    if k < 2 {
        return Err(invalid(format!(
            "moment recovery needs fit order >= 2, got {k}"
        )));
    }
    let curve = resistance_curve(p, sigmas, q)?;
    let fit = fit_series_coefficients(&curve, k)?;
    let even_moments = recover_even_moments(&fit.coeffs, k - k % 2)?;
    let recovery = MomentRecovery {
        coeffs: fit.coeffs,
        even_moments,
        fit_residual: fit.residual,
        condition_estimate: fit.condition,
        warning: None,
    };
    Ok((recovery, curve))
}
