//! Gaver-Stehfest recovery of `F(sigma, -u)` from the current alone.
//!
//! The periodic extension of `u -> F(sigma, -u)` has Laplace transform
//! `-1 / J(-sigma s, sigma)`, and that of `u -> F(sigma, u)` is
//! `1 / J(sigma s, sigma)`.  Both are smooth in `u`, unlike the transform of
//! the function cut off at `u = 1`, which Stehfest sums handle badly.  Points
//! with `u > 1/2` use the second transform at `1 - u`.  Experimental.

use std::f64::consts::LN_2;

use crate::error::{invalid, Result};
use crate::potential::PeriodicPotential;
use crate::steady::{reduced_current, ChannelParams, QuadratureSpec};

/// Relative gap between the `N` and `N - 2` sums above which a point is flagged.
const AGREEMENT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionEstimate {
    pub u: f64,
    /// Estimate of `F(sigma, -u)`; NaN when the transform could not be evaluated.
    pub value: f64,
    pub unreliable: bool,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Stehfest weights `V_1..V_N` for even `N`.
pub fn stehfest_coefficients(n: usize) -> Vec<f64> {
    assert!(n >= 2 && n % 2 == 0, "Stehfest order must be even");
    let half = n / 2;
    (1..=n)
        .map(|k| {
            let sum: f64 = ((k + 1) / 2..=k.min(half))
                .map(|j| {
                    (j as f64).powi(half as i32) * factorial(2 * j)
                        / (factorial(half - j)
                            * factorial(j)
                            * factorial(j - 1)
                            * factorial(k - j)
                            * factorial(2 * j - k))
                })
                .sum();
            if (k + half) % 2 == 0 {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

/// Stehfest sums of orders `n` and `n - 2` for `transform` at `t`.
fn stehfest_pair(t: f64, n: usize, transform: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let rate = LN_2 / t;
    let values: Vec<f64> = (1..=n)
        .map(|k| transform(k as f64 * rate))
        .collect::<Result<_>>()?;
    let sum = |order: usize| -> f64 {
        stehfest_coefficients(order)
            .iter()
            .zip(&values)
            .map(|(w, g)| w * g)
            .sum::<f64>()
            * rate
    };
    Ok((sum(n), sum(n - 2)))
}

/// Estimates `F(sigma, -u)` at each `u` in `(0, 1)` using only the reduced current.
#[allow(non_snake_case)]
pub fn gaver_stehfest_recover_F(
    p: &PeriodicPotential,
    sigma: f64,
    u_points: &[f64],
    n_terms: usize,
    q: QuadratureSpec,
) -> Result<Vec<InversionEstimate>> {
    if ![8, 10, 12, 14].contains(&n_terms) {
        return Err(invalid(format!(
            "n_terms must be one of 8, 10, 12, 14, got {n_terms}"
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if let Some(u) = u_points.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
        return Err(invalid(format!(
            "inversion points must lie in (0, 1), got {u}"
        )));
    }
    let current = |v: f64| reduced_current(p, ChannelParams::new(sigma, v)?, q);
    Ok(u_points
        .iter()
        .map(|&u| {
            let pair = if u <= 0.5 {
                stehfest_pair(u, n_terms, |s| Ok(-1.0 / current(-sigma * s)?))
            } else {
                stehfest_pair(1.0 - u, n_terms, |s| Ok(1.0 / current(sigma * s)?))
            };
            match pair {
                Ok((value, coarse)) => {
                    let gap = (value - coarse).abs() / value.abs();
                    InversionEstimate {
                        u,
                        value,
                        unreliable: !(value.is_finite() && gap <= AGREEMENT_TOL),
                    }
                }
                Err(_) => InversionEstimate {
                    u,
                    value: f64::NAN,
                    unreliable: true,
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_sum_to_zero() {
        for n in [8, 10, 12, 14] {
            let v = stehfest_coefficients(n);
            let total: f64 = v.iter().sum();
            let scale: f64 = v.iter().map(|x| x.abs()).sum();
            assert!(total.abs() < 1e-12 * scale, "n={n}");
        }
        assert_eq!(stehfest_coefficients(2), vec![2.0, -2.0]);
    }

    #[test]
    fn inverts_known_transforms() {
        // 1/s -> 1 and 1/(s + 1) -> e^{-t}
        let (one, _) = stehfest_pair(0.4, 12, |s| Ok(1.0 / s)).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
        let (e, _) = stehfest_pair(0.4, 12, |s| Ok(1.0 / (s + 1.0))).unwrap();
        assert!((e - (-0.4f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn flat_potential_recovers_one() {
        let est = gaver_stehfest_recover_F(
            &PeriodicPotential::zero(),
            1.0,
            &[0.2, 0.5, 0.8],
            12,
            QuadratureSpec::new(64).unwrap(),
        )
        .unwrap();
        for e in est {
            assert!((e.value - 1.0).abs() < 1e-6 && !e.unreliable, "{e:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = PeriodicPotential::zero();
        let q = QuadratureSpec::new(64).unwrap();
        assert!(gaver_stehfest_recover_F(&p, 1.0, &[0.5], 9, q).is_err());
        assert!(gaver_stehfest_recover_F(&p, 1.0, &[1.0], 12, q).is_err());
        assert!(gaver_stehfest_recover_F(&p, -1.0, &[0.5], 12, q).is_err());
    }
}
