//! Fourier representation of periodic samples on the uniform grid `z_j = j/n`.
//!
//! Besides the usual mean, derivative and interpolation, this provides exact
//! integrals of `e^{a z} P(z)` for a periodic trigonometric interpolant `P`:
//! each mode integrates in closed form, so cumulative integrals of the
//! exponentially tilted weights keep spectral accuracy even though the
//! integrands themselves are not periodic.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    samples: Vec<f64>,
    /// `c_k = (1/n) sum_j P_j e^{-2 pi i k j / n}` in FFT order.
    coeffs: Vec<Complex64>,
}

/// `(e^{a z} - 1) / a`, continuous at `a = 0`.
pub(crate) fn phi(a: f64, z: f64) -> f64 {
    if a == 0.0 {
        z
    } else {
        (a * z).exp_m1() / a
    }
}

/// `int_0^1 e^{b s} (1 - s) ds = (e^b - 1 - b) / b^2`.
fn tail_weight(b: f64) -> f64 {
    if b.abs() < 0.05 {
        // Taylor series; truncation below 1e-14 for |b| < 0.05
        let mut term = 0.5;
        let mut sum = 0.5;
        for m in 3..10 {
            term *= b / m as f64;
            sum += term;
        }
        sum
    } else {
        (b.exp_m1() - b) / (b * b)
    }
}

impl Spectrum {
    pub(crate) fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len();
        assert!(n >= 2, "spectrum needs at least two samples");
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Self {
            samples,
            coeffs: buf,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.samples.len()
    }

    pub(crate) fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Trapezoid mean over one period (the `k = 0` coefficient).
    pub(crate) fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    fn nyquist(&self) -> Option<usize> {
        let n = self.len();
        (n % 2 == 0).then_some(n / 2)
    }

    fn omega(&self, idx: usize) -> f64 {
        let n = self.len();
        let k = if idx <= n / 2 {
            idx as f64
        } else {
            idx as f64 - n as f64
        };
        TAU * k
    }

    /// Multiplies each non-constant mode by `g(i omega_k)`.  The Nyquist
    /// coefficient stands for a cosine, so it is split evenly between
    /// `+omega` and `-omega`.
    fn modal_weights(&self, g: impl Fn(Complex64) -> Complex64) -> Vec<Complex64> {
        let nyq = self.nyquist();
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (idx, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = self.omega(idx);
            out[idx] = if Some(idx) == nyq {
                *c * 0.5 * (g(Complex64::new(0.0, w)) + g(Complex64::new(0.0, -w)))
            } else {
                *c * g(Complex64::new(0.0, w))
            };
        }
        out
    }

    fn synthesize(mut modes: Vec<Complex64>) -> Vec<f64> {
        let n = modes.len();
        FftPlanner::new().plan_fft_inverse(n).process(&mut modes);
        modes.into_iter().map(|c| c.re).collect()
    }

    /// Grid samples of the spectral derivative.
    pub(crate) fn derivative(&self) -> Vec<f64> {
        Self::synthesize(self.modal_weights(|iw| iw))
    }

    /// Evaluates the trigonometric interpolant at any `z`.
    pub(crate) fn eval(&self, z: f64) -> f64 {
        let nyq = self.nyquist();
        let mut acc = self.coeffs[0].re;
        for (idx, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = self.omega(idx);
            if Some(idx) == nyq {
                acc += c.re * (w * z).cos();
            } else {
                let (s, co) = (w * z).sin_cos();
                acc += c.re * co - c.im * s;
            }
        }
        acc
    }

    /// Non-constant part of the primitive of `e^{a z} P` divided by `e^{a z}`:
    /// `A(z) = sum_{k != 0} c_k e^{i w_k z} / (a + i w_k)`, on the grid.
    fn tilted_primitive(&self, a: f64) -> Vec<f64> {
        Self::synthesize(self.modal_weights(|iw| 1.0 / (iw + a)))
    }

    /// Periodic solution `Q` of `a Q + Q' = P` on the grid, `a != 0`.
    pub(crate) fn resolvent(&self, a: f64) -> Vec<f64> {
        let p0 = self.mean() / a;
        self.tilted_primitive(a)
            .into_iter()
            .map(|v| v + p0)
            .collect()
    }

    fn tilted_primitive_at_zero(&self, a: f64) -> f64 {
        self.modal_weights(|iw| 1.0 / (iw + a))
            .iter()
            .map(|c| c.re)
            .sum()
    }

    /// `int_0^1 e^{a z} P(z) dz`.
    pub(crate) fn exp_weighted_total(&self, a: f64) -> f64 {
        self.mean() * phi(a, 1.0) + a.exp_m1() * self.tilted_primitive_at_zero(a)
    }

    /// `int_0^{z_j} e^{a s} P(s) ds` for `j = 0..=n` (the last entry is `z = 1`).
    pub(crate) fn exp_weighted_cumulative(&self, a: f64) -> Vec<f64> {
        let n = self.len();
        let prim = self.tilted_primitive(a);
        let p0 = self.mean();
        let a0 = prim[0];
        let mut out: Vec<f64> = (0..n)
            .map(|j| {
                let z = j as f64 / n as f64;
                p0 * phi(a, z) + (a * z).exp() * prim[j] - a0
            })
            .collect();
        out.push(self.exp_weighted_total(a));
        out
    }

    /// `int_0^1 phi(b, z) P(z) dz`, i.e. `int_0^1 int_0^z e^{b s} ds P(z) dz`.
    fn tilted_tail(&self, b: f64) -> f64 {
        // Swap the order: int_0^1 e^{b s} (int_s^1 P) ds, with
        // int_s^1 P = p0 (1 - s) - R(s) + R(0) and R the periodic primitive of P - p0.
        let r0: f64 = self.modal_weights(|iw| 1.0 / iw).iter().map(|c| c.re).sum();
        let tilted_r: f64 = self
            .modal_weights(|iw| 1.0 / (iw * (iw + b)))
            .iter()
            .map(|c| c.re)
            .sum();
        self.mean() * tail_weight(b) - b.exp_m1() * tilted_r + r0 * phi(b, 1.0)
    }

    /// `int_0^1 [int_0^z e^{a s} P(s) ds] e^{-a z} W(z) dz` for periodic `P`, `W`.
    pub(crate) fn cross_integral(&self, a: f64, weight: &Spectrum) -> f64 {
        assert_eq!(self.len(), weight.len());
        let prim = self.tilted_primitive(a);
        let periodic: f64 = prim
            .iter()
            .zip(weight.samples())
            .map(|(x, w)| x * w)
            .sum::<f64>()
            / self.len() as f64;
        self.mean() * weight.tilted_tail(-a) + periodic - prim[0] * weight.exp_weighted_total(-a)
    }
}
