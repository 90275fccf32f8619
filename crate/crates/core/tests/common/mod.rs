#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratchet_core::PeriodicPotential;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric potential with 1 to 3 harmonics and coefficients in [-amp, amp].
pub fn random_potential(rng: &mut impl Rng, amp: f64) -> PeriodicPotential {
    let k = rng.gen_range(1..=3);
    let cos = (0..k).map(|_| rng.gen_range(-amp..=amp)).collect();
    let sin = (0..k).map(|_| rng.gen_range(-amp..=amp)).collect();
    PeriodicPotential::new(cos, sin).unwrap()
}

/// Random potential whose odd part only survives: psi(-x) = -psi(x).
pub fn random_antisymmetric(rng: &mut impl Rng, amp: f64) -> PeriodicPotential {
    let k = rng.gen_range(1..=3);
    let sin = (0..k).map(|_| rng.gen_range(-amp..=amp)).collect();
    PeriodicPotential::new(vec![0.0; k], sin).unwrap()
}

fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f = &f as &dyn Fn(f64) -> f64;
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_step(f, a, fa, b, fb);
    adapt(f, a, fa, b, fb, m, fm, whole, tol, 40)
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
