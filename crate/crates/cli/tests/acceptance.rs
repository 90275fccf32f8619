//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::fs;
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratchet_core::evolve::{relax_to_steady, step, DensityField, EvolveConfig, Frame};
use ratchet_core::particles::{empirical_mean_velocity, integrate_orbit, DensitySource};
use ratchet_core::response::{
    correlation_F, gaver_stehfest_recover_F, geometric_grid, recover_even_moments, recover_moments,
    resistance, series_coefficients_from_moments, transform_identity_residual,
};
use ratchet_core::steady::{mean_velocity, ode_oracle_current, steady_current, steady_density};
use ratchet_core::{ChannelParams, PeriodicPotential, QuadratureSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_potential(r: &mut impl Rng, amp: f64) -> PeriodicPotential {
    let k = r.gen_range(1..=3);
    let cos = (0..k).map(|_| r.gen_range(-amp..=amp)).collect();
    let sin = (0..k).map(|_| r.gen_range(-amp..=amp)).collect();
    PeriodicPotential::new(cos, sin).unwrap()
}

fn params(sigma: f64, v: f64) -> ChannelParams {
    ChannelParams::new(sigma, v).unwrap()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn bump(n: usize) -> DensityField {
    DensityField::from_fn(n, |x| (-((x - 0.5) / 0.05f64).powi(2)).exp()).unwrap()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(101);
    let q = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_potential(&mut r, 0.5);
        let c = params(r.gen_range(0.3..3.0), r.gen_range(-3.0..3.0));
        let i = steady_current(&p, c, q).map_err(|e| e.to_string())?;
        let (o, _) = ode_oracle_current(&p, c, 512).map_err(|e| e.to_string())?;
        worst = worst.max((i - o).abs() / o.abs());
    }
    verdict(
        worst <= 1e-7,
        format!("max relative error {worst:.2e} (limit 1e-7)"),
    )
}

fn sign_law() -> Outcome {
    let q = QuadratureSpec::default();
    let shape =
        |a: f64| PeriodicPotential::new(vec![0.3 * a, 0.0], vec![0.6 * a, 0.2 * a]).unwrap();
    let vs: Vec<f64> = (0..10).map(|i| -2.5 + 0.5 * i as f64).collect();
    let sigmas = geometric_grid(0.3, 3.0, 10).unwrap();
    let mut worst = 0.0f64;
    let mut violations = 0;
    for &v in &vs {
        for &s in &sigmas {
            for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let ss = steady_density(&shape(a), params(s, v), q).map_err(|e| e.to_string())?;
                let kappa = ss.kappa;
                let trivial = v == 0.0 || a == 0.0;
                let ok = if trivial {
                    kappa == 0.0
                } else {
                    kappa != 0.0 && kappa.signum() == v.signum() && kappa.abs() <= v.abs()
                };
                if !ok {
                    violations += 1;
                }
                let (_, harmonic) = mean_velocity(&ss);
                worst = worst.max((kappa - harmonic).abs() / v.abs().max(1.0));
            }
        }
    }
    verdict(
        violations == 0 && worst <= 1e-7,
        format!("{violations} sign/bound violations in 500 cases, harmonic-mean gap {worst:.2e} (limit 1e-7)"),
    )
}

fn evolution_suite() -> Outcome {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let fail = |e: ratchet_core::Error| e.to_string();

    // mass and positivity under backward Euler, in both frames
    let mut mass_drift = 0.0f64;
    let mut min_value = f64::INFINITY;
    let mut r = rng(103);
    for frame in [Frame::Lab, Frame::Moving] {
        let cfg = EvolveConfig::new(0.05, frame, 1.0).map_err(fail)?;
        let values: Vec<f64> = (0..128).map(|_| r.gen_range(0.0..1.0f64).powi(3)).collect();
        let mut f = DensityField::new(values, 0.0).map_err(fail)?;
        for _ in 0..500 {
            let next = step(&f, &p, c, &cfg).map_err(fail)?;
            mass_drift = mass_drift.max((next.mass() - f.mass()).abs());
            min_value = min_value.min(next.values().iter().copied().fold(f64::INFINITY, f64::min));
            f = next;
        }
    }

    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).map_err(fail)?;
    let mut a = bump(256);
    let mut b = DensityField::from_fn(256, |x| 1.0 + 0.9 * (6.0 * x).sin()).map_err(fail)?;
    let mut gap = a.l1_distance(b.values());
    let mut contracts = true;
    for _ in 0..2000 {
        a = step(&a, &p, c, &cfg).map_err(fail)?;
        b = step(&b, &p, c, &cfg).map_err(fail)?;
        let next = a.l1_distance(b.values());
        contracts &= next <= gap + 1e-12;
        gap = next;
    }

    let lab_cfg = EvolveConfig::new(1e-3, Frame::Lab, 1.0).map_err(fail)?;
    let mut lab = DensityField::uniform(512).map_err(fail)?;
    let mut mov = lab.clone();
    for _ in 0..10_000 {
        lab = step(&lab, &p, c, &lab_cfg).map_err(fail)?;
        mov = step(&mov, &p, c, &cfg).map_err(fail)?;
    }
    // V t = 10 whole periods: the two frames share grid positions
    let frames = sup_diff(lab.values(), mov.values());

    let coarse = EvolveConfig::new(0.5, Frame::Moving, 1.0).map_err(fail)?;
    let mut gaps = Vec::new();
    for n in [256, 512, 1024] {
        let start = DensityField::uniform(n).map_err(fail)?;
        let rel = relax_to_steady(&start, &p, c, &coarse, 1e-12, 1000).map_err(fail)?;
        gaps.push(rel.l1_gap);
    }
    let ratio = gaps
        .windows(2)
        .map(|w| w[0] / w[1])
        .fold(f64::INFINITY, f64::min);

    verdict(
        mass_drift <= 1e-13 && min_value >= 0.0 && contracts && frames <= 5e-3 && ratio >= 3.5,
        format!(
            "mass drift {mass_drift:.1e}/step, min density {min_value:.1e}, L1 contraction {contracts}, \
             lab-moving gap {frames:.1e}, convergence factor {ratio:.2}"
        ),
    )
}

fn transport_chain() -> Outcome {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let ss = steady_density(&p, c, QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let path = integrate_orbit(DensitySource::Steady(&ss), &p, c, 0.0, 500.0, 0.01)
        .map_err(|e| e.to_string())?;
    let k_hat = empirical_mean_velocity(&path, 0.1).map_err(|e| e.to_string())?;
    let (flux, harmonic) = mean_velocity(&ss);
    let spread = [k_hat, flux, harmonic];
    let gap = spread.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x))
        - spread.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    verdict(
        gap <= 2e-3,
        format!("orbit {k_hat:.6}, V - I {flux:.6}, harmonic {harmonic:.6}, spread {gap:.1e} (limit 2e-3)"),
    )
}

fn laplace_identity() -> Outcome {
    let q = QuadratureSpec::new(2048).unwrap();
    let mut worst = [0.0f64; 2];
    for (slot, p) in [PeriodicPotential::sine(0.5), PeriodicPotential::zero()]
        .iter()
        .enumerate()
    {
        for i in 0..5 {
            let sigma = 0.5 + 1.5 * i as f64 / 4.0;
            for v in [-2.0, -1.0, 1.0, 2.0] {
                let r = transform_identity_residual(p, sigma, v, q).map_err(|e| e.to_string())?;
                worst[slot] = worst[slot].max(r);
            }
        }
    }
    verdict(
        worst[0] <= 1e-7 && worst[1] <= 1e-12,
        format!(
            "max residual {:.1e} (limit 1e-7), flat {:.1e} (limit 1e-12)",
            worst[0], worst[1]
        ),
    )
}

fn resistance_two_ways() -> Outcome {
    let mut r = rng(106);
    let q = QuadratureSpec::default();
    let mut worst = 0.0f64;
    let mut below_one = 0;
    for _ in 0..20 {
        let p = random_potential(&mut r, 0.5);
        let sigma = r.gen_range(0.3..3.0);
        let (ri, rf) = resistance(&p, sigma, q).map_err(|e| e.to_string())?;
        if ri < 1.0 || rf < 1.0 {
            below_one += 1;
        }
        worst = worst.max((ri - rf).abs() / ri);
    }
    let flat = resistance(&PeriodicPotential::zero(), 1.0, q).map_err(|e| e.to_string())?;
    verdict(
        worst <= 1e-5 && below_one == 0 && flat == (1.0, 1.0),
        format!("max relative gap {worst:.1e} (limit 1e-5), {below_one} below 1, flat {flat:?}"),
    )
}

fn moment_pipeline() -> Outcome {
    let sigmas = geometric_grid(8.0, 512.0, 12).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for a in [0.2, 0.5] {
        let p = PeriodicPotential::sine(a);
        let (rec, _) = recover_moments(&p, &sigmas, 4, QuadratureSpec::default())
            .map_err(|e| e.to_string())?;
        let m2 = a * a / 2.0;
        let m4 = 3.0 * a.powi(4) / 8.0;
        let e2 = (rec.even_moments[0] - m2).abs() / m2;
        let e4 = (rec.even_moments[1] - m4).abs() / m4;
        let odd = rec.coeffs[0].abs().max(rec.coeffs[2].abs());
        ok &= e2 <= 1e-3 && e4 <= 5e-3 && odd <= 1e-5;
        notes.push(format!(
            "a={a}: M2 {e2:.1e}, M4 {e4:.1e}, |c1|,|c3| <= {odd:.1e}"
        ));
    }
    verdict(
        ok,
        format!("{} (limits 1e-3, 5e-3, 1e-5)", notes.join("; ")),
    )
}

fn algebraic_roundtrip() -> Outcome {
    let mut r = rng(108);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let k = r.gen_range(1..=3);
        let sin = (0..k).map(|_| r.gen_range(-1.0..=1.0)).collect();
        let p = PeriodicPotential::new(vec![0.0; k], sin).unwrap();
        let mut moments: Vec<f64> = (0..=8).map(|j| p.moment(j, 256).unwrap()).collect();
        for j in (1..=7).step_by(2) {
            moments[j] = 0.0;
        }
        let coeffs: Vec<f64> = (1..=8)
            .map(|k| series_coefficients_from_moments(&moments, k))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let back = recover_even_moments(&coeffs, 8).map_err(|e| e.to_string())?;
        for (i, m) in back.iter().enumerate() {
            let want = moments[2 * i + 2];
            worst = worst.max((m - want).abs() / want.max(1.0));
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max error {worst:.1e} over 200 sets (limit 1e-12)"),
    )
}

fn stehfest_inversion() -> Outcome {
    let p = PeriodicPotential::sine(0.2);
    let q = QuadratureSpec::default();
    let us = [0.3, 0.5, 0.7];
    let est = gaver_stehfest_recover_F(&p, 1.0, &us, 12, q).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for e in &est {
        let exact = correlation_F(&p, 1.0, -e.u, q).map_err(|e| e.to_string())?;
        worst = worst.max((e.value - exact).abs() / exact);
    }
    verdict(
        worst <= 1e-3,
        format!("max relative error {worst:.2e} at N=12 (limit 1e-3)"),
    )
}

fn sweep_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("rt-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("sweep.json");
    fs::write(
        &cfg,
        r#"{"potential": {"cos": [0.3, -0.1], "sin": [0.6, 0.2]},
            "sigma": {"min": 0.3, "max": 3, "count": 12},
            "v": {"min": -3, "max": 3, "count": 13}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.join(format!("t{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_rt"))
            .args(["sweep", "--threads", threads, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .stdout(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("sweep with {threads} threads exited with {status}"));
        }
        outputs.push(fs::read(out.join("response.csv")).map_err(|e| e.to_string())?);
    }
    let _ = fs::remove_dir_all(&dir);
    verdict(
        outputs[0] == outputs[1],
        format!(
            "{} bytes, 1 vs 8 threads identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("sign law and harmonic mean", sign_law),
        ("evolution suite", evolution_suite),
        ("transport chain", transport_chain),
        ("Laplace identity", laplace_identity),
        ("resistance", resistance_two_ways),
        ("moment pipeline", moment_pipeline),
        ("algebraic roundtrip", algebraic_roundtrip),
        ("Gaver-Stehfest inversion", stehfest_inversion),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
