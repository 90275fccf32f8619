mod common;

use common::{random_potential, rng, sup_diff};
use rand::Rng;
use ratchet_core::evolve::{
    relax_to_steady, relax_with, steady_at_centers, step, DensityField, EvolveConfig, Frame,
};
use ratchet_core::steady::steady_density;
use ratchet_core::{ChannelParams, PeriodicPotential, QuadratureSpec};

fn params(sigma: f64, v: f64) -> ChannelParams {
    ChannelParams::new(sigma, v).unwrap()
}

fn bump(n: usize) -> DensityField {
    DensityField::from_fn(n, |x| (-((x - 0.5) / 0.05f64).powi(2)).exp()).unwrap()
}

#[test]
fn backward_euler_keeps_density_nonnegative() {
    let mut r = rng(21);
    let mut steps = 0;
    while steps < 10_000 {
        let p = random_potential(&mut r, 1.0);
        let c = params(r.gen_range(0.05..2.0), r.gen_range(-5.0..5.0));
        let frame = if r.gen_bool(0.5) {
            Frame::Lab
        } else {
            Frame::Moving
        };
        let cfg = EvolveConfig::new(r.gen_range(1e-4..0.5), frame, 1.0).unwrap();
        let values: Vec<f64> = (0..64)
            .map(|_| r.gen_range(0.0..1.0) * r.gen_range(0.0..1.0))
            .collect();
        let mut f = DensityField::new(values, 0.0).unwrap();
        for _ in 0..100 {
            f = step(&f, &p, c, &cfg).unwrap();
            assert!(f.values().iter().all(|v| *v >= 0.0));
            steps += 1;
        }
    }
}

#[test]
fn mass_is_conserved_each_step() {
    let p = PeriodicPotential::new(vec![0.2], vec![0.5]).unwrap();
    let c = params(0.7, 1.3);
    for frame in [Frame::Lab, Frame::Moving] {
        let cfg = EvolveConfig::new(1e-3, frame, 1.0).unwrap();
        let mut f = bump(512);
        for _ in 0..500 {
            let g = step(&f, &p, c, &cfg).unwrap();
            assert!((g.mass() - f.mass()).abs() <= 1e-13);
            f = g;
        }
    }
}

#[test]
fn l1_contraction() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let mut a = bump(256);
    let mut b = DensityField::from_fn(256, |x| 1.0 + 0.9 * (6.0 * x).sin()).unwrap();
    let mut gap = a.l1_distance(b.values());
    for _ in 0..2000 {
        a = step(&a, &p, c, &cfg).unwrap();
        b = step(&b, &p, c, &cfg).unwrap();
        let next = a.l1_distance(b.values());
        assert!(next <= gap + 1e-12);
        gap = next;
    }
}

#[test]
fn lab_and_moving_frames_agree() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let n = 512;
    let lab_cfg = EvolveConfig::new(1e-3, Frame::Lab, 1.0).unwrap();
    let mov_cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let mut lab = DensityField::uniform(n).unwrap();
    let mut mov = DensityField::uniform(n).unwrap();
    for _ in 0..10_000 {
        lab = step(&lab, &p, c, &lab_cfg).unwrap();
        mov = step(&mov, &p, c, &mov_cfg).unwrap();
    }
    // V t = 10 is a whole number of periods, so no shift is needed on the grid
    assert!((lab.time() - 10.0).abs() < 1e-9);
    assert!(sup_diff(lab.values(), mov.values()) <= 5e-3);
    let target = steady_at_centers(&p, c, n).unwrap();
    assert!(sup_diff(lab.values(), &target) <= 5e-3);
}

#[test]
fn zero_voltage_frames_are_identical() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(0.8, 0.0);
    let lab = step(
        &bump(128),
        &p,
        c,
        &EvolveConfig::new(0.01, Frame::Lab, 0.7).unwrap(),
    )
    .unwrap();
    let mov = step(
        &bump(128),
        &p,
        c,
        &EvolveConfig::new(0.01, Frame::Moving, 0.7).unwrap(),
    )
    .unwrap();
    assert_eq!(lab.values(), mov.values());
}

#[test]
fn flat_potential_keeps_uniform_in_lab_frame() {
    let cfg = EvolveConfig::new(0.01, Frame::Lab, 1.0).unwrap();
    let mut f = DensityField::uniform(64).unwrap();
    for _ in 0..100 {
        f = step(&f, &PeriodicPotential::zero(), params(1.0, 2.5), &cfg).unwrap();
    }
    assert!(f.values().iter().all(|v| (v - 1.0).abs() <= 1e-12));
}

#[test]
fn second_order_spatial_convergence() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let cfg = EvolveConfig::new(0.5, Frame::Moving, 1.0).unwrap();
    let gaps: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let r = relax_to_steady(&DensityField::uniform(n).unwrap(), &p, c, &cfg, 1e-12, 1000)
                .unwrap();
            assert!(r.converged);
            r.l1_gap
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "{gaps:?}");
    }
}

#[test]
fn bump_relaxes_to_steady_state() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let mut min_seen = f64::INFINITY;
    let r = relax_with(&bump(256), &p, c, &cfg, 1e-8, 100_000, |f| {
        min_seen = min_seen.min(f.values().iter().copied().fold(f64::INFINITY, f64::min));
    })
    .unwrap();
    assert!(r.converged);
    assert!(r.l1_gap <= 1e-4, "{}", r.l1_gap);
    assert!(min_seen >= 0.0);
}

#[test]
fn flat_relaxation_finishes_in_one_step() {
    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let r = relax_to_steady(
        &DensityField::uniform(128).unwrap(),
        &PeriodicPotential::zero(),
        params(0.6, -1.2),
        &cfg,
        1e-8,
        10,
    )
    .unwrap();
    assert!(r.converged && r.steps == 1 && r.l1_gap <= 1e-12);
}

#[test]
fn steady_state_is_nearly_fixed() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let n = 1024;
    let f = DensityField::new(steady_at_centers(&p, c, n).unwrap(), 0.0).unwrap();
    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let g = step(&f, &p, c, &cfg).unwrap();
    assert!(sup_diff(f.values(), g.values()) <= 1e-8);
}

#[test]
fn relaxation_reports_non_convergence() {
    let p = PeriodicPotential::sine(0.5);
    let c = params(1.0, 1.0);
    let cfg = EvolveConfig::new(1e-3, Frame::Moving, 1.0).unwrap();
    let r = relax_to_steady(&bump(64), &p, c, &cfg, 1e-12, 1).unwrap();
    assert!(!r.converged && r.steps == 1);
    assert!(r.l1_gap > 1e-3);
    let ss = steady_density(&p, c, QuadratureSpec::default()).unwrap();
    assert!(ss.rho.iter().all(|v| *v > 0.0));
}

#[test]
fn snapshot_csv() {
    let f = DensityField::uniform(4).unwrap();
    let mut out = Vec::new();
    f.write_snapshot(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "0,0.125000000000,1.00000000000");
}
