use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ratchet_core::evolve::{self, DensityField, EvolveConfig, Frame, SNAPSHOT_HEADER};
use ratchet_core::export::fmt_sig;
use ratchet_core::particles::{self, DensitySource};
use ratchet_core::response::{self, recover_moments};
use ratchet_core::steady::steady_density;
use ratchet_core::{ChannelParams, QuadratureSpec};

use crate::config::{Axis, Initial, RunConfig, DEFAULT_RECOVER_SIGMAS};
use crate::output::{csv_table, Outputs};
use crate::CliError;

/// Pointwise tolerance for the antisymmetry precondition of `recover`.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

/// Files to write, text for stdout and the outcome.
#[derive(Debug)]
pub struct Run {
    pub outputs: Outputs,
    pub stdout: String,
    pub status: Status,
}

impl Run {
    fn done(outputs: Outputs, stdout: String) -> Self {
        Self {
            outputs,
            stdout,
            status: Status::Done,
        }
    }
}

fn quadrature(cfg: &RunConfig) -> Result<QuadratureSpec, CliError> {
    QuadratureSpec::new(cfg.n_points).map_err(CliError::Module)
}

pub fn steady(cfg: &RunConfig) -> Result<Run, CliError> {
    let (sigma, v) = cfg.single_point()?;
    let c = ChannelParams::new(sigma, v)?;
    let ss = steady_density(&cfg.potential, c, quadrature(cfg)?)?;
    let mut out = Outputs::default();
    out.add_json("steady.json", &ss)?;
    out.add_with("rho.csv", |buf| ss.write_csv(buf))?;
    let line = format!("I={} kappa={}\n", fmt_sig(ss.current), fmt_sig(ss.kappa));
    Ok(Run::done(out, line))
}

pub fn sweep(cfg: &RunConfig) -> Result<Run, CliError> {
    let (sigma_axis, v_axis) = (cfg.sigma_axis()?, cfg.v_axis()?);
    if !(sigma_axis.is_range() || v_axis.is_range()) {
        return Err(CliError::input("sweep needs a range for sigma or v"));
    }
    let sigmas = sigma_axis.geometric("sigma")?;
    let vs = v_axis.linear("v")?;
    let q = quadrature(cfg)?;
    let points: Vec<(f64, f64)> = sigmas
        .iter()
        .flat_map(|&s| vs.iter().map(move |&v| (s, v)))
        .collect();
    // collect keeps input order, so the table does not depend on scheduling
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(s, v)| {
            let ss = steady_density(&cfg.potential, ChannelParams::new(s, v)?, q)?;
            Ok(vec![s, v, ss.current, ss.kappa])
        })
        .collect::<Result<_, ratchet_core::Error>>()?;
    let mut out = Outputs::default();
    out.add("response.csv", csv_table("sigma,v,I,kappa", rows));
    Ok(Run::done(out, format!("rows={}\n", points.len())))
}

#[derive(Serialize)]
struct EvolveReport {
    steps: usize,
    l1_gap: f64,
    converged: bool,
    time: f64,
    grid_n: usize,
}

fn initial_field(cfg: &RunConfig) -> Result<DensityField, CliError> {
    let n = cfg.grid_n;
    let field = match cfg.initial {
        Initial::Uniform => DensityField::uniform(n),
        Initial::Bump => {
            DensityField::from_fn(n, |x| (-((x - 0.5) * (x - 0.5)) / 0.02).exp() + 0.05)
        }
        Initial::Random => {
            let seed = cfg
                .seed
                .ok_or_else(|| CliError::input("random initial data needs a seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            DensityField::new((0..n).map(|_| rng.gen_range(0.5..1.5)).collect(), 0.0)
        }
    };
    field.map_err(CliError::Module)
}

pub fn evolve(cfg: &RunConfig) -> Result<Run, CliError> {
    let (sigma, v) = cfg.single_point()?;
    let c = ChannelParams::new(sigma, v)?;
    let ecfg = EvolveConfig::new(cfg.dt, Frame::Moving, cfg.theta)?;
    let start = initial_field(cfg)?;
    let mut snapshots = Vec::new();
    start
        .write_snapshot(&mut snapshots)
        .expect("writing to memory");
    let every = cfg.snapshot_every;
    let mut last_written = 0;
    let mut count = 0;
    let relax = evolve::relax_with(
        &start,
        &cfg.potential,
        c,
        &ecfg,
        cfg.tol,
        cfg.max_steps,
        |f| {
            count += 1;
            if every > 0 && count % every == 0 {
                f.write_snapshot(&mut snapshots).expect("writing to memory");
                last_written = count;
            }
        },
    )?;
    if last_written != relax.steps {
        relax
            .field
            .write_snapshot(&mut snapshots)
            .expect("writing to memory");
    }
    let mut csv = format!("{SNAPSHOT_HEADER}\n").into_bytes();
    csv.extend(snapshots);
    let report = EvolveReport {
        steps: relax.steps,
        l1_gap: relax.l1_gap,
        converged: relax.converged,
        time: relax.field.time(),
        grid_n: relax.field.grid_n(),
    };
    let mut out = Outputs::default();
    out.add("snapshots.csv", csv);
    out.add_json("evolve.json", &report)?;
    let line = format!(
        "steps={} l1_gap={} converged={}\n",
        relax.steps,
        fmt_sig(relax.l1_gap),
        relax.converged
    );
    Ok(Run {
        outputs: out,
        stdout: line,
        status: if relax.converged {
            Status::Done
        } else {
            Status::NotConverged
        },
    })
}

#[derive(Serialize)]
struct OrbitReport {
    x0: f64,
    kappa_hat: f64,
    kappa: f64,
    samples: usize,
}

pub fn orbit(cfg: &RunConfig) -> Result<Run, CliError> {
    let (sigma, v) = cfg.single_point()?;
    let c = ChannelParams::new(sigma, v)?;
    let ss = steady_density(&cfg.potential, c, quadrature(cfg)?)?;
    let x0 = match (cfg.x0, cfg.seed) {
        (Some(x), _) => x,
        (None, Some(seed)) => ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..1.0),
        (None, None) => 0.0,
    };
    let path = particles::integrate_orbit(
        DensitySource::Steady(&ss),
        &cfg.potential,
        c,
        x0,
        cfg.t_end,
        cfg.dt,
    )?;
    let kappa_hat = particles::empirical_mean_velocity(&path, cfg.burn_in)?;
    let report = OrbitReport {
        x0,
        kappa_hat,
        kappa: ss.kappa,
        samples: path.len(),
    };
    let mut out = Outputs::default();
    out.add_with("orbit.csv", |buf| path.write_csv(buf))?;
    out.add_json("orbit.json", &report)?;
    let line = format!(
        "kappa_hat={} kappa={}\n",
        fmt_sig(kappa_hat),
        fmt_sig(ss.kappa)
    );
    Ok(Run::done(out, line))
}

pub fn recover(cfg: &RunConfig, force: bool) -> Result<Run, CliError> {
    let p = &cfg.potential;
    let antisymmetric = p.is_antisymmetric(ANTISYMMETRY_TOL * p.coeff_l1().max(1.0));
    if !antisymmetric && !force {
        return Err(CliError::Antisymmetry(
            "potential is not antisymmetric; pass --force to fit anyway".into(),
        ));
    }
    let sigmas = match cfg.sigma {
        Some(axis) => axis.geometric("sigma")?,
        None => {
            let (lo, hi, count) = DEFAULT_RECOVER_SIGMAS;
            Axis::Range(crate::config::Range {
                min: lo,
                max: hi,
                count,
            })
            .geometric("sigma")?
        }
    };
    let (mut recovery, curve) = recover_moments(p, &sigmas, cfg.k, quadrature(cfg)?)?;
    if !antisymmetric {
        recovery.warning =
            Some("potential failed the antisymmetry check; odd-coefficient checks skipped".into());
    } else {
        let worst = recovery
            .coeffs
            .iter()
            .step_by(2)
            .fold(0.0f64, |m, c| m.max(c.abs()));
        if worst > cfg.odd_tol {
            recovery.warning = Some(format!(
                "odd series coefficient {worst:e} exceeds odd_tol {:e}",
                cfg.odd_tol
            ));
        }
    }
    let mut out = Outputs::default();
    out.add_json("recovery.json", &recovery)?;
    out.add_with("resistance.csv", |buf| curve.write_csv(buf))?;
    let moments: Vec<String> = recovery.even_moments.iter().map(|m| fmt_sig(*m)).collect();
    let mut line = format!("M_even={}\n", moments.join(","));
    if let Some(w) = &recovery.warning {
        line.push_str(&format!("warning: {w}\n"));
    }
    Ok(Run::done(out, line))
}

pub fn identity_check(cfg: &RunConfig) -> Result<Run, CliError> {
    let sigmas = cfg.sigma_axis()?.geometric("sigma")?;
    let vs: Vec<f64> = cfg
        .v_axis()?
        .linear("v")?
        .into_iter()
        .filter(|v| *v != 0.0)
        .collect();
    if vs.is_empty() {
        return Err(CliError::input(
            "identity grid is empty once v = 0 is left out",
        ));
    }
    let q = quadrature(cfg)?;
    let points: Vec<(f64, f64)> = sigmas
        .iter()
        .flat_map(|&s| vs.iter().map(move |&v| (s, v)))
        .collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(s, v)| {
            let r = response::transform_identity_residual(&cfg.potential, s, v, q)?;
            Ok(vec![s, v, r])
        })
        .collect::<Result<_, ratchet_core::Error>>()?;
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r[2]));
    let mut out = Outputs::default();
    out.add("residuals.csv", csv_table("sigma,v,residual", rows));
    Ok(Run::done(out, format!("max_residual={}\n", fmt_sig(worst))))
}
