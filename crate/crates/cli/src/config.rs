//! Run configuration: one JSON document per run.
//!
//! | key            | default | used by                  |
//! |----------------|---------|--------------------------|
//! | `n_points`     | 1024    | all                      |
//! | `dt`           | 1e-3    | evolve, orbit            |
//! | `theta`        | 1       | evolve                   |
//! | `tol`          | 1e-8    | evolve                   |
//! | `max_steps`    | 1000000 | evolve                   |
//! | `grid_n`       | 256     | evolve                   |
//! | `initial`      | uniform | evolve                   |
//! | `snapshot_every` | 0 (first and last only) | evolve |
//! | `t_end`        | 100     | orbit                    |
//! | `x0`           | from `seed`, else 0 | orbit        |
//! | `seed`         | none    | orbit, evolve (`random`) |
//! | `burn_in`      | 0.1     | orbit                    |
//! | `k`            | 4       | recover                  |
//! | `odd_tol`      | 1e-5    | recover                  |
//! | `sigma`        | geometric 8..512, 12 points for recover; required elsewhere | |
//! | `v`            | required except for recover | |

use std::path::Path;

use ratchet_core::PeriodicPotential;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_N_POINTS: usize = 1024;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_THETA: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;
pub const DEFAULT_GRID_N: usize = 256;
pub const DEFAULT_T_END: f64 = 100.0;
pub const DEFAULT_BURN_IN: f64 = 0.1;
pub const DEFAULT_K: usize = 4;
pub const DEFAULT_ODD_TOL: f64 = 1e-5;
pub const DEFAULT_RECOVER_SIGMAS: (f64, f64, usize) = (8.0, 512.0, 12);

/// `{min, max, count}`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// A single value or a range.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    Range(Range),
}

impl Axis {
    pub fn is_range(&self) -> bool {
        matches!(self, Axis::Range(_))
    }

    fn check_range(r: &Range, name: &str) -> Result<(), CliError> {
        if r.count == 0 {
            return Err(CliError::input(format!("{name} range is empty")));
        }
        if !(r.min.is_finite() && r.max.is_finite()) || r.max < r.min {
            return Err(CliError::input(format!(
                "{name} range needs finite min <= max"
            )));
        }
        Ok(())
    }

    /// Geometric spacing, used for temperatures.
    pub fn geometric(&self, name: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Axis::Value(x) => Ok(vec![*x]),
            Axis::Range(r) => {
                Self::check_range(r, name)?;
                ratchet_core::response::geometric_grid(r.min, r.max, r.count)
                    .map_err(CliError::Module)
            }
        }
    }

    /// Linear spacing, used for voltages.
    pub fn linear(&self, name: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Axis::Value(x) => Ok(vec![*x]),
            Axis::Range(r) => {
                Self::check_range(r, name)?;
                if r.count == 1 {
                    return Ok(vec![r.min]);
                }
                let step = (r.max - r.min) / (r.count - 1) as f64;
                Ok((0..r.count)
                    .map(|i| {
                        if i + 1 == r.count {
                            r.max
                        } else {
                            r.min + step * i as f64
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    #[default]
    Uniform,
    Bump,
    Random,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PeriodicPotential,
    pub sigma: Option<Axis>,
    pub v: Option<Axis>,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    pub x0: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_odd_tol")]
    pub odd_tol: f64,
}

fn default_n_points() -> usize {
    DEFAULT_N_POINTS
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_theta() -> f64 {
    DEFAULT_THETA
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}
fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}
fn default_t_end() -> f64 {
    DEFAULT_T_END
}
fn default_burn_in() -> f64 {
    DEFAULT_BURN_IN
}
fn default_k() -> usize {
    DEFAULT_K
}
fn default_odd_tol() -> f64 {
    DEFAULT_ODD_TOL
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let finite = [
            ("dt", self.dt),
            ("theta", self.theta),
            ("tol", self.tol),
            ("t_end", self.t_end),
            ("burn_in", self.burn_in),
            ("odd_tol", self.odd_tol),
            ("x0", self.x0.unwrap_or(0.0)),
        ];
        if let Some((name, _)) = finite.iter().find(|(_, x)| !x.is_finite()) {
            return Err(CliError::input(format!("{name} must be finite")));
        }
        for (name, axis) in [("sigma", self.sigma), ("v", self.v)] {
            match axis {
                Some(Axis::Value(x)) if !x.is_finite() => {
                    return Err(CliError::input(format!("{name} must be finite")))
                }
                Some(Axis::Range(r)) => Axis::check_range(&r, name)?,
                _ => {}
            }
        }
        Ok(())
    }

    pub fn sigma_axis(&self) -> Result<Axis, CliError> {
        self.sigma
            .ok_or_else(|| CliError::input("config needs sigma"))
    }

    pub fn v_axis(&self) -> Result<Axis, CliError> {
        self.v.ok_or_else(|| CliError::input("config needs v"))
    }

    /// A single `(sigma, v)` pair; ranges are refused.
    pub fn single_point(&self) -> Result<(f64, f64), CliError> {
        match (self.sigma_axis()?, self.v_axis()?) {
            (Axis::Value(s), Axis::Value(v)) => Ok((s, v)),
            _ => Err(CliError::input(
                "this command takes a single sigma and v, not ranges",
            )),
        }
    }
}
