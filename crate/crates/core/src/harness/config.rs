//! Flat `key = value` configuration files.
//!
//! Recognized keys (all optional; unknown keys are an error):
//! `engine`, `path`, `j_max`, `j_min`, `delta_max`, `tau_start`, `tau_stop`,
//! `tau_step`, `beta`, `gamma_e`, `gamma_f`, `gamma_2e`, `gamma_2f`,
//! `slices_tol`, `dt`, `seed`, `shots`. Blank lines and `#` comments are
//! ignored.

use std::path::Path as FsPath;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{ModelError, Path, PathSpec, Rates};
use crate::propagator::DEFAULT_TOL;
use crate::workstats::{gibbs_weights, GibbsPrep};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: invalid value for `{key}`: `{value}`")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which engine produces the transition probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Post-selected non-Hermitian propagation of the qubit block.
    #[default]
    NonHermitian,
    /// Three-level master equation with the dominant decay channel only.
    LindbladIdeal,
    /// Three-level master equation with all four dissipators.
    LindbladFull,
}

impl FromStr for Engine {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "nonhermitian" => Ok(Engine::NonHermitian),
            "lindblad_ideal" => Ok(Engine::LindbladIdeal),
            "lindblad_full" => Ok(Engine::LindbladFull),
            _ => Err(()),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::NonHermitian => "nonhermitian",
            Engine::LindbladIdeal => "lindblad_ideal",
            Engine::LindbladFull => "lindblad_full",
        })
    }
}

/// Drive-path selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathKind {
    #[default]
    JSweep,
    Delta1,
    Delta2,
}

impl FromStr for PathKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "jsweep" => Ok(PathKind::JSweep),
            "delta1" => Ok(PathKind::Delta1),
            "delta2" => Ok(PathKind::Delta2),
            _ => Err(()),
        }
    }
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PathKind::JSweep => "jsweep",
            PathKind::Delta1 => "delta1",
            PathKind::Delta2 => "delta2",
        })
    }
}

/// Full run configuration with the reference-device defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub engine: Engine,
    pub path: PathKind,
    /// rad/us.
    pub j_max: f64,
    /// rad/us; only meaningful for `jsweep`.
    pub j_min: f64,
    /// rad/us; only meaningful for `delta1`/`delta2`.
    pub delta_max: f64,
    /// us.
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_step: f64,
    /// us/rad.
    pub beta: f64,
    /// 1/us.
    pub gamma_e: f64,
    pub gamma_f: f64,
    pub gamma_2e: f64,
    pub gamma_2f: f64,
    /// Doubling tolerance of the time-ordered propagator.
    pub slices_tol: f64,
    /// RK4 step of the master-equation oracle, us.
    pub dt: f64,
    pub seed: u64,
    /// Shots per prepared state.
    pub shots: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            engine: Engine::NonHermitian,
            path: PathKind::JSweep,
            j_max: 3.74,
            j_min: 3.74,
            delta_max: 0.0,
            tau_start: 0.1,
            tau_stop: 1.0,
            tau_step: 0.02,
            beta: 0.5,
            gamma_e: 1.57,
            gamma_f: 0.21,
            gamma_2e: 1.631,
            gamma_2f: 0.584,
            slices_tol: DEFAULT_TOL,
            dt: crate::lindblad::DEFAULT_DT,
            seed: 0,
            shots: 8000,
        }
    }
}

impl Config {
    pub fn from_file(path: impl AsRef<FsPath>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse `key = value` lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| ConfigError::Malformed {
                    line,
                    text: stripped.to_string(),
                })?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(key, value, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = || ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let f = |v: &str| v.parse::<f64>().map_err(|_| bad());
        match key {
            "engine" => self.engine = value.parse().map_err(|_| bad())?,
            "path" => self.path = value.parse().map_err(|_| bad())?,
            "j_max" => self.j_max = f(value)?,
            "j_min" => self.j_min = f(value)?,
            "delta_max" => self.delta_max = f(value)?,
            "tau_start" => self.tau_start = f(value)?,
            "tau_stop" => self.tau_stop = f(value)?,
            "tau_step" => self.tau_step = f(value)?,
            "beta" => self.beta = f(value)?,
            "gamma_e" => self.gamma_e = f(value)?,
            "gamma_f" => self.gamma_f = f(value)?,
            "gamma_2e" => self.gamma_2e = f(value)?,
            "gamma_2f" => self.gamma_2f = f(value)?,
            "slices_tol" => self.slices_tol = f(value)?,
            "dt" => self.dt = f(value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "shots" => self.shots = value.parse().map_err(|_| bad())?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let tau_ok = self.tau_start > 0.0 && self.tau_stop >= self.tau_start;
        if !tau_ok {
            return Err(ConfigError::Invalid("need 0 < tau_start <= tau_stop"));
        }
        if self.tau_step <= 0.0 || self.tau_step.is_nan() {
            return Err(ConfigError::Invalid("tau_step must be > 0"));
        }
        if self.beta < 0.0 || self.beta.is_nan() {
            return Err(ConfigError::Invalid("beta must be >= 0"));
        }
        if self.slices_tol <= 0.0 || self.slices_tol.is_nan() {
            return Err(ConfigError::Invalid("slices_tol must be > 0"));
        }
        if self.dt <= 0.0 || self.dt.is_nan() {
            return Err(ConfigError::Invalid("dt must be > 0"));
        }
        if self.shots == 0 {
            return Err(ConfigError::Invalid("shots must be >= 1"));
        }
        self.rates()?; // range checks
        self.path_spec(self.tau_start)?;
        Ok(())
    }

    /// Raw device rates from the config.
    pub fn rates(&self) -> Result<Rates<f64>, ModelError> {
        Rates::new(self.gamma_e, self.gamma_f, self.gamma_2e, self.gamma_2f)
    }

    /// Rates as seen by the selected engine: the ideal oracle keeps only
    /// `gamma_e`; the non-Hermitian engine ignores dephasing by construction.
    pub fn engine_rates(&self) -> Result<Rates<f64>, ModelError> {
        let r = self.rates()?;
        Ok(match self.engine {
            Engine::NonHermitian | Engine::LindbladFull => r,
            Engine::LindbladIdeal => r.ideal(),
        })
    }

    /// Drive path at the given loop duration.
    pub fn path_spec(&self, tau: f64) -> Result<PathSpec<f64>, ModelError> {
        let path = match self.path {
            PathKind::JSweep => Path::JSweep {
                j_max: self.j_max,
                j_min: self.j_min,
            },
            PathKind::Delta1 => Path::DeltaHalfSine {
                j_max: self.j_max,
                delta_max: self.delta_max,
            },
            PathKind::Delta2 => Path::DeltaFullSine {
                j_max: self.j_max,
                delta_max: self.delta_max,
            },
        };
        PathSpec::new(path, tau)
    }

    /// Thermal preparation implied by `beta` and `j_max`.
    pub fn prep(&self) -> GibbsPrep<f64> {
        gibbs_weights(self.beta, self.j_max).expect("validated config")
    }

    /// Ascending loop durations `tau_start, tau_start + tau_step, ..= tau_stop`.
    pub fn tau_grid(&self) -> Vec<f64> {
        let n = ((self.tau_stop - self.tau_start) / self.tau_step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| self.tau_start + k as f64 * self.tau_step)
            .collect()
    }
}
