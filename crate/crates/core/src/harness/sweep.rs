//! Loop-duration sweeps, `(delta_max, tau)` grid sweeps, and the
//! engine-comparison sweep. Points are evaluated in parallel and collected in
//! deterministic grid order; per-point failures are recorded as error codes,
//! never dropped.

use rayon::prelude::*;

use crate::harness::config::{Config, Engine};
use crate::harness::{code_of_lindblad, code_of_propagate, code_of_workstats, error_code};
use crate::lindblad::oracle_transition_probs;
use crate::model::DetuningConvention;
use crate::propagator::{
    classify_pt, floquet, je_condition, propagate, PtClass, DEFAULT_CLASS_TOL,
};
use crate::qmath::Mat2;
use crate::workstats::{exp_work_avg, transition_probs, JeResult, TransitionMatrix};

/// One evaluated loop duration.
#[derive(Debug, Clone)]
pub struct TauPoint {
    pub tau: f64,
    pub tm: Option<TransitionMatrix<f64>>,
    pub je: Option<JeResult<f64>>,
    /// PT classification of the non-Hermitian Floquet Hamiltonian (always
    /// computed from the non-Hermitian propagator, whatever the engine).
    pub pt: Option<PtClass<f64>>,
    pub je_cond: Option<bool>,
    pub branch_warning: bool,
    pub error: u32,
}

fn engine_tm(cfg: &Config, tau: f64) -> Result<TransitionMatrix<f64>, u32> {
    let spec = cfg.path_spec(tau).map_err(|_| error_code::OTHER)?;
    let rates = cfg.engine_rates().map_err(|_| error_code::OTHER)?;
    match cfg.engine {
        Engine::NonHermitian => {
            let p = propagate(&spec, &rates, cfg.slices_tol).map_err(|e| code_of_propagate(&e))?;
            transition_probs(&p.g).map_err(|e| code_of_workstats(&e))
        }
        Engine::LindbladIdeal | Engine::LindbladFull => {
            oracle_transition_probs(&spec, &rates, cfg.dt, DetuningConvention::SymmetricSplit)
                .map_err(|e| code_of_lindblad(&e))
        }
    }
}

/// Evaluate one loop duration with the configured engine; the Floquet columns
/// always come from the non-Hermitian propagator (computed once and shared
/// when it is also the engine).
pub fn tau_point(cfg: &Config, tau: f64) -> TauPoint {
    let mut point = TauPoint {
        tau,
        tm: None,
        je: None,
        pt: None,
        je_cond: None,
        branch_warning: false,
        error: error_code::OK,
    };
    let Ok(spec) = cfg.path_spec(tau) else {
        point.error = error_code::OTHER;
        return point;
    };
    let Ok(nh_rates) = cfg.rates() else {
        point.error = error_code::OTHER;
        return point;
    };
    let nh_prop = propagate(&spec, &nh_rates, cfg.slices_tol);

    let tm = match cfg.engine {
        Engine::NonHermitian => nh_prop
            .as_ref()
            .map_err(code_of_propagate)
            .and_then(|p| transition_probs(&p.g).map_err(|e| code_of_workstats(&e))),
        Engine::LindbladIdeal | Engine::LindbladFull => cfg
            .engine_rates()
            .map_err(|_| error_code::OTHER)
            .and_then(|rates| {
                oracle_transition_probs(&spec, &rates, cfg.dt, DetuningConvention::SymmetricSplit)
                    .map_err(|e| code_of_lindblad(&e))
            }),
    };
    match tm {
        Ok(tm) => {
            point.je = Some(exp_work_avg(&tm, &cfg.prep()));
            point.tm = Some(tm);
        }
        Err(code) => point.error = code,
    }

    match nh_prop.and_then(|p| floquet(&p)) {
        Ok(f) => {
            point.pt = Some(classify_pt(&f, DEFAULT_CLASS_TOL));
            point.je_cond = Some(je_condition(&f, DEFAULT_CLASS_TOL));
            point.branch_warning = f.branch_warning;
        }
        Err(e) => {
            if point.error == error_code::OK {
                point.error = code_of_propagate(&e);
            }
        }
    }
    point
}

/// Sweep the configured loop-duration grid.
pub fn run_tau_sweep(cfg: &Config) -> Vec<TauPoint> {
    cfg.tau_grid()
        .par_iter()
        .map(|&tau| tau_point(cfg, tau))
        .collect()
}

// ---------------------------------------------------------------------------
// Grid sweep
// ---------------------------------------------------------------------------

/// Exponentiated-work values over a `(delta_max, tau)` grid, row-major in
/// `delta_max`.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub delta_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    /// `values[i * tau_values.len() + j]` is `<e^{-beta W}>` at
    /// `(delta_values[i], tau_values[j])`; NaN where `errors` is nonzero.
    pub values: Vec<f64>,
    pub errors: Vec<u32>,
}

impl SweepGrid {
    pub fn value(&self, i_delta: usize, i_tau: usize) -> f64 {
        self.values[i_delta * self.tau_values.len() + i_tau]
    }

    pub fn error(&self, i_delta: usize, i_tau: usize) -> u32 {
        self.errors[i_delta * self.tau_values.len() + i_tau]
    }
}

/// Exponentiated-work value at one `(delta_max, tau)` node of the configured
/// path family.
pub fn je_value_at(cfg: &Config, delta_max: f64, tau: f64) -> Result<f64, u32> {
    let mut node = cfg.clone();
    node.delta_max = delta_max;
    let tm = engine_tm(&node, tau)?;
    Ok(exp_work_avg(&tm, &node.prep()).value)
}

/// Sweep `delta_max` over `[0, cfg.delta_max]` (`n_delta` nodes) and `tau`
/// over `[tau_start, tau_stop]` (`n_tau` nodes). Node evaluations run in
/// parallel; output order is deterministic.
pub fn run_grid_sweep(cfg: &Config, n_delta: usize, n_tau: usize) -> SweepGrid {
    assert!(n_delta >= 2 && n_tau >= 2, "grid needs at least 2x2 nodes");
    let delta_values: Vec<f64> = (0..n_delta)
        .map(|i| cfg.delta_max * i as f64 / (n_delta - 1) as f64)
        .collect();
    let tau_values: Vec<f64> = (0..n_tau)
        .map(|j| cfg.tau_start + (cfg.tau_stop - cfg.tau_start) * j as f64 / (n_tau - 1) as f64)
        .collect();

    let nodes: Vec<(usize, usize)> = (0..n_delta)
        .flat_map(|i| (0..n_tau).map(move |j| (i, j)))
        .collect();
    let evaluated: Vec<(f64, u32)> = nodes
        .par_iter()
        .map(
            |&(i, j)| match je_value_at(cfg, delta_values[i], tau_values[j]) {
                Ok(v) => (v, error_code::OK),
                Err(code) => (f64::NAN, code),
            },
        )
        .collect();

    SweepGrid {
        delta_values,
        tau_values,
        values: evaluated.iter().map(|e| e.0).collect(),
        errors: evaluated.iter().map(|e| e.1).collect(),
    }
}

// ---------------------------------------------------------------------------
// Floquet diagnostics sweep
// ---------------------------------------------------------------------------

/// Propagator and Floquet diagnostics at one loop duration.
#[derive(Debug, Clone)]
pub struct FloquetPoint {
    pub tau: f64,
    pub slices: u32,
    pub est_error: f64,
    pub g: Option<Mat2<f64>>,
    pub coeffs: Option<crate::qmath::PauliCoeffs<f64>>,
    pub h_sq: Option<crate::qmath::C<f64>>,
    pub pt: Option<PtClass<f64>>,
    pub branch_warning: bool,
    pub je_cond: Option<bool>,
    pub error: u32,
}

pub fn run_floquet_sweep(cfg: &Config) -> Vec<FloquetPoint> {
    let eval = |tau: f64| -> FloquetPoint {
        let mut point = FloquetPoint {
            tau,
            slices: 0,
            est_error: f64::NAN,
            g: None,
            coeffs: None,
            h_sq: None,
            pt: None,
            branch_warning: false,
            je_cond: None,
            error: error_code::OK,
        };
        let spec = match cfg.path_spec(tau) {
            Ok(s) => s,
            Err(_) => {
                point.error = error_code::OTHER;
                return point;
            }
        };
        let rates = match cfg.rates() {
            Ok(r) => r,
            Err(_) => {
                point.error = error_code::OTHER;
                return point;
            }
        };
        match propagate(&spec, &rates, cfg.slices_tol) {
            Ok(p) => {
                point.slices = p.slices;
                point.est_error = p.est_error;
                point.g = Some(p.g);
                match floquet(&p) {
                    Ok(f) => {
                        point.coeffs = Some(f.coeffs);
                        point.h_sq = Some(f.h_sq);
                        point.pt = Some(f.classification);
                        point.branch_warning = f.branch_warning;
                        point.je_cond = Some(je_condition(&f, DEFAULT_CLASS_TOL));
                    }
                    Err(e) => point.error = code_of_propagate(&e),
                }
            }
            Err(e) => point.error = code_of_propagate(&e),
        }
        point
    };
    cfg.tau_grid().par_iter().map(|&tau| eval(tau)).collect()
}

// ---------------------------------------------------------------------------
// Engine comparison sweep
// ---------------------------------------------------------------------------

/// Transition matrices from the non-Hermitian engine and the Lindblad oracle
/// at one loop duration, with their largest entrywise difference.
#[derive(Debug, Clone)]
pub struct ComparePoint {
    pub tau: f64,
    pub nonhermitian: Option<TransitionMatrix<f64>>,
    pub oracle: Option<TransitionMatrix<f64>>,
    pub max_diff: f64,
    pub error: u32,
}

/// Compare the non-Hermitian engine against the Lindblad oracle across the
/// loop-duration grid. Both sides use the oracle's rates (the ideal,
/// `gamma_e`-only set unless `engine = lindblad_full` asks for the full one),
/// so the comparison is apples to apples.
pub fn run_compare_sweep(cfg: &Config) -> Vec<ComparePoint> {
    let mut oracle_cfg = cfg.clone();
    if oracle_cfg.engine == Engine::NonHermitian {
        oracle_cfg.engine = Engine::LindbladIdeal;
    }
    let rates = match oracle_cfg.engine_rates() {
        Ok(r) => r,
        Err(_) => return Vec::new(),
    };

    let eval = |tau: f64| -> ComparePoint {
        let mut point = ComparePoint {
            tau,
            nonhermitian: None,
            oracle: None,
            max_diff: f64::NAN,
            error: error_code::OK,
        };
        let spec = match cfg.path_spec(tau) {
            Ok(s) => s,
            Err(_) => {
                point.error = error_code::OTHER;
                return point;
            }
        };
        match propagate(&spec, &rates, cfg.slices_tol)
            .map_err(|e| code_of_propagate(&e))
            .and_then(|p| transition_probs(&p.g).map_err(|e| code_of_workstats(&e)))
        {
            Ok(tm) => point.nonhermitian = Some(tm),
            Err(code) => point.error = code,
        }
        match oracle_transition_probs(&spec, &rates, cfg.dt, DetuningConvention::SymmetricSplit) {
            Ok(tm) => point.oracle = Some(tm),
            Err(e) if point.error == error_code::OK => point.error = code_of_lindblad(&e),
            _ => {}
        }
        if let (Some(a), Some(b)) = (&point.nonhermitian, &point.oracle) {
            point.max_diff = (0..2)
                .flat_map(|r| (0..2).map(move |c| (a.p[r][c] - b.p[r][c]).abs()))
                .fold(0.0, f64::max);
        }
        point
    };
    cfg.tau_grid().par_iter().map(|&tau| eval(tau)).collect()
}
