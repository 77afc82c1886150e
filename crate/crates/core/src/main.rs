//! Command-line front end: sweeps, contours, shot sampling, and the figure
//! presets, all emitting CSV (stdout or `--out`). Human-readable summaries go
//! to stderr so piped CSV stays clean.

use std::process::ExitCode;

use nhqsim::harness::presets::PresetRun;
use nhqsim::harness::shots::readout_from_propagator;
use nhqsim::harness::sweep::je_value_at;
use nhqsim::harness::{
    self, csv, error_code, extract_contours, run_compare_sweep, run_floquet_sweep, run_grid_sweep,
    run_tau_sweep, Config, ConfigError, Engine, FigurePreset, PathKind,
};
use nhqsim::lindblad::{oracle_readout, ReadoutProbs};
use nhqsim::model::DetuningConvention;
use nhqsim::propagator::propagate;
use nhqsim::workstats::work_distribution;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_UNKNOWN_PRESET: u8 = 4;

const USAGE: &str = "\
nhqsim - non-Hermitian qubit work-statistics simulator

USAGE:
  nhqsim <command> [options]

COMMANDS:
  propagate           propagator + Floquet diagnostics over the loop-duration grid
  tpm                 transition matrix and work distribution at tau_stop
  jarzynski           exponentiated-work summary at tau_stop
  sweep               loop-duration sweep of probabilities and work statistics
  contours            (delta_max, tau) grid sweep + unity-contour extraction
  shots               seeded single-shot sampling with post-selection at tau_stop
  lindblad-compare    non-Hermitian engine vs the master-equation oracle
  figure <name>       bundled presets: fig3a fig3b fig4a..fig4f fig5a..fig5d

OPTIONS:
  --config <path>     key = value configuration file
  --out <path>        write CSV here (default: stdout)
  --seed <u64>        override the config seed
  --engine <name>     nonhermitian | lindblad_ideal | lindblad_full
  --grid <NDxNT>      contour grid resolution (default 60x90)
  --contour-tol <x>   contour refinement target (default 1e-8)

EXIT CODES:
  0 success, 2 configuration error, 3 numerical failure, 4 unknown preset
";

struct Cli {
    command: String,
    preset: Option<String>,
    config: Option<String>,
    out: Option<String>,
    seed: Option<u64>,
    engine: Option<Engine>,
    grid: (usize, usize),
    contour_tol: f64,
}

fn parse_cli(args: &[String]) -> Result<Cli, String> {
    let mut it = args.iter();
    let command = it.next().cloned().ok_or_else(|| USAGE.to_string())?;
    let mut cli = Cli {
        command: command.clone(),
        preset: None,
        config: None,
        out: None,
        seed: None,
        engine: None,
        grid: (60, 90),
        contour_tol: harness::DEFAULT_CONTOUR_TOL,
    };
    if command == "figure" {
        cli.preset = Some(
            it.next()
                .cloned()
                .ok_or("figure needs a preset name, e.g. `figure fig5a`")?,
        );
    }
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(value()?),
            "--out" => cli.out = Some(value()?),
            "--seed" => cli.seed = Some(value()?.parse().map_err(|_| "--seed expects a u64")?),
            "--engine" => cli.engine = Some(value()?.parse().map_err(|_| "unknown engine name")?),
            "--grid" => {
                let v = value()?;
                let (a, b) = v
                    .split_once('x')
                    .ok_or("--grid expects NDxNT, e.g. 60x90")?;
                let nd = a.parse().map_err(|_| "--grid expects NDxNT")?;
                let nt = b.parse().map_err(|_| "--grid expects NDxNT")?;
                if nd < 2 || nt < 2 {
                    return Err("--grid needs at least 2x2".into());
                }
                cli.grid = (nd, nt);
            }
            "--contour-tol" => {
                cli.contour_tol = value()?
                    .parse()
                    .map_err(|_| "--contour-tol expects a float")?;
                if cli.contour_tol <= 0.0 || cli.contour_tol.is_nan() {
                    return Err("--contour-tol must be > 0".into());
                }
            }
            other => return Err(format!("unknown option `{other}`\n\n{USAGE}")),
        }
    }
    Ok(cli)
}

fn load_config(cli: &Cli) -> Result<Config, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(engine) = cli.engine {
        cfg.engine = engine;
    }
    Ok(cfg)
}

fn write_output(out: &Option<String>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Per-state readout probabilities for the shot sampler, whatever the engine.
fn shot_readouts(cfg: &Config, tau: f64) -> Result<[ReadoutProbs<f64>; 2], u32> {
    let spec = cfg.path_spec(tau).map_err(|_| error_code::OTHER)?;
    let rates = cfg.engine_rates().map_err(|_| error_code::OTHER)?;
    match cfg.engine {
        Engine::NonHermitian => {
            let p = propagate(&spec, &rates, cfg.slices_tol)
                .map_err(|e| harness::code_of_propagate(&e))?;
            Ok(readout_from_propagator(&p, &rates))
        }
        Engine::LindbladIdeal | Engine::LindbladFull => {
            let mut out = [ReadoutProbs {
                p_g: 0.0,
                p_plus: 0.0,
                p_minus: 0.0,
            }; 2];
            for (k, plus) in [(0usize, true), (1usize, false)] {
                out[k] = oracle_readout(
                    &spec,
                    &rates,
                    plus,
                    cfg.dt,
                    DetuningConvention::SymmetricSplit,
                )
                .map_err(|e| harness::code_of_lindblad(&e))?;
            }
            Ok(out)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, (u8, String)> {
    let config_err = |e: ConfigError| (EXIT_CONFIG, e.to_string());
    let io_err = |e: std::io::Error| (EXIT_NUMERICAL, format!("cannot write output: {e}"));

    match cli.command.as_str() {
        "sweep" | "tpm" | "jarzynski" => {
            let mut cfg = load_config(cli).map_err(config_err)?;
            if cli.command != "sweep" {
                // single-point commands evaluate at tau_stop
                cfg.tau_start = cfg.tau_stop;
            }
            let points = run_tau_sweep(&cfg);
            let failed = points.iter().any(|p| p.error != error_code::OK);
            if cli.command != "sweep" {
                let p = &points[0];
                if let (Some(tm), Some(je)) = (&p.tm, &p.je) {
                    let dist = work_distribution(tm, &cfg.prep());
                    eprintln!("tau_us          = {}", p.tau);
                    eprintln!("P(+|+) P(+|-)   = {:.6} {:.6}", tm.pp(), tm.pm());
                    eprintln!("P(-|+) P(-|-)   = {:.6} {:.6}", tm.mp(), tm.mm());
                    eprintln!("work support    = {:?} rad/us", dist.support);
                    eprintln!("work probs      = {:?}", dist.probs);
                    eprintln!("exp_work_avg    = {:.12}", je.value);
                    eprintln!("deviation       = {:+.3e}", je.deviation);
                    eprintln!("mean_work       = {:+.6e} rad/us", je.mean_work);
                    eprintln!("asym            = {:+.3e}", je.asym);
                } else {
                    eprintln!("point failed with error code {}", p.error);
                }
            }
            write_output(&cli.out, &csv::tau_sweep_csv(&points)).map_err(io_err)?;
            Ok(if failed { EXIT_NUMERICAL } else { 0 })
        }
        "propagate" => {
            let cfg = load_config(cli).map_err(config_err)?;
            let points = run_floquet_sweep(&cfg);
            let failed = points.iter().any(|p| p.error != error_code::OK);
            write_output(&cli.out, &csv::floquet_csv(&points)).map_err(io_err)?;
            Ok(if failed { EXIT_NUMERICAL } else { 0 })
        }
        "lindblad-compare" => {
            let cfg = load_config(cli).map_err(config_err)?;
            let points = run_compare_sweep(&cfg);
            let failed = points.is_empty() || points.iter().any(|p| p.error != error_code::OK);
            write_output(&cli.out, &csv::compare_csv(&points)).map_err(io_err)?;
            Ok(if failed { EXIT_NUMERICAL } else { 0 })
        }
        "contours" => {
            let cfg = load_config(cli).map_err(config_err)?;
            if cfg.path == PathKind::JSweep {
                return Err((
                    EXIT_CONFIG,
                    "contours needs a detuning path (`path = delta1` or `delta2`)".into(),
                ));
            }
            let grid = run_grid_sweep(&cfg, cli.grid.0, cli.grid.1);
            let failed = grid.errors.iter().any(|&e| e != error_code::OK);
            let set = extract_contours(
                &grid,
                |delta_max, tau| je_value_at(&cfg, delta_max, tau).ok(),
                cli.contour_tol,
            );
            eprintln!(
                "{} polylines, {} vertices, {} tangency cells",
                set.polylines.len(),
                set.vertex_count(),
                set.tangency_cells.len()
            );
            write_output(&cli.out, &csv::contours_csv(&set)).map_err(io_err)?;
            Ok(if failed { EXIT_NUMERICAL } else { 0 })
        }
        "shots" => {
            let cfg = load_config(cli).map_err(config_err)?;
            let readouts = shot_readouts(&cfg, cfg.tau_stop)
                .map_err(|code| (EXIT_NUMERICAL, format!("engine failed (code {code})")))?;
            let ensemble = harness::sample_shots(&readouts, &cfg.prep(), cfg.shots, cfg.seed)
                .map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
            eprintln!(
                "discard fraction {:.4}, p_hat(+|+) = {:.4} +- {:.4}",
                ensemble.discard_fraction,
                ensemble.p_hat.pp(),
                ensemble.se[0][0]
            );
            write_output(&cli.out, &csv::shots_csv(&ensemble)).map_err(io_err)?;
            Ok(0)
        }
        "figure" => {
            let name = cli.preset.as_deref().unwrap_or_default();
            let preset: FigurePreset = name
                .parse()
                .map_err(|_| (EXIT_UNKNOWN_PRESET, format!("unknown preset `{name}`")))?;
            let apply = |cfg: &mut Config| {
                if let Some(seed) = cli.seed {
                    cfg.seed = seed;
                }
                if let Some(engine) = cli.engine {
                    cfg.engine = engine;
                }
            };
            match preset.plan() {
                PresetRun::Tau(mut cfg) => {
                    apply(&mut cfg);
                    let points = run_tau_sweep(&cfg);
                    let failed = points.iter().any(|p| p.error != error_code::OK);
                    write_output(&cli.out, &csv::tau_sweep_csv(&points)).map_err(io_err)?;
                    Ok(if failed { EXIT_NUMERICAL } else { 0 })
                }
                PresetRun::Grid {
                    mut cfg,
                    n_delta,
                    n_tau,
                } => {
                    apply(&mut cfg);
                    let grid = run_grid_sweep(&cfg, n_delta, n_tau);
                    let failed = grid.errors.iter().any(|&e| e != error_code::OK);
                    write_output(&cli.out, &csv::grid_csv(&grid)).map_err(io_err)?;
                    Ok(if failed { EXIT_NUMERICAL } else { 0 })
                }
            }
        }
        other => Err((EXIT_CONFIG, format!("unknown command `{other}`\n\n{USAGE}"))),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let cli = match parse_cli(&args) {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
