//! Cross-module invariants: gauge freedom of the propagator, Floquet round
//! trips, oracle block closure, predicate equivalences, sampler convergence,
//! and structural properties of the work-statistics layer.

use num_complex::Complex;

use nhqsim::harness::shots::sample_shots;
use nhqsim::harness::sweep::je_value_at;
use nhqsim::harness::{extract_contours, run_grid_sweep, run_tau_sweep, Config, PathKind};
use nhqsim::lindblad::{evolve_rho3, rho2_postselected, DensityMatrix3, ReadoutProbs};
use nhqsim::model::{build_heff, eval_path, Path, PathSpec, Rates};
use nhqsim::propagator::{floquet, je_condition, propagate, propagate_hamiltonian};
use nhqsim::qmath::{expm2, Mat2};
use nhqsim::workstats::{
    exp_work_avg, gibbs_weights, transition_probs, work_distribution, TransitionMatrix,
};
use proptest::prelude::*;

const TEN_PI: f64 = 10.0 * std::f64::consts::PI;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform(state: &mut u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64)
}

fn drive_paths() -> [Path<f64>; 3] {
    [
        Path::JSweep {
            j_max: 3.74,
            j_min: 0.0,
        },
        Path::DeltaHalfSine {
            j_max: 3.74,
            delta_max: TEN_PI,
        },
        Path::DeltaFullSine {
            j_max: 3.74,
            delta_max: TEN_PI,
        },
    ]
}

#[test]
fn scalar_shift_leaves_transition_probabilities_invariant() {
    // H -> H + c(t) I for integrable complex c: identical probabilities
    let rates = Rates::reference();
    let mut st = 77u64;
    for path in drive_paths() {
        for _ in 0..3 {
            let tau = uniform(&mut st, 0.2, 1.0);
            let spec = PathSpec::new(path, tau).unwrap();
            let (a, b, w) = (
                uniform(&mut st, -1.0, 1.0),
                uniform(&mut st, -0.5, 0.5),
                uniform(&mut st, 1.0, 8.0),
            );
            let base = propagate(&spec, &rates, 1e-10).unwrap();
            let shifted = propagate_hamiltonian(
                |t| {
                    let h = build_heff(eval_path(&spec, t).unwrap(), &rates);
                    let c = Complex::new(a * (w * t).cos(), b * t);
                    h + Mat2::diag(c, c)
                },
                tau,
                1e-10,
            )
            .unwrap();
            let tm_a = transition_probs(&base.g).unwrap();
            let tm_b = transition_probs(&shifted.g).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!(
                        (tm_a.p[r][c] - tm_b.p[r][c]).abs() <= 1e-12,
                        "{path:?} tau {tau}"
                    );
                }
            }
        }
    }
}

#[test]
fn floquet_round_trip_reproduces_the_propagator() {
    let rates = Rates::reference();
    for path in drive_paths() {
        for k in 0..8 {
            let tau = 0.1 + 0.9 * k as f64 / 7.0;
            let spec = PathSpec::new(path, tau).unwrap();
            let p = propagate(&spec, &rates, 1e-10).unwrap();
            let f = floquet(&p).unwrap();
            if f.branch_warning {
                continue;
            }
            let back = expm2(&f.coeffs.to_matrix().scaled(Complex::new(0.0, -tau)));
            let rel = back.max_diff(&p.g) / p.g.max_norm();
            assert!(
                rel <= 1e-10,
                "{path:?} tau {tau}: round trip off by {rel:e}"
            );
        }
    }
}

#[test]
fn lindblad_block_closure_with_dominant_decay_only() {
    // with gamma_e alone, the excited-state block of the qutrit density
    // matrix evolves exactly as the post-selected qubit state
    let rates = Rates::reference().ideal();
    for path in drive_paths() {
        for k in 0..10 {
            let tau = 0.1 + 0.9 * k as f64 / 9.0;
            let spec = PathSpec::new(path, tau).unwrap();
            let p = propagate(&spec, &rates, 1e-10).unwrap();

            let rho0 = DensityMatrix3::x_eigenstate(true);
            let rho = evolve_rho3(&spec, &rates, &rho0, 1e-4, Default::default()).unwrap();

            // normalized excited-state block
            let mut block = Mat2::zero();
            for r in 0..2 {
                for c in 0..2 {
                    block.m[r][c] = rho.rho.m[r + 1][c + 1];
                }
            }
            let survival = block.trace().re;
            let block = block.scaled(Complex::new(1.0 / survival, 0.0));

            let mut q0 = Mat2::zero();
            for r in 0..2 {
                for c in 0..2 {
                    q0.m[r][c] = rho0.rho.m[r + 1][c + 1];
                }
            }
            let predicted = rho2_postselected(&p.g, &q0).unwrap();
            assert!(
                predicted.max_diff(&block) <= 1e-8,
                "{path:?} tau {tau}: block deviates by {:e}",
                predicted.max_diff(&block)
            );

            // survival probability from the propagator norm, with the uniform
            // decay restored
            let gx = p.g.to_x_basis();
            let decay = (-(rates.gamma_e + rates.gamma_f) * tau / 2.0).exp();
            let predicted_survival = decay * (gx.m[0][0].norm_sqr() + gx.m[1][0].norm_sqr());
            assert!(
                (survival - predicted_survival).abs() <= 1e-8,
                "{path:?} tau {tau}: survival {survival} vs {predicted_survival}"
            );
        }
    }
}

#[test]
fn jensen_inequality_where_the_equality_holds() {
    // whenever <e^{-beta W}> = 1, the mean work is non-negative (free-energy
    // change is zero on a cycle)
    let sets = [(3.74, 3.74), (3.74, 1.87), (3.74, 0.0), (0.04, 3.74)];
    for (j_max, j_min) in sets {
        for beta in [0.1, 0.5, 2.0] {
            let prep = gibbs_weights(beta, j_max).unwrap();
            for tau in [0.15, 0.5, 1.0] {
                let spec = PathSpec::<f64>::new(Path::JSweep { j_max, j_min }, tau).unwrap();
                let p = propagate(&spec, &Rates::reference(), 1e-10).unwrap();
                let tm = transition_probs(&p.g).unwrap();
                let je = exp_work_avg(&tm, &prep);
                if je.deviation.abs() < 1e-9 {
                    assert!(
                        je.mean_work >= -1e-9,
                        "mean work {} at ({j_max}, {j_min}), beta {beta}, tau {tau}",
                        je.mean_work
                    );
                }
            }
        }
    }
}

#[test]
fn equality_asymmetry_and_alignment_predicates_agree() {
    // on the bundled figure grids the three "does the equality hold here"
    // predicates give the same verdict at every grid point
    let mut checked = 0usize;
    let mut configs = Vec::new();
    for (j_max, j_min) in [(3.74, 3.74), (3.74, 1.87), (3.74, 0.0), (0.04, 3.74)] {
        configs.push(Config {
            path: PathKind::JSweep,
            j_max,
            j_min,
            slices_tol: 1e-10,
            ..Config::default()
        });
    }
    for delta_max in [-TEN_PI, TEN_PI] {
        configs.push(Config {
            path: PathKind::Delta1,
            delta_max,
            slices_tol: 1e-10,
            ..Config::default()
        });
    }
    configs.push(Config {
        path: PathKind::Delta2,
        delta_max: TEN_PI,
        slices_tol: 1e-10,
        ..Config::default()
    });

    for cfg in configs {
        for p in run_tau_sweep(&cfg) {
            assert_eq!(p.error, 0);
            let je = p.je.as_ref().unwrap();
            let dev_zero = je.deviation.abs() <= 1e-6;
            let asym_zero = je.asym.abs() <= 1e-6;
            let aligned = p.je_cond.unwrap();
            assert_eq!(
                dev_zero, asym_zero,
                "{:?} tau {}: dev {:e} asym {:e}",
                cfg.path, p.tau, je.deviation, je.asym
            );
            assert_eq!(
                dev_zero, aligned,
                "{:?} tau {}: dev {:e} alignment {}",
                cfg.path, p.tau, je.deviation, aligned
            );
            checked += 1;
        }
    }
    assert!(checked > 250);
}

#[test]
fn contour_asymmetry_and_alignment_roots_coincide() {
    // along the delta_max = 10 pi line the unity contour, the asymmetry zero
    // and the alignment-component zero land on the same loop time
    let rates = Rates::reference();
    // with 9 delta nodes up to 10 pi * 8/7, node 7 sits on 10 pi exactly
    let cfg = Config {
        path: PathKind::Delta2,
        delta_max: TEN_PI * 8.0 / 7.0,
        tau_start: 0.44,
        tau_stop: 0.50,
        slices_tol: 1e-10,
        ..Config::default()
    };

    let asym_root = {
        let f = |tau: f64| {
            let spec = PathSpec::new(
                Path::DeltaFullSine {
                    j_max: 3.74,
                    delta_max: TEN_PI,
                },
                tau,
            )
            .unwrap();
            let p = propagate(&spec, &rates, 1e-10).unwrap();
            let tm = transition_probs(&p.g).unwrap();
            tm.pp() - tm.mm()
        };
        bisect(&f, 0.44, 0.50)
    };
    let deviation_root = {
        let f = |tau: f64| je_value_at(&cfg, TEN_PI, tau).unwrap() - 1.0;
        bisect(&f, 0.44, 0.50)
    };
    let alignment_root = {
        let f = |tau: f64| {
            let spec = PathSpec::new(
                Path::DeltaFullSine {
                    j_max: 3.74,
                    delta_max: TEN_PI,
                },
                tau,
            )
            .unwrap();
            let p = propagate(&spec, &rates, 1e-10).unwrap();
            floquet(&p).unwrap().coeffs.hy.re
        };
        bisect(&f, 0.44, 0.50)
    };
    // and the marching-squares vertex on the 10 pi column
    let grid = run_grid_sweep(&cfg, 9, 13);
    let set = extract_contours(&grid, |d, t| je_value_at(&cfg, d, t).ok(), 1e-8);
    let vertex_tau = set
        .polylines
        .iter()
        .flatten()
        .filter(|v| v.refined && (v.delta_max - TEN_PI).abs() < 1e-9)
        .map(|v| v.tau)
        .next()
        .expect("contour crosses the 10 pi column");

    assert!(
        (asym_root - deviation_root).abs() <= 1e-4,
        "{asym_root} vs {deviation_root}"
    );
    assert!(
        (asym_root - alignment_root).abs() <= 1e-4,
        "{asym_root} vs {alignment_root}"
    );
    assert!(
        (vertex_tau - asym_root).abs() <= 1e-4,
        "{vertex_tau} vs {asym_root}"
    );
    // at the bisected crossing the alignment predicate is true
    let spec = PathSpec::new(
        Path::DeltaFullSine {
            j_max: 3.74,
            delta_max: TEN_PI,
        },
        asym_root,
    )
    .unwrap();
    let p = propagate(&spec, &rates, 1e-10).unwrap();
    assert!(je_condition(&floquet(&p).unwrap(), 1e-9));
    // half a percent away it is false
    let spec = PathSpec::new(
        Path::DeltaFullSine {
            j_max: 3.74,
            delta_max: TEN_PI,
        },
        0.50,
    )
    .unwrap();
    let p = propagate(&spec, &rates, 1e-10).unwrap();
    assert!(!je_condition(&floquet(&p).unwrap(), 1e-9));
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(
        (flo > 0.0) != (f(hi) > 0.0),
        "no sign change in [{lo}, {hi}]"
    );
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn exchange_residual_matches_its_trigonometric_form() {
    // for G = exp(-i tau h.sigma) the x-basis products reduce to
    // |C -+ i hx S| |S| |hy +- i hz| with C = cos(tau |h|), S = sin(tau |h|)/|h|;
    // the cross-multiplied residual from G must agree with that closed form
    let mut st = 0xC1_05EDu64;
    for _ in 0..500 {
        let mut c =
            |lo: f64, hi: f64| Complex::new(uniform(&mut st, lo, hi), uniform(&mut st, lo, hi));
        let coeffs = nhqsim::qmath::PauliCoeffs {
            h0: Complex::new(0.0, 0.0),
            hx: c(-2.0, 2.0),
            hy: c(-2.0, 2.0),
            hz: c(-2.0, 2.0),
        };
        let tau = uniform(&mut st, 0.1, 1.0);
        let g = expm2(&coeffs.to_matrix().scaled(Complex::new(0.0, -tau)));

        let h_mag = coeffs.h_sq().sqrt();
        let arg = h_mag * tau;
        let cos = arg.cos();
        let sinc = if arg.norm() > 1e-8 {
            arg.sin() / h_mag
        } else {
            Complex::new(tau, 0.0)
        };
        let i = Complex::new(0.0, 1.0);
        let p1 =
            (cos - i * coeffs.hx * sinc).norm() * sinc.norm() * (coeffs.hy + i * coeffs.hz).norm();
        let p2 =
            (cos + i * coeffs.hx * sinc).norm() * sinc.norm() * (coeffs.hy - i * coeffs.hz).norm();
        let closed = (p1 - p2).abs() / p1.max(p2).max(1e-30);

        let residual = nhqsim::propagator::exchange_symmetry_residual(&g);
        assert!(
            (residual - closed).abs() <= 1e-10 * (1.0 + closed),
            "residual {residual} vs closed form {closed}"
        );
    }
}

#[test]
fn contour_vertices_revalidate_from_scratch() {
    let cfg = Config {
        path: PathKind::Delta2,
        delta_max: TEN_PI,
        tau_start: 0.40,
        tau_stop: 0.55,
        slices_tol: 1e-9,
        ..Config::default()
    };
    let grid = run_grid_sweep(&cfg, 7, 9);
    let set = extract_contours(&grid, |d, t| je_value_at(&cfg, d, t).ok(), 1e-8);
    assert!(set.vertex_count() > 0, "window contains a contour");
    for line in &set.polylines {
        for v in line {
            assert!(v.refined);
            let fresh = je_value_at(&cfg, v.delta_max, v.tau).unwrap();
            assert!(
                (fresh - 1.0).abs() <= 1e-8,
                "vertex ({}, {}) re-evaluates to {fresh}",
                v.delta_max,
                v.tau
            );
        }
    }
}

#[test]
fn preset_fig5a_reproduces_the_frozen_crossings() {
    // regression against the measured asymmetry zeros of the zero-average
    // detuning path (non-Hermitian engine, reference rates)
    let nhqsim::harness::presets::PresetRun::Tau(cfg) = nhqsim::harness::FigurePreset::Fig5a.plan()
    else {
        panic!("fig5a is a tau sweep");
    };
    let points = run_tau_sweep(&cfg);
    let mut crossings = Vec::new();
    for w in points.windows(2) {
        let a = w[0].je.as_ref().unwrap().asym;
        let b = w[1].je.as_ref().unwrap().asym;
        if (a > 0.0) != (b > 0.0) {
            crossings.push(0.5 * (w[0].tau + w[1].tau));
        }
    }
    let expected = [0.4637, 0.6081];
    let hits: Vec<f64> = crossings
        .iter()
        .copied()
        .filter(|t| expected.iter().any(|e| (t - e).abs() < 0.01))
        .collect();
    assert_eq!(
        hits.len(),
        2,
        "expected asymmetry zeros near {expected:?}, found {crossings:?}"
    );
}

#[test]
fn shot_estimates_converge_to_the_oracle() {
    // 100 seeded trials at n = 1e6: estimates within 4 standard errors in at
    // least 99 of them
    let readouts = [
        ReadoutProbs {
            p_g: 0.35,
            p_plus: 0.40,
            p_minus: 0.25,
        },
        ReadoutProbs {
            p_g: 0.55,
            p_plus: 0.15,
            p_minus: 0.30,
        },
    ];
    let truth = [
        0.40 / 0.65, // P(+|+) after post-selection
        0.15 / 0.45, // P(+|-)
    ];
    let prep = gibbs_weights(0.5, 3.74).unwrap();
    let mut good = 0;
    for seed in 0..100u64 {
        let e = sample_shots(&readouts, &prep, 1_000_000, seed).unwrap();
        let ok = (0..2).all(|j| {
            let se = e.se[0][j].max(1e-12);
            (e.p_hat.p[0][j] - truth[j]).abs() < 4.0 * se
        });
        if ok {
            good += 1;
        }
    }
    assert!(
        good >= 99,
        "only {good}/100 trials within 4 standard errors"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_are_cyclic(
        j_max in 0.0f64..6.0,
        j_min in 0.0f64..6.0,
        delta_max in -40.0f64..40.0,
        tau in 0.05f64..2.0,
        which in 0usize..3,
    ) {
        let path = match which {
            0 => Path::JSweep { j_max, j_min },
            1 => Path::DeltaHalfSine { j_max, delta_max },
            _ => Path::DeltaFullSine { j_max, delta_max },
        };
        let spec = PathSpec::new(path, tau).unwrap();
        let start = eval_path(&spec, 0.0).unwrap();
        let end = eval_path(&spec, tau).unwrap();
        prop_assert!((start.j - j_max).abs() <= 1e-12 * (1.0 + j_max));
        prop_assert!((end.j - j_max).abs() <= 1e-12 * (1.0 + j_max));
        prop_assert!(start.delta.abs() <= 1e-10 * (1.0 + delta_max.abs()));
        prop_assert!(end.delta.abs() <= 1e-10 * (1.0 + delta_max.abs()));
    }

    #[test]
    fn zero_average_path_is_antisymmetric(
        delta_max in -40.0f64..40.0,
        tau in 0.05f64..2.0,
        frac in 0.0f64..1.0,
    ) {
        let spec = PathSpec::new(
            Path::DeltaFullSine { j_max: 3.74, delta_max }, tau).unwrap();
        let t = frac * tau;
        let a = eval_path(&spec, t).unwrap().delta;
        let b = eval_path(&spec, tau - t).unwrap().delta;
        prop_assert!((a + b).abs() <= 1e-10 * (1.0 + delta_max.abs()));
    }

    #[test]
    fn thermal_weights_are_normalized_and_ordered(
        beta in 0.0f64..50.0,
        j_max in 0.0f64..10.0,
    ) {
        let prep = gibbs_weights(beta, j_max).unwrap();
        prop_assert_eq!(prep.w_plus + prep.w_minus, 1.0);
        prop_assert!(prep.w_plus >= 0.0 && prep.w_plus <= 0.5);
        prop_assert!(prep.w_minus >= prep.w_plus);
    }

    #[test]
    fn transition_probabilities_are_column_stochastic(
        re in proptest::array::uniform8(-2.0f64..2.0),
    ) {
        let g = Mat2::from_rows([
            [Complex::new(re[0], re[1]), Complex::new(re[2], re[3])],
            [Complex::new(re[4], re[5]), Complex::new(re[6], re[7])],
        ]);
        prop_assume!(g.max_norm() > 0.1);
        if let Ok(tm) = transition_probs(&g) {
            for col in 0..2 {
                prop_assert_eq!(tm.p[0][col] + tm.p[1][col], 1.0);
                prop_assert!(tm.p[0][col] >= 0.0 && tm.p[0][col] <= 1.0);
            }
        }
    }

    #[test]
    fn work_distribution_is_normalized(
        p_pp in 0.0f64..1.0,
        p_pm in 0.0f64..1.0,
        beta in 0.0f64..3.0,
        j_max in 0.0f64..6.0,
    ) {
        let tm = TransitionMatrix::from_plus_rows(p_pp, p_pm);
        let prep = gibbs_weights(beta, j_max).unwrap();
        let dist = work_distribution(&tm, &prep);
        let total: f64 = dist.probs.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-14);
        prop_assert!(dist.probs.iter().all(|&p| p >= 0.0));
        prop_assert_eq!(dist.support[0], -dist.support[2]);
        // the expected work matches the summary statistic
        let je = exp_work_avg(&tm, &prep);
        let mean: f64 = dist.support.iter().zip(&dist.probs).map(|(w, p)| w * p).sum();
        prop_assert!((mean - je.mean_work).abs() <= 1e-12 * (1.0 + mean.abs()));
    }
}
