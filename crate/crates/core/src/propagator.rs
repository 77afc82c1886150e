//! Time-ordered propagation of the effective qubit Hamiltonian, extraction of
//! the Floquet Hamiltonian, parity-time classification, and the
//! exchange-symmetry / energy-alignment checks.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{build_heff, drive_at, PathSpec, Rates};
use crate::qmath::{eig2, expm2, logm2, pauli_decompose, Mat2, MatError, PauliCoeffs, C};
use crate::scalar::Real;

/// Starting slice count of the doubling ladder.
const MIN_SLICES: u32 = 64;
/// Hard ceiling on the slice count (2^20).
const MAX_SLICES: u32 = 1 << 20;
/// Default relative tolerance of [`propagate`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Absolute floor for `|h^2|` in the PT classification, where relative
/// comparisons lose meaning (near exceptional points).
const H_SQ_FLOOR: f64 = 1e-24;
/// Default relative tolerance of the PT classification.
pub const DEFAULT_CLASS_TOL: f64 = 1e-9;
/// Fraction of pi: eigenphases closer than this to +/- pi raise the
/// branch-folding warning.
const BRANCH_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagateError {
    #[error("slice doubling hit {max_slices} slices with residual {est_error:e}")]
    NoConvergence { max_slices: u32, est_error: f64 },
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("propagator has not converged")]
    NotConverged,
    #[error(transparent)]
    Mat(#[from] MatError),
}

// ---------------------------------------------------------------------------
// Time-ordered product
// ---------------------------------------------------------------------------

/// One-cycle propagator `G(tau) = T exp[-i \int_0^tau H(t') dt']` with its
/// convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator<T> {
    pub g: Mat2<T>,
    /// Loop duration, us.
    pub tau: T,
    /// Slice count of the accepted refinement level.
    pub slices: u32,
    pub converged: bool,
    /// Relative max-norm difference between the last two refinement levels.
    pub est_error: T,
}

/// Ordered product of per-slice exact exponentials at `n` midpoints, split
/// into the product of the traceless parts and the midpoint quadrature of the
/// trace. The split is exact per slice, and makes the doubling decision
/// invariant under scalar shifts `H -> H + c(t) I`.
fn sliced_product<T, H>(h: &H, tau: T, n: u32) -> (Mat2<T>, C<T>)
where
    T: Real,
    H: Fn(T) -> Mat2<T>,
{
    let half = T::of(0.5);
    let dt = tau / T::of(n as f64);
    let minus_i_dt = Complex::new(T::zero(), -dt);
    let mut prod = Mat2::identity();
    let mut trace_sum = Complex::new(T::zero(), T::zero());
    for k in 0..n {
        let t_mid = (T::of(k as f64) + half) * dt;
        let ham = h(t_mid);
        let s = ham.trace() * half;
        trace_sum = trace_sum + s * dt;
        let mut gen = ham - Mat2::diag(s, s);
        for row in gen.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * minus_i_dt;
            }
        }
        // latest-time factor multiplies on the left
        prod = expm2(&gen) * prod;
    }
    (prod, trace_sum)
}

/// Propagate an arbitrary Hamiltonian `h(t)` over `[0, tau]`, doubling the
/// slice count from 64 until the relative max-norm difference between
/// consecutive refinements drops below `tol`.
pub fn propagate_hamiltonian<T, H>(h: H, tau: T, tol: T) -> Result<Propagator<T>, PropagateError>
where
    T: Real,
    H: Fn(T) -> Mat2<T>,
{
    if tol <= T::zero() || !tol.is_finite() {
        return Err(PropagateError::InvalidTolerance);
    }
    let mut n = MIN_SLICES;
    let (mut coarse, _) = sliced_product(&h, tau, n);
    loop {
        let n2 = n * 2;
        let (fine, trace_sum) = sliced_product(&h, tau, n2);
        let err = coarse.max_diff(&fine) / T::one().max(fine.max_norm());
        if err < tol {
            let phase = (Complex::new(T::zero(), -T::one()) * trace_sum).exp();
            return Ok(Propagator {
                g: fine.scaled(phase),
                tau,
                slices: n2,
                converged: true,
                est_error: err,
            });
        }
        if n2 >= MAX_SLICES {
            return Err(PropagateError::NoConvergence {
                max_slices: n2,
                est_error: err.as_f64(),
            });
        }
        coarse = fine;
        n = n2;
    }
}

/// Propagate one drive path at the given rates.
pub fn propagate<T: Real>(
    spec: &PathSpec<T>,
    rates: &Rates<T>,
    tol: T,
) -> Result<Propagator<T>, PropagateError> {
    let spec = *spec;
    let rates = *rates;
    propagate_hamiltonian(
        move |t| build_heff(drive_at(&spec, t), &rates),
        spec.tau,
        tol,
    )
}

/// Relative doubling residuals on a fixed refinement ladder
/// `64, 128, ..., 64 * 2^levels`, for convergence diagnostics.
pub fn doubling_residuals<T, H>(h: H, tau: T, levels: usize) -> Vec<(u32, T)>
where
    T: Real,
    H: Fn(T) -> Mat2<T>,
{
    let mut out = Vec::with_capacity(levels);
    let mut n = MIN_SLICES;
    let (mut coarse, _) = sliced_product(&h, tau, n);
    for _ in 0..levels {
        let n2 = n * 2;
        let (fine, _) = sliced_product(&h, tau, n2);
        let err = coarse.max_diff(&fine) / T::one().max(fine.max_norm());
        out.push((n2, err));
        coarse = fine;
        n = n2;
    }
    out
}

// ---------------------------------------------------------------------------
// Floquet decomposition
// ---------------------------------------------------------------------------

/// Spectral character of the Floquet Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtSpectrum {
    /// `h^2` real and >= 0: real eigenvalue pair (explicit or emergent
    /// antilinear symmetry, unbroken).
    Real,
    /// `h^2` real and < 0: purely imaginary conjugate pair (antilinear
    /// symmetry, broken phase).
    Imaginary,
    /// `h^2` has a nonzero imaginary part: no antilinear symmetry.
    NoAntilinearSymmetry,
}

impl std::fmt::Display for PtSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PtSpectrum::Real => "real",
            PtSpectrum::Imaginary => "imaginary",
            PtSpectrum::NoAntilinearSymmetry => "none",
        })
    }
}

/// PT classification with its confidence margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtClass<T> {
    pub spectrum: PtSpectrum,
    /// Relative distance from the nearest classification boundary:
    /// `|Im h^2| / |h^2|` for `NoAntilinearSymmetry` (distance above the
    /// reality boundary), `|Re h^2| / |h^2|` for the symmetric classes
    /// (distance from the exceptional-point boundary `h^2 = 0`).
    pub margin: T,
    /// Set when `|h^2|` sits at the absolute floor — an exceptional point of
    /// the Floquet Hamiltonian.
    pub at_ep: bool,
}

/// Trace part, Pauli vector and classification of the Floquet Hamiltonian
/// `H^F = (i/tau) Log G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetDecomp<T> {
    /// Decomposition of the full `H^F` (h0 carries the trace part), rad/us.
    pub coeffs: PauliCoeffs<T>,
    /// `hx^2 + hy^2 + hz^2` of the traceless part, rad^2/us^2.
    pub h_sq: C<T>,
    /// Classification at the default tolerance.
    pub classification: PtClass<T>,
    /// Set when an eigenphase of `G` approaches +/- pi, where the principal
    /// branch of the logarithm folds and `H^F` stops being unique.
    pub branch_warning: bool,
}

/// Extract the Floquet Hamiltonian from a converged propagator.
pub fn floquet<T: Real>(p: &Propagator<T>) -> Result<FloquetDecomp<T>, PropagateError> {
    if !p.converged {
        return Err(PropagateError::NotConverged);
    }
    let log_g = logm2(&p.g)?;
    let i_over_tau = Complex::new(T::zero(), T::one() / p.tau);
    let hf = log_g.scaled(i_over_tau);
    let coeffs = pauli_decompose(&hf);
    let h_sq = coeffs.h_sq();

    let margin = T::PI() * (T::one() - T::of(BRANCH_MARGIN));
    let branch_warning = eig2(&p.g).values.iter().any(|l| l.ln().im.abs() >= margin);

    Ok(FloquetDecomp {
        coeffs,
        h_sq,
        classification: classify_h_sq(h_sq, T::of(DEFAULT_CLASS_TOL)),
        branch_warning,
    })
}

fn classify_h_sq<T: Real>(h_sq: C<T>, rel_tol: T) -> PtClass<T> {
    let floor = T::of(H_SQ_FLOOR);
    let norm = h_sq.norm();
    let denom = norm.max(floor);
    let rel_im = h_sq.im.abs() / denom;
    if rel_im <= rel_tol {
        PtClass {
            spectrum: if h_sq.re >= T::zero() {
                PtSpectrum::Real
            } else {
                PtSpectrum::Imaginary
            },
            margin: h_sq.re.abs() / denom,
            at_ep: norm <= floor,
        }
    } else {
        PtClass {
            spectrum: PtSpectrum::NoAntilinearSymmetry,
            margin: rel_im,
            at_ep: false,
        }
    }
}

/// Classify the spectrum of a Floquet decomposition: real if and only if
/// `h^2` is real and positive, purely imaginary for real negative `h^2`,
/// otherwise no antilinear symmetry.
pub fn classify_pt<T: Real>(f: &FloquetDecomp<T>, rel_tol: T) -> PtClass<T> {
    classify_h_sq(f.h_sq, rel_tol)
}

/// Energy-alignment predicate: `hx` real while `hy`, `hz` purely imaginary
/// (each relative to the largest component magnitude, floored at 1e-30).
/// Together with a PT-symmetric spectrum this makes the Floquet energy
/// operator proportional to `sigma_x`, the initial energy operator.
pub fn je_condition<T: Real>(f: &FloquetDecomp<T>, rel_tol: T) -> bool {
    let scale = f.coeffs.max_component().max(T::of(1e-30));
    let tol = rel_tol * scale;
    f.coeffs.hx.im.abs() <= tol && f.coeffs.hy.re.abs() <= tol && f.coeffs.hz.re.abs() <= tol
}

/// Scale-free residual of the exchange-symmetry constraint
/// `|G++ G+-| = |G-- G-+|` in the `sigma_x` eigenbasis (the cross-multiplied
/// form of `|G++/G-+| = |G--/G+-|`, safe when amplitudes vanish).
/// Zero exactly when post-selected transition probabilities are symmetric
/// under the `+x <-> -x` exchange.
pub fn exchange_symmetry_residual<T: Real>(g: &Mat2<T>) -> T {
    let gx = g.to_x_basis();
    let p1 = (gx.m[0][0] * gx.m[0][1]).norm();
    let p2 = (gx.m[1][1] * gx.m[1][0]).norm();
    (p1 - p2).abs() / p1.max(p2).max(T::of(1e-30))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriveSample, Path};

    type M2 = Mat2<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    fn ideal_rates() -> Rates<f64> {
        Rates::new(1.57, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn static_path_matches_closed_form() {
        let rates = ideal_rates();
        for tau in [0.2, 0.7] {
            let spec = PathSpec::new(Path::static_j(3.74), tau).unwrap();
            let p = propagate(&spec, &rates, 1e-12).unwrap();
            assert!(p.converged);
            let h = build_heff(
                DriveSample {
                    j: 3.74,
                    delta: 0.0,
                },
                &rates,
            );
            let want = expm2(&h.scaled(c(0.0, -tau)));
            assert!(p.g.max_diff(&want) <= 1e-12 * want.max_norm());
        }
    }

    #[test]
    fn vanishing_duration_gives_identity() {
        let spec = PathSpec::new(
            Path::DeltaFullSine {
                j_max: 3.74,
                delta_max: 31.4,
            },
            1e-12,
        )
        .unwrap();
        let p = propagate(&spec, &Rates::reference(), 1e-10).unwrap();
        assert!(p.g.max_diff(&M2::identity()) < 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let spec = PathSpec::new(Path::static_j(1.0), 1.0).unwrap();
        assert!(matches!(
            propagate(&spec, &Rates::zero(), 0.0),
            Err(PropagateError::InvalidTolerance)
        ));
    }

    #[test]
    fn doubling_residuals_decrease_on_all_paths() {
        let rates = Rates::reference();
        let dmax = 10.0 * std::f64::consts::PI;
        let paths = [
            Path::JSweep {
                j_max: 3.74,
                j_min: 0.0,
            },
            Path::DeltaHalfSine {
                j_max: 3.74,
                delta_max: dmax,
            },
            Path::DeltaFullSine {
                j_max: 3.74,
                delta_max: dmax,
            },
        ];
        for path in paths {
            let spec = PathSpec::new(path, 0.8).unwrap();
            let rr = rates;
            let errs =
                doubling_residuals(move |t| build_heff(drive_at(&spec, t), &rr), spec.tau, 8);
            for pair in errs.windows(2) {
                let (_, e1) = pair[0];
                let (_, e2) = pair[1];
                if e1 < 1e-13 {
                    continue; // roundoff floor
                }
                // second-order scheme: each doubling should cut the residual
                // by ~4; allow slack down to 2
                assert!(e2 <= e1 / 2.0, "{e1} -> {e2} on {path:?}");
            }
        }
    }

    #[test]
    fn unitary_limit_for_all_paths() {
        let rates = Rates::zero();
        let dmax = 10.0 * std::f64::consts::PI;
        let paths = [
            Path::JSweep {
                j_max: 3.74,
                j_min: 0.0,
            },
            Path::DeltaHalfSine {
                j_max: 3.74,
                delta_max: dmax,
            },
            Path::DeltaFullSine {
                j_max: 3.74,
                delta_max: dmax,
            },
        ];
        for path in paths {
            for tau in [0.1, 0.5, 1.0] {
                let spec = PathSpec::new(path, tau).unwrap();
                let p = propagate(&spec, &rates, 1e-10).unwrap();
                let gtg = p.g.adjoint() * p.g;
                assert!(gtg.max_diff(&M2::identity()) < 1e-10, "{path:?} tau={tau}");
            }
        }
    }

    #[test]
    fn scalar_shift_leaves_slicing_and_probabilities_alone() {
        // H -> H + c(t) I changes G only by a global factor; the doubling
        // decision compares the unimodular parts, so the slice counts and the
        // normalized columns agree exactly.
        let rates = Rates::reference();
        let spec = PathSpec::new(
            Path::DeltaHalfSine {
                j_max: 3.74,
                delta_max: 10.0 * std::f64::consts::PI,
            },
            0.5,
        )
        .unwrap();
        let base = propagate(&spec, &rates, 1e-10).unwrap();
        let shifted = propagate_hamiltonian(
            |t| {
                let h = build_heff(drive_at(&spec, t), &rates);
                let sc = c(0.8 * (3.0 * t).sin(), -0.4 * t);
                h + Mat2::diag(sc, sc)
            },
            spec.tau,
            1e-10,
        )
        .unwrap();
        assert_eq!(base.slices, shifted.slices);
        // same columns after normalization
        for col in 0..2 {
            let n_b = (base.g.m[0][col].norm_sqr() + base.g.m[1][col].norm_sqr()).sqrt();
            let n_s = (shifted.g.m[0][col].norm_sqr() + shifted.g.m[1][col].norm_sqr()).sqrt();
            for row in 0..2 {
                let a = base.g.m[row][col].norm() / n_b;
                let b = shifted.g.m[row][col].norm() / n_s;
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn floquet_of_identity_is_zero() {
        let p = Propagator {
            g: M2::identity(),
            tau: 0.3,
            slices: 128,
            converged: true,
            est_error: 0.0,
        };
        let f = floquet(&p).unwrap();
        assert!(f.coeffs.to_matrix().max_norm() < 1e-14);
        assert!(f.h_sq.norm() < 1e-28);
        assert_eq!(f.classification.spectrum, PtSpectrum::Real);
        assert!(f.classification.at_ep);
    }

    #[test]
    fn floquet_of_constant_hamiltonian_is_that_hamiltonian() {
        let rates = ideal_rates();
        let tau = 0.2; // tau |h| = 0.744, far from the branch fold
        let spec = PathSpec::new(Path::static_j(3.74), tau).unwrap();
        let p = propagate(&spec, &rates, 1e-12).unwrap();
        let f = floquet(&p).unwrap();
        assert!((f.coeffs.hx - c(3.74, 0.0)).norm() < 1e-10);
        assert!(f.coeffs.hy.norm() < 1e-10);
        assert!((f.coeffs.hz - c(0.0, 0.3925)).norm() < 1e-10);
        assert!(f.coeffs.h0.norm() < 1e-10);
        let want_hsq = 3.74 * 3.74 - 0.3925 * 0.3925;
        assert!((f.h_sq - c(want_hsq, 0.0)).norm() < 1e-8);
        assert!((want_hsq - 13.8335).abs() < 5e-5);
        assert!(!f.branch_warning);
        assert_eq!(f.classification.spectrum, PtSpectrum::Real);

        // round trip: expm2(-i tau H^F) == G
        let back = expm2(&f.coeffs.to_matrix().scaled(c(0.0, -tau)));
        assert!(back.max_diff(&p.g) <= 1e-10 * p.g.max_norm());
    }

    #[test]
    fn branch_warning_near_the_fold() {
        // static Hermitian drive with tau |h| just under pi
        let spec_warn =
            PathSpec::new(Path::static_j(3.0), 0.99 * std::f64::consts::PI / 3.0).unwrap();
        let p = propagate(&spec_warn, &Rates::zero(), 1e-11).unwrap();
        assert!(floquet(&p).unwrap().branch_warning);

        let spec_ok =
            PathSpec::new(Path::static_j(3.0), 0.80 * std::f64::consts::PI / 3.0).unwrap();
        let p = propagate(&spec_ok, &Rates::zero(), 1e-11).unwrap();
        assert!(!floquet(&p).unwrap().branch_warning);
    }

    #[test]
    fn classification_cases() {
        let mk = |h_sq: C<f64>| FloquetDecomp {
            coeffs: PauliCoeffs {
                h0: c(0.0, 0.0),
                hx: c(1.0, 0.0),
                hy: c(0.0, 0.0),
                hz: c(0.0, 0.0),
            },
            h_sq,
            classification: classify_h_sq(h_sq, 1e-9),
            branch_warning: false,
        };
        // h = (1, 0, 0)
        let f = mk(c(1.0, 0.0));
        assert_eq!(classify_pt(&f, 1e-9).spectrum, PtSpectrum::Real);
        // static PT-broken point J = 0.2 < gamma/4: h^2 = 0.04 - 0.154... < 0
        let hsq = 0.2f64 * 0.2 - 0.3925f64 * 0.3925;
        assert!((hsq + 0.11405625).abs() < 1e-12);
        let f = mk(c(hsq, 0.0));
        assert_eq!(classify_pt(&f, 1e-9).spectrum, PtSpectrum::Imaginary);
        // complex h^2
        let f = mk(c(0.3, 0.2));
        let cl = classify_pt(&f, 1e-9);
        assert_eq!(cl.spectrum, PtSpectrum::NoAntilinearSymmetry);
        assert!(cl.margin > 0.1);
        // exact zero: EP annotation
        let f = mk(c(0.0, 0.0));
        let cl = classify_pt(&f, 1e-9);
        assert_eq!(cl.spectrum, PtSpectrum::Real);
        assert_eq!(cl.margin, 0.0);
        assert!(cl.at_ep);
    }

    #[test]
    fn one_sided_detuning_breaks_the_antilinear_symmetry() {
        let spec = PathSpec::new(
            Path::DeltaHalfSine {
                j_max: 3.74,
                delta_max: 10.0 * std::f64::consts::PI,
            },
            0.5,
        )
        .unwrap();
        let p = propagate(&spec, &Rates::reference(), 1e-10).unwrap();
        let f = floquet(&p).unwrap();
        let cl = classify_pt(&f, 1e-9);
        assert_eq!(cl.spectrum, PtSpectrum::NoAntilinearSymmetry);
        assert!(cl.margin > 1e-3, "margin {}", cl.margin);
        assert!(!je_condition(&f, 1e-9));
    }

    #[test]
    fn alignment_condition_cases() {
        let mk = |hx: C<f64>, hy: C<f64>, hz: C<f64>| {
            let coeffs = PauliCoeffs {
                h0: c(0.0, 0.0),
                hx,
                hy,
                hz,
            };
            FloquetDecomp {
                coeffs,
                h_sq: coeffs.h_sq(),
                classification: classify_h_sq(coeffs.h_sq(), 1e-9),
                branch_warning: false,
            }
        };
        // static PT-symmetric shape: aligned
        let f = mk(c(3.74, 0.0), c(0.0, 0.0), c(0.0, 0.3925));
        assert!(je_condition(&f, 1e-9));
        // real hy component breaks alignment
        let f = mk(c(3.74, 0.0), c(0.1, 0.0), c(0.0, 0.3925));
        assert!(!je_condition(&f, 1e-9));
        // imaginary part on hx breaks alignment
        let f = mk(c(3.74, 0.01), c(0.0, 0.0), c(0.0, 0.3925));
        assert!(!je_condition(&f, 1e-9));
    }

    #[test]
    fn generic_scalar_f32_propagation() {
        let spec = PathSpec::<f32>::new(Path::static_j(2.0), 0.3).unwrap();
        let rates = Rates::new(1.5f32, 0.0, 0.0, 0.0).unwrap();
        let p = propagate(&spec, &rates, 1e-5f32).unwrap();
        let h = build_heff(
            DriveSample {
                j: 2.0f32,
                delta: 0.0,
            },
            &rates,
        );
        let want = expm2(&h.scaled(Complex::new(0.0f32, -0.3)));
        assert!(p.g.max_diff(&want) < 1e-4);
    }

    #[test]
    fn exchange_residual_cases() {
        assert_eq!(exchange_symmetry_residual(&M2::identity()), 0.0);

        // static PT-symmetric propagator: symmetric exchange at any tau
        let rates = ideal_rates();
        for tau in [0.15, 0.4, 0.9] {
            let spec = PathSpec::new(Path::static_j(3.74), tau).unwrap();
            let p = propagate(&spec, &rates, 1e-12).unwrap();
            assert!(exchange_symmetry_residual(&p.g) <= 1e-10);
        }

        // one-sided detuning sweep: visibly asymmetric
        let spec = PathSpec::new(
            Path::DeltaHalfSine {
                j_max: 3.74,
                delta_max: 10.0 * std::f64::consts::PI,
            },
            0.5,
        )
        .unwrap();
        let p = propagate(&spec, &Rates::reference(), 1e-10).unwrap();
        assert!(exchange_symmetry_residual(&p.g) > 0.01);
    }
}
