//! Physical model: decay rates, the three cyclic drive paths, the effective
//! non-Hermitian qubit Hamiltonian, its static spectrum, and the three-level
//! system fed to the Lindblad oracle.
//!
//! Times are in us, couplings/detunings in rad/us, rates in 1/us.

use num_complex::Complex;
use thiserror::Error;

use crate::qmath::{Mat2, Mat3, C};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("time {t} us outside the protocol window [0, {tau}]")]
    OutOfRange { t: f64, tau: f64 },
    #[error("invalid rates: {0}")]
    InvalidRates(&'static str),
    #[error("invalid path: {0}")]
    InvalidPath(&'static str),
}

// ---------------------------------------------------------------------------
// Rates
// ---------------------------------------------------------------------------

/// Radiative decay and dephasing rates of the qutrit, all in 1/us.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates<T> {
    /// `|e> -> |g>` decay rate.
    pub gamma_e: T,
    /// `|f> -> |e>` decay rate.
    pub gamma_f: T,
    /// `|e>` dephasing rate.
    pub gamma_2e: T,
    /// `|f>` dephasing rate.
    pub gamma_2f: T,
}

impl<T: Real> Rates<T> {
    pub fn new(gamma_e: T, gamma_f: T, gamma_2e: T, gamma_2f: T) -> Result<Self, ModelError> {
        let all = [gamma_e, gamma_f, gamma_2e, gamma_2f];
        if all.iter().any(|g| !g.is_finite() || *g < T::zero()) {
            return Err(ModelError::InvalidRates("rates must be finite and >= 0"));
        }
        if gamma_e < gamma_f {
            return Err(ModelError::InvalidRates(
                "decay contrast gamma_e - gamma_f must be >= 0",
            ));
        }
        Ok(Rates {
            gamma_e,
            gamma_f,
            gamma_2e,
            gamma_2f,
        })
    }

    pub fn zero() -> Self {
        Rates {
            gamma_e: T::zero(),
            gamma_f: T::zero(),
            gamma_2e: T::zero(),
            gamma_2f: T::zero(),
        }
    }

    /// Rates of the reference device; the bundled figure presets use these.
    pub fn reference() -> Self {
        Rates {
            gamma_e: T::of(1.57),
            gamma_f: T::of(0.21),
            gamma_2e: T::of(1.631),
            gamma_2f: T::of(0.584),
        }
    }

    /// Decay contrast `gamma = gamma_e - gamma_f`, the anti-Hermitian scale
    /// of the qubit Hamiltonian.
    pub fn contrast(&self) -> T {
        self.gamma_e - self.gamma_f
    }

    /// Same radiative decay with dephasing switched off.
    pub fn without_dephasing(&self) -> Self {
        Rates {
            gamma_2e: T::zero(),
            gamma_2f: T::zero(),
            ..*self
        }
    }

    /// Keep only the dominant `|e> -> |g>` decay channel.
    pub fn ideal(&self) -> Self {
        Rates {
            gamma_e: self.gamma_e,
            gamma_f: T::zero(),
            gamma_2e: T::zero(),
            gamma_2f: T::zero(),
        }
    }
}

// ---------------------------------------------------------------------------
// Drive paths
// ---------------------------------------------------------------------------

/// One of the three cyclic drive protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path<T> {
    /// Cosine sweep of the coupling at zero detuning:
    /// `J(t) = Jbar + (j_max - j_min)/2 cos(2 pi t / tau)`, `Delta = 0`.
    /// Either orientation (`j_min > j_max`) is allowed.
    JSweep { j_max: T, j_min: T },
    /// One-sided detuning sweep: `Delta(t) = delta_max sin(pi t / tau)`,
    /// `J = j_max`.
    DeltaHalfSine { j_max: T, delta_max: T },
    /// Zero-average detuning sweep: `Delta(t) = delta_max sin(2 pi t / tau)`,
    /// `J = j_max`; obeys `Delta(t) = -Delta(tau - t)`.
    DeltaFullSine { j_max: T, delta_max: T },
}

impl<T: Real> Path<T> {
    /// Static drive at fixed coupling (a degenerate `JSweep`).
    pub fn static_j(j: T) -> Self {
        Path::JSweep { j_max: j, j_min: j }
    }

    /// Coupling at `t = 0` (and `t = tau`), the scale of the initial energy
    /// operator `H(0) = j_max sigma_x`.
    pub fn j_max(&self) -> T {
        match *self {
            Path::JSweep { j_max, .. }
            | Path::DeltaHalfSine { j_max, .. }
            | Path::DeltaFullSine { j_max, .. } => j_max,
        }
    }
}

/// A drive path together with its loop duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec<T> {
    pub path: Path<T>,
    /// Loop duration in us.
    pub tau: T,
}

impl<T: Real> PathSpec<T> {
    pub fn new(path: Path<T>, tau: T) -> Result<Self, ModelError> {
        if tau <= T::zero() || !tau.is_finite() {
            return Err(ModelError::InvalidPath("tau must be positive and finite"));
        }
        let ok = match path {
            Path::JSweep { j_max, j_min } => {
                j_max >= T::zero() && j_min >= T::zero() && j_max.is_finite() && j_min.is_finite()
            }
            Path::DeltaHalfSine { j_max, delta_max } | Path::DeltaFullSine { j_max, delta_max } => {
                j_max >= T::zero() && j_max.is_finite() && delta_max.is_finite()
            }
        };
        if !ok {
            return Err(ModelError::InvalidPath(
                "couplings must be finite and >= 0, detuning finite",
            ));
        }
        Ok(PathSpec { path, tau })
    }
}

/// Instantaneous drive values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample<T> {
    /// Coupling J(t), rad/us.
    pub j: T,
    /// Detuning Delta(t), rad/us.
    pub delta: T,
}

/// Evaluate the drive path at time `t` in `[0, tau]`.
///
/// All three variants are cyclic with `J(0) = J(tau) = j_max` and
/// `Delta(0) = Delta(tau) = 0`.
pub fn eval_path<T: Real>(spec: &PathSpec<T>, t: T) -> Result<DriveSample<T>, ModelError> {
    if t < T::zero() || t > spec.tau {
        return Err(ModelError::OutOfRange {
            t: t.as_f64(),
            tau: spec.tau.as_f64(),
        });
    }
    Ok(drive_at(spec, t))
}

/// Path evaluation without the range check; `t` must lie in `[0, tau]`.
pub(crate) fn drive_at<T: Real>(spec: &PathSpec<T>, t: T) -> DriveSample<T> {
    let two_pi = T::of(2.0) * T::PI();
    match spec.path {
        Path::JSweep { j_max, j_min } => {
            let half = T::of(0.5);
            let j_bar = (j_max + j_min) * half;
            let amp = (j_max - j_min) * half;
            DriveSample {
                j: j_bar + amp * (two_pi * t / spec.tau).cos(),
                delta: T::zero(),
            }
        }
        Path::DeltaHalfSine { j_max, delta_max } => DriveSample {
            j: j_max,
            delta: delta_max * (T::PI() * t / spec.tau).sin(),
        },
        Path::DeltaFullSine { j_max, delta_max } => DriveSample {
            j: j_max,
            delta: delta_max * (two_pi * t / spec.tau).sin(),
        },
    }
}

// ---------------------------------------------------------------------------
// Effective qubit Hamiltonian and its static spectrum
// ---------------------------------------------------------------------------

/// Effective non-Hermitian qubit Hamiltonian
/// `H_eff = J sigma_x + Delta |f><f| + i (gamma/4) sigma_z`
/// with `gamma = gamma_e - gamma_f`; in the `(e, f)` basis:
/// `[[-i gamma/4, J], [J, Delta + i gamma/4]]`.
pub fn build_heff<T: Real>(d: DriveSample<T>, rates: &Rates<T>) -> Mat2<T> {
    let g4 = rates.contrast() * T::of(0.25);
    let z = T::zero();
    Mat2::from_rows([
        [Complex::new(z, -g4), Complex::new(d.j, z)],
        [Complex::new(d.j, z), Complex::new(d.delta, g4)],
    ])
}

/// Static spectrum at zero detuning: `lambda_{-,+} = -/+ sqrt(J^2 - (gamma/4)^2)`
/// with the principal square root — real beyond `J = gamma/4`, purely
/// imaginary below it, and doubly degenerate zero at the exceptional point.
///
/// Ordered like [`crate::qmath::eig2`]: by real part, ties by imaginary part.
pub fn static_eigvals<T: Real>(j: T, rates: &Rates<T>) -> (C<T>, C<T>) {
    let g4 = rates.contrast() * T::of(0.25);
    let s = Complex::new(j * j - g4 * g4, T::zero()).sqrt();
    (-s, s)
}

// ---------------------------------------------------------------------------
// Three-level system
// ---------------------------------------------------------------------------

/// Detuning bookkeeping for the qutrit control Hamiltonian. The two choices
/// differ by the time-dependent scalar `(Delta/2) I` on the qubit block,
/// which cancels in every post-selected probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningConvention {
    /// `-Delta/2 (|e><e| - |f><f|)`: traceless on the qubit block.
    #[default]
    SymmetricSplit,
    /// `Delta |f><f|`: matches the qubit Hamiltonian literally.
    FProjector,
}

/// Snapshot of the driven three-level system: control Hamiltonian at one
/// drive sample plus the four (constant) jump operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladSystem<T> {
    pub h_c: Mat3<T>,
    pub jumps: [Mat3<T>; 4],
    pub rates: Rates<T>,
}

/// Qutrit control Hamiltonian in the `(g, e, f)` basis; the ground state is
/// untouched by the drive.
pub fn qutrit_control<T: Real>(d: DriveSample<T>, convention: DetuningConvention) -> Mat3<T> {
    let z = T::zero();
    let mut h = Mat3::zero();
    h.m[1][2] = Complex::new(d.j, z);
    h.m[2][1] = Complex::new(d.j, z);
    match convention {
        DetuningConvention::SymmetricSplit => {
            let half = T::of(0.5);
            h.m[1][1] = Complex::new(-d.delta * half, z);
            h.m[2][2] = Complex::new(d.delta * half, z);
        }
        DetuningConvention::FProjector => {
            h.m[2][2] = Complex::new(d.delta, z);
        }
    }
    h
}

/// The four jump operators: radiative decay `sqrt(gamma_e) |g><e|`,
/// `sqrt(gamma_f) |e><f|`, and dephasing `sqrt(gamma_2e/2) |e><e|`,
/// `sqrt(gamma_2f/2) |f><f|`.
pub fn jump_operators<T: Real>(rates: &Rates<T>) -> [Mat3<T>; 4] {
    let half = T::of(0.5);
    let re = |x: T| Complex::new(x, T::zero());
    [
        Mat3::unit(0, 1, re(rates.gamma_e.sqrt())),
        Mat3::unit(1, 2, re(rates.gamma_f.sqrt())),
        Mat3::unit(1, 1, re((rates.gamma_2e * half).sqrt())),
        Mat3::unit(2, 2, re((rates.gamma_2f * half).sqrt())),
    ]
}

/// Assemble the three-level system at one drive sample (symmetric-split
/// detuning convention).
pub fn build_lindblad<T: Real>(d: DriveSample<T>, rates: &Rates<T>) -> LindbladSystem<T> {
    LindbladSystem {
        h_c: qutrit_control(d, DetuningConvention::SymmetricSplit),
        jumps: jump_operators(rates),
        rates: *rates,
    }
}

// ---------------------------------------------------------------------------
