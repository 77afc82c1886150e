//! Simulation of a lossy, driven superconducting qutrit reduced to its
//! excited-state qubit manifold by post-selection.
//!
//! The crate covers the full pipeline:
//!
//! * [`qmath`] — closed-form 2x2/3x3 complex linear algebra and RK4;
//! * [`model`] — cyclic drive paths, the effective non-Hermitian qubit
//!   Hamiltonian, its static spectrum, and the three-level Lindblad system;
//! * [`propagator`] — time-ordered propagation, Floquet-Hamiltonian
//!   extraction, parity-time classification, and the energy-alignment check;
//! * [`workstats`] — thermal preparation, post-selected transition
//!   probabilities, the discrete work distribution, and the exponentiated-work
//!   average;
//! * [`lindblad`] — an independent three-level master-equation oracle;
//! * [`harness`] — config parsing, parameter sweeps, contour extraction,
//!   seeded shot sampling, figure presets, and CSV output.
//!
//! The numerical core is generic over the scalar type through
//! [`scalar::Real`]; the aliases below pin the double-precision variants used
//! by the harness and CLI.

pub mod harness;
pub mod lindblad;
pub mod model;
pub mod propagator;
pub mod qmath;
pub mod scalar;
#[cfg(test)]
pub(crate) mod testutil;
pub mod workstats;

pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = qmath::C<f64>;
/// Double-precision 2x2 complex matrix in the `(e, f)` basis.
pub type Mat2c64 = qmath::Mat2<f64>;
/// Double-precision 3x3 complex matrix in the `(g, e, f)` basis.
pub type Mat3c64 = qmath::Mat3<f64>;
/// Double-precision Pauli decomposition.
pub type PauliCoeffs64 = qmath::PauliCoeffs<f64>;
