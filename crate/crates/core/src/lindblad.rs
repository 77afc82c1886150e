//! Independent three-level master-equation oracle. Integrates the full
//! `(g, e, f)` density matrix with the four jump operators and validates the
//! post-selected non-Hermitian propagator against it.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{drive_at, qutrit_control, DetuningConvention, PathSpec, Rates};
use crate::qmath::{min_eigenvalue_hermitian, rk4_step, Mat2, Mat3, C};
use crate::scalar::Real;
use crate::workstats::TransitionMatrix;

/// Default RK4 step, us.
pub const DEFAULT_DT: f64 = 1e-4;
/// Minimum step count per protocol, whatever `dt` was requested.
const MIN_STEPS: u64 = 1000;
/// Allowed trace drift over one integration.
const TRACE_DRIFT_TOL: f64 = 1e-6;
/// Post-selection denominator floor, as in the work-statistics layer.
const SURVIVAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LindbladError {
    #[error("step size must be positive and finite")]
    InvalidStep,
    #[error("trace drifted by {drift:e} during integration; reduce dt")]
    StepTooLarge { drift: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(&'static str),
    #[error("post-selection denominator {denom:e} below threshold")]
    NormalizationUnderflow { denom: f64 },
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// Qutrit density matrix in the `(g, e, f)` basis: Hermitian, unit trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3<T> {
    pub rho: Mat3<T>,
}

impl<T: Real> DensityMatrix3<T> {
    /// Validate Hermiticity (1e-12 relative) and unit trace (1e-9).
    pub fn new(rho: Mat3<T>) -> Result<Self, LindbladError> {
        if !rho.is_finite() {
            return Err(LindbladError::InvalidState("non-finite entries"));
        }
        let scale = T::one().max(rho.max_norm());
        if rho.hermiticity_defect() > T::of(1e-12) * scale {
            return Err(LindbladError::InvalidState("not Hermitian"));
        }
        if (rho.trace().re - T::one()).abs() > T::of(1e-9) || rho.trace().im.abs() > T::of(1e-9) {
            return Err(LindbladError::InvalidState("trace must be 1"));
        }
        Ok(DensityMatrix3 { rho })
    }

    /// Pure state `|psi><psi|` from (not necessarily normalized) amplitudes.
    pub fn pure(psi: [C<T>; 3]) -> Result<Self, LindbladError> {
        let n: T = psi
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        if n <= T::zero() || !n.is_finite() {
            return Err(LindbladError::InvalidState("zero or non-finite amplitude"));
        }
        let mut rho = Mat3::zero();
        for r in 0..3 {
            for c in 0..3 {
                rho.m[r][c] = psi[r] * psi[c].conj() / n;
            }
        }
        Ok(DensityMatrix3 { rho })
    }

    /// `|+x>` or `|-x>` of the excited-state doublet, embedded in the qutrit:
    /// `(0, +-1, 1)/sqrt(2)` in `(g, e, f)` amplitudes.
    pub fn x_eigenstate(plus: bool) -> Self {
        let z = C::new(T::zero(), T::zero());
        let o = C::new(T::one(), T::zero());
        let e_amp = if plus { o } else { -o };
        Self::pure([z, e_amp, o]).expect("unit vector")
    }

    /// Smallest eigenvalue (closed form; the matrix is Hermitian).
    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue_hermitian(&self.rho)
    }
}

/// Projective readout in the basis `{|g>, |+x>, |-x>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutProbs<T> {
    pub p_g: T,
    pub p_plus: T,
    pub p_minus: T,
}

/// Populations of `|g>`, `|+x>`, `|-x>`; sums to the trace of `rho`.
pub fn readout<T: Real>(rho: &DensityMatrix3<T>) -> ReadoutProbs<T> {
    let m = &rho.rho.m;
    let half = T::of(0.5);
    let cross = m[1][2].re; // Re <e|rho|f>
    ReadoutProbs {
        p_g: m[0][0].re,
        p_plus: (m[1][1].re + m[2][2].re) * half + cross,
        p_minus: (m[1][1].re + m[2][2].re) * half - cross,
    }
}

// ---------------------------------------------------------------------------
// Master-equation integration
// ---------------------------------------------------------------------------

/// Sparse view of the four jump operators: `(rate, src, dst)` for the decay
/// channels plus the two dephasing rates. Lets the right-hand side skip full
/// 3x3 products for operators with a single nonzero entry.
struct DissipatorTerms<T> {
    /// `sum_i L_i^t L_i`, diagonal.
    lsum_diag: [T; 3],
    gamma_e: T,
    gamma_f: T,
    gamma_2e: T,
    gamma_2f: T,
}

impl<T: Real> DissipatorTerms<T> {
    fn new(rates: &Rates<T>) -> Self {
        let half = T::of(0.5);
        // L1^t L1 = gamma_e |e><e|, L2^t L2 = gamma_f |f><f|,
        // L3^t L3 = gamma_2e/2 |e><e|, L4^t L4 = gamma_2f/2 |f><f|
        DissipatorTerms {
            lsum_diag: [
                T::zero(),
                rates.gamma_e + rates.gamma_2e * half,
                rates.gamma_f + rates.gamma_2f * half,
            ],
            gamma_e: rates.gamma_e,
            gamma_f: rates.gamma_f,
            gamma_2e: rates.gamma_2e * half,
            gamma_2f: rates.gamma_2f * half,
        }
    }

    /// `sum_i L_i rho L_i^t - (1/2){L_i^t L_i, rho}` with the four fixed
    /// jump operators.
    fn apply(&self, rho: &Mat3<T>) -> Mat3<T> {
        let mut out = Mat3::zero();
        // sandwich terms: sqrt(g_e)|g><e| moves rho_ee to gg, sqrt(g_f)|e><f|
        // moves rho_ff to ee; dephasing projectors keep their diagonal entry
        out.m[0][0] = rho.m[1][1] * self.gamma_e;
        out.m[1][1] = out.m[1][1] + rho.m[2][2] * self.gamma_f + rho.m[1][1] * self.gamma_2e;
        out.m[2][2] = out.m[2][2] + rho.m[2][2] * self.gamma_2f;
        // dephasing cross term: L3 rho L4^t ... vanishes (projectors are
        // orthogonal), but |e><e| rho |e><e| and |f><f| rho |f><f| survive
        // only on the diagonal, already added above.
        // anticommutator with the diagonal lsum
        let half = T::of(0.5);
        for r in 0..3 {
            for c in 0..3 {
                let damp = (self.lsum_diag[r] + self.lsum_diag[c]) * half;
                out.m[r][c] = out.m[r][c] - rho.m[r][c] * damp;
            }
        }
        out
    }
}

/// Integrate the Lindblad equation
/// `drho/dt = -i [H_c(t), rho] + sum_i (L_i rho L_i^t - (1/2){L_i^t L_i, rho})`
/// from 0 to `spec.tau` with fixed-step RK4.
///
/// The drive is sampled analytically at the RK4 substage times. The requested
/// `dt` is an upper bound: the step count is rounded so the final step lands
/// exactly on `tau`, with at least 1000 steps per protocol. Fails with
/// [`LindbladError::StepTooLarge`] if the trace drifts beyond 1e-6.
pub fn evolve_rho3<T: Real>(
    spec: &PathSpec<T>,
    rates: &Rates<T>,
    rho0: &DensityMatrix3<T>,
    dt: T,
    convention: DetuningConvention,
) -> Result<DensityMatrix3<T>, LindbladError> {
    if dt <= T::zero() || !dt.is_finite() {
        return Err(LindbladError::InvalidStep);
    }
    let steps = (spec.tau / dt).ceil().as_f64() as u64;
    let steps = steps.max(MIN_STEPS);
    let h = spec.tau / T::of(steps as f64);

    let diss = DissipatorTerms::new(rates);
    let minus_i = Complex::new(T::zero(), -T::one());
    let rhs = |t: T, rho: &Mat3<T>| {
        let hc = qutrit_control(drive_at(spec, t), convention);
        let comm = hc * *rho - *rho * hc;
        comm.scaled(minus_i) + diss.apply(rho)
    };

    let tr0 = rho0.rho.trace().re;
    let mut rho = rho0.rho;
    for k in 0..steps {
        let t = h * T::of(k as f64);
        rho = rk4_step(rhs, &rho, t, h);
    }
    let drift = (rho.trace().re - tr0).abs();
    // a blown-up integration leaves NaN entries; treat that as drift too
    if drift > T::of(TRACE_DRIFT_TOL) || !drift.is_finite() {
        return Err(LindbladError::StepTooLarge {
            drift: drift.as_f64(),
        });
    }
    Ok(DensityMatrix3 { rho })
}

/// Oracle transition matrix: evolve each embedded `|+-x>` eigenstate through
/// the qutrit master equation, read out in `{|g>, |+x>, |-x>}`, and
/// post-select on staying out of the ground state:
/// `P_ij = p_i / (p_plus + p_minus)`.
pub fn oracle_transition_probs<T: Real>(
    spec: &PathSpec<T>,
    rates: &Rates<T>,
    dt: T,
    convention: DetuningConvention,
) -> Result<TransitionMatrix<T>, LindbladError> {
    let mut plus_rows = [T::zero(); 2];
    for (col, plus) in [(0usize, true), (1usize, false)] {
        let rho0 = DensityMatrix3::x_eigenstate(plus);
        let rho = evolve_rho3(spec, rates, &rho0, dt, convention)?;
        let r = readout(&rho);
        let denom = r.p_plus + r.p_minus;
        if denom < T::of(SURVIVAL_FLOOR) || denom.is_nan() {
            return Err(LindbladError::NormalizationUnderflow {
                denom: denom.as_f64(),
            });
        }
        plus_rows[col] = r.p_plus / denom;
    }
    Ok(TransitionMatrix::from_plus_rows(plus_rows[0], plus_rows[1]))
}

/// Readout probabilities `(p_g, p_plus, p_minus)` for one embedded initial
/// eigenstate, for shot-level sampling.
pub fn oracle_readout<T: Real>(
    spec: &PathSpec<T>,
    rates: &Rates<T>,
    plus: bool,
    dt: T,
    convention: DetuningConvention,
) -> Result<ReadoutProbs<T>, LindbladError> {
    let rho0 = DensityMatrix3::x_eigenstate(plus);
    let rho = evolve_rho3(spec, rates, &rho0, dt, convention)?;
    Ok(readout(&rho))
}

/// Post-selected qubit state `rho_2(tau) = G rho G^t / Tr[rho G^t G]`.
/// The output is normalized to unit trace; pure states stay pure.
pub fn rho2_postselected<T: Real>(g: &Mat2<T>, rho0: &Mat2<T>) -> Result<Mat2<T>, LindbladError> {
    let num = *g * *rho0 * g.adjoint();
    let denom = num.trace().re; // = Tr[rho0 G^t G], real for Hermitian rho0
    if denom < T::of(SURVIVAL_FLOOR) || denom.is_nan() {
        return Err(LindbladError::NormalizationUnderflow {
            denom: denom.as_f64(),
        });
    }
    Ok(num.scaled(Complex::new(T::one() / denom, T::zero())))
}

// ---------------------------------------------------------------------------
