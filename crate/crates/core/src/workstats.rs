//! Two-point-measurement work statistics: thermal preparation over the
//! `|+x>`, `|-x>` eigenstates, post-selected transition probabilities, the
//! discrete work distribution, and the exponentiated-work average.

use thiserror::Error;

use crate::qmath::Mat2;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkStatsError {
    /// Post-selection keeps essentially no population for one initial state.
    #[error("post-selection denominator {denom:e} below threshold for initial state {column}")]
    NormalizationUnderflow { column: usize, denom: f64 },
    #[error("invalid thermal preparation: {0}")]
    InvalidPrep(&'static str),
}

/// Survival threshold of the post-selection denominator `<j|G^t G|j>`.
const SURVIVAL_FLOOR: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Thermal preparation
// ---------------------------------------------------------------------------

/// Thermal mixture of the initial energy eigenstates `|+x>` (energy `+j_max`)
/// and `|-x>` (energy `-j_max`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsPrep<T> {
    /// Inverse temperature, us/rad.
    pub beta: T,
    /// Energy scale of the initial Hamiltonian `H(0) = j_max sigma_x`, rad/us.
    pub j_max: T,
    /// Boltzmann weight of `|+x>`: `exp(-beta j_max)/Z`.
    pub w_plus: T,
    /// Boltzmann weight of `|-x>`: `exp(+beta j_max)/Z`; `w_plus + w_minus = 1`.
    pub w_minus: T,
}

/// Boltzmann weights over the two initial eigenstates, evaluated in logistic
/// form `1/(1 + e^{+-2 beta j_max})` so large `beta j_max` cannot overflow.
/// The heavy weight sits on the lower-energy state `|-x>`.
pub fn gibbs_weights<T: Real>(beta: T, j_max: T) -> Result<GibbsPrep<T>, WorkStatsError> {
    if beta < T::zero() || beta.is_nan() {
        return Err(WorkStatsError::InvalidPrep("beta must be >= 0"));
    }
    if j_max < T::zero() || !j_max.is_finite() {
        return Err(WorkStatsError::InvalidPrep("j_max must be finite and >= 0"));
    }
    let two = T::of(2.0);
    let w_plus = T::one() / (T::one() + (two * beta * j_max).exp());
    Ok(GibbsPrep {
        beta,
        j_max,
        w_plus,
        w_minus: T::one() - w_plus,
    })
}

// ---------------------------------------------------------------------------
// Transition probabilities
// ---------------------------------------------------------------------------

/// Post-selected transition probabilities `p[i][j] = P(final i | initial j)`
/// between the `sigma_x` eigenstates; index 0 is `+x`, index 1 is `-x`.
/// Columns sum to one exactly (norm-preserving post-selection).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix<T> {
    pub p: [[T; 2]; 2],
}

impl<T: Real> TransitionMatrix<T> {
    /// Build from the `+x` row, `P(+x | +x)` and `P(+x | -x)`; the second row
    /// is completed so each column sums to one exactly.
    pub fn from_plus_rows(p_plus_given_plus: T, p_plus_given_minus: T) -> Self {
        TransitionMatrix {
            p: [
                [p_plus_given_plus, p_plus_given_minus],
                [T::one() - p_plus_given_plus, T::one() - p_plus_given_minus],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::from_plus_rows(T::one(), T::zero())
    }

    pub fn pp(&self) -> T {
        self.p[0][0]
    }
    pub fn pm(&self) -> T {
        self.p[0][1]
    }
    pub fn mp(&self) -> T {
        self.p[1][0]
    }
    pub fn mm(&self) -> T {
        self.p[1][1]
    }
}

/// Transition probabilities of a one-cycle propagator:
/// `P_ij = |<i|G|j>|^2 / <j|G^t G|j>` with `|+-x> = (|f> +- |e>)/sqrt(2)`.
/// Columns are renormalized to sum to one exactly after rounding.
pub fn transition_probs<T: Real>(g: &Mat2<T>) -> Result<TransitionMatrix<T>, WorkStatsError> {
    let gx = g.to_x_basis();
    let mut plus_row = [T::zero(); 2];
    for (col, slot) in plus_row.iter_mut().enumerate() {
        let a = gx.m[0][col].norm_sqr();
        let b = gx.m[1][col].norm_sqr();
        let denom = a + b;
        if denom < T::of(SURVIVAL_FLOOR) || !denom.is_finite() {
            return Err(WorkStatsError::NormalizationUnderflow {
                column: col,
                denom: denom.as_f64(),
            });
        }
        *slot = a / denom;
    }
    Ok(TransitionMatrix::from_plus_rows(plus_row[0], plus_row[1]))
}

// ---------------------------------------------------------------------------
// Work distribution and the exponentiated-work average
// ---------------------------------------------------------------------------

/// Discrete work distribution of a cyclic protocol: a trajectory `j -> i`
/// carries `W = j_max (i - j)` with `i, j = +-1`, so the support is
/// `{-2 j_max, 0, +2 j_max}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkDistribution<T> {
    /// Work values in rad/us: `[-2 j_max, 0, +2 j_max]`.
    pub support: [T; 3],
    /// `[P(-2J), P(0), P(+2J)]`.
    pub probs: [T; 3],
}

pub fn work_distribution<T: Real>(
    tm: &TransitionMatrix<T>,
    prep: &GibbsPrep<T>,
) -> WorkDistribution<T> {
    let two_j = T::of(2.0) * prep.j_max;
    WorkDistribution {
        support: [-two_j, T::zero(), two_j],
        probs: [
            tm.mp() * prep.w_plus,
            tm.pp() * prep.w_plus + tm.mm() * prep.w_minus,
            tm.pm() * prep.w_minus,
        ],
    }
}

/// Result of one exponentiated-work evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JeResult<T> {
    /// `<e^{-beta W}>`.
    pub value: T,
    /// `value - 1`; zero exactly when the equality holds.
    pub deviation: T,
    /// `<W>` in rad/us.
    pub mean_work: T,
    /// Exchange asymmetry `P++ - P--`.
    pub asym: T,
}

/// Exponentiated-work average
/// `<e^{-beta W}> = e^{-2 beta J} P+- w- + e^{+2 beta J} P-+ w+ + P++ w+ + P-- w-`.
///
/// The `e^{+-2 beta J}` factors are paired with the Boltzmann weights before
/// exponentiating (`e^{+-2 beta J} e^{-+beta J}/Z = 1/(1 + e^{-+2 beta J})`),
/// so the evaluation cannot overflow at large `beta j_max`.
pub fn exp_work_avg<T: Real>(tm: &TransitionMatrix<T>, prep: &GibbsPrep<T>) -> JeResult<T> {
    let two = T::of(2.0);
    let bj2 = two * prep.beta * prep.j_max;
    // e^{-2 beta J} w_minus and e^{+2 beta J} w_plus, combined exponents
    let down = T::one() / (T::one() + bj2.exp());
    let up = T::one() / (T::one() + (-bj2).exp());
    let value = tm.pm() * down + tm.mp() * up + tm.pp() * prep.w_plus + tm.mm() * prep.w_minus;
    let two_j = two * prep.j_max;
    let mean_work = two_j * (tm.pm() * prep.w_minus - tm.mp() * prep.w_plus);
    JeResult {
        value,
        deviation: value - T::one(),
        mean_work,
        asym: tm.pp() - tm.mm(),
    }
}

/// Both exchange asymmetries, `(P++ - P--, P+- - P-+)`. Column normalization
/// makes them equal exactly.
pub fn asymmetry<T: Real>(tm: &TransitionMatrix<T>) -> (T, T) {
    (tm.pp() - tm.mm(), tm.pm() - tm.mp())
}

// ---------------------------------------------------------------------------
