//! Seeded shot-level sampling of the three-outcome readout, with
//! post-selection and trinomial standard errors.
//!
//! The generator is counter-based: outcome `k` of prepared state `p` is a
//! pure function of `(seed, p, k)` (two SplitMix64 mixing rounds), so results
//! are independent of evaluation order and reproducible across platforms.

use thiserror::Error;

use crate::lindblad::ReadoutProbs;
use crate::model::Rates;
use crate::propagator::Propagator;
use crate::workstats::{GibbsPrep, TransitionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ShotsError {
    /// Every shot of one prepared state was post-selected away.
    #[error("all {n} shots of prepared state {prep} were discarded")]
    AllDiscarded { prep: usize, n: u64 },
    #[error("shot count must be >= 1")]
    InvalidCount,
}

/// Raw single-shot tallies for one prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotCounts {
    pub n_g: u64,
    pub n_plus: u64,
    pub n_minus: u64,
}

/// Post-selected estimate of the transition matrix from `n` shots per
/// prepared state.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotEnsemble {
    pub seed: u64,
    pub n_per_prep: u64,
    /// Tallies for prepared `|+x>` (index 0) and `|-x>` (index 1).
    pub counts: [ShotCounts; 2],
    /// Ground-state fraction weighted by the preparation probabilities.
    pub discard_fraction: f64,
    /// `p_hat[i][j]`: post-selected estimate of `P(i | j)`.
    pub p_hat: TransitionMatrix<f64>,
    /// Trinomial standard error per entry, `sqrt(p(1-p)/n_kept)`.
    pub se: [[f64; 2]; 2],
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform deviate in `[0, 1)` for shot `k` of prepared state `prep`.
fn shot_u01(seed: u64, prep: u64, k: u64) -> f64 {
    let stream = splitmix64(seed ^ (prep.wrapping_add(1)).wrapping_mul(0xD1B5_4A32_D192_ED03));
    let z = splitmix64(stream ^ k);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Draw `n` single-shot outcomes per prepared state from the trinomial
/// `(p_g, p_plus, p_minus)`, post-select away the ground-state outcomes, and
/// estimate the transition matrix with its standard errors.
pub fn sample_shots(
    readouts: &[ReadoutProbs<f64>; 2],
    prep: &GibbsPrep<f64>,
    n: u64,
    seed: u64,
) -> Result<ShotEnsemble, ShotsError> {
    if n == 0 {
        return Err(ShotsError::InvalidCount);
    }
    let mut counts = [ShotCounts {
        n_g: 0,
        n_plus: 0,
        n_minus: 0,
    }; 2];
    for (p_idx, probs) in readouts.iter().enumerate() {
        // clamp tiny negative roundoff from the oracle
        let pg = probs.p_g.max(0.0);
        let pp = probs.p_plus.max(0.0);
        let pm = probs.p_minus.max(0.0);
        let total = pg + pp + pm;
        let t_g = pg / total;
        let t_plus = (pg + pp) / total;
        let c = &mut counts[p_idx];
        for k in 0..n {
            let u = shot_u01(seed, p_idx as u64, k);
            if u < t_g {
                c.n_g += 1;
            } else if u < t_plus {
                c.n_plus += 1;
            } else {
                c.n_minus += 1;
            }
        }
    }

    let mut plus_rows = [0.0; 2];
    let mut se = [[0.0; 2]; 2];
    for (j, c) in counts.iter().enumerate() {
        let kept = c.n_plus + c.n_minus;
        if kept == 0 {
            return Err(ShotsError::AllDiscarded { prep: j, n });
        }
        let p = c.n_plus as f64 / kept as f64;
        plus_rows[j] = p;
        let err = (p * (1.0 - p) / kept as f64).sqrt();
        se[0][j] = err;
        se[1][j] = err; // complement has the same binomial error
    }

    let discard_fraction = prep.w_plus * (counts[0].n_g as f64 / n as f64)
        + prep.w_minus * (counts[1].n_g as f64 / n as f64);

    Ok(ShotEnsemble {
        seed,
        n_per_prep: n,
        counts,
        discard_fraction,
        p_hat: TransitionMatrix::from_plus_rows(plus_rows[0], plus_rows[1]),
        se,
    })
}

/// Three-outcome readout probabilities implied by a non-Hermitian propagator.
///
/// The qubit Hamiltonian carries only the decay *contrast*; restoring the
/// dropped uniform decay `(gamma_e + gamma_f)/2` converts propagator norms
/// into physical survival probabilities:
/// `p_{+-} = e^{-(gamma_e+gamma_f) tau / 2} |<+-x|G|j>|^2`, `p_g` the rest.
pub fn readout_from_propagator(p: &Propagator<f64>, rates: &Rates<f64>) -> [ReadoutProbs<f64>; 2] {
    let decay = (-(rates.gamma_e + rates.gamma_f) * p.tau / 2.0).exp();
    let gx = p.g.to_x_basis();
    let mut out = [ReadoutProbs {
        p_g: 0.0,
        p_plus: 0.0,
        p_minus: 0.0,
    }; 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let p_plus = decay * gx.m[0][j].norm_sqr();
        let p_minus = decay * gx.m[1][j].norm_sqr();
        *slot = ReadoutProbs {
            p_g: (1.0 - p_plus - p_minus).max(0.0),
            p_plus,
            p_minus,
        };
    }
    out
}
