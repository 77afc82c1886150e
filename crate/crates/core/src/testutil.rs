//! Seeded helpers shared by unit tests.

use num_complex::Complex;

use crate::qmath::Mat2;

/// SplitMix64 step; deterministic across platforms.
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn uniform(state: &mut u64, lo: f64, hi: f64) -> f64 {
    let u = (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

pub(crate) fn random_mat2(state: &mut u64, scale: f64) -> Mat2<f64> {
    let e = |s: &mut u64| Complex::new(uniform(s, -scale, scale), uniform(s, -scale, scale));
    Mat2::from_rows([[e(state), e(state)], [e(state), e(state)]])
}
