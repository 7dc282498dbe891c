//! Deterministic per-trial random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha stream, keyed by the
//! user seed and the trial index, so results do not depend on how trials are
//! scheduled across threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `rows x cols` matrix of i.i.d. N(0, 1) entries.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `(Z + Z') / sqrt(2)` for Gaussian `Z`: unit off-diagonal variance, diagonal variance 2.
pub fn goe_matrix<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let z = gaussian_matrix(rng, n, n);
    (&z + z.transpose()) * std::f64::consts::FRAC_1_SQRT_2
}
