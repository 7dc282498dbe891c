//! Minimax risk and threshold tuning for matrix denoising by singular value
//! soft thresholding (SVST).
//!
//! * [`mp`]: Marčenko–Pastur and quarter-circle incomplete moments.
//! * [`amse`]: asymptotic worst-case MSE, minimax thresholds and curves.
//! * [`finite_n`]: finite-size worst-case MSE with Monte Carlo Wishart moments.
//! * [`sim`]: the denoiser, its SURE, and end-to-end risk simulations.
//! * [`cli`]: machine-readable records behind the `svst-minimax` binary.

// Negated comparisons reject NaN along with out-of-range values; golden
// constants keep their full published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod amse;
pub mod cli;
pub mod error;
pub mod finite_n;
pub mod mp;
pub mod quadrature;
pub mod rng;
pub mod sim;

pub use amse::{
    global_lower_bound, global_lower_bound_finite, minimax_amse, minimax_threshold, minimax_threshold_square,
    parametric_curve, phase_transition_delta, ratio_bound, small_rho_slope, tabulate, worst_case_amse,
    worst_case_amse_square, AmsePoint, CurveRow, CurveTable, MatrixClass,
};
pub use error::{Error, Result};
pub use finite_n::{
    finite_n_minimax, finite_n_mse, wishart_moment_sum, ClassKind, FiniteMinimax, FiniteMse, FiniteProblem,
    WishartMomentEstimate,
};
pub use mp::{mp_density, mp_incomplete_moment, qc_moment, MomentOrder, MpParams};
pub use sim::{
    least_favorable_matrix, monte_carlo_risk, risk_monotonicity_check, sure_svst, sure_svst_sym, sure_vs_empirical,
    svst_denoise, SimConfig, SimStats, SureCheck,
};
