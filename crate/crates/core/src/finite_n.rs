//! Finite-size worst-case MSE of SVST.
//!
//! The worst case over rank-`r` signals is
//!
//! ```text
//! MSE_n(Λ; r, m, α) = r/m + r/n − r²/(mn) + r(n − r)/(mn)·Λ²
//!                   + α(n − r)/(mn) · Σ_{i ≤ m−r} w_i(Λ; m − r, n − r)
//! ```
//!
//! where `Σ w_i(Λ; m, n) = E Σ_i (s_i − Λ)₊²` over the singular values `s_i` of
//! `Z/√n`, `Z` an `m × n` standard Gaussian matrix. The sum is estimated by
//! Monte Carlo over full spectra.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::amse::MatrixClass;
use crate::error::{invalid, Result};
use crate::rng::{gaussian_matrix, trial_rng};
use crate::sim::SimStats;

/// Default number of Monte Carlo spectra for problems with `m ≤ 200`.
pub const DEFAULT_TRIALS: usize = 1000;
/// Golden-section search stops once the `Λ` bracket is this narrow.
pub const GOLDEN_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassKind {
    Mat,
    Sym,
}

/// A finite-size minimax problem: rank at most `r` in `m × n` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteProblem {
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub kind: ClassKind,
}

impl FiniteProblem {
    pub fn new(r: usize, m: usize, n: usize, kind: ClassKind) -> Result<Self> {
        if !(1 <= r && r <= m && m <= n) {
            return Err(invalid(format!("need 1 <= r <= m <= n, got r={r}, m={m}, n={n}")));
        }
        if kind == ClassKind::Sym && m != n {
            return Err(invalid(format!("symmetric problems are square, got m={m}, n={n}")));
        }
        Ok(Self { r, m, n, kind })
    }

    pub fn mat(r: usize, m: usize, n: usize) -> Result<Self> {
        Self::new(r, m, n, ClassKind::Mat)
    }

    pub fn sym(r: usize, n: usize) -> Result<Self> {
        Self::new(r, n, n, ClassKind::Sym)
    }

    /// The asymptotic class with the same aspect ratio.
    pub fn class(&self) -> MatrixClass {
        match self.kind {
            ClassKind::Mat => MatrixClass::Mat {
                beta: self.m as f64 / self.n as f64,
            },
            ClassKind::Sym => MatrixClass::Sym,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.class().alpha()
    }

    /// Rank fraction `r/m`.
    pub fn rho(&self) -> f64 {
        self.r as f64 / self.m as f64
    }

    /// Converts a normalized threshold `Λ` to the data scale, `Λ·√(1 − r/n)`.
    pub fn data_threshold(&self, lambda: f64) -> f64 {
        lambda * (1.0 - self.r as f64 / self.n as f64).sqrt()
    }

    /// Inverse of [`FiniteProblem::data_threshold`].
    pub fn normalized_threshold(&self, data_lambda: f64) -> f64 {
        data_lambda / (1.0 - self.r as f64 / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartMomentEstimate {
    pub lambda: f64,
    pub value: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Sampled singular-value spectra of `Z/√n`, reusable across thresholds
/// (common random numbers).
#[derive(Debug, Clone)]
pub struct WishartSpectra {
    m: usize,
    n: usize,
    seed: u64,
    spectra: Vec<Vec<f64>>,
}

impl WishartSpectra {
    pub fn sample(m: usize, n: usize, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if m > n {
            return Err(invalid(format!("need m <= n, got m={m}, n={n}")));
        }
        let spectra = (0..trials)
            .into_par_iter()
            .map(|t| {
                if m == 0 {
                    return Vec::new();
                }
                let mut rng = trial_rng(seed, t as u64);
                let z = gaussian_matrix(&mut rng, m, n);
                scaled_singular_values(&z, n)
            })
            .collect();
        Ok(Self { m, n, seed, spectra })
    }

    pub fn trials(&self) -> usize {
        self.spectra.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Per-trial values of `Σ_i (s_i − Λ)₊²`.
    pub fn shrinkage_sums(&self, lambda: f64) -> Vec<f64> {
        self.spectra
            .iter()
            .map(|s| s.iter().map(|&v| (v - lambda).max(0.0).powi(2)).sum())
            .collect()
    }

    pub fn moment_sum(&self, lambda: f64) -> WishartMomentEstimate {
        let stats = SimStats::from_samples(&self.shrinkage_sums(lambda));
        WishartMomentEstimate {
            lambda,
            value: stats.mean,
            std_error: stats.std_error,
            trials: stats.trials,
            seed: self.seed,
        }
    }
}

/// Singular values of `z/√n`, via the eigenvalues of `zz'/n`.
fn scaled_singular_values(z: &DMatrix<f64>, n: usize) -> Vec<f64> {
    let gram = (z * z.transpose()) / n as f64;
    gram.symmetric_eigenvalues()
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect()
}

/// Monte Carlo estimate of `Σ_{i=1}^{m} w_i(Λ; m, n)`.
pub fn wishart_moment_sum(lambda: f64, m: usize, n: usize, trials: usize, seed: u64) -> Result<WishartMomentEstimate> {
    check_lambda(lambda)?;
    Ok(WishartSpectra::sample(m, n, trials, seed)?.moment_sum(lambda))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(invalid(format!(
            "threshold must be finite and nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteMse {
    pub lambda: f64,
    pub mse: f64,
    pub std_error: f64,
}

/// `Λ ↦ MSE_n(Λ; r, m, α)` for one problem, with the Wishart sum drawn once.
#[derive(Debug, Clone)]
pub struct FiniteMseCurve {
    prob: FiniteProblem,
    spectra: WishartSpectra,
}

impl FiniteMseCurve {
    pub fn sample(prob: FiniteProblem, trials: usize, seed: u64) -> Result<Self> {
        let spectra = WishartSpectra::sample(prob.m - prob.r, prob.n - prob.r, trials, seed)?;
        Ok(Self { prob, spectra })
    }

    pub fn problem(&self) -> &FiniteProblem {
        &self.prob
    }

    pub fn evaluate(&self, lambda: f64) -> FiniteMse {
        let FiniteProblem { r, m, n, .. } = self.prob;
        let (r, m, n) = (r as f64, m as f64, n as f64);
        let moments = self.spectra.moment_sum(lambda);
        let weight = self.prob.alpha() * (n - r) / (m * n);
        FiniteMse {
            lambda,
            mse: r / m + r / n - r * r / (m * n) + r * (n - r) / (m * n) * lambda * lambda + weight * moments.value,
            std_error: weight * moments.std_error,
        }
    }
}

/// Evaluates the finite-size worst-case MSE at `Λ`.
pub fn finite_n_mse(lambda: f64, prob: &FiniteProblem, trials: usize, seed: u64) -> Result<FiniteMse> {
    check_lambda(lambda)?;
    Ok(FiniteMseCurve::sample(*prob, trials, seed)?.evaluate(lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteMinimax {
    pub lambda_star: f64,
    pub mse: f64,
    pub std_error: f64,
    /// `Λ*·√(1 − r/n)`, the threshold to apply to data with noise level `1/√n`.
    pub data_threshold: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Minimizes `MSE_n(·; r, m, α)` by golden-section search with common random numbers.
pub fn finite_n_minimax(prob: &FiniteProblem, trials: usize, seed: u64) -> Result<FiniteMinimax> {
    let curve = FiniteMseCurve::sample(*prob, trials, seed)?;
    let upper = 1.0 + (prob.m as f64 / prob.n as f64).sqrt() + 10.0 / (prob.n as f64).sqrt();
    let f = |lambda: f64| curve.evaluate(lambda).mse;
    let mut best = golden_section(f, 0.0, upper, GOLDEN_TOLERANCE);
    if f(0.0) <= f(best) {
        best = 0.0;
    }
    let at = curve.evaluate(best);
    Ok(FiniteMinimax {
        lambda_star: best,
        mse: at.mse,
        std_error: at.std_error,
        data_threshold: prob.data_threshold(best),
        trials,
        seed,
    })
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_validation() {
        assert!(FiniteProblem::mat(0, 10, 20).is_err());
        assert!(FiniteProblem::mat(11, 10, 20).is_err());
        assert!(FiniteProblem::mat(2, 30, 20).is_err());
        assert!(FiniteProblem::new(2, 10, 20, ClassKind::Sym).is_err());
        let p = FiniteProblem::sym(3, 30).unwrap();
        assert_eq!(p.alpha(), 0.5);
        assert_eq!(p.class(), MatrixClass::Sym);
        assert_eq!(
            FiniteProblem::mat(5, 50, 100).unwrap().class(),
            MatrixClass::Mat { beta: 0.5 }
        );
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(wishart_moment_sum(0.5, 5, 10, 0, 1).is_err());
        assert!(wishart_moment_sum(-0.5, 5, 10, 10, 1).is_err());
    }

    #[test]
    fn trace_identity_at_zero_threshold() {
        let est = wishart_moment_sum(0.0, 50, 50, 200, 7).unwrap();
        assert!((est.value - 50.0).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn beyond_the_edge_is_negligible() {
        let lambda = 2.0 + 5.0 / 50f64.sqrt();
        let est = wishart_moment_sum(lambda, 50, 50, 200, 7).unwrap();
        assert!(est.value <= 1e-3, "{est:?}");
    }

    #[test]
    fn full_rank_degenerate_case() {
        let p = FiniteProblem::mat(20, 20, 20).unwrap();
        let v = finite_n_mse(0.0, &p, 5, 1).unwrap();
        assert_eq!(v.mse, 1.0);
        assert_eq!(v.std_error, 0.0);
        let best = finite_n_minimax(&p, 5, 1).unwrap();
        assert_eq!(best.lambda_star, 0.0);
        assert_eq!(best.mse, 1.0);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section(|x| (x - 0.7).powi(2), 0.0, 3.0, 1e-8);
        assert!((x - 0.7).abs() < 1e-7);
    }

    #[test]
    fn deterministic_given_seed() {
        let p = FiniteProblem::mat(2, 20, 40).unwrap();
        let a = finite_n_mse(0.9, &p, 30, 11).unwrap();
        let b = finite_n_mse(0.9, &p, 30, 11).unwrap();
        assert_eq!(a, b);
        let c = finite_n_mse(0.9, &p, 30, 12).unwrap();
        assert_ne!(a.mse, c.mse);
    }
}
