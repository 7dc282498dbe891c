//! The SVST denoiser, its Stein unbiased risk estimate, and Monte Carlo risk
//! experiments.
//!
//! Observations follow `Y = X₀ + W/√n`. For general matrices `W` has i.i.d.
//! N(0, 1) entries. For the symmetric positive semidefinite class `W` is
//! `(Z + Z')/√2` (unit off-diagonal variance) and the denoiser is nuclear-norm
//! shrinkage over the PSD cone, i.e. soft thresholding of the positive
//! eigenvalues of the symmetrized data. Risk is `(1/m)·E‖X̂ − X₀‖²_F`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::amse::MatrixClass;
use crate::error::{invalid, Error, Result};
use crate::finite_n::{ClassKind, FiniteProblem};
use crate::rng::{gaussian_matrix, goe_matrix, trial_rng};

/// Relative spectral gap below which SURE's divergence term is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStats {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl SimStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len();
        if count == 0 {
            return Self {
                mean: 0.0,
                std_error: 0.0,
                trials: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / count as f64;
        let std_error = if count > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            trials: count,
        }
    }
}

/// A Monte Carlo risk experiment at signal strength `mu` and data-scale threshold `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub prob: FiniteProblem,
    pub mu: f64,
    pub lambda: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) || self.mu.is_infinite() {
            return Err(invalid(format!(
                "signal strength must be finite and nonnegative, got {}",
                self.mu
            )));
        }
        check_lambda(self.lambda)?;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        Ok(())
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("threshold must be nonnegative, got {lambda}")));
    }
    Ok(())
}

fn check_finite(y: &DMatrix<f64>) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix has nonfinite entries"));
    }
    Ok(())
}

fn soft(x: f64, lambda: f64) -> f64 {
    (x - lambda).max(0.0)
}

/// Applies SVST with threshold `lambda`.
///
/// `Mat`: `U·diag((y_i − λ)₊)·V'`. `Sym`: the input is symmetrized as
/// `(Y + Y')/2` and its eigenvalues `d_i` are mapped to `(d_i − λ)₊`.
pub fn svst_denoise(y: &DMatrix<f64>, lambda: f64, class: MatrixClass) -> Result<DMatrix<f64>> {
    check_lambda(lambda)?;
    check_finite(y)?;
    match class {
        MatrixClass::Mat { .. } => Ok(shrink_svd(y.clone().svd(true, true), lambda)),
        MatrixClass::Sym => {
            if !y.is_square() {
                return Err(invalid(format!(
                    "symmetric denoising needs a square matrix, got {:?}",
                    y.shape()
                )));
            }
            Ok(shrink_eigen(SymmetricEigen::new(symmetrize(y)), lambda))
        }
    }
}

fn symmetrize(y: &DMatrix<f64>) -> DMatrix<f64> {
    (y + y.transpose()) * 0.5
}

fn shrink_svd(mut svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>, lambda: f64) -> DMatrix<f64> {
    svd.singular_values.apply(|s| *s = soft(*s, lambda));
    svd.recompose().expect("SVD computed with both factors")
}

fn shrink_eigen(mut eig: SymmetricEigen<f64, nalgebra::Dyn>, lambda: f64) -> DMatrix<f64> {
    eig.eigenvalues.apply(|d| *d = soft(*d, lambda));
    eig.recompose()
}

/// SURE for SVST on an `m × n` matrix (`m ≤ n`) observed with noise level `σ² = 1/n`:
///
/// ```text
/// −m + Σ min(y_i, λ)² + (2/n)[ #{y_i > λ} + (n − m)Σ (y_i − λ)₊/y_i
///                             + 2 Σ_{i<j} (y_i(y_i − λ)₊ − y_j(y_j − λ)₊)/(y_i² − y_j²) ]
/// ```
///
/// Its expectation is `m` times the risk.
pub fn sure_svst(y: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_finite(y)?;
    let (m, n) = y.shape();
    if m > n {
        return Err(invalid(format!("SURE needs m <= n, got {m} x {n}")));
    }
    sure_from_singular_values(y.singular_values().as_slice(), n, lambda)
}

fn sure_from_singular_values(sv: &[f64], n: usize, lambda: f64) -> Result<f64> {
    let m = sv.len();
    let mut sorted = sv.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top = sorted.first().copied().unwrap_or(0.0);
    if sorted.last().is_some_and(|&s| s <= 0.0) {
        return Err(Error::DegenerateSpectrum("zero singular value".into()));
    }
    if sorted
        .windows(2)
        .any(|w| w[0] * w[0] - w[1] * w[1] < DEGENERACY_GAP * top * top)
    {
        return Err(Error::DegenerateSpectrum("repeated singular values".into()));
    }
    let nf = n as f64;
    let mut fit = 0.0;
    let mut div = 0.0;
    for &s in &sorted {
        fit += s.min(lambda).powi(2);
        if s > lambda {
            div += 1.0 + (nf - m as f64) * soft(s, lambda) / s;
        }
    }
    let mut cross = 0.0;
    for i in 0..m {
        let (yi, fi) = (sorted[i], soft(sorted[i], lambda));
        for &yj in &sorted[i + 1..] {
            cross += (yi * fi - yj * soft(yj, lambda)) / (yi * yi - yj * yj);
        }
    }
    div += 2.0 * cross;
    Ok(-(m as f64) + fit + 2.0 / nf * div)
}

/// SURE for the symmetric denoiser under `W = (Z + Z')/√2` noise at level `1/√n`.
///
/// Every free coordinate of a symmetric matrix has weight × variance equal to
/// `2/n`, which gives
///
/// ```text
/// Σ (d_k − (d_k − λ)₊)² + (2/n)·(2·div − n(n + 1)/2),
/// div = #{d_k > λ} + Σ_{k<l} ((d_k − λ)₊ − (d_l − λ)₊)/(d_k − d_l).
/// ```
pub fn sure_svst_sym(y: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_finite(y)?;
    if !y.is_square() {
        return Err(invalid(format!(
            "symmetric SURE needs a square matrix, got {:?}",
            y.shape()
        )));
    }
    let eig = symmetrize(y).symmetric_eigenvalues();
    sure_from_eigenvalues(eig.as_slice(), lambda)
}

fn sure_from_eigenvalues(d: &[f64], lambda: f64) -> Result<f64> {
    let n = d.len();
    let mut sorted = d.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let scale = sorted.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut fit = 0.0;
    let mut div = 0.0;
    for &v in &sorted {
        let f = soft(v, lambda);
        fit += (v - f).powi(2);
        if v > lambda {
            div += 1.0;
        }
    }
    for k in 0..n {
        let fk = soft(sorted[k], lambda);
        if fk == 0.0 {
            // Pairs with both eigenvalues at or below the threshold contribute nothing.
            break;
        }
        for &dl in &sorted[k + 1..] {
            let gap = sorted[k] - dl;
            if gap < DEGENERACY_GAP * scale {
                return Err(Error::DegenerateSpectrum("repeated eigenvalues".into()));
            }
            div += (fk - soft(dl, lambda)) / gap;
        }
    }
    let nf = n as f64;
    Ok(fit + 2.0 / nf * (2.0 * div - nf * (nf + 1.0) / 2.0))
}

/// Rank-`r` signal `μ·C` with `C` the first `r` canonical directions: equal
/// singular values `μ`, PSD for the symmetric class.
pub fn least_favorable_matrix(prob: &FiniteProblem, mu: f64) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(prob.m, prob.n);
    for i in 0..prob.r {
        x[(i, i)] = mu;
    }
    x
}

fn noise<R: Rng>(prob: &FiniteProblem, rng: &mut R) -> DMatrix<f64> {
    let w = match prob.kind {
        ClassKind::Mat => gaussian_matrix(rng, prob.m, prob.n),
        ClassKind::Sym => goe_matrix(rng, prob.n),
    };
    w / (prob.n as f64).sqrt()
}

fn loss(estimate: &DMatrix<f64>, signal: &DMatrix<f64>, m: usize) -> f64 {
    (estimate - signal).norm_squared() / m as f64
}

fn per_trial<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Monte Carlo risk `(1/m)·E‖X̂_λ(X₀ + W/√n) − X₀‖²_F` at the least-favorable
/// signal of strength `mu`.
pub fn monte_carlo_risk(config: &SimConfig) -> Result<SimStats> {
    config.validate()?;
    let prob = config.prob;
    let class = prob.class();
    let signal = least_favorable_matrix(&prob, config.mu);
    let losses = per_trial(config.trials, |t| {
        let mut rng = trial_rng(config.seed, t as u64);
        let y = &signal + noise(&prob, &mut rng);
        svst_denoise(&y, config.lambda, class).map(|x| loss(&x, &signal, prob.m))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SimStats::from_samples(&losses))
}

/// Risk at each `μ` of an increasing list, reusing the same noise draws for every `μ`.
pub fn risk_monotonicity_check(
    prob: &FiniteProblem,
    lambda: f64,
    mu_list: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SimStats>> {
    if mu_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("mu list must be strictly increasing"));
    }
    mu_list
        .iter()
        .map(|&mu| {
            monte_carlo_risk(&SimConfig {
                prob: *prob,
                mu,
                lambda,
                trials,
                seed,
            })
        })
        .collect()
}

/// Whether consecutive means never drop by more than `k` combined standard errors.
pub fn is_monotone_within(stats: &[SimStats], k: f64) -> bool {
    stats.windows(2).all(|w| {
        let combined = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        w[1].mean >= w[0].mean - k * combined
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SureCheck {
    /// Per-trial `SURE/m`.
    pub sure: SimStats,
    /// Per-trial realized loss `(1/m)‖X̂ − X₀‖²_F`.
    pub risk: SimStats,
    /// Mean paired difference divided by its standard error.
    pub discrepancy_z: f64,
    /// Draws discarded because of a degenerate spectrum.
    pub resampled: usize,
}

/// Pairs SURE with the realized loss on the same draws.
///
/// Draws with a degenerate spectrum are redrawn from the same trial stream;
/// more than `trials` redraws in total is reported as an error.
pub fn sure_vs_empirical(config: &SimConfig) -> Result<SureCheck> {
    config.validate()?;
    let prob = config.prob;
    let signal = least_favorable_matrix(&prob, config.mu);
    let budget = config.trials;
    let outcomes = per_trial(config.trials, |t| {
        let mut rng = trial_rng(config.seed, t as u64);
        let mut redraws = 0usize;
        loop {
            let y = &signal + noise(&prob, &mut rng);
            match sure_and_loss(&y, &signal, config.lambda, prob.kind) {
                Ok((sure, l)) => return Ok((sure / prob.m as f64, l, redraws)),
                Err(Error::DegenerateSpectrum(_)) if redraws < budget => redraws += 1,
                Err(e) => return Err(e),
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let resampled: usize = outcomes.iter().map(|o| o.2).sum();
    if resampled > budget {
        return Err(Error::DegeneracyBudget {
            resampled,
            trials: config.trials,
        });
    }
    let sures: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let losses: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
    let diffs: Vec<f64> = outcomes.iter().map(|o| o.0 - o.1).collect();
    let d = SimStats::from_samples(&diffs);
    let discrepancy_z = if d.std_error > 0.0 {
        d.mean / d.std_error
    } else if d.mean == 0.0 {
        0.0
    } else {
        d.mean.signum() * f64::INFINITY
    };
    Ok(SureCheck {
        sure: SimStats::from_samples(&sures),
        risk: SimStats::from_samples(&losses),
        discrepancy_z,
        resampled,
    })
}

fn sure_and_loss(y: &DMatrix<f64>, signal: &DMatrix<f64>, lambda: f64, kind: ClassKind) -> Result<(f64, f64)> {
    let m = y.nrows();
    match kind {
        ClassKind::Mat => {
            let svd = y.clone().svd(true, true);
            let sure = sure_from_singular_values(svd.singular_values.as_slice(), y.ncols(), lambda)?;
            Ok((sure, loss(&shrink_svd(svd, lambda), signal, m)))
        }
        ClassKind::Sym => {
            let eig = SymmetricEigen::new(symmetrize(y));
            let sure = sure_from_eigenvalues(eig.eigenvalues.as_slice(), lambda)?;
            Ok((sure, loss(&shrink_eigen(eig, lambda), signal, m)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    const MAT: MatrixClass = MatrixClass::Mat { beta: 1.0 };

    fn max_abs(a: &DMatrix<f64>) -> f64 {
        a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn full_threshold_gives_zero() {
        let mut rng = trial_rng(3, 0);
        let y = gaussian_matrix(&mut rng, 4, 6);
        let top = y.singular_values().max();
        assert_eq!(max_abs(&svst_denoise(&y, top + 1e-9, MAT).unwrap()), 0.0);
    }

    #[test]
    fn rank_one_closed_form() {
        let u = nalgebra::DVector::from_vec(vec![0.6, 0.8, 0.0]);
        let v = nalgebra::DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let y = &u * v.transpose() * 5.0;
        let x = svst_denoise(&y, 1.5, MAT).unwrap();
        assert!(max_abs(&(x - &u * v.transpose() * 3.5)) < 1e-12);
    }

    #[test]
    fn zero_threshold_is_identity() {
        let mut rng = trial_rng(4, 0);
        let y = gaussian_matrix(&mut rng, 5, 7);
        assert!(max_abs(&(svst_denoise(&y, 0.0, MAT).unwrap() - &y)) < 1e-12);
        // A PSD input comes back as its symmetrization.
        let b = gaussian_matrix(&mut rng, 5, 5);
        let psd = &b * b.transpose();
        let mut skewed = psd.clone();
        skewed[(0, 1)] += 0.3;
        skewed[(1, 0)] -= 0.3;
        let x = svst_denoise(&skewed, 0.0, MatrixClass::Sym).unwrap();
        assert!(max_abs(&(x - psd)) < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        let mut y = DMatrix::from_element(2, 3, 1.0);
        assert!(svst_denoise(&y, -1.0, MAT).is_err());
        assert!(svst_denoise(&y, 1.0, MatrixClass::Sym).is_err());
        y[(0, 0)] = f64::NAN;
        assert!(svst_denoise(&y, 1.0, MAT).is_err());
        assert!(sure_svst(&DMatrix::from_element(3, 2, 1.0), 0.5).is_err());
    }

    #[test]
    fn sure_rejects_ties() {
        let y = DMatrix::<f64>::identity(3, 4);
        assert!(matches!(sure_svst(&y, 0.5), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn sure_endpoints() {
        let mut rng = trial_rng(5, 0);
        for (m, n) in [(6, 6), (4, 9)] {
            let y = gaussian_matrix(&mut rng, m, n) / (n as f64).sqrt();
            let at_zero = sure_svst(&y, 0.0).unwrap();
            assert!((at_zero / m as f64 - 1.0).abs() < 1e-9, "{at_zero}");
            let at_inf = sure_svst(&y, f64::INFINITY).unwrap();
            assert!((at_inf - (y.norm_squared() - m as f64)).abs() < 1e-9);
        }
        let w = goe_matrix(&mut rng, 8) / 8f64.sqrt();
        let at_inf = sure_svst_sym(&w, f64::INFINITY).unwrap();
        assert!((at_inf - (w.norm_squared() - 9.0)).abs() < 1e-9);
    }

    #[test]
    fn least_favorable_construction() {
        let p = FiniteProblem::mat(1, 2, 3).unwrap();
        let sv = least_favorable_matrix(&p, 7.0).singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!((sv[0] - 7.0).abs() < 1e-12 && sv[1].abs() < 1e-12);
        let full = FiniteProblem::mat(3, 3, 5).unwrap();
        assert!(least_favorable_matrix(&full, 1.0)
            .singular_values()
            .iter()
            .all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn config_validation() {
        let prob = FiniteProblem::mat(1, 4, 4).unwrap();
        let ok = SimConfig {
            prob,
            mu: 1.0,
            lambda: 0.5,
            trials: 2,
            seed: 0,
        };
        assert!(ok.validate().is_ok());
        assert!(SimConfig { mu: -1.0, ..ok }.validate().is_err());
        assert!(SimConfig { lambda: f64::NAN, ..ok }.validate().is_err());
        assert!(SimConfig { trials: 0, ..ok }.validate().is_err());
        assert!(risk_monotonicity_check(&prob, 0.5, &[1.0, 1.0], 2, 0).is_err());
    }

    #[test]
    fn stats_from_samples() {
        let s = SimStats::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(SimStats::from_samples(&[2.0]).std_error, 0.0);
    }

    #[test]
    fn single_mu_gives_single_estimate() {
        let prob = FiniteProblem::mat(1, 6, 6).unwrap();
        let out = risk_monotonicity_check(&prob, 0.5, &[3.0], 4, 1).unwrap();
        assert_eq!(out.len(), 1);
        assert!(is_monotone_within(&out, 4.0));
    }
}
