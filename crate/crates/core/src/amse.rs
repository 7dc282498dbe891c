//! Asymptotic worst-case MSE of singular value soft thresholding, its minimax
//! threshold and the derived curves.
//!
//! Thresholds are expressed on the normalized spectral scale `Λ`; the data-scale
//! threshold for an `m × n` problem with noise level `1/√n` is
//! `λ = Λ·√(1 − r/n)`, and the large-`n` tuning limit `λ*/√n` is
//! `√(1 − ρ̃)·Λ*`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::mp::{qc_moment, MomentOrder, MpParams};

/// Bisection stops once the bracket on `Λ*` is this narrow.
pub const LAMBDA_TOLERANCE: f64 = 1e-12;
/// Bisection stops once the bracket on `θ` is this narrow.
pub const THETA_TOLERANCE: f64 = 1e-14;

/// Which minimax problem is being solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixClass {
    /// General `m × n` matrices with aspect ratio `β = m/n ∈ (0, 1]`.
    Mat { beta: f64 },
    /// Symmetric positive semidefinite `n × n` matrices.
    Sym,
}

impl MatrixClass {
    pub fn mat(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(invalid(format!("aspect ratio beta must lie in (0, 1], got {beta}")));
        }
        Ok(MatrixClass::Mat { beta })
    }

    pub fn beta(&self) -> f64 {
        match *self {
            MatrixClass::Mat { beta } => beta,
            MatrixClass::Sym => 1.0,
        }
    }

    /// Weight of the noise-only block: 1 for `Mat`, 1/2 for `Sym`.
    pub fn alpha(&self) -> f64 {
        match self {
            MatrixClass::Mat { .. } => 1.0,
            MatrixClass::Sym => 0.5,
        }
    }

    /// Rank fraction relative to the long dimension.
    pub fn rho_tilde(&self, rho: f64) -> f64 {
        self.beta() * rho
    }

    /// Aspect ratio `γ(ρ, ρ̃) = ρ̃(1 − ρ)/(ρ(1 − ρ̃))` of the noise-only block,
    /// extended continuously to `γ(0) = β` and `γ(1) = 0`.
    pub fn gamma(&self, rho: f64) -> f64 {
        match *self {
            MatrixClass::Sym => 1.0,
            MatrixClass::Mat { beta } => {
                if rho >= 1.0 {
                    0.0
                } else {
                    beta * (1.0 - rho) / (1.0 - beta * rho)
                }
            }
        }
    }

    /// Upper edge `√γ₊ = 1 + √γ` of the singular-value spectrum of the noise block.
    pub fn spectral_edge(&self, rho: f64) -> f64 {
        1.0 + self.gamma(rho).sqrt()
    }

    pub fn is_square(&self) -> bool {
        self.beta() == 1.0
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatrixClass::Mat { .. } => "mat",
            MatrixClass::Sym => "sym",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixClass::Mat { beta } => write!(f, "mat(beta={beta})"),
            MatrixClass::Sym => write!(f, "sym"),
        }
    }
}

/// `γ(ρ, ρ̃)` for an interior rank fraction.
pub fn gamma_of(class: MatrixClass, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(class.gamma(rho))
}

/// One solved point of the minimax problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmsePoint {
    pub rho: f64,
    pub class: MatrixClass,
    pub gamma: f64,
    pub lambda_star: f64,
    pub amse: f64,
    /// Limit of `λ*/√n`, i.e. `√(1 − ρ̃)·Λ*`.
    pub tuning_scale: f64,
}

impl AmsePoint {
    pub fn lower_bound(&self) -> f64 {
        global_lower_bound(self.class, self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub rho: f64,
    pub gamma: f64,
    pub lambda_star: f64,
    pub amse: f64,
    pub tuning_scale: f64,
    pub lower_bound: f64,
}

impl From<AmsePoint> for CurveRow {
    fn from(p: AmsePoint) -> Self {
        CurveRow {
            rho: p.rho,
            gamma: p.gamma,
            lambda_star: p.lambda_star,
            amse: p.amse,
            tuning_scale: p.tuning_scale,
            lower_bound: p.lower_bound(),
        }
    }
}

/// A tabulated curve over increasing `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub class: MatrixClass,
    pub rows: Vec<CurveRow>,
    pub description: String,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid(format!("rank fraction rho must lie in [0, 1], got {rho}")));
    }
    Ok(())
}

fn check_threshold(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(invalid(format!(
            "threshold must be finite and nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

/// Worst-case asymptotic MSE `M(Λ; ρ, ρ̃, α)` of soft thresholding at `Λ`.
///
/// The incomplete moments vanish for `Λ ≥ √γ₊`, beyond which only the `ρΛ²`
/// term grows.
pub fn worst_case_amse(class: MatrixClass, rho: f64, lambda: f64) -> Result<f64> {
    check_rho(rho)?;
    check_threshold(lambda)?;
    let rho_t = class.rho_tilde(rho);
    let base = rho + rho_t - rho * rho_t;
    if rho >= 1.0 {
        return Ok(base + (1.0 - rho_t) * rho * lambda * lambda);
    }
    let mp = MpParams::new(class.gamma(rho))?;
    let x = lambda * lambda;
    let tail = mp.incomplete_moment(x, MomentOrder::One) - 2.0 * lambda * mp.incomplete_moment(x, MomentOrder::Half)
        + x * mp.incomplete_moment(x, MomentOrder::Zero);
    Ok(base + (1.0 - rho_t) * (rho * x + class.alpha() * (1.0 - rho) * tail.max(0.0)))
}

/// Square-case (`β = 1`) closed form of `M(Λ; ρ, ρ, α)` through the
/// quarter-circle moments; an independent route to [`worst_case_amse`].
pub fn worst_case_amse_square(rho: f64, alpha: f64, lambda: f64) -> Result<f64> {
    check_rho(rho)?;
    check_threshold(lambda)?;
    let x = lambda.min(2.0);
    let tail = qc_moment(2, x)? - 2.0 * lambda * qc_moment(1, x)? + lambda * lambda * qc_moment(0, x)?;
    Ok(rho * (2.0 - rho) + (1.0 - rho) * (rho * lambda * lambda + alpha * (1.0 - rho) * tail.max(0.0)))
}

/// Minimax threshold `Λ*(ρ, β, α)`: the unique root of
/// `P_γ(Λ²; 1/2) − Λ·P_γ(Λ²; 0) = Λρ / (α(1 − ρ))` on `[0, √γ₊]`.
pub fn minimax_threshold(class: MatrixClass, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(1.0 + class.beta().sqrt());
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    let mp = MpParams::new(class.gamma(rho))?;
    let slope = rho / (class.alpha() * (1.0 - rho));
    let residual = |lambda: f64| {
        let x = lambda * lambda;
        mp.incomplete_moment(x, MomentOrder::Half)
            - lambda * mp.incomplete_moment(x, MomentOrder::Zero)
            - lambda * slope
    };
    let (mut lo, mut hi) = (0.0, class.spectral_edge(rho));
    if !(residual(lo) > 0.0 && residual(hi) < 0.0) {
        return Err(Error::NotBracketed(format!(
            "minimax threshold for {class} at rho={rho}"
        )));
    }
    while hi - lo > LAMBDA_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Left-hand side `θ + cot θ·(1 − cos²θ / 3)` of the square-case threshold equation.
pub fn square_case_lhs(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    theta + c / s * (1.0 - c * c / 3.0)
}

/// Square-case minimax threshold `Λ* = 2 sin θ`, where `θ ∈ [0, π/2]` solves
/// `θ + cot θ·(1 − cos²θ/3) = π(1 + ρ/α − ρ) / (2(1 − ρ))`.
pub fn minimax_threshold_square(rho: f64, alpha: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if rho == 0.0 {
        return Ok(2.0);
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    let target = PI * (1.0 + rho / alpha - rho) / (2.0 * (1.0 - rho));
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    while hi - lo > THETA_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if square_case_lhs(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(2.0 * (0.5 * (lo + hi)).sin())
}

/// Minimax AMSE `M(ρ, β | class)` together with its threshold and tuning.
pub fn minimax_amse(class: MatrixClass, rho: f64) -> Result<AmsePoint> {
    let lambda_star = minimax_threshold(class, rho)?;
    let amse = worst_case_amse(class, rho, lambda_star)?;
    Ok(AmsePoint {
        rho,
        class,
        gamma: class.gamma(rho),
        lambda_star,
        amse,
        tuning_scale: (1.0 - class.rho_tilde(rho)).sqrt() * lambda_star,
    })
}

/// Critical sampling rate `δ*(ρ; β)` for nuclear-norm recovery, which coincides
/// with the minimax AMSE of case `Mat`.
pub fn phase_transition_delta(rho: f64, beta: f64) -> Result<f64> {
    Ok(minimax_amse(MatrixClass::mat(beta)?, rho)?.amse)
}

/// First-order slope of `ρ ↦ M(ρ)` at `ρ = 0`.
pub fn small_rho_slope(class: MatrixClass) -> f64 {
    match class {
        MatrixClass::Mat { beta } => 2.0 * (1.0 + beta.sqrt() + beta),
        MatrixClass::Sym => 6.0,
    }
}

/// Asymptotic lower bound `ρ + ρ̃ − ρρ̃` on the minimax MSE over all denoisers.
pub fn global_lower_bound(class: MatrixClass, rho: f64) -> f64 {
    let rho_t = class.rho_tilde(rho);
    rho + rho_t - rho * rho_t
}

/// Finite-size lower bound `r/m + r/n − (r² + r)/(mn)`.
pub fn global_lower_bound_finite(r: usize, m: usize, n: usize) -> f64 {
    let (r, m, n) = (r as f64, m as f64, n as f64);
    r / m + r / n - (r * r + r) / (m * n)
}

/// Upper bound `2(1 + √β/(1 + β))` on `M(ρ, β)/M⁻(ρ, β)`, attained as `ρ → 0`.
pub fn ratio_bound(class: MatrixClass) -> f64 {
    let beta = class.beta();
    2.0 * (1.0 + beta.sqrt() / (1.0 + beta))
}

/// One point `(ρ(θ), M(θ))` of the square-case parametric representation.
pub fn parametric_point(class: MatrixClass, theta: f64) -> Result<(f64, f64)> {
    if !class.is_square() {
        return Err(invalid(format!("parametric curves need a square class, got {class}")));
    }
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(invalid(format!("theta must lie in (0, pi/2), got {theta}")));
    }
    let lhs = square_case_lhs(theta);
    let (rho, scale) = match class {
        MatrixClass::Mat { .. } => (1.0 - FRAC_PI_2 / lhs, 4.0 / PI),
        MatrixClass::Sym => ((lhs - FRAC_PI_2) / (lhs + FRAC_PI_2), 2.0 / PI),
    };
    let (s, c) = theta.sin_cos();
    let bracket = (PI - 2.0 * theta) * (1.25 - c * c) + (2.0 * theta).sin() / 12.0 * ((2.0 * theta).cos() - 14.0);
    let amse = 2.0 * rho - rho * rho + 4.0 * rho * (1.0 - rho) * s * s + scale * (1.0 - rho) * (1.0 - rho) * bracket;
    Ok((rho, amse))
}

/// Tabulates the parametric curve on a strictly increasing `θ` grid in `(0, π/2)`.
///
/// Rows are returned in increasing `ρ`, i.e. in reverse grid order.
pub fn parametric_curve(class: MatrixClass, theta_grid: &[f64]) -> Result<CurveTable> {
    if theta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("theta grid must be strictly increasing"));
    }
    let mut rows = theta_grid
        .iter()
        .map(|&theta| {
            let (rho, amse) = parametric_point(class, theta)?;
            let lambda_star = 2.0 * theta.sin();
            Ok(CurveRow {
                rho,
                gamma: 1.0,
                lambda_star,
                amse,
                tuning_scale: (1.0 - rho).sqrt() * lambda_star,
                lower_bound: global_lower_bound(class, rho),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.reverse();
    Ok(CurveTable {
        class,
        rows,
        description: format!("parametric theta grid, {} points", theta_grid.len()),
    })
}

/// Default `ρ` grid: `0, 0.01, …, 1` plus a geometric refinement `1e-4 … 1e-2`.
pub fn default_rho_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..20).map(|i| 10f64.powf(-4.0 + 0.1 * i as f64)).collect();
    grid.extend((0..=100).map(|i| i as f64 / 100.0));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Solves the minimax problem at every `ρ` of a strictly increasing grid.
pub fn tabulate(class: MatrixClass, rhos: &[f64]) -> Result<CurveTable> {
    if rhos.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("rho grid must be strictly increasing"));
    }
    let rows = rhos
        .par_iter()
        .map(|&rho| minimax_amse(class, rho).map(CurveRow::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable {
        class,
        rows,
        description: format!(
            "{} rho points in [{}, {}]; bisection tolerance {LAMBDA_TOLERANCE:e}",
            rhos.len(),
            rhos.first().copied().unwrap_or(f64::NAN),
            rhos.last().copied().unwrap_or(f64::NAN)
        ),
    })
}
