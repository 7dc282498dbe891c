//! Marčenko–Pastur density and its complementary incomplete moments, plus the
//! closed-form incomplete moments of the quarter-circle law.
//!
//! The incomplete moments are integrated after the substitution
//! `t = γ₋ + (γ₊ − γ₋)·sin²u`, which turns the square-root behavior at both
//! support endpoints (and the `1/√t` blow-up at the origin when `γ = 1`) into a
//! smooth integrand on `u ∈ [u(x), π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Result};
use crate::quadrature;

/// Absolute tolerance requested from the quadrature for incomplete moments.
pub const MOMENT_TOLERANCE: f64 = 1e-13;

/// Parameters of the Marčenko–Pastur law with aspect ratio `γ ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpParams {
    gamma: f64,
    gamma_minus: f64,
    gamma_plus: f64,
}

/// The exponent `k` in `∫ t^k dP`; only 0, 1/2 and 1 appear in the risk formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentOrder {
    Zero,
    Half,
    One,
}

impl MomentOrder {
    pub fn from_exponent(k: f64) -> Result<Self> {
        if k == 0.0 {
            Ok(MomentOrder::Zero)
        } else if k == 0.5 {
            Ok(MomentOrder::Half)
        } else if k == 1.0 {
            Ok(MomentOrder::One)
        } else {
            Err(invalid(format!("moment order must be 0, 1/2 or 1, got {k}")))
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            MomentOrder::Zero => 0.0,
            MomentOrder::Half => 0.5,
            MomentOrder::One => 1.0,
        }
    }

    fn power(self, t: f64) -> f64 {
        match self {
            MomentOrder::Zero => 1.0,
            MomentOrder::Half => t.sqrt(),
            MomentOrder::One => t,
        }
    }
}

impl MpParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid(format!("MP aspect ratio must lie in (0, 1], got {gamma}")));
        }
        let root = gamma.sqrt();
        Ok(Self {
            gamma,
            gamma_minus: (1.0 - root) * (1.0 - root),
            gamma_plus: (1.0 + root) * (1.0 + root),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_minus(&self) -> f64 {
        self.gamma_minus
    }

    pub fn gamma_plus(&self) -> f64 {
        self.gamma_plus
    }

    /// Density `p_γ(t)`; zero off the support.
    pub fn density(&self, t: f64) -> f64 {
        if !(t > self.gamma_minus && t < self.gamma_plus) {
            return 0.0;
        }
        ((self.gamma_plus - t) * (t - self.gamma_minus)).sqrt() / (2.0 * PI * self.gamma * t)
    }

    /// `P_γ(x; k) = ∫_x^{γ₊} t^k p_γ(t) dt`.
    ///
    /// Cutoffs at or above `γ₊` (including those a few ulps above it) give 0;
    /// cutoffs below `γ₋` integrate over the whole support.
    pub fn incomplete_moment(&self, x: f64, order: MomentOrder) -> f64 {
        if x >= self.gamma_plus {
            return 0.0;
        }
        let width = self.gamma_plus - self.gamma_minus;
        let lower = if x <= self.gamma_minus {
            0.0
        } else {
            ((x - self.gamma_minus) / width).sqrt().min(1.0).asin()
        };
        let scale = width * width / (PI * self.gamma);
        let integrand = |u: f64| {
            let (s, c) = u.sin_cos();
            let t = self.gamma_minus + width * s * s;
            scale * (s * c) * (s * c) * order.power(t) / t
        };
        quadrature::integrate(integrand, lower, FRAC_PI_2, MOMENT_TOLERANCE)
            .expect("MP integrand is analytic after the sin² substitution")
            .value
            .max(0.0)
    }
}

/// `P_γ(x; k)` with `k` given as a real exponent.
pub fn mp_incomplete_moment(x: f64, k: f64, params: &MpParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid(format!("moment cutoff must be nonnegative, got {x}")));
    }
    Ok(params.incomplete_moment(x, MomentOrder::from_exponent(k)?))
}

pub fn mp_density(t: f64, params: &MpParams) -> f64 {
    params.density(t)
}

/// Complementary incomplete moment `Q_k(x) = (1/π)∫_x^2 t^k √(4 − t²) dt` of the
/// quarter-circle law, for `k ∈ {0, 1, 2}` and `x ∈ [0, 2]`.
pub fn qc_moment(k: u32, x: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&x) {
        return Err(invalid(format!("quarter-circle cutoff must lie in [0, 2], got {x}")));
    }
    let root = (4.0 - x * x).max(0.0).sqrt();
    let value = match k {
        0 => 1.0 - x * root / (2.0 * PI) - 2.0 / PI * x.atan2(root),
        1 => root * root * root / (3.0 * PI),
        2 => 1.0 - x * root * (x * x - 2.0) / (4.0 * PI) - 2.0 / PI * (x / 2.0).asin(),
        _ => {
            return Err(invalid(format!(
                "quarter-circle moment order must be 0, 1 or 2, got {k}"
            )))
        }
    };
    Ok(value.max(0.0))
}
