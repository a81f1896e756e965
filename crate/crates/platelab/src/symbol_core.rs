//! Conjugated symbols of `-Δ_g ± σ²` and of the plate operator at a boundary
//! point, in normal geodesic coordinates where the principal symbol of `-Δ_g`
//! reads `ξ_d² + r(x, ξ')`.
//!
//! The conjugated factor is
//! `q_j(ξ_d) = (ξ_d + iτ∂_dφ)² + r(x, ξ' + iτ d'φ) + (-1)^j σ²`
//! and the quartic is `q_1 q_2`. Roots are always taken from the two quadratic
//! factors.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::{dot, Metric};
use crate::C64;

/// Default relative tolerance for root classification.
pub const CLASSIFY_TOL: f64 = 1e-9;

const I: C64 = C64::new(0.0, 1.0);

/// Boundary cotangent point `(x, ξ', τ, σ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentialPoint {
    pub x: Vec<f64>,
    pub xi_prime: Vec<f64>,
    pub tau: f64,
    pub sigma: f64,
}

impl TangentialPoint {
    pub fn new(x: Vec<f64>, xi_prime: Vec<f64>, tau: f64, sigma: f64) -> Self {
        Self { x, xi_prime, tau, sigma }
    }

    /// `sqrt(τ² + |ξ'|²)`.
    pub fn lambda_t(&self) -> f64 {
        (self.tau * self.tau + dot(&self.xi_prime, &self.xi_prime)).sqrt()
    }

    /// `sqrt(τ² + |ξ'|² + σ²)`, the scale used whenever σ is present.
    pub fn lambda(&self) -> f64 {
        (self.tau * self.tau + dot(&self.xi_prime, &self.xi_prime) + self.sigma * self.sigma).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) || !(self.sigma >= 0.0) {
            return invalid("tau and sigma must be nonnegative");
        }
        if self.lambda() == 0.0 {
            return invalid("(xi', tau, sigma) must not vanish");
        }
        Ok(())
    }

    /// Same point with `(ξ', τ, σ)` multiplied by `t`.
    pub fn dilate(&self, t: f64) -> Self {
        Self {
            x: self.x.clone(),
            xi_prime: self.xi_prime.iter().map(|v| v * t).collect(),
            tau: self.tau * t,
            sigma: self.sigma * t,
        }
    }
}

/// First and second derivatives of the weight at a boundary point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightJet {
    pub phi: f64,
    pub d_tangential: Vec<f64>,
    pub d_normal: f64,
    /// Full Hessian, tangential coordinates first and the normal one last.
    pub hessian: DMatrix<f64>,
}

impl WeightJet {
    /// Jet with vanishing Hessian and value.
    pub fn linear(d_tangential: Vec<f64>, d_normal: f64) -> Self {
        let d = d_tangential.len() + 1;
        Self { phi: 0.0, d_tangential, d_normal, hessian: DMatrix::zeros(d, d) }
    }
}

/// Roots of one quadratic factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub factor: u8,
    pub alpha: C64,
    /// `-iτ∂_dφ - iα`, always in the lower half-plane when τ∂_dφ > 0.
    pub pi_1: C64,
    /// `-iτ∂_dφ + iα`.
    pub pi_2: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    NoUpperRoot,
    OneUpperRoot,
    TwoDistinctUpperRoots,
    DoubleUpperRoot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootConfiguration {
    pub case_tag: CaseTag,
    /// Roots of `κ⁺` taken from `π_{1,2}, π_{2,2}` in that order.
    pub upper_roots: Vec<C64>,
    pub tolerance: f64,
    /// Some candidate root lies within `tol·λ` of the real axis, or two
    /// upper roots nearly coincide while σ is not small.
    pub marginal: bool,
}

fn sign_j(j: u8) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_factor(j: u8) {
    assert!(j == 1 || j == 2, "factor index must be 1 or 2");
}

/// `r(x, ξ' + iτ d'φ) + (-1)^j σ²`.
pub fn radicand(metric: &Metric, p: &TangentialPoint, w: &WeightJet, j: u8) -> C64 {
    check_factor(j);
    let eta: Vec<f64> = w.d_tangential.iter().map(|v| p.tau * v).collect();
    metric.quad_complex(&p.x, &p.xi_prime, &eta) + sign_j(j) * p.sigma * p.sigma
}

/// Square root with `Re ≥ 0`, and `Im ≥ 0` on the imaginary axis.
pub fn branch_sqrt(m: C64) -> C64 {
    if m.im == 0.0 && m.re <= 0.0 {
        return C64::new(0.0, (-m.re).sqrt());
    }
    let s = m.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}

/// Value of the conjugated factor `q_j` at a complex `ξ_d`.
pub fn factor_symbol_eval(metric: &Metric, p: &TangentialPoint, w: &WeightJet, j: u8, xi_d: C64) -> C64 {
    let shifted = xi_d + I * (p.tau * w.d_normal);
    shifted * shifted + radicand(metric, p, w, j)
}

/// Value of the conjugated quartic `q_1 q_2`.
pub fn quartic_eval(metric: &Metric, p: &TangentialPoint, w: &WeightJet, xi_d: C64) -> C64 {
    factor_symbol_eval(metric, p, w, 1, xi_d) * factor_symbol_eval(metric, p, w, 2, xi_d)
}

pub fn factor_roots(metric: &Metric, p: &TangentialPoint, w: &WeightJet, j: u8) -> RootPair {
    let alpha = branch_sqrt(radicand(metric, p, w, j));
    let shift = -I * (p.tau * w.d_normal);
    RootPair { factor: j, alpha, pi_1: shift - I * alpha, pi_2: shift + I * alpha }
}

/// `[π_{1,1}, π_{1,2}, π_{2,1}, π_{2,2}]`.
pub fn quartic_roots(metric: &Metric, p: &TangentialPoint, w: &WeightJet) -> [C64; 4] {
    let a = factor_roots(metric, p, w, 1);
    let b = factor_roots(metric, p, w, 2);
    [a.pi_1, a.pi_2, b.pi_1, b.pi_2]
}

/// Monomial coefficients (ascending) of the conjugated quartic in `ξ_d`.
pub fn quartic_coefficients(metric: &Metric, p: &TangentialPoint, w: &WeightJet) -> [C64; 5] {
    let b = I * (2.0 * p.tau * w.d_normal);
    let s = (p.tau * w.d_normal).powi(2);
    let c1 = radicand(metric, p, w, 1) - s;
    let c2 = radicand(metric, p, w, 2) - s;
    // (ξ² + bξ + c1)(ξ² + bξ + c2)
    [c1 * c2, b * (c1 + c2), c1 + c2 + b * b, b + b, C64::new(1.0, 0.0)]
}

pub fn classify_roots(metric: &Metric, p: &TangentialPoint, w: &WeightJet, tol: f64) -> Result<RootConfiguration> {
    if !(w.d_normal > 0.0) {
        return invalid("classification requires a positive normal derivative of the weight");
    }
    p.validate()?;
    let lam = p.lambda();
    let thr = tol * lam;
    let cands = [factor_roots(metric, p, w, 1).pi_2, factor_roots(metric, p, w, 2).pi_2];
    let mut marginal = cands.iter().any(|z| z.im.abs() <= thr);
    let upper: Vec<C64> = cands.iter().copied().filter(|z| z.im >= -thr).collect();
    let case_tag = match upper.len() {
        0 => CaseTag::NoUpperRoot,
        1 => CaseTag::OneUpperRoot,
        _ => {
            if (upper[0] - upper[1]).norm() <= thr {
                if p.sigma <= thr {
                    CaseTag::DoubleUpperRoot
                } else {
                    marginal = true;
                    CaseTag::TwoDistinctUpperRoots
                }
            } else {
                CaseTag::TwoDistinctUpperRoots
            }
        }
    };
    Ok(RootConfiguration { case_tag, upper_roots: upper, tolerance: tol, marginal })
}

/// `|Re z| < |x0|` for `z² = m`, decided without taking the root.
pub fn abs_re_sqrt_below(m: C64, x0: f64) -> bool {
    4.0 * x0 * x0 * m.re - 4.0 * x0.powi(4) + m.im * m.im < 0.0
}

/// Algebraic test for `Im π_{j,2} < 0`:
/// `(∂_dφ)² r(ξ') + r̃(ξ', d'φ)² < τ²(∂_dφ)²|dφ|² + (-1)^{j+1} σ²(∂_dφ)²`.
///
/// The inequality is derived for τ > 0; at τ = 0 the upper root is never
/// strictly below the axis and `false` is returned.
pub fn im_sign_criterion(metric: &Metric, p: &TangentialPoint, w: &WeightJet, j: u8) -> bool {
    check_factor(j);
    if p.tau <= 0.0 {
        return false;
    }
    let dn2 = w.d_normal * w.d_normal;
    let r = metric.quad(&p.x, &p.xi_prime);
    let rt = metric.bilinear(&p.x, &p.xi_prime, &w.d_tangential);
    let dphi2 = metric.quad(&p.x, &w.d_tangential) + dn2;
    let lhs = dn2 * r + rt * rt;
    let rhs = p.tau * p.tau * dn2 * dphi2 - sign_j(j) * p.sigma * p.sigma * dn2;
    lhs < rhs
}
