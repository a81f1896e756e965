//! Boundary operator symbols `b(x, ξ', ξ_d) = Σ_m c_m(x, ξ') ξ_d^m`.
//!
//! Normal derivatives are written with `∂_n ↦ -iξ_d` and the tangential
//! Laplacian with `Δ' ↦ -r(x, ξ')`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::symbol_core::branch_sqrt;
use crate::C64;

/// Homogeneous tangential term, evaluated at a possibly complex `ζ'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TangentialTerm {
    Const { coef: C64 },
    /// `coef · r(x, ζ')^{power/2}`; odd powers use the `Re ≥ 0` root.
    MetricPower { power: u32, coef: C64 },
    /// `coef · (dir · ζ')^power`.
    Linear { power: u32, coef: C64, dir: Vec<f64> },
}

impl TangentialTerm {
    pub fn degree(&self) -> u32 {
        match self {
            TangentialTerm::Const { .. } => 0,
            TangentialTerm::MetricPower { power, .. } | TangentialTerm::Linear { power, .. } => *power,
        }
    }

    pub fn eval(&self, metric: &Metric, x: &[f64], zeta: &[C64]) -> C64 {
        match self {
            TangentialTerm::Const { coef } => *coef,
            TangentialTerm::MetricPower { power, coef } => {
                let r = metric.quad_of(x, zeta);
                let half = r.powu(power / 2);
                if power % 2 == 1 {
                    coef * half * branch_sqrt(r)
                } else {
                    coef * half
                }
            }
            TangentialTerm::Linear { power, coef, dir } => {
                let s: C64 = dir.iter().zip(zeta).map(|(v, z)| z * *v).sum();
                coef * s.powu(*power)
            }
        }
    }

    fn scaled(&self, c: C64) -> Self {
        let mut t = self.clone();
        match &mut t {
            TangentialTerm::Const { coef }
            | TangentialTerm::MetricPower { coef, .. }
            | TangentialTerm::Linear { coef, .. } => *coef *= c,
        }
        t
    }
}

/// Sum of tangential terms sharing one homogeneity degree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TangentialPoly(pub Vec<TangentialTerm>);

impl TangentialPoly {
    pub fn constant(c: C64) -> Self {
        Self(vec![TangentialTerm::Const { coef: c }])
    }

    /// `c · |ζ'|^p`.
    pub fn metric_power(p: u32, c: C64) -> Self {
        if p == 0 {
            return Self::constant(c);
        }
        Self(vec![TangentialTerm::MetricPower { power: p, coef: c }])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, metric: &Metric, x: &[f64], zeta: &[C64]) -> C64 {
        self.0.iter().map(|t| t.eval(metric, x, zeta)).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self(self.0.iter().map(|t| t.scaled(c)).collect())
    }

    pub fn plus(mut self, other: TangentialPoly) -> Self {
        self.0.extend(other.0);
        self
    }
}

/// Boundary operator symbol of total order `order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOperatorSymbol {
    pub order: u32,
    /// `coeffs[m]` multiplies `ξ_d^m`; its degree is `order - m`.
    pub coeffs: Vec<TangentialPoly>,
}

impl BoundaryOperatorSymbol {
    pub fn new(order: u32, coeffs: Vec<TangentialPoly>) -> Result<Self> {
        let s = Self { order, coeffs };
        s.validate()?;
        Ok(s)
    }

    /// Checks normal order and the degree of every tangential term.
    pub fn validate(&self) -> Result<()> {
        let max_m = self.order.min(3) as usize;
        if self.coeffs.len() > max_m + 1 {
            return Err(Error::InvalidInput(format!(
                "normal order {} exceeds min(3, {})",
                self.coeffs.len() - 1,
                self.order
            )));
        }
        for (m, c) in self.coeffs.iter().enumerate() {
            for t in &c.0 {
                if t.degree() + m as u32 != self.order {
                    return Err(Error::InvalidInput(format!(
                        "term of degree {} multiplies xi_d^{m} in a symbol of order {}",
                        t.degree(),
                        self.order
                    )));
                }
            }
        }
        Ok(())
    }

    /// Tangential coefficients evaluated at `ζ'`.
    pub fn coefficients_at(&self, metric: &Metric, x: &[f64], zeta: &[C64]) -> Vec<C64> {
        self.coeffs.iter().map(|c| c.eval(metric, x, zeta)).collect()
    }

    /// `(b, ∂_{ξ_d} b)` at `(ζ', ξ_d)`.
    pub fn eval_with_derivative(&self, metric: &Metric, x: &[f64], zeta: &[C64], xi_d: C64) -> (C64, C64) {
        horner_with_derivative(&self.coefficients_at(metric, x, zeta), xi_d)
    }

    pub fn eval(&self, metric: &Metric, x: &[f64], zeta: &[C64], xi_d: C64) -> C64 {
        self.eval_with_derivative(metric, x, zeta, xi_d).0
    }

    /// Monomial coefficients in `ξ_d` of `ξ_d ↦ b(ζ', ξ_d + shift)`, padded to
    /// length 4.
    pub fn shifted_coefficients(&self, metric: &Metric, x: &[f64], zeta: &[C64], shift: C64) -> [C64; 4] {
        let c = self.coefficients_at(metric, x, zeta);
        let mut out = [C64::new(0.0, 0.0); 4];
        for (m, cm) in c.iter().enumerate() {
            for (l, slot) in out.iter_mut().enumerate().take(m + 1) {
                *slot += cm * binomial(m, l) * shift.powu((m - l) as u32);
            }
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn horner_with_derivative(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Real covector viewed as complex.
pub fn complexify(v: &[f64]) -> Vec<C64> {
    v.iter().map(|x| C64::new(*x, 0.0)).collect()
}
