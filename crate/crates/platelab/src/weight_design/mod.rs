//! Carleman weights `φ = exp(γψ)` and sub-ellipticity checks for the
//! conjugated second order factors `q_j = (ξ + iτdφ)_g² + (-1)^j σ²`.

mod bracket;
mod global;
mod search;

pub use bracket::{poisson_bracket, q_jets, PhaseJet, QJets};
pub use global::{build_global_weight, Domain, ExclusionSet, GlobalWeightReport};
pub use search::{
    characteristic_points, gamma_search, mu_search, subellipticity_check, BracketSample, GammaReport, MuReport,
    RatioBand, Region, SubellReport,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::symbol_core::WeightJet;

/// One-dimensional building block of `ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Psi1d {
    /// `a + b x`.
    Affine { a: f64, b: f64 },
    /// `Σ c_k x^k`.
    Poly(Vec<f64>),
    /// `s(1 - s) exp(κ s)` with `s = (x - lo)/(hi - lo)`; vanishes at both
    /// ends, single critical point at `s = c` when `κ = (2c - 1)/(c(1 - c))`.
    BoundaryBump { lo: f64, hi: f64, kappa: f64 },
}

impl Psi1d {
    /// Bump on `[lo, hi]` with its maximum at `x = peak`.
    pub fn bump_with_peak(lo: f64, hi: f64, peak: f64) -> Self {
        let c = (peak - lo) / (hi - lo);
        Psi1d::BoundaryBump { lo, hi, kappa: (2.0 * c - 1.0) / (c * (1.0 - c)) }
    }

    /// `(ψ, ψ', ψ'')`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Psi1d::Affine { a, b } => (a + b * x, *b, 0.0),
            Psi1d::Poly(c) => {
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for a in c.iter().rev() {
                    ddp = ddp * x + 2.0 * dp;
                    dp = dp * x + p;
                    p = p * x + a;
                }
                (p, dp, ddp)
            }
            Psi1d::BoundaryBump { lo, hi, kappa } => {
                let l = hi - lo;
                let s = (x - lo) / l;
                let e = (kappa * s).exp();
                let f = s * (1.0 - s);
                let df = 1.0 - 2.0 * s;
                let v = f * e;
                let dv = (df + kappa * f) * e;
                let ddv = (-2.0 + 2.0 * kappa * df + kappa * kappa * f) * e;
                (v, dv / l, ddv / (l * l))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combine {
    Product,
    Sum,
}

/// `ψ(x) = ∏ ψ_i(x_i)` or `Σ ψ_i(x_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psi {
    pub factors: Vec<Psi1d>,
    pub combine: Combine,
}

impl Psi {
    pub fn one_d(f: Psi1d) -> Self {
        Self { factors: vec![f], combine: Combine::Product }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// `(ψ, ∇ψ, Hess ψ)`.
    pub fn jet(&self, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let d = self.dim();
        let parts: Vec<(f64, f64, f64)> = self.factors.iter().zip(x).map(|(f, xi)| f.jet(*xi)).collect();
        match self.combine {
            Combine::Sum => {
                let v = parts.iter().map(|p| p.0).sum();
                let g = DVector::from_iterator(d, parts.iter().map(|p| p.1));
                let h = DMatrix::from_diagonal(&DVector::from_iterator(d, parts.iter().map(|p| p.2)));
                (v, g, h)
            }
            Combine::Product => {
                let prod_except = |skip: &[usize]| -> f64 {
                    parts.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, p)| p.0).product()
                };
                let v = prod_except(&[]);
                let g = DVector::from_fn(d, |i, _| parts[i].1 * prod_except(&[i]));
                let h = DMatrix::from_fn(d, d, |i, j| {
                    if i == j {
                        parts[i].2 * prod_except(&[i])
                    } else {
                        parts[i].1 * parts[j].1 * prod_except(&[i, j])
                    }
                });
                (v, g, h)
            }
        }
    }
}

/// `φ = exp(γψ)` with jets from the chain rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    pub psi: Psi,
    pub gamma: f64,
}

/// Value, gradient and Hessian of `φ` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl WeightField {
    pub fn new(psi: Psi, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return invalid("gamma must be positive");
        }
        Ok(Self { psi, gamma })
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { psi: self.psi.clone(), gamma }
    }

    /// `dφ = γφ dψ`, `Hess φ = γφ(γ dψ⊗dψ + Hess ψ)`.
    pub fn phi_jet(&self, x: &[f64]) -> PhiJet {
        let (psi, g, h) = self.psi.jet(x);
        let phi = (self.gamma * psi).exp();
        let k = self.gamma * phi;
        PhiJet { value: phi, grad: &g * k, hessian: (&g * g.transpose() * self.gamma + h) * k }
    }

    /// Boundary jet at `x` with the normal coordinate along `axis`, oriented
    /// inward with sign `inward` (±1). Tangential coordinates keep their order.
    pub fn boundary_jet(&self, x: &[f64], axis: usize, inward: f64) -> WeightJet {
        let j = self.phi_jet(x);
        let d = x.len();
        let mut order: Vec<usize> = (0..d).filter(|k| *k != axis).collect();
        order.push(axis);
        let flip = |k: usize| if k == axis { inward } else { 1.0 };
        let d_tangential = order[..d - 1].iter().map(|k| j.grad[*k]).collect();
        let hessian = DMatrix::from_fn(d, d, |a, b| {
            let (ka, kb) = (order[a], order[b]);
            j.hessian[(ka, kb)] * flip(ka) * flip(kb)
        });
        WeightJet { phi: j.value, d_tangential, d_normal: j.grad[axis] * inward, hessian }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(psi: &Psi, x: &[f64]) {
        let h = 1e-5;
        let (_, g, hs) = psi.jet(x);
        for k in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (vp, gp, _) = psi.jet(&xp);
            let (vm, gm, _) = psi.jet(&xm);
            assert!(((vp - vm) / (2.0 * h) - g[k]).abs() < 1e-7, "gradient {k}");
            for i in 0..x.len() {
                assert!(((gp[i] - gm[i]) / (2.0 * h) - hs[(i, k)]).abs() < 1e-6, "hessian {i}{k}");
            }
        }
    }

    #[test]
    fn psi_jets_match_differences() {
        fd_check(&Psi::one_d(Psi1d::Poly(vec![0.1, 1.0, -1.0])), &[0.3]);
        fd_check(&Psi::one_d(Psi1d::bump_with_peak(0.0, 2.0, 0.7)), &[1.3]);
        let p = Psi { factors: vec![Psi1d::bump_with_peak(0.0, 1.0, 0.4), Psi1d::bump_with_peak(0.0, 2.0, 1.1)], combine: Combine::Product };
        fd_check(&p, &[0.2, 0.9]);
        let s = Psi { factors: vec![Psi1d::Affine { a: 1.0, b: 2.0 }, Psi1d::Poly(vec![0.0, 0.0, 3.0])], combine: Combine::Sum };
        fd_check(&s, &[0.2, 0.9]);
    }

    #[test]
    fn bump_peaks_where_requested() {
        let b = Psi1d::bump_with_peak(0.0, 1.0, 0.45);
        assert!(b.jet(0.45).1.abs() < 1e-14);
        assert_eq!(b.jet(0.0).0, 0.0);
        assert!(b.jet(1.0).0.abs() < 1e-15);
        assert!((b.jet(0.0).1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chain_rule() {
        let w = WeightField::new(Psi::one_d(Psi1d::Poly(vec![0.2, 1.0, -1.0])), 3.0).unwrap();
        let x = [0.3];
        let (psi, g, h) = w.psi.jet(&x);
        let j = w.phi_jet(&x);
        let phi = (3.0 * psi).exp();
        assert!((j.grad[0] - 3.0 * phi * g[0]).abs() < 1e-12 * phi);
        assert!((j.hessian[(0, 0)] - 3.0 * phi * (3.0 * g[0] * g[0] + h[(0, 0)])).abs() < 1e-12 * phi * 10.0);
    }

    #[test]
    fn boundary_jet_points_inward() {
        let w = WeightField::new(Psi::one_d(Psi1d::bump_with_peak(0.0, 1.0, 0.5)), 1.0).unwrap();
        assert!(w.boundary_jet(&[0.0], 0, 1.0).d_normal > 0.0);
        assert!(w.boundary_jet(&[1.0], 0, -1.0).d_normal > 0.0);
        assert!(WeightField::new(w.psi.clone(), 0.0).is_err());
    }
}
