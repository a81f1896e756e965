//! Dual metric `g^{ij}(x)` on covectors.
//!
//! The same type serves as the tangential metric `r(x, ξ')` at a boundary
//! point and as the full interior metric. Dimension is taken from the
//! covector passed in.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    /// Constant symmetric positive definite `g^{ij}`.
    Constant(DMatrix<f64>),
    /// Diagonal `g^{ii}(x) = base[i] + slope[i]·x`.
    Diagonal { base: Vec<f64>, slope: Vec<Vec<f64>> },
}

impl Default for Metric {
    fn default() -> Self {
        Metric::Euclidean
    }
}

impl Metric {
    /// `g^{ij}(x)` as a `dim × dim` matrix.
    pub fn inverse_at(&self, x: &[f64], dim: usize) -> DMatrix<f64> {
        match self {
            Metric::Euclidean => DMatrix::identity(dim, dim),
            Metric::Constant(g) => {
                assert_eq!(g.nrows(), dim, "metric dimension mismatch");
                g.clone()
            }
            Metric::Diagonal { base, slope } => {
                assert_eq!(base.len(), dim, "metric dimension mismatch");
                DMatrix::from_fn(dim, dim, |i, j| {
                    if i != j {
                        return 0.0;
                    }
                    base[i] + slope.get(i).map_or(0.0, |s| dot(s, x))
                })
            }
        }
    }

    /// `∂_{x_k} g^{ij}(x)`.
    pub fn inverse_derivative(&self, _x: &[f64], dim: usize, k: usize) -> DMatrix<f64> {
        match self {
            Metric::Euclidean | Metric::Constant(_) => DMatrix::zeros(dim, dim),
            Metric::Diagonal { slope, .. } => DMatrix::from_fn(dim, dim, |i, j| {
                if i != j {
                    return 0.0;
                }
                slope.get(i).and_then(|s| s.get(k)).copied().unwrap_or(0.0)
            }),
        }
    }

    /// Bilinear form `r̃(x, ξ, η) = g^{ij} ξ_i η_j`.
    pub fn bilinear(&self, x: &[f64], xi: &[f64], eta: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), eta.len());
        match self {
            Metric::Euclidean => dot(xi, eta),
            _ => {
                let g = self.inverse_at(x, xi.len());
                let mut s = 0.0;
                for i in 0..xi.len() {
                    for j in 0..xi.len() {
                        s += g[(i, j)] * xi[i] * eta[j];
                    }
                }
                s
            }
        }
    }

    /// Quadratic form `r(x, ξ)`.
    pub fn quad(&self, x: &[f64], xi: &[f64]) -> f64 {
        self.bilinear(x, xi, xi)
    }

    /// `r(x, ξ + iη)` extended by bilinearity.
    pub fn quad_complex(&self, x: &[f64], xi: &[f64], eta: &[f64]) -> C64 {
        C64::new(
            self.quad(x, xi) - self.quad(x, eta),
            2.0 * self.bilinear(x, xi, eta),
        )
    }

    /// `r(x, ζ)` for a general complex covector.
    pub fn quad_of(&self, x: &[f64], zeta: &[C64]) -> C64 {
        let re: Vec<f64> = zeta.iter().map(|z| z.re).collect();
        let im: Vec<f64> = zeta.iter().map(|z| z.im).collect();
        self.quad_complex(x, &re, &im)
    }

    /// Smallest eigenvalue of `g^{ij}(x)`; positive for an elliptic metric.
    pub fn ellipticity(&self, x: &[f64], dim: usize) -> f64 {
        if dim == 0 {
            return 1.0;
        }
        let g = self.inverse_at(x, dim);
        g.symmetric_eigenvalues().min()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
