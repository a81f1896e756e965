//! Rank formulation: LS holds at `ϱ'` iff the coefficient vectors of
//! `b_{1,φ}, b_{2,φ}` and `κ⁺ ξ_d^ℓ` (`ℓ = 0..=3 - m⁺`) span `ℂ⁴`, where
//! `κ⁺` collects the roots in the closed upper half-plane.
//!
//! Entries are rescaled so that the matrix is invariant under dilation of
//! `(ξ', τ, σ)`: the coefficient of `ξ_d^ℓ` in a row of degree `k` is
//! multiplied by `λ^{ℓ - k}`.

use nalgebra::DMatrix;

use super::catalog::BoundaryPair;
use super::conjugated_zeta;
use crate::error::Result;
use crate::metric::Metric;
use crate::symbol_core::{classify_roots, TangentialPoint, WeightJet};
use crate::C64;

/// Singular values at or below this threshold count as zero.
pub const RANK_TOL: f64 = 1e-8;

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Rows with their homogeneity degree, unweighted.
fn rows(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<Vec<([C64; 4], i32)>> {
    let conf = classify_roots(metric, p, w, classify_tol)?;
    let zeta = conjugated_zeta(p, w);
    let shift = C64::new(0.0, p.tau * w.d_normal);
    let mut out = vec![
        (pair.b1.shifted_coefficients(metric, &p.x, &zeta, shift), pair.b1.order as i32),
        (pair.b2.shifted_coefficients(metric, &p.x, &zeta, shift), pair.b2.order as i32),
    ];
    let mut kappa = vec![C64::new(1.0, 0.0)];
    for r in &conf.upper_roots {
        kappa = poly_mul(&kappa, &[-r, C64::new(1.0, 0.0)]);
    }
    let m_plus = conf.upper_roots.len();
    for l in 0..=(3 - m_plus) {
        let mut row = [C64::new(0.0, 0.0); 4];
        for (i, c) in kappa.iter().enumerate() {
            row[i + l] = *c;
        }
        out.push((row, (m_plus + l) as i32));
    }
    Ok(out)
}

/// Unweighted coefficient matrix `M(ϱ')`, one row per polynomial.
pub fn coefficient_matrix(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<DMatrix<C64>> {
    let r = rows(pair, metric, w, p, classify_tol)?;
    Ok(DMatrix::from_fn(r.len(), 4, |i, j| r[i].0[j]))
}

/// Dilation invariant version of [`coefficient_matrix`].
pub fn weighted_coefficient_matrix(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<DMatrix<C64>> {
    let r = rows(pair, metric, w, p, classify_tol)?;
    let lam = p.lambda();
    Ok(DMatrix::from_fn(r.len(), 4, |i, l| r[i].0[l] * lam.powi(l as i32 - r[i].1)))
}

fn singular_values(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<Vec<f64>> {
    let m = weighted_coefficient_matrix(pair, metric, w, p, classify_tol)?;
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Numerical rank of the weighted coefficient matrix.
pub fn ls_rank_oracle(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<usize> {
    Ok(singular_values(pair, metric, w, p, classify_tol)?.iter().filter(|s| **s > RANK_TOL).count())
}

/// Smallest eigenvalue of `M*M` for the weighted matrix, i.e. `σ_min(M)²`.
pub fn positivity_margin(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<f64> {
    let s = singular_values(pair, metric, w, p, classify_tol)?;
    Ok(s.get(3).copied().unwrap_or(0.0).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ls_checker::{catalog_bc, CatalogParams};
    use crate::symbol_core::CLASSIFY_TOL;

    fn unconj() -> (WeightJet, TangentialPoint) {
        (WeightJet::linear(vec![0.0], 1.0), TangentialPoint::new(vec![0.0; 2], vec![1.3], 0.0, 0.0))
    }

    #[test]
    fn clamped_has_full_rank() {
        let pair = catalog_bc("clamped", &CatalogParams::default()).unwrap();
        let (w, p) = unconj();
        let m = coefficient_matrix(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap();
        assert_eq!(m.nrows(), 4);
        assert_eq!(ls_rank_oracle(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap(), 4);
        assert!(positivity_margin(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap() > 1e-4);
    }

    #[test]
    fn degenerate_pair_loses_rank() {
        let pair = catalog_bc("degenerate_equal", &CatalogParams::default()).unwrap();
        let (w, p) = unconj();
        assert!(ls_rank_oracle(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap() <= 3);
        assert!(positivity_margin(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap() < 1e-20);
    }

    #[test]
    fn weighted_matrix_is_dilation_invariant() {
        let pair = catalog_bc("hinged", &CatalogParams::default()).unwrap();
        let w = WeightJet::linear(vec![0.3, -0.2], 1.0);
        let p = TangentialPoint::new(vec![0.0; 3], vec![0.7, 0.4], 0.6, 0.2);
        let a = weighted_coefficient_matrix(&pair, &Metric::Euclidean, &w, &p, CLASSIFY_TOL).unwrap();
        let b = weighted_coefficient_matrix(&pair, &Metric::Euclidean, &w, &p.dilate(7.5), CLASSIFY_TOL).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
