//! Eigenpairs, the `H^k_B` scale and the kernel.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::DiscretePlateOperator;
use crate::error::{invalid, Result};

/// Lowest eigenpairs of an operator; immutable once built.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralScale {
    pub values: Vec<f64>,
    /// Columns orthonormal for `⟨u, v⟩ = h^d Σ u v`.
    pub vectors: DMatrix<f64>,
    pub cell: f64,
    /// Number of unknowns; the scale is complete when it equals `values.len()`.
    pub size: usize,
}

impl SpectralScale {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn is_complete(&self) -> bool {
        self.count() == self.size
    }

    pub fn mode(&self, j: usize) -> DVector<f64> {
        self.vectors.column(j).into_owned()
    }

    /// The lowest `count` pairs.
    pub fn truncated(&self, count: usize) -> Self {
        let count = count.min(self.count());
        Self {
            values: self.values[..count].to_vec(),
            vectors: self.vectors.columns(0, count).into_owned(),
            cell: self.cell,
            size: self.size,
        }
    }

    /// `u_j = ⟨u, φ_j⟩`.
    pub fn coefficients(&self, u: &DVector<f64>) -> DVector<f64> {
        self.vectors.tr_mul(u) * self.cell
    }

    /// `max |⟨φ_i, φ_j⟩ - δ_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.vectors.tr_mul(&self.vectors) * self.cell;
        (g - DMatrix::identity(self.count(), self.count())).amax()
    }
}

pub fn spectrum(op: &DiscretePlateOperator, count: usize) -> Result<SpectralScale> {
    let size = op.size();
    if count == 0 || count > size {
        return invalid(format!("requested {count} eigenpairs from a matrix of size {size}"));
    }
    let eig = op.symmetric_part().symmetric_eigen();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    order.truncate(count);
    let scale = op.cell.sqrt().recip();
    let mut vectors = DMatrix::zeros(size, count);
    for (c, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        // fix the sign so that the largest entry is positive
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(c, &(v * scale));
    }
    Ok(SpectralScale { values: order.iter().map(|k| eig.eigenvalues[*k]).collect(), vectors, cell: op.cell, size })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HkbNorm {
    pub value: f64,
    /// `(‖u‖² - Σ u_j²)/‖u‖²`, the part of `u` outside the computed modes.
    pub tail_mass: f64,
    pub truncated: bool,
}

pub const TAIL_TOL: f64 = 1e-10;

/// `(Σ (1 + μ_j)^{k/2} u_j²)^{1/2}` over the computed modes. Negative
/// round-off eigenvalues are clamped to zero.
pub fn hkb_norm(u: &DVector<f64>, k: f64, scale: &SpectralScale) -> HkbNorm {
    let c = scale.coefficients(u);
    let total = scale.cell * u.norm_squared();
    let mut captured = 0.0;
    let mut s = 0.0;
    for (j, cj) in c.iter().enumerate() {
        let mu = scale.values[j].max(0.0);
        captured += cj * cj;
        s += (1.0 + mu).powf(0.5 * k) * cj * cj;
    }
    let tail_mass = if total > 0.0 { ((total - captured) / total).max(0.0) } else { 0.0 };
    HkbNorm { value: s.sqrt(), tail_mass, truncated: tail_mass > TAIL_TOL }
}

pub const KERNEL_TOL: f64 = 1e-8;
/// Number of eigenpairs used for kernel detection when the whole spectrum
/// is available; the reference eigenvalue is then a low one.
pub const KERNEL_COUNT: usize = 10;

/// Eigenvectors with `μ_j ≤ tol·μ_ref`, `μ_ref` the `⌈count/2⌉`-th
/// eigenvalue counted from zero (the last one when `count ≤ 2`).
pub fn kernel(scale: &SpectralScale, tol: f64) -> Vec<DVector<f64>> {
    let n = scale.count();
    let r = n.div_ceil(2).min(n - 1);
    let reference = scale.values[r].abs();
    (0..n).filter(|j| scale.values[*j] <= tol * reference).map(|j| scale.mode(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plate_discrete::{assemble, Grid, PlateMetric};
    use std::f64::consts::PI;

    fn op(bc: &str, n: usize) -> DiscretePlateOperator {
        assemble(&Grid::interval(1.0, n).unwrap(), bc, &PlateMetric::Identity, 0.0).unwrap()
    }

    #[test]
    fn hinged_beam_eigenvalues() {
        let s = spectrum(&op("hinged", 200), 5).unwrap();
        for (k, mu) in s.values.iter().enumerate() {
            let exact = ((k + 1) as f64 * PI).powi(4);
            assert!((mu - exact).abs() / exact < 5e-3, "k={k} {mu} {exact}");
        }
        assert!(s.gram_deviation() <= 1e-10);
    }

    #[test]
    fn neumann_kernel_is_constants() {
        let o = op("neumann_pair", 60);
        let s = spectrum(&o, 6).unwrap();
        assert!(s.values[0].abs() <= 1e-8 * s.values[1]);
        let ker = kernel(&s, KERNEL_TOL);
        assert_eq!(ker.len(), 1);
        let nodal = o.to_nodal(&ker[0]);
        let c = nodal[0];
        assert!(nodal.iter().all(|v| (v - c).abs() <= 1e-8 * c.abs()));
        assert!(kernel(&spectrum(&op("clamped", 60), 6).unwrap(), KERNEL_TOL).is_empty());
    }

    #[test]
    fn hkb_norm_single_mode_and_l2() {
        let o = op("clamped", 40);
        let s = spectrum(&o, o.size()).unwrap();
        let phi = s.mode(2);
        let n = hkb_norm(&phi, 2.0, &s);
        assert!((n.value - (1.0 + s.values[2]).powf(0.5)).abs() <= 1e-10 * n.value);
        let u = o.from_nodal(|x| x[0].sin() + x[0] * x[0]);
        let h0 = hkb_norm(&u, 0.0, &s);
        assert!((h0.value - o.norm(&u)).abs() <= 1e-10 * o.norm(&u));
        assert!(!h0.truncated);
        let partial = spectrum(&o, 3).unwrap();
        assert!(hkb_norm(&u, 0.0, &partial).truncated);
    }

    #[test]
    fn count_is_checked() {
        let o = op("hinged", 10);
        assert!(spectrum(&o, 0).is_err());
        assert!(spectrum(&o, 9).is_err());
        assert!(spectrum(&o, 8).is_ok());
    }
}
