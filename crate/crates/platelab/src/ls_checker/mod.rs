//! Lopatinskiĭ–Šapiro checks for `(Δ², B1, B2)`.
//!
//! Without weight the condition is the nonvanishing of
//! `det [[b1, b2], [∂b1, ∂b2]]` at `ξ_d = i|ω'|`. With a weight the boundary
//! symbols are conjugated, `b_φ(ξ', ξ_d) = b(ξ' + iτd'φ, ξ_d + iτ∂_dφ)`, and
//! the test depends on how many roots of the conjugated quartic sit in the
//! closed upper half-plane.

mod catalog;
mod oracle;
mod parse;
mod search;
mod symbol;

pub use catalog::{
    a_prime_degree, a_prime_forbidden, catalog_bc, catalog_bc_unchecked, closed_form_det_unit, BoundaryPair,
    CatalogParams, ALL_NAMES, CATALOG,
};
pub use oracle::{coefficient_matrix, ls_rank_oracle, positivity_margin, weighted_coefficient_matrix, RANK_TOL};
pub use parse::{parse_boundary_pair, write_boundary_pair};
pub use search::{conjugation_thresholds, perturbation_margin, PerturbationReport, ThresholdReport};
pub use symbol::{complexify, BoundaryOperatorSymbol, TangentialPoly, TangentialTerm};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::Metric;
use crate::symbol_core::{classify_roots, CaseTag, TangentialPoint, WeightJet};
use crate::C64;

/// Default margin tolerance on normalized determinants.
pub const MARGIN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    /// Root classification was marginal; no verdict is issued.
    Indeterminate,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsReport {
    pub verdict: Verdict,
    pub case_tag: CaseTag,
    /// Determinant used by the case test; `None` when no root is upper.
    pub determinant: Option<C64>,
    pub normalized_margin: f64,
    pub marginal: bool,
    /// One upper root: the 2×2 derivative determinant at that root.
    pub auxiliary_determinant: Option<C64>,
}

fn decide(margin: f64, tol: f64) -> Verdict {
    if margin > tol {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

/// `det [[b1, b2], [∂b1, ∂b2]]` at `(ζ', ξ_d)`.
pub fn derivative_determinant(pair: &BoundaryPair, metric: &Metric, x: &[f64], zeta: &[C64], xi_d: C64) -> C64 {
    let (b1, d1) = pair.b1.eval_with_derivative(metric, x, zeta, xi_d);
    let (b2, d2) = pair.b2.eval_with_derivative(metric, x, zeta, xi_d);
    b1 * d2 - b2 * d1
}

/// Unconjugated check at `(x, ω')`.
pub fn ls_unconjugated(pair: &BoundaryPair, metric: &Metric, x: &[f64], omega: &[f64]) -> Result<LsReport> {
    let rho = metric.quad(x, omega).sqrt();
    if !(rho > 0.0) {
        return invalid("undefined: LS is posed only for omega' != 0");
    }
    let det = derivative_determinant(pair, metric, x, &complexify(omega), C64::new(0.0, rho));
    let margin = det.norm() / rho.powi(pair.det_degree());
    Ok(LsReport {
        verdict: decide(margin, MARGIN_TOL),
        case_tag: CaseTag::DoubleUpperRoot,
        determinant: Some(det),
        normalized_margin: margin,
        marginal: false,
        auxiliary_determinant: None,
    })
}

/// Conjugated boundary symbols evaluated at a complex `ξ_d`.
pub(crate) fn conjugated_values(
    pair: &BoundaryPair,
    metric: &Metric,
    p: &TangentialPoint,
    w: &WeightJet,
    xi_d: C64,
) -> ((C64, C64), (C64, C64)) {
    let zeta = conjugated_zeta(p, w);
    let z = xi_d + C64::new(0.0, p.tau * w.d_normal);
    (
        pair.b1.eval_with_derivative(metric, &p.x, &zeta, z),
        pair.b2.eval_with_derivative(metric, &p.x, &zeta, z),
    )
}

/// `ξ' + iτ d'φ`.
pub(crate) fn conjugated_zeta(p: &TangentialPoint, w: &WeightJet) -> Vec<C64> {
    p.xi_prime.iter().zip(&w.d_tangential).map(|(a, b)| C64::new(*a, p.tau * b)).collect()
}

/// Conjugated check at `ϱ' = (x, ξ', τ, σ)`.
pub fn ls_conjugated(
    pair: &BoundaryPair,
    metric: &Metric,
    w: &WeightJet,
    p: &TangentialPoint,
    classify_tol: f64,
) -> Result<LsReport> {
    if w.d_tangential.len() != p.xi_prime.len() {
        return invalid("weight jet and point have different tangential dimensions");
    }
    let conf = classify_roots(metric, p, w, classify_tol)?;
    let lam = p.lambda();
    let (k1, k2) = (pair.b1.order as i32, pair.b2.order as i32);
    let mut report = LsReport {
        verdict: Verdict::Holds,
        case_tag: conf.case_tag,
        determinant: None,
        normalized_margin: f64::INFINITY,
        marginal: conf.marginal,
        auxiliary_determinant: None,
    };
    match conf.case_tag {
        CaseTag::NoUpperRoot => {}
        CaseTag::OneUpperRoot => {
            let rho = conf.upper_roots[0];
            let ((b1, d1), (b2, d2)) = conjugated_values(pair, metric, p, w, rho);
            report.normalized_margin = (b1.norm() / lam.powi(k1)).max(b2.norm() / lam.powi(k2));
            report.determinant = Some(if b1.norm() / lam.powi(k1) >= b2.norm() / lam.powi(k2) { b1 } else { b2 });
            report.auxiliary_determinant = Some(b1 * d2 - b2 * d1);
        }
        CaseTag::TwoDistinctUpperRoots => {
            let (r1, r2) = (conf.upper_roots[0], conf.upper_roots[1]);
            let ((b11, _), (b21, _)) = conjugated_values(pair, metric, p, w, r1);
            let ((b12, _), (b22, _)) = conjugated_values(pair, metric, p, w, r2);
            let det = b11 * b22 - b21 * b12;
            report.determinant = Some(det);
            report.normalized_margin = det.norm() / ((r1 - r2).norm() * lam.powi(k1 + k2 - 1));
        }
        CaseTag::DoubleUpperRoot => {
            let rho = 0.5 * (conf.upper_roots[0] + conf.upper_roots[1]);
            let ((b1, d1), (b2, d2)) = conjugated_values(pair, metric, p, w, rho);
            let det = b1 * d2 - b2 * d1;
            report.determinant = Some(det);
            report.normalized_margin = det.norm() / lam.powi(k1 + k2 - 1);
        }
    }
    report.verdict = if conf.marginal {
        Verdict::Indeterminate
    } else {
        decide(report.normalized_margin, MARGIN_TOL)
    };
    Ok(report)
}
