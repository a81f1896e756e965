//! Poisson brackets of phase-space functions given by their first
//! derivatives, and the jets of `q_s`, `q_a`.

use nalgebra::DVector;

use super::WeightField;
use crate::metric::Metric;

/// First derivatives of a function of `(x, ξ)` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseJet {
    pub value: f64,
    pub dx: Vec<f64>,
    pub dxi: Vec<f64>,
}

/// `{f, g} = Σ_j ∂_{ξ_j} f ∂_{x_j} g - ∂_{x_j} f ∂_{ξ_j} g`.
pub fn poisson_bracket(f: &PhaseJet, g: &PhaseJet) -> f64 {
    (0..f.dx.len()).map(|j| f.dxi[j] * g.dx[j] - f.dx[j] * g.dxi[j]).sum()
}

/// `q_s = |ξ|² - τ²|dφ|² + (-1)^j σ²` and `q_a = 2τ ⟨ξ, dφ⟩`, both in the
/// metric `g^{ij}(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QJets {
    pub qs: PhaseJet,
    pub qa: PhaseJet,
}

pub fn q_jets(wf: &WeightField, metric: &Metric, x: &[f64], xi: &[f64], tau: f64, sigma: f64, j: u8) -> QJets {
    let d = x.len();
    let pj = wf.phi_jet(x);
    let g = metric.inverse_at(x, d);
    let xi_v = DVector::from_column_slice(xi);
    let dphi = &pj.grad;
    let g_xi = &g * &xi_v;
    let g_dphi = &g * dphi;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let qs_val = xi_v.dot(&g_xi) - tau * tau * dphi.dot(&g_dphi) + sign * sigma * sigma;
    let qa_val = 2.0 * tau * xi_v.dot(&g_dphi);
    let mut qs_dx = vec![0.0; d];
    let mut qa_dx = vec![0.0; d];
    for k in 0..d {
        let dg = metric.inverse_derivative(x, d, k);
        let h_k = pj.hessian.column(k);
        qs_dx[k] = xi_v.dot(&(&dg * &xi_v)) - tau * tau * (dphi.dot(&(&dg * dphi)) + 2.0 * h_k.dot(&g_dphi));
        qa_dx[k] = 2.0 * tau * (xi_v.dot(&(&dg * dphi)) + g_xi.dot(&h_k));
    }
    QJets {
        qs: PhaseJet { value: qs_val, dx: qs_dx, dxi: (g_xi * 2.0).iter().copied().collect() },
        qa: PhaseJet { value: qa_val, dx: qa_dx, dxi: (g_dphi * (2.0 * tau)).iter().copied().collect() },
    }
}
