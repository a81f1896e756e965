//! Empirical radii: stability of the LS determinants under complex
//! perturbation, and the weight/spectral ratios under which the conjugated
//! condition survives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::BoundaryPair;
use super::symbol::complexify;
use super::{derivative_determinant, ls_conjugated, ls_unconjugated, Verdict, MARGIN_TOL};
use crate::error::{invalid, Result};
use crate::metric::Metric;
use crate::sampling::{unit_ball, unit_sphere};
use crate::symbol_core::{TangentialPoint, WeightJet, CLASSIFY_TOL};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    /// Half the unperturbed normalized determinant.
    pub c1: f64,
    pub samples: usize,
    pub warning: Option<String>,
}

/// Unit perturbation `(ζ', δ, δ̃)` with `|ζ'| + |δ| + |δ̃| ≤ 1`.
struct Perturbation {
    zeta: Vec<C64>,
    delta: C64,
    delta_t: C64,
}

fn draw(rng: &mut ChaCha8Rng, dim: usize) -> Perturbation {
    let v = unit_sphere(rng, 2 * dim + 4);
    let zeta: Vec<C64> = (0..dim).map(|k| C64::new(v[2 * k], v[2 * k + 1])).collect();
    let delta = C64::new(v[2 * dim], v[2 * dim + 1]);
    let delta_t = C64::new(v[2 * dim + 2], v[2 * dim + 3]);
    let total = zeta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + delta.norm() + delta_t.norm();
    // half of the draws sit on the outer shell
    let s = if rng.gen_bool(0.5) { 1.0 } else { rng.gen::<f64>() };
    let k = s / total;
    Perturbation { zeta: zeta.into_iter().map(|z| z * k).collect(), delta: delta * k, delta_t: delta_t * k }
}

/// Largest `ε` (bisected in `[0, 1]`) such that both perturbed determinant
/// bounds hold with `C1` equal to half the unperturbed margin.
pub fn perturbation_margin(
    pair: &BoundaryPair,
    metric: &Metric,
    x: &[f64],
    xi_prime: &[f64],
    sample_budget: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    let base = ls_unconjugated(pair, metric, x, xi_prime)?;
    if base.normalized_margin <= MARGIN_TOL {
        return Ok(PerturbationReport {
            epsilon: 0.0,
            c1: 0.0,
            samples: 0,
            warning: Some("unperturbed LS margin below tolerance".into()),
        });
    }
    let c1 = 0.5 * base.normalized_margin;
    let rho = metric.quad(x, xi_prime).sqrt();
    let deg = pair.det_degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Perturbation> = (0..sample_budget).map(|_| draw(&mut rng, xi_prime.len())).collect();
    let xi = complexify(xi_prime);
    let root = C64::new(0.0, rho);

    let ok = |eps: f64| -> bool {
        let s = eps * rho;
        draws.par_iter().all(|d| {
            let zeta: Vec<C64> = xi.iter().zip(&d.zeta).map(|(a, b)| a + b * s).collect();
            let (z1, z2) = (root + d.delta * s, root + d.delta_t * s);
            let first = derivative_determinant(pair, metric, x, &zeta, z1).norm();
            if first < c1 * rho.powi(deg) {
                return false;
            }
            let b11 = pair.b1.eval(metric, x, &zeta, z1);
            let b21 = pair.b2.eval(metric, x, &zeta, z1);
            let b12 = pair.b1.eval(metric, x, &zeta, z2);
            let b22 = pair.b2.eval(metric, x, &zeta, z2);
            (b11 * b22 - b21 * b12).norm() >= c1 * (z1 - z2).norm() * rho.powi(deg)
        })
    };

    let (mut lo, mut hi) = (0.0, 1.0);
    if ok(hi) {
        lo = hi;
    } else {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(PerturbationReport { epsilon: lo, c1, samples: sample_budget, warning: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mu0: f64,
    pub mu1: f64,
    pub samples_per_point: usize,
    /// Conjugated samples skipped as marginal.
    pub skipped_marginal: usize,
}

/// Samples `ϱ'` above each base point with `∂_dφ = 1`,
/// `|d'φ| ≤ μ0` and `σ ≤ μ1 τ`.
fn conjugated_ok(
    pair: &BoundaryPair,
    metric: &Metric,
    base: &[TangentialPoint],
    mu0: f64,
    mu1: f64,
    per_point: usize,
    seed: u64,
) -> Result<(bool, usize)> {
    let results: Vec<Result<(bool, usize)>> = base
        .par_iter()
        .enumerate()
        .map(|(idx, b)| {
            let dim = b.xi_prime.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut skipped = 0;
            for _ in 0..per_point {
                let grad: Vec<f64> = unit_ball(&mut rng, dim).into_iter().map(|v| v * mu0).collect();
                let w = WeightJet::linear(grad, 1.0);
                let dir = unit_sphere(&mut rng, dim + 1);
                let tau = dir[dim].abs();
                let xi: Vec<f64> = dir[..dim].to_vec();
                let sigma = rng.gen::<f64>() * mu1 * tau;
                let p = TangentialPoint::new(b.x.clone(), xi, tau, sigma);
                if p.lambda() == 0.0 {
                    continue;
                }
                match ls_conjugated(pair, metric, &w, &p, CLASSIFY_TOL)?.verdict {
                    Verdict::Holds => {}
                    Verdict::Fails => return Ok((false, skipped)),
                    Verdict::Indeterminate => skipped += 1,
                }
            }
            Ok((true, skipped))
        })
        .collect();
    let mut skipped = 0;
    for r in results {
        let (ok, s) = r?;
        skipped += s;
        if !ok {
            return Ok((false, skipped));
        }
    }
    Ok((true, skipped))
}

/// Largest `(μ0, μ1)` on `kappa_grid` such that the conjugated condition
/// holds on every sample. `μ0` is chosen first with `μ1` at the smallest
/// grid value, then `μ1` is pushed as far as the grid allows.
pub fn conjugation_thresholds(
    pair: &BoundaryPair,
    metric: &Metric,
    boundary_sample: &[TangentialPoint],
    kappa_grid: &[f64],
    per_point: usize,
    seed: u64,
) -> Result<ThresholdReport> {
    if boundary_sample.is_empty() {
        return invalid("empty boundary sample");
    }
    let mut grid: Vec<f64> = kappa_grid.iter().copied().filter(|k| *k > 0.0).collect();
    if grid.is_empty() {
        return invalid("kappa grid has no positive value");
    }
    grid.sort_by(f64::total_cmp);
    let zero = ThresholdReport { mu0: 0.0, mu1: 0.0, samples_per_point: per_point, skipped_marginal: 0 };
    for b in boundary_sample {
        if b.xi_prime.iter().any(|v| *v != 0.0) && !ls_unconjugated(pair, metric, &b.x, &b.xi_prime)?.verdict.holds() {
            return Ok(zero);
        }
    }
    let mut skipped = 0;
    let mut mu0 = 0.0;
    for &m0 in &grid {
        let (ok, s) = conjugated_ok(pair, metric, boundary_sample, m0, grid[0], per_point, seed)?;
        skipped += s;
        if !ok {
            break;
        }
        mu0 = m0;
    }
    if mu0 == 0.0 {
        return Ok(ThresholdReport { skipped_marginal: skipped, ..zero });
    }
    let mut mu1 = 0.0;
    for &m1 in &grid {
        let (ok, s) = conjugated_ok(pair, metric, boundary_sample, mu0, m1, per_point, seed)?;
        skipped += s;
        if !ok {
            break;
        }
        mu1 = m1;
    }
    Ok(ThresholdReport { mu0, mu1, samples_per_point: per_point, skipped_marginal: skipped })
}
