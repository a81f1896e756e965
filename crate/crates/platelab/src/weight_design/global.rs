//! Global weight on an interval or a rectangle: `ψ = 0` on the boundary,
//! `ψ > 0` inside, `∂_ν ψ < 0` on the boundary and `dψ ≠ 0` away from an
//! interior exclusion set.
//!
//! Each axis carries a bump `s(1 - s)e^{κs}` whose only critical point is
//! the center of the exclusion set; the rectangle uses their product. On the
//! rectangle `∂_ν ψ` degenerates at the corners, which the grid verification
//! skips.

use serde::{Deserialize, Serialize};

use super::{Combine, Psi, Psi1d, WeightField};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            Domain::Rectangle { lo, hi } => (lo.to_vec(), hi.to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExclusionSet {
    Interval { lo: f64, hi: f64 },
    Disc { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl ExclusionSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ExclusionSet::Interval { lo, hi } => x[0] > *lo && x[0] < *hi,
            ExclusionSet::Disc { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < radius * radius
            }
            ExclusionSet::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v > a && v < b),
        }
    }

    fn center(&self) -> Vec<f64> {
        match self {
            ExclusionSet::Interval { lo, hi } => vec![0.5 * (lo + hi)],
            ExclusionSet::Disc { center, .. } => center.clone(),
            ExclusionSet::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            ExclusionSet::Interval { lo, hi } => !(hi > lo),
            ExclusionSet::Disc { radius, .. } => !(*radius > 0.0),
            ExclusionSet::Box { lo, hi } => lo.iter().zip(hi).any(|(a, b)| !(b > a)),
        }
    }

    /// Per-axis extent of the closure.
    fn extent(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ExclusionSet::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            ExclusionSet::Disc { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            ExclusionSet::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalWeightReport {
    pub weight: WeightField,
    /// `min -∂_ν ψ` over boundary grid nodes (corners excluded).
    pub c0: f64,
    /// `min |dψ|` over interior grid nodes outside the exclusion set.
    pub min_grad_outside: f64,
    pub max_boundary_value: f64,
    pub min_interior_value: f64,
    pub grid_n: usize,
}

const VERIFY_N: usize = 201;

pub fn build_global_weight(domain: &Domain, o0: &ExclusionSet) -> Result<GlobalWeightReport> {
    if o0.is_empty() {
        return invalid("exclusion set is empty");
    }
    let (lo, hi) = domain.bounds();
    let (elo, ehi) = o0.extent();
    if elo.len() != lo.len() {
        return invalid("exclusion set and domain have different dimensions");
    }
    if lo.iter().zip(&elo).any(|(a, b)| b <= a) || hi.iter().zip(&ehi).any(|(a, b)| b >= a) {
        return invalid("exclusion set touches the boundary");
    }
    let c = o0.center();
    let factors: Vec<Psi1d> = (0..lo.len()).map(|k| Psi1d::bump_with_peak(lo[k], hi[k], c[k])).collect();
    let weight = WeightField::new(Psi { factors, combine: Combine::Product }, 1.0)?;
    verify(domain, o0, weight)
}

fn verify(domain: &Domain, o0: &ExclusionSet, weight: WeightField) -> Result<GlobalWeightReport> {
    let (lo, hi) = domain.bounds();
    let d = lo.len();
    let n = VERIFY_N;
    let at = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64;
    let mut c0 = f64::INFINITY;
    let mut min_grad = f64::INFINITY;
    let mut max_bnd: f64 = 0.0;
    let mut min_int = f64::INFINITY;
    let total = n.pow(d as u32);
    for idx in 0..total {
        let ii: Vec<usize> = (0..d).map(|k| (idx / n.pow(k as u32)) % n).collect();
        let x: Vec<f64> = ii.iter().enumerate().map(|(k, i)| at(k, *i)).collect();
        let on_edge: Vec<usize> = (0..d).filter(|k| ii[*k] == 0 || ii[*k] == n - 1).collect();
        let (v, g, _) = weight.psi.jet(&x);
        if on_edge.is_empty() {
            min_int = min_int.min(v);
            if !o0.contains(&x) {
                min_grad = min_grad.min(g.norm());
            }
            continue;
        }
        max_bnd = max_bnd.max(v.abs());
        if on_edge.len() == 1 {
            let k = on_edge[0];
            let outward = if ii[k] == 0 { -1.0 } else { 1.0 };
            c0 = c0.min(-outward * g[k]);
        }
    }
    let ok = c0 > 0.0 && min_grad > 0.0 && max_bnd <= 1e-12 && min_int > 0.0;
    if !ok {
        return Err(Error::SearchFailed(format!(
            "weight verification failed: c0 = {c0:e}, min |dpsi| = {min_grad:e}, max |psi| on boundary = {max_bnd:e}, min interior psi = {min_int:e}"
        )));
    }
    Ok(GlobalWeightReport {
        weight,
        c0,
        min_grad_outside: min_grad,
        max_boundary_value: max_bnd,
        min_interior_value: min_int,
        grid_n: n,
    })
}
