//! Catalog of boundary pairs for the bi-Laplacian.
//!
//! | name          | B1                | B2                  |
//! |---------------|-------------------|---------------------|
//! | hinged        | u                 | ∂_n² u              |
//! | clamped       | u                 | ∂_n u               |
//! | neumann_pair  | ∂_n u             | ∂_n Δ u             |
//! | ex2_dn2_dn3   | ∂_n² u + 2Δ' u    | ∂_n³ u              |
//! | ex3_dn_dn3_A  | ∂_n u             | ∂_n³ u + A u        |
//! | ex4_id_dn2_A  | u                 | ∂_n² u + A ∂_n u    |
//! | ex5_dn2A_dn3  | ∂_n² u + A ∂_n u  | ∂_n³ u + 2∂_n Δ' u  |
//!
//! `A` has principal symbol `a'(x, ξ')` of degree 3 (ex3) or 1 (ex4, ex5).
//! `degenerate_equal` is a test fixture with `B1 = B2 = u`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::symbol::{complexify, BoundaryOperatorSymbol, TangentialPoly};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::sampling::unit_sphere;
use crate::C64;

pub const CATALOG: [&str; 7] =
    ["hinged", "clamped", "neumann_pair", "ex2_dn2_dn3", "ex3_dn_dn3_A", "ex4_id_dn2_A", "ex5_dn2A_dn3"];

/// Names accepted by [`catalog_bc`], including test fixtures.
pub const ALL_NAMES: [&str; 8] = [
    "hinged",
    "clamped",
    "neumann_pair",
    "ex2_dn2_dn3",
    "ex3_dn_dn3_A",
    "ex4_id_dn2_A",
    "ex5_dn2A_dn3",
    "degenerate_equal",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    pub name: String,
    pub b1: BoundaryOperatorSymbol,
    pub b2: BoundaryOperatorSymbol,
}

impl BoundaryPair {
    /// `k1 + k2 - 1`, the homogeneity degree of the LS determinant.
    pub fn det_degree(&self) -> i32 {
        self.b1.order as i32 + self.b2.order as i32 - 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    /// Principal symbol of the lower order operator `A`.
    pub a_prime: Option<TangentialPoly>,
    /// Tangential dimension for the admissibility sampling.
    pub tangential_dim: usize,
    /// Metric used for admissibility sampling.
    pub metric: Metric,
}

impl CatalogParams {
    /// `a'(ξ') = a·|ξ'|^p` with `p` the degree required by `name`.
    pub fn scalar(name: &str, a: f64, tangential_dim: usize) -> Self {
        let p = a_prime_degree(name).unwrap_or(0);
        Self {
            a_prime: Some(TangentialPoly::metric_power(p, C64::new(a, 0.0))),
            tangential_dim,
            metric: Metric::Euclidean,
        }
    }
}

/// Degree of `a'` for the parameterized families.
pub fn a_prime_degree(name: &str) -> Option<u32> {
    match name {
        "ex3_dn_dn3_A" => Some(3),
        "ex4_id_dn2_A" | "ex5_dn2A_dn3" => Some(1),
        _ => None,
    }
}

/// Forbidden value of `a'` on the unit sphere.
pub fn a_prime_forbidden(name: &str) -> Option<f64> {
    match name {
        "ex3_dn_dn3_A" => Some(2.0),
        "ex4_id_dn2_A" => Some(-2.0),
        "ex5_dn2A_dn3" => Some(-1.5),
        _ => None,
    }
}

/// Closed-form LS determinant at `|ω'| = 1` with `a = a'(ω')`.
pub fn closed_form_det_unit(name: &str, a: C64) -> Option<C64> {
    let i = C64::new(0.0, 1.0);
    Some(match name {
        "hinged" => -2.0 * i,
        "clamped" => -i,
        "neumann_pair" => -2.0 * i,
        "ex2_dn2_dn3" => 5.0 * i,
        "ex3_dn_dn3_A" => i * (a - 2.0),
        "ex4_id_dn2_A" => -i * (a + 2.0),
        "ex5_dn2A_dn3" => -i * (2.0 * a + 3.0),
        _ => return None,
    })
}

const ADMISSIBILITY_SAMPLES: usize = 512;
const ADMISSIBILITY_TOL: f64 = 1e-8;

/// Catalog pair with admissibility of `a'` checked on sampled unit covectors.
pub fn catalog_bc(name: &str, params: &CatalogParams) -> Result<BoundaryPair> {
    let pair = catalog_bc_unchecked(name, params)?;
    if let (Some(forbidden), Some(a)) = (a_prime_forbidden(name), params.a_prime.as_ref()) {
        check_admissible(name, a, forbidden, params)?;
    }
    Ok(pair)
}

fn check_admissible(name: &str, a: &TangentialPoly, forbidden: f64, params: &CatalogParams) -> Result<()> {
    let dim = params.tangential_dim;
    if dim == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut dirs: Vec<Vec<f64>> = (0..ADMISSIBILITY_SAMPLES).map(|_| unit_sphere(&mut rng, dim)).collect();
    if dim == 1 {
        dirs = vec![vec![1.0], vec![-1.0]];
    }
    let mut sign = None;
    for w in dirs {
        let x = vec![0.0; dim + 1];
        let norm = params.metric.quad(&x, &w).sqrt();
        let unit: Vec<f64> = w.iter().map(|v| v / norm).collect();
        let f = a.eval(&params.metric, &x, &complexify(&unit)) - forbidden;
        if f.norm() <= ADMISSIBILITY_TOL {
            return Err(Error::Inadmissible(format!("{name}: a' equals {forbidden} at omega' = {unit:?}")));
        }
        // a real-valued a' on a connected sphere cannot cross the forbidden value
        if dim >= 2 && f.im.abs() <= ADMISSIBILITY_TOL {
            let s = f.re > 0.0;
            if *sign.get_or_insert(s) != s {
                return Err(Error::Inadmissible(format!("{name}: a' - {forbidden} changes sign on the unit sphere")));
            }
        }
    }
    Ok(())
}

/// Catalog pair without the admissibility check; used to reach the
/// excluded equality cases.
pub fn catalog_bc_unchecked(name: &str, params: &CatalogParams) -> Result<BoundaryPair> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let zero = TangentialPoly::default;
    let c = TangentialPoly::constant;
    let r = |p: u32, k: C64| TangentialPoly::metric_power(p, k);
    let need_a = |deg: u32| -> Result<TangentialPoly> {
        let a = params
            .a_prime
            .clone()
            .ok_or_else(|| Error::InvalidInput(format!("{name} needs the parameter a'")))?;
        if a.0.iter().any(|t| t.degree() != deg) {
            return Err(Error::InvalidInput(format!("{name}: a' must be homogeneous of degree {deg}")));
        }
        Ok(a)
    };
    let (b1, b2) = match name {
        "hinged" => (
            BoundaryOperatorSymbol::new(0, vec![c(one)])?,
            BoundaryOperatorSymbol::new(2, vec![zero(), zero(), c(-one)])?,
        ),
        "clamped" => (
            BoundaryOperatorSymbol::new(0, vec![c(one)])?,
            BoundaryOperatorSymbol::new(1, vec![zero(), c(-i)])?,
        ),
        "neumann_pair" => (
            BoundaryOperatorSymbol::new(1, vec![zero(), c(-i)])?,
            BoundaryOperatorSymbol::new(3, vec![zero(), r(2, i), zero(), c(i)])?,
        ),
        "ex2_dn2_dn3" => (
            BoundaryOperatorSymbol::new(2, vec![r(2, -2.0 * one), zero(), c(-one)])?,
            BoundaryOperatorSymbol::new(3, vec![zero(), zero(), zero(), c(i)])?,
        ),
        "ex3_dn_dn3_A" => {
            let a = need_a(3)?;
            (
                BoundaryOperatorSymbol::new(1, vec![zero(), c(-i)])?,
                BoundaryOperatorSymbol::new(3, vec![a, zero(), zero(), c(i)])?,
            )
        }
        "ex4_id_dn2_A" => {
            let a = need_a(1)?;
            (
                BoundaryOperatorSymbol::new(0, vec![c(one)])?,
                BoundaryOperatorSymbol::new(2, vec![zero(), a.scaled(-i), c(-one)])?,
            )
        }
        "ex5_dn2A_dn3" => {
            let a = need_a(1)?;
            (
                BoundaryOperatorSymbol::new(2, vec![zero(), a.scaled(-i), c(-one)])?,
                BoundaryOperatorSymbol::new(3, vec![zero(), r(2, 2.0 * i), zero(), c(i)])?,
            )
        }
        "degenerate_equal" => (
            BoundaryOperatorSymbol::new(0, vec![c(one)])?,
            BoundaryOperatorSymbol::new(0, vec![c(one)])?,
        ),
        other => return Err(Error::UnknownBoundaryPair(other.to_string())),
    };
    Ok(BoundaryPair { name: name.to_string(), b1, b2 })
}
