//! Matrix assembly.
//!
//! Hinged and clamped use the factored form `M = Lᵀ W_a L`, where `L` maps
//! the unknowns to second differences at the nodes where `Δu` is not
//! prescribed. For hinged those are the interior nodes; for clamped the
//! boundary rows come from the mirrored ghost `u_{-1} = u_1`. With the
//! identity metric this reproduces ghost elimination in the 5-point stencil
//! (hinged is the square of the Dirichlet second difference).
//!
//! The other pairs are 1-D only and use the 5-point stencil with both ghost
//! layers expressed through the two boundary conditions.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{DiscretePlateOperator, Grid, PlateMetric};
use crate::error::{invalid, Error, Result};

pub const SUPPORTED_1D: [&str; 7] = crate::ls_checker::CATALOG;
pub const SUPPORTED_2D: [&str; 2] = ["hinged", "clamped"];

/// Default scalar coefficient for the parameterized pairs.
pub fn default_param(bc: &str) -> f64 {
    match bc {
        "ex3_dn_dn3_A" => -1.0,
        "ex4_id_dn2_A" | "ex5_dn2A_dn3" => 1.0,
        _ => 0.0,
    }
}

pub fn assemble(grid: &Grid, bc: &str, metric: &PlateMetric, param: f64) -> Result<DiscretePlateOperator> {
    if !crate::ls_checker::ALL_NAMES.contains(&bc) {
        return Err(Error::UnknownBoundaryPair(bc.to_string()));
    }
    if !param.is_finite() {
        return invalid("boundary parameter must be finite");
    }
    match (grid.dim(), metric) {
        (1, PlateMetric::Diagonal { .. }) => return invalid("diagonal metric needs a 2-D grid"),
        (2, PlateMetric::Stiffness(_)) => return invalid("stiffness profile is 1-D only, use a diagonal metric"),
        _ => {}
    }
    match bc {
        "hinged" | "clamped" => factored(grid, bc == "clamped", metric, param, bc),
        _ if grid.dim() == 2 => invalid(format!("`{bc}` is implemented on the interval only; 2-D supports hinged and clamped")),
        _ if *metric != PlateMetric::Identity => invalid(format!("`{bc}` is implemented with the identity metric only")),
        "neumann_pair" | "ex2_dn2_dn3" | "ex3_dn_dn3_A" | "ex4_id_dn2_A" | "ex5_dn2A_dn3" => ghost_1d(grid, bc, param),
        _ => invalid(format!("`{bc}` is not a symmetric pair and has no discretization")),
    }
}

fn check_positive(metric: &PlateMetric, grid: &Grid) -> Result<()> {
    let profiles = match metric {
        PlateMetric::Identity => return Ok(()),
        PlateMetric::Stiffness(a) => vec![a],
        PlateMetric::Diagonal { a1, a2 } => vec![a1, a2],
    };
    for node in 0..grid.node_count() {
        let x = grid.coords(node);
        if profiles.iter().any(|p| !(p.eval(&x) > 0.0)) {
            return invalid(format!("metric coefficient is not positive at {x:?}"));
        }
    }
    Ok(())
}

fn factored(grid: &Grid, clamped: bool, metric: &PlateMetric, param: f64, bc: &str) -> Result<DiscretePlateOperator> {
    check_positive(metric, grid)?;
    let d = grid.dim();
    let interior = |ij: &[usize]| (0..d).all(|k| ij[k] > 0 && ij[k] + 1 < grid.n[k]);
    let unknowns: Vec<usize> = (0..grid.node_count()).filter(|k| interior(&grid.multi_index(*k))).collect();
    let pos: HashMap<usize, usize> = unknowns.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let coef = |axis: usize, x: &[f64]| -> f64 {
        match metric {
            PlateMetric::Diagonal { a1, a2 } => [a1, a2][axis].eval(x),
            _ => 1.0,
        }
    };
    let stiff = |x: &[f64]| -> f64 {
        match metric {
            PlateMetric::Stiffness(a) => a.eval(x),
            _ => 1.0,
        }
    };

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut row_w: Vec<f64> = Vec::new();
    for node in 0..grid.node_count() {
        let ij = grid.multi_index(node);
        let x = grid.coords(node);
        let edges: Vec<usize> = (0..d).filter(|k| ij[*k] == 0 || ij[*k] + 1 == grid.n[*k]).collect();
        let mut row = Vec::new();
        if edges.is_empty() {
            for k in 0..d {
                let h = grid.h(k);
                let mut xm = x.clone();
                let mut xp = x.clone();
                xm[k] -= 0.5 * h;
                xp[k] += 0.5 * h;
                let (cm, cp) = (coef(k, &xm), coef(k, &xp));
                let mut nb = |off: isize, c: f64| {
                    let mut jj = ij.clone();
                    jj[k] = (jj[k] as isize + off) as usize;
                    if let Some(p) = pos.get(&grid.index(&jj)) {
                        row.push((*p, c));
                    }
                };
                nb(-1, cm / (h * h));
                nb(1, cp / (h * h));
                nb(0, -(cm + cp) / (h * h));
            }
        } else if clamped && edges.len() == 1 {
            // ghost mirror: Δu = 2 a u_1 / h² at a wall node, tangential part vanishes
            let k = edges[0];
            let h = grid.h(k);
            let inward: isize = if ij[k] == 0 { 1 } else { -1 };
            let mut jj = ij.clone();
            jj[k] = (jj[k] as isize + inward) as usize;
            let mut xh = x.clone();
            xh[k] += inward as f64 * 0.5 * h;
            row.push((pos[&grid.index(&jj)], 2.0 * coef(k, &xh) / (h * h)));
        } else {
            continue;
        }
        let trap: f64 = edges.iter().map(|_| 0.5).product();
        rows.push(row);
        row_w.push(trap * stiff(&x));
    }

    let m = unknowns.len();
    let mut lmat = DMatrix::<f64>::zeros(rows.len(), m);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row {
            lmat[(r, *c)] += v;
        }
    }
    let mut wl = lmat.clone();
    for (r, w) in row_w.iter().enumerate() {
        wl.row_mut(r).scale_mut(*w);
    }
    let matrix = lmat.transpose() * wl;
    Ok(DiscretePlateOperator {
        grid: grid.clone(),
        bc: bc.to_string(),
        param,
        metric: metric.clone(),
        weights: vec![1.0; m],
        unknowns,
        matrix,
        cell: grid.cell(),
    })
}

/// Ghost values at one end in local numbering (node 0 on the wall, node 1
/// and 2 inward): `u_{-1} = g1·(u0, u1, u2)`, `u_{-2} = g2·(u0, u1, u2)`.
struct EndRule {
    dirichlet: bool,
    g1: [f64; 3],
    g2: [f64; 3],
}

fn end_rule(bc: &str, a: f64, h: f64) -> Result<EndRule> {
    // ∂_n = -∂_s with s the inward coordinate; central differences:
    // D1 = (u1 - u_{-1})/2h, D2 = (u1 - 2u0 + u_{-1})/h², D3 = (u2 - 2u1 + 2u_{-1} - u_{-2})/2h³
    let r = match bc {
        // ∂_n u = 0, ∂_n Δu = 0
        "neumann_pair" => EndRule { dirichlet: false, g1: [0.0, 1.0, 0.0], g2: [0.0, 0.0, 1.0] },
        // u'' = 0, u''' = 0
        "ex2_dn2_dn3" => EndRule { dirichlet: false, g1: [2.0, -1.0, 0.0], g2: [4.0, -4.0, 1.0] },
        // u' = 0, -u''' + a u = 0
        "ex3_dn_dn3_A" => {
            if a > 0.0 {
                return invalid("ex3_dn_dn3_A needs a ≤ 0 for a nonnegative operator");
            }
            EndRule { dirichlet: false, g1: [0.0, 1.0, 0.0], g2: [-2.0 * a * h.powi(3), 0.0, 1.0] }
        }
        // u = 0, u'' - a u' = 0
        "ex4_id_dn2_A" => {
            if a < 0.0 {
                return invalid("ex4_id_dn2_A needs a ≥ 0 for a nonnegative operator");
            }
            EndRule { dirichlet: true, g1: [0.0, -(2.0 - a * h) / (2.0 + a * h), 0.0], g2: [0.0; 3] }
        }
        // u'' - a u' = 0, u''' = 0
        "ex5_dn2A_dn3" => {
            if a < 0.0 {
                return invalid("ex5_dn2A_dn3 needs a ≥ 0 for a nonnegative operator");
            }
            let c = 1.0 + 0.5 * a * h;
            let g1 = [2.0 / c, -(1.0 - 0.5 * a * h) / c, 0.0];
            EndRule { dirichlet: false, g1, g2: [2.0 * g1[0], -2.0 + 2.0 * g1[1], 1.0] }
        }
        _ => return Err(Error::UnknownBoundaryPair(bc.to_string())),
    };
    Ok(r)
}

fn ghost_1d(grid: &Grid, bc: &str, a: f64) -> Result<DiscretePlateOperator> {
    let n = grid.n[0];
    let h = grid.h(0);
    let rule = end_rule(bc, a, h)?;
    let first = usize::from(rule.dirichlet);
    let unknowns: Vec<usize> = (first..n - first).collect();
    let m = unknowns.len();
    let col = |node: usize| node.checked_sub(first).filter(|c| *c < m);
    let mut raw = DMatrix::<f64>::zeros(m, m);
    const STENCIL: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];
    for (r, &i) in unknowns.iter().enumerate() {
        for (s, w) in STENCIL.iter().enumerate() {
            let k = i as isize + s as isize - 2;
            // (local index on the wall, ghost coefficients, node map)
            let ghost = if k < 0 {
                Some((if k == -1 { rule.g1 } else { rule.g2 }, [0, 1, 2]))
            } else if k >= n as isize {
                Some((if k == n as isize { rule.g1 } else { rule.g2 }, [n - 1, n - 2, n - 3]))
            } else {
                None
            };
            match ghost {
                None => {
                    if let Some(c) = col(k as usize) {
                        raw[(r, c)] += w;
                    }
                }
                Some((g, nodes)) => {
                    for (gc, node) in g.iter().zip(nodes) {
                        if let Some(c) = col(node) {
                            raw[(r, c)] += w * gc;
                        }
                    }
                }
            }
        }
    }
    let weights: Vec<f64> = unknowns.iter().map(|k| if *k == 0 || *k == n - 1 { 0.5 } else { 1.0 }).collect();
    let h4 = h.powi(4);
    let matrix = DMatrix::from_fn(m, m, |i, j| weights[i].sqrt() * raw[(i, j)] / weights[j].sqrt() / h4);
    Ok(DiscretePlateOperator {
        grid: grid.clone(),
        bc: bc.to_string(),
        param: a,
        metric: PlateMetric::Identity,
        unknowns,
        weights,
        matrix,
        cell: grid.cell(),
    })
}

/// Unconstrained 5-point fourth difference. `u` holds `n + 4` samples
/// including two ghost layers on each side; returns the `n` node values.
pub fn stencil_apply_1d(u: &[f64], h: f64) -> Vec<f64> {
    let h4 = h.powi(4);
    (2..u.len() - 2).map(|i| (u[i - 2] - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + u[i + 2]) / h4).collect()
}
