//! Discrete plate operators against continuous oracles.

use std::f64::consts::PI;

use platelab::plate_discrete::{
    assemble, kernel, spectrum, stencil_apply_1d, DiscretePlateOperator, Grid, PlateMetric, KERNEL_COUNT, KERNEL_TOL,
};

/// `∫₀¹ (u'''' v - u v'''')` through the stencil with exact ghost samples,
/// trapezoid rule over the nodes.
fn discrete_green(n: usize) -> f64 {
    let h = 1.0 / (n - 1) as f64;
    let u = |x: f64| x.sin() + x * x;
    let v = |x: f64| (0.5 * x).exp();
    let samples = |f: &dyn Fn(f64) -> f64| (0..n + 4).map(|i| f((i as f64 - 2.0) * h)).collect::<Vec<_>>();
    let (us, vs) = (samples(&u), samples(&v));
    let (d4u, d4v) = (stencil_apply_1d(&us, h), stencil_apply_1d(&vs, h));
    let mut s = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += w * h * (d4u[i] * vs[i + 2] - us[i + 2] * d4v[i]);
    }
    s
}

#[test]
fn green_formula_boundary_terms() {
    // [u''' v - u'' v' + u' v'' - u v''']₀¹ for u = sin x + x², v = e^{x/2}
    let d = |x: f64| {
        let (u, u1, u2, u3) = (x.sin() + x * x, x.cos() + 2.0 * x, -x.sin() + 2.0, -x.cos());
        let e = (0.5 * x).exp();
        let (v, v1, v2, v3) = (e, 0.5 * e, 0.25 * e, 0.125 * e);
        u3 * v - u2 * v1 + u1 * v2 - u * v3
    };
    let exact = d(1.0) - d(0.0);
    let errs: Vec<f64> = [41, 81, 161].iter().map(|n| (discrete_green(*n) - exact).abs()).collect();
    assert!(errs[2] < 1e-3, "{errs:?}");
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 0.8, "{errs:?}");
    }
}

fn interval(bc: &str, n: usize) -> DiscretePlateOperator {
    assemble(&Grid::interval(1.0, n).unwrap(), bc, &PlateMetric::Identity, 0.0).unwrap()
}

#[test]
fn two_free_pieces_have_a_two_dimensional_kernel() {
    let a = interval("neumann_pair", 30);
    let op = DiscretePlateOperator::block_diagonal(&a, &a).unwrap();
    let s = spectrum(&op, op.size()).unwrap().truncated(KERNEL_COUNT);
    assert_eq!(kernel(&s, KERNEL_TOL).len(), 2);
    let one = spectrum(&a, a.size()).unwrap().truncated(KERNEL_COUNT);
    assert_eq!(kernel(&one, KERNEL_TOL).len(), 1);
}

#[test]
fn hinged_rectangle_eigenvalues() {
    let (lx, ly) = (1.0, 0.5);
    let op = assemble(&Grid::rectangle(lx, ly, 41, 21).unwrap(), "hinged", &PlateMetric::Identity, 0.0).unwrap();
    let s = spectrum(&op, 6).unwrap();
    let mut exact: Vec<f64> = (1..6)
        .flat_map(|j| (1..4).map(move |k| ((j * j) as f64 / (lx * lx) + (k * k) as f64 / (ly * ly)).powi(2) * PI.powi(4)))
        .collect();
    exact.sort_by(f64::total_cmp);
    for (mu, ex) in s.values.iter().zip(&exact) {
        assert!((mu - ex).abs() / ex < 2e-2, "{mu} {ex}");
    }
    assert!(s.gram_deviation() <= 1e-10);
}

#[test]
fn clamped_square_is_positive_and_orthonormal() {
    let op = assemble(&Grid::rectangle(1.0, 1.0, 20, 20).unwrap(), "clamped", &PlateMetric::Identity, 0.0).unwrap();
    let s = spectrum(&op, op.size()).unwrap();
    assert!(s.values[0] > 0.0);
    assert!(s.gram_deviation() <= 1e-10);
    // first clamped square eigenvalue ≈ 1294.93 (ω ≈ 35.99 for unit stiffness)
    assert!((s.values[0] - 1294.93).abs() / 1294.93 < 5e-2, "{}", s.values[0]);
}

#[test]
fn unsupported_combinations_are_rejected() {
    let sq = Grid::rectangle(1.0, 1.0, 10, 10).unwrap();
    assert!(assemble(&sq, "neumann_pair", &PlateMetric::Identity, 0.0).is_err());
    assert!(assemble(&Grid::interval(1.0, 10).unwrap(), "degenerate_equal", &PlateMetric::Identity, 0.0).is_err());
    assert!(Grid::interval(1.0, 7).is_err());
}
