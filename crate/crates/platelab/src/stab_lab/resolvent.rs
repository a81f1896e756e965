//! Resolvent of the reduced generator in the `Ḣ` norm and its spectrum.
//!
//! In the coordinates of [`Generator::to_reduced`] the `Ḣ` norm is the
//! Euclidean one, so `‖(z - Ȧ)⁻¹‖` is the largest singular value of the
//! inverse. It is estimated by power iteration on `(z - Ȧ)^{-*}(z - Ȧ)⁻¹`
//! with LU solves on the Hessenberg form.

use nalgebra::{DMatrix, DVector, Schur};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use super::Generator;
use crate::error::{invalid, Error, Result};
use crate::{fmt_f64, C64};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventNorm {
    pub z: (f64, f64),
    pub norm: f64,
    pub iterations: usize,
    /// `max |U_ii| / min |U_ii|` of the LU factor, a cheap condition proxy.
    pub pivot_ratio: f64,
}

const POWER_MAX_ITER: usize = 500;
const POWER_TOL: f64 = 1e-10;
const PIVOT_LIMIT: f64 = 1e15;

fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// `Ȧ = Q H Qᵀ` with `H` upper Hessenberg; `Q` is orthogonal, so the
/// resolvent norm of `H` is that of `Ȧ`, and each shift costs `O(n²)`.
#[derive(Clone, Debug)]
pub struct HessenbergResolvent {
    h: DMatrix<f64>,
}

/// `z - H = M⁻¹U` with `M` a product of adjacent row swaps and
/// elimination steps.
struct HessLu {
    u: DMatrix<C64>,
    mult: Vec<C64>,
    swap: Vec<bool>,
}

impl HessLu {
    fn solve(&self, b: &DVector<C64>) -> DVector<C64> {
        let n = b.len();
        let mut x = b.clone();
        for k in 0..n - 1 {
            if self.swap[k] {
                x.swap_rows(k, k + 1);
            }
            let t = x[k];
            x[k + 1] -= self.mult[k] * t;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.u[(i, j)] * x[j];
            }
            x[i] = s / self.u[(i, i)];
        }
        x
    }

    /// Solve with `(z - H)^* = U^* M^{-*}`.
    fn solve_adjoint(&self, c: &DVector<C64>) -> DVector<C64> {
        let n = c.len();
        let mut w = c.clone();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.u[(j, i)].conj() * w[j];
            }
            w[i] = s / self.u[(i, i)].conj();
        }
        for k in (0..n - 1).rev() {
            let t = w[k + 1];
            w[k] -= self.mult[k].conj() * t;
            if self.swap[k] {
                w.swap_rows(k, k + 1);
            }
        }
        w
    }
}

impl HessenbergResolvent {
    pub fn new(ad: &DMatrix<f64>) -> Self {
        Self { h: ad.clone().hessenberg().h() }
    }

    fn factor(&self, z: C64) -> HessLu {
        let n = self.h.nrows();
        let mut u: DMatrix<C64> = self.h.map(|v| C64::new(-v, 0.0));
        for i in 0..n {
            u[(i, i)] += z;
        }
        let mut mult = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            if u[(k + 1, k)].norm() > u[(k, k)].norm() {
                u.swap_rows(k, k + 1);
                swap[k] = true;
            }
            if u[(k, k)].norm() == 0.0 {
                continue;
            }
            let m = u[(k + 1, k)] / u[(k, k)];
            mult[k] = m;
            for j in k..n {
                let t = u[(k, j)];
                u[(k + 1, j)] -= m * t;
            }
        }
        HessLu { u, mult, swap }
    }

    pub fn norm_at(&self, z: C64) -> Result<ResolventNorm> {
        let n = self.h.nrows();
        let lu = self.factor(z);
        let dmax = (0..n).fold(0.0f64, |a, i| a.max(lu.u[(i, i)].norm()));
        let dmin = (0..n).fold(f64::INFINITY, |a, i| a.min(lu.u[(i, i)].norm()));
        let pivot_ratio = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
        if pivot_ratio > PIVOT_LIMIT {
            return Err(Error::Singular(format!("z - Ȧ at z = {z} is numerically singular, pivot ratio {pivot_ratio:e}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut x: DVector<C64> =
            DVector::from_fn(n, |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
        x /= C64::new(x.norm(), 0.0);
        let mut est = 0.0;
        let mut iterations = 0;
        for it in 1..=POWER_MAX_ITER {
            iterations = it;
            let y = lu.solve(&x);
            let s = y.norm();
            let w = lu.solve_adjoint(&y);
            let wn = w.norm();
            if !s.is_finite() || !(wn > 0.0) || !wn.is_finite() {
                return Err(Error::Singular(format!("power iteration broke down at z = {z}")));
            }
            x = w / C64::new(wn, 0.0);
            let done = (s - est).abs() <= POWER_TOL * s;
            est = s;
            if done {
                break;
            }
        }
        Ok(ResolventNorm { z: (z.re, z.im), norm: est, iterations, pivot_ratio })
    }
}

/// `‖(z - Ȧ)⁻¹‖` in `L(Ḣ)`.
pub fn resolvent_norm(gen: &Generator, z: C64) -> Result<ResolventNorm> {
    HessenbergResolvent::new(&gen.reduced_matrix()).norm_at(z)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub norm: f64,
    pub log_norm: f64,
    /// `C(1 + √σ) - log‖R(iσ)‖`.
    pub slack: f64,
    /// Set when the solve at this point was singular.
    pub skipped: bool,
    /// Set for points added by peak refinement.
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Least `C` with `log‖R(iσ)‖ ≤ C(1 + √σ)` on grid and refined points.
    pub c: f64,
    /// The same constant from grid points only.
    pub c_grid: f64,
    pub skipped: usize,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# c={}\n# c_grid={}\n# skipped={}\n", fmt_f64(self.c), fmt_f64(self.c_grid), self.skipped));
        s.push_str("sigma,norm,log_norm,slack,skipped,refined\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(p.sigma),
                fmt_f64(p.norm),
                fmt_f64(p.log_norm),
                fmt_f64(p.slack),
                u8::from(p.skipped),
                u8::from(p.refined)
            ));
        }
        s
    }
}

const GOLDEN_ITERS: usize = 40;

fn ratio(ad: &HessenbergResolvent, sigma: f64) -> Option<(f64, f64)> {
    ad.norm_at(C64::new(0.0, sigma)).ok().map(|r| (r.norm, r.norm.ln() / (1.0 + sigma.abs().sqrt())))
}

/// Golden-section maximization of `log‖R(iσ)‖/(1 + √σ)` on `[a, b]`.
fn refine_peak(ad: &HessenbergResolvent, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = ratio(ad, c)?;
    let mut fd = ratio(ad, d)?;
    for _ in 0..GOLDEN_ITERS {
        if fc.1 > fd.1 {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ratio(ad, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ratio(ad, d)?;
        }
    }
    Some(if fc.1 > fd.1 { (c, fc.0) } else { (d, fd.0) })
}

/// Sweep `σ ↦ ‖(iσ - Ȧ)⁻¹‖` over a grid, in parallel, and refine every
/// local maximum of `log‖R‖/(1 + √σ)` between its grid neighbours.
pub fn resolvent_sweep(gen: &Generator, sigma_grid: &[f64]) -> Result<SweepReport> {
    if sigma_grid.is_empty() {
        return invalid("empty σ grid");
    }
    if sigma_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("σ grid must be strictly increasing");
    }
    let ad = HessenbergResolvent::new(&gen.reduced_matrix());
    let raw: Vec<Option<f64>> = sigma_grid
        .par_iter()
        .map(|s| ad.norm_at(C64::new(0.0, *s)).ok().map(|r| r.norm))
        .collect();
    let f = |i: usize| raw[i].map(|n| n.ln() / (1.0 + sigma_grid[i].abs().sqrt()));
    let peaks: Vec<usize> = (1..sigma_grid.len().saturating_sub(1))
        .filter(|i| match (f(i - 1), f(*i), f(i + 1)) {
            (Some(a), Some(b), Some(c)) => b >= a && b >= c,
            _ => false,
        })
        .collect();
    let refined: Vec<(f64, f64)> =
        peaks.par_iter().filter_map(|i| refine_peak(&ad, sigma_grid[i - 1], sigma_grid[i + 1])).collect();

    let mut points: Vec<SweepPoint> = sigma_grid
        .iter()
        .zip(&raw)
        .map(|(s, n)| match n {
            Some(n) => SweepPoint { sigma: *s, norm: *n, log_norm: n.ln(), slack: 0.0, skipped: false, refined: false },
            None => SweepPoint { sigma: *s, norm: f64::NAN, log_norm: f64::NAN, slack: f64::NAN, skipped: true, refined: false },
        })
        .collect();
    let fit = |pts: &[SweepPoint]| {
        pts.iter().filter(|p| !p.skipped).map(|p| p.log_norm / (1.0 + p.sigma.abs().sqrt())).fold(f64::NEG_INFINITY, f64::max)
    };
    let c_grid = fit(&points);
    points.extend(refined.iter().map(|(s, n)| SweepPoint {
        sigma: *s,
        norm: *n,
        log_norm: n.ln(),
        slack: 0.0,
        skipped: false,
        refined: true,
    }));
    points.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
    let c = fit(&points);
    for p in points.iter_mut().filter(|p| !p.skipped) {
        p.slack = c * (1.0 + p.sigma.abs().sqrt()) - p.log_norm;
    }
    let skipped = points.iter().filter(|p| p.skipped).count();
    Ok(SweepReport { points, c, c_grid, skipped })
}

/// `a:b:step` into an inclusive grid.
pub fn parse_sigma_grid(desc: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = desc
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("bad σ grid `{desc}`, expected a:b:step")))?;
    if v.len() != 3 || !(v[2] > 0.0) || !(v[1] >= v[0]) {
        return invalid(format!("bad σ grid `{desc}`, expected a:b:step with a ≤ b, step > 0"));
    }
    let n = ((v[1] - v[0]) / v[2] + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| v[0] + k as f64 * v[2]).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfplaneReport {
    pub min_re: f64,
    /// The `count` eigenvalues of smallest modulus as `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
    /// `max_λ min_μ |conj λ - μ| / max |λ|`.
    pub conjugate_defect: f64,
    pub dimension: usize,
}

pub fn halfplane_check(gen: &Generator, count: usize) -> Result<HalfplaneReport> {
    let ad = gen.reduced_matrix();
    let dimension = ad.nrows();
    let schur = Schur::try_new(ad, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::SearchFailed("Schur iteration did not converge".into()))?;
    let ev: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    let min_re = ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let scale = ev.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let conjugate_defect = ev
        .iter()
        .map(|l| ev.iter().map(|m| (l.conj() - m).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0f64, f64::max)
        / scale;
    let mut sorted = ev.clone();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    let eigenvalues = sorted.iter().take(count).map(|z| (z.re, z.im)).collect();
    Ok(HalfplaneReport { min_re, eigenvalues, conjugate_defect, dimension })
}

/// `min ‖(z - Ȧ)U‖ / (|Re z|·‖U‖)` over random `U ∈ Ḣ` and `z` with
/// `Re z ∈ [-10, -0.01]`, `Im z ∈ [-200, 200]`.
pub fn apriori_bound_ratio(gen: &Generator, trials: usize, seed: u64) -> f64 {
    let ad = gen.reduced_matrix();
    let adc = complexify(&ad);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let re = Uniform::new(-10.0, -0.01);
    let im = Uniform::new(-200.0, 200.0);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let z = C64::new(re.sample(&mut rng), im.sample(&mut rng));
        let u: DVector<C64> =
            DVector::from_fn(ad.nrows(), |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
        let r = &u * z - &adc * &u;
        worst = worst.min(r.norm() / (z.re.abs() * u.norm()));
    }
    worst
}
