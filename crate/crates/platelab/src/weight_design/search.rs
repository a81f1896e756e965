//! Sampled sub-ellipticity checks and the `γ`, `μ` searches.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bracket::{poisson_bracket, q_jets};
use super::global::ExclusionSet;
use super::{Psi, WeightField};
use crate::error::{invalid, Error, Result};
use crate::metric::Metric;
use crate::sampling::unit_sphere;

/// Admissible ratios: `τ ≥ τ0 σ`, and `τ ≤ κ0' σ` when set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBand {
    pub tau0: f64,
    pub kappa0_prime: Option<f64>,
}

impl Default for RatioBand {
    fn default() -> Self {
        Self { tau0: 1.0, kappa0_prime: None }
    }
}

impl RatioBand {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > 0.0) {
            return invalid("tau0 must be positive");
        }
        if let Some(k) = self.kappa0_prime {
            if !(k > self.tau0) {
                return invalid("kappa0' must exceed tau0");
            }
        }
        Ok(())
    }

    /// Range of `σ/τ`.
    pub fn sigma_ratio_range(&self) -> (f64, f64) {
        (self.kappa0_prime.map_or(0.0, |k| 1.0 / k), 1.0 / self.tau0)
    }

    pub fn admits(&self, tau: f64, sigma: f64) -> bool {
        let slack = 1e-12 * tau.max(sigma);
        tau + slack >= self.tau0 * sigma && self.kappa0_prime.map_or(true, |k| tau <= k * sigma + slack)
    }
}

/// Tensor grid of base points, with `τ` values and `σ/τ` resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub n: usize,
    pub exclude: Option<ExclusionSet>,
    pub taus: Vec<f64>,
    pub n_sigma: usize,
    /// Extra random directions in the characteristic cone when `d ≥ 3`.
    pub directions: usize,
    pub seed: u64,
}

impl Region {
    pub fn interval(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo: vec![lo], hi: vec![hi], n, exclude: None, taus: vec![1.0], n_sigma: 17, directions: 8, seed: 0 }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let n = self.n.max(1);
        let coord = |k: usize, i: usize| {
            if n == 1 {
                0.5 * (self.lo[k] + self.hi[k])
            } else {
                self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (n - 1) as f64
            }
        };
        let total = n.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                (0..d)
                    .map(|k| {
                        let i = idx % n;
                        idx /= n;
                        coord(k, i)
                    })
                    .collect::<Vec<f64>>()
            })
            .filter(|x| self.exclude.as_ref().map_or(true, |e| !e.contains(x)))
            .collect()
    }

    /// Same region with doubled resolution.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1, n_sigma: 2 * self.n_sigma - 1, directions: 2 * self.directions, ..self.clone() }
    }

    /// Whether every point of `self` is also a point of `other`'s box.
    pub fn within(&self, other: &Region) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a >= b) && self.hi.iter().zip(&other.hi).all(|(a, b)| a <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketSample {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub tau: f64,
    pub sigma: f64,
    pub qs: f64,
    pub qa: f64,
    pub bracket: f64,
    /// `{q_s, q_a} / λ³` with `λ² = |ξ|² + τ² + σ²`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubellReport {
    pub factor: u8,
    pub margin: f64,
    pub vacuous: bool,
    pub characteristic_samples: usize,
    pub worst: Option<BracketSample>,
    pub grid_n: usize,
    pub n_sigma: usize,
}

impl SubellReport {
    pub fn passes(&self) -> bool {
        self.margin > 0.0
    }
}

/// Unit vectors (in the `g` norm) spanning the `g`-orthogonal complement of
/// `dφ`, with both signs.
fn cone_directions(g: &DMatrix<f64>, dphi: &DVector<f64>, extra: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let d = dphi.len();
    let u = g * dphi;
    let un = u.norm();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in 0..d {
        let mut v = DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 });
        if un > 0.0 {
            let uu = &u / un;
            v -= &uu * uu.dot(&v);
        }
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / n);
        }
    }
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for b in &basis {
        dirs.push(b.clone());
        dirs.push(-b);
    }
    if basis.len() >= 2 {
        for _ in 0..extra {
            let c = unit_sphere(rng, basis.len());
            dirs.push(basis.iter().zip(&c).fold(DVector::zeros(d), |acc, (b, w)| acc + b * *w));
        }
    }
    dirs.into_iter()
        .map(|v| {
            let n = v.dot(&(g * &v)).sqrt();
            v / n
        })
        .collect()
}

/// Real points `(ξ, σ)` of `q_s = q_a = 0` above `(x, τ)` inside the band.
///
/// `q_a = 0` forces `ξ ⟂_g dφ`; then `q_s = 0` fixes `|ξ|_g`. In one
/// dimension `ξ = 0` and `σ = τ|dφ|` is the only candidate (factor 2).
pub fn characteristic_points(
    wf: &WeightField,
    metric: &Metric,
    j: u8,
    x: &[f64],
    tau: f64,
    band: &RatioBand,
    n_sigma: usize,
    directions: usize,
    seed: u64,
) -> Vec<(Vec<f64>, f64)> {
    let d = x.len();
    let pj = wf.phi_jet(x);
    let g = metric.inverse_at(x, d);
    let a = pj.grad.dot(&(&g * &pj.grad));
    let mut out = Vec::new();
    if d == 1 {
        if j == 2 {
            let sigma = tau * a.sqrt();
            if band.admits(tau, sigma) {
                out.push((vec![0.0], sigma));
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = cone_directions(&g, &pj.grad, directions, &mut rng);
    let (s_lo, s_hi) = band.sigma_ratio_range();
    let sign = if j == 2 { 1.0 } else { -1.0 };
    for k in 0..n_sigma.max(1) {
        let ratio = if n_sigma <= 1 { s_lo } else { s_lo + (s_hi - s_lo) * k as f64 / (n_sigma - 1) as f64 };
        let sigma = ratio * tau;
        let t2 = tau * tau * a - sign * sigma * sigma;
        if t2 < 0.0 {
            continue;
        }
        let t = t2.sqrt();
        for w in &dirs {
            out.push(((w * t).iter().copied().collect(), sigma));
        }
    }
    out
}

fn sample_at(wf: &WeightField, metric: &Metric, j: u8, x: &[f64], xi: &[f64], tau: f64, sigma: f64) -> BracketSample {
    let q = q_jets(wf, metric, x, xi, tau, sigma, j);
    let bracket = poisson_bracket(&q.qs, &q.qa);
    let lam = (xi.iter().map(|v| v * v).sum::<f64>() + tau * tau + sigma * sigma).sqrt();
    BracketSample {
        x: x.to_vec(),
        xi: xi.to_vec(),
        tau,
        sigma,
        qs: q.qs.value,
        qa: q.qa.value,
        bracket,
        normalized: bracket / lam.powi(3),
    }
}

fn min_sample(a: Option<BracketSample>, b: Option<BracketSample>) -> Option<BracketSample> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.normalized < a.normalized { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Minimum of `{q_s, q_a}/λ³` over the sampled characteristic set.
pub fn subellipticity_check(
    wf: &WeightField,
    metric: &Metric,
    j: u8,
    region: &Region,
    band: &RatioBand,
) -> Result<SubellReport> {
    band.validate()?;
    if region.dim() != wf.psi.dim() {
        return invalid("region and weight have different dimensions");
    }
    let pts = region.points();
    let (count, worst) = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut count = 0usize;
            let mut worst: Option<BracketSample> = None;
            for &tau in &region.taus {
                let seed = region.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                for (xi, sigma) in characteristic_points(wf, metric, j, x, tau, band, region.n_sigma, region.directions, seed) {
                    count += 1;
                    worst = min_sample(worst, Some(sample_at(wf, metric, j, x, &xi, tau, sigma)));
                }
            }
            (count, worst)
        })
        .reduce(|| (0, None), |a, b| (a.0 + b.0, min_sample(a.1, b.1)));
    Ok(SubellReport {
        factor: j,
        margin: worst.as_ref().map_or(f64::INFINITY, |w| w.normalized),
        vacuous: count == 0,
        characteristic_samples: count,
        worst,
        grid_n: region.n,
        n_sigma: region.n_sigma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub gamma0: f64,
    /// Largest probed `γ` that failed, zero if none.
    pub gamma_fail: f64,
    pub margins: [f64; 2],
    pub vacuous: [bool; 2],
    pub evaluations: usize,
}

/// Resolution of the `γ` grid: `γ = 2^{m/STEPS}`.
const GAMMA_STEPS: i32 = 256;

/// Least `γ = 2^{m/256}` such that both factors pass; doubling brackets the
/// value, integer bisection on `m` refines it.
pub fn gamma_search(psi: &Psi, metric: &Metric, band: &RatioBand, region: &Region, grad_floor: f64) -> Result<GammaReport> {
    band.validate()?;
    for x in region.points() {
        let (_, g, _) = psi.jet(&x);
        if g.norm() <= grad_floor {
            return Err(Error::SearchFailed(format!("|dpsi| = {:e} at x = {x:?} violates the lower bound", g.norm())));
        }
    }
    let mut evaluations = 0;
    let mut eval = |m: i32| -> Result<(bool, [f64; 2], [bool; 2])> {
        evaluations += 1;
        let wf = WeightField::new(psi.clone(), 2f64.powf(m as f64 / GAMMA_STEPS as f64))?;
        let a = subellipticity_check(&wf, metric, 1, region, band)?;
        let b = subellipticity_check(&wf, metric, 2, region, band)?;
        Ok((a.passes() && b.passes(), [a.margin, b.margin], [a.vacuous, b.vacuous]))
    };
    let (lo_lim, hi_lim) = (-30 * GAMMA_STEPS, 20 * GAMMA_STEPS);
    let mut m = 0;
    let (mut fail, mut pass);
    if eval(m)?.0 {
        pass = m;
        loop {
            m -= GAMMA_STEPS;
            if m < lo_lim {
                fail = None;
                break;
            }
            if !eval(m)?.0 {
                fail = Some(m);
                break;
            }
            pass = m;
        }
    } else {
        fail = Some(m);
        loop {
            m += GAMMA_STEPS;
            if m > hi_lim {
                return Err(Error::SearchFailed("no gamma up to 2^20 passes".into()));
            }
            if eval(m)?.0 {
                pass = m;
                break;
            }
            fail = Some(m);
        }
    }
    if let Some(mut f) = fail {
        while pass - f > 1 {
            let mid = f + (pass - f) / 2;
            if eval(mid)?.0 {
                pass = mid;
            } else {
                f = mid;
            }
        }
        fail = Some(f);
    }
    let (_, margins, vacuous) = eval(pass)?;
    let g = |m: i32| 2f64.powf(m as f64 / GAMMA_STEPS as f64);
    Ok(GammaReport { gamma0: g(pass), gamma_fail: fail.map_or(0.0, g), margins, vacuous, evaluations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuReport {
    pub mu: f64,
    /// Lower bound constant `C` in `t ≥ C λ⁴`.
    pub c: f64,
    pub min_ratio_search: f64,
    pub min_ratio_recheck: f64,
    pub recheck_ok: bool,
    pub samples: usize,
}

/// Random unit `(ξ, τ, σ)` with the band enforced, plus characteristic
/// points rescaled to the unit sphere.
fn t_samples(
    wf: &WeightField,
    metric: &Metric,
    j: u8,
    region: &Region,
    band: &RatioBand,
    per_point: usize,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>, f64, f64)> {
    let d = region.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (i, x) in region.points().into_iter().enumerate() {
        let mut drawn = 0;
        while drawn < per_point {
            let v = unit_sphere(&mut rng, d + 2);
            let (tau, sigma) = (v[d].abs(), v[d + 1].abs());
            if tau == 0.0 || !band.admits(tau, sigma) {
                continue;
            }
            out.push((x.clone(), v[..d].to_vec(), tau, sigma));
            drawn += 1;
        }
        let cs = region.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        for (xi, sigma) in characteristic_points(wf, metric, j, &x, 1.0, band, region.n_sigma, region.directions, cs) {
            out.push((x.clone(), xi, 1.0, sigma));
        }
    }
    out
}

fn min_t_ratio(wf: &WeightField, metric: &Metric, j: u8, mu: f64, samples: &[(Vec<f64>, Vec<f64>, f64, f64)]) -> f64 {
    samples
        .par_iter()
        .map(|(x, xi, tau, sigma)| {
            let q = q_jets(wf, metric, x, xi, *tau, *sigma, j);
            let t = mu * (q.qs.value.powi(2) + q.qa.value.powi(2)) + tau * poisson_bracket(&q.qs, &q.qa);
            let lam2 = xi.iter().map(|v| v * v).sum::<f64>() + tau * tau + sigma * sigma;
            t / (lam2 * lam2)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Smallest `μ = 2^k ≤ mu_max` with `t = μ(q_s² + q_a²) + τ{q_s, q_a} ≥ 2Cλ⁴`
/// on the search sample, then rechecked against `C` on a fresh sample.
///
/// `C = fraction · |m|` where `m` is the minimum of `τ{q_s, q_a}/λ⁴` on the
/// characteristic samples (`C = fraction` when that set is empty).
pub fn mu_search(
    wf: &WeightField,
    metric: &Metric,
    j: u8,
    region: &Region,
    band: &RatioBand,
    fraction: f64,
    mu_max: f64,
    per_point: usize,
) -> Result<MuReport> {
    band.validate()?;
    let mut char_min = f64::INFINITY;
    for (i, x) in region.points().iter().enumerate() {
        let cs = region.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        for (xi, sigma) in characteristic_points(wf, metric, j, x, 1.0, band, region.n_sigma, region.directions, cs) {
            let s = sample_at(wf, metric, j, x, &xi, 1.0, sigma);
            let lam = (xi.iter().map(|v| v * v).sum::<f64>() + 1.0 + sigma * sigma).sqrt();
            char_min = char_min.min(s.bracket / lam.powi(4));
        }
    }
    let c = if char_min.is_finite() && char_min != 0.0 { fraction * char_min.abs() } else { fraction };
    let search = t_samples(wf, metric, j, region, band, per_point, region.seed.wrapping_add(1));
    let mut mu = 1.0;
    loop {
        let m = min_t_ratio(wf, metric, j, mu, &search);
        if m >= 2.0 * c {
            let fresh = t_samples(wf, metric, j, region, band, per_point, region.seed.wrapping_add(0xfeed));
            let r = min_t_ratio(wf, metric, j, mu, &fresh);
            return Ok(MuReport {
                mu,
                c,
                min_ratio_search: m,
                min_ratio_recheck: r,
                recheck_ok: r >= c,
                samples: search.len(),
            });
        }
        mu *= 2.0;
        if mu > mu_max {
            return Err(Error::SearchFailed(format!(
                "t >= C lambda^4 not reached up to mu_max = {mu_max:e} (min ratio {m:e}, C = {c:e})"
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight_design::{Combine, Psi1d};

    fn model() -> Psi {
        Psi::one_d(Psi1d::Poly(vec![0.05, 1.0, -1.0]))
    }

    fn band() -> RatioBand {
        RatioBand { tau0: 1e-4, kappa0_prime: None }
    }

    #[test]
    fn dominant_tau_is_vacuous() {
        // with τ0 large only tiny σ is admitted, so σ = τ|φ'| cannot be reached
        let wf = WeightField::new(model(), 1.0).unwrap();
        let r = subellipticity_check(&wf, &Metric::Euclidean, 2, &Region::interval(0.05, 0.3, 9), &RatioBand { tau0: 1e3, kappa0_prime: None })
            .unwrap();
        assert!(r.vacuous && r.margin == f64::INFINITY);
    }

    #[test]
    fn small_gamma_fails_large_gamma_passes() {
        let region = Region::interval(0.05, 0.3, 9);
        let small = WeightField::new(model(), 0.5).unwrap();
        assert!(subellipticity_check(&small, &Metric::Euclidean, 2, &region, &band()).unwrap().margin < 0.0);
        let large = WeightField::new(model(), 40.0).unwrap();
        let r = subellipticity_check(&large, &Metric::Euclidean, 2, &region, &band()).unwrap();
        assert!(!r.vacuous && r.margin > 0.0);
    }

    #[test]
    fn gamma_search_rejects_critical_points() {
        let err = gamma_search(&model(), &Metric::Euclidean, &band(), &Region::interval(0.3, 0.7, 9), 1e-6);
        assert!(matches!(err, Err(Error::SearchFailed(_))));
    }

    #[test]
    fn two_dimensional_characteristic_points_are_exact() {
        let psi = Psi { factors: vec![Psi1d::Affine { a: 0.0, b: 1.0 }, Psi1d::Affine { a: 0.0, b: 0.5 }], combine: Combine::Sum };
        let wf = WeightField::new(psi, 1.2).unwrap();
        for j in [1u8, 2] {
            for (xi, sigma) in characteristic_points(&wf, &Metric::Euclidean, j, &[0.3, 0.4], 2.0, &RatioBand::default(), 5, 0, 0) {
                let q = q_jets(&wf, &Metric::Euclidean, &[0.3, 0.4], &xi, 2.0, sigma, j);
                assert!(q.qs.value.abs() < 1e-12 && q.qa.value.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mu_search_aborts_without_subellipticity() {
        let wf = WeightField::new(model(), 0.5).unwrap();
        let r = mu_search(&wf, &Metric::Euclidean, 2, &Region::interval(0.05, 0.3, 5), &band(), 0.1, 1e6, 50);
        assert!(matches!(r, Err(Error::SearchFailed(_))));
    }
}
