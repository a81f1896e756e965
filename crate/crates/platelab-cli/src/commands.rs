//! One function per subcommand. Each returns the artifact text and whether
//! the mathematical checks it performs passed.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use platelab::ls_checker::{
    catalog_bc, closed_form_det_unit, ls_conjugated, ls_rank_oracle, ls_unconjugated, parse_boundary_pair,
    write_boundary_pair, BoundaryPair, CatalogParams, LsReport, Verdict, ALL_NAMES, CATALOG,
};
use platelab::plate_discrete::{
    assemble, default_param, kernel, read_profile_file, spectrum, write_columnar, DiscretePlateOperator, Grid,
    PlateMetric, Profile, KERNEL_COUNT, KERNEL_TOL,
};
use platelab::stab_lab::{
    build_generator, decay_fit, parse_sigma_grid, power_norm_sq, resolvent_sweep, simulate, EnergyLog, Generator, State,
};
use platelab::symbol_core::{
    classify_roots, factor_roots, im_sign_criterion, quartic_coefficients, quartic_roots, TangentialPoint, WeightJet,
    CLASSIFY_TOL,
};
use platelab::weight_design::{
    gamma_search, mu_search, subellipticity_check, Combine, ExclusionSet, Psi, Psi1d, RatioBand, Region, WeightField,
};
use platelab::{fmt_f64, Metric, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, Params};

/// Command failure: a configuration problem or a numerical one.
#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<platelab::Error> for CmdError {
    fn from(e: platelab::Error) -> Self {
        use platelab::Error as E;
        match e {
            E::InvalidInput(_) | E::UnknownBoundaryPair(_) | E::Inadmissible(_) | E::Parse { .. } | E::Io(_) => {
                CmdError::Config(ConfigError(e.to_string()))
            }
            E::Singular(_) | E::SearchFailed(_) | E::Breakdown { .. } => CmdError::Numerical(e.to_string()),
        }
    }
}

pub struct Outcome {
    pub text: String,
    pub pass: bool,
    /// One line for stderr.
    pub summary: String,
}

pub type CmdResult = Result<Outcome, CmdError>;

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

// ---- shared option groups ----

/// `euclidean` or `const:g11,g12,...` (row-major, symmetric positive definite).
fn metric(p: &Params, dim: usize) -> Result<Metric, CmdError> {
    let desc = p.str_or("metric", "euclidean");
    if desc == "euclidean" {
        return Ok(Metric::Euclidean);
    }
    let Some(rest) = desc.strip_prefix("const:") else {
        return Err(p.err("metric", "expected `euclidean` or `const:g11,g12,...`").into());
    };
    let v: Vec<f64> = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| p.err("metric", format!("bad number in `{rest}`")))?;
    if v.len() != dim * dim {
        return Err(p.err("metric", format!("need {} entries for dimension {dim}", dim * dim)).into());
    }
    let g = DMatrix::from_row_slice(dim, dim, &v);
    if (&g - g.transpose()).amax() > 1e-12 || g.clone().cholesky().is_none() {
        return Err(p.err("metric", "must be symmetric positive definite").into());
    }
    Ok(Metric::Constant(g))
}

fn seed(p: &Params) -> Result<u64, CmdError> {
    Ok(p.get_or("seed", 0u64)?)
}

pub const OPERATOR_KEYS: &[&str] = &["bc", "n", "length", "param", "plate-metric"];

/// `--n 200` or `--n 40,20`; `--length 1` or `--length 1,0.5`.
fn grid(p: &Params) -> Result<Grid, CmdError> {
    let n: Vec<usize> = p
        .str_or("n", "100")
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| p.err("n", "expected node counts such as `200` or `40,20`"))?;
    let len = p.list("length")?.unwrap_or_else(|| vec![1.0; n.len()]);
    if len.len() != n.len() {
        return Err(p.err("length", "needs one entry per axis of --n").into());
    }
    Grid::new(n.clone(), vec![0.0; n.len()], len).map_err(|e| p.err("n", e).into())
}

fn profile(p: &Params, key: &str, desc: &str) -> Result<Profile, CmdError> {
    if let Some(path) = desc.strip_prefix('@') {
        return read_profile_file(Path::new(path)).map_err(|e| p.err(key, e).into());
    }
    Profile::parse(desc).map_err(|e| p.err(key, e).into())
}

/// `identity`, `stiffness:<profile>` or `diagonal:<profile>;<profile>`.
fn plate_metric(p: &Params) -> Result<PlateMetric, CmdError> {
    let desc = p.str_or("plate-metric", "identity");
    if desc == "identity" {
        return Ok(PlateMetric::Identity);
    }
    if let Some(rest) = desc.strip_prefix("stiffness:") {
        return Ok(PlateMetric::Stiffness(profile(p, "plate-metric", rest)?));
    }
    if let Some(rest) = desc.strip_prefix("diagonal:") {
        let Some((a, b)) = rest.split_once(';') else {
            return Err(p.err("plate-metric", "expected `diagonal:<profile>;<profile>`").into());
        };
        return Ok(PlateMetric::Diagonal { a1: profile(p, "plate-metric", a)?, a2: profile(p, "plate-metric", b)? });
    }
    Err(p.err("plate-metric", "expected identity, stiffness:<profile> or diagonal:<p1>;<p2>").into())
}

fn operator(p: &Params) -> Result<DiscretePlateOperator, CmdError> {
    let bc = p.str_or("bc", "clamped");
    let param = p.get_or("param", default_param(&bc))?;
    let g = grid(p)?;
    let m = plate_metric(p)?;
    Ok(assemble(&g, &bc, &m, param)?)
}

pub const DAMPING_KEYS: &[&str] = &["alpha"];

fn generator(p: &Params, op: &DiscretePlateOperator) -> Result<Generator, CmdError> {
    let desc = p.str_or("alpha", "bump:0.3:0.5:1.0");
    let a = profile(p, "alpha", &desc)?;
    Ok(build_generator(op, &a)?)
}

// ---- ls-check ----

pub const LS_KEYS: &[&str] = &["bc", "pair-file", "a", "dim", "samples", "seed", "kappa0", "tau", "metric"];

fn boundary_pair(p: &Params, dim: usize) -> Result<BoundaryPair, CmdError> {
    if let Some(path) = p.raw("pair-file") {
        let text = std::fs::read_to_string(path).map_err(|e| p.err("pair-file", e))?;
        return Ok(parse_boundary_pair(&text).map_err(|e| p.err("pair-file", e))?);
    }
    let name = p.str_or("bc", "clamped");
    let a = p.get_or("a", default_param(&name))?;
    Ok(catalog_bc(&name, &CatalogParams::scalar(&name, a, dim))?)
}

#[derive(Serialize)]
struct Counterexample {
    kind: &'static str,
    x: Vec<f64>,
    xi_prime: Vec<f64>,
    tau: f64,
    sigma: f64,
    weight_gradient: Vec<f64>,
    report: LsReport,
    rank: Option<usize>,
}

pub fn ls_check(p: &Params) -> CmdResult {
    let dim: usize = p.get_or("dim", 1)?;
    if dim == 0 {
        return Err(p.err("dim", "tangential dimension must be at least 1").into());
    }
    let pair = boundary_pair(p, dim)?;
    let m = metric(p, dim)?;
    let samples: usize = p.get_or("samples", 1000)?;
    let kappa0 = p.positive("kappa0", 1.0)?;
    let tau_fixed: Option<f64> = p.get("tau")?;
    if tau_fixed.is_some_and(|t| !(t >= 0.0)) {
        return Err(p.err("tau", "must be nonnegative").into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed(p)?);
    let x = vec![0.0; dim + 1];

    // unconjugated: the first direction is e1, the rest random unit vectors
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let at_unit = ls_unconjugated(&pair, &m, &x, &e1)?;
    let mut counterexample: Option<Counterexample> = None;
    let mut min_unconj = f64::INFINITY;
    for k in 0..samples.max(1) {
        let omega = if k == 0 { e1.clone() } else { platelab::sampling::unit_sphere(&mut rng, dim) };
        let r = ls_unconjugated(&pair, &m, &x, &omega)?;
        min_unconj = min_unconj.min(r.normalized_margin);
        if !r.verdict.holds() && counterexample.is_none() {
            counterexample = Some(Counterexample {
                kind: "unconjugated",
                x: x.clone(),
                xi_prime: omega,
                tau: 0.0,
                sigma: 0.0,
                weight_gradient: vec![],
                report: r,
                rank: None,
            });
        }
    }

    let (mut holds, mut fails, mut indeterminate, mut disagreements) = (0usize, 0usize, 0usize, 0usize);
    let mut min_conj = f64::INFINITY;
    let conjugated = tau_fixed != Some(0.0);
    if conjugated {
        for _ in 0..samples {
            let xi: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let tau = tau_fixed.unwrap_or_else(|| rng.gen_range(0.01..2.0));
            let sigma = rng.gen_range(0.0..1.0) * tau / kappa0;
            let dt: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = WeightJet::linear(dt.clone(), rng.gen_range(0.1..2.0));
            let pt = TangentialPoint::new(x.clone(), xi.clone(), tau, sigma);
            let r = ls_conjugated(&pair, &m, &w, &pt, CLASSIFY_TOL)?;
            if r.verdict == Verdict::Indeterminate {
                indeterminate += 1;
                continue;
            }
            let rank = ls_rank_oracle(&pair, &m, &w, &pt, CLASSIFY_TOL)?;
            let ok = r.verdict.holds();
            let agree = ok == (rank == 4);
            min_conj = min_conj.min(r.normalized_margin);
            if ok {
                holds += 1;
            } else {
                fails += 1;
            }
            if !agree {
                disagreements += 1;
            }
            if (!ok || !agree) && counterexample.is_none() {
                counterexample = Some(Counterexample {
                    kind: if agree { "conjugated" } else { "oracle_disagreement" },
                    x: x.clone(),
                    xi_prime: xi,
                    tau,
                    sigma,
                    weight_gradient: w.d_tangential.iter().copied().chain([w.d_normal]).collect(),
                    report: r,
                    rank: Some(rank),
                });
            }
        }
    }
    let pass = counterexample.is_none();
    let report = json!({
        "pair": pair.name,
        "pass": pass,
        "unconjugated": {
            "samples": samples.max(1),
            "determinant_at_unit": at_unit.determinant,
            "min_normalized_margin": min_unconj,
        },
        "conjugated": if conjugated { json!({
            "samples": samples,
            "kappa0": kappa0,
            "holds": holds,
            "fails": fails,
            "indeterminate": indeterminate,
            "oracle_disagreements": disagreements,
            "min_normalized_margin": min_conj,
        }) } else { serde_json::Value::Null },
        "counterexample": counterexample,
    });
    let det = at_unit.determinant.unwrap_or_default();
    Ok(Outcome {
        text: to_json(&report),
        pass,
        summary: format!("ls-check {}: det at |omega'|=1 is {det}; {}", pair.name, if pass { "pass" } else { "FAIL" }),
    })
}

// ---- roots ----

pub const ROOTS_KEYS: &[&str] = &["xi", "tau", "sigma", "dphi-t", "dphi-n", "metric", "tol"];

pub fn roots(p: &Params) -> CmdResult {
    let xi = p.list("xi")?.unwrap_or_else(|| vec![1.0]);
    let dim = xi.len();
    let tau: f64 = p.get_or("tau", 1.0)?;
    let sigma: f64 = p.get_or("sigma", 0.0)?;
    let dt = p.list("dphi-t")?.unwrap_or_else(|| vec![0.0; dim]);
    if dt.len() != dim {
        return Err(p.err("dphi-t", "needs one entry per component of --xi").into());
    }
    let dn = p.positive("dphi-n", 1.0)?;
    let tol = p.positive("tol", CLASSIFY_TOL)?;
    let m = metric(p, dim)?;
    let pt = TangentialPoint::new(vec![0.0; dim + 1], xi, tau, sigma);
    pt.validate()?;
    let w = WeightJet::linear(dt, dn);
    let conf = classify_roots(&m, &pt, &w, tol)?;
    let report = json!({
        "point": pt,
        "lambda": pt.lambda(),
        "lambda_t": pt.lambda_t(),
        "coefficients": quartic_coefficients(&m, &pt, &w),
        "factor_roots": [factor_roots(&m, &pt, &w, 1), factor_roots(&m, &pt, &w, 2)],
        "im_pi2_negative": [im_sign_criterion(&m, &pt, &w, 1), im_sign_criterion(&m, &pt, &w, 2)],
        "quartic_roots": quartic_roots(&m, &pt, &w),
        "configuration": conf,
    });
    Ok(Outcome { text: to_json(&report), pass: true, summary: format!("roots: {:?}", conf.case_tag) })
}

// ---- weights ----

pub const WEIGHT_KEYS: &[&str] = &[
    "psi", "psi-combine", "lo", "hi", "grid-n", "taus", "n-sigma", "directions", "seed", "exclude", "tau0",
    "kappa0-prime", "metric",
];

/// Axes separated by `;`, each `affine:a:b`, `poly:c0,c1,...` or
/// `bump:lo:hi:peak`.
fn psi(p: &Params) -> Result<Psi, CmdError> {
    let desc = p.str_or("psi", "poly:0.05,1,-1");
    let mut factors = Vec::new();
    for axis in desc.split(';') {
        let parts: Vec<&str> = axis.trim().split(':').collect();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| p.err("psi", format!("bad number `{s}`")));
        let f = match parts.as_slice() {
            ["affine", a, b] => Psi1d::Affine { a: num(a)?, b: num(b)? },
            ["poly", c] => Psi1d::Poly(c.split(',').map(num).collect::<Result<_, _>>()?),
            ["bump", lo, hi, peak] => {
                let (lo, hi, peak) = (num(lo)?, num(hi)?, num(peak)?);
                if !(lo < peak && peak < hi) {
                    return Err(p.err("psi", "bump needs lo < peak < hi").into());
                }
                Psi1d::bump_with_peak(lo, hi, peak)
            }
            _ => return Err(p.err("psi", format!("cannot read `{axis}`")).into()),
        };
        factors.push(f);
    }
    let combine = match p.str_or("psi-combine", "product").as_str() {
        "product" => Combine::Product,
        "sum" => Combine::Sum,
        _ => return Err(p.err("psi-combine", "expected product or sum").into()),
    };
    Ok(Psi { factors, combine })
}

/// `interval:lo:hi`, `disc:cx,cy:r` or `box:lo1,lo2:hi1,hi2`.
fn exclusion(p: &Params) -> Result<Option<ExclusionSet>, CmdError> {
    let Some(desc) = p.raw("exclude") else { return Ok(None) };
    let parts: Vec<&str> = desc.split(':').collect();
    let nums = |s: &str| -> Result<Vec<f64>, CmdError> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| p.err("exclude", format!("bad number `{v}`")).into()))
            .collect()
    };
    Ok(Some(match parts.as_slice() {
        ["interval", lo, hi] => ExclusionSet::Interval { lo: nums(lo)?[0], hi: nums(hi)?[0] },
        ["disc", c, r] => ExclusionSet::Disc { center: nums(c)?, radius: nums(r)?[0] },
        ["box", lo, hi] => ExclusionSet::Box { lo: nums(lo)?, hi: nums(hi)? },
        _ => return Err(p.err("exclude", "expected interval:lo:hi, disc:cx,cy:r or box:lo,..:hi,..").into()),
    }))
}

fn region(p: &Params, dim: usize) -> Result<Region, CmdError> {
    let lo = p.list("lo")?.unwrap_or_else(|| vec![0.05; dim]);
    let hi = p.list("hi")?.unwrap_or_else(|| vec![0.3; dim]);
    if lo.len() != dim || hi.len() != dim {
        return Err(p.err("lo", format!("--lo and --hi need {dim} entries")).into());
    }
    if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
        return Err(p.err("hi", "must not be below --lo").into());
    }
    let taus = p.list("taus")?.unwrap_or_else(|| vec![1.0]);
    if taus.iter().any(|t| !(*t > 0.0)) {
        return Err(p.err("taus", "must be positive").into());
    }
    Ok(Region {
        lo,
        hi,
        n: p.get_or("grid-n", 9)?,
        exclude: exclusion(p)?,
        taus,
        n_sigma: p.get_or("n-sigma", 17)?,
        directions: p.get_or("directions", 8)?,
        seed: seed(p)?,
    })
}

fn band(p: &Params) -> Result<RatioBand, CmdError> {
    let b = RatioBand { tau0: p.positive("tau0", 1.0)?, kappa0_prime: p.get("kappa0-prime")? };
    b.validate().map_err(|e| p.err("kappa0-prime", e))?;
    Ok(b)
}

fn factors(p: &Params) -> Result<Vec<u8>, CmdError> {
    match p.str_or("factor", "both").as_str() {
        "both" => Ok(vec![1, 2]),
        "1" => Ok(vec![1]),
        "2" => Ok(vec![2]),
        _ => Err(p.err("factor", "expected 1, 2 or both").into()),
    }
}

pub const SUBELL_KEYS: &[&str] = &["gamma", "factor"];

pub fn subell(p: &Params) -> CmdResult {
    let psi = psi(p)?;
    let r = region(p, psi.dim())?;
    let b = band(p)?;
    let m = metric(p, psi.dim())?;
    let Some(gamma) = p.get::<f64>("gamma")? else {
        return Err(p.err("gamma", "required (use gamma-search to find one)").into());
    };
    let wf = WeightField::new(psi, gamma).map_err(|e| p.err("gamma", e))?;
    let mut reports = Vec::new();
    for j in factors(p)? {
        reports.push(subellipticity_check(&wf, &m, j, &r, &b)?);
    }
    let pass = reports.iter().all(|r| r.margin > 0.0);
    let margins: Vec<String> = reports.iter().map(|r| format!("j={} margin {:e}", r.factor, r.margin)).collect();
    Ok(Outcome {
        text: to_json(&json!({ "gamma": gamma, "pass": pass, "reports": reports })),
        pass,
        summary: format!("subell: {}", margins.join(", ")),
    })
}

pub const GAMMA_KEYS: &[&str] = &["grad-floor", "gamma-factor", "mu-fraction", "mu-max", "per-point"];

pub fn gamma_search_cmd(p: &Params) -> CmdResult {
    let psi = psi(p)?;
    let r = region(p, psi.dim())?;
    let b = band(p)?;
    let m = metric(p, psi.dim())?;
    let g = gamma_search(&psi, &m, &b, &r, p.positive("grad-floor", 1e-6)?)?;
    let gamma = p.positive("gamma-factor", 2.0)? * g.gamma0;
    let wf = WeightField::new(psi, gamma)?;
    let mut subell = Vec::new();
    let mut mu = Vec::new();
    for j in [1u8, 2] {
        subell.push(subellipticity_check(&wf, &m, j, &r, &b)?);
        mu.push(mu_search(
            &wf,
            &m,
            j,
            &r,
            &b,
            p.positive("mu-fraction", 0.1)?,
            p.positive("mu-max", 1e12)?,
            p.get_or("per-point", 200)?,
        )?);
    }
    let pass = g.gamma0.is_finite() && subell.iter().all(|s| s.margin > 0.0) && mu.iter().all(|m| m.recheck_ok);
    Ok(Outcome {
        text: to_json(&json!({ "search": g, "gamma": gamma, "subellipticity": subell, "mu": mu, "pass": pass })),
        pass,
        summary: format!("gamma-search: gamma0 = {:e}, mu = {:e}, {:e}", g.gamma0, mu[0].mu, mu[1].mu),
    })
}

// ---- discrete operators ----

pub fn assemble_cmd(p: &Params) -> CmdResult {
    let op = operator(p)?;
    let count: usize = p.get_or("count", 0)?;
    let scale = if count > 0 { Some(spectrum(&op, count.min(op.size()))?) } else { None };
    let defect = op.symmetry_defect();
    Ok(Outcome {
        text: write_columnar(&op, scale.as_ref()),
        pass: defect <= 1e-10,
        summary: format!("assemble {}: {} unknowns, symmetry defect {defect:e}", op.bc, op.size()),
    })
}

pub fn spectrum_cmd(p: &Params) -> CmdResult {
    let op = operator(p)?;
    let count: usize = p.get_or("count", 5)?;
    if count == 0 || count > op.size() {
        return Err(p.err("count", format!("must be between 1 and {}", op.size())).into());
    }
    let full = spectrum(&op, op.size().min(count.max(KERNEL_COUNT)))?;
    let kernel_dim = kernel(&full, KERNEL_TOL).len();
    let mut s = format!(
        "# bc={}\n# size={}\n# kernel_dim={kernel_dim}\n# gram_deviation={}\nk,mu\n",
        op.bc,
        op.size(),
        fmt_f64(full.truncated(count).gram_deviation())
    );
    for (k, mu) in full.values.iter().take(count).enumerate() {
        s.push_str(&format!("{},{}\n", k + 1, fmt_f64(*mu)));
    }
    Ok(Outcome { text: s, pass: true, summary: format!("spectrum {}: mu_1 = {:e}", op.bc, full.values[0]) })
}

// ---- time stepping ----

pub const SIM_KEYS: &[&str] = &["T", "dt", "log-every", "init", "seed"];

fn initial_state(p: &Params, op: &DiscretePlateOperator, g: &Generator) -> Result<State, CmdError> {
    let desc = p.str_or("init", "smooth");
    let n = op.size();
    if desc == "smooth" {
        let (lo, len) = (op.grid.lo.clone(), op.grid.len.clone());
        let u0 = op.from_nodal(|x| {
            x.iter().enumerate().map(|(k, v)| {
                let s = (v - lo[k]) / len[k];
                16.0 * (s * (1.0 - s)).powi(2)
            }).product()
        });
        return Ok(State::new(u0, DVector::zeros(n)));
    }
    if desc == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed(p)?);
        let u0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let u1 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        return Ok(State::new(u0, u1));
    }
    if let Some(k) = desc.strip_prefix("mode:") {
        let k: usize = k.parse().map_err(|_| p.err("init", "expected mode:<k> with k ≥ 1"))?;
        if k == 0 || k > n {
            return Err(p.err("init", format!("mode index must be between 1 and {n}")).into());
        }
        return Ok(State::new(g.modes.column(k - 1).into_owned(), DVector::zeros(n)));
    }
    Err(p.err("init", "expected smooth, random or mode:<k>").into())
}

pub fn simulate_cmd(p: &Params) -> CmdResult {
    let op = operator(p)?;
    let g = generator(p, &op)?;
    let y0 = initial_state(p, &op, &g)?;
    let t_final = p.positive("T", 10.0)?;
    let dt = p.positive("dt", 1e-2)?;
    let sim = simulate(&y0, &g, t_final, dt, p.get_or("log-every", 100)?)?;
    let mut s = String::new();
    for k in 1..=2 {
        s.push_str(&format!("# power_norm_sq_{k}={}\n", fmt_f64(power_norm_sq(&g, &y0, k))));
    }
    s.push_str(&sim.log.to_csv());
    let monotone = sim.log.is_monotone(1e-12);
    Ok(Outcome {
        text: s,
        pass: monotone,
        summary: format!(
            "simulate {}: E(0) = {:e}, E(T) = {:e}, max relative increase {:e}",
            op.bc,
            sim.log.energy[0],
            sim.log.energy.last().unwrap(),
            sim.log.max_relative_increase
        ),
    })
}

pub const DECAY_KEYS: &[&str] = &["log", "power", "amp"];

/// Reads the CSV written by `simulate`.
fn read_energy_log(p: &Params, text: &str) -> Result<(EnergyLog, BTreeMap<String, String>), CmdError> {
    let mut meta = BTreeMap::new();
    let mut t = Vec::new();
    let mut energy = Vec::new();
    let mut header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(kv) = line.strip_prefix('#') {
            if let Some((k, v)) = kv.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if !header {
            if !line.starts_with("t,energy") {
                return Err(p.err("log", format!("line {}: expected the header `t,energy,...`", i + 1)).into());
            }
            header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let num = |s: Option<&&str>| s.and_then(|v| v.parse::<f64>().ok());
        match (num(cols.first()), num(cols.get(1))) {
            (Some(a), Some(b)) => {
                t.push(a);
                energy.push(b);
            }
            _ => return Err(p.err("log", format!("line {}: expected numbers", i + 1)).into()),
        }
    }
    if t.is_empty() {
        return Err(p.err("log", "no rows").into());
    }
    let get = |k: &str| meta.get(k).and_then(|v| v.parse::<f64>().ok());
    let log = EnergyLog {
        scheme: meta.get("scheme").cloned().unwrap_or_default(),
        dt: get("dt").unwrap_or(f64::NAN),
        log_every: get("log_every").map_or(0, |v| v as usize),
        dissipation: vec![0.0; t.len()],
        cumulative_dissipation: vec![0.0; t.len()],
        max_relative_increase: get("max_relative_increase").unwrap_or(f64::NAN),
        kernel_drift: get("kernel_drift").unwrap_or(f64::NAN),
        t,
        energy,
    };
    Ok((log, meta))
}

pub fn decay_fit_cmd(p: &Params) -> CmdResult {
    let Some(path) = p.raw("log") else {
        return Err(p.err("log", "required: an energy log written by simulate").into());
    };
    let text = std::fs::read_to_string(path).map_err(|e| p.err("log", e))?;
    let (log, meta) = read_energy_log(p, &text)?;
    let n: u32 = p.get_or("power", 1)?;
    if n == 0 {
        return Err(p.err("power", "must be at least 1").into());
    }
    let amp = match p.get::<f64>("amp")? {
        Some(a) => a,
        None => meta
            .get(&format!("power_norm_sq_{n}"))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| p.err("amp", format!("not given and the log has no power_norm_sq_{n}")))?,
    };
    let fit = decay_fit(&log, n, amp).map_err(|e| p.err("amp", e))?;
    let pass = fit.c.is_finite();
    Ok(Outcome { text: to_json(&fit), pass, summary: format!("decay-fit: C = {:e} at t = {}", fit.c, fit.t_at_sup) })
}

// ---- resolvent ----

pub const RESOLVENT_KEYS: &[&str] = &["sigma-grid"];

pub fn resolvent_cmd(p: &Params) -> CmdResult {
    let op = operator(p)?;
    let g = generator(p, &op)?;
    let grid = parse_sigma_grid(&p.str_or("sigma-grid", "0:200:0.5")).map_err(|e| p.err("sigma-grid", e))?;
    let report = resolvent_sweep(&g, &grid)?;
    let pass = report.c.is_finite() && report.skipped == 0;
    Ok(Outcome {
        summary: format!("resolvent {}: C = {:e} ({} points, {} skipped)", op.bc, report.c, report.points.len(), report.skipped),
        text: report.to_csv(),
        pass,
    })
}

// ---- catalog ----

pub const CATALOG_KEYS: &[&str] = &["bc", "a", "dim"];

pub fn catalog_cmd(p: &Params) -> CmdResult {
    let dim: usize = p.get_or("dim", 1)?;
    if let Some(name) = p.raw("bc") {
        let a = p.get_or("a", default_param(name))?;
        let pair = catalog_bc(name, &CatalogParams::scalar(name, a, dim))?;
        return Ok(Outcome { text: write_boundary_pair(&pair), pass: true, summary: format!("catalog: {name}") });
    }
    let mut entries = Vec::new();
    for name in ALL_NAMES {
        let a = p.get_or("a", default_param(name))?;
        let det: Option<C64> = closed_form_det_unit(name, C64::new(a, 0.0));
        entries.push(json!({
            "name": name,
            "catalog": CATALOG.contains(&name),
            "default_param": default_param(name),
            "det_at_unit": det,
        }));
    }
    Ok(Outcome { text: to_json(&entries), pass: true, summary: format!("catalog: {} pairs", entries.len()) })
}
