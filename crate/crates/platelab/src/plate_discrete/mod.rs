//! Finite differences for `Δ²` on an interval or a rectangle with the
//! catalog boundary pairs.
//!
//! Boundary conditions are imposed with two ghost layers that are eliminated
//! from the stencil. Dirichlet nodes are dropped; the remaining boundary
//! nodes carry the trapezoid weight `1/2`. With `W` the diagonal of weights,
//! `W M` is symmetric and the stored matrix is `S = W^{1/2} M W^{-1/2}`,
//! acting on scaled unknowns `ũ = W^{1/2} u`. The grid inner product is
//! `⟨ũ, ṽ⟩ = h^d Σ ũ_k ṽ_k`.

mod assemble;
mod io;
mod spectral;

pub use assemble::{assemble, default_param, stencil_apply_1d, SUPPORTED_1D, SUPPORTED_2D};
pub use io::{parse_profile_file, read_profile_file, write_columnar};
pub use spectral::{hkb_norm, kernel, spectrum, HkbNorm, SpectralScale, KERNEL_COUNT, KERNEL_TOL, TAIL_TOL};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform tensor grid. Nodes are numbered with the first axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: Vec<usize>,
    pub lo: Vec<f64>,
    pub len: Vec<f64>,
}

impl Grid {
    pub fn interval(length: f64, n: usize) -> Result<Self> {
        Self::new(vec![n], vec![0.0], vec![length])
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(vec![nx, ny], vec![0.0, 0.0], vec![lx, ly])
    }

    pub fn new(n: Vec<usize>, lo: Vec<f64>, len: Vec<f64>) -> Result<Self> {
        if n.is_empty() || n.len() > 2 || n.len() != lo.len() || n.len() != len.len() {
            return invalid("grid must be one or two dimensional");
        }
        if n.iter().any(|k| *k < 8) {
            return invalid("grid needs at least 8 points per axis");
        }
        if len.iter().any(|l| !(*l > 0.0)) {
            return invalid("grid lengths must be positive");
        }
        Ok(Self { n, lo, len })
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.len[axis] / (self.n[axis] - 1) as f64
    }

    /// `h^d`.
    pub fn cell(&self) -> f64 {
        (0..self.dim()).map(|k| self.h(k)).product()
    }

    pub fn node_count(&self) -> usize {
        self.n.iter().product()
    }

    pub fn index(&self, ij: &[usize]) -> usize {
        if self.dim() == 1 {
            ij[0]
        } else {
            ij[0] + self.n[0] * ij[1]
        }
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        if self.dim() == 1 {
            vec![node]
        } else {
            vec![node % self.n[0], node / self.n[0]]
        }
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node).iter().enumerate().map(|(k, i)| self.lo[k] + *i as f64 * self.h(k)).collect()
    }
}

/// Scalar field on the domain, used for stiffness, metric coefficients and
/// damping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Constant(f64),
    /// `c0 + slope·x`.
    Affine { c0: f64, slope: Vec<f64> },
    /// Smooth bump in the first coordinate: `amp·exp(1 - 1/(1 - s²))` for
    /// `|s| < 1`, `s = (2x - lo - hi)/(hi - lo)`, zero outside.
    Bump { lo: f64, hi: f64, amp: f64 },
    /// Piecewise linear interpolation in the first coordinate, constant
    /// extension outside the samples.
    Sampled { x: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Affine { c0, slope } => c0 + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            Profile::Bump { lo, hi, amp } => {
                let s = (2.0 * x[0] - lo - hi) / (hi - lo);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    amp * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            Profile::Sampled { x: xs, values } => {
                let t = x[0];
                if t <= xs[0] {
                    return values[0];
                }
                if t >= xs[xs.len() - 1] {
                    return values[values.len() - 1];
                }
                let k = xs.partition_point(|v| *v <= t) - 1;
                let w = (t - xs[k]) / (xs[k + 1] - xs[k]);
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Constant(c) => *c == 0.0,
            Profile::Bump { amp, .. } => *amp == 0.0,
            Profile::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
            Profile::Affine { c0, slope } => *c0 == 0.0 && slope.iter().all(|v| *v == 0.0),
        }
    }

    /// Parse `const:c`, `bump:lo:hi:amp` or `affine:c0:s1[:s2]`.
    pub fn parse(desc: &str) -> Result<Self> {
        let parts: Vec<&str> = desc.split(':').collect();
        let nums = |s: &[&str]| -> Result<Vec<f64>> {
            s.iter()
                .map(|v| v.trim().parse::<f64>().map_err(|_| crate::Error::InvalidInput(format!("bad number `{v}` in `{desc}`"))))
                .collect()
        };
        match parts.as_slice() {
            ["const", v] | ["constant", v] => Ok(Profile::Constant(nums(&[v])?[0])),
            ["bump", rest @ ..] if rest.len() == 3 => {
                let v = nums(rest)?;
                if !(v[1] > v[0]) {
                    return invalid("bump support must have lo < hi");
                }
                Ok(Profile::Bump { lo: v[0], hi: v[1], amp: v[2] })
            }
            ["affine", rest @ ..] if !rest.is_empty() => {
                let v = nums(rest)?;
                Ok(Profile::Affine { c0: v[0], slope: v[1..].to_vec() })
            }
            [v] => Ok(Profile::Constant(nums(&[v])?[0])),
            _ => invalid(format!("cannot read profile `{desc}`")),
        }
    }
}

/// Coefficients of the principal part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum PlateMetric {
    #[default]
    Identity,
    /// 1-D `(a(x) u'')''`.
    Stiffness(Profile),
    /// 2-D `Δ_a = ∂_x(a1 ∂_x) + ∂_y(a2 ∂_y)` squared.
    Diagonal { a1: Profile, a2: Profile },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePlateOperator {
    pub grid: Grid,
    pub bc: String,
    /// Scalar boundary coefficient for the parameterized pairs.
    pub param: f64,
    pub metric: PlateMetric,
    /// Grid nodes carrying an unknown, in matrix order.
    pub unknowns: Vec<usize>,
    /// Trapezoid weight of each unknown.
    pub weights: Vec<f64>,
    /// `S = W^{1/2} M W^{-1/2}`.
    pub matrix: DMatrix<f64>,
    /// `h^d`; several blocks share it.
    pub cell: f64,
}

impl DiscretePlateOperator {
    pub fn size(&self) -> usize {
        self.unknowns.len()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.cell * u.dot(v)
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).sqrt()
    }

    pub fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.matrix * u
    }

    /// `(S + Sᵀ)/2`.
    pub fn symmetric_part(&self) -> DMatrix<f64> {
        (&self.matrix + self.matrix.transpose()) * 0.5
    }

    /// Coordinates of every unknown.
    pub fn coords(&self) -> Vec<Vec<f64>> {
        self.unknowns.iter().map(|k| self.grid.coords(*k)).collect()
    }

    /// Scaled unknowns from nodal values `u(x_k)`.
    pub fn from_nodal(&self, f: impl Fn(&[f64]) -> f64) -> DVector<f64> {
        DVector::from_iterator(
            self.size(),
            self.unknowns.iter().zip(&self.weights).map(|(k, w)| f(&self.grid.coords(*k)) * w.sqrt()),
        )
    }

    /// Nodal values from scaled unknowns, zero on eliminated nodes.
    pub fn to_nodal(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.node_count()];
        for (i, (k, w)) in self.unknowns.iter().zip(&self.weights).enumerate() {
            out[*k] = u[i] / w.sqrt();
        }
        out
    }

    /// `max |S - Sᵀ| / max |S|`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = (&self.matrix - self.matrix.transpose()).amax();
        d / self.matrix.amax()
    }

    /// Two decoupled copies of the unknowns, as for a domain made of two
    /// disjoint pieces. The cell measures must agree. The grid of the result
    /// is that of `a`, so nodal helpers only describe the first block.
    pub fn block_diagonal(a: &Self, b: &Self) -> Result<Self> {
        if (a.cell - b.cell).abs() > 1e-14 * a.cell {
            return invalid("blocks must share the grid spacing");
        }
        let (na, nb) = (a.size(), b.size());
        let mut m = DMatrix::zeros(na + nb, na + nb);
        m.view_mut((0, 0), (na, na)).copy_from(&a.matrix);
        m.view_mut((na, na), (nb, nb)).copy_from(&b.matrix);
        let offset = a.grid.node_count();
        let mut unknowns = a.unknowns.clone();
        unknowns.extend(b.unknowns.iter().map(|k| k + offset));
        let mut weights = a.weights.clone();
        weights.extend(&b.weights);
        Ok(Self {
            grid: a.grid.clone(),
            bc: format!("{}+{}", a.bc, b.bc),
            param: a.param,
            metric: a.metric.clone(),
            unknowns,
            weights,
            matrix: m,
            cell: a.cell,
        })
    }
}

/// `max |⟨Su, v⟩ - ⟨u, Sv⟩| / (‖u‖‖v‖‖S‖)` over random scaled unknowns.
/// Every vector of unknowns satisfies the eliminated boundary conditions.
pub fn check_symmetry(op: &DiscretePlateOperator, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.size();
    let snorm = op.matrix.norm();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let d = (op.inner(&op.apply(&u), &v) - op.inner(&u, &op.apply(&v))).abs();
        worst = worst.max(d / (op.norm(&u) * op.norm(&v) * snorm));
    }
    worst
}

/// Smallest eigenvalue of the symmetric part divided by `‖S‖_2`.
pub fn rayleigh_min(op: &DiscretePlateOperator) -> (f64, f64) {
    let ev = op.symmetric_part().symmetric_eigenvalues();
    let scale = ev.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (ev.min(), scale)
}
