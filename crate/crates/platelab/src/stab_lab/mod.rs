//! Damped plate semigroup `dY/dt = -AY` with `A = [[0, -I], [P, α]]` on
//! pairs `Y = (u⁰, u¹)` of scaled grid functions.
//!
//! The kernel `N = ker P × {0}` is split off with the linear forms
//! `F_j(Y) = ⟨αϕ_j, ϕ_j⟩⁻¹(⟨αu⁰, ϕ_j⟩ + ⟨u¹, ϕ_j⟩)`; `Ḣ = ∩ ker F_j` is
//! invariant and carries `‖Y‖²_Ḣ = ⟨Pu⁰, u⁰⟩ + ‖u¹‖²`. The decomposition is
//! not orthogonal, so the reduced generator is written in coordinates on
//! `Ḣ` rather than by deflation.

mod resolvent;
mod time;

pub use resolvent::{
    apriori_bound_ratio, halfplane_check, parse_sigma_grid, resolvent_norm, resolvent_sweep, HalfplaneReport,
    HessenbergResolvent, ResolventNorm,
    SweepPoint, SweepReport,
};
pub use time::{crossing_frequency, decay_fit, power_norm_sq, simulate, step, DecayFit, EnergyLog, Propagator, Simulation};

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::plate_discrete::{kernel, spectrum, DiscretePlateOperator, Profile, KERNEL_COUNT, KERNEL_TOL};

/// State `(u⁰, u¹)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u0: DVector<f64>,
    pub u1: DVector<f64>,
    pub t: f64,
}

impl State {
    pub fn new(u0: DVector<f64>, u1: DVector<f64>) -> Self {
        Self { u0, u1, t: 0.0 }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(DVector::zeros(n), DVector::zeros(n))
    }

    pub fn stacked(&self) -> DVector<f64> {
        let n = self.u0.len();
        DVector::from_fn(2 * n, |i, _| if i < n { self.u0[i] } else { self.u1[i - n] })
    }

    pub fn from_stacked(y: &DVector<f64>, t: f64) -> Self {
        let n = y.len() / 2;
        Self { u0: y.rows(0, n).into_owned(), u1: y.rows(n, n).into_owned(), t }
    }

    pub fn is_finite(&self) -> bool {
        self.u0.iter().chain(self.u1.iter()).all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { u0: &self.u0 * c, u1: &self.u1 * c, t: self.t }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { u0: &self.u0 - &other.u0, u1: &self.u1 - &other.u1, t: self.t }
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub op: DiscretePlateOperator,
    /// Symmetric part of the operator matrix.
    pub p: DMatrix<f64>,
    /// Damping at the unknowns.
    pub alpha: DVector<f64>,
    /// `L²`-orthonormal kernel basis `φ_j`.
    pub kernel_l2: Vec<DVector<f64>>,
    /// Basis of the same space, orthonormal for `⟨α·, ·⟩`.
    pub kernel_alpha: Vec<DVector<f64>>,
    /// All eigenvalues of `p`, ascending; the first `kernel_l2.len()` are
    /// treated as zero.
    pub mu: Vec<f64>,
    /// Matching `L²`-orthonormal eigenvectors as columns.
    pub modes: DMatrix<f64>,
}

pub const ALPHA_GRAM_TOL: f64 = 1e-12;

pub fn build_generator(op: &DiscretePlateOperator, alpha: &Profile) -> Result<Generator> {
    let a = DVector::from_iterator(op.size(), op.coords().iter().map(|x| alpha.eval(x)));
    build_generator_with_values(op, a)
}

pub fn build_generator_with_values(op: &DiscretePlateOperator, alpha: DVector<f64>) -> Result<Generator> {
    if alpha.len() != op.size() {
        return invalid("damping has the wrong length");
    }
    if let Some(v) = alpha.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return invalid(format!("damping must be finite and nonnegative, found {v}"));
    }
    let full = spectrum(op, op.size())?;
    let kernel_l2 = kernel(&full.truncated(KERNEL_COUNT), KERNEL_TOL);
    let cell = op.cell;
    let a_inner = |u: &DVector<f64>, v: &DVector<f64>| cell * u.component_mul(&alpha).dot(v);
    let mut kernel_alpha: Vec<DVector<f64>> = Vec::new();
    for phi in &kernel_l2 {
        let mut w = phi.clone();
        for q in &kernel_alpha {
            w -= q * a_inner(&w, q);
        }
        let nrm2 = a_inner(&w, &w);
        if !(nrm2 > ALPHA_GRAM_TOL) {
            return Err(Error::Singular(format!(
                "⟨α·,·⟩ is degenerate on the kernel of P (dimension {}): residual α-norm² {nrm2:e}; α must be positive on an open set",
                kernel_l2.len()
            )));
        }
        kernel_alpha.push(w / nrm2.sqrt());
    }
    Ok(Generator {
        op: op.clone(),
        p: op.symmetric_part(),
        alpha,
        kernel_l2,
        kernel_alpha,
        mu: full.values,
        modes: full.vectors,
    })
}

impl Generator {
    pub fn size(&self) -> usize {
        self.op.size()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_l2.len()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.op.cell * u.dot(v)
    }

    pub fn alpha_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.op.cell * u.component_mul(&self.alpha).dot(v)
    }

    /// `⟨αϕ_i, ϕ_j⟩`.
    pub fn alpha_gram(&self) -> DMatrix<f64> {
        let k = self.kernel_dim();
        DMatrix::from_fn(k, k, |i, j| self.alpha_inner(&self.kernel_alpha[i], &self.kernel_alpha[j]))
    }

    /// `AY = (-u¹, Pu⁰ + αu¹)`.
    pub fn apply(&self, y: &State) -> State {
        State { u0: -&y.u1, u1: &self.p * &y.u0 + self.alpha.component_mul(&y.u1), t: y.t }
    }

    /// Dense `A` on stacked states.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            a[(i, n + i)] = -1.0;
            a[(n + i, n + i)] = self.alpha[i];
        }
        a.view_mut((n, 0), (n, n)).copy_from(&self.p);
        a
    }

    /// `F_{ϕ_j}(Y)` for every kernel vector.
    pub fn kernel_forms(&self, y: &State) -> Vec<f64> {
        self.kernel_alpha
            .iter()
            .map(|phi| (self.alpha_inner(&y.u0, phi) + self.inner(&y.u1, phi)) / self.alpha_inner(phi, phi))
            .collect()
    }

    /// `(Π_N Y, Π_Ḣ Y)`; the identity split when the kernel is trivial.
    pub fn kernel_projection(&self, y: &State) -> (State, State) {
        let n = self.size();
        let mut pn = State { u0: DVector::zeros(n), u1: DVector::zeros(n), t: y.t };
        for (f, phi) in self.kernel_forms(y).iter().zip(&self.kernel_alpha) {
            pn.u0 += phi * *f;
        }
        let ph = y.sub(&pn);
        (pn, ph)
    }

    /// `½(‖u¹‖² + ⟨Pu⁰, u⁰⟩)`.
    pub fn energy(&self, y: &State) -> f64 {
        0.5 * (self.inner(&y.u1, &y.u1) + self.inner(&(&self.p * &y.u0), &y.u0))
    }

    /// `‖Y‖²_Ḣ` evaluated in modal coordinates, kernel modes dropped.
    pub fn hdot_norm_sq(&self, y: &State) -> f64 {
        let c0 = self.modes.tr_mul(&y.u0) * self.op.cell;
        let c1 = self.modes.tr_mul(&y.u1) * self.op.cell;
        let k = self.kernel_dim();
        let pot: f64 = (k..self.size()).map(|j| self.mu[j] * c0[j] * c0[j]).sum();
        pot + c1.norm_squared()
    }

    /// `⟨αu¹, u¹⟩`, the energy dissipation rate.
    pub fn dissipation(&self, u1: &DVector<f64>) -> f64 {
        self.alpha_inner(u1, u1)
    }

    /// Dimension of `Ḣ`.
    pub fn reduced_dim(&self) -> usize {
        2 * self.size() - self.kernel_dim()
    }

    /// Isometric coordinates on `Ḣ`: `(√μ_k c_k(u⁰))_{k ∉ ker}` followed by
    /// the modal coefficients of `u¹`. The `Π_Ḣ` part of `y` is used.
    pub fn to_reduced(&self, y: &State) -> DVector<f64> {
        let (_, yh) = self.kernel_projection(y);
        let n = self.size();
        let k = self.kernel_dim();
        let c0 = self.modes.tr_mul(&yh.u0) * self.op.cell;
        let c1 = self.modes.tr_mul(&yh.u1) * self.op.cell;
        DVector::from_fn(self.reduced_dim(), |i, _| if i < n - k { self.mu[k + i].sqrt() * c0[k + i] } else { c1[i - (n - k)] })
    }

    /// Inverse of [`Self::to_reduced`]; the kernel component of `u⁰` is
    /// fixed by `F_j = 0`.
    pub fn from_reduced(&self, w: &DVector<f64>) -> State {
        let n = self.size();
        let k = self.kernel_dim();
        let r = n - k;
        let mut u0 = DVector::zeros(n);
        for i in 0..r {
            u0 += self.modes.column(k + i) * (w[i] / self.mu[k + i].sqrt());
        }
        let u1 = &self.modes * w.rows(r, n);
        for phi in &self.kernel_alpha {
            let b = -(self.alpha_inner(&u0, phi) + self.inner(&u1, phi)) / self.alpha_inner(phi, phi);
            u0 += phi * b;
        }
        State::new(u0, u1)
    }

    /// Matrix of `A` restricted to `Ḣ` in the coordinates of
    /// [`Self::to_reduced`]: `[[0, -S], [Sᵀ, D]]` with `S = [diag √μ | 0]`
    /// and `D_kl = ⟨αe_l, e_k⟩`.
    pub fn reduced_matrix(&self) -> DMatrix<f64> {
        let n = self.size();
        let k = self.kernel_dim();
        let r = n - k;
        let mut m = DMatrix::zeros(r + n, r + n);
        for i in 0..r {
            let s = self.mu[k + i].sqrt();
            m[(i, r + k + i)] = -s;
            m[(r + k + i, i)] = s;
        }
        let mut am = self.modes.clone();
        for (i, a) in self.alpha.iter().enumerate() {
            am.row_mut(i).scale_mut(*a);
        }
        let d = self.modes.tr_mul(&am) * self.op.cell;
        m.view_mut((r, r), (n, n)).copy_from(&d);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plate_discrete::{assemble, Grid, PlateMetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn gen(bc: &str, n: usize, alpha: Profile) -> Generator {
        let op = assemble(&Grid::interval(1.0, n).unwrap(), bc, &PlateMetric::Identity, 0.0).unwrap();
        build_generator(&op, &alpha).unwrap()
    }

    pub(crate) fn random_state(n: usize, rng: &mut ChaCha8Rng) -> State {
        let mut v = || DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng));
        State::new(v(), v())
    }

    fn bump() -> Profile {
        Profile::Bump { lo: 0.3, hi: 0.5, amp: 1.0 }
    }

    #[test]
    fn clamped_has_no_kernel() {
        let g = gen("clamped", 30, bump());
        assert_eq!(g.kernel_dim(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = random_state(g.size(), &mut rng);
        let (pn, ph) = g.kernel_projection(&y);
        assert_eq!(pn.u0.amax(), 0.0);
        assert_eq!(ph, y);
    }

    #[test]
    fn neumann_kernel_normalization() {
        let g = gen("neumann_pair", 40, bump());
        assert_eq!(g.kernel_dim(), 1);
        let one = g.op.from_nodal(|_| 1.0);
        let expect = &one / g.alpha_inner(&one, &one).sqrt();
        let phi = &g.kernel_alpha[0];
        assert!((phi - &expect).amax() <= 1e-8 * expect.amax() || (phi + &expect).amax() <= 1e-8 * expect.amax());
        assert!((g.alpha_gram()[(0, 0)] - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn zero_damping_with_kernel_is_rejected() {
        let op = assemble(&Grid::interval(1.0, 20).unwrap(), "neumann_pair", &PlateMetric::Identity, 0.0).unwrap();
        assert!(matches!(build_generator(&op, &Profile::Constant(0.0)), Err(Error::Singular(_))));
        assert!(build_generator(&op, &Profile::Constant(-1.0)).is_err());
    }

    #[test]
    fn projector_algebra_and_range() {
        let g = gen("neumann_pair", 30, bump());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = State::new(g.kernel_alpha[0].clone(), DVector::zeros(g.size()));
        let (pn, ph) = g.kernel_projection(&phi);
        assert!((pn.u0 - &phi.u0).amax() <= 1e-12 && ph.u0.amax() <= 1e-12);
        for _ in 0..10 {
            let y = random_state(g.size(), &mut rng);
            let (pn, ph) = g.kernel_projection(&y);
            let (pnn, _) = g.kernel_projection(&pn);
            assert!((pnn.u0 - &pn.u0).amax() <= 1e-10 * pn.u0.amax().max(1.0));
            let (pnh, _) = g.kernel_projection(&ph);
            assert!(pnh.u0.amax() <= 1e-10 * y.u0.amax());
            let ay = g.apply(&y);
            let scale = ay.u1.amax() + ay.u0.amax();
            assert!(g.kernel_forms(&ay)[0].abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn energy_two_routes() {
        let g = gen("neumann_pair", 30, bump());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let y = random_state(g.size(), &mut rng);
            let e = g.energy(&y);
            let (_, ph) = g.kernel_projection(&y);
            let h = 0.5 * g.hdot_norm_sq(&ph);
            assert!((e - h).abs() <= 1e-10 * e, "{e} {h}");
        }
        let phi = State::new(g.kernel_alpha[0].clone(), DVector::zeros(g.size()));
        assert!(g.energy(&phi) <= 1e-8);
        let v = State::new(DVector::zeros(g.size()), g.op.from_nodal(|x| x[0]));
        assert!((g.energy(&v) - 0.5 * g.inner(&v.u1, &v.u1)).abs() <= 1e-15);
    }

    #[test]
    fn reduced_coordinates_are_isometric_and_intertwine() {
        let g = gen("neumann_pair", 24, bump());
        let ad = g.reduced_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let w = DVector::from_fn(g.reduced_dim(), |_, _| StandardNormal.sample(&mut rng));
            let y = g.from_reduced(&w);
            assert!(g.kernel_forms(&y)[0].abs() <= 1e-10 * w.amax());
            assert!((g.to_reduced(&y) - &w).amax() <= 1e-9 * w.amax());
            assert!((g.hdot_norm_sq(&y) - w.norm_squared()).abs() <= 1e-9 * w.norm_squared());
            let lhs = g.to_reduced(&g.apply(&y));
            let rhs = &ad * &w;
            assert!((lhs - &rhs).amax() <= 1e-8 * rhs.amax());
        }
    }
}
