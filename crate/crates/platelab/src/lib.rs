//! Numerical laboratory for the damped plate equation with general boundary
//! conditions.
//!
//! * [`symbol_core`]: conjugated second and fourth order symbols, their roots
//!   and the root configuration at a boundary point.
//! * [`ls_checker`]: Lopatinskiĭ–Šapiro checks, with and without a Carleman
//!   weight, plus a rank oracle and perturbation radii.
//! * [`weight_design`]: weights `φ = exp(γψ)`, Poisson brackets and the
//!   sub-ellipticity parameter searches.
//! * [`plate_discrete`]: finite differences for the bi-Laplacian with the
//!   catalog boundary pairs.
//! * [`stab_lab`]: generator of the damped plate semigroup, time stepping,
//!   resolvent sweeps and decay fits.

pub mod error;
pub mod ls_checker;
pub mod metric;
pub mod plate_discrete;
pub mod sampling;
pub mod stab_lab;
pub mod symbol_core;
pub mod weight_design;

pub use error::{Error, Result};
pub use metric::Metric;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Format a float with 17 significant digits, the format used in every text
/// artifact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
