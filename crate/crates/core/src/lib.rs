//! Typical cusp ("dropping") singular solutions of the dispersionless
//! nonlinear Schrödinger / shallow-water system
//!
//! ```text
//! h_t + (h v)_x = 0,    v_t + v v_x + α(h) h_x = 0,    α(h) = 4 + Σ α_j h^j,
//! ```
//!
//! built through the hodograph potential `B(h, v)`, reduced to the cusp
//! normal form `ξ = U³ + λ₁(τ) U + λ₂(τ)`, and checked against independent
//! oracles.
//!
//! Modules, bottom-up:
//! - [`series_algebra`]: truncated one- and two-variable power series.
//! - [`pde_series`]: the Taylor recurrence for `h B_hh + 2 B_h = α(h) B_vv`,
//!   the `C = h B` bridge and the series `G(h, u)`.
//! - [`hodograph`]: the map `(h, v) → (t, x)` and its Jacobian.
//! - [`normal_form`]: the reduction chain to the cusp miniversal deformation.
//! - [`cusp_solver`]: cubic roots, branch reconstruction, fold and zero curves.
//! - [`korobeinik`]: convergence domains of `G(h, u)`.
//! - [`verification`]: finite-difference residual oracles.

pub mod cusp_solver;
pub mod error;
pub mod hodograph;
pub mod korobeinik;
pub mod normal_form;
pub mod pde_series;
pub mod scalar;
pub mod series_algebra;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::{Coeff, Radical, Rational, ScalarKind};
pub use series_algebra::{Series1, Series2, Var};
