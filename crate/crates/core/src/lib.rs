//! Sums of squared fundamental functions of classical positive linear
//! operators.
//!
//! For a family parameter `c` and index `n` the fundamental functions
//! `p_{n,k}^{[c]}` (Bernstein for `c = -1`, Szász–Mirakjan for `c = 0`,
//! Baskakov for `c = 1`) form a partition of unity on the domain `I_c`. This
//! crate studies
//!
//! ```text
//! S_{n,c}(x) = Σ_k p_{n,k}^{[c]}(x)²
//! ```
//!
//! through several independent routes:
//!
//! * [`eval`]: power series, ₂F₁ / I₀ closed forms and Gauss–Chebyshev
//!   quadrature of the integral representations, for `S` and for the
//!   bilinear kernel `T(x, y)`;
//! * [`exact`]: exact rational-coefficient constructions of the Bernstein,
//!   Bleimann–Butzer–Hahn, Baskakov and Meyer-König–Zeller sums together
//!   with exact checks of their recurrences, differential equations and
//!   Heun-equation forms;
//! * [`legendre`]: the bridge between the Bernstein sum and Legendre
//!   polynomials;
//! * [`bounds`]: the known upper bounds, evaluated over grids;
//! * [`analysis`]: finite-difference ODE residual scans, convexity and
//!   monotonicity scans, and a log-convexity scanner that only reports.
//!
//! Grid sweeps run on rayon when the `parallel` feature (on by default) is
//! enabled; see [`par`].

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod eval;
pub mod exact;
pub mod grid;
pub mod legendre;
pub mod par;
pub mod params;
mod pmf;

/// Version of this library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use eval::{EvalResult, Method};
pub use params::{basis, gen_binom, Domain, FamilyId, Params};
