//! Exact rational algebra: polynomials and rational functions over ℚ, the
//! exact squared sums of the Bernstein, BBH, Baskakov and MKZ families, and
//! exact residuals of their differential equations and recurrences.

pub mod families;
pub mod ode;
pub mod poly;
pub mod ratfn;
pub mod rational;

pub use families::{
    exact_s, f_poly_direct, f_poly_parseval, family_exact, g_rational, j_rational, u_rational,
    FamilyPoly,
};
pub use ode::{
    heun_residual, ode_residual, ode_residual_poly, recurrence_check, HeunParams, HeunTransform,
    Ode,
};
pub use poly::{Mobius, RationalPoly, Var};
pub use ratfn::{ExactEvaluator, RationalFn};
