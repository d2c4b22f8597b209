//! Exact residuals of the second-order linear ODEs, the Heun-equation forms
//! and the three-term relations satisfied by the squared sums.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::families::f_poly_direct;
use super::poly::{Mobius, RationalPoly, Var};
use super::ratfn::RationalFn;
use super::rational::{format_rational, int, ratio};
use crate::error::{Error, Result};
use crate::params::Params;

/// A differential equation `A y'' + B y' + C y = 0` with polynomial
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Ode {
    /// General `S_{n,c}`:
    /// `x(1+cx)(1+2cx) y'' + (4(n+c)x(1+cx) + 1) y' + 2n(1+2cx) y = 0`.
    /// At `c = 0` this is the Szász equation `x y'' + (4nx+1) y' + 2n y = 0`.
    S(Params),
    /// Bernstein `F_n`.
    F(u64),
    /// Baskakov `G_n`.
    G(u64),
    /// Meyer-König–Zeller `J_n`.
    J(u64),
    /// Bleimann–Butzer–Hahn `U_n`.
    U(u64),
}

fn xp(c: &[i64]) -> RationalPoly {
    RationalPoly::from_ints(c, Var::X)
}

impl Ode {
    /// `(A, B, C)` as polynomials in `x`.
    pub fn coefficients(&self) -> (RationalPoly, RationalPoly, RationalPoly) {
        match self {
            Ode::S(p) => s_coefficients(p.n_exact(), p.c_exact()),
            Ode::F(n) => s_coefficients(&int(*n as i64), &int(-1)),
            Ode::G(n) => s_coefficients(&int(*n as i64), &int(1)),
            Ode::J(n) => {
                let m = *n as i64 + 1;
                let a = &(&xp(&[0, 1]) * &xp(&[1, 1])) * &xp(&[1, -1]).pow(2);
                let b = -&(&xp(&[1, -1]) * &xp(&[-1, -4 * m, 1]));
                let c = xp(&[2 * m, 2 * m]);
                (a, b, c)
            }
            Ode::U(n) => {
                let n = *n as i64;
                let a = &(&xp(&[0, 1]) * &xp(&[1, -1])) * &xp(&[1, 1]).pow(2);
                let b = &xp(&[1, 1]) * &xp(&[1, 4 * n, -1]);
                let c = xp(&[2 * n, -2 * n]);
                (a, b, c)
            }
        }
    }

    /// Evaluates the coefficients in floating point.
    pub fn coefficients_f64(&self, x: f64) -> (f64, f64, f64) {
        let (a, b, c) = self.coefficients();
        (a.eval_f64(x), b.eval_f64(x), c.eval_f64(x))
    }
}

fn s_coefficients(n: &BigRational, c: &BigRational) -> (RationalPoly, RationalPoly, RationalPoly) {
    let x = RationalPoly::identity(Var::X);
    let one_cx = RationalPoly::linear(int(1), c.clone(), Var::X);
    let one_2cx = RationalPoly::linear(int(1), c * int(2), Var::X);
    let a = &(&x * &one_cx) * &one_2cx;
    let b = &(&x * &one_cx).scale(&((n + c) * int(4))) + &RationalPoly::one(Var::X);
    let cc = one_2cx.scale(&(n * int(2)));
    (a, b, cc)
}

/// `A y'' + B y' + C y` applied to an exact `y` (in any Möbius variable).
/// Zero iff `y` solves the equation identically.
pub fn ode_residual(y: &RationalFn, ode: &Ode) -> RationalFn {
    let (a, b, c) = ode.coefficients();
    apply(&y.to_x(), &a, &b, &c)
}

pub fn ode_residual_poly(y: &RationalPoly, ode: &Ode) -> RationalFn {
    ode_residual(&RationalFn::from_poly(y.clone()), ode)
}

fn apply(y: &RationalFn, a: &RationalPoly, b: &RationalPoly, c: &RationalPoly) -> RationalFn {
    let y1 = y.derivative();
    let y2 = y1.derivative();
    let term = |p: &RationalPoly, f: &RationalFn| &RationalFn::from_poly(p.clone()) * f;
    &(&term(a, &y2) + &term(b, &y1)) + &term(c, y)
}

/// The six constants of a Heun equation with singular points `0, 1, 1/2, ∞`:
///
/// ```text
/// y'' + (γ/x + δ/(x-1) + ε/(x-1/2)) y' + (αβx - q)/(x(x-1)(x-1/2)) y = 0
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeunParams {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub gamma: BigRational,
    pub delta: BigRational,
    pub epsilon: BigRational,
    pub q: BigRational,
}

/// How the Heun solution is obtained from the function under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeunTransform {
    None,
    /// `H(x) = y(-x)`
    NegateArg,
    /// `H(x) = y(k x)`
    Scale(BigRational),
}

impl HeunParams {
    /// Rejects parameter sets violating the Fuchs relation
    /// `α + β + 1 = γ + δ + ε`.
    pub fn new(
        alpha: BigRational,
        beta: BigRational,
        gamma: BigRational,
        delta: BigRational,
        epsilon: BigRational,
        q: BigRational,
    ) -> Result<Self> {
        let hp = HeunParams {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            q,
        };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        let lhs = &self.alpha + &self.beta + int(1);
        let rhs = &self.gamma + &self.delta + &self.epsilon;
        if lhs != rhs {
            return Err(Error::MalformedHeun(format!(
                "Fuchs relation fails: α+β+1 = {} but γ+δ+ε = {}",
                format_rational(&lhs),
                format_rational(&rhs)
            )));
        }
        Ok(())
    }

    /// Parameters for `H_{n,c}(x) = S_{n,c}(-x/c)`: `α = γ = δ = 1`,
    /// `β = ε = 2n/c`, `q = n/c`.
    pub fn for_s_family(params: &Params) -> Result<Self> {
        let a = params
            .a_exact()
            .ok_or_else(|| Error::Unsupported("the Heun form needs c != 0".into()))?;
        Self::new(int(1), &a * int(2), int(1), int(1), &a * int(2), a)
    }

    /// The matching argument transform `x ↦ -x/c`.
    pub fn transform_for(params: &Params) -> HeunTransform {
        let k = -params.c_exact().recip();
        if k.is_one() {
            HeunTransform::None
        } else if k == int(-1) {
            HeunTransform::NegateArg
        } else {
            HeunTransform::Scale(k)
        }
    }
}

#[derive(Serialize)]
struct HeunWire {
    alpha: String,
    beta: String,
    gamma: String,
    delta: String,
    epsilon: String,
    q: String,
}

impl Serialize for HeunParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HeunWire {
            alpha: format_rational(&self.alpha),
            beta: format_rational(&self.beta),
            gamma: format_rational(&self.gamma),
            delta: format_rational(&self.delta),
            epsilon: format_rational(&self.epsilon),
            q: format_rational(&self.q),
        }
        .serialize(s)
    }
}

/// Residual of the Heun equation multiplied through by `x(x-1)(x-1/2)`,
/// applied to `y` after the argument transform. Zero iff the transformed
/// function solves the equation.
pub fn heun_residual(
    y: &RationalFn,
    hp: &HeunParams,
    transform: &HeunTransform,
) -> Result<RationalFn> {
    hp.validate()?;
    let y = y.to_x();
    let h = match transform {
        HeunTransform::None => y,
        HeunTransform::NegateArg => y.compose_mobius(&Mobius::scale(int(-1))),
        HeunTransform::Scale(k) => y.compose_mobius(&Mobius::scale(k.clone())),
    };
    let x = xp(&[0, 1]);
    let xm1 = xp(&[-1, 1]);
    let xmh = RationalPoly::linear(ratio(-1, 2), int(1), Var::X);
    let a = &(&x * &xm1) * &xmh;
    let b = &(&(&xm1 * &xmh).scale(&hp.gamma) + &(&x * &xmh).scale(&hp.delta))
        + &(&x * &xm1).scale(&hp.epsilon);
    let c = RationalPoly::linear(-hp.q.clone(), &hp.alpha * &hp.beta, Var::X);
    Ok(apply(&h, &a, &b, &c))
}

/// The three relations linking consecutive Bernstein sums, as residual
/// polynomials (all zero when the relations hold):
///
/// ```text
/// 2(n+1)F_{n+1} - (2n+1)(1 + (1-2x)²)F_n + 2n(1-2x)²F_{n-1}
/// (1-2x)(F'_{n+1} - (1 - 2x(1-x))F'_n) - 2(n + 2x(1-x))F_n + 2(n+1)F_{n+1}
/// F'_{n+1} - (1-2x)²F'_{n-1} - 2(1-2x)((2n-1)F_{n-1} - (2n+1)F_n)
/// ```
pub fn recurrence_residuals_of(
    n: u64,
    f_prev: &RationalPoly,
    f: &RationalPoly,
    f_next: &RationalPoly,
) -> [RationalPoly; 3] {
    let ni = n as i64;
    let k = |v: i64| int(v);
    let one_m2x = xp(&[1, -2]);
    let sq = one_m2x.pow(2);
    let xx = xp(&[0, 1, -1]); // x(1-x)

    let r1 = &(&f_next.scale(&k(2 * ni + 2)) - &(&(&xp(&[1]) + &sq) * f).scale(&k(2 * ni + 1)))
        + &(&sq * f_prev).scale(&k(2 * ni));

    let inner = &f_next.derivative() - &(&(&xp(&[1]) - &xx.scale(&k(2))) * &f.derivative());
    let r2 = &(&(&one_m2x * &inner) - &(&(&xp(&[ni]) + &xx.scale(&k(2))) * f).scale(&k(2)))
        + &f_next.scale(&k(2 * ni + 2));

    let mix = &f_prev.scale(&k(2 * ni - 1)) - &f.scale(&k(2 * ni + 1));
    let r3 =
        &(&f_next.derivative() - &(&sq * &f_prev.derivative())) - &(&one_m2x * &mix).scale(&k(2));

    [r1, r2, r3]
}

pub fn recurrence_residuals(n: u64) -> [RationalPoly; 3] {
    assert!(n >= 1, "the relations need n >= 1");
    recurrence_residuals_of(
        n,
        &f_poly_direct(n - 1),
        &f_poly_direct(n),
        &f_poly_direct(n + 1),
    )
}

/// True iff all three relations hold exactly at index `n >= 1`.
pub fn recurrence_check(n: u64) -> bool {
    recurrence_residuals(n).iter().all(RationalPoly::is_zero)
}

/// Heun parameters for `F_n`: `α = 1, β = ε = -2n, γ = δ = 1, q = -n`.
pub fn heun_params_f(n: u64) -> HeunParams {
    let n = int(n as i64);
    HeunParams::new(int(1), -&n * int(2), int(1), int(1), -&n * int(2), -n)
        .expect("Fuchs relation holds by construction")
}

/// Heun parameters for `G_n(-x)`: `α = 1, β = ε = 2n, γ = δ = 1, q = n`.
pub fn heun_params_g(n: u64) -> HeunParams {
    let n = int(n as i64);
    HeunParams::new(int(1), &n * int(2), int(1), int(1), &n * int(2), n)
        .expect("Fuchs relation holds by construction")
}
