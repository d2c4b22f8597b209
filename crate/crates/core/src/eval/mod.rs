//! Numerical evaluation of `S_{n,c}(x)` and of the kernel `T_{n,c}(x, y)`.
//!
//! Three routes are offered for `S`:
//!
//! * [`s_series`] sums the squared-coefficient power series, with a
//!   certified geometric tail bound;
//! * [`s_closed`] goes through ₂F₁(n/c, n/c; 1; (cx/(1+cx))²) for `c ≠ 0` and
//!   `e^{-2nx} I₀(2nx)` for `c = 0`;
//! * [`s_quad`] applies Gauss–Chebyshev quadrature to the integral
//!   representation, doubling the node count until two levels agree.

mod kernels;
mod quadrature;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::params::Params;
use crate::pmf::ln_poisson;

pub use kernels::{bessel_i0, bessel_i0e, hyp2f1_diag};
use kernels::{bessel_i0e_sum, hyp2f1_diag_sum, sum_positive, LogSum, SeriesSum, Step, MAX_TERMS};
pub use quadrature::{QuadratureRule, RuleKind};

/// Default relative tolerance of every numerical route.
pub const DEFAULT_RTOL: f64 = 1e-12;

/// Above this ₂F₁ argument the closed form hands over to quadrature; the
/// series would need more than ~10⁴ terms.
pub const Z_SWITCH: f64 = 0.995;

/// First and last rung of the adaptive quadrature ladder.
pub const QUAD_START: usize = 16;
pub const QUAD_MAX: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "quadrature")]
    Quadrature,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Series, Method::ClosedForm, Method::Quadrature];

    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::ClosedForm => "closed",
            Method::Quadrature => "quadrature",
        }
    }
}

/// A value together with the route that produced it and that route's own
/// error claim (truncation or inter-level difference plus rounding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
    pub terms_or_nodes: usize,
}

impl EvalResult {
    fn exact_one(method: Method) -> Self {
        EvalResult {
            value: 1.0,
            method,
            err_estimate: 0.0,
            terms_or_nodes: 1,
        }
    }

    fn from_series(s: SeriesSum, ln_prefactor: f64, method: Method) -> Self {
        let value = (s.ln_sum + ln_prefactor).exp();
        let rel = s.rel_error() + f64::EPSILON * (1.0 + ln_prefactor.abs() + s.ln_sum.abs());
        EvalResult {
            value,
            method,
            err_estimate: value * rel,
            terms_or_nodes: s.terms,
        }
    }
}

fn series_tol(rtol: f64) -> f64 {
    (0.01 * rtol).max(1e-18)
}

/// `Σ_k (e^{-λ} λ^k / k!)²`, summed outwards from the mode `k₀ = ⌊λ⌋` so
/// that the work is `O(√λ)` instead of `O(λ)`. Both directions have
/// decreasing term ratios, which gives certified geometric tails.
fn szasz_series(lambda: f64, tol: f64) -> SeriesSum {
    let k0 = lambda.floor() as u64;
    let up = sum_positive(2.0 * ln_poisson(k0, lambda), tol, MAX_TERMS, |k| {
        let r = lambda / (k0 + k as u64 + 1) as f64;
        Step::Ratio {
            ln_ratio: 2.0 * r.ln(),
            sup_ratio: r * r,
        }
    });
    if k0 == 0 {
        return up;
    }
    let down = sum_positive(2.0 * ln_poisson(k0 - 1, lambda), tol, MAX_TERMS, |k| {
        let j = k0 - 1 - k as u64;
        if j == 0 {
            return Step::Stop;
        }
        let r = j as f64 / lambda;
        Step::Ratio {
            ln_ratio: 2.0 * r.ln(),
            sup_ratio: r * r,
        }
    });
    let mut total = LogSum::new();
    total.add_ln(up.ln_sum);
    total.add_ln(down.ln_sum);
    SeriesSum {
        ln_sum: total.ln(),
        terms: up.terms + down.terms,
        tail_rel: up.tail_rel.max(down.tail_rel),
        rounding_rel: up.rounding_rel.max(down.rounding_rel),
    }
}

/// `S_{n,c}(x)` by its power series in `x/(1+cx)` (Szász: in `nx`).
pub fn s_series(params: &Params, x: f64, rtol: f64) -> Result<EvalResult> {
    params.check_domain(x)?;
    if x == 0.0 {
        return Ok(EvalResult::exact_one(Method::Series));
    }
    let n = params.n();
    let c = params.c();
    let tol = series_tol(rtol);

    let sum = if let Some(l) = params.l() {
        // (C(l,k) v^k (1-v)^{l-k})², v = |c|x
        let v = -c * x;
        if v >= 1.0 {
            return Ok(EvalResult::exact_one(Method::Series));
        }
        let lf = l as f64;
        let ln_odds = 2.0 * (v / (1.0 - v)).ln();
        sum_positive(2.0 * lf * (-v).ln_1p(), tol, MAX_TERMS, |k| {
            if k as u64 >= l {
                return Step::Stop;
            }
            let r = (lf - k as f64) / (k as f64 + 1.0);
            Step::Ratio {
                ln_ratio: 2.0 * r.ln() + ln_odds,
                sup_ratio: f64::INFINITY,
            }
        })
    } else if c == 0.0 {
        szasz_series(n * x, tol)
    } else {
        // ((n (n+c) ⋯ (n+(k-1)c)) / k!)² (x/(1+cx))^{2k}
        let y = x / (1.0 + c * x);
        let ln_y2 = 2.0 * y.ln();
        let limit = (c * y) * (c * y);
        sum_positive(-2.0 * (n / c) * (c * x).ln_1p(), tol, MAX_TERMS, |k| {
            let kf = k as f64;
            let r = (n + kf * c) / (kf + 1.0);
            let rho = r * r * y * y;
            Step::Ratio {
                ln_ratio: 2.0 * r.ln() + ln_y2,
                sup_ratio: rho.max(limit),
            }
        })
    };
    Ok(EvalResult::from_series(sum, 0.0, Method::Series))
}

/// `S_{n,c}(x)` through the ₂F₁ or I₀ closed form; delegates to [`s_quad`]
/// when the ₂F₁ argument exceeds [`Z_SWITCH`].
pub fn s_closed(params: &Params, x: f64) -> Result<EvalResult> {
    params.check_domain(x)?;
    if x == 0.0 {
        return Ok(EvalResult::exact_one(Method::ClosedForm));
    }
    let n = params.n();
    let c = params.c();
    if c == 0.0 {
        let s = bessel_i0e_sum(2.0 * n * x)?;
        return Ok(EvalResult::from_series(s, 0.0, Method::ClosedForm));
    }
    let u = c * x;
    if let Some(l) = params.l() {
        let lf = l as f64;
        if u <= -1.0 {
            return Ok(EvalResult::exact_one(Method::ClosedForm));
        }
        let r = u / (1.0 + u);
        let z = r * r;
        // the terminating series is palindromic: F(z) = z^l F(1/z)
        let (prefactor, arg) = if z <= 1.0 {
            (2.0 * lf * u.ln_1p(), z)
        } else {
            let inv = (1.0 + u) / u;
            (2.0 * lf * (-u).ln(), inv * inv)
        };
        let s = hyp2f1_diag_sum(-lf, arg)?;
        return Ok(EvalResult::from_series(s, prefactor, Method::ClosedForm));
    }
    let a = n / c;
    let r = u / (1.0 + u);
    let z = r * r;
    if z > Z_SWITCH {
        return s_quad(params, x, QUAD_START);
    }
    let s = hyp2f1_diag_sum(a, z)?;
    Ok(EvalResult::from_series(
        s,
        -2.0 * a * u.ln_1p(),
        Method::ClosedForm,
    ))
}

fn s_integrand(params: &Params, x: f64) -> impl Fn(f64, f64, f64) -> f64 {
    let c = params.c();
    let n = params.n();
    let a = params.a();
    let beta = 1.0 + 2.0 * c * x;
    let big = beta * beta;
    let two_nx = 2.0 * n * x;
    // For c > 0 and a >= 1/2 the substitution tan(φ'/2) = β tan(φ/2) turns
    // the integral into β^{1-2a} (1/π)∫ (β² t + 1 - t)^{a-1} dt/√(t(1-t)).
    // The original integrand concentrates in a layer of width ~1/β² for
    // large x; the transformed one is spread out (a polynomial for integer
    // a).
    let euler = c > 0.0 && a.is_some_and(|a| a >= 0.5);
    let ln_beta = beta.ln();
    move |_t, lo, hi| match a {
        None => (-two_nx * lo).exp(),
        Some(a) if euler => {
            let base = lo * big + hi;
            ((a - 1.0) * base.ln() + (1.0 - 2.0 * a) * ln_beta).exp()
        }
        Some(a) => {
            let base = lo + hi * big;
            if a.fract() == 0.0 && a.abs() <= 64.0 {
                base.powi(-a as i32)
            } else {
                base.powf(-a)
            }
        }
    }
}

fn quad_rule_for(params: &Params, m: usize) -> QuadratureRule {
    if params.a().is_some() {
        QuadratureRule::chebyshev_01(m)
    } else {
        QuadratureRule::chebyshev_m11(m)
    }
}

/// `S_{n,c}(x)` by Gauss–Chebyshev quadrature of its integral
/// representation, starting from `m` nodes.
pub fn s_quad(params: &Params, x: f64, m: usize) -> Result<EvalResult> {
    s_quad_tol(params, x, m, DEFAULT_RTOL)
}

/// [`s_quad`] with an explicit relative tolerance for the ladder.
pub fn s_quad_tol(params: &Params, x: f64, m: usize, rtol: f64) -> Result<EvalResult> {
    params.check_domain(x)?;
    let f = s_integrand(params, x);
    adaptive_quad(m, rtol, |m| {
        quad_rule_for(params, m).integrate_gaps(&f) / PI
    })
}

fn adaptive_quad(m: usize, rtol: f64, level: impl Fn(usize) -> f64) -> Result<EvalResult> {
    let mut m = m.max(2);
    let top = QUAD_MAX.max(m);
    let mut prev = level(m);
    loop {
        if 2 * m > top {
            // nothing to compare against at a single level
            return Ok(EvalResult {
                value: prev,
                method: Method::Quadrature,
                err_estimate: f64::INFINITY,
                terms_or_nodes: m,
            });
        }
        m *= 2;
        let cur = level(m);
        let diff = (cur - prev).abs();
        if diff < (rtol * cur.abs()).max(1e-13) || 2 * m > top {
            return Ok(EvalResult {
                value: cur,
                method: Method::Quadrature,
                err_estimate: diff + 4.0 * f64::EPSILON * cur.abs(),
                terms_or_nodes: m,
            });
        }
        prev = cur;
    }
}

/// The kernel `T_{n,c}(x, y)` via ₂F₁ (or I₀ for `c = 0`).
pub fn t_closed(params: &Params, x: f64, y: f64) -> Result<f64> {
    params.check_domain(x)?;
    params.check_domain(y)?;
    let n = params.n();
    let c = params.c();
    if c == 0.0 {
        let (sx, sy) = (x.sqrt(), y.sqrt());
        let s = bessel_i0e_sum(2.0 * n * sx * sy)?;
        return Ok((s.ln_sum - n * (sx - sy) * (sx - sy)).exp());
    }
    let (u, v) = (c * x, c * y);
    if let Some(l) = params.l() {
        let lf = l as f64;
        if u == 0.0 || v == 0.0 {
            return Ok((lf * (u.ln_1p() + v.ln_1p())).exp());
        }
        let (gu, gv) = ((1.0 + u).max(0.0), (1.0 + v).max(0.0));
        let uv = u * v;
        let (prefactor, arg) = if uv <= gu * gv {
            (lf * (u.ln_1p() + v.ln_1p()), uv / (gu * gv))
        } else {
            (lf * uv.ln(), gu * gv / uv)
        };
        let s = hyp2f1_diag_sum(-lf, arg)?;
        return Ok((s.ln_sum + prefactor).exp());
    }
    let a = n / c;
    let z = (u / (1.0 + u)) * (v / (1.0 + v));
    if z > Z_SWITCH {
        let f = t_integrand(params, x, y);
        return Ok(adaptive_quad(QUAD_START, DEFAULT_RTOL, |m| {
            quad_rule_for(params, m).integrate_gaps(&f) / PI
        })?
        .value);
    }
    let s = hyp2f1_diag_sum(a, z)?;
    Ok((s.ln_sum - a * (u.ln_1p() + v.ln_1p())).exp())
}

fn t_integrand(params: &Params, x: f64, y: f64) -> impl Fn(f64, f64, f64) -> f64 {
    let n = params.n();
    let c = params.c();
    let a = params.a();
    // (√A + √B)² - 4t√(AB) = (1-t)(√A+√B)² + t(√B-√A)², with √B - √A written
    // as (B - A)/(√A + √B) and B - A = 1 + c(x+y)
    let sa = (c * c * x * y).sqrt();
    let sb = ((1.0 + c * x).max(0.0) * (1.0 + c * y).max(0.0)).sqrt();
    let outer = (sa + sb) * (sa + sb);
    let gap = 1.0 + c * (x + y);
    let inner = if outer > 0.0 { gap * gap / outer } else { 0.0 };
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let offset = n * (sx - sy) * (sx - sy);
    let cross = 2.0 * n * sx * sy;
    move |_t, lo, hi| match a {
        None => (-offset - cross * lo).exp(),
        Some(a) => {
            let base = hi * outer + lo * inner;
            if a.fract() == 0.0 && a.abs() <= 64.0 {
                base.powi(-a as i32)
            } else {
                base.powf(-a)
            }
        }
    }
}

/// The kernel `T_{n,c}(x, y)` by an `m`-node Gauss–Chebyshev rule.
pub fn t_quad(params: &Params, x: f64, y: f64, m: usize) -> Result<f64> {
    params.check_domain(x)?;
    params.check_domain(y)?;
    let f = t_integrand(params, x, y);
    Ok(quad_rule_for(params, m.max(1)).integrate_gaps(f) / PI)
}

/// All three routes for one point, in [`Method::ALL`] order.
pub fn s_all(params: &Params, x: f64, rtol: f64) -> Result<[EvalResult; 3]> {
    Ok([
        s_series(params, x, rtol)?,
        s_closed(params, x)?,
        s_quad_tol(params, x, QUAD_START, rtol)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, ratio};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn series_examples() {
        for p in [
            Params::bernstein(3).unwrap(),
            Params::szasz(2).unwrap(),
            Params::baskakov(4).unwrap(),
        ] {
            assert_eq!(s_series(&p, 0.0, DEFAULT_RTOL).unwrap().value, 1.0);
        }
        let f1 = s_series(&Params::bernstein(1).unwrap(), 0.25, DEFAULT_RTOL).unwrap();
        assert!(close(f1.value, 0.625, 1e-15));
        let g1 = s_series(&Params::baskakov(1).unwrap(), 0.5, DEFAULT_RTOL).unwrap();
        assert!(close(g1.value, 0.5, 1e-14));
        assert!(g1.err_estimate < 1e-13);
    }

    #[test]
    fn bernstein_series_terminates() {
        let p = Params::new(int(3), ratio(-1, 2)).unwrap();
        let r = s_series(&p, 0.8, DEFAULT_RTOL).unwrap();
        assert_eq!(r.terms_or_nodes, 7);
    }

    #[test]
    fn closed_examples() {
        let r = s_closed(&Params::bernstein(2).unwrap(), 0.5).unwrap();
        assert!(close(r.value, 0.375, 1e-15));
        assert_eq!(
            s_closed(&Params::szasz(1).unwrap(), 0.0).unwrap().value,
            1.0
        );
        let r = s_closed(&Params::baskakov(1).unwrap(), 0.5).unwrap();
        assert!(close(r.value, 0.5, 1e-14));
        // e^{-2} I0(2)
        let r = s_closed(&Params::szasz(1).unwrap(), 1.0).unwrap();
        let want = (-2.0f64).exp() * bessel_i0(2.0).unwrap();
        assert!(close(r.value, want, 1e-14));
    }

    #[test]
    fn closed_form_survives_the_far_end_of_the_bernstein_domain() {
        let p = Params::bernstein(5).unwrap();
        for x in [0.6, 0.9, 0.999, 1.0] {
            let a = s_closed(&p, x).unwrap().value;
            let b = s_closed(&p, 1.0 - x).unwrap().value;
            assert!(close(a, b, 1e-14), "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn closed_form_delegates_near_z_one() {
        let p = Params::baskakov(2).unwrap();
        let r = s_closed(&p, 500.0).unwrap();
        assert_eq!(r.method, Method::Quadrature);
        let s = s_series(&p, 500.0, DEFAULT_RTOL).unwrap();
        assert!(close(r.value, s.value, 1e-10), "{} vs {}", r.value, s.value);
    }

    #[test]
    fn quadrature_examples() {
        let r = s_quad(&Params::bernstein(1).unwrap(), 0.0, 2).unwrap();
        assert!(close(r.value, 1.0, 1e-15));
        let r = s_quad(&Params::bernstein(2).unwrap(), 0.5, 3).unwrap();
        assert!(close(r.value, 0.375, 1e-15));
        let r = s_quad(&Params::szasz(1).unwrap(), 0.25, QUAD_START).unwrap();
        let want = (-0.5f64).exp() * bessel_i0(0.5).unwrap();
        assert!(close(r.value, want, 1e-13));
        assert!(close(r.value, 0.645_035_3, 1e-7));
    }

    #[test]
    fn kernel_examples() {
        let p = Params::baskakov(1).unwrap();
        assert!(close(t_closed(&p, 1.0, 0.0).unwrap(), 0.5, 1e-15));
        let p = Params::szasz(2).unwrap();
        assert!(close(
            t_closed(&p, 0.3, 0.0).unwrap(),
            (-0.6f64).exp(),
            1e-15
        ));
        let p = Params::bernstein(2).unwrap();
        assert!(close(t_closed(&p, 0.5, 0.5).unwrap(), 0.375, 1e-15));
        assert!(close(t_quad(&p, 0.5, 0.5, 16).unwrap(), 0.375, 1e-12));
        let p = Params::baskakov(1).unwrap();
        assert!(close(t_quad(&p, 0.0, 0.0, 8).unwrap(), 1.0, 1e-15));
        let p = Params::szasz(1).unwrap();
        let tq = t_quad(&p, 0.25, 0.25, 64).unwrap();
        let sq = s_quad(&p, 0.25, 64).unwrap().value;
        assert!(close(tq, sq, 1e-14));
    }

    #[test]
    fn kernel_at_bernstein_endpoint() {
        // T(1/|c|, y) = p_l(y) = (|c| y)^l
        let p = Params::new(int(3), ratio(-1, 2)).unwrap();
        for y in [0.0, 0.4, 1.3, 2.0] {
            let want = (0.5f64 * y).powi(6);
            assert!(close(t_closed(&p, 2.0, y).unwrap(), want, 1e-14));
            assert!(close(t_quad(&p, 2.0, y, 8).unwrap(), want, 1e-13));
        }
    }

    #[test]
    fn domain_errors() {
        let p = Params::bernstein(2).unwrap();
        assert!(s_series(&p, 1.5, DEFAULT_RTOL).is_err());
        assert!(s_closed(&p, -0.1).is_err());
        assert!(s_quad(&p, 2.0, 16).is_err());
        assert!(t_closed(&p, 0.5, 1.1).is_err());
        assert!(t_quad(&p, 1.1, 0.5, 8).is_err());
    }
}
