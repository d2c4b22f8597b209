//! Legendre polynomials and their link with the Bernstein sum `F_n`.
//!
//! Under `t = (2x² - 2x + 1)/(1 - 2x)`, which maps `[0, 1/2)` onto
//! `[1, ∞)`, one has `t - √(t²-1) = 1 - 2x` and
//!
//! ```text
//! F_n(x) = (t - √(t²-1))^n P_n(t) = (1 - 2x)^n P_n(t).
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::families::{f_poly_direct, f_poly_parseval, FamilyPoly};
use crate::exact::poly::{RationalPoly, Var};
use crate::exact::rational::{binomial, int, sqrt_exact, to_f64};
use crate::params::FamilyId;

/// Closest approach to `x = 1/2` at which the map is sampled.
pub const SINGULAR_GAP: f64 = 1e-8;

/// `P_n(t)` by the three-term recurrence
/// `(k+1)P_{k+1} = (2k+1) t P_k - k P_{k-1}`.
pub fn legendre_p(n: u64, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Exact `P_n(t)` at a rational point, by the same recurrence.
pub fn legendre_p_exact(n: u64, t: &BigRational) -> BigRational {
    let (mut p0, mut p1) = (BigRational::one(), t.clone());
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = k as i64;
        let p2 = (int(2 * k + 1) * t * &p1 - int(k) * &p0) / int(k + 1);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_n` as a polynomial in `t`, by the recurrence.
pub fn legendre_poly(n: u64) -> RationalPoly {
    let t = RationalPoly::identity(Var::T);
    let (mut p0, mut p1) = (RationalPoly::one(Var::T), t.clone());
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = k as i64;
        let p2 = (&(&t * &p1).scale(&int(2 * k + 1)) - &p0.scale(&int(k)))
            .scale(&BigRational::new(1.into(), (k + 1).into()));
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `2^{-n} Σ_k C(n,k)² (t+1)^k (t-1)^{n-k}`, exactly.
pub fn legendre_from_binom(n: u64, t: &BigRational) -> BigRational {
    let tp = t + int(1);
    let tm = t - int(1);
    let mut sum = BigRational::zero();
    for k in 0..=n {
        let c = BigRational::from_integer(binomial(n, k).pow(2));
        sum += c * pow(&tp, k) * pow(&tm, n - k);
    }
    sum / BigRational::from_integer(BigInt::one() << n as usize)
}

fn pow(b: &BigRational, e: u64) -> BigRational {
    num_traits::pow(b.clone(), e as usize)
}

/// A point of the map `x ↔ t` with its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreMap {
    pub x: f64,
    pub t: f64,
    /// `dx/dt = (1-2x)² / (4x(1-x))`; infinite at `x = 0`.
    pub dx_dt: f64,
}

impl LegendreMap {
    pub fn from_x(x: f64) -> Result<Self> {
        if !(0.0..0.5 - SINGULAR_GAP).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "the Legendre map needs 0 <= x < 1/2 - {SINGULAR_GAP:e}, got {x}"
            )));
        }
        let u = 1.0 - 2.0 * x;
        let t = (2.0 * x * x - 2.0 * x + 1.0) / u;
        Ok(LegendreMap {
            x,
            t,
            dx_dt: u * u / (4.0 * x * (1.0 - x)),
        })
    }

    pub fn from_t(t: f64) -> Result<Self> {
        if t.is_nan() || t < 1.0 || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "the Legendre map needs finite t >= 1, got {t}"
            )));
        }
        // 1 - 2x = t - √(t²-1) = 1/(t + √(t²-1)), free of cancellation
        let root = ((t - 1.0) * (t + 1.0)).sqrt();
        let u = 1.0 / (t + root);
        let x = 0.5 * (1.0 - u);
        Ok(LegendreMap {
            x,
            t,
            dx_dt: u * u / (4.0 * x * (1.0 - x)),
        })
    }

    /// `t - √(t²-1)`, which equals `1 - 2x`.
    pub fn contraction(&self) -> f64 {
        1.0 / (self.t + ((self.t - 1.0) * (self.t + 1.0)).sqrt())
    }
}

/// `t(x) = (2x² - 2x + 1)/(1 - 2x)` exactly; `None` at `x = 1/2`.
pub fn t_of_x_exact(x: &BigRational) -> Option<BigRational> {
    let u = int(1) - x * int(2);
    (!u.is_zero()).then(|| (x * x * int(2) - x * int(2) + int(1)) / u)
}

/// `x(t)` exactly when `√(t²-1)` is rational.
pub fn x_of_t_exact(t: &BigRational) -> Option<BigRational> {
    let root = sqrt_exact(&(t * t - int(1)))?;
    Some((int(1) - t + root) / int(2))
}

/// Outcome of [`neuschel_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeuschelCheck {
    pub f_value: f64,
    /// `(t - √(t²-1))^n P_n(t)`.
    pub bridge_value: f64,
    /// `F_n(x) - bridge_value`.
    pub residual: f64,
    /// `P_n(t) - (1-2x)^{-n} F_n(x)`, relative to `P_n(t)`.
    pub legendre_form_rel: f64,
}

/// Floating-point comparison of `F_n(x)` with its Legendre form.
pub fn neuschel_check(n: u64, x: f64) -> Result<NeuschelCheck> {
    let map = LegendreMap::from_x(x)?;
    let fp = FamilyPoly::new(&FamilyId::Bernstein, n).expect("Bernstein form exists");
    let f_value = fp.eval(x);
    let p = legendre_p(n, map.t);
    let bridge_value = map.contraction().powi(n as i32) * p;
    let inverse = f_value / (1.0 - 2.0 * x).powi(n as i32);
    Ok(NeuschelCheck {
        f_value,
        bridge_value,
        residual: f_value - bridge_value,
        legendre_form_rel: (p - inverse) / p,
    })
}

/// Exact form of the bridge at a rational `x` in `[0, 1/2)`:
/// `F_n(x) = (1-2x)^n P_n(t(x))`.
pub fn neuschel_exact(n: u64, x: &BigRational) -> Result<bool> {
    if x < &BigRational::zero() || x >= &BigRational::new(1.into(), 2.into()) {
        return Err(Error::InvalidArgument(format!(
            "the exact bridge needs 0 <= x < 1/2, got {x}"
        )));
    }
    let t = t_of_x_exact(x).expect("x != 1/2");
    let lhs = f_poly_direct(n).eval(x);
    let rhs = pow(&(int(1) - x * int(2)), n) * legendre_p_exact(n, &t);
    Ok(lhs == rhs)
}

/// Which derivative relations held; see [`derivative_relations_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivativeRelations {
    /// `P'_{n+1}(t) - t P'_n(t) = (n+1) P_n(t)`, exact.
    pub shift: bool,
    /// `P'_{n+1}(t) - P'_{n-1}(t) = (2n+1) P_n(t)`, exact.
    pub difference: bool,
    /// `P'_n(t) = (1-2x)^{1-n} ((1-2x)F'_n(x) + 2n F_n(x)) / (4x(1-x))`
    /// at the mapped point; exact when `x(t)` is rational, otherwise
    /// checked in floating point to `1e-10` relative.
    pub mapped: bool,
    pub mapped_exact: bool,
}

impl DerivativeRelations {
    pub fn all(&self) -> bool {
        self.shift && self.difference && self.mapped
    }
}

pub fn derivative_relations_check(n: u64, t: &BigRational) -> Result<DerivativeRelations> {
    derivative_relations_with(n, t, legendre_poly)
}

/// Same as [`derivative_relations_check`] with a caller-supplied family of
/// polynomials standing in for `P_k`.
pub fn derivative_relations_with(
    n: u64,
    t: &BigRational,
    p: impl Fn(u64) -> RationalPoly,
) -> Result<DerivativeRelations> {
    if n < 1 || t <= &int(1) {
        return Err(Error::InvalidArgument(format!(
            "derivative relations need n >= 1 and t > 1 (n = {n}, t = {t})"
        )));
    }
    let (pm, p0, pp) = (p(n - 1), p(n), p(n + 1));
    let d = |q: &RationalPoly| q.derivative().eval(t);
    let nn = int(n as i64);
    let shift = d(&pp) - t * d(&p0) == (&nn + int(1)) * p0.eval(t);
    let difference = d(&pp) - d(&pm) == (&nn * int(2) + int(1)) * p0.eval(t);

    let lhs = d(&p0);
    let (mapped, mapped_exact) = match x_of_t_exact(t) {
        Some(x) => {
            let f = f_poly_direct(n);
            let u = int(1) - &x * int(2);
            let rhs = (&u * f.derivative().eval(&x) + &nn * int(2) * f.eval(&x))
                / (pow(&u, n - 1) * int(4) * &x * (int(1) - &x));
            (lhs == rhs, true)
        }
        None => {
            let map = LegendreMap::from_t(to_f64(t))?;
            let x = map.x;
            let f = f_poly_parseval(n);
            let s = x - 0.5;
            let (fv, dfv) = (f.eval_f64(s), f.derivative().eval_f64(s));
            let u = 1.0 - 2.0 * x;
            let rhs =
                (u * dfv + 2.0 * n as f64 * fv) / (u.powi(n as i32 - 1) * 4.0 * x * (1.0 - x));
            let lhs = to_f64(&lhs);
            ((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()), false)
        }
    };
    Ok(DerivativeRelations {
        shift,
        difference,
        mapped,
        mapped_exact,
    })
}

/// `4^{-n} C(2n,n) Σ_k C(n,k)² / C(2n,2k) · cos((n-2k)θ)`, which equals
/// `P_n(cos θ)`.
pub fn cosine_rep(n: u64, theta: f64) -> f64 {
    let lead = BigRational::new(binomial(2 * n, n), BigInt::one() << (2 * n as usize));
    (0..=n)
        .map(|k| {
            let c = &lead * BigRational::new(binomial(n, k).pow(2), binomial(2 * n, 2 * k));
            to_f64(&c) * ((n as f64 - 2.0 * k as f64) * theta).cos()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;
    use std::f64::consts::PI;

    #[test]
    fn recurrence_values() {
        assert_eq!(legendre_p(0, 3.7), 1.0);
        assert_eq!(legendre_p(1, 3.7), 3.7);
        for n in 0..20 {
            assert!((legendre_p(n, 1.0) - 1.0).abs() < 1e-14);
        }
        let t = 0.3;
        assert!((legendre_p(2, t) - (3.0 * t * t - 1.0) / 2.0).abs() < 1e-16);
        assert_eq!(legendre_p_exact(2, &ratio(5, 4)), ratio(59, 32));
        assert_eq!(
            legendre_poly(2),
            RationalPoly::new(vec![ratio(-1, 2), int(0), ratio(3, 2)], Var::T)
        );
    }

    #[test]
    fn binomial_form() {
        assert_eq!(legendre_from_binom(2, &int(1)), int(1));
        assert_eq!(legendre_from_binom(2, &ratio(5, 4)), ratio(59, 32));
        assert_eq!(legendre_from_binom(3, &int(0)), int(0));
        for n in 0..15 {
            for t in [ratio(-3, 7), ratio(5, 4), int(3)] {
                assert_eq!(legendre_from_binom(n, &t), legendre_p_exact(n, &t));
            }
        }
    }

    #[test]
    fn map_round_trip() {
        for j in 0..=90 {
            let x = 0.45 * j as f64 / 90.0;
            let m = LegendreMap::from_x(x).unwrap();
            let back = LegendreMap::from_t(m.t).unwrap();
            assert!((back.x - x).abs() < 1e-13, "{x}");
            assert!((m.contraction() - (1.0 - 2.0 * x)).abs() < 1e-13);
        }
        let m = LegendreMap::from_x(0.25).unwrap();
        assert_eq!(m.t, 1.25);
        assert!((m.dx_dt - 1.0 / 3.0).abs() < 1e-15);
        assert!(LegendreMap::from_x(0.5).is_err());
        assert!(LegendreMap::from_t(0.9).is_err());
    }

    #[test]
    fn exact_map() {
        assert_eq!(t_of_x_exact(&ratio(1, 4)), Some(ratio(5, 4)));
        assert_eq!(x_of_t_exact(&ratio(5, 4)), Some(ratio(1, 4)));
        assert_eq!(x_of_t_exact(&int(2)), None);
    }

    #[test]
    fn bridge_examples() {
        let c = neuschel_check(1, 0.25).unwrap();
        assert!((c.f_value - 0.625).abs() < 1e-16 && c.residual.abs() < 1e-15);
        let c = neuschel_check(2, 0.25).unwrap();
        assert!((c.bridge_value - 0.4609375).abs() < 1e-15);
        assert_eq!(neuschel_check(5, 0.0).unwrap().residual, 0.0);
        assert!(neuschel_exact(2, &ratio(1, 4)).unwrap());
        assert!(neuschel_exact(17, &ratio(3, 7)).unwrap());
        assert!(neuschel_exact(3, &ratio(1, 2)).is_err());
    }

    #[test]
    fn derivative_relations() {
        let r = derivative_relations_check(1, &int(2)).unwrap();
        assert!(r.all() && !r.mapped_exact);
        let r = derivative_relations_check(6, &ratio(5, 4)).unwrap();
        assert!(r.all() && r.mapped_exact);
        let broken = |k: u64| {
            let p = legendre_poly(k);
            if k == 2 {
                &p + &RationalPoly::one(Var::T)
            } else {
                p
            }
        };
        // constant shifts leave derivatives alone, so only P_n = P_2 matters
        let r = derivative_relations_with(2, &int(2), broken).unwrap();
        assert!(!r.all());
    }

    #[test]
    fn cosine_representation() {
        for theta in [0.1, 0.7, 1.3] {
            assert!((cosine_rep(1, theta) - f64::cos(theta)).abs() < 1e-15);
            for n in [2, 5, 11] {
                assert!((cosine_rep(n, theta) - legendre_p(n, theta.cos())).abs() < 1e-14);
            }
        }
        assert!((cosine_rep(2, PI / 3.0) + 0.125).abs() < 1e-15);
        assert!((cosine_rep(9, 1e-9) - 1.0).abs() < 1e-14);
    }
}
