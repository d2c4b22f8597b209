use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{IntegerForm, Mobius, RationalPoly, Var};
use super::rational::{from_f64, int, to_f64};
use crate::error::{Error, Result};

/// `num / den` over ℚ, always stored reduced: `gcd(num, den) = 1` and `den`
/// a primitive integer polynomial with positive leading coefficient. With
/// that normal form two rational functions are equal iff their parts are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: RationalPoly,
    den: RationalPoly,
}

impl RationalFn {
    pub fn new(num: RationalPoly, den: RationalPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument(
                "rational function with zero denominator".into(),
            ));
        }
        let var = den.var();
        let num = if num.is_zero() {
            num.with_var(var)
        } else {
            num
        };
        Ok(reduce(num, den))
    }

    pub fn zero() -> Self {
        Self::from_poly(RationalPoly::zero(Var::X))
    }

    pub fn from_poly(p: RationalPoly) -> Self {
        let var = p.var();
        RationalFn {
            num: p,
            den: RationalPoly::one(var),
        }
    }

    pub fn num(&self) -> &RationalPoly {
        &self.num
    }

    pub fn den(&self) -> &RationalPoly {
        &self.den
    }

    pub fn var(&self) -> Var {
        self.den.var()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        let n1 = &self.num.derivative() * &self.den;
        let n2 = &self.num * &self.den.derivative();
        reduce(&n1 - &n2, &self.den * &self.den)
    }

    /// Exact value; `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// `self(m(x))` as a function of `x`.
    pub fn compose_mobius(&self, m: &Mobius) -> Self {
        let d = self
            .num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0));
        let (n, q1) = self.num.homogenize(m, d);
        let (dn, q2) = self.den.homogenize(m, d);
        debug_assert_eq!(q1, q2);
        Self::new(n, dn).expect("composition with a Möbius map has a nonzero denominator")
    }

    /// Rewrites a function of a Möbius variable (`s`, `u`, `w`) as a function
    /// of `x`.
    pub fn to_x(&self) -> Self {
        match self.var() {
            Var::X | Var::T => self.clone(),
            v => self.compose_mobius(&v.in_x().expect("Möbius variable")),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        reduce(self.num.scale(k), self.den.clone())
    }

    /// Precomputed integer forms for evaluating at many points.
    pub fn evaluator(&self) -> ExactEvaluator {
        ExactEvaluator {
            num: self.num.integer_form(),
            den: self.den.integer_form(),
        }
    }
}

/// Fast repeated exact evaluation of a [`RationalFn`].
#[derive(Debug, Clone)]
pub struct ExactEvaluator {
    num: IntegerForm,
    den: IntegerForm,
}

impl ExactEvaluator {
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    /// The exact value at the binary rational `x`, rounded to `f64`.
    pub fn eval_f64(&self, x: f64) -> Option<f64> {
        let r = from_f64(x).ok()?;
        self.eval(&r).map(|v| to_f64(&v))
    }
}

/// Brings `num/den` to normal form. When the denominator is a power of a
/// single linear factor (every family here) the common factor is stripped by
/// root tests, which is far cheaper than Euclid on large coefficients.
fn reduce(num: RationalPoly, den: RationalPoly) -> RationalFn {
    let var = den.var();
    if num.is_zero() {
        return RationalFn {
            num: RationalPoly::zero(var),
            den: RationalPoly::one(var),
        };
    }
    let (mut num, mut den) = (num, den);
    if den.degree() > Some(0) {
        if let Some(root) = linear_power_root(&den) {
            let factor = RationalPoly::linear(-root.clone(), int(1), var);
            while den.degree() > Some(0) && num.eval(&root).is_zero() {
                num = num.div_rem(&factor).0;
                den = den.div_rem(&factor).0;
            }
        } else {
            let g = RationalPoly::gcd(&num, &den);
            if g.degree() > Some(0) {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
    }
    let mut k = den.content();
    if den.leading().is_some_and(Signed::is_negative) {
        k = -k;
    }
    if !k.is_one() {
        let inv = k.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    RationalFn { num, den }
}

/// If `p = lc·(x - r)^k` with `k >= 1`, returns `r`.
fn linear_power_root(p: &RationalPoly) -> Option<BigRational> {
    let k = p.degree()?;
    if k == 0 {
        return None;
    }
    let lc = p.leading()?;
    let root = -(p.coeff(k - 1) / (lc * int(k as i64)));
    let candidate = RationalPoly::linear(-root.clone(), int(1), p.var())
        .pow(k as u32)
        .scale(lc);
    (candidate == *p).then_some(root)
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return reduce(&self.num + &rhs.num, self.den.clone());
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        reduce(n, &self.den * &rhs.den)
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: RationalFn) -> RationalFn {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl From<RationalPoly> for RationalFn {
    fn from(p: RationalPoly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            let c = self.den.coeff(0);
            if c.is_one() {
                return write!(f, "{}", self.num);
            }
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct FnWire {
    num: RationalPoly,
    den: RationalPoly,
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FnWire {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FnWire::deserialize(d)?;
        RationalFn::new(w.num, w.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c, Var::X)
    }

    fn f(n: &[i64], d: &[i64]) -> RationalFn {
        RationalFn::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn normal_form() {
        // (x² - 1)/(2x - 2) = (x + 1)/2
        let r = f(&[-1, 0, 1], &[-2, 2]);
        assert!(r.is_polynomial());
        assert_eq!(
            r.num(),
            &RationalPoly::new(vec![ratio(1, 2), ratio(1, 2)], Var::X)
        );
        // non-linear-power denominator goes through Euclid
        let r = f(&[1, 3, 2], &[2, 3, 1]);
        assert_eq!(r, f(&[1, 2], &[2, 1]));
        // sign and content live in the numerator
        assert_eq!(
            f(&[3], &[-6, 0, 0]),
            RationalFn::from_poly(RationalPoly::new(vec![ratio(-1, 2)], Var::X))
        );
        assert!(RationalFn::new(p(&[1]), p(&[])).is_err());
    }

    #[test]
    fn field_operations() {
        let a = f(&[1], &[1, 2]);
        let b = f(&[0, 1], &[1, 2]);
        assert_eq!(&a + &b, f(&[1, 1], &[1, 2]));
        assert_eq!(&(&a * &b) - &(&b * &a), RationalFn::zero());
        assert_eq!(&a * &a.recip().unwrap(), RationalFn::from_poly(p(&[1])));
    }

    #[test]
    fn derivative_of_reciprocal() {
        // d/dx 1/(1+2x) = -2/(1+2x)²
        assert_eq!(f(&[1], &[1, 2]).derivative(), f(&[-2], &[1, 4, 4]));
    }

    #[test]
    fn mobius_composition() {
        // w = (1-x)/(1+x): w(w(x)) = x
        let w = RationalFn::from_poly(RationalPoly::identity(Var::W)).to_x();
        assert_eq!(w, f(&[1, -1], &[1, 1]));
        let ww = w.compose_mobius(&Var::W.in_x().unwrap());
        assert_eq!(ww, RationalFn::from_poly(p(&[0, 1])));
        assert_eq!(w.eval(&ratio(1, 3)), Some(ratio(1, 2)));
        assert_eq!(w.eval(&int(-1)), None);
    }

    #[test]
    fn json_round_trip() {
        let r = f(&[1, 0, 1], &[1, 2, 1]);
        let text = serde_json::to_string(&r).unwrap();
        let back: RationalFn = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(text.contains("\"1/1\""));
    }
}
