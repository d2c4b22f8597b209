use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ratfn::RationalFn;
use super::rational::{format_rational, int, parse_rational, ratio, to_f64};

/// The variable a polynomial is written in. Everything other than `X` is a
/// fixed Möbius function of `x` (see [`Var::in_x`]); `T` is the Legendre
/// variable and has no such relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    X,
    /// `s = x - 1/2`
    S,
    /// `u = 1/(1 + 2x)`
    U,
    /// `w = (1 - x)/(1 + x)`
    W,
    T,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::S => "s",
            Var::U => "u",
            Var::W => "w",
            Var::T => "t",
        }
    }

    pub fn in_x(self) -> Option<Mobius> {
        match self {
            Var::X => Some(Mobius::identity()),
            Var::S => Some(Mobius::new(int(1), ratio(-1, 2), int(0), int(1))),
            Var::U => Some(Mobius::new(int(0), int(1), int(2), int(1))),
            Var::W => Some(Mobius::new(int(-1), int(1), int(1), int(1))),
            Var::T => None,
        }
    }

    /// Numerical value of the variable at a given `x`.
    pub fn at(self, x: f64) -> f64 {
        match self {
            Var::X | Var::T => x,
            Var::S => x - 0.5,
            Var::U => 1.0 / (1.0 + 2.0 * x),
            Var::W => (1.0 - x) / (1.0 + x),
        }
    }
}

/// `(a x + b) / (c x + d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mobius {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mobius {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mobius::new(int(1), int(0), int(0), int(1))
    }

    /// `x ↦ k x`
    pub fn scale(k: BigRational) -> Self {
        Mobius::new(k, int(0), int(0), int(1))
    }

    pub fn apply(&self, x: &BigRational) -> Option<BigRational> {
        let den = &self.c * x + &self.d;
        (!den.is_zero()).then(|| (&self.a * x + &self.b) / den)
    }

    pub(crate) fn numerator(&self) -> RationalPoly {
        RationalPoly::new(vec![self.b.clone(), self.a.clone()], Var::X)
    }

    pub(crate) fn denominator(&self) -> RationalPoly {
        RationalPoly::new(vec![self.d.clone(), self.c.clone()], Var::X)
    }
}

/// Dense univariate polynomial with rational coefficients, ascending degree.
/// Trailing zeros are always trimmed; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
    var: Var,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>, var: Var) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs, var }
    }

    pub fn zero(var: Var) -> Self {
        RationalPoly {
            coeffs: Vec::new(),
            var,
        }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(int(1), var)
    }

    pub fn constant(c: BigRational, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    pub fn monomial(c: BigRational, k: usize, var: Var) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs, var)
    }

    /// The polynomial `var` itself.
    pub fn identity(var: Var) -> Self {
        Self::monomial(int(1), 1, var)
    }

    pub fn from_ints(coeffs: &[i64], var: Var) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect(), var)
    }

    /// `b + a·var`
    pub fn linear(b: BigRational, a: BigRational, var: Var) -> Self {
        Self::new(vec![b, a], var)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// True when only even powers occur.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.var);
        }
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            var: self.var,
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
            self.var,
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self(inner)`; the result is written in `inner`'s variable.
    pub fn compose(&self, inner: &RationalPoly) -> Self {
        let mut acc = Self::zero(inner.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone(), inner.var);
        }
        acc
    }

    /// `self(k·x)`.
    pub fn rescale(&self, k: &BigRational) -> Self {
        let mut p = BigRational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * &p);
            p *= k;
        }
        Self::new(coeffs, self.var)
    }

    /// Substitutes the Möbius map `m(x)` for the variable, producing a
    /// rational function of `x`.
    pub fn compose_mobius(&self, m: &Mobius) -> RationalFn {
        let Some(d) = self.degree() else {
            return RationalFn::zero();
        };
        let (num, den) = self.homogenize(m, d);
        RationalFn::new(num, den).expect("Möbius denominator power is nonzero")
    }

    /// `(Σ c_k p^k q^{d-k}, q^d)` for `m = p/q`, with `d >= degree`.
    pub(crate) fn homogenize(&self, m: &Mobius, d: usize) -> (RationalPoly, RationalPoly) {
        let p = m.numerator();
        let q = m.denominator();
        let mut p_pows = vec![RationalPoly::one(Var::X)];
        let mut q_pows = vec![RationalPoly::one(Var::X)];
        for k in 1..=d {
            p_pows.push(&p_pows[k - 1] * &p);
            q_pows.push(&q_pows[k - 1] * &q);
        }
        let mut num = RationalPoly::zero(Var::X);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            num = &num + &(&p_pows[k] * &q_pows[d - k]).scale(c);
        }
        (num, q_pows.swap_remove(d))
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.integer_form().eval(x)
    }

    /// Horner evaluation in floating point with coefficients rounded to f64.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RationalPoly) -> (RationalPoly, RationalPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return (Self::zero(self.var), self.clone());
        };
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = &rem[k + dd] / &lead;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot, self.var), Self::new(rem, self.var))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
        let (mut a, mut b) = (a.monic(), b.monic());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a
    }

    /// Rational content: positive `g` with `self / g` a primitive integer
    /// polynomial.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Coefficients over a common positive denominator, for fast exact
    /// evaluation at many points.
    pub fn integer_form(&self) -> IntegerForm {
        let denom = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let numers = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect();
        IntegerForm { numers, denom }
    }
}

/// `Σ a_k x^k / denom` with integer `a_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerForm {
    numers: Vec<BigInt>,
    denom: BigInt,
}

impl IntegerForm {
    /// Homogeneous Horner at `x = p/q`: only integer products until the final
    /// division.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let Some(d) = self.numers.len().checked_sub(1) else {
            return BigRational::zero();
        };
        let (p, q) = (x.numer(), x.denom());
        let mut acc = self.numers[d].clone();
        let mut q_pow = BigInt::one();
        for a in self.numers[..d].iter().rev() {
            q_pow *= q;
            acc = acc * p + a * &q_pow;
        }
        BigRational::new(acc, &self.denom * q_pow)
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        debug_assert!(self.is_zero() || rhs.is_zero() || self.var == rhs.var);
        let var = if self.is_zero() { rhs.var } else { self.var };
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new(
            (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
            var,
        )
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self + &(-rhs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            var: self.var,
        }
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        debug_assert!(self.is_zero() || rhs.is_zero() || self.var == rhs.var);
        let var = if self.is_zero() { rhs.var } else { self.var };
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero(var);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out, var)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let v = self.var.symbol();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "{v}")?,
                _ => write!(f, "{v}^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    variable: Var,
    coeffs: Vec<String>,
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyWire {
            variable: self.var,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = PolyWire::deserialize(d)?;
        let coeffs = wire
            .coeffs
            .iter()
            .map(|c| parse_rational(c).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalPoly::new(coeffs, wire.variable))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c, Var::X)
    }

    #[test]
    fn trims_and_degrees() {
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
        assert_eq!(RationalPoly::zero(Var::X).degree(), None);
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!(&a - &a, RationalPoly::zero(Var::X));
        assert_eq!(a.pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(p(&[5, 3, 1]).derivative(), p(&[3, 2]));
        assert_eq!(p(&[1, 0, 1]).compose(&p(&[1, 1])), p(&[2, 2, 1]));
        assert_eq!(p(&[1, 1, 1]).rescale(&int(2)), p(&[1, 2, 4]));
    }

    #[test]
    fn division_and_gcd() {
        let a = &p(&[-1, 0, 1]) * &p(&[2, 1]);
        let (q, r) = a.div_rem(&p(&[-1, 1]));
        assert_eq!(&(&q * &p(&[-1, 1])) + &r, a);
        assert!(r.is_zero());
        let g = RationalPoly::gcd(&a, &p(&[1, 2, 1]));
        assert_eq!(g, p(&[1, 1]));
        let (q, r) = p(&[1]).div_rem(&p(&[0, 1]));
        assert!(q.is_zero());
        assert_eq!(r, p(&[1]));
    }

    #[test]
    fn exact_and_float_evaluation() {
        let f = RationalPoly::new(vec![ratio(1, 2), int(0), int(2)], Var::S);
        assert_eq!(f.eval(&ratio(1, 4)), ratio(5, 8));
        assert_eq!(f.eval(&int(0)), ratio(1, 2));
        assert!((f.eval_f64(0.25) - 0.625).abs() < 1e-16);
        assert_eq!(RationalPoly::zero(Var::X).eval(&int(3)), int(0));
    }

    #[test]
    fn content_makes_primitive() {
        let f = RationalPoly::new(vec![ratio(2, 3), ratio(4, 9)], Var::X);
        assert_eq!(f.content(), ratio(2, 9));
    }

    #[test]
    fn display() {
        let f = RationalPoly::new(vec![int(1), int(-2), int(2)], Var::X);
        assert_eq!(f.to_string(), "1 - 2x + 2x^2");
        let g = RationalPoly::new(vec![ratio(1, 2), int(0), int(2)], Var::S);
        assert_eq!(g.to_string(), "(1/2) + 2s^2");
    }

    #[test]
    fn json_round_trip() {
        let f = RationalPoly::new(vec![ratio(3, 8), int(0), int(1), int(0), int(6)], Var::S);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"variable":"s","coeffs":["3/8","0/1","1/1","0/1","6/1"]}"#
        );
        let back: RationalPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    fn arb_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec((-20i64..20, 1i64..6), 0..6).prop_map(|cs| {
            RationalPoly::new(cs.into_iter().map(|(a, b)| ratio(a, b)).collect(), Var::X)
        })
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_homomorphism(a in arb_poly(), b in arb_poly(), xn in -9i64..9, xd in 1i64..7) {
            let x = ratio(xn, xd);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
            prop_assert_eq!(a.compose(&b).eval(&x), a.eval(&b.eval(&x)));
        }

        #[test]
        fn product_rule(a in arb_poly(), b in arb_poly()) {
            let lhs = (&a * &b).derivative();
            let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }

        #[test]
        fn json_preserves_polynomials(a in arb_poly()) {
            let back: RationalPoly = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
