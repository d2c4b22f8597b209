//! Exact constructions of the squared sums for the families with rational
//! structure:
//!
//! * `F_n` (Bernstein), a polynomial of degree `2n`;
//! * `U_n(x) = F_n(x/(1+x))` (Bleimann–Butzer–Hahn);
//! * `G_n` (Baskakov), odd in `u = 1/(1+2x)`;
//! * `J_n(x) = G_{n+1}(x/(1-x))` (Meyer-König–Zeller), odd in
//!   `w = (1-x)/(1+x)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Mobius, RationalPoly, Var};
use super::ratfn::RationalFn;
use super::rational::{as_integer, binomial, factorial, int, ratio};
use crate::error::{Error, Result};
use crate::params::{FamilyId, Params};

fn big(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn four_pow(e: u64) -> BigInt {
    BigInt::one() << (2 * e as usize)
}

/// `F_n(x) = Σ_k (C(n,k) x^k (1-x)^{n-k})²` expanded in powers of `x`.
/// `F_0 = 1`.
pub fn f_poly_direct(n: u64) -> RationalPoly {
    let deg = 2 * n;
    let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
    for k in 0..=n {
        let b2 = binomial(n, k).pow(2);
        let rest = 2 * (n - k);
        for j in 0..=rest {
            let term = &b2 * binomial(rest, j);
            let slot = &mut coeffs[(2 * k + j) as usize];
            if j % 2 == 0 {
                *slot += term;
            } else {
                *slot -= term;
            }
        }
    }
    RationalPoly::new(coeffs.into_iter().map(big).collect(), Var::X)
}

/// `F_n` as an even polynomial in `s = x - 1/2`:
/// `4^{-n} C(2n,n) Σ_k 4^k C(n,k)² / C(2n,2k) · s^{2k}`.
pub fn f_poly_parseval(n: u64) -> RationalPoly {
    let lead = BigRational::new(binomial(2 * n, n), four_pow(n));
    let mut coeffs = vec![BigRational::zero(); 2 * n as usize + 1];
    for k in 0..=n {
        let c = BigRational::new(four_pow(k) * binomial(n, k).pow(2), binomial(2 * n, 2 * k));
        coeffs[2 * k as usize] = &lead * c;
    }
    RationalPoly::new(coeffs, Var::S)
}

/// The Parseval form rewritten in `x`, for comparison with
/// [`f_poly_direct`].
pub fn f_parseval_in_x(n: u64) -> RationalPoly {
    let shift = RationalPoly::linear(ratio(-1, 2), int(1), Var::X);
    f_poly_parseval(n).compose(&shift)
}

/// `G_n` as an odd polynomial of degree `2n - 1` in `u = 1/(1+2x)`, with
/// coefficients `4^{1-n} (2k)! (2n-2k-2)! / (k!² (n-k-1)!²)` on `u^{2k+1}`.
///
/// Panics for `n = 0`.
pub fn g_odd_poly(n: u64) -> RationalPoly {
    assert!(n >= 1, "G_n is defined for n >= 1");
    let scale = four_pow(n - 1);
    let mut coeffs = vec![BigRational::zero(); 2 * n as usize];
    for k in 0..n {
        let m = n - k - 1;
        let num = factorial(2 * k) * factorial(2 * m);
        let den = (factorial(k) * factorial(m)).pow(2) * &scale;
        coeffs[2 * k as usize + 1] = BigRational::new(num, den);
    }
    RationalPoly::new(coeffs, Var::U)
}

/// Same construction with `(n-k-1)!` to the first power in the denominator.
/// Kept only so tests can show that this reading is inconsistent with the
/// `J_n` / `G_{n+1}` substitution relation.
pub fn g_odd_poly_single_factorial(n: u64) -> RationalPoly {
    assert!(n >= 1, "G_n is defined for n >= 1");
    let scale = four_pow(n - 1);
    let mut coeffs = vec![BigRational::zero(); 2 * n as usize];
    for k in 0..n {
        let m = n - k - 1;
        let num = factorial(2 * k) * factorial(2 * m);
        let den = factorial(k).pow(2) * factorial(m) * &scale;
        coeffs[2 * k as usize + 1] = BigRational::new(num, den);
    }
    RationalPoly::new(coeffs, Var::U)
}

pub fn g_rational(n: u64) -> RationalFn {
    RationalFn::from_poly(g_odd_poly(n)).to_x()
}

/// `J_n` as an odd polynomial of degree `2n + 1` in `w = (1-x)/(1+x)`, with
/// coefficients `4^{-n} (2k)! (2n-2k)! / (k!² (n-k)!²)` on `w^{2k+1}`.
pub fn j_odd_poly(n: u64) -> RationalPoly {
    let scale = four_pow(n);
    let mut coeffs = vec![BigRational::zero(); 2 * n as usize + 2];
    for k in 0..=n {
        let m = n - k;
        let num = factorial(2 * k) * factorial(2 * m);
        let den = (factorial(k) * factorial(m)).pow(2) * &scale;
        coeffs[2 * k as usize + 1] = BigRational::new(num, den);
    }
    RationalPoly::new(coeffs, Var::W)
}

pub fn j_rational(n: u64) -> RationalFn {
    RationalFn::from_poly(j_odd_poly(n)).to_x()
}

/// `U_n` as an even polynomial in `w = (1-x)/(1+x)`:
/// `4^{-n} C(2n,n) Σ_k C(n,k)² / C(2n,2k) · w^{2k}`.
pub fn u_even_poly(n: u64) -> RationalPoly {
    let lead = BigRational::new(binomial(2 * n, n), four_pow(n));
    let mut coeffs = vec![BigRational::zero(); 2 * n as usize + 1];
    for k in 0..=n {
        coeffs[2 * k as usize] =
            &lead * BigRational::new(binomial(n, k).pow(2), binomial(2 * n, 2 * k));
    }
    RationalPoly::new(coeffs, Var::W)
}

pub fn u_rational(n: u64) -> RationalFn {
    RationalFn::from_poly(u_even_poly(n)).to_x()
}

/// `U_n` obtained independently by substituting `x/(1+x)` into the
/// Parseval form of `F_n`.
pub fn u_rational_via_parseval(n: u64) -> RationalFn {
    // s = x/(1+x) - 1/2 = (x - 1) / (2x + 2)
    let m = Mobius::new(int(1), int(-1), int(2), int(2));
    f_poly_parseval(n).compose_mobius(&m)
}

/// `S_{n,c}` as an exact rational function of `x`.
///
/// Available for `c < 0` (always a polynomial, `F_l(-c x)`) and for `c > 0`
/// with `n/c` a natural number (`G_{n/c}(c x)`).
pub fn exact_s(params: &Params) -> Result<RationalFn> {
    let c = params.c_exact();
    if c.is_negative() {
        let l = params.l().expect("l is set for c < 0");
        return Ok(RationalFn::from_poly(f_poly_direct(l).rescale(&-c)));
    }
    let a = params.a_exact();
    match a.as_ref().filter(|a| a.is_integer() && a.is_positive()) {
        Some(a) => {
            let a = as_integer(a).ok_or_else(|| {
                Error::Unsupported("n/c is too large for an exact construction".into())
            })? as u64;
            let g = g_rational(a);
            Ok(if c.is_one() {
                g
            } else {
                g.compose_mobius(&Mobius::scale(c.clone()))
            })
        }
        None => Err(Error::Unsupported(format!(
            "no exact form for {params}: needs c < 0, or c > 0 with n/c a natural number"
        ))),
    }
}

/// Exact squared sum of a named family in the family's own variable.
pub fn family_exact(family: &FamilyId, n: &BigRational) -> Result<RationalFn> {
    let idx = || {
        as_integer(n)
            .filter(|&v| v >= 0)
            .map(|v| v as u64)
            .ok_or_else(|| Error::Unsupported(format!("index {n} is not a natural number")))
    };
    match family.clone().normalized() {
        FamilyId::Bernstein => Ok(RationalFn::from_poly(f_poly_direct(idx()?))),
        FamilyId::Bbh => Ok(u_rational(idx()?)),
        FamilyId::Mkz => Ok(j_rational(idx()?)),
        FamilyId::Szasz => Err(Error::Unsupported(
            "the Szász sum is transcendental; no exact form".into(),
        )),
        FamilyId::Baskakov | FamilyId::General(_) => exact_s(&family.s_params(n)?),
    }
}

/// Positive-coefficient form of a family sum for fast, cancellation-free
/// evaluation in floating point.
#[derive(Debug, Clone)]
pub struct FamilyPoly {
    var: Var,
    coeffs: Vec<f64>,
    even: bool,
}

impl FamilyPoly {
    /// Available for Bernstein (Parseval form), BBH (even in `w`), Baskakov
    /// (odd in `u`) and MKZ (odd in `w`).
    pub fn new(family: &FamilyId, n: u64) -> Option<Self> {
        let poly = match family.clone().normalized() {
            FamilyId::Bernstein => f_poly_parseval(n),
            FamilyId::Bbh => u_even_poly(n),
            FamilyId::Baskakov if n >= 1 => g_odd_poly(n),
            FamilyId::Mkz => j_odd_poly(n),
            _ => return None,
        };
        let even = poly.is_even();
        let coeffs = poly.to_f64_coeffs();
        Some(FamilyPoly {
            var: poly.var(),
            coeffs,
            even,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = self.var.at(x);
        if self.even {
            let v2 = v * v;
            self.coeffs
                .iter()
                .step_by(2)
                .rev()
                .fold(0.0, |acc, c| acc * v2 + c)
        } else {
            // odd: v · Σ c_{2k+1} v^{2k}
            let v2 = v * v;
            v * self
                .coeffs
                .iter()
                .skip(1)
                .step_by(2)
                .rev()
                .fold(0.0, |acc, c| acc * v2 + c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_poly(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c, Var::X)
    }

    #[test]
    fn direct_small_cases() {
        assert_eq!(f_poly_direct(0), x_poly(&[1]));
        assert_eq!(f_poly_direct(1), x_poly(&[1, -2, 2]));
        assert_eq!(f_poly_direct(2).eval(&ratio(1, 2)), ratio(3, 8));
        for n in 0..12 {
            assert_eq!(f_poly_direct(n).coeff(0), int(1));
        }
    }

    #[test]
    fn parseval_small_cases() {
        assert_eq!(
            f_poly_parseval(1),
            RationalPoly::new(vec![ratio(1, 2), int(0), int(2)], Var::S)
        );
        // n = 2 checked against a change of variable of the direct form;
        // F_2(0) = 1 pins the s² coefficient to 1
        let want = RationalPoly::new(vec![ratio(3, 8), int(0), int(1), int(0), int(6)], Var::S);
        assert_eq!(f_poly_parseval(2), want);
        let shifted = f_poly_direct(2).compose(&RationalPoly::linear(ratio(1, 2), int(1), Var::S));
        assert_eq!(shifted, want);
        assert_eq!(f_parseval_in_x(7), f_poly_direct(7));
    }

    #[test]
    fn baskakov_small_cases() {
        assert_eq!(
            g_rational(1),
            RationalFn::new(x_poly(&[1]), x_poly(&[1, 2])).unwrap()
        );
        let g2 = RationalFn::new(x_poly(&[1, 2, 2]), x_poly(&[1, 2]).pow(3)).unwrap();
        assert_eq!(g_rational(2), g2);
        let g3 = RationalPoly::new(
            vec![
                int(0),
                ratio(3, 8),
                int(0),
                ratio(1, 4),
                int(0),
                ratio(3, 8),
            ],
            Var::U,
        );
        assert_eq!(g_odd_poly(3), g3);
    }

    #[test]
    fn mkz_small_cases() {
        assert_eq!(
            j_rational(0),
            RationalFn::new(x_poly(&[1, -1]), x_poly(&[1, 1])).unwrap()
        );
        let j2 = RationalPoly::new(
            vec![
                int(0),
                ratio(3, 8),
                int(0),
                ratio(1, 4),
                int(0),
                ratio(3, 8),
            ],
            Var::W,
        );
        assert_eq!(j_odd_poly(2), j2);
        for n in 0..8 {
            assert_eq!(j_rational(n).eval(&int(0)), Some(int(1)));
        }
    }

    #[test]
    fn bbh_small_cases() {
        let u1 = RationalFn::new(x_poly(&[1, 0, 1]), x_poly(&[1, 2, 1])).unwrap();
        assert_eq!(u_rational(1), u1);
        for n in 1..8 {
            let u = u_rational(n);
            assert_eq!(u.eval(&int(0)), Some(int(1)));
            assert_eq!(
                u.eval(&int(1)),
                Some(BigRational::new(binomial(2 * n, n), four_pow(n)))
            );
            assert_eq!(u, u_rational_via_parseval(n));
        }
    }

    #[test]
    fn squared_factorial_reading_is_the_consistent_one() {
        // J_2(x) = G_3(x/(1-x)); the two readings of the G_n coefficients
        // first differ at n = 3
        let to_j = Mobius::new(int(1), int(0), int(-1), int(1));
        let j2 = j_rational(2);
        let squared = RationalFn::from_poly(g_odd_poly(3))
            .to_x()
            .compose_mobius(&to_j);
        let single = RationalFn::from_poly(g_odd_poly_single_factorial(3))
            .to_x()
            .compose_mobius(&to_j);
        assert_eq!(squared, j2);
        assert_ne!(single, j2);
        assert_eq!(g_odd_poly(2), g_odd_poly_single_factorial(2));
    }

    #[test]
    fn exact_s_matches_families() {
        let p = Params::new(int(3), ratio(-1, 2)).unwrap();
        // S_{3,-1/2}(x) = F_6(x/2)
        let s = exact_s(&p).unwrap();
        assert_eq!(s.eval(&int(1)), Some(f_poly_direct(6).eval(&ratio(1, 2))));
        let p = Params::new(int(4), int(2)).unwrap();
        let s = exact_s(&p).unwrap();
        assert_eq!(s.eval(&ratio(1, 4)), g_rational(2).eval(&ratio(1, 2)));
        assert!(exact_s(&Params::new(ratio(3, 2), int(1)).unwrap()).is_err());
        assert!(exact_s(&Params::szasz(2).unwrap()).is_err());
    }

    #[test]
    fn float_forms_match_exact_values() {
        for (fam, xs) in [
            (FamilyId::Bernstein, vec![0.0, 0.1, 0.5, 0.93, 1.0]),
            (FamilyId::Bbh, vec![0.0, 0.3, 1.0, 7.0, 1e4]),
            (FamilyId::Baskakov, vec![0.0, 0.3, 1.0, 7.0, 1e4]),
            (FamilyId::Mkz, vec![0.0, 0.3, 0.5, 0.99]),
        ] {
            for n in [1u64, 4, 13] {
                let fp = FamilyPoly::new(&fam, n).unwrap();
                let exact = family_exact(&fam, &int(n as i64)).unwrap();
                for &x in &xs {
                    let want = crate::exact::rational::to_f64(
                        &exact
                            .eval(&crate::exact::rational::from_f64(x).unwrap())
                            .unwrap(),
                    );
                    let got = fp.eval(x);
                    assert!(
                        (got - want).abs() <= 1e-14 * want,
                        "{fam} n={n} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }
}
