//! Logarithms of binomial-type probabilities that stay accurate when the
//! index is large. Uses the saddle-point decomposition of Loader (2000):
//! Stirling remainders plus the deviance term `bd0`, so no two large
//! logarithms are ever subtracted.

use std::f64::consts::PI;

/// `ln Γ(z+1) - (z + 1/2) ln z + z - ln √(2π)`.
pub(crate) fn stirlerr(z: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if z <= 15.0 {
        return libm::lgamma(z + 1.0) - (z + 0.5) * z.ln() + z - 0.5 * (2.0 * PI).ln();
    }
    // the next term is below 2e-16 at z = 15
    let z2 = z * z;
    (S0 - (S1 - (S2 - (S3 - S4 / z2) / z2) / z2) / z2) / z
}

/// `x ln(x/m) + m - x`, the deviance of `x` from mean `m`, without
/// cancellation when `x ≈ m`.
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln[Γ(m+1)/(Γ(x+1)Γ(m-x+1)) p^x q^{m-x}]` for real `0 < x < m`, with
/// `q = 1 - p` passed separately to keep its precision.
pub(crate) fn ln_binom_pmf(x: f64, m: f64, p: f64, q: f64) -> f64 {
    let y = m - x;
    stirlerr(m) - stirlerr(x) - stirlerr(y) - bd0(x, m * p) - bd0(y, m * q)
        + 0.5 * (m / (2.0 * PI * x * y)).ln()
}

/// `ln(λ^k e^{-λ} / k!)`.
pub(crate) fn ln_poisson(k: u64, lambda: f64) -> f64 {
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -stirlerr(kf) - bd0(kf, lambda) - 0.5 * (2.0 * PI * kf).ln()
}

/// `ln[(a)_k / k! · r^k q^a]` with `q = 1 - r`: the negative binomial
/// probability with real size `a > 0`.
pub(crate) fn ln_negbin_pmf(k: u64, a: f64, r: f64, q: f64) -> f64 {
    if k == 0 {
        return a * q.ln();
    }
    let kf = k as f64;
    (a / (a + kf)).ln() + ln_binom_pmf(kf, a + kf, r, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirlerr_reference_values() {
        // mpmath, 40 digits
        for (z, want) in [
            (15.5, 5.375_599_032_926_834e-3),
            (40.25, 2.0703507832072533e-3),
            (600.0, 1.3888887602881679e-4),
            (5000.0, 1.6666666644444445e-5),
        ] {
            assert!((stirlerr(z) - want).abs() < 2e-16, "{z}");
        }
    }

    #[test]
    fn small_cases_match_direct_products() {
        // C(10,3) 0.3^3 0.7^7
        let direct = 120.0 * 0.3f64.powi(3) * 0.7f64.powi(7);
        assert!((ln_binom_pmf(3.0, 10.0, 0.3, 0.7).exp() - direct).abs() < 1e-15);
        // (2.5)_3/3! r^3 q^2.5
        let (r, q) = (0.4f64, 0.6f64);
        let direct = 2.5 * 3.5 * 4.5 / 6.0 * r * r * r * q.powf(2.5);
        assert!((ln_negbin_pmf(3, 2.5, r, q).exp() - direct).abs() < 1e-15);
        let direct = (-4.0f64).exp() * 4.0f64.powi(5) / 120.0;
        assert!((ln_poisson(5, 4.0).exp() - direct).abs() < 1e-15);
    }

    #[test]
    fn poisson_log_weights() {
        // oracle: direct products for moderate arguments
        for (k, lambda) in [(0u64, 3.0f64), (5, 2.5), (40, 37.2), (120, 150.0)] {
            let mut p = (-lambda).exp();
            for j in 1..=k {
                p *= lambda / j as f64;
            }
            let got = ln_poisson(k, lambda).exp();
            assert!((got - p).abs() < 1e-13 * p, "{k} {lambda}: {got} vs {p}");
        }
    }
}
