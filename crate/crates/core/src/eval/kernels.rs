//! Positive-term series machinery and the two special-function kernels used
//! by the closed forms: the diagonal ₂F₁(a, a; 1; z) and the modified Bessel
//! function I₀.
//!
//! Every sum here has nonnegative terms, so it is accumulated in log space
//! (a running shift plus a scaled accumulator). That keeps `e^{-2nx} I₀(2nx)`
//! and `(1+cx)^{-2n/c} ₂F₁(…)` representable long after either factor alone
//! would have over- or underflowed.

use crate::error::{Error, Result};

/// Streaming log-sum-exp accumulator: value = `acc · e^{shift}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    shift: f64,
    acc: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum {
            shift: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub(crate) fn add_ln(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if self.acc == 0.0 {
            self.shift = ln_term;
            self.acc = 1.0;
        } else if ln_term > self.shift {
            self.acc = self.acc * (self.shift - ln_term).exp() + 1.0;
            self.shift = ln_term;
        } else {
            self.acc += (ln_term - self.shift).exp();
        }
    }

    pub(crate) fn ln(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.shift + self.acc.ln()
        }
    }
}

/// One step of a positive series: the log of `t_{k+1}/t_k`, and an upper
/// bound on every later ratio `t_{j+1}/t_j`, `j >= k`.
pub(crate) enum Step {
    Ratio {
        ln_ratio: f64,
        sup_ratio: f64,
    },
    /// `t_{k+1} = 0`: the series terminates after term `k`.
    Stop,
}

/// Outcome of [`sum_positive`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub ln_sum: f64,
    pub terms: usize,
    /// Certified bound on `tail / sum`; zero for terminating series,
    /// infinite when the term budget ran out first.
    pub tail_rel: f64,
    /// Estimated relative rounding error of the accumulated logarithms.
    pub rounding_rel: f64,
}

impl SeriesSum {
    pub fn value(&self) -> f64 {
        self.ln_sum.exp()
    }

    pub fn rel_error(&self) -> f64 {
        self.tail_rel + self.rounding_rel
    }
}

pub(crate) const MAX_TERMS: usize = 2_000_000;

/// Sums `Σ_k t_k` given `ln t_0` and the ratio recurrence, stopping once a
/// geometric tail bound falls below `tol · partial`.
pub(crate) fn sum_positive(
    ln_t0: f64,
    tol: f64,
    max_terms: usize,
    mut step: impl FnMut(usize) -> Step,
) -> SeriesSum {
    let eps = f64::EPSILON;
    let mut sum = LogSum::new();
    let mut ln_t = ln_t0;
    let mut drift = ln_t0.abs();
    let mut k = 0usize;
    loop {
        sum.add_ln(ln_t);
        match step(k) {
            Step::Stop => {
                return SeriesSum {
                    ln_sum: sum.ln(),
                    terms: k + 1,
                    tail_rel: 0.0,
                    rounding_rel: eps * (drift + 4.0 * (k + 1) as f64),
                }
            }
            Step::Ratio {
                ln_ratio,
                sup_ratio,
            } => {
                if sup_ratio < 1.0 {
                    // tail ≤ t_k q / (1 - q), relative to the partial sum
                    let ln_tail = ln_t + sup_ratio.ln() - (-sup_ratio).ln_1p();
                    let tail_rel = (ln_tail - sum.ln()).exp();
                    if tail_rel <= tol || ln_ratio == f64::NEG_INFINITY {
                        let tail_rel = if ln_ratio == f64::NEG_INFINITY {
                            0.0
                        } else {
                            tail_rel
                        };
                        return SeriesSum {
                            ln_sum: sum.ln(),
                            terms: k + 1,
                            tail_rel,
                            rounding_rel: eps * (drift + 4.0 * (k + 1) as f64),
                        };
                    }
                }
                if k + 1 >= max_terms {
                    return SeriesSum {
                        ln_sum: sum.ln(),
                        terms: k + 1,
                        tail_rel: f64::INFINITY,
                        rounding_rel: eps * (drift + 4.0 * (k + 1) as f64),
                    };
                }
                ln_t += ln_ratio;
                drift += ln_ratio.abs();
                k += 1;
            }
        }
    }
}

/// Internal tolerance for series truncation: well below the 1e-12 level the
/// callers care about, so truncation never dominates rounding.
pub(crate) const SERIES_TOL: f64 = 1e-17;

/// `Σ_k ((a)_k / k!)² z^k` in log form.
pub(crate) fn hyp2f1_diag_sum(a: f64, z: f64) -> Result<SeriesSum> {
    if z.is_nan() || z < 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "diagonal 2F1 needs z >= 0 and finite a (a = {a}, z = {z})"
        )));
    }
    let terminating = a <= 0.0 && a.fract() == 0.0;
    if !terminating && z >= 1.0 {
        return Err(Error::Divergent { a, z });
    }
    if z == 0.0 || a == 0.0 {
        return Ok(SeriesSum {
            ln_sum: 0.0,
            terms: 1,
            tail_rel: 0.0,
            rounding_rel: 0.0,
        });
    }
    let ln_z = z.ln();
    Ok(sum_positive(0.0, SERIES_TOL, MAX_TERMS, |k| {
        let kf = k as f64;
        let num = a + kf;
        if num == 0.0 {
            return Step::Stop;
        }
        let r = num / (kf + 1.0);
        let rho = r * r * z;
        // past k >= -a the factor (a+k)/(k+1) moves monotonically towards 1
        let sup_ratio = if num > 0.0 { rho.max(z) } else { f64::INFINITY };
        Step::Ratio {
            ln_ratio: 2.0 * r.abs().ln() + ln_z,
            sup_ratio,
        }
    }))
}

/// The diagonal Gauss hypergeometric function ₂F₁(a, a; 1; z).
///
/// Terminating (exact up to rounding) when `a` is a nonpositive integer, in
/// which case any `z >= 0` is accepted; otherwise `z` must lie in `[0, 1)`.
pub fn hyp2f1_diag(a: f64, z: f64) -> Result<f64> {
    Ok(hyp2f1_diag_sum(a, z)?.value())
}

/// Beyond this argument `e^{-z} I₀(z)` is taken from its asymptotic
/// expansion, whose smallest term is of order `e^{-2z}`; the power series
/// would need about `z/2` terms.
pub(crate) const I0_ASYMPTOTIC_Z: f64 = 40.0;

/// `ln I₀(z) - z`, i.e. the log of the exponentially scaled Bessel function.
pub(crate) fn bessel_i0e_sum(z: f64) -> Result<SeriesSum> {
    if z.is_nan() || z < 0.0 || !z.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "I0 is evaluated for finite z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(SeriesSum {
            ln_sum: 0.0,
            terms: 1,
            tail_rel: 0.0,
            rounding_rel: 0.0,
        });
    }
    if z > I0_ASYMPTOTIC_Z {
        return Ok(bessel_i0e_asymptotic(z));
    }
    let half = 0.5 * z;
    let ln_q = 2.0 * half.ln();
    Ok(sum_positive(-z, SERIES_TOL, MAX_TERMS, |k| {
        let kp1 = (k + 1) as f64;
        let rho = (half / kp1) * (half / kp1);
        Step::Ratio {
            ln_ratio: ln_q - 2.0 * kp1.ln(),
            sup_ratio: rho,
        }
    }))
}

/// `e^{-z} I₀(z) ≈ (2πz)^{-1/2} Σ_k ((2k-1)!!)² / (k! (8z)^k)`; the
/// truncation error is reported as the first omitted term.
fn bessel_i0e_asymptotic(z: f64) -> SeriesSum {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let next = term * (2.0 * kf + 1.0) * (2.0 * kf + 1.0) / (8.0 * (kf + 1.0) * z);
        if next <= SERIES_TOL * sum || next >= term {
            return SeriesSum {
                ln_sum: sum.ln() - 0.5 * (2.0 * std::f64::consts::PI * z).ln(),
                terms: k + 1,
                tail_rel: next / sum,
                rounding_rel: f64::EPSILON * (k as f64 + 4.0 + 0.5 * z.ln()),
            };
        }
        sum += next;
        term = next;
        k += 1;
    }
}

/// Modified Bessel function of the first kind of order zero,
/// `Σ_k (z²/4)^k / (k!)²`.
pub fn bessel_i0(z: f64) -> Result<f64> {
    let s = bessel_i0e_sum(z)?;
    Ok((s.ln_sum + z).exp())
}

/// Exponentially scaled `e^{-z} I₀(z)`, finite for every finite `z >= 0`.
pub fn bessel_i0e(z: f64) -> Result<f64> {
    Ok(bessel_i0e_sum(z)?.value())
}
