//! Known upper bounds for the squared sums, evaluated pointwise and over
//! grids.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::analysis::{ScanKind, ScanReport, Subject};
use crate::error::{Error, Result};
use crate::eval::s_closed;
use crate::exact::families::family_exact;
use crate::exact::poly::{RationalPoly, Var};
use crate::exact::ratfn::{ExactEvaluator, RationalFn};
use crate::exact::rational::{binomial, int};
use crate::par;
use crate::params::{ln_factorial, FamilyId};

/// Tolerance below zero that a margin may reach before it counts as a
/// violation.
pub const MARGIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `F_n(x) <= (1 + 4(n-1)x(1-x))^{-1/2}`
    BernsteinSqrt,
    /// `F_n(x) <= (1 + 4(n-1)x(1-x))^{-n/(2(n-1))}`, `n >= 2`
    BernsteinPower,
    /// `U_n(x) <= (x+1) / √(x² + (4n-2)x + 1)`
    BbhRational,
    /// `G_n(x) <= (4(n+1)x(1+x) + 1)^{-n/(2(n+1))}`
    BaskakovPower,
    /// `G_n(x) <= C(2n-2, n-1) (1+x)^{n-1} / (1+2x)^n`
    BaskakovBinomial,
    /// `J_n(x) <= ((1-x)² / (x² + (4n+6)x + 1))^{(n+1)/(2(n+2))}`
    MkzPower,
    /// `J_n(x) <= C(2n, n) (1-x) / (1+x)^{n+1}`
    MkzBinomial,
    /// `K_n(x) <= (4nx + 1)^{-1/2}`
    SzaszSqrt,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::BernsteinSqrt,
        BoundKind::BernsteinPower,
        BoundKind::BbhRational,
        BoundKind::BaskakovPower,
        BoundKind::BaskakovBinomial,
        BoundKind::MkzPower,
        BoundKind::MkzBinomial,
        BoundKind::SzaszSqrt,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BoundKind::BernsteinSqrt => "bernstein_sqrt",
            BoundKind::BernsteinPower => "bernstein_power",
            BoundKind::BbhRational => "bbh_rational",
            BoundKind::BaskakovPower => "baskakov_power",
            BoundKind::BaskakovBinomial => "baskakov_binomial",
            BoundKind::MkzPower => "mkz_power",
            BoundKind::MkzBinomial => "mkz_binomial",
            BoundKind::SzaszSqrt => "szasz_sqrt",
        }
    }

    pub fn family(self) -> FamilyId {
        match self {
            BoundKind::BernsteinSqrt | BoundKind::BernsteinPower => FamilyId::Bernstein,
            BoundKind::BbhRational => FamilyId::Bbh,
            BoundKind::BaskakovPower | BoundKind::BaskakovBinomial => FamilyId::Baskakov,
            BoundKind::MkzPower | BoundKind::MkzBinomial => FamilyId::Mkz,
            BoundKind::SzaszSqrt => FamilyId::Szasz,
        }
    }

    /// Smallest index the bound is stated for.
    pub fn min_n(self) -> u64 {
        match self {
            BoundKind::BernsteinPower => 2,
            BoundKind::MkzPower | BoundKind::MkzBinomial => 0,
            _ => 1,
        }
    }

    /// The bound's value; `n` must be at least [`min_n`](Self::min_n).
    pub fn value(self, n: u64, x: f64) -> f64 {
        let nf = n as f64;
        match self {
            BoundKind::BernsteinSqrt => (1.0 + 4.0 * (nf - 1.0) * x * (1.0 - x)).powf(-0.5),
            BoundKind::BernsteinPower => {
                (1.0 + 4.0 * (nf - 1.0) * x * (1.0 - x)).powf(-nf / (2.0 * (nf - 1.0)))
            }
            BoundKind::BbhRational => (x + 1.0) / (x * x + (4.0 * nf - 2.0) * x + 1.0).sqrt(),
            BoundKind::BaskakovPower => {
                let base = 4.0 * (nf + 1.0) * x * (1.0 + x) + 1.0;
                (-(nf / (2.0 * (nf + 1.0))) * base.ln()).exp()
            }
            BoundKind::BaskakovBinomial => {
                let ln_c = ln_binom(2 * n - 2, n - 1);
                (ln_c + (nf - 1.0) * x.ln_1p() - nf * (2.0 * x).ln_1p()).exp()
            }
            BoundKind::MkzPower => {
                let ratio = (1.0 - x) * (1.0 - x) / (x * x + (4.0 * nf + 6.0) * x + 1.0);
                ratio.powf((nf + 1.0) / (2.0 * (nf + 2.0)))
            }
            BoundKind::MkzBinomial => {
                let ln_c = ln_binom(2 * n, n);
                (ln_c + (-x).ln_1p() - (nf + 1.0) * x.ln_1p()).exp()
            }
            BoundKind::SzaszSqrt => (4.0 * nf * x + 1.0).powf(-0.5),
        }
    }

    /// The two binomial bounds are rational functions; this returns them
    /// exactly.
    pub fn exact(self, n: u64) -> Option<RationalFn> {
        let xp = |c: &[i64]| RationalPoly::from_ints(c, Var::X);
        let big = |v: BigInt| BigRational::from_integer(v);
        match self {
            BoundKind::BaskakovBinomial if n >= 1 => {
                let num = xp(&[1, 1])
                    .pow(n as u32 - 1)
                    .scale(&big(binomial(2 * n - 2, n - 1)));
                RationalFn::new(num, xp(&[1, 2]).pow(n as u32)).ok()
            }
            BoundKind::MkzBinomial => {
                let num = xp(&[1, -1]).scale(&big(binomial(2 * n, n)));
                RationalFn::new(num, xp(&[1, 1]).pow(n as u32 + 1)).ok()
            }
            _ => None,
        }
    }
}

fn ln_binom(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Bounds stated for a family, in display order.
pub fn bounds_for(family: &FamilyId) -> Vec<BoundKind> {
    let fam = family.clone().normalized();
    BoundKind::ALL
        .into_iter()
        .filter(|b| b.family() == fam)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub label: &'static str,
    pub value: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub family: FamilyId,
    pub n: u64,
    pub x: f64,
    pub s_value: f64,
    /// `"exact"` (rational value rounded once) or `"closed"`.
    pub s_source: &'static str,
    pub bounds: Vec<BoundValue>,
    /// Bounds skipped for this `n`, with the reason.
    pub notes: Vec<String>,
    /// Minimum over the bounds of `bound - s_value`; `+∞` if none apply.
    pub min_margin: f64,
}

/// Evaluates every bound of one family at one index over many points,
/// reusing the exact form of the sum.
#[derive(Debug, Clone)]
pub struct BoundScanner {
    family: FamilyId,
    n: u64,
    kinds: Vec<BoundKind>,
    notes: Vec<String>,
    exact: Option<ExactEvaluator>,
}

impl BoundScanner {
    pub fn new(family: &FamilyId, n: u64) -> Result<Self> {
        let family = family.clone().normalized();
        if let FamilyId::General(_) = family {
            return Err(Error::Unsupported(
                "bounds are stated for the named families only".into(),
            ));
        }
        let min = if family == FamilyId::Mkz { 0 } else { 1 };
        if n < min {
            return Err(Error::InvalidParams(format!(
                "the {} bounds need n >= {min}",
                family.name()
            )));
        }
        let mut kinds = Vec::new();
        let mut notes = Vec::new();
        for k in bounds_for(&family) {
            if n >= k.min_n() {
                kinds.push(k);
            } else {
                notes.push(format!("{} needs n >= {}", k.label(), k.min_n()));
            }
        }
        let exact = family_exact(&family, &int(n as i64))
            .ok()
            .map(|f| f.evaluator());
        Ok(BoundScanner {
            family,
            n,
            kinds,
            notes,
            exact,
        })
    }

    pub fn kinds(&self) -> &[BoundKind] {
        &self.kinds
    }

    fn s_value(&self, x: f64) -> Result<(f64, &'static str)> {
        if let Some(ev) = &self.exact {
            let v = ev.eval_f64(x).ok_or(Error::NearSingularity { x })?;
            return Ok((v, "exact"));
        }
        let (params, arg) = self.family.resolve(&int(self.n as i64), x)?;
        Ok((s_closed(&params, arg)?.value, "closed"))
    }

    pub fn report(&self, x: f64) -> Result<BoundReport> {
        self.family.domain().check(x)?;
        let (s_value, s_source) = self.s_value(x)?;
        let bounds: Vec<BoundValue> = self
            .kinds
            .iter()
            .map(|k| {
                let value = k.value(self.n, x);
                BoundValue {
                    label: k.label(),
                    value,
                    margin: value - s_value,
                }
            })
            .collect();
        let min_margin = bounds
            .iter()
            .map(|b| b.margin)
            .fold(f64::INFINITY, f64::min);
        Ok(BoundReport {
            family: self.family.clone(),
            n: self.n,
            x,
            s_value,
            s_source,
            bounds,
            notes: self.notes.clone(),
            min_margin,
        })
    }

    pub fn reports(&self, grid: &[f64]) -> Result<Vec<BoundReport>> {
        par::map(grid, |&x| self.report(x)).into_iter().collect()
    }

    /// Per-point minimum margins over a grid, as a scan report.
    pub fn scan(&self, grid: &[f64]) -> Result<ScanReport> {
        let reports = self.reports(grid)?;
        let margins = reports.iter().map(|r| r.min_margin).collect();
        let mut report = ScanReport::new(
            ScanKind::Bound,
            Subject::family(&self.family, self.n),
            grid.to_vec(),
            margins,
            -MARGIN_TOL,
        );
        report.method = if self.exact.is_some() {
            "exact"
        } else {
            "closed"
        }
        .into();
        report.notes = self.notes.clone();
        Ok(report)
    }
}

/// All applicable bounds of `family` at `(n, x)`.
pub fn bound_values(family: &FamilyId, n: u64, x: f64) -> Result<BoundReport> {
    BoundScanner::new(family, n)?.report(x)
}

/// `G_1` coincides with its binomial bound and `J_0` with its own; both as
/// exact rational-function identities.
pub fn equality_anchors() -> [(BoundKind, bool); 2] {
    let g1 = family_exact(&FamilyId::Baskakov, &int(1)).expect("G_1 is exact");
    let j0 = family_exact(&FamilyId::Mkz, &int(0)).expect("J_0 is exact");
    [
        (
            BoundKind::BaskakovBinomial,
            BoundKind::BaskakovBinomial.exact(1) == Some(g1),
        ),
        (
            BoundKind::MkzBinomial,
            BoundKind::MkzBinomial.exact(0) == Some(j0),
        ),
    ]
}
