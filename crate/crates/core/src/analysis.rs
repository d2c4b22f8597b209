//! Grid scans: finite-difference ODE residuals, convexity, monotonicity of
//! the Bernstein sum, and the log-convexity scanner.
//!
//! The log-convexity scan only reports what it observes. Its status is
//! always [`LOGCONVEXITY_STATUS`], whatever the margins turn out to be.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::s_closed;
use crate::exact::families::{exact_s, f_poly_parseval, family_exact};
use crate::exact::ode::Ode;
use crate::exact::poly::IntegerForm;
use crate::exact::rational::{format_rational, from_f64, int, to_f64};
use crate::grid;
use crate::par;
use crate::params::{FamilyId, Params};

pub const LOGCONVEXITY_STATUS: &str = "unproven";
/// Rational points per domain for the log-convexity scan.
pub const CONJECTURE_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    OdeResidual,
    Convexity,
    Monotonicity,
    LogConvexity,
    Bound,
}

/// What a scan was run on.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Subject {
    Params(Params),
    Family { family: FamilyId, n: String },
}

impl Subject {
    pub fn family(family: &FamilyId, n: u64) -> Self {
        Subject::Family {
            family: family.clone(),
            n: format_rational(&int(n as i64)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub subject: Subject,
    /// How the margins were computed (`exact`, `fd5`, `closed`, …).
    pub method: String,
    pub grid: Vec<f64>,
    /// Exact sample points, when the scan used rational arithmetic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_exact: Option<Vec<String>>,
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub argmin: f64,
    /// Margins below this count as violations.
    pub threshold: f64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ScanReport {
    /// A NaN margin is both the minimum and a violation.
    pub fn new(
        kind: ScanKind,
        subject: Subject,
        grid: Vec<f64>,
        margins: Vec<f64>,
        threshold: f64,
    ) -> Self {
        assert_eq!(grid.len(), margins.len(), "one margin per grid point");
        let mut min_margin = f64::INFINITY;
        let mut argmin = f64::NAN;
        for (&x, &m) in grid.iter().zip(&margins) {
            if m.is_nan() || m < min_margin {
                min_margin = m;
                argmin = x;
                if m.is_nan() {
                    break;
                }
            }
        }
        let violations = grid
            .iter()
            .zip(&margins)
            .filter(|(_, &m)| m.is_nan() || m < threshold)
            .map(|(&x, &margin)| Violation { x, margin })
            .collect();
        ScanReport {
            kind,
            subject,
            method: String::new(),
            grid,
            grid_exact: None,
            margins,
            min_margin,
            argmin,
            threshold,
            violations,
            status: None,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite-difference stencils for first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// Central, second order.
    Three,
    /// Central, fourth order.
    Five,
}

impl Stencil {
    fn reach(self) -> f64 {
        match self {
            Stencil::Three => 1.0,
            Stencil::Five => 2.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stencil::Three => "fd3",
            Stencil::Five => "fd5",
        }
    }

    /// `(y, y', y'')` at `x` from samples of `f`.
    fn derivatives(
        self,
        f: &impl Fn(f64) -> Result<f64>,
        x: f64,
        h: f64,
    ) -> Result<(f64, f64, f64)> {
        let y0 = f(x)?;
        Ok(match self {
            Stencil::Three => {
                let (ym, yp) = (f(x - h)?, f(x + h)?);
                (y0, (yp - ym) / (2.0 * h), (yp - 2.0 * y0 + ym) / (h * h))
            }
            Stencil::Five => {
                let (ym2, ym, yp, yp2) = (f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?);
                let d1 = (ym2 - 8.0 * ym + 8.0 * yp - yp2) / (12.0 * h);
                let d2 = (-ym2 + 16.0 * ym - 30.0 * y0 + 16.0 * yp - yp2) / (12.0 * h * h);
                (y0, d1, d2)
            }
        })
    }
}

/// Default finite-difference step `max(1e-4, 1e-4·x)`.
pub fn default_step(x: f64) -> f64 {
    1e-4_f64.max(1e-4 * x.abs())
}

/// Default acceptance level for normalized ODE residuals.
pub const ODE_RESIDUAL_TOL: f64 = 1e-5;

/// Residual of `x(1+cx)(1+2cx)y'' + (4(n+c)x(1+cx)+1)y' + 2n(1+2cx)y` with
/// `y = S_{n,c}` differentiated by a five-point stencil. The margin at a
/// point is `-|A y'' + B y' + C y| / (|A y''| + |B y'| + |C y|)`.
///
/// `h = None` uses [`default_step`] at every point.
pub fn ode_residual_scan(params: &Params, grid: &[f64], h: Option<f64>) -> Result<ScanReport> {
    ode_residual_scan_with(params, grid, h, Stencil::Five)
}

pub fn ode_residual_scan_with(
    params: &Params,
    grid: &[f64],
    h: Option<f64>,
    stencil: Stencil,
) -> Result<ScanReport> {
    if h.is_some_and(|h| h.is_nan() || h <= 0.0) {
        return Err(Error::InvalidArgument("the step h must be positive".into()));
    }
    let domain = params.domain();
    for &x in grid {
        let reach = stencil.reach() * h.unwrap_or_else(|| default_step(x));
        let inside = x - reach >= 0.0 && domain.upper.is_none_or(|b| x + reach <= b);
        if !inside {
            return Err(Error::NearSingularity { x });
        }
    }
    let ode = Ode::S(params.clone());
    let f = |x: f64| s_closed(params, x).map(|r| r.value);
    let margins = par::map(grid, |&x| -> Result<f64> {
        let step = h.unwrap_or_else(|| default_step(x));
        let (y, d1, d2) = stencil.derivatives(&f, x, step)?;
        let (a, b, c) = ode.coefficients_f64(x);
        let (ta, tb, tc) = (a * d2, b * d1, c * y);
        Ok(-(ta + tb + tc).abs() / (ta.abs() + tb.abs() + tc.abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut report = ScanReport::new(
        ScanKind::OdeResidual,
        Subject::Params(params.clone()),
        grid.to_vec(),
        margins,
        -ODE_RESIDUAL_TOL,
    );
    report.method = stencil.name().into();
    if let Some(h) = h {
        report.notes.push(format!("h = {h:e}"));
    }
    Ok(report)
}

/// Largest normalized residual of a scan, `-min_margin`.
pub fn max_residual(report: &ScanReport) -> f64 {
    -report.min_margin
}

/// Estimated order of a finite-difference residual: `log2` of the ratios of
/// maximal residuals at successive halvings of `h`.
pub fn convergence_orders(
    params: &Params,
    grid: &[f64],
    steps: &[f64],
    stencil: Stencil,
) -> Result<Vec<f64>> {
    let residuals = steps
        .iter()
        .map(|&h| ode_residual_scan_with(params, grid, Some(h), stencil).map(|r| max_residual(&r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Slope at the singular endpoint `x = 0`. The equation forces
/// `y'(0) = -2n y(0) = -2n`; this returns `(one-sided estimate, -2n)`.
pub fn endpoint_slope(params: &Params, h: f64) -> Result<(f64, f64)> {
    let f = |x: f64| s_closed(params, x).map(|r| r.value);
    let slope = (-3.0 * f(0.0)? + 4.0 * f(h)? - f(2.0 * h)?) / (2.0 * h);
    Ok((slope, -2.0 * params.n()))
}

/// Convexity tolerance for finite-difference scans.
pub const CONVEXITY_TOL: f64 = 1e-8;

/// Second derivative evidence for convexity of a family's sum.
///
/// * Bernstein: exact `F_n''` at the grid points (from the even-power form,
///   all of whose coefficients are positive).
/// * Families with an exact form: second divided differences over the grid,
///   computed exactly and rounded once.
/// * Otherwise (Szász, general `c`): second divided differences of the
///   closed-form values.
///
/// Divided differences are reported at interior grid points.
pub fn convexity_scan(family: &FamilyId, n: u64, grid: &[f64]) -> Result<ScanReport> {
    let family = family.clone().normalized();
    let subject = Subject::family(&family, n);
    if family == FamilyId::Bernstein {
        let d2 = f_poly_parseval(n).derivative().derivative();
        let form = d2.integer_form();
        let margins = par::map(grid, |&x| from_f64(x - 0.5).map(|s| to_f64(&form.eval(&s))))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let mut r = ScanReport::new(ScanKind::Convexity, subject, grid.to_vec(), margins, 0.0);
        r.method = "exact".into();
        return Ok(r);
    }
    if grid.len() < 3 {
        return Err(Error::InvalidArgument(
            "a divided-difference scan needs at least three points".into(),
        ));
    }
    for &x in grid {
        family.domain().check(x)?;
    }
    let idx = int(n as i64);
    let (margins, method, threshold) = match family_exact(&family, &idx) {
        Ok(f) => {
            let ev = f.evaluator();
            let pts = grid
                .iter()
                .map(|&x| from_f64(x))
                .collect::<Result<Vec<_>>>()?;
            let vals = par::map(&pts, |x| {
                ev.eval(x).ok_or(Error::NearSingularity { x: to_f64(x) })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let margins = (1..pts.len() - 1)
                .map(|i| {
                    let d = divided2_exact(&pts[i - 1..=i + 1], &vals[i - 1..=i + 1]);
                    to_f64(&d)
                })
                .collect();
            (margins, "exact", 0.0)
        }
        Err(_) => {
            let vals = par::map(grid, |&x| -> Result<f64> {
                let (p, arg) = family.resolve(&idx, x)?;
                Ok(s_closed(&p, arg)?.value)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let margins = (1..grid.len() - 1)
                .map(|i| divided2(&grid[i - 1..=i + 1], &vals[i - 1..=i + 1]))
                .collect();
            (margins, "closed", -CONVEXITY_TOL)
        }
    };
    let mut r = ScanReport::new(
        ScanKind::Convexity,
        subject,
        grid[1..grid.len() - 1].to_vec(),
        margins,
        threshold,
    );
    r.method = method.into();
    Ok(r)
}

fn divided2(x: &[f64], y: &[f64]) -> f64 {
    let l = (y[1] - y[0]) / (x[1] - x[0]);
    let r = (y[2] - y[1]) / (x[2] - x[1]);
    2.0 * (r - l) / (x[2] - x[0])
}

fn divided2_exact(x: &[BigRational], y: &[BigRational]) -> BigRational {
    let l = (&y[1] - &y[0]) / (&x[1] - &x[0]);
    let r = (&y[2] - &y[1]) / (&x[2] - &x[1]);
    (r - l) * int(2) / (&x[2] - &x[0])
}

/// Tolerance below zero for the finite-difference log-convexity route.
pub const LOGCONVEXITY_FD_TOL: f64 = 1e-8;

/// `Q = S S'' - S'²` over a grid of doubles. Uses exact arithmetic at the
/// (dyadic) grid points when `S` has an exact form, finite differences of the
/// closed form otherwise. Report only.
pub fn logconvexity_scan(params: &Params, grid: &[f64]) -> Result<ScanReport> {
    if exact_s(params).is_ok() {
        let pts = grid
            .iter()
            .map(|&x| from_f64(x))
            .collect::<Result<Vec<_>>>()?;
        let mut r = logconvexity_scan_exact(params, &pts)?;
        r.grid_exact = None;
        return Ok(r);
    }
    let domain = params.domain();
    for &x in grid {
        domain.check(x)?;
    }
    let f = |x: f64| s_closed(params, x).map(|r| r.value);
    let margins = par::map(grid, |&x| -> Result<f64> {
        let h = default_step(x);
        let (y, d1, d2) = if x - 2.0 * h < 0.0 {
            one_sided_derivatives(&f, x, h)?
        } else if domain.upper.is_some_and(|b| x + 2.0 * h > b) {
            one_sided_derivatives(&f, x, -h)?
        } else {
            Stencil::Five.derivatives(&f, x, h)?
        };
        Ok(y * d2 - d1 * d1)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut r = ScanReport::new(
        ScanKind::LogConvexity,
        Subject::Params(params.clone()),
        grid.to_vec(),
        margins,
        -LOGCONVEXITY_FD_TOL,
    );
    r.method = "fd5".into();
    r.status = Some(LOGCONVEXITY_STATUS);
    Ok(r)
}

/// Second-order one-sided differences from `x` towards `x + 4h`.
fn one_sided_derivatives(
    f: &impl Fn(f64) -> Result<f64>,
    x: f64,
    h: f64,
) -> Result<(f64, f64, f64)> {
    let y: Vec<f64> = (0..4).map(|k| f(x + k as f64 * h)).collect::<Result<_>>()?;
    let d1 = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    let d2 = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
    Ok((y[0], d1, d2))
}

/// Exact `Q` at rational points. For `S = N/D`,
/// `Q·D⁴ = N D (N''D - N D'') - 2 N D' (N'D - N D') - (N'D - N D')²`.
pub fn logconvexity_scan_exact(params: &Params, points: &[BigRational]) -> Result<ScanReport> {
    let s = exact_s(params)?;
    let (num, den) = (s.num(), s.den());
    let forms: [IntegerForm; 6] = [
        num.integer_form(),
        num.derivative().integer_form(),
        num.derivative().derivative().integer_form(),
        den.integer_form(),
        den.derivative().integer_form(),
        den.derivative().derivative().integer_form(),
    ];
    let upper = params.domain().upper;
    for p in points {
        let x = to_f64(p);
        if p.is_negative() || upper.is_some_and(|b| x > b) {
            return Err(Error::OutsideDomain {
                x,
                domain: params.domain(),
            });
        }
    }
    let margins = par::map(points, |p| {
        let [n0, n1, n2, d0, d1, d2] = forms.each_ref().map(|f| f.eval(p));
        let w = &n1 * &d0 - &n0 * &d1;
        let top = &n0 * &d0 * (&n2 * &d0 - &n0 * &d2) - int(2) * &n0 * &d1 * &w - &w * &w;
        let d4 = {
            let d2 = &d0 * &d0;
            &d2 * &d2
        };
        if d4.is_zero() {
            f64::NAN
        } else {
            to_f64(&(top / d4))
        }
    });
    let mut r = ScanReport::new(
        ScanKind::LogConvexity,
        Subject::Params(params.clone()),
        points.iter().map(to_f64).collect(),
        margins,
        0.0,
    );
    r.grid_exact = Some(points.iter().map(format_rational).collect());
    r.method = "exact".into();
    r.status = Some(LOGCONVEXITY_STATUS);
    Ok(r)
}

/// The standard sample for the log-convexity scan: [`CONJECTURE_POINTS`]
/// rational points on the domain (capped at 20 when unbounded).
pub fn conjecture_points(params: &Params) -> Vec<BigRational> {
    grid::rational_mixed(
        &grid::rational_upper(params.domain()),
        CONJECTURE_POINTS / 2,
    )
}

/// Monotonicity tolerance: margins are exact, so this only absorbs the
/// final rounding.
pub const MONOTONICITY_TOL: f64 = 1e-14;

/// `F_n` decreases on `[0, 1/2]` and increases on `[1/2, 1]`. For each pair
/// of consecutive grid points on the same side of `1/2` the margin is the
/// exact decrease (left side) or increase (right side); it is reported at
/// the left point of the pair. Pairs straddling `1/2` are skipped.
pub fn monotonicity_check(n: u64, grid: &[f64]) -> Result<ScanReport> {
    if grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "the grid must be strictly increasing".into(),
        ));
    }
    for &x in grid {
        FamilyId::Bernstein.domain().check(x)?;
    }
    let form = f_poly_parseval(n).integer_form();
    let vals = par::map(grid, |&x| from_f64(x - 0.5).map(|s| form.eval(&s)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut xs = Vec::new();
    let mut margins = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (grid[i], grid[i + 1]);
        let m = if b <= 0.5 {
            &vals[i] - &vals[i + 1]
        } else if a >= 0.5 {
            &vals[i + 1] - &vals[i]
        } else {
            continue;
        };
        xs.push(a);
        margins.push(to_f64(&m));
    }
    let mut r = ScanReport::new(
        ScanKind::Monotonicity,
        Subject::family(&FamilyId::Bernstein, n),
        xs,
        margins,
        -MONOTONICITY_TOL,
    );
    r.method = "exact".into();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    #[test]
    fn report_bookkeeping() {
        let r = ScanReport::new(
            ScanKind::Convexity,
            Subject::family(&FamilyId::Bernstein, 1),
            vec![0.0, 1.0, 2.0],
            vec![3.0, -1.0, 2.0],
            0.0,
        );
        assert_eq!((r.min_margin, r.argmin), (-1.0, 1.0));
        assert_eq!(
            r.violations,
            vec![Violation {
                x: 1.0,
                margin: -1.0
            }]
        );
        assert!(!r.passed());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["kind"], "convexity");
        assert_eq!(json["subject"]["family"], "bernstein");
    }

    #[test]
    fn baskakov_residual_is_small() {
        let p = Params::baskakov(2).unwrap();
        let g = grid::uniform(0.1, 5.0, 50);
        let r = ode_residual_scan(&p, &g, Some(1e-3)).unwrap();
        assert!(max_residual(&r) < 1e-5, "{}", max_residual(&r));
        let p = Params::bernstein(1).unwrap();
        let r = ode_residual_scan(&p, &[0.3], Some(1e-3)).unwrap();
        assert!(max_residual(&r) < 1e-8);
    }

    #[test]
    fn residual_scan_rejects_points_near_the_boundary() {
        let p = Params::bernstein(3).unwrap();
        assert!(matches!(
            ode_residual_scan(&p, &[0.0005], Some(1e-3)),
            Err(Error::NearSingularity { .. })
        ));
        assert!(ode_residual_scan(&p, &[0.9995], Some(1e-3)).is_err());
    }

    #[test]
    fn szasz_endpoint_slope() {
        let (slope, want) = endpoint_slope(&Params::szasz(1).unwrap(), 1e-3).unwrap();
        assert_eq!(want, -2.0);
        assert!((slope - want).abs() < 1e-4, "{slope}");
    }

    #[test]
    fn convexity_examples() {
        let r = convexity_scan(&FamilyId::Bernstein, 1, &grid::uniform(0.0, 1.0, 11)).unwrap();
        assert!(r.margins.iter().all(|&m| m == 4.0));
        let r = convexity_scan(&FamilyId::Szasz, 1, &grid::uniform(0.0, 3.0, 61)).unwrap();
        assert!(r.passed() && r.min_margin >= -1e-8);
        // J_0'' = 4/(1+x)³: the divided differences are positive
        let r = convexity_scan(&FamilyId::Mkz, 0, &grid::uniform(0.0, 0.9, 10)).unwrap();
        assert!(r.passed() && r.min_margin > 0.0);
    }

    #[test]
    fn logconvexity_examples() {
        // F_1: Q = 2 - 8(x - 1/2)²
        let p = Params::bernstein(1).unwrap();
        let pts = [int(0), ratio(1, 4), ratio(1, 2), int(1)];
        let r = logconvexity_scan_exact(&p, &pts).unwrap();
        assert_eq!(r.margins, vec![0.0, 1.5, 2.0, 0.0]);
        assert_eq!(r.status, Some("unproven"));
        // G_1: Q = 4/(1+2x)⁴
        let p = Params::baskakov(1).unwrap();
        let r = logconvexity_scan_exact(&p, &[int(0), ratio(1, 2)]).unwrap();
        assert_eq!(r.margins, vec![4.0, 0.25]);
        // finite-difference route, including the endpoint
        let p = Params::szasz(2).unwrap();
        let r = logconvexity_scan(&p, &grid::uniform(0.0, 3.0, 31)).unwrap();
        assert_eq!(r.method, "fd5");
        assert_eq!(r.margins.len(), 31);
    }

    #[test]
    fn conjecture_grid_size() {
        let pts = conjecture_points(&Params::bernstein(3).unwrap());
        assert_eq!(pts.len(), CONJECTURE_POINTS);
    }

    #[test]
    fn monotonicity_examples() {
        let g = grid::uniform(0.0, 1.0, 21);
        for n in [1, 2, 7] {
            let r = monotonicity_check(n, &g).unwrap();
            assert!(r.passed() && r.min_margin > 0.0);
            let k = r.margins.len();
            for i in 0..k / 2 {
                let (a, b) = (r.margins[i], r.margins[k - 1 - i]);
                assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} {b}");
            }
        }
    }
}
