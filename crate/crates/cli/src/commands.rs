use std::fmt;
use std::io::{self, Write};

use num_rational::BigRational;
use serde_json::{json, Value};

use sqsum::analysis::{
    conjecture_points, convexity_scan, logconvexity_scan, logconvexity_scan_exact,
    monotonicity_check, ode_residual_scan_with, ScanReport, Stencil,
};
use sqsum::bounds::{bounds_for, BoundScanner, MARGIN_TOL};
use sqsum::eval::s_all;
use sqsum::exact::families::{
    exact_s, f_parseval_in_x, f_poly_direct, family_exact, g_rational, j_rational, u_rational,
    u_rational_via_parseval,
};
use sqsum::exact::ode::{
    heun_params_f, heun_params_g, heun_residual, ode_residual, ode_residual_poly, recurrence_check,
    HeunParams, HeunTransform, Ode,
};
use sqsum::exact::rational::{format_rational, int, ratio};
use sqsum::exact::{Mobius, RationalFn};
use sqsum::legendre::{derivative_relations_check, neuschel_exact};
use sqsum::{grid, par, Error, FamilyId};

use crate::output::{csv_row, document, num, ok_word, plain_rational, sig17};
use crate::{FamilyArgs, Format, GridSpec, ScanArg, Verb};

#[derive(Debug)]
pub enum Failure {
    /// Arguments that parse but make no sense.
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}\n(see `sqsum <command> --help`)"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) | Error::InvalidParams(m) => Failure::Usage(m),
            other => Failure::Lib(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<i32, Failure>;

pub fn dispatch(verb: Verb, out: &mut dyn Write) -> Outcome {
    match verb {
        Verb::Eval {
            family,
            x,
            rtol,
            format,
        } => eval(&family, x, rtol, format, out),
        Verb::Table {
            family,
            grid,
            rtol,
            format,
        } => table(&family, &grid, rtol, format, out),
        Verb::Verify {
            family,
            n_max,
            format,
        } => verify(&family, n_max, format, out),
        Verb::Bounds {
            family,
            x,
            grid,
            format,
        } => bounds(&family, x, grid.as_deref(), format, out),
        Verb::Scan {
            family,
            kind,
            grid,
            h,
            three_point,
            format,
        } => {
            let stencil = if three_point {
                Stencil::Three
            } else {
                Stencil::Five
            };
            scan(&family, kind, grid.as_deref(), h, stencil, format, out)
        }
        Verb::Info { family, format } => info(&family, format, out),
    }
}

fn check_rtol(rtol: f64) -> Result<(), Failure> {
    if rtol > 0.0 && rtol < 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "--rtol must lie in (0, 1), got {rtol}"
        )))
    }
}

/// Parses a grid and checks both endpoints against the family's domain.
fn grid_points(spec: &str, family: &FamilyId) -> Result<Vec<f64>, Failure> {
    let g = GridSpec::parse(spec)?;
    family.domain().check(g.a).map_err(Failure::Lib)?;
    family.domain().check(g.b).map_err(Failure::Lib)?;
    Ok(g.points())
}

fn family_params(fam: &FamilyId, n: &BigRational) -> Value {
    json!({
        "family": fam,
        "c": format_rational(&fam.c()),
        "n": format_rational(n),
        "domain": fam.domain().to_string(),
    })
}

fn eval(args: &FamilyArgs, x: f64, rtol: f64, format: Format, out: &mut dyn Write) -> Outcome {
    check_rtol(rtol)?;
    let fam = args.family()?;
    let n = args.n()?;
    fam.s_params(&n)?;
    fam.domain().check(x).map_err(Failure::Lib)?;
    let (params, arg) = fam.resolve(&n, x)?;
    let results = s_all(&params, arg, rtol)?;
    match format {
        Format::Text => {
            write!(out, "{fam} n={n} x={x}")?;
            if arg != x {
                write!(out, " (S argument {arg})")?;
            }
            writeln!(out)?;
            for r in &results {
                let unit = if r.method == sqsum::Method::Quadrature {
                    "nodes"
                } else {
                    "terms"
                };
                writeln!(
                    out,
                    "{:<11}{}  err <= {:e}  {} {unit}",
                    r.method.name(),
                    r.value,
                    r.err_estimate,
                    r.terms_or_nodes
                )?;
            }
        }
        Format::Csv => {
            writeln!(out, "x,method,value,err_estimate")?;
            for r in &results {
                out.write_all(
                    csv_row(&[
                        sig17(x),
                        r.method.name().into(),
                        sig17(r.value),
                        sig17(r.err_estimate),
                    ])
                    .as_bytes(),
                )?;
            }
        }
        Format::Json => {
            let mut p = family_params(&fam, &n);
            p["x"] = json!(x);
            p["rtol"] = json!(rtol);
            p["s_params"] = json!(params);
            p["s_argument"] = json!(arg);
            let res: Vec<Value> = results
                .iter()
                .map(|r| {
                    let mut v = json!(r);
                    v["x"] = json!(x);
                    v
                })
                .collect();
            out.write_all(document("eval", p, "results", json!(res)).as_bytes())?;
        }
    }
    Ok(0)
}

fn table(args: &FamilyArgs, spec: &str, rtol: f64, format: Format, out: &mut dyn Write) -> Outcome {
    check_rtol(rtol)?;
    let fam = args.family()?;
    let n = args.n()?;
    fam.s_params(&n)?;
    let pts = grid_points(spec, &fam)?;
    let rows = par::map(&pts, |&x| -> sqsum::Result<_> {
        let (params, arg) = fam.resolve(&n, x)?;
        s_all(&params, arg, rtol)
    })
    .into_iter()
    .collect::<sqsum::Result<Vec<_>>>()?;
    match format {
        Format::Text => {
            writeln!(
                out,
                "{:<24} {:<24} {:<24} {:<24}",
                "x", "series", "closed", "quadrature"
            )?;
            for (x, r) in pts.iter().zip(&rows) {
                writeln!(
                    out,
                    "{:<24} {:<24} {:<24} {:<24}",
                    x, r[0].value, r[1].value, r[2].value
                )?;
            }
        }
        Format::Csv => {
            writeln!(out, "x,method,value,err_estimate")?;
            for (x, r) in pts.iter().zip(&rows) {
                for e in r {
                    out.write_all(
                        csv_row(&[
                            sig17(*x),
                            e.method.name().into(),
                            sig17(e.value),
                            sig17(e.err_estimate),
                        ])
                        .as_bytes(),
                    )?;
                }
            }
        }
        Format::Json => {
            let mut p = family_params(&fam, &n);
            p["grid"] = json!(spec);
            p["rtol"] = json!(rtol);
            let res: Vec<Value> = pts
                .iter()
                .zip(&rows)
                .flat_map(|(x, r)| {
                    r.iter().map(move |e| {
                        let mut v = json!(e);
                        v["x"] = json!(x);
                        v
                    })
                })
                .collect();
            out.write_all(document("table", p, "results", json!(res)).as_bytes())?;
        }
    }
    Ok(0)
}

struct Item {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn item(name: &'static str, failures: Vec<String>, what: String) -> Item {
    Item {
        name,
        ok: failures.is_empty(),
        detail: if failures.is_empty() {
            what
        } else {
            format!("{what}; failed: {}", failures.join(", "))
        },
    }
}

/// Indices in `range` for which `check` fails, checked in parallel.
fn failing(
    range: std::ops::RangeInclusive<u64>,
    check: impl Fn(u64) -> bool + Sync + Send,
) -> Vec<String> {
    let ns: Vec<u64> = range.collect();
    ns.iter()
        .zip(par::map(&ns, |&n| check(n)))
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| format!("n={n}"))
        .collect()
}

fn heun_zero(y: &RationalFn, hp: &HeunParams, t: &HeunTransform) -> bool {
    heun_residual(y, hp, t).is_ok_and(|r| r.is_zero())
}

fn verify_items(
    fam: &FamilyId,
    args: &FamilyArgs,
    n_max: u64,
) -> Result<(Value, Vec<Item>), Failure> {
    let range = format!("n = 0..={n_max}");
    let mut params = json!({ "family": fam, "n_max": n_max });
    let items = match fam.clone().normalized() {
        FamilyId::Bernstein => vec![
            item(
                "parseval",
                failing(0..=n_max, |n| f_poly_direct(n) == f_parseval_in_x(n)),
                format!("direct sum equals the even-power form, {range}"),
            ),
            item(
                "recurrences",
                failing(1..=n_max.max(1), recurrence_check),
                format!(
                    "three relations between F_(n-1), F_n, F_(n+1), n = 1..={}",
                    n_max.max(1)
                ),
            ),
            item(
                "heun",
                failing(0..=n_max, |n| {
                    let f = f_poly_direct(n);
                    ode_residual_poly(&f, &Ode::F(n)).is_zero()
                        && heun_zero(
                            &RationalFn::from_poly(f),
                            &heun_params_f(n),
                            &HeunTransform::None,
                        )
                }),
                format!("second-order equation and Heun form of F_n, {range}"),
            ),
            item(
                "legendre",
                failing(0..=n_max, |n| {
                    let bridge = (0..8).all(|k| neuschel_exact(n, &ratio(k, 16)).unwrap_or(false));
                    let relations = n == 0
                        || [ratio(5, 4), ratio(13, 5), ratio(3, 2)]
                            .iter()
                            .all(|t| derivative_relations_check(n, t).is_ok_and(|r| r.all()));
                    bridge && relations
                }),
                format!("F_n = (1-2x)^n P_n(t) at x = k/16, derivative relations, {range}"),
            ),
        ],
        FamilyId::Baskakov => vec![
            item(
                "ode",
                failing(1..=n_max.max(1), |n| {
                    ode_residual(&g_rational(n), &Ode::G(n)).is_zero()
                }),
                format!("second-order equation of G_n, n = 1..={}", n_max.max(1)),
            ),
            item(
                "heun",
                failing(1..=n_max.max(1), |n| {
                    heun_zero(&g_rational(n), &heun_params_g(n), &HeunTransform::NegateArg)
                }),
                format!("Heun form of G_n(-x), n = 1..={}", n_max.max(1)),
            ),
        ],
        FamilyId::Mkz => vec![
            item(
                "ode",
                failing(0..=n_max, |n| {
                    ode_residual(&j_rational(n), &Ode::J(n)).is_zero()
                }),
                format!("second-order equation of J_n, {range}"),
            ),
            item(
                "mobius",
                failing(0..=n_max, |n| {
                    let m = Mobius::new(int(1), int(0), int(-1), int(1));
                    j_rational(n) == g_rational(n + 1).compose_mobius(&m)
                }),
                format!("J_n(x) = G_(n+1)(x/(1-x)), {range}"),
            ),
        ],
        FamilyId::Bbh => vec![
            item(
                "ode",
                failing(0..=n_max, |n| {
                    ode_residual(&u_rational(n), &Ode::U(n)).is_zero()
                }),
                format!("second-order equation of U_n, {range}"),
            ),
            item(
                "parseval",
                failing(0..=n_max, |n| u_rational(n) == u_rational_via_parseval(n)),
                format!("even form in (1-x)/(1+x) equals F_n(x/(1+x)), {range}"),
            ),
        ],
        FamilyId::Szasz | FamilyId::General(_) => {
            let n = args.n()?;
            let p = fam.s_params(&n)?;
            params["n"] = json!(format_rational(&n));
            let s = exact_s(&p).map_err(|_| {
                Failure::Lib(Error::Unsupported(format!(
                    "{p} has no exact form to verify (needs c < 0, or c > 0 with n/c natural); \
                     try `scan --kind ode`"
                )))
            })?;
            let ode_ok = ode_residual(&s, &Ode::S(p.clone())).is_zero();
            let heun_ok = HeunParams::for_s_family(&p)
                .is_ok_and(|hp| heun_zero(&s, &hp, &HeunParams::transform_for(&p)));
            vec![
                item(
                    "ode",
                    if ode_ok { vec![] } else { vec![p.to_string()] },
                    format!("equation of S at {p}"),
                ),
                item(
                    "heun",
                    if heun_ok { vec![] } else { vec![p.to_string()] },
                    format!("Heun form at {p}"),
                ),
            ]
        }
    };
    Ok((params, items))
}

fn verify(args: &FamilyArgs, n_max: u64, format: Format, out: &mut dyn Write) -> Outcome {
    let fam = args.family()?;
    if args.n.is_some()
        && !matches!(
            fam.clone().normalized(),
            FamilyId::Szasz | FamilyId::General(_)
        )
    {
        return Err(Failure::Usage(
            "named families are verified over 0..=--n-max; drop -n".into(),
        ));
    }
    let (params, items) = verify_items(&fam, args, n_max)?;
    let all_ok = items.iter().all(|i| i.ok);
    match format {
        Format::Text => {
            let summary: Vec<String> = items
                .iter()
                .map(|i| format!("{}: {}", i.name, ok_word(i.ok)))
                .collect();
            writeln!(out, "{}", summary.join(", "))?;
            for i in &items {
                writeln!(out, "  {}: {}", i.name, i.detail)?;
            }
        }
        Format::Csv => {
            writeln!(out, "check,status,detail")?;
            for i in &items {
                out.write_all(
                    csv_row(&[
                        i.name.into(),
                        ok_word(i.ok).into(),
                        format!("\"{}\"", i.detail),
                    ])
                    .as_bytes(),
                )?;
            }
        }
        Format::Json => {
            let res: Vec<Value> = items
                .iter()
                .map(|i| json!({ "check": i.name, "ok": i.ok, "detail": i.detail }))
                .collect();
            out.write_all(document("verify", params, "results", json!(res)).as_bytes())?;
        }
    }
    Ok(if all_ok { 0 } else { crate::EXIT_FAILURE })
}

fn bounds(
    args: &FamilyArgs,
    x: Option<f64>,
    spec: Option<&str>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let fam = args.family()?;
    let n = args.n_natural()?;
    let scanner = BoundScanner::new(&fam, n)?;
    let pts = match (x, spec) {
        (Some(x), _) => {
            fam.domain().check(x).map_err(Failure::Lib)?;
            vec![x]
        }
        (None, Some(s)) => grid_points(s, &fam)?,
        (None, None) => grid::standard(&fam),
    };
    let reports = scanner.reports(&pts)?;
    let ok = reports.iter().all(|r| r.min_margin >= -MARGIN_TOL);
    match format {
        Format::Text => {
            for r in &reports {
                for b in &r.bounds {
                    writeln!(
                        out,
                        "x={} s={} {}: bound={} margin={}",
                        num(r.x),
                        num(r.s_value),
                        b.label,
                        num(b.value),
                        num(b.margin)
                    )?;
                }
            }
            if let Some(r) = reports.first() {
                for note in &r.notes {
                    writeln!(out, "note: {note}")?;
                }
            }
            let worst = reports
                .iter()
                .map(|r| r.min_margin)
                .fold(f64::INFINITY, f64::min);
            writeln!(
                out,
                "{} points, min margin {}: {}",
                reports.len(),
                num(worst),
                ok_word(ok)
            )?;
        }
        Format::Csv => {
            writeln!(out, "x,bound,s_value,bound_value,margin")?;
            for r in &reports {
                for b in &r.bounds {
                    out.write_all(
                        csv_row(&[
                            sig17(r.x),
                            b.label.into(),
                            sig17(r.s_value),
                            sig17(b.value),
                            sig17(b.margin),
                        ])
                        .as_bytes(),
                    )?;
                }
            }
        }
        Format::Json => {
            let mut p = family_params(&fam, &int(n as i64));
            match (x, spec) {
                (Some(x), _) => p["x"] = json!(x),
                (None, Some(s)) => p["grid"] = json!(s),
                (None, None) => p["grid"] = json!("standard"),
            }
            out.write_all(document("bounds", p, "report", json!(reports)).as_bytes())?;
        }
    }
    Ok(if ok { 0 } else { crate::EXIT_FAILURE })
}

/// Interior points for finite-difference scans, away from the domain ends.
fn interior_grid(family: &FamilyId) -> Vec<f64> {
    match family.domain().upper {
        Some(b) => grid::uniform(0.05 * b, 0.95 * b, 64),
        None => grid::uniform(0.05, grid::UNBOUNDED_CAP, 64),
    }
}

fn scan(
    args: &FamilyArgs,
    kind: ScanArg,
    spec: Option<&str>,
    h: Option<f64>,
    stencil: Stencil,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let fam = args.family()?;
    if h.is_some() && kind != ScanArg::Ode {
        return Err(Failure::Usage("--h only applies to --kind ode".into()));
    }
    let pts = spec.map(|s| grid_points(s, &fam)).transpose()?;
    let s_grid =
        |pts: Vec<f64>| -> Vec<f64> { pts.into_iter().map(|x| fam.s_argument(x)).collect() };
    let mut report: ScanReport = match kind {
        ScanArg::Ode => {
            let p = fam.s_params(&args.n()?)?;
            let g = s_grid(pts.unwrap_or_else(|| interior_grid(&fam)));
            let mut r = ode_residual_scan_with(&p, &g, h, stencil)?;
            if matches!(fam, FamilyId::Bbh | FamilyId::Mkz) {
                r.notes
                    .push(format!("grid mapped to the argument of S ({p})"));
            }
            r
        }
        ScanArg::Convexity => {
            let n = args.n_natural()?;
            convexity_scan(&fam, n, &pts.unwrap_or_else(|| grid::standard(&fam)))?
        }
        ScanArg::Logconvexity => {
            let p = fam.s_params(&args.n()?)?;
            match pts {
                Some(g) => logconvexity_scan(&p, &s_grid(g))?,
                None if exact_s(&p).is_ok() => logconvexity_scan_exact(&p, &conjecture_points(&p))?,
                None => logconvexity_scan(&p, &grid::standard_for_domain(p.domain()))?,
            }
        }
        ScanArg::Monotonicity => {
            if fam.clone().normalized() != FamilyId::Bernstein {
                return Err(Failure::Usage(
                    "monotonicity scans apply to the bernstein family".into(),
                ));
            }
            let n = args.n_natural()?;
            monotonicity_check(n, &pts.unwrap_or_else(|| grid::uniform(0.0, 1.0, 101)))?
        }
    };
    if let Some(h) = h {
        report.notes.retain(|n| !n.starts_with("h = "));
        report.notes.push(format!("h = {h:e}"));
    }
    match format {
        Format::Text => {
            let kind = serde_json::to_value(report.kind).expect("serializable");
            writeln!(
                out,
                "{} scan ({}), {} points",
                kind.as_str().unwrap_or("scan"),
                report.method,
                report.grid.len()
            )?;
            writeln!(
                out,
                "min margin {} at x = {}",
                num(report.min_margin),
                num(report.argmin)
            )?;
            writeln!(
                out,
                "{} below {}",
                report.violations.len(),
                num(report.threshold)
            )?;
            if let Some(status) = report.status {
                writeln!(out, "status: {status}")?;
            }
            for note in &report.notes {
                writeln!(out, "note: {note}")?;
            }
        }
        Format::Csv => {
            writeln!(out, "x,margin")?;
            for (x, m) in report.grid.iter().zip(&report.margins) {
                out.write_all(csv_row(&[sig17(*x), sig17(*m)]).as_bytes())?;
            }
        }
        Format::Json => {
            let mut p = json!({ "family": fam, "kind": format!("{kind:?}").to_lowercase() });
            if let Some(n) = &args.n {
                p["n"] = json!(format_rational(&sqsum::exact::rational::parse_rational(n)?));
            }
            p["grid"] = json!(spec.unwrap_or("default"));
            out.write_all(document("scan", p, "report", json!(report)).as_bytes())?;
        }
    }
    // completing is success; margins never change the exit status
    Ok(0)
}

fn info(args: &FamilyArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let fam = args.family()?;
    let normal = fam.clone().normalized();
    let mut res = json!({
        "family": fam,
        "classification": classification(&normal),
        "c": format_rational(&fam.c()),
        "domain": fam.domain().to_string(),
        "integer_index": fam.integer_index(),
        "bounds": bounds_for(&normal).iter().map(|b| b.label()).collect::<Vec<_>>(),
    });
    let n = args.n.as_ref().map(|_| args.n()).transpose()?;
    if let Some(n) = &n {
        let p = fam.s_params(n)?;
        res["n"] = json!(format_rational(n));
        res["s_params"] = json!(p);
        res["a"] = json!(p.a_exact().map(|a| format_rational(&a)));
        res["exact_form"] = json!(family_exact(&fam, n).is_ok());
    }
    match format {
        Format::Text | Format::Csv => {
            let map = res.as_object().expect("object");
            for key in [
                "family",
                "classification",
                "c",
                "domain",
                "integer_index",
                "n",
                "a",
                "exact_form",
                "bounds",
            ] {
                if let Some(v) = map.get(key) {
                    let text = match v {
                        Value::String(s) => plain_rational(s).to_string(),
                        Value::Array(a) if a.is_empty() => "none".into(),
                        Value::Array(a) => a
                            .iter()
                            .filter_map(Value::as_str)
                            .collect::<Vec<_>>()
                            .join(" "),
                        Value::Null => "none".into(),
                        other => other.to_string(),
                    };
                    if format == Format::Csv {
                        out.write_all(csv_row(&[key.into(), format!("\"{text}\"")]).as_bytes())?;
                    } else {
                        writeln!(out, "{key:<15}{text}")?;
                    }
                }
            }
            if let Some(p) = res.get("s_params") {
                if format == Format::Text {
                    let l = p["l"]
                        .as_u64()
                        .map_or("none".to_string(), |l| l.to_string());
                    writeln!(
                        out,
                        "{:<15}n={} c={} l={l} domain {}",
                        "S",
                        plain_rational(p["n"].as_str().unwrap_or("")),
                        plain_rational(p["c"].as_str().unwrap_or("")),
                        p["domain"].as_str().unwrap_or("")
                    )?;
                }
            }
        }
        Format::Json => {
            let p = json!({ "family": fam, "n": n.as_ref().map(format_rational) });
            out.write_all(document("info", p, "results", res).as_bytes())?;
        }
    }
    Ok(0)
}

fn classification(fam: &FamilyId) -> String {
    match fam {
        FamilyId::Bernstein => "Bernstein (c = -1, polynomial sum)".into(),
        FamilyId::Szasz => "Szasz-Mirakjan (c = 0, Bessel closed form)".into(),
        FamilyId::Baskakov => "Baskakov (c = 1, rational sum)".into(),
        FamilyId::Bbh => "Bleimann-Butzer-Hahn (Bernstein sum at x/(1+x))".into(),
        FamilyId::Mkz => "Meyer-Konig-Zeller (Baskakov sum at x/(1-x))".into(),
        FamilyId::General(c) if c < &int(0) => "general c < 0 (polynomial sum, n = -c l)".into(),
        FamilyId::General(_) => "general c > 0 (hypergeometric sum)".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_errors_are_usage_errors() {
        assert!(matches!(
            Failure::from(Error::InvalidArgument("x".into())),
            Failure::Usage(_)
        ));
        let e = Error::OutsideDomain {
            x: 2.0,
            domain: sqsum::Domain::closed(1.0),
        };
        assert!(matches!(Failure::from(e), Failure::Lib(_)));
    }

    #[test]
    fn interior_grid_stays_inside() {
        for fam in [FamilyId::Bernstein, FamilyId::Mkz, FamilyId::Szasz] {
            let g = interior_grid(&fam);
            assert!(g.iter().all(|&x| fam.domain().contains(x) && x > 0.0));
        }
    }
}
