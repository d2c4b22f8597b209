use proptest::prelude::*;

use sqsum::analysis::{logconvexity_scan_exact, monotonicity_check};
use sqsum::bounds::{BoundScanner, MARGIN_TOL};
use sqsum::eval::{s_all, s_closed, t_closed, DEFAULT_RTOL};
use sqsum::exact::families::{exact_s, f_poly_direct, g_rational};
use sqsum::exact::ode::{ode_residual, Ode};
use sqsum::exact::rational::{int, ratio};
use sqsum::exact::{RationalFn, RationalPoly, Var};
use sqsum::params::partition_sum;
use sqsum::{grid, FamilyId, Params};

fn params_strategy() -> impl Strategy<Value = Params> {
    prop_oneof![
        (1i64..=30).prop_map(|l| Params::bernstein(l as u64).unwrap()),
        (1i64..=12, 1i64..=4).prop_map(|(l, q)| Params::new(ratio(l, q), ratio(-1, q)).unwrap()),
        (1i64..=40, 1i64..=4).prop_map(|(p, q)| Params::new(ratio(p, q), int(0)).unwrap()),
        (1i64..=40, 1i64..=4)
            .prop_filter("n >= c", |(p, q)| p >= q)
            .prop_map(|(p, q)| Params::new(ratio(p, 2), ratio(q, 2)).unwrap()),
    ]
}

/// A point of the domain, capped at 20 when it is unbounded.
fn point(params: &Params, u: f64) -> f64 {
    params.domain().upper.unwrap_or(20.0) * u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fundamental_functions_sum_to_one(params in params_strategy(), u in 0.0..1.0f64) {
        let x = point(&params, u);
        let s = partition_sum(&params, x, 1e-16).unwrap().sum;
        prop_assert!((s - 1.0).abs() < 1e-12, "{params} x={x}: {s}");
    }

    #[test]
    fn three_routes_agree(params in params_strategy(), u in 0.0..1.0f64) {
        let x = point(&params, u);
        let [a, b, c] = s_all(&params, x, DEFAULT_RTOL).unwrap();
        for (p, q) in [(a, b), (a, c), (b, c)] {
            let rel = (p.value - q.value).abs() / p.value.max(q.value);
            prop_assert!(rel < 1e-10, "{params} x={x}: {p:?} vs {q:?}");
        }
    }

    #[test]
    fn sum_lies_in_unit_interval(params in params_strategy(), u in 0.0..1.0f64) {
        let x = point(&params, u);
        let s = s_closed(&params, x).unwrap().value;
        prop_assert!(s > 0.0 && s <= 1.0 + 1e-15, "{params} x={x}: {s}");
    }

    #[test]
    fn kernel_is_symmetric_with_sum_on_diagonal(
        params in params_strategy(),
        u in 0.0..1.0f64,
        v in 0.0..1.0f64,
    ) {
        let (x, y) = (point(&params, u), point(&params, v));
        let a = t_closed(&params, x, y).unwrap();
        let b = t_closed(&params, y, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
        let d = t_closed(&params, x, x).unwrap();
        let s = s_closed(&params, x).unwrap().value;
        prop_assert!((d - s).abs() <= 1e-12 * s);
        // Cauchy–Schwarz
        let sy = s_closed(&params, y).unwrap().value;
        prop_assert!(a * a <= s * sy * (1.0 + 1e-10));
    }

    #[test]
    fn bernstein_sum_is_symmetric(n in 0u64..=25, p in 0i64..=64) {
        let f = f_poly_direct(n);
        let x = ratio(p, 64);
        prop_assert_eq!(f.eval(&x), f.eval(&(int(1) - &x)));
    }

    #[test]
    fn ode_residual_is_linear(n in 1u64..=8, a in -5i64..=5, b in -5i64..=5) {
        let y1 = g_rational(n);
        let y2 = RationalFn::from_poly(RationalPoly::from_ints(&[a, b, 1], Var::X));
        let ode = Ode::G(n);
        let combo = &y1.scale(&int(a)) + &y2;
        let lhs = ode_residual(&combo, &ode);
        let rhs = &ode_residual(&y1, &ode).scale(&int(a)) + &ode_residual(&y2, &ode);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_form_matches_closed_form(l in 1u64..=20, k in 1i64..=3, u in 0.0..1.0f64) {
        // c = -1/k with n = l/k, and c = k with n = k l
        for params in [
            Params::new(ratio(l as i64, k), ratio(-1, k)).unwrap(),
            Params::new(int(k * l as i64), int(k)).unwrap(),
        ] {
            let x = point(&params, u);
            let e = exact_s(&params).unwrap().evaluator().eval_f64(x).unwrap();
            let s = s_closed(&params, x).unwrap().value;
            prop_assert!((e - s).abs() <= 1e-12 * e, "{params} x={x}: {e} vs {s}");
        }
    }

    #[test]
    fn bounds_hold_at_random_points(n in 1u64..=40, u in 0.0..1.0f64) {
        for family in [FamilyId::Bernstein, FamilyId::Szasz, FamilyId::Baskakov, FamilyId::Bbh, FamilyId::Mkz] {
            let x = match family.domain().upper {
                Some(b) if family.domain().upper_open => b * u * 0.999,
                Some(b) => b * u,
                None => 1e3 * u,
            };
            let r = BoundScanner::new(&family, n).unwrap().report(x).unwrap();
            prop_assert!(r.min_margin >= -MARGIN_TOL, "{r:?}");
        }
    }
}

#[test]
fn bernstein_monotone_halves() {
    let g = grid::chebyshev_lobatto(0.0, 1.0, 101);
    for n in 1..=30 {
        let r = monotonicity_check(n, &g).unwrap();
        assert!(r.passed(), "n={n}: {:?}", r.violations);
    }
}

#[test]
fn log_convexity_report_is_evidence_only() {
    let p = Params::bernstein(4).unwrap();
    let pts: Vec<_> = (0..=16).map(|k| ratio(k, 16)).collect();
    let r = logconvexity_scan_exact(&p, &pts).unwrap();
    assert_eq!(r.status, Some("unproven"));
    assert_eq!(r.grid_exact.as_ref().map(Vec::len), Some(17));
}
