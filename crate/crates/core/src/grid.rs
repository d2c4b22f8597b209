//! Sample grids used by the scans.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::rational::{from_f64, int};
use crate::params::{Domain, FamilyId};

/// Points per compact domain in the standard grids.
pub const STANDARD_POINTS: usize = 256;
/// Where unbounded domains are cut for the Chebyshev part of a grid.
pub const UNBOUNDED_CAP: f64 = 20.0;

/// `count` equally spaced points from `a` to `b`, both included.
pub fn uniform(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|j| {
                if j == count - 1 {
                    b
                } else {
                    a + (b - a) * j as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Chebyshev–Lobatto points (extrema of `T_{count-1}`), endpoints included,
/// ascending.
pub fn chebyshev_lobatto(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return uniform(a, b, count);
    }
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (0..count)
        .map(|j| match j {
            0 => a,
            j if j == count - 1 => b,
            j => mid - half * (j as f64 * PI / (count - 1) as f64).cos(),
        })
        .collect()
}

/// Chebyshev points of the first kind (zeros of `T_count`): strictly inside
/// `(a, b)`, ascending.
pub fn chebyshev_interior(a: f64, b: f64, count: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (1..=count)
        .map(|j| mid - half * ((2 * j - 1) as f64 * PI / (2 * count) as f64).cos())
        .collect()
}

/// `{10^j : j in lo..=hi}`.
pub fn decades(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 10f64.powi(j)).collect()
}

/// The grid a domain is checked on: Chebyshev–Lobatto over a compact
/// interval, first-kind points over a half-open one, and for `[0, ∞)` a
/// Lobatto grid on `[0, 20]` plus the decades `10^-3 … 10^6`.
pub fn standard_for_domain(domain: Domain) -> Vec<f64> {
    let mut g = match domain.upper {
        Some(b) if domain.upper_open => chebyshev_interior(0.0, b, STANDARD_POINTS),
        Some(b) => chebyshev_lobatto(0.0, b, STANDARD_POINTS),
        None => {
            let mut g = chebyshev_lobatto(0.0, UNBOUNDED_CAP, STANDARD_POINTS);
            g.extend(decades(-3, 6));
            g
        }
    };
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn standard(family: &FamilyId) -> Vec<f64> {
    standard_for_domain(family.domain())
}

/// Rational sample points on `[0, upper]`: `half` uniform points
/// `k/(half-1)·upper` and `half` first-kind Chebyshev points rounded to
/// multiples of `2^-24·upper`. Sorted and deduplicated.
pub fn rational_mixed(upper: &BigRational, half: usize) -> Vec<BigRational> {
    let mut pts: Vec<BigRational> = (0..half)
        .map(|k| upper * BigRational::new(BigInt::from(k), BigInt::from(half.max(2) - 1)))
        .collect();
    let scale = f64::from(1u32 << 24);
    for t in chebyshev_interior(0.0, 1.0, half) {
        let q = (t * scale).round();
        let r = from_f64(q / scale).expect("finite grid point");
        pts.push(upper * r);
    }
    pts.sort();
    pts.dedup();
    pts
}

/// Upper end of the rational sampling range for a domain.
pub fn rational_upper(domain: Domain) -> BigRational {
    match domain.upper {
        Some(b) => from_f64(b).expect("finite domain end"),
        None => int(UNBOUNDED_CAP as i64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobatto_is_ascending_with_endpoints() {
        let g = chebyshev_lobatto(0.0, 1.0, 256);
        assert_eq!(g.len(), 256);
        assert_eq!((g[0], g[255]), (0.0, 1.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn interior_points_avoid_endpoints() {
        let g = chebyshev_interior(0.0, 1.0, 256);
        assert!(g[0] > 0.0 && g[255] < 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn standard_grids() {
        assert_eq!(standard(&FamilyId::Bernstein).len(), 256);
        assert!(standard(&FamilyId::Mkz)
            .iter()
            .all(|&x| (0.0..1.0).contains(&x)));
        let g = standard(&FamilyId::Szasz);
        assert!(g.contains(&1e6) && g.contains(&1e-3));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rational_grid_has_requested_size() {
        let pts = rational_mixed(&int(1), 512);
        assert_eq!(pts.len(), 1024);
        assert_eq!(pts[0], int(0));
        assert_eq!(pts[pts.len() - 1], int(1));
    }
}
