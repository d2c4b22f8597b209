//! Gauss–Chebyshev rules for the two weights that appear in the integral
//! representations: `1/√(t(1-t))` on `[0, 1]` and `1/√(1-t²)` on `[-1, 1]`.

use std::f64::consts::PI;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RuleKind {
    ChebyshevOn01,
    ChebyshevOnM11,
}

/// An `m`-point Gauss–Chebyshev rule. Alongside the nodes it keeps the
/// distances to both interval ends, computed from half-angle sines and
/// cosines so that integrands like `1 + (1-t)·B` keep full relative accuracy
/// next to the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    lower_gap: Vec<f64>,
    upper_gap: Vec<f64>,
}

impl QuadratureRule {
    /// Nodes `t_j = (1 + cos θ_j)/2`, `θ_j = (2j-1)π/(2m)`, weights `π/m`.
    pub fn chebyshev_01(m: usize) -> Self {
        assert!(m >= 1, "a quadrature rule needs at least one node");
        let w = PI / m as f64;
        let mut rule = QuadratureRule {
            kind: RuleKind::ChebyshevOn01,
            nodes: Vec::with_capacity(m),
            weights: vec![w; m],
            lower_gap: Vec::with_capacity(m),
            upper_gap: Vec::with_capacity(m),
        };
        for j in 1..=m {
            let half = (2 * j - 1) as f64 * PI / (4 * m) as f64;
            let (s, c) = half.sin_cos();
            rule.nodes.push(c * c);
            rule.lower_gap.push(c * c);
            rule.upper_gap.push(s * s);
        }
        rule
    }

    /// Classical Gauss–Chebyshev on `[-1, 1]`: nodes `cos θ_j`, weights `π/m`.
    pub fn chebyshev_m11(m: usize) -> Self {
        assert!(m >= 1, "a quadrature rule needs at least one node");
        let w = PI / m as f64;
        let mut rule = QuadratureRule {
            kind: RuleKind::ChebyshevOnM11,
            nodes: Vec::with_capacity(m),
            weights: vec![w; m],
            lower_gap: Vec::with_capacity(m),
            upper_gap: Vec::with_capacity(m),
        };
        for j in 1..=m {
            let theta = (2 * j - 1) as f64 * PI / (2 * m) as f64;
            let (s, c) = (0.5 * theta).sin_cos();
            rule.nodes.push(theta.cos());
            rule.lower_gap.push(2.0 * c * c);
            rule.upper_gap.push(2.0 * s * s);
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_j w_j f(t_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Like [`integrate`](Self::integrate) but hands the integrand
    /// `(t, t - left end, right end - t)`.
    pub fn integrate_gaps(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        (0..self.len())
            .map(|j| self.weights[j] * f(self.nodes[j], self.lower_gap[j], self.upper_gap[j]))
            .sum()
    }
}
