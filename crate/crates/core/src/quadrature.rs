//! Quadrature rules for the radial half-line and the angular interval.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Gauss–Legendre order used inside each panel of the half-line rule.
const PANEL_ORDER: usize = 20;
/// Ratio of successive panel widths in the graded region near `r = 0`.
const GRADING_RATIO: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleKind {
    /// `r = scale · t / (1 − t)` applied to composite Gauss–Legendre on `(0, 1)`.
    HalfLineExponential { point_count: usize, scale: f64 },
    /// Gauss–Jacobi on `[−1, 1]`; the weight `(1−x)^a (1+x)^b` is folded into the weights.
    JacobiInterval { point_count: usize, a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    /// The same family of rule with twice the points.
    pub fn refined(&self) -> Result<QuadratureRule> {
        match self.kind {
            RuleKind::HalfLineExponential { point_count, scale } => half_line_rule(2 * point_count, scale),
            RuleKind::JacobiInterval { point_count, a, b } => jacobi_rule(2 * point_count, a, b),
        }
    }
}

fn legendre_unit(order: usize) -> Vec<(f64, f64)> {
    let deg = NonZeroUsize::new(order).expect("order checked by caller");
    GaussLegendre::new(deg)
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect::<Vec<_>>()
}

/// Panel breakpoints on `(0, 1)`: geometrically graded toward 0 so that
/// integrands behaving like `r^a` with non-integer `a` converge quickly,
/// then uniform up to 1.
fn panel_breaks(panels: usize) -> Vec<f64> {
    if panels == 1 {
        return vec![0.0, 1.0];
    }
    let graded = (panels / 3).max(1);
    let uniform = panels - graded;
    let t_c = 1.0 / (uniform as f64 + 1.0);
    let mut breaks = vec![0.0];
    for i in (0..graded).rev() {
        breaks.push(t_c * GRADING_RATIO.powi(i as i32));
    }
    for i in 1..=uniform {
        breaks.push(t_c + (1.0 - t_c) * i as f64 / uniform as f64);
    }
    breaks
}

/// Composite Gauss–Legendre rule on `(0, ∞)` through `r = scale·t/(1−t)`.
///
/// `scale` should be of the order of the integrand's decay length.
pub fn half_line_rule(point_count: usize, scale: f64) -> Result<QuadratureRule> {
    if point_count < 2 {
        return Err(Error::invalid("point_count", "need at least 2 points"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
    }
    let (order, panels) = if point_count < 2 * PANEL_ORDER {
        (point_count, 1)
    } else {
        (PANEL_ORDER, point_count / PANEL_ORDER)
    };
    let unit = legendre_unit(order);
    let breaks = panel_breaks(panels);
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let h = hi - lo;
        for &(u, w) in &unit {
            let t = lo + h * u;
            let one_minus = 1.0 - t;
            nodes.push(scale * t / one_minus);
            weights.push(h * w * scale / (one_minus * one_minus));
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::HalfLineExponential { point_count, scale },
    })
}

/// Gauss–Jacobi rule for `∫_{−1}^{1} (1−x)^a (1+x)^b f(x) dx`.
///
/// Odd point counts are rounded up: gauss-quad 0.3 returns inexact
/// odd-order rules whenever `a ≠ b`.
pub fn jacobi_rule(point_count: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    let point_count = point_count + point_count % 2;
    let deg = NonZeroUsize::new(point_count).ok_or_else(|| Error::invalid("point_count", "must be positive"))?;
    let alpha = FiniteAboveNegOneF64::new(a).ok_or_else(|| Error::invalid("a", format!("must be > -1, got {a}")))?;
    let beta = FiniteAboveNegOneF64::new(b).ok_or_else(|| Error::invalid("b", format!("must be > -1, got {b}")))?;
    let rule = GaussJacobi::new(deg, alpha, beta);
    let mut pairs: Vec<(f64, f64)> = rule.into_iter().collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::JacobiInterval { point_count, a, b },
    })
}

/// Plain composite Gauss–Legendre on `[lo, hi]`.
pub(crate) fn interval_rule(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let unit = legendre_unit(order);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = lo + p as f64 * h;
            unit.iter().map(move |&(u, w)| (a + h * u, h * w))
        })
        .collect()
}
