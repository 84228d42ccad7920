//! Sturmian (group) and physical (tilted) radial functions.
//!
//! The Sturmian functions
//! `R_{nJ}(r) = 2 √(Γ(n+1)/Γ(n+2J+2)) e^{−r} (2r)^J L_n^{2J+1}(2r)`
//! are orthonormal under `∫ · (1/r) r² dr` and carry the representation
//! with `k = J + 1`. The tilting transformation dilates them by
//! `ñ = n + J + 1`, giving the bound states of
//! `[−½ d²/dr² − (1/r) d/dr + J(J+1)/(2r²) − 1/r] R̄ = E R̄`
//! with `E = −1/(2ñ²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::quantum::energy;
use crate::special::{laguerre_sequence, laguerre_unchecked, laguerre_with_derivatives, ln_gamma};

/// Sample points `r > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    points: Vec<f64>,
}

impl RadialGrid {
    pub fn linspace(r_min: f64, r_max: f64, points: usize) -> Result<Self> {
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(Error::invalid("r_min", format!("must be positive, got {r_min}")));
        }
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::invalid(
                "r_max",
                format!("must exceed r_min = {r_min}, got {r_max}"),
            ));
        }
        if points < 2 {
            return Err(Error::invalid("points", "need at least 2 grid points"));
        }
        let step = (r_max - r_min) / (points - 1) as f64;
        Ok(RadialGrid {
            points: (0..points).map(|i| r_min + step * i as f64).collect(),
        })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid("grid", "points must be finite and positive"));
        }
        Ok(RadialGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `ñ = n + J + 1`.
pub fn dilation_length(n: usize, big_j: f64) -> f64 {
    n as f64 + big_j + 1.0
}

fn ln_sturmian_norm(n: usize, big_j: f64) -> f64 {
    std::f64::consts::LN_2 + 0.5 * (ln_gamma(n as f64 + 1.0) - ln_gamma(n as f64 + 2.0 * big_j + 2.0))
}

/// `R_{nJ}(r)`; requires `J ≥ 0`, `r > 0`.
pub fn sturmian_radial(n: usize, big_j: f64, r: f64) -> f64 {
    let x = 2.0 * r;
    let lag = laguerre_unchecked(n, 2.0 * big_j + 1.0, x);
    lag * (ln_sturmian_norm(n, big_j) - r + big_j * x.ln()).exp()
}

/// `[R_{0J}(r), …, R_{n_max,J}(r)]` from one Laguerre recurrence pass.
pub fn sturmian_sequence(n_max: usize, big_j: f64, r: f64) -> Vec<f64> {
    let x = 2.0 * r;
    let base = -r + big_j * x.ln();
    laguerre_sequence(n_max, 2.0 * big_j + 1.0, x)
        .expect("2J+1 > -1")
        .into_iter()
        .enumerate()
        .map(|(n, lag)| lag * (ln_sturmian_norm(n, big_j) + base).exp())
        .collect()
}

/// Prefactor `c` making `c·R_{nJ}(r/ñ)` unit-normalised under `r² dr`.
///
/// `∫ [R(r/ñ)]² r² dr = ñ³ ∫ R(ρ)² ρ² dρ`, and the last integral is
/// `⟨T0 − T1⟩ = n + k = ñ` in the Sturmian measure, so `c = ñ^{−2}`.
pub fn physical_prefactor(n: usize, big_j: f64) -> f64 {
    let nt = dilation_length(n, big_j);
    let first_moment = n as f64 + big_j + 1.0;
    1.0 / (nt.powi(3) * first_moment).sqrt()
}

/// `R̄_{nJ}(r) = ñ^{−2} R_{nJ}(r/ñ)`: the Laguerre argument is `2r/ñ`.
pub fn physical_radial(n: usize, big_j: f64, r: f64) -> f64 {
    let nt = dilation_length(n, big_j);
    physical_prefactor(n, big_j) * sturmian_radial(n, big_j, r / nt)
}

/// Residual of the radial equation for `c·R_{nJ}(r/length)` at energy `e`,
/// `max |[…]R̄| / max |R̄|` over the grid, with exact derivatives.
pub fn radial_residual(n: usize, big_j: f64, length: f64, e: f64, grid: &RadialGrid) -> f64 {
    let alpha = 2.0 * big_j + 1.0;
    let ln_norm = ln_sturmian_norm(n, big_j);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &r in grid.points() {
        let x = 2.0 * r / length;
        let (lag, d1, d2) = laguerre_with_derivatives(n, alpha, x).expect("alpha > -1");
        // g(x) = e^{φ(x)} L(x), φ = −x/2 + J ln x
        let dphi = -0.5 + big_j / x;
        let ddphi = -big_j / (x * x);
        let envelope = (ln_norm - 0.5 * x + big_j * x.ln()).exp();
        let g = envelope * lag;
        let g1 = envelope * (dphi * lag + d1);
        let g2 = envelope * ((ddphi + dphi * dphi) * lag + 2.0 * dphi * d1 + d2);
        let dx = 2.0 / length;
        let value = g;
        let first = g1 * dx;
        let second = g2 * dx * dx;
        let res = -0.5 * second - first / r + (big_j * (big_j + 1.0) / (2.0 * r * r) - 1.0 / r - e) * value;
        worst = worst.max(res.abs());
        scale = scale.max(value.abs());
    }
    if scale == 0.0 {
        return f64::INFINITY;
    }
    worst / scale
}

/// Residual of [`physical_radial`] at its own energy.
pub fn schrodinger_residual(n: usize, big_j: f64, grid: &RadialGrid) -> f64 {
    radial_residual(n, big_j, dilation_length(n, big_j), energy(n, big_j), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{quadrature_inner_real, Weight};
    use crate::quadrature::half_line_rule;

    #[test]
    fn ground_sturmian_closed_form() {
        for r in [0.1, 1.0, 3.7] {
            assert!((sturmian_radial(0, 0.0, r) - 2.0 * (-r).exp()).abs() < 1e-15);
        }
        let rule = half_line_rule(200, 1.0).unwrap();
        let f = |r| sturmian_radial(0, 0.0, r);
        assert!((quadrature_inner_real(f, f, Weight::InverseR, &rule).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sturmian_node() {
        // L_1^1(2) = 0
        assert!(sturmian_radial(1, 0.0, 1.0).abs() < 1e-16);
    }

    #[test]
    fn sturmian_norm_and_overlap() {
        let rule = half_line_rule(400, 2.0).unwrap();
        let j = 0.8;
        let r2 = |r| sturmian_radial(2, j, r);
        let r4 = |r| sturmian_radial(4, j, r);
        assert!((quadrature_inner_real(r2, r2, Weight::InverseR, &rule).unwrap() - 1.0).abs() < 1e-10);
        assert!(quadrature_inner_real(r2, r4, Weight::InverseR, &rule).unwrap().abs() < 1e-9);
        let r3 = |r| sturmian_radial(3, 1.2, r);
        assert!((quadrature_inner_real(r3, r3, Weight::InverseR, &rule).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sequence_matches_pointwise() {
        let seq = sturmian_sequence(15, 0.37, 2.3);
        for (n, v) in seq.iter().enumerate() {
            assert!((v - sturmian_radial(n, 0.37, 2.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn hydrogen_physical_states() {
        for r in [0.2, 1.0, 4.0] {
            assert!((physical_radial(0, 0.0, r) - 2.0 * (-r).exp()).abs() < 1e-15);
            let two_s = (2.0 - r) * (-r / 2.0).exp() / (2.0 * 2f64.sqrt());
            assert!((physical_radial(1, 0.0, r) - two_s).abs() < 1e-15);
        }
        assert!(physical_radial(1, 0.0, 2.0).abs() < 1e-16);
        assert_eq!(physical_prefactor(2, 1.0), 1.0 / 16.0);
    }

    #[test]
    fn physical_norm() {
        let (n, j) = (2, 1.3);
        let rule = half_line_rule(400, 2.0 * dilation_length(n, j)).unwrap();
        let f = |r| physical_radial(n, j, r);
        assert!((quadrature_inner_real(f, f, Weight::One, &rule).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn residuals() {
        let grid = RadialGrid::linspace(0.05, 60.0, 600).unwrap();
        assert!(schrodinger_residual(0, 0.0, &grid) < 1e-12);
        assert!(schrodinger_residual(1, 0.0, &grid) < 1e-10);
        assert!(schrodinger_residual(3, 2.4, &grid) < 1e-8);
        // wrong energy is detected
        assert!(radial_residual(1, 0.0, 2.0, -0.2, &grid) > 1e-3);
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::linspace(0.0, 1.0, 5).is_err());
        assert!(RadialGrid::linspace(1.0, 1.0, 5).is_err());
        assert!(RadialGrid::linspace(0.1, 1.0, 1).is_err());
        assert!(RadialGrid::from_points(vec![0.5, -1.0]).is_err());
    }
}
