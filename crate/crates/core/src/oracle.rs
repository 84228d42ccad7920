//! Brute-force references: dense truncated-matrix exponentials and
//! doubling-checked quadrature. Nothing in here uses the closed forms it is
//! meant to validate.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::special::ln_gamma;
use crate::su11::{build_generators, BargmannIndex, CoherentParams, FockVector};

/// Scaled norm at which the Taylor core is applied.
const TAYLOR_RADIUS: f64 = 0.5;
const MAX_SQUARINGS: u32 = 60;
const MAX_TAYLOR_TERMS: usize = 40;

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` by scaling and squaring around a truncated Taylor series.
pub fn matrix_exp(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::invalid("A", format!("matrix must be square, got {rows}x{cols}")));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("A", "entries must be finite"));
    }
    let norm = one_norm(a);
    let squarings = if norm > TAYLOR_RADIUS {
        (norm / TAYLOR_RADIUS).log2().ceil() as u32
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(Error::MatrixExpNonConvergence(format!(
            "norm {norm:e} needs {squarings} squarings (budget {MAX_SQUARINGS})"
        )));
    }
    let scaled = a * Complex64::new(0.5f64.powi(squarings as i32), 0.0);
    let mut result = Array2::<Complex64>::eye(rows);
    let mut term = Array2::<Complex64>::eye(rows);
    let mut converged = false;
    for p in 1..=MAX_TAYLOR_TERMS {
        term = term.dot(&scaled) * Complex64::new(1.0 / p as f64, 0.0);
        result += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-3 * one_norm(&result) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::MatrixExpNonConvergence("Taylor core did not converge".into()));
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    if result.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::MatrixExpNonConvergence("overflow while squaring".into()));
    }
    Ok(result)
}

/// `exp(ξT+ − ξ*T−)` on the truncated space.
pub fn displacement_matrix(params: &CoherentParams, k: BargmannIndex, cutoff: usize) -> Result<Array2<Complex64>> {
    let gens = build_generators(k, cutoff);
    matrix_exp(&gens.displacement_generator(params))
}

/// Column `n` of [`displacement_matrix`]. The reported tail is the weight
/// in the top tenth of the basis, where truncation contaminates the result.
pub fn displacement_oracle(params: &CoherentParams, k: BargmannIndex, n: usize, cutoff: usize) -> Result<FockVector> {
    if n > cutoff {
        return Err(Error::invalid("n", format!("number state {n} exceeds cutoff {cutoff}")));
    }
    let d = displacement_matrix(params, k, cutoff)?;
    Ok(column_vector(&d, k, n))
}

pub fn column_vector(d: &Array2<Complex64>, k: BargmannIndex, n: usize) -> FockVector {
    let coeffs: Vec<Complex64> = d.column(n).to_vec();
    let band = (coeffs.len() / 10).max(1);
    let tail = coeffs[coeffs.len() - band..].iter().map(|c| c.norm_sqr()).sum();
    FockVector::new(k, coeffs, tail)
}

/// `L_n^α(z) = Σ_i (−1)^i Γ(n+α+1) / (Γ(n−i+1) Γ(α+i+1) i!) z^i`, summed
/// directly; only for moderate `n` and `|z|`.
pub fn laguerre_series(n: usize, alpha: f64, z: Complex64) -> Complex64 {
    let top = ln_gamma(n as f64 + alpha + 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let fi = i as f64;
        let c = (top - ln_gamma((n - i) as f64 + 1.0) - ln_gamma(alpha + fi + 1.0) - ln_gamma(fi + 1.0)).exp();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += z.powu(i as u32) * (sign * c);
    }
    acc
}

/// Radial measure on top of `r² dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    One,
    InverseR,
}

impl Weight {
    pub fn factor(self, r: f64) -> f64 {
        match self {
            Weight::One => r * r,
            Weight::InverseR => r,
        }
    }
}

/// Default relative change allowed when the rule is doubled.
pub const QUADRATURE_DOUBLING_TOLERANCE: f64 = 1e-11;

/// `∫ f*(r) g(r) w(r) r² dr` on the half line, returned with the change
/// observed under point doubling.
pub fn quadrature_inner_estimate<F, G>(
    f: F,
    g: G,
    weight: Weight,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let integrand = |r: f64| f(r).conj() * g(r) * weight.factor(r);
    let coarse = rule.integrate_complex(integrand);
    let fine = rule.refined()?.integrate_complex(integrand);
    let change = (fine - coarse).norm();
    if change > tolerance * fine.norm().max(1.0) {
        return Err(Error::QuadratureNonConvergence { change, tolerance });
    }
    Ok((fine, change))
}

pub fn quadrature_inner<F, G>(f: F, g: G, weight: Weight, rule: &QuadratureRule) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    quadrature_inner_estimate(f, g, weight, rule, QUADRATURE_DOUBLING_TOLERANCE).map(|(v, _)| v)
}

/// Real-valued convenience wrapper.
pub fn quadrature_inner_real(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    weight: Weight,
    rule: &QuadratureRule,
) -> Result<f64> {
    quadrature_inner(
        |r| Complex64::new(f(r), 0.0),
        |r| Complex64::new(g(r), 0.0),
        weight,
        rule,
    )
    .map(|z| z.re)
}

/// Gram matrix `∫ f_i f_j w r² dr` of a real basis evaluated in one pass per
/// node, together with the largest entry change under point doubling.
pub fn gram_matrix(
    basis: impl Fn(f64) -> Vec<f64>,
    weight: Weight,
    rule: &QuadratureRule,
) -> Result<(Array2<f64>, f64)> {
    let assemble = |rule: &QuadratureRule| -> Array2<f64> {
        let mut gram: Option<Array2<f64>> = None;
        for (&r, &w) in rule.nodes().iter().zip(rule.weights()) {
            let values = basis(r);
            let dim = values.len();
            let g = gram.get_or_insert_with(|| Array2::zeros((dim, dim)));
            let scale = w * weight.factor(r);
            for i in 0..dim {
                for j in 0..=i {
                    g[(i, j)] += values[i] * values[j] * scale;
                }
            }
        }
        let mut g = gram.unwrap_or_else(|| Array2::zeros((0, 0)));
        let dim = g.nrows();
        for i in 0..dim {
            for j in 0..i {
                g[(j, i)] = g[(i, j)];
            }
        }
        g
    };
    let coarse = assemble(rule);
    let fine = assemble(&rule.refined()?);
    let change = (&fine - &coarse).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if change > QUADRATURE_DOUBLING_TOLERANCE * fine.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
        return Err(Error::QuadratureNonConvergence {
            change,
            tolerance: QUADRATURE_DOUBLING_TOLERANCE,
        });
    }
    Ok((fine, change))
}

/// Largest `|G − I|` entry.
pub fn identity_distance(gram: &Array2<f64>) -> f64 {
    gram.indexed_iter()
        .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}
