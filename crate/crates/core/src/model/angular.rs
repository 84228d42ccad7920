//! Angular solutions
//! `Z = (cos θ/2)^{m1} (sin θ/2)^{m2} P^{(m2,m1)}_{j−m_+}(cos θ) e^{i(m−s)φ}`,
//! normalised numerically on the sphere.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::quantum::QuantumNumbers;
use crate::quadrature::jacobi_rule;
use crate::special::{jacobi, ln_gamma};

/// Extra Gauss–Jacobi points beyond the exactness threshold.
const EXTRA_POINTS: usize = 8;

/// An angular function with its normalisation constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularFunction {
    pub qn: QuantumNumbers,
    /// `∫ |Z_unnormalised|² sin θ dθ dφ`.
    pub raw_norm_sqr: f64,
}

impl AngularFunction {
    /// With `x = cos θ` the norm integral is
    /// `2π 2^{−(m1+m2)} ∫ (1−x)^{m2} (1+x)^{m1} P² dx`, which a Gauss–Jacobi
    /// rule with those exponents integrates exactly.
    pub fn new(qn: QuantumNumbers) -> Result<Self> {
        let degree = qn.jacobi_degree();
        let rule = jacobi_rule(degree + EXTRA_POINTS, qn.m2, qn.m1)?;
        let mut integral = 0.0;
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let p = jacobi(degree, qn.m2, qn.m1, x)?;
            integral += w * p * p;
        }
        let raw_norm_sqr = TAU * (-(qn.m1 + qn.m2) * std::f64::consts::LN_2).exp() * integral;
        if !(raw_norm_sqr > 0.0) || !raw_norm_sqr.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                change: raw_norm_sqr,
                tolerance: 0.0,
            });
        }
        Ok(AngularFunction { qn, raw_norm_sqr })
    }

    /// Closed-form value of [`Self::raw_norm_sqr`] from the Jacobi norm
    /// `h_n = 2^{a+b+1} Γ(n+a+1) Γ(n+b+1) / ((2n+a+b+1) n! Γ(n+a+b+1))`.
    pub fn analytic_norm_sqr(&self) -> f64 {
        let (a, b) = (self.qn.m2, self.qn.m1);
        let n = self.qn.jacobi_degree() as f64;
        let ln_h = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(n + a + 1.0) + ln_gamma(n + b + 1.0)
            - (2.0 * n + a + b + 1.0).ln()
            - ln_gamma(n + 1.0)
            - ln_gamma(n + a + b + 1.0);
        TAU * (ln_h - (a + b) * std::f64::consts::LN_2).exp()
    }

    pub fn unnormalised(&self, theta: f64, phi: f64) -> Result<Complex64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid("theta", format!("must lie in [0, π], got {theta}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        let q = &self.qn;
        let half = 0.5 * theta;
        let envelope = half.cos().powf(q.m1) * half.sin().powf(q.m2);
        let p = jacobi(q.jacobi_degree(), q.m2, q.m1, theta.cos())?;
        let winding = (q.m.value() - q.s.value()) * phi;
        Ok(Complex64::from_polar(envelope * p, winding))
    }

    pub fn value(&self, theta: f64, phi: f64) -> Result<Complex64> {
        Ok(self.unnormalised(theta, phi)? / self.raw_norm_sqr.sqrt())
    }
}

/// Normalised `Z(θ, φ)`.
pub fn angular_function(qn: &QuantumNumbers, theta: f64, phi: f64) -> Result<Complex64> {
    AngularFunction::new(*qn)?.value(theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::interval_rule;

    fn qn(s: &str, c1: f64, c2: f64, m: &str, j: &str) -> QuantumNumbers {
        QuantumNumbers::new(s.parse().unwrap(), c1, c2, m.parse().unwrap(), j.parse().unwrap()).unwrap()
    }

    /// `∫ f* g sin θ dθ dφ` by composite Gauss–Legendre in θ and φ.
    fn sphere_inner(f: &AngularFunction, g: &AngularFunction) -> Complex64 {
        let th = interval_rule(0.0, PI, 16, 20);
        let ph = interval_rule(0.0, TAU, 8, 20);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, wt) in &th {
            for &(p, wp) in &ph {
                acc += f.value(t, p).unwrap().conj() * g.value(t, p).unwrap() * (wt * wp * t.sin());
            }
        }
        acc
    }

    #[test]
    fn y00() {
        let z = angular_function(&qn("0", 0.0, 0.0, "0", "0"), 0.7, 2.0).unwrap();
        assert!((z - Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn y10_shape() {
        let f = AngularFunction::new(qn("0", 0.0, 0.0, "0", "1")).unwrap();
        for theta in [0.3f64, 1.1, 2.5] {
            // |Y10|² = 3 cos²θ / (4π)
            let want = 3.0 * theta.cos().powi(2) / (4.0 * PI);
            assert!((f.value(theta, 0.4).unwrap().norm_sqr() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn deformed_sector_norm_and_orthogonality() {
        let a = AngularFunction::new(qn("1/2", 0.3, 0.1, "1/2", "3/2")).unwrap();
        let b = AngularFunction::new(qn("1/2", 0.3, 0.1, "1/2", "5/2")).unwrap();
        assert!((sphere_inner(&a, &a).re - 1.0).abs() < 1e-9);
        assert!(sphere_inner(&a, &b).norm() < 1e-8);
        assert!((a.raw_norm_sqr - a.analytic_norm_sqr()).abs() < 1e-12 * a.raw_norm_sqr);
    }

    #[test]
    fn rejects_theta_outside_range() {
        let a = AngularFunction::new(qn("0", 0.0, 0.0, "0", "0")).unwrap();
        assert!(a.value(-0.1, 0.0).is_err());
        assert!(a.value(4.0, 0.0).is_err());
    }
}
