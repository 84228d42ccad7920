//! Number coherent states `D(ξ)|k, n⟩` in configuration space, their
//! physical normalisation, and free evolution under `γ T0`.
//!
//! Two measures appear. Group states are normalised under `(1/r) r² dr`;
//! physical states `R̄(r) = c Ψ(γr)` are normalised under `r² dr`. Every
//! function below says which one it uses.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::quantum::QuantumNumbers;
use crate::model::radial::{dilation_length, sturmian_sequence};
use crate::special::{laguerre_complex, ln_gamma};
use crate::su11::{displace_number_state, lowering_element, BargmannIndex, CoherentParams, FockVector};

/// Below this `|ζ|` the closed form is replaced by the Fock expansion.
pub const SMALL_ZETA: f64 = 1e-6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `E(τ) = −1/(2(J+n+1)² cosh²τ)`.
pub fn energy_of_parameter(big_j: f64, n: usize, tau: f64) -> f64 {
    let nt = dilation_length(n, big_j) * tau.cosh();
    -0.5 / (nt * nt)
}

/// A number coherent state and its place on an evolution trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentStateSpec {
    #[serde(rename = "J")]
    pub big_j: f64,
    pub n: usize,
    /// Parameters at `t = 0`.
    pub params: CoherentParams,
    pub time: f64,
    /// `√(−2E)` at `t = 0`, held fixed along the trajectory.
    pub gamma: f64,
}

impl CoherentStateSpec {
    pub fn new(big_j: f64, n: usize, params: CoherentParams) -> Result<Self> {
        if !(big_j >= 0.0) || !big_j.is_finite() {
            return Err(Error::invalid("J", format!("must be finite and >= 0, got {big_j}")));
        }
        let gamma = (-2.0 * energy_of_parameter(big_j, n, params.tau())).sqrt();
        Ok(CoherentStateSpec {
            big_j,
            n,
            params,
            time: 0.0,
            gamma,
        })
    }

    pub fn from_sector(qn: &QuantumNumbers, n: usize, params: CoherentParams) -> Result<Self> {
        Self::new(qn.big_j, n, params)
    }

    pub fn bargmann_index(&self) -> BargmannIndex {
        BargmannIndex::new(self.big_j + 1.0).expect("J >= 0")
    }

    pub fn energy(&self) -> f64 {
        -0.5 * self.gamma * self.gamma
    }

    /// `2π/γ`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.gamma
    }

    /// Parameters at `self.time`: `ζ(−t) = ζ e^{−iγt}`, i.e. `φ → φ + γt`.
    pub fn current_params(&self) -> CoherentParams {
        self.params.rotated(self.gamma * self.time)
    }

    /// Global phase `e^{−iγ(k+n)t}` with `k = J+1`.
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.gamma * (self.big_j + 1.0 + self.n as f64) * self.time)
    }
}

/// Advances the trajectory by `t`.
pub fn evolve(spec: &CoherentStateSpec, t: f64) -> CoherentStateSpec {
    CoherentStateSpec {
        time: spec.time + t,
        ..*spec
    }
}

/// Closed-form `Ψ_J(r, ζ)` for `ζ ≠ 0`:
/// `2(1−|ζ|²)^{J+1} e^{−r} e^{2rζ/(ζ−1)} (1−ζ)^{−2J−2} √(n!/Γ(2J+2+n)) (2r)^J
/// [ζ*(σ−1)]^n L_n^{2J+1}(2rσ/((1−ζ)(σ−1)))`.
pub fn psi_closed_form(r: f64, big_j: f64, n: usize, params: &CoherentParams) -> Result<Complex64> {
    check_r(r)?;
    let zeta = params.zeta();
    let sigma = params.sigma().ok_or(Error::SigmaSingular(zeta.norm()))?;
    let nf = n as f64;
    let one_minus = ONE - zeta;
    let ln_prefactor = Complex64::new(
        std::f64::consts::LN_2 + (big_j + 1.0) * params.eta() - r
            + 0.5 * (ln_gamma(nf + 1.0) - ln_gamma(2.0 * big_j + 2.0 + nf))
            + big_j * (2.0 * r).ln(),
        0.0,
    ) + zeta * (2.0 * r) / (zeta - ONE)
        - one_minus.ln() * (2.0 * big_j + 2.0);
    let sm1 = sigma - ONE;
    let arg = sigma * (2.0 * r) / (one_minus * sm1);
    let lag = laguerre_complex(n, 2.0 * big_j + 1.0, arg)?;
    Ok(ln_prefactor.exp() * (zeta.conj() * sm1).powu(n as u32) * lag)
}

/// The `n = 0` form `2(1−|ζ|²)^{J+1} Γ(2J+2)^{−1/2} e^{−r} (2r)^J e^{2rζ/(ζ−1)} (1−ζ)^{−2J−2}`,
/// also valid at `ζ = 0`.
pub fn psi_standard_coherent(r: f64, big_j: f64, params: &CoherentParams) -> Result<Complex64> {
    check_r(r)?;
    let zeta = params.zeta();
    let ln_abs = std::f64::consts::LN_2 + (big_j + 1.0) * params.eta() - 0.5 * ln_gamma(2.0 * big_j + 2.0) - r
        + big_j * (2.0 * r).ln();
    let z = Complex64::new(ln_abs, 0.0) + zeta * (2.0 * r) / (zeta - ONE) - (ONE - zeta).ln() * (2.0 * big_j + 2.0);
    Ok(z.exp())
}

/// `Σ_m c_m R_{mJ}(r)`.
pub fn psi_fock_synthesis(r: f64, big_j: f64, v: &FockVector) -> Complex64 {
    sturmian_sequence(v.cutoff(), big_j, r)
        .iter()
        .zip(v.coeffs())
        .map(|(rm, c)| c * rm)
        .sum()
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("r", format!("must be finite and positive, got {r}")))
    }
}

/// `Ψ_J(r, ζ)` at `params`, falling back to the Fock expansion near `ζ = 0`.
fn psi_at(r: f64, big_j: f64, n: usize, params: &CoherentParams) -> Result<Complex64> {
    if params.zeta().norm() < SMALL_ZETA {
        check_r(r)?;
        let k = BargmannIndex::new(big_j + 1.0)?;
        let v = displace_number_state(params, k, n, n + 32)?;
        return Ok(psi_fock_synthesis(r, big_j, &v));
    }
    psi_closed_form(r, big_j, n, params)
}

/// Group-measure wavefunction at `t = 0`.
pub fn psi_number_coherent(r: f64, spec: &CoherentStateSpec) -> Result<Complex64> {
    psi_at(r, spec.big_j, spec.n, &spec.params)
}

/// Group-measure wavefunction at `spec.time + t`: the closed form with
/// `ζ → ζ e^{−iγt}` throughout, times `e^{−iγ(J+n+1)t}`.
pub fn psi_evolved(r: f64, spec: &CoherentStateSpec, t: f64) -> Result<Complex64> {
    let s = evolve(spec, t);
    Ok(s.phase() * psi_at(r, s.big_j, s.n, &s.current_params())?)
}

/// `[cosh τ + sinh τ cos(φ + γt)]`.
fn radial_bracket(params: &CoherentParams, gamma: f64, t: f64) -> f64 {
    let tau = params.tau();
    tau.cosh() + tau.sinh() * (params.phi() + gamma * t).cos()
}

/// `𝒩 = √(−2E) / √((J+n+1)[cosh τ + sinh τ cos(φ + γt)])`. With an outer
/// `√(−2E)` the state `𝒩 γ Ψ(γr)` has `r² dr` norm `γ`, so
/// [`psi_physical`] uses `𝒩 γ^{1/2}` instead.
pub fn physical_normalization(big_j: f64, n: usize, params: &CoherentParams, t: f64) -> f64 {
    let gamma = (-2.0 * energy_of_parameter(big_j, n, params.tau())).sqrt();
    let bracket = radial_bracket(params, gamma, t);
    debug_assert!(bracket > 0.0);
    gamma / (dilation_length(n, big_j) * bracket).sqrt()
}

/// Physical state `𝒩 γ^{1/2} Ψ(γr)` at `spec.time`, unit norm under `r² dr`.
pub fn psi_physical(r: f64, spec: &CoherentStateSpec) -> Result<Complex64> {
    let c = physical_normalization(spec.big_j, spec.n, &spec.params, spec.time) * spec.gamma.sqrt();
    Ok(psi_evolved(spec.gamma * r, spec, 0.0)? * c)
}

/// The same with the literal outer factor `𝒩 γ`; its `r² dr` norm is `γ`.
pub fn psi_physical_literal(r: f64, spec: &CoherentStateSpec) -> Result<Complex64> {
    let c = physical_normalization(spec.big_j, spec.n, &spec.params, spec.time) * spec.gamma;
    Ok(psi_evolved(spec.gamma * r, spec, 0.0)? * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialExpectation {
    /// `⟨T0 − T1⟩ = (J+n+1)[cosh τ + sinh τ cos(φ+γt)]`, group units.
    pub group: f64,
    /// `group / γ`, the length scale after the tilting dilation
    /// (`1/⟨1/r⟩` of the physical state).
    pub dilated: f64,
}

pub fn expectation_r(spec: &CoherentStateSpec) -> RadialExpectation {
    let group = dilation_length(spec.n, spec.big_j) * radial_bracket(&spec.params, spec.gamma, spec.time);
    RadialExpectation {
        group,
        dilated: group / spec.gamma,
    }
}

/// `⟨v|T0 − T1|v⟩` from the ladder matrix elements, without forming matrices.
pub fn fock_expectation_r(v: &FockVector) -> f64 {
    let kv = v.k().get();
    let c = v.coeffs();
    let mut diag = 0.0;
    let mut off = Complex64::new(0.0, 0.0);
    for (m, cm) in c.iter().enumerate() {
        diag += cm.norm_sqr() * (m as f64 + kv);
        if m + 1 < c.len() {
            // ⟨m|T−|m+1⟩ = ⟨m+1|T+|m⟩
            off += cm.conj() * c[m + 1] * lowering_element(kv, m + 1);
        }
    }
    // T1 = (T+ + T−)/2, so ⟨T1⟩ = Re Σ c_m* c_{m+1} ⟨m|T−|m+1⟩
    diag - off.re
}

/// Fock-space cutoff large enough for `τ`: 300 up to `τ = 1`, 600 up to 2,
/// then growing with the decay length of `|ζ|^m`.
pub fn default_cutoff(tau: f64) -> usize {
    if tau <= 1.0 {
        300
    } else if tau <= 2.0 {
        600
    } else {
        let zeta = (0.5 * tau).tanh();
        (600.0 * (0.761_594_155_955_764_9f64).ln() / zeta.ln()).ceil() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::radial::sturmian_radial;
    use crate::oracle::{quadrature_inner, Weight};
    use crate::quadrature::half_line_rule;

    fn spec(j: f64, n: usize, tau: f64, phi: f64) -> CoherentStateSpec {
        CoherentStateSpec::new(j, n, CoherentParams::new(tau, phi).unwrap()).unwrap()
    }

    #[test]
    fn energy_of_parameter_values() {
        assert_eq!(energy_of_parameter(1.3, 2, 0.0), crate::model::quantum::energy(2, 1.3));
        assert!((energy_of_parameter(0.0, 0, 1.0) + 0.209_987_170_807_013_03).abs() < 1e-15);
    }

    #[test]
    fn closed_form_reduces_to_sturmian_near_zero() {
        let s = spec(0.7, 3, 1e-14, 0.4);
        for r in [0.3, 2.0, 7.5] {
            let z = psi_number_coherent(r, &s).unwrap();
            assert!((z.re - sturmian_radial(3, 0.7, r)).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        // both sides of the switch agree
        let p = CoherentParams::new(4.000_001e-6, 0.4).unwrap();
        let v = displace_number_state(&p, BargmannIndex::new(1.7).unwrap(), 3, 40).unwrap();
        for r in [0.3, 2.0, 7.5] {
            let d = psi_closed_form(r, 0.7, 3, &p).unwrap() - psi_fock_synthesis(r, 0.7, &v);
            assert!(d.norm() < 1e-12, "{d}");
        }
    }

    #[test]
    fn singular_sigma_reported() {
        let p = CoherentParams::new(0.0, 0.0).unwrap();
        assert!(matches!(psi_closed_form(1.0, 0.0, 1, &p), Err(Error::SigmaSingular(_))));
        assert!(psi_closed_form(-1.0, 0.0, 1, &CoherentParams::new(0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn ground_state_matches_standard_form() {
        let p = CoherentParams::new(0.9, 1.7).unwrap();
        for r in [0.1, 1.0, 5.0, 20.0] {
            let a = psi_closed_form(r, 1.4, 0, &p).unwrap();
            let b = psi_standard_coherent(r, 1.4, &p).unwrap();
            assert!((a - b).norm() <= 1e-13 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn closed_form_matches_fock_synthesis() {
        let s = spec(0.5, 2, 0.7, 0.9);
        let v = displace_number_state(&s.params, s.bargmann_index(), 2, 400).unwrap();
        for i in 0..60 {
            let r = 0.1 + 39.9 * i as f64 / 59.0;
            let d = psi_number_coherent(r, &s).unwrap() - psi_fock_synthesis(r, 0.5, &v);
            assert!(d.norm() < 1e-8, "r = {r}: {d}");
        }
    }

    #[test]
    fn evolution_phase_and_period() {
        let s = spec(1.0, 1, 0.5, 0.3);
        assert_eq!(evolve(&s, 0.0), s);
        let v0 = displace_number_state(&s.params, s.bargmann_index(), 1, 300).unwrap();
        let t = 0.37 * s.period();
        let vt = v0.evolve_diagonal(s.gamma, t);
        for r in [0.5, 3.0, 9.0] {
            let a = psi_evolved(r, &s, t).unwrap();
            assert!((a - psi_fock_synthesis(r, 1.0, &vt)).norm() < 1e-10);
        }
        let back = evolve(&s, s.period());
        assert!((psi_evolved(2.0, &back, 0.0).unwrap() - psi_number_coherent(2.0, &s).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn expectation_r_matches_fock_form() {
        let s = spec(0.0, 0, 0.5, 0.0);
        let bracket = 0.5f64.cosh() + 0.5f64.sinh();
        assert!((expectation_r(&s).group - bracket).abs() < 1e-15);
        let s = spec(1.3, 2, 0.9, 2.0);
        let v = displace_number_state(&s.params, s.bargmann_index(), 2, 300).unwrap();
        assert!((fock_expectation_r(&v) - expectation_r(&s).group).abs() < 1e-10);
        let rule = half_line_rule(400, 4.0).unwrap();
        let f = |r| psi_number_coherent(r, &s).unwrap();
        let quad = quadrature_inner(f, |r| f(r) * r, Weight::InverseR, &rule).unwrap();
        assert!((quad.re - expectation_r(&s).group).abs() < 1e-8);
    }

    #[test]
    fn physical_state_has_unit_norm() {
        let mut s = spec(1.0, 1, 0.5, 0.0);
        let rule = half_line_rule(400, 4.0 / s.gamma).unwrap();
        for t in [0.0, 0.3 * s.period()] {
            s = evolve(&s, t);
            let f = |r| psi_physical(r, &s).unwrap();
            let norm = quadrature_inner(f, f, Weight::One, &rule).unwrap().re;
            assert!((norm - 1.0).abs() < 1e-8, "{norm}");
            let g = |r| psi_physical_literal(r, &s).unwrap();
            let literal = quadrature_inner(g, g, Weight::One, &rule).unwrap().re;
            assert!((literal - s.gamma).abs() < 1e-8);
        }
    }

    #[test]
    fn physical_state_reduces_to_physical_radial() {
        let s = spec(1.3, 2, 0.0, 0.0);
        for r in [0.5, 4.0, 12.0] {
            let z = psi_physical(r, &s).unwrap();
            assert!((z.re - crate::model::radial::physical_radial(2, 1.3, r)).abs() < 1e-13);
        }
    }

    #[test]
    fn cutoff_defaults() {
        assert_eq!(default_cutoff(0.8), 300);
        assert_eq!(default_cutoff(1.5), 600);
        assert!(default_cutoff(3.0) > 600);
    }
}
