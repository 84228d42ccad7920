//! The positive discrete series of su(1,1) on a truncated number basis.
//!
//! Basis states `|k, n⟩`, `0 ≤ n ≤ cutoff`, with
//! `T0|k,n⟩ = (n+k)|k,n⟩`, `T+|k,n⟩ = √((n+1)(n+2k)) |k,n+1⟩` and
//! `T−|k,n⟩ = √(n(n+2k−1)) |k,n−1⟩`. Truncation breaks the algebra only
//! in the last rows; every identity check here is restricted to
//! [`Generators::interior_rows`].

use std::f64::consts::{LN_2, PI, TAU};

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::IBig;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::ln_gamma;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bargmann index `k` of the positive discrete series, `k > 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct BargmannIndex(f64);

impl BargmannIndex {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.5 && k.is_finite() {
            Ok(BargmannIndex(k))
        } else {
            Err(Error::invalid("k", format!("Bargmann index must exceed 1/2, got {k}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    T0,
    TPlus,
    TMinus,
}

/// Matrices of `T0`, `T+`, `T−` on `{|k,n⟩ : n ≤ cutoff}`.
#[derive(Debug, Clone)]
pub struct Generators {
    k: BargmannIndex,
    cutoff: usize,
    pub t0: Array2<Complex64>,
    pub t_plus: Array2<Complex64>,
    pub t_minus: Array2<Complex64>,
}

pub fn raising_element(k: f64, n: usize) -> f64 {
    let n = n as f64;
    ((n + 1.0) * (n + 2.0 * k)).sqrt()
}

pub fn lowering_element(k: f64, n: usize) -> f64 {
    let n = n as f64;
    (n * (n + 2.0 * k - 1.0)).sqrt()
}

pub fn build_generators(k: BargmannIndex, cutoff: usize) -> Generators {
    let dim = cutoff + 1;
    let kv = k.get();
    let t0 = Array2::from_shape_fn((dim, dim), |(i, j)| {
        if i == j {
            Complex64::new(i as f64 + kv, 0.0)
        } else {
            ZERO
        }
    });
    let mut t_plus = Array2::zeros((dim, dim));
    let mut t_minus = Array2::zeros((dim, dim));
    for n in 0..cutoff {
        t_plus[(n + 1, n)] = Complex64::new(raising_element(kv, n), 0.0);
        t_minus[(n, n + 1)] = Complex64::new(lowering_element(kv, n + 1), 0.0);
    }
    Generators {
        k,
        cutoff,
        t0,
        t_plus,
        t_minus,
    }
}

impl Generators {
    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// Rows `0..interior_rows()` are unaffected by the truncation boundary.
    pub fn interior_rows(&self) -> usize {
        self.cutoff.saturating_sub(1)
    }

    pub fn t1(&self) -> Array2<Complex64> {
        (&self.t_plus + &self.t_minus) * 0.5
    }

    pub fn t2(&self) -> Array2<Complex64> {
        (&self.t_plus - &self.t_minus) * Complex64::new(0.0, -0.5)
    }

    pub fn matrix(&self, which: Generator) -> &Array2<Complex64> {
        match which {
            Generator::T0 => &self.t0,
            Generator::TPlus => &self.t_plus,
            Generator::TMinus => &self.t_minus,
        }
    }

    /// `T0² − (T+T− + T−T+)/2`.
    pub fn casimir_matrix(&self) -> Array2<Complex64> {
        let sym = self.t_plus.dot(&self.t_minus) + self.t_minus.dot(&self.t_plus);
        self.t0.dot(&self.t0) - sym * 0.5
    }

    /// `ξT+ − ξ*T−`, the anti-Hermitian generator of `D(ξ)`.
    pub fn displacement_generator(&self, params: &CoherentParams) -> Array2<Complex64> {
        let xi = params.xi();
        &self.t_plus * xi - &self.t_minus * xi.conj()
    }
}

pub fn commutator(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    a.dot(b) - b.dot(a)
}

/// Largest entrywise `|a − b|` over rows `0..rows` (all columns).
pub fn max_row_deviation(a: &Array2<Complex64>, b: &Array2<Complex64>, rows: usize) -> f64 {
    a.rows()
        .into_iter()
        .zip(b.rows())
        .take(rows)
        .flat_map(|(ra, rb)| ra.into_iter().zip(rb).map(|(x, y)| (x - y).norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Deviation of a matrix identity on the interior rows: `absolute` is the
/// largest entrywise error, `scaled` divides each entry's error by the size
/// of the products that cancel in it (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityDeviation {
    pub absolute: f64,
    pub scaled: f64,
}

fn abs_matrix(a: &Array2<Complex64>) -> Array2<f64> {
    a.mapv(|z| z.norm())
}

fn identity_deviation(
    value: &Array2<Complex64>,
    want: &Array2<Complex64>,
    scale: &Array2<f64>,
    rows: usize,
) -> IdentityDeviation {
    let mut out = IdentityDeviation {
        absolute: 0.0,
        scaled: 0.0,
    };
    for ((i, j), v) in value.indexed_iter() {
        if i >= rows {
            continue;
        }
        let err = (v - want[(i, j)]).norm();
        out.absolute = out.absolute.max(err);
        out.scaled = out.scaled.max(err / scale[(i, j)].max(1.0));
    }
    out
}

/// `[a, b] − want` on rows `0..rows`.
pub fn commutator_deviation(
    a: &Array2<Complex64>,
    b: &Array2<Complex64>,
    want: &Array2<Complex64>,
    rows: usize,
) -> IdentityDeviation {
    let (aa, ab) = (abs_matrix(a), abs_matrix(b));
    let scale = aa.dot(&ab) + ab.dot(&aa);
    identity_deviation(&commutator(a, b), want, &scale, rows)
}

/// Casimir matrix against `k(k−1)·I` on the interior rows.
pub fn casimir_deviation(gens: &Generators) -> IdentityDeviation {
    let (a0, ap, am) = (
        abs_matrix(&gens.t0),
        abs_matrix(&gens.t_plus),
        abs_matrix(&gens.t_minus),
    );
    let scale = a0.dot(&a0) + (ap.dot(&am) + am.dot(&ap)) * 0.5;
    let want = Array2::<Complex64>::eye(gens.dim()) * casimir_value(gens.k);
    identity_deviation(&gens.casimir_matrix(), &want, &scale, gens.interior_rows())
}

/// Frobenius norm of `a − b` over the leading `block × block` corner.
pub fn block_frobenius_diff(a: &Array2<Complex64>, b: &Array2<Complex64>, block: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..block {
        for j in 0..block {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `k(k−1)`.
pub fn casimir_value(k: BargmannIndex) -> f64 {
    let k = k.get();
    k * (k - 1.0)
}

/// Displacement parameters. `(τ, φ)` are canonical; everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentParams {
    tau: f64,
    phi: f64,
}

impl CoherentParams {
    /// `phi` is reduced into `[0, 2π)`.
    pub fn new(tau: f64, phi: f64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::invalid("tau", format!("must be finite and >= 0, got {tau}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        Ok(CoherentParams {
            tau,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `ξ/|ξ| = −e^{−iφ}`; well defined even at `τ = 0`.
    pub fn unit_phase(&self) -> Complex64 {
        -Complex64::from_polar(1.0, -self.phi)
    }

    /// `ξ = −(τ/2) e^{−iφ}`.
    pub fn xi(&self) -> Complex64 {
        self.unit_phase() * (0.5 * self.tau)
    }

    /// `ζ = −tanh(τ/2) e^{−iφ}`.
    pub fn zeta(&self) -> Complex64 {
        self.unit_phase() * (0.5 * self.tau).tanh()
    }

    /// `η = ln(1 − |ζ|²) = −2 ln cosh|ξ|`.
    pub fn eta(&self) -> f64 {
        -2.0 * (0.5 * self.tau).cosh().ln()
    }

    /// `σ = (1 − |ζ|²) / (ζ*(1 − ζ))`, undefined at `ζ = 0`.
    pub fn sigma(&self) -> Option<Complex64> {
        let zeta = self.zeta();
        if zeta.norm() == 0.0 {
            return None;
        }
        Some((1.0 - zeta.norm_sqr()) / (zeta.conj() * (ONE - zeta)))
    }

    /// The same displacement with `φ` advanced by `dphi`.
    pub fn rotated(&self, dphi: f64) -> Self {
        CoherentParams {
            tau: self.tau,
            phi: (self.phi + dphi).rem_euclid(TAU),
        }
    }
}

/// `(ζ, η)` with `D(ξ) = exp(ζT+) exp(ηT0) exp(−ζ*T−)`.
pub fn normal_form(params: &CoherentParams) -> (Complex64, f64) {
    (params.zeta(), params.eta())
}

fn exp_raising(coef: Complex64, gens: &Generators) -> Array2<Complex64> {
    // T+ is nilpotent on the truncated space, so the series terminates.
    let dim = gens.dim();
    let kv = gens.k.get();
    let mut total = Array2::<Complex64>::eye(dim);
    let mut term = Array2::<Complex64>::eye(dim);
    for p in 1..dim {
        let mut next = Array2::<Complex64>::zeros((dim, dim));
        for m in 1..dim {
            let factor = coef * (raising_element(kv, m - 1) / p as f64);
            let (src, mut dst) = (term.row(m - 1), next.row_mut(m));
            dst.zip_mut_with(&src, |d, s| *d = s * factor);
        }
        term = next;
        total += &term;
        if term.iter().all(|z| *z == ZERO) {
            break;
        }
    }
    total
}

/// The ordered product `exp(ζT+) exp(ηT0) exp(−ζ*T−)` as a matrix on the
/// truncated space. Each factor is triangular, so every entry of the
/// product is the exact matrix element of `D(ξ)`; large indices suffer
/// cancellation between factors, see [`normal_form_reliable_block`].
pub fn normal_form_operator(params: &CoherentParams, gens: &Generators) -> Array2<Complex64> {
    let (zeta, eta) = normal_form(params);
    let kv = gens.k.get();
    let upper = exp_raising(zeta, gens);
    let lower = exp_raising(-zeta, gens).t().mapv(|z| z.conj());
    let diag = Array1::from_iter((0..gens.dim()).map(|n| (eta * (n as f64 + kv)).exp()));
    let mut scaled = lower;
    for (mut row, d) in scaled.rows_mut().into_iter().zip(diag.iter()) {
        row *= Complex64::new(*d, 0.0);
    }
    upper.dot(&scaled)
}

/// Largest block size `b` such that the absolute-value product
/// `|exp(ζT+)|·exp(ηT0)·|exp(−ζ*T−)|` stays below `1/(ε·budget)` on the
/// `b × b` corner, i.e. rounding in [`normal_form_operator`] cannot exceed
/// `budget` there.
pub fn normal_form_reliable_block(params: &CoherentParams, gens: &Generators, budget: f64) -> usize {
    let kv = gens.k.get();
    let dim = gens.dim();
    let zeta_abs = params.zeta().norm();
    let eta = params.eta();
    if zeta_abs == 0.0 {
        return dim;
    }
    let limit = (budget / f64::EPSILON).ln();
    // ln |exp(ζT+)|_{m,l}, m ≥ l
    let ln_raise = |m: usize, l: usize| {
        let d = (m - l) as f64;
        d * zeta_abs.ln() - ln_gamma(d + 1.0)
            + 0.5
                * (ln_gamma(m as f64 + 1.0) + ln_gamma(m as f64 + 2.0 * kv)
                    - ln_gamma(l as f64 + 1.0)
                    - ln_gamma(l as f64 + 2.0 * kv))
    };
    for b in 1..=dim {
        let m = b - 1;
        // the diagonal entry (m, m) dominates the corner; sum in log space
        let terms: Vec<f64> = (0..=m).map(|l| 2.0 * ln_raise(m, l) + eta * (l as f64 + kv)).collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ln_sum = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
        if ln_sum > limit {
            return m;
        }
    }
    dim
}

type WideFloat = FBig<HalfEven, 2>;

fn wide(v: f64) -> WideFloat {
    WideFloat::try_from(v).expect("finite")
}

/// Leading `block × block` corner of the same ordered product, with each
/// entry summed in binary floating point wide enough to absorb its
/// cancellation.
///
/// Entry `(m, n)` of `exp(ζT+) exp(ηT0) exp(−ζ*T−)` is
/// `ζ^m (−ζ*)^n e^{ηk} √(Γ(m+2k)Γ(n+2k)/(m! n!)) / Γ(2k) · Σ_l s_l` with
/// `s_0 = 1` and `s_{l+1} = −x s_l (m−l)(n−l) / ((l+1)(l+2k))`,
/// `x = e^η/|ζ|² = 1/sinh²(τ/2)`. The alternating sum is so sensitive to
/// `x` that `x` itself is formed from `τ` at the working precision; the
/// precision is chosen per entry so that rounding stays below `1e−20`.
pub fn normal_form_block(params: &CoherentParams, k: BargmannIndex, block: usize) -> Array2<Complex64> {
    let zeta = params.zeta();
    if zeta.norm() == 0.0 {
        return Array2::eye(block);
    }
    let kv = k.get();
    let two_k = 2.0 * kv;
    let x = 1.0 / (0.5 * params.tau()).sinh().powi(2);
    let (ln_x, ln_zeta) = (x.ln(), zeta.norm().ln());
    let (arg_plus, arg_minus) = (zeta.arg(), PI - zeta.arg());
    let ln_target = (1e-20f64).ln();

    // pass 1: prefactor, largest term and required bits per entry
    struct Plan {
        ln_pref: f64,
        shift: i32,
        bits: usize,
    }
    let mut plans = Vec::with_capacity(block * block);
    for m in 0..block {
        for n in 0..block {
            let top = m.min(n);
            let ln_pref = (m + n) as f64 * ln_zeta + params.eta() * kv - ln_gamma(two_k)
                + 0.5
                    * (ln_gamma(m as f64 + two_k) + ln_gamma(n as f64 + two_k)
                        - ln_gamma(m as f64 + 1.0)
                        - ln_gamma(n as f64 + 1.0));
            let (mut ln_s, mut ln_max) = (0.0, 0.0f64);
            for l in 0..top {
                let lf = l as f64;
                ln_s += ln_x + ((m - l) as f64).ln() + ((n - l) as f64).ln() - (lf + 1.0).ln() - (lf + two_k).ln();
                ln_max = ln_max.max(ln_s);
            }
            let spread = ln_pref + ln_max + 2.0 * ((top + 1) as f64).ln() - ln_target;
            let bits = if spread <= 0.0 {
                0
            } else {
                64 + (spread / LN_2).ceil() as usize
            };
            plans.push(Plan {
                ln_pref,
                // s_l · 2^{−shift} stays within f64 range
                shift: (ln_max / LN_2).floor() as i32,
                bits,
            });
        }
    }

    // q_l = x / ((l+1)(l+2k)) at the largest precision any entry needs
    let max_bits = plans.iter().map(|p| p.bits).max().unwrap_or(0).max(64) + 16;
    let wctx = Context::<HalfEven>::new(max_bits);
    let half_tau = wctx.div(wide(params.tau()).repr(), wide(2.0).repr()).value();
    let e_plus = half_tau.clone().with_precision(max_bits).value().exp();
    let e_minus = wctx.div(WideFloat::ONE.repr(), e_plus.repr()).value();
    let sinh = wctx
        .div(wctx.sub(e_plus.repr(), e_minus.repr()).value().repr(), wide(2.0).repr())
        .value();
    let wide_x = wctx
        .div(WideFloat::ONE.repr(), wctx.mul(sinh.repr(), sinh.repr()).value().repr())
        .value();
    let q: Vec<WideFloat> = (0..block)
        .map(|l| {
            // l + 2k rounded in f64 would already spoil the sum
            let shifted = wctx.add(wide(l as f64).repr(), wide(two_k).repr()).value();
            let den = wctx.mul(wide((l + 1) as f64).repr(), shifted.repr()).value();
            wctx.div(wide_x.repr(), den.repr()).value()
        })
        .collect();

    let mut out = Array2::<Complex64>::zeros((block, block));
    for m in 0..block {
        for n in 0..block {
            let plan = &plans[m * block + n];
            let top = m.min(n);
            let sum = if plan.bits <= 53 {
                let mut s = 2f64.powi(-plan.shift);
                let mut acc = s;
                for l in 0..top {
                    let lf = l as f64;
                    s *= -x * ((m - l) * (n - l)) as f64 / ((lf + 1.0) * (lf + two_k));
                    acc += s;
                }
                acc
            } else {
                let ctx = Context::<HalfEven>::new(plan.bits);
                let mut s = WideFloat::from_parts(IBig::ONE, -plan.shift as isize);
                let mut acc = s.clone();
                for (l, ql) in q.iter().enumerate().take(top) {
                    let ratio = ctx.mul(ql.repr(), wide(((m - l) * (n - l)) as f64).repr()).value();
                    s = -ctx.mul(s.repr(), ratio.repr()).value();
                    acc = ctx.add(acc.repr(), s.repr()).value();
                }
                acc.to_f64().value()
            };
            let magnitude = (plan.ln_pref + plan.shift as f64 * LN_2).exp() * sum;
            out[(m, n)] = Complex64::from_polar(magnitude, m as f64 * arg_plus + n as f64 * arg_minus);
        }
    }
    out
}

/// Coefficient vector over `|k, 0⟩ … |k, cutoff⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockVector {
    k: BargmannIndex,
    #[serde(skip)]
    coeffs: Vec<Complex64>,
    /// Estimated norm² lost to truncation.
    tail: f64,
}

impl FockVector {
    pub fn new(k: BargmannIndex, coeffs: Vec<Complex64>, tail: f64) -> Self {
        FockVector { k, coeffs, tail }
    }

    pub fn unit(k: BargmannIndex, n: usize, cutoff: usize) -> Self {
        let mut coeffs = vec![ZERO; cutoff + 1];
        coeffs[n] = ONE;
        FockVector { k, coeffs, tail: 0.0 }
    }

    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(ZERO);
                let b = other.coeffs.get(i).copied().unwrap_or(ZERO);
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `⟨v|A|v⟩` for a matrix on the same truncated space.
    pub fn quadratic_form(&self, a: &Array2<Complex64>) -> Complex64 {
        let v = Array1::from(self.coeffs.clone());
        let av = a.dot(&v);
        v.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    /// Applies `exp(−i γ t T0)`.
    pub fn evolve_diagonal(&self, gamma: f64, t: f64) -> FockVector {
        let kv = self.k.get();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * Complex64::from_polar(1.0, -gamma * t * (m as f64 + kv)))
            .collect();
        FockVector {
            k: self.k,
            coeffs,
            tail: self.tail,
        }
    }
}

/// Truncation controls for the number-coherent-state expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplaceOptions {
    /// Relative size below which an outer-sum term counts as negligible.
    pub term_tolerance: f64,
    /// Consecutive negligible terms required to stop.
    pub consecutive: usize,
    /// Largest acceptable norm deficit when the cutoff is reached first.
    pub tail_tolerance: f64,
    /// Largest acceptable rounding error per coefficient, estimated from the
    /// largest single term (the double sum alternates for large `n`).
    pub rounding_tolerance: f64,
}

impl Default for DisplaceOptions {
    fn default() -> Self {
        DisplaceOptions {
            term_tolerance: 1e-16,
            consecutive: 5,
            tail_tolerance: 1e-12,
            rounding_tolerance: 1e-11,
        }
    }
}

pub fn displace_number_state(params: &CoherentParams, k: BargmannIndex, n: usize, cutoff: usize) -> Result<FockVector> {
    displace_number_state_with(params, k, n, cutoff, &DisplaceOptions::default())
}

/// `D(ξ)|k, n⟩` expanded over the number basis from the normal-ordered
/// double sum (outer index `s` from `exp(ζT+)`, inner `j ≤ n` from
/// `exp(−ζ*T−)`); factorial ratios are combined in log space.
pub fn displace_number_state_with(
    params: &CoherentParams,
    k: BargmannIndex,
    n: usize,
    cutoff: usize,
    opts: &DisplaceOptions,
) -> Result<FockVector> {
    if n > cutoff {
        return Err(Error::invalid("n", format!("number state {n} exceeds cutoff {cutoff}")));
    }
    let zeta = params.zeta();
    let zeta_abs = zeta.norm();
    if zeta_abs == 0.0 {
        return Ok(FockVector::unit(k, n, cutoff));
    }
    let kv = k.get();
    let two_k = 2.0 * kv;
    let nf = n as f64;
    let eta = params.eta();
    let ln_zeta = zeta_abs.ln();
    let arg_plus = zeta.arg();
    let arg_minus = PI - arg_plus;

    // j-dependent part of every term
    let inner: Vec<(f64, f64)> = (0..=n)
        .map(|j| {
            let jf = j as f64;
            let ln_mag = jf * ln_zeta + eta * (kv + nf - jf) + 0.5 * ln_gamma(two_k + nf) - ln_gamma(two_k + nf - jf)
                + 0.5 * ln_gamma(nf + 1.0)
                - ln_gamma(nf - jf + 1.0)
                - ln_gamma(jf + 1.0);
            (ln_mag, jf * arg_minus)
        })
        .collect();

    let mut coeffs = vec![ZERO; cutoff + 1];
    let mut norm_sqr = 0.0;
    let mut quiet = 0;
    let mut converged = false;
    let mut biggest: f64 = 0.0;
    for s in 0..=cutoff {
        let sf = s as f64;
        let mut largest: f64 = 0.0;
        for (j, &(ln_inner, phase_inner)) in inner.iter().enumerate() {
            if n + s - j > cutoff {
                continue;
            }
            let m = (n + s - j) as f64;
            let ln_mag = ln_inner + sf * ln_zeta - ln_gamma(sf + 1.0) + 0.5 * (ln_gamma(two_k + m) + ln_gamma(m + 1.0));
            let term = Complex64::from_polar(ln_mag.exp(), phase_inner + sf * arg_plus);
            largest = largest.max(term.norm());
            coeffs[n + s - j] += term;
        }
        biggest = biggest.max(largest);
        // running norm is refreshed once per outer term
        norm_sqr = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if largest < opts.term_tolerance * norm_sqr.sqrt() {
            quiet += 1;
            if quiet >= opts.consecutive {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let estimated = biggest * f64::EPSILON * (n + 1) as f64;
    if estimated > opts.rounding_tolerance {
        return Err(Error::PrecisionLoss {
            estimated,
            tolerance: opts.rounding_tolerance,
        });
    }
    let tail = (1.0 - norm_sqr).max(0.0);
    if !converged && tail > opts.tail_tolerance {
        return Err(Error::TruncationTail {
            achieved: tail,
            tolerance: opts.tail_tolerance,
            cutoff,
        });
    }
    Ok(FockVector { k, coeffs, tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorExpectations {
    pub t0: f64,
    pub t_plus: Complex64,
    pub t_minus: Complex64,
}

/// `⟨T0⟩ = cosh(2|ξ|)(k+n)`, `⟨T±⟩ = −e^{±iφ} sinh(2|ξ|)(k+n)`.
pub fn expectation_generators(params: &CoherentParams, k: BargmannIndex, n: usize) -> GeneratorExpectations {
    let weight = k.get() + n as f64;
    let tau = params.tau();
    let sh = tau.sinh() * weight;
    GeneratorExpectations {
        t0: tau.cosh() * weight,
        t_plus: -Complex64::from_polar(sh, params.phi()),
        t_minus: -Complex64::from_polar(sh, -params.phi()),
    }
}

/// `D†(ξ) T D(ξ) = c0·T0 + c_plus·T+ + c_minus·T−`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expansion {
    pub c0: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl Expansion {
    pub fn assemble(&self, gens: &Generators) -> Array2<Complex64> {
        &gens.t0 * self.c0 + &gens.t_plus * self.c_plus + &gens.t_minus * self.c_minus
    }
}

pub fn similarity_transform(params: &CoherentParams, which: Generator) -> Expansion {
    let tau = params.tau();
    let alpha = tau.sinh();
    let beta = 0.5 * (tau.cosh() - 1.0);
    let u = params.unit_phase();
    let uc = u.conj();
    match which {
        Generator::T0 => Expansion {
            c0: Complex64::new(2.0 * beta + 1.0, 0.0),
            c_plus: u * (0.5 * alpha),
            c_minus: uc * (0.5 * alpha),
        },
        Generator::TPlus => Expansion {
            c0: uc * alpha,
            c_plus: Complex64::new(beta + 1.0, 0.0),
            c_minus: uc * uc * beta,
        },
        Generator::TMinus => Expansion {
            c0: u * alpha,
            c_plus: u * u * beta,
            c_minus: Complex64::new(beta + 1.0, 0.0),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: f64) -> BargmannIndex {
        BargmannIndex::new(v).unwrap()
    }

    #[test]
    fn rejects_small_bargmann_index() {
        assert!(BargmannIndex::new(0.5).is_err());
        assert!(BargmannIndex::new(0.2).is_err());
        assert!(BargmannIndex::new(0.500001).is_ok());
    }

    #[test]
    fn generator_entries() {
        let g = build_generators(k(1.0), 4);
        assert_eq!(g.t0[(0, 0)].re, 1.0);
        assert!((g.t_plus[(1, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        // T+ is the adjoint of T− on the truncated space
        let adj = g.t_minus.t().mapv(|z| z.conj());
        assert_eq!(adj, g.t_plus);
    }

    #[test]
    fn commutators_on_interior_rows() {
        let g = build_generators(k(1.5), 50);
        let rows = g.interior_rows();
        let two_t0 = &g.t0 * 2.0;
        assert!(max_row_deviation(&commutator(&g.t_minus, &g.t_plus), &two_t0, rows) < 1e-12);
        assert!(max_row_deviation(&commutator(&g.t0, &g.t_plus), &g.t_plus, rows) < 1e-12);
        assert!(max_row_deviation(&commutator(&g.t0, &g.t_minus), &(-&g.t_minus), rows) < 1e-12);
        // the boundary row is where truncation shows up
        let full = max_row_deviation(&commutator(&g.t_minus, &g.t_plus), &two_t0, g.dim());
        assert!(full > 1.0);
    }

    #[test]
    fn scaled_deviation_at_large_cutoff() {
        let g = build_generators(k(2.37), 200);
        let dev = commutator_deviation(&g.t_minus, &g.t_plus, &(&g.t0 * 2.0), g.interior_rows());
        // raw rounding grows with the entries; relative to the cancelled products it does not
        assert!(dev.absolute > 1e-12 && dev.absolute < 1e-10, "{dev:?}");
        assert!(dev.scaled < 1e-14, "{dev:?}");
        assert!(casimir_deviation(&g).scaled < 1e-14);
        let wrong = commutator_deviation(&g.t_minus, &g.t_plus, &g.t0, g.interior_rows());
        assert!(wrong.scaled > 1e-3);
    }

    #[test]
    fn casimir_values() {
        assert_eq!(casimir_value(k(1.0)), 0.0);
        assert_eq!(casimir_value(k(3.0)), 6.0);
        let g = build_generators(k(2.5), 40);
        let want = Array2::<Complex64>::eye(g.dim()) * 3.75;
        assert!(max_row_deviation(&g.casimir_matrix(), &want, g.interior_rows()) < 1e-12);
    }

    #[test]
    fn normal_form_values() {
        let p = CoherentParams::new(0.0, 1.0).unwrap();
        assert_eq!(normal_form(&p), (ZERO, 0.0));
        let p = CoherentParams::new(1.0, 0.0).unwrap();
        let (zeta, eta) = normal_form(&p);
        assert!((zeta - Complex64::new(-0.462_117_157_260_009_76, 0.0)).norm() < 1e-15);
        assert!((eta - (-0.240_229_013_916_555_05)).abs() < 1e-15);
        assert!((eta - (1.0 - zeta.norm_sqr()).ln()).abs() < 1e-15);
    }

    #[test]
    fn normal_form_block_deep_entry() {
        // 2F1(−m,−n;2k;−x) in 60-digit arithmetic; the f64 sum loses every digit here
        let p = CoherentParams::new(0.8, 1.1).unwrap();
        let b = normal_form_block(&p, k(2.37), 98);
        let want = Complex64::new(-0.025_551_796_888_045_837, -0.003_850_170_983_377_434_7);
        assert!((b[(97, 80)] - want).norm() < 1e-14, "{}", b[(97, 80)]);
    }

    #[test]
    fn normal_form_block_agrees_with_triangular_product() {
        let p = CoherentParams::new(0.5, 2.0).unwrap();
        let g = build_generators(k(1.3), 40);
        let full = normal_form_operator(&p, &g);
        let block = normal_form_block(&p, k(1.3), 12);
        assert!(block_frobenius_diff(&block, &full, 12) < 1e-13);
        assert_eq!(
            normal_form_block(&CoherentParams::new(0.0, 1.0).unwrap(), k(2.0), 3),
            Array2::eye(3)
        );
    }

    #[test]
    fn params_reduce_phase() {
        let p = CoherentParams::new(0.3, -1.0).unwrap();
        assert!((p.phi() - (TAU - 1.0)).abs() < 1e-15);
        assert!(CoherentParams::new(-0.1, 0.0).is_err());
        assert!(CoherentParams::new(0.1, f64::NAN).is_err());
        assert!(CoherentParams::new(0.0, 0.0).unwrap().sigma().is_none());
    }

    #[test]
    fn displacement_identity_at_zero() {
        let p = CoherentParams::new(0.0, 0.4).unwrap();
        let v = displace_number_state(&p, k(1.0), 3, 10).unwrap();
        assert_eq!(v, FockVector::unit(k(1.0), 3, 10));
    }

    #[test]
    fn ground_state_displacement_is_single_sum() {
        // n = 0: (1−|ζ|²)^k ζ^s √(Γ(2k+s)/(s! Γ(2k)))
        let p = CoherentParams::new(0.9, 2.2).unwrap();
        let kv = 1.7;
        let v = displace_number_state(&p, k(kv), 0, 80).unwrap();
        let zeta = p.zeta();
        for s in 0..30 {
            let mag = (1.0 - zeta.norm_sqr()).powf(kv)
                * (0.5 * (ln_gamma(2.0 * kv + s as f64) - ln_gamma(s as f64 + 1.0) - ln_gamma(2.0 * kv))).exp();
            let want = zeta.powu(s as u32) * mag;
            assert!((v.coeffs()[s] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn displacement_reports_tail_failure() {
        let p = CoherentParams::new(2.0, 0.0).unwrap();
        let err = displace_number_state(&p, k(1.0), 0, 10).unwrap_err();
        assert!(matches!(err, Error::TruncationTail { cutoff: 10, .. }));
        assert!(displace_number_state(&p, k(1.0), 11, 10).is_err());
    }

    #[test]
    fn displacement_detects_cancellation() {
        let p = CoherentParams::new(1.0, 0.3).unwrap();
        let err = displace_number_state(&p, k(1.0), 80, 400).unwrap_err();
        assert!(matches!(err, Error::PrecisionLoss { .. }), "{err:?}");
        assert!(displace_number_state(&p, k(1.0), 4, 200).is_ok());
    }

    #[test]
    fn tail_shrinks_with_cutoff() {
        let p = CoherentParams::new(1.2, 0.5).unwrap();
        let opts = DisplaceOptions {
            tail_tolerance: 1.0,
            ..Default::default()
        };
        let tails: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&c| displace_number_state_with(&p, k(1.0), 2, c, &opts).unwrap().tail())
            .collect();
        assert!(tails[0] > tails[1] && tails[1] > tails[2], "{tails:?}");
    }

    #[test]
    fn expectation_closed_forms() {
        let p = CoherentParams::new(0.0, 0.7).unwrap();
        let e = expectation_generators(&p, k(2.0), 3);
        assert_eq!(e.t0, 5.0);
        assert_eq!(e.t_plus.norm(), 0.0);
        let p = CoherentParams::new(1.0, 0.3).unwrap();
        let e = expectation_generators(&p, k(1.0), 0);
        assert!((e.t0 - 1f64.cosh()).abs() < 1e-15);
        assert_eq!(e.t_plus, e.t_minus.conj());
    }

    #[test]
    fn similarity_identity_at_zero() {
        let p = CoherentParams::new(0.0, 0.0).unwrap();
        let e = similarity_transform(&p, Generator::T0);
        assert_eq!((e.c0, e.c_plus, e.c_minus), (ONE, ZERO, ZERO));
        let e = similarity_transform(&p, Generator::TPlus);
        assert_eq!((e.c0, e.c_plus, e.c_minus), (ZERO, ONE, ZERO));
        let p = CoherentParams::new(0.8, 1.0).unwrap();
        assert!((similarity_transform(&p, Generator::T0).c0.re - 0.8f64.cosh()).abs() < 1e-15);
    }
}
