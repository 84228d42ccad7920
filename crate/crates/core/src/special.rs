//! Special functions evaluated by stable recurrences.
//!
//! Everything here works for non-integer parameters: the Laguerre order
//! `2J + 1` and the Jacobi indices `m1`, `m2` are generically irrational.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// Infallible variant for arguments already known to be positive.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

fn check_order(field: &'static str, value: f64) -> Result<()> {
    if value > -1.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be > -1, got {value}")))
    }
}

/// Arithmetic needed by the Laguerre recurrence; lets one routine serve
/// real and complex arguments.
pub trait RecurrenceScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn from_real(v: f64) -> Self;
}

impl RecurrenceScalar for f64 {
    fn from_real(v: f64) -> Self {
        v
    }
}

impl RecurrenceScalar for Complex64 {
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
}

/// Ascending three-term recurrence
/// `(k+1) L_{k+1} = (2k+α+1−x) L_k − (k+α) L_{k−1}`; calls `sink(k, L_k)`
/// for every degree up to `n` and returns `L_n`.
fn laguerre_walk<T: RecurrenceScalar>(n: usize, alpha: f64, x: T, mut sink: impl FnMut(usize, T)) -> T {
    let mut prev = T::from_real(1.0);
    sink(0, prev);
    if n == 0 {
        return prev;
    }
    let mut cur = T::from_real(1.0 + alpha) - x;
    sink(1, cur);
    for k in 1..n {
        let kf = k as f64;
        let next = ((T::from_real(2.0 * kf + alpha + 1.0) - x) * cur - prev * (kf + alpha)) * (1.0 / (kf + 1.0));
        prev = cur;
        cur = next;
        sink(k + 1, cur);
    }
    cur
}

pub(crate) fn laguerre_unchecked<T: RecurrenceScalar>(n: usize, alpha: f64, x: T) -> T {
    laguerre_walk(n, alpha, x, |_, _| {})
}

/// Associated Laguerre polynomial `L_n^α(x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    check_order("alpha", alpha)?;
    Ok(laguerre_walk(n, alpha, x, |_, _| {}))
}

/// `L_n^α(z)` at a complex argument, by the same recurrence.
pub fn laguerre_complex(n: usize, alpha: f64, z: Complex64) -> Result<Complex64> {
    check_order("alpha", alpha)?;
    Ok(laguerre_walk(n, alpha, z, |_, _| {}))
}

/// `[L_0^α(x), …, L_n^α(x)]` from a single recurrence pass.
pub fn laguerre_sequence(n: usize, alpha: f64, x: f64) -> Result<Vec<f64>> {
    check_order("alpha", alpha)?;
    let mut out = Vec::with_capacity(n + 1);
    laguerre_walk(n, alpha, x, |_, v| out.push(v));
    Ok(out)
}

/// `L_n^α`, `d/dx L_n^α = −L_{n−1}^{α+1}` and `d²/dx² L_n^α = L_{n−2}^{α+2}`.
pub fn laguerre_with_derivatives(n: usize, alpha: f64, x: f64) -> Result<(f64, f64, f64)> {
    check_order("alpha", alpha)?;
    let value = laguerre_walk(n, alpha, x, |_, _| {});
    let first = if n >= 1 {
        -laguerre_walk(n - 1, alpha + 1.0, x, |_, _| {})
    } else {
        0.0
    };
    let second = if n >= 2 {
        laguerre_walk(n - 2, alpha + 2.0, x, |_, _| {})
    } else {
        0.0
    };
    Ok((value, first, second))
}

/// Jacobi polynomial `P_n^{(a,b)}(x)`, orthogonal on `[−1, 1]` under
/// `(1−x)^a (1+x)^b`.
pub fn jacobi(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    check_order("a", a)?;
    check_order("b", b)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    let ab = a + b;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let denom = 2.0 * kf * (kf + ab) * (s - 2.0);
        let lin = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let back = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let next = (lin * cur - back * prev) / denom;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
