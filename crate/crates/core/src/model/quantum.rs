use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::su11::BargmannIndex;

/// An integer or half-odd-integer, stored doubled so integrality checks
/// are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt { twice: 2 * v }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    fn same_integrality(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseHalfIntError(String);

impl fmt::Display for ParseHalfIntError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is not an integer or half-integer", self.0)
    }
}

impl std::error::Error for ParseHalfIntError {}

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    /// Accepts `3`, `-1/2`, `3/2`, `0.5`, `-1.5`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseHalfIntError(s.to_string());
        if let Some((num, den)) = t.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim().parse::<i64>().map_err(|_| bad())? {
                1 => Ok(HalfInt::from_int(num)),
                2 => Ok(HalfInt::from_twice(num)),
                _ => Err(bad()),
            };
        }
        if let Ok(v) = t.parse::<i64>() {
            return Ok(HalfInt::from_int(v));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        let twice = 2.0 * v;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e15 {
            return Err(bad());
        }
        Ok(HalfInt::from_twice(twice as i64))
    }
}

/// `√(x² + 4c) − |x|`, written to avoid cancellation for small `c`.
fn shift(x: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    4.0 * c / ((x * x + 4.0 * c).sqrt() + x.abs())
}

/// One angular sector `(s, c1, c2, m, j)` with every derived quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumNumbers {
    pub s: HalfInt,
    pub c1: f64,
    pub c2: f64,
    pub m: HalfInt,
    pub j: HalfInt,
    pub delta1: f64,
    pub delta2: f64,
    pub m1: f64,
    pub m2: f64,
    pub m_plus: HalfInt,
    /// `J = j + (δ1+δ2)/2`.
    #[serde(rename = "J")]
    pub big_j: f64,
    /// Separation constant `J(J+1)`.
    pub separation: f64,
}

impl QuantumNumbers {
    pub fn new(s: HalfInt, c1: f64, c2: f64, m: HalfInt, j: HalfInt) -> Result<Self> {
        for (field, c) in [("c1", c1), ("c2", c2)] {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {c}")));
            }
        }
        if !s.same_integrality(m) {
            return Err(Error::invalid(
                "m",
                format!("m = {m} and s = {s} must both be integers or both half-integers"),
            ));
        }
        if !s.same_integrality(j) {
            return Err(Error::invalid(
                "j",
                format!("j = {j} and s = {s} must both be integers or both half-integers"),
            ));
        }
        if m.abs() > j {
            return Err(Error::invalid("m", format!("|m| = {} exceeds j = {j}", m.abs())));
        }
        let m_plus = HalfInt::from_twice(((m.twice + s.twice).abs() + (m.twice - s.twice).abs()) / 2);
        if j < m_plus {
            return Err(Error::invalid(
                "j",
                format!("j = {j} is below (|m+s|+|m-s|)/2 = {m_plus}"),
            ));
        }
        let diff = m.value() - s.value();
        let sum = m.value() + s.value();
        let delta1 = shift(diff, c1);
        let delta2 = shift(sum, c2);
        let big_j = j.value() + 0.5 * (delta1 + delta2);
        Ok(QuantumNumbers {
            s,
            c1,
            c2,
            m,
            j,
            delta1,
            delta2,
            m1: diff.abs() + delta1,
            m2: sum.abs() + delta2,
            m_plus,
            big_j,
            separation: big_j * (big_j + 1.0),
        })
    }

    /// `k = J + 1`, the unitary branch of `k(k−1) = J(J+1)`.
    pub fn bargmann_index(&self) -> BargmannIndex {
        BargmannIndex::new(self.big_j + 1.0).expect("J >= 0 gives k >= 1")
    }

    /// Degree `j − m_+` of the Jacobi factor in the angular function.
    pub fn jacobi_degree(&self) -> usize {
        ((self.j.twice - self.m_plus.twice) / 2) as usize
    }
}

/// All `(j, m)` with `|s| ≤ j ≤ j_max` and `−j ≤ m ≤ j`, ordered by `j` then `m`.
pub fn enumerate_sectors(s: HalfInt, c1: f64, c2: f64, j_max: HalfInt) -> Result<Vec<QuantumNumbers>> {
    if !s.same_integrality(j_max) {
        return Err(Error::invalid(
            "j_max",
            format!("j_max = {j_max} and s = {s} must share integrality"),
        ));
    }
    let j_min = s.abs();
    if j_max < j_min {
        return Err(Error::invalid(
            "j_max",
            format!("j_max = {j_max} is below the smallest allowed j = {j_min}"),
        ));
    }
    let mut out = Vec::new();
    for two_j in (j_min.twice..=j_max.twice).step_by(2) {
        for two_m in (-two_j..=two_j).step_by(2) {
            out.push(QuantumNumbers::new(
                s,
                c1,
                c2,
                HalfInt::from_twice(two_m),
                HalfInt::from_twice(two_j),
            )?);
        }
    }
    Ok(out)
}

/// `E = −1/(2(n+J+1)²)`.
pub fn energy(n: usize, big_j: f64) -> f64 {
    let nt = n as f64 + big_j + 1.0;
    -0.5 / (nt * nt)
}

/// A bound radial level in a given sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialState {
    pub qn: QuantumNumbers,
    pub n: usize,
    pub energy: f64,
}

impl RadialState {
    pub fn new(qn: QuantumNumbers, n: usize) -> Self {
        RadialState {
            energy: energy(n, qn.big_j),
            qn,
            n,
        }
    }

    /// `N` from `n = N + (δ1+δ2)/2 − (J+1)`; this is `n + j + 1`.
    pub fn principal_label(&self) -> f64 {
        self.n as f64 + self.qn.big_j + 1.0 - 0.5 * (self.qn.delta1 + self.qn.delta2)
    }

    /// Tilting parameter `β = ln √(−2E)`.
    pub fn tilt_beta(&self) -> f64 {
        0.5 * (-2.0 * self.energy).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(h("1/2"), HalfInt::from_twice(1));
        assert_eq!(h("0.5"), HalfInt::from_twice(1));
        assert_eq!(h("-3/2"), HalfInt::from_twice(-3));
        assert_eq!(h("2"), HalfInt::from_int(2));
        assert_eq!(h("4/2"), HalfInt::from_twice(4));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
        assert_eq!(h("-1/2").to_string(), "-1/2");
        assert_eq!(h("3").to_string(), "3");
    }

    #[test]
    fn hydrogen_sectors() {
        let sectors = enumerate_sectors(h("0"), 0.0, 0.0, h("1")).unwrap();
        let jm: Vec<(i64, i64)> = sectors.iter().map(|q| (q.j.twice(), q.m.twice())).collect();
        assert_eq!(jm, vec![(0, 0), (2, -2), (2, 0), (2, 2)]);
        for q in &sectors {
            assert_eq!((q.delta1, q.delta2), (0.0, 0.0));
            assert_eq!(q.big_j, q.j.value());
        }
    }

    #[test]
    fn monopole_sector_starts_at_half() {
        let sectors = enumerate_sectors(h("1/2"), 0.0, 0.0, h("3/2")).unwrap();
        let first = sectors.iter().find(|q| q.m == h("1/2")).unwrap();
        assert_eq!(first.j, h("1/2"));
    }

    #[test]
    fn derived_shifts() {
        let q = QuantumNumbers::new(h("1/2"), 1.0, 2.0, h("1/2"), h("1/2")).unwrap();
        // independent route: m1 = √((m−s)²+4c1), m2 = √((m+s)²+4c2)
        let m1 = (0.0f64 + 4.0).sqrt();
        let m2 = (1.0f64 + 8.0).sqrt();
        assert!((q.m1 - m1).abs() < 1e-15 && (q.m2 - m2).abs() < 1e-15);
        assert!((q.delta1 - 2.0).abs() < 1e-15);
        assert!((q.delta2 - 2.0).abs() < 1e-15);
        assert!((q.big_j - (0.5 + 2.0)).abs() < 1e-15);
        assert!((q.separation - 2.5 * 3.5).abs() < 1e-13);
    }

    #[test]
    fn rejects_inconsistent_numbers() {
        assert!(QuantumNumbers::new(h("1/2"), 0.0, 0.0, h("1"), h("1")).is_err());
        assert!(QuantumNumbers::new(h("0"), 0.0, 0.0, h("0"), h("1/2")).is_err());
        assert!(QuantumNumbers::new(h("0"), 0.0, 0.0, h("2"), h("1")).is_err());
        assert!(QuantumNumbers::new(h("2"), 0.0, 0.0, h("0"), h("1")).is_err());
        assert!(QuantumNumbers::new(h("0"), -1.0, 0.0, h("0"), h("0")).is_err());
        assert!(enumerate_sectors(h("1/2"), 0.0, 0.0, h("1")).is_err());
        assert!(enumerate_sectors(h("2"), 0.0, 0.0, h("1")).is_err());
    }

    #[test]
    fn energy_values() {
        assert_eq!(energy(0, 0.0), -0.5);
        assert!((energy(1, 1.0) + 1.0 / 18.0).abs() < 1e-16);
    }

    #[test]
    fn hydrogen_degeneracy() {
        let sectors = enumerate_sectors(h("0"), 0.0, 0.0, h("3")).unwrap();
        for big_n in 1..=4usize {
            let mut count = 0;
            for q in &sectors {
                for n in 0..4 {
                    let st = RadialState::new(*q, n);
                    if st.principal_label() == big_n as f64 {
                        assert_eq!(st.energy, -0.5 / (big_n * big_n) as f64);
                        count += 1;
                    }
                }
            }
            assert_eq!(count, big_n * big_n);
        }
    }
}
