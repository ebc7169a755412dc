//! Real-exponent monomials `Π_j x_j^{p_j}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Where a single power `x^p` is defined, as a constraint on `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainClass {
    /// All of `R`.
    Unrestricted,
    /// `x >= 0`.
    ClosedPositive,
    /// `x > 0`.
    OpenPositive,
    /// `x != 0`.
    Nonzero,
}

impl DomainClass {
    /// Intersection of two constraints on the same coordinate. Never empty.
    pub fn intersect(self, other: DomainClass) -> DomainClass {
        use DomainClass::*;
        match (self, other) {
            (Unrestricted, c) | (c, Unrestricted) => c,
            (ClosedPositive, ClosedPositive) => ClosedPositive,
            (Nonzero, Nonzero) => Nonzero,
            _ => OpenPositive,
        }
    }

    /// The open interior of the set.
    pub fn interior(self) -> DomainClass {
        match self {
            DomainClass::ClosedPositive => DomainClass::OpenPositive,
            c => c,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            DomainClass::Unrestricted => true,
            DomainClass::ClosedPositive => x >= 0.0,
            DomainClass::OpenPositive => x > 0.0,
            DomainClass::Nonzero => x != 0.0,
        }
    }
}

/// A real exponent, optionally carrying an exact reduced ratio.
///
/// Only exponents with a known ratio can be classified as odd-denominator
/// rationals; everything else is treated as irrational.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Exponent {
    value: f64,
    ratio: Option<(i64, i64)>,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Exponent {
    pub const ZERO: Exponent = Exponent { value: 0.0, ratio: Some((0, 1)) };
    pub const ONE: Exponent = Exponent { value: 1.0, ratio: Some((1, 1)) };

    pub fn integer(n: i64) -> Self {
        Self { value: n as f64, ratio: Some((n, 1)) }
    }

    /// Exact `num / den`, reduced, denominator positive. `None` when `den == 0`.
    pub fn rational(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Some(Self { value: n as f64 / d as f64, ratio: Some((n, d)) })
    }

    /// A real exponent with no exact ratio. Integer values are exact anyway and
    /// are tagged as such.
    pub fn real(value: f64) -> Self {
        if value.is_finite() && value.fract() == 0.0 && value.abs() < 9.0e15 {
            Self::integer(value as i64)
        } else {
            Self { value, ratio: None }
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn ratio(self) -> Option<(i64, i64)> {
        self.ratio
    }

    pub fn is_zero(self) -> bool {
        self.value == 0.0
    }

    pub fn is_integer(self) -> bool {
        matches!(self.ratio, Some((_, 1)))
    }

    fn odd_denominator(self) -> bool {
        matches!(self.ratio, Some((_, d)) if d % 2 == 1)
    }

    /// Definedness of `x^p` for this exponent (the four cases for real powers).
    pub fn domain_class(self) -> DomainClass {
        match (self.value >= 0.0, self.odd_denominator()) {
            (true, true) => DomainClass::Unrestricted,
            (true, false) => DomainClass::ClosedPositive,
            (false, true) => DomainClass::Nonzero,
            (false, false) => DomainClass::OpenPositive,
        }
    }

    /// `x^p` where defined.
    pub fn pow(self, x: f64) -> Option<f64> {
        if self.value == 0.0 {
            return Some(1.0);
        }
        if let Some((n, 1)) = self.ratio {
            if x == 0.0 && n < 0 {
                return None;
            }
            if let Ok(n) = i32::try_from(n) {
                return Some(x.powi(n));
            }
        }
        if x > 0.0 {
            Some(x.powf(self.value))
        } else if x == 0.0 {
            (self.value > 0.0).then_some(0.0)
        } else {
            match self.ratio {
                Some((n, d)) if d % 2 == 1 => {
                    let mag = (-x).powf(self.value);
                    Some(if n % 2 == 0 { mag } else { -mag })
                }
                _ => None,
            }
        }
    }

    pub fn checked_add(self, other: Exponent) -> Exponent {
        match (self.ratio, other.ratio) {
            (Some((a, b)), Some((c, d))) => a
                .checked_mul(d)
                .zip(c.checked_mul(b))
                .and_then(|(x, y)| x.checked_add(y))
                .zip(b.checked_mul(d))
                .and_then(|(n, den)| Exponent::rational(n, den))
                .unwrap_or_else(|| Exponent::real(self.value + other.value)),
            _ => Exponent::real(self.value + other.value),
        }
    }
}

impl std::ops::Neg for Exponent {
    type Output = Exponent;

    fn neg(self) -> Exponent {
        Exponent { value: -self.value, ratio: self.ratio.map(|(n, d)| (-n, d)) }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.ratio.is_some() == other.ratio.is_some()
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::integer(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("power of x{} undefined at {value}", index + 1)]
pub struct DomainViolation {
    /// 0-based coordinate index.
    pub index: usize,
    pub value: f64,
}

/// `Π_j x_j^{p_j}` with sparse, 0-based indices. No stored exponent is zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Monomial {
    exponents: BTreeMap<usize, Exponent>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(index: usize) -> Self {
        Self::one().with(index, Exponent::ONE)
    }

    pub fn from_pairs<I, E>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, E)>,
        E: Into<Exponent>,
    {
        pairs.into_iter().fold(Self::one(), |m, (j, p)| m.with(j, p.into()))
    }

    /// Multiply by `x_index^p` (exponents add).
    pub fn with(mut self, index: usize, p: Exponent) -> Self {
        let sum = match self.exponents.get(&index) {
            Some(&q) => q.checked_add(p),
            None => p,
        };
        if sum.is_zero() {
            self.exponents.remove(&index);
        } else {
            self.exponents.insert(index, sum);
        }
        self
    }

    pub fn exponent(&self, index: usize) -> Exponent {
        self.exponents.get(&index).copied().unwrap_or(Exponent::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Exponent)> + '_ {
        self.exponents.iter().map(|(&j, &p)| (j, p))
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.exponents.keys().next_back().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        other.iter().fold(self.clone(), |m, (j, p)| m.with(j, p))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, DomainViolation> {
        self.iter()
            .try_fold(1.0, |acc, (j, p)| p.pow(x[j]).map(|v| acc * v).ok_or(DomainViolation { index: j, value: x[j] }))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_monomial(self))
    }
}
