//! Time jets: finite Taylor polynomials in `t - t_ref`.
//!
//! A jet either represents a polynomial exactly (`exact == true`) or is the
//! truncation of an analytic coefficient to a fixed order. Arithmetic keeps
//! track of the difference: anything that touches a truncated jet is only
//! known up to the smallest order involved.

use std::fmt;
use std::ops::{Add, Mul, Neg};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeJet {
    center: f64,
    coeffs: Vec<f64>,
    exact: bool,
}

impl TimeJet {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self { center: 0.0, coeffs: vec![c], exact: true }
    }

    /// Exact polynomial `c0 + c1 (t - center) + ...`. Trailing zeros are trimmed.
    pub fn poly(center: f64, coeffs: Vec<f64>) -> Self {
        let mut jet = Self { center, coeffs, exact: true };
        jet.normalize();
        jet
    }

    /// Truncated analytic coefficient known through order `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn truncated(center: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated jet needs at least one coefficient");
        Self { center, coeffs, exact: false }
    }

    fn normalize(&mut self) {
        if !self.exact {
            return;
        }
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Highest stored power (the polynomial degree for exact jets, the
    /// truncation order otherwise).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True iff every stored coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Constant in time: exact with no non-constant terms.
    pub fn is_constant(&self) -> bool {
        self.exact && self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let dt = t - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * dt + c)
    }

    /// `d/dt`. The order drops by one; a truncated jet of order zero carries no
    /// derivative information and yields `None`.
    pub fn derivative(&self) -> Option<TimeJet> {
        if self.coeffs.len() == 1 {
            return if self.exact { Some(Self { center: self.center, ..Self::zero() }) } else { None };
        }
        let coeffs = self.coeffs[1..].iter().enumerate().map(|(k, &c)| c * (k + 1) as f64).collect();
        let mut jet = Self { center: self.center, coeffs, exact: self.exact };
        jet.normalize();
        Some(jet)
    }

    pub fn scale(&self, factor: f64) -> TimeJet {
        let mut jet = Self {
            center: self.center,
            // `+ 0.0` turns a negated zero into a plain zero.
            coeffs: self.coeffs.iter().map(|c| c * factor + 0.0).collect(),
            exact: self.exact,
        };
        jet.normalize();
        jet
    }

    /// Re-expand around `new_center`. Only exact jets can move; a truncated
    /// jet is returned unchanged when the center already matches.
    pub fn shifted(&self, new_center: f64) -> Option<TimeJet> {
        if new_center == self.center {
            return Some(self.clone());
        }
        if !self.exact {
            return None;
        }
        // Taylor shift by repeated synthetic division.
        let h = new_center - self.center;
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += h * c[j + 1];
            }
        }
        Some(Self::poly(new_center, c))
    }

    fn aligned(&self, other: &TimeJet) -> TimeJet {
        other
            .shifted(self.center)
            .unwrap_or_else(|| panic!("cannot combine truncated jets centered at {} and {}", self.center, other.center))
    }

    fn combined_order(a: &TimeJet, b: &TimeJet) -> Option<usize> {
        match (a.exact, b.exact) {
            (true, true) => None,
            (false, true) => Some(a.order()),
            (true, false) => Some(b.order()),
            (false, false) => Some(a.order().min(b.order())),
        }
    }
}

impl Default for TimeJet {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &TimeJet {
    type Output = TimeJet;

    fn add(self, rhs: &TimeJet) -> TimeJet {
        let rhs = self.aligned(rhs);
        let limit = TimeJet::combined_order(self, &rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let len = limit.map_or(len, |o| len.min(o + 1));
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + rhs.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        let mut jet = TimeJet { center: self.center, coeffs, exact: limit.is_none() };
        jet.normalize();
        jet
    }
}

impl Mul for &TimeJet {
    type Output = TimeJet;

    fn mul(self, rhs: &TimeJet) -> TimeJet {
        if (self.exact && self.is_zero()) || (rhs.exact && rhs.is_zero()) {
            return TimeJet { center: self.center, ..TimeJet::zero() };
        }
        let rhs = self.aligned(rhs);
        let limit = TimeJet::combined_order(self, &rhs);
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = limit.map_or(full, |o| full.min(o + 1));
        let mut coeffs = vec![0.0; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            for (j, &b) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        let mut jet = TimeJet { center: self.center, coeffs, exact: limit.is_none() };
        jet.normalize();
        jet
    }
}

impl Neg for &TimeJet {
    type Output = TimeJet;

    fn neg(self) -> TimeJet {
        self.scale(-1.0)
    }
}

impl fmt::Display for TimeJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_jet(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_never_produces_negative_zero() {
        let j = TimeJet::poly(0.0, vec![0.0, 1.0]).scale(-1.0);
        assert!(j.coeffs()[0].is_sign_positive());
    }

    #[test]
    fn eval_at_center_is_leading_coefficient() {
        let j = TimeJet::poly(1.5, vec![3.0, -2.0, 7.0]);
        assert_eq!(j.eval(1.5), 3.0);
    }

    #[test]
    fn product_and_derivative_orders() {
        let a = TimeJet::poly(0.0, vec![1.0, 2.0]);
        let b = TimeJet::poly(0.0, vec![0.0, 0.0, 3.0]);
        let p = &a * &b;
        assert_eq!(p.coeffs(), &[0.0, 0.0, 3.0, 6.0]);
        assert!(p.is_exact());
        let d = p.derivative().unwrap();
        assert_eq!(d.coeffs(), &[0.0, 6.0, 18.0]);
    }

    #[test]
    fn zero_is_additive_identity_and_annihilator() {
        let a = TimeJet::truncated(0.0, vec![1.0, 2.0, 3.0]);
        let z = TimeJet::zero();
        assert_eq!(&a + &z, a);
        assert!((&a * &z).is_zero());
        assert!((&z * &a).is_exact());
    }

    #[test]
    fn truncated_products_keep_smallest_order() {
        let a = TimeJet::truncated(0.0, vec![1.0, 1.0, 0.5]);
        let b = TimeJet::truncated(0.0, vec![1.0, -1.0]);
        let p = &a * &b;
        assert!(!p.is_exact());
        assert_eq!(p.order(), 1);
        assert_eq!(p.coeffs(), &[1.0, 0.0]);
        assert!(TimeJet::truncated(0.0, vec![4.0]).derivative().is_none());
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let j = TimeJet::poly(0.0, vec![1.0, -3.0, 0.5, 2.0]);
        let s = j.shifted(0.7).unwrap();
        for &t in &[-1.0, 0.0, 0.3, 2.0] {
            assert!((j.eval(t) - s.eval(t)).abs() < 1e-12);
        }
        assert!(TimeJet::truncated(0.0, vec![1.0]).shifted(1.0).is_none());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(TimeJet::poly(0.0, vec![1.0, 0.0, 0.0]), TimeJet::constant(1.0));
        assert!(TimeJet::poly(0.0, vec![2.0]).is_constant());
        assert!(!TimeJet::truncated(0.0, vec![2.0]).is_constant());
    }
}
