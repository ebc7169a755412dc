//! Generalized-polynomial ODEs `ẋ_i = Σ_l v_{i,l}(t) X_{i,l}(x)`.

use serde::Serialize;
use thiserror::Error;

use crate::jet::TimeJet;
use crate::monomial::{DomainViolation, Monomial};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub coeff: TimeJet,
    pub monomial: Monomial,
}

impl Term {
    pub fn new(coeff: TimeJet, monomial: Monomial) -> Self {
        Self { coeff, monomial }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("equation {equation} references x{} but the system has {n} indeterminates", index + 1)]
    IndexOutOfRange { equation: usize, index: usize, n: usize },
    #[error("expected {expected} equations, got {found}")]
    EquationCount { expected: usize, found: usize },
}

/// A σπ-ODE. Indices are 0-based; equation `i` is the ordered term list for
/// `ẋ_i`. An empty list is the zero equation (`ν_i = 0`), which is kept
/// distinct from a list of terms whose coefficients vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaPiOde {
    n: usize,
    equations: Vec<Vec<Term>>,
}

impl SigmaPiOde {
    pub fn new(n: usize, equations: Vec<Vec<Term>>) -> Result<Self, OdeError> {
        if equations.len() != n {
            return Err(OdeError::EquationCount { expected: n, found: equations.len() });
        }
        for (i, eq) in equations.iter().enumerate() {
            for term in eq {
                if let Some(j) = term.monomial.max_index().filter(|&j| j >= n) {
                    return Err(OdeError::IndexOutOfRange { equation: i, index: j, n });
                }
            }
        }
        Ok(Self { n, equations })
    }

    /// The zero system `ẋ = 0` in `n` indeterminates.
    pub fn zero(n: usize) -> Self {
        Self { n, equations: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn equations(&self) -> &[Vec<Term>] {
        &self.equations
    }

    pub fn equation(&self, i: usize) -> &[Term] {
        &self.equations[i]
    }

    /// `ν_i`.
    pub fn term_count(&self, i: usize) -> usize {
        self.equations[i].len()
    }

    /// `d = ν_1 + ... + ν_n`.
    pub fn total_terms(&self) -> usize {
        self.equations.iter().map(Vec::len).sum()
    }

    /// Every equation is `ẋ_i = 0`, either with no terms or with all
    /// coefficients identically zero.
    pub fn is_zero_system(&self) -> bool {
        self.equations.iter().flatten().all(|t| t.coeff.is_zero())
    }

    /// Append a term to equation `i`.
    pub fn push_term(&mut self, i: usize, term: Term) -> Result<(), OdeError> {
        if let Some(j) = term.monomial.max_index().filter(|&j| j >= self.n) {
            return Err(OdeError::IndexOutOfRange { equation: i, index: j, n: self.n });
        }
        self.equations[i].push(term);
        Ok(())
    }

    /// Right-hand side at `(t, x)`.
    pub fn rhs(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, DomainViolation> {
        self.equations
            .iter()
            .map(|eq| eq.iter().try_fold(0.0, |acc, term| term.monomial.eval(x).map(|m| acc + term.coeff.eval(t) * m)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::Exponent;

    #[test]
    fn rejects_out_of_range_indices() {
        let eq = vec![Term::new(TimeJet::constant(1.0), Monomial::var(3))];
        assert!(matches!(SigmaPiOde::new(1, vec![eq]), Err(OdeError::IndexOutOfRange { index: 3, .. })));
    }

    #[test]
    fn zero_equations_are_distinct_from_zero_coefficients() {
        let zero = SigmaPiOde::zero(1);
        let fictitious = SigmaPiOde::new(1, vec![vec![Term::new(TimeJet::zero(), Monomial::var(0))]]).unwrap();
        assert_ne!(zero, fictitious);
        assert!(zero.is_zero_system() && fictitious.is_zero_system());
    }

    #[test]
    fn rhs_evaluates_terms() {
        let ode = SigmaPiOde::new(
            2,
            vec![
                vec![Term::new(TimeJet::poly(0.0, vec![0.0, 2.0]), Monomial::var(0))],
                vec![Term::new(
                    TimeJet::constant(3.0),
                    Monomial::from_pairs([(0, Exponent::integer(2)), (1, Exponent::rational(-1, 2).unwrap())]),
                )],
            ],
        )
        .unwrap();
        let f = ode.rhs(1.5, &[2.0, 4.0]).unwrap();
        assert_eq!(f, vec![6.0, 6.0]);
        assert!(ode.rhs(0.0, &[1.0, -1.0]).is_err());
    }
}
