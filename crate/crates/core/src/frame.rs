//! Frames of Driver-type ODEs `ẋ_i = (Σ_j v_{i,j}(t) x_j) x_i`.

use std::hash::{DefaultHasher, Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::jet::TimeJet;
use crate::monomial::{Exponent, Monomial};
use crate::ode::{SigmaPiOde, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("frame row {row} has {found} entries, expected {expected}")]
    NonSquare { row: usize, expected: usize, found: usize },
    #[error("frame must have at least one row")]
    Empty,
}

/// The coefficient matrix `V` of a Driver-type ODE, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticFrame {
    dim: usize,
    entries: Vec<TimeJet>,
}

impl QuadraticFrame {
    pub fn from_rows(rows: Vec<Vec<TimeJet>>) -> Result<Self, FrameError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(FrameError::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(FrameError::NonSquare { row, expected: dim, found: r.len() });
            }
            entries.extend(r);
        }
        Ok(Self { dim, entries })
    }

    /// Constant frame from plain numbers.
    pub fn from_constants(rows: &[Vec<f64>]) -> Result<Self, FrameError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&c| TimeJet::constant(c)).collect()).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![TimeJet::zero(); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &TimeJet {
        &self.entries[i * self.dim + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: TimeJet) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[TimeJet] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[TimeJet]> {
        self.entries.chunks(self.dim)
    }

    /// All entries constant in time.
    pub fn is_stationary(&self) -> bool {
        self.entries.iter().all(TimeJet::is_constant)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TimeJet::is_zero)
    }

    /// Row-major values of every entry at time `t`.
    pub fn values_at(&self, t: f64) -> Vec<f64> {
        self.entries.iter().map(|e| e.eval(t)).collect()
    }

    /// `ẋ_i = (v_i' x) x_i`.
    pub fn rhs(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let lin: f64 = self.row(i).iter().zip(x).map(|(v, &xj)| v.eval(t) * xj).sum();
                lin * x[i]
            })
            .collect()
    }

    /// Reorder coordinates: new coordinate `k` is old coordinate `perm[k]`.
    ///
    /// # Panics
    /// If `perm` is not a permutation of `0..dim`.
    pub fn permuted(&self, perm: &[usize]) -> QuadraticFrame {
        assert_eq!(perm.len(), self.dim);
        let mut seen = vec![false; self.dim];
        for &p in perm {
            assert!(!std::mem::replace(&mut seen[p], true), "not a permutation");
        }
        let mut out = Self::zeros(self.dim);
        for (a, &pa) in perm.iter().enumerate() {
            for (b, &pb) in perm.iter().enumerate() {
                out.set(a, b, self.get(pa, pb).clone());
            }
        }
        out
    }

    /// The same ODE written as a σπ-ODE with monomials `x_i x_j`.
    pub fn to_sigma_pi(&self) -> SigmaPiOde {
        let equations = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let m = Monomial::var(i).with(j, Exponent::ONE);
                        Term::new(self.get(i, j).clone(), m)
                    })
                    .collect()
            })
            .collect();
        SigmaPiOde::new(self.dim, equations).expect("indices within the frame dimension")
    }

    /// Content hash used to tie a series back to the frame that produced it.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for e in &self.entries {
            e.center().to_bits().hash(&mut h);
            e.is_exact().hash(&mut h);
            for c in e.coeffs() {
                c.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_rows() {
        let err = QuadraticFrame::from_constants(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert_eq!(err, FrameError::NonSquare { row: 1, expected: 2, found: 1 });
    }

    #[test]
    fn rhs_is_driver_type() {
        let f = QuadraticFrame::from_constants(&[vec![0.0, 2.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(f.rhs(0.0, &[3.0, 5.0]), vec![30.0, -10.0]);
        let ode = f.to_sigma_pi();
        assert_eq!(ode.rhs(0.0, &[3.0, 5.0]).unwrap(), vec![30.0, -10.0]);
    }

    #[test]
    fn permutation_relabels_both_axes() {
        let f = QuadraticFrame::from_constants(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = f.permuted(&[1, 0]);
        assert_eq!(p.values_at(0.0), vec![4.0, 3.0, 2.0, 1.0]);
    }
}
