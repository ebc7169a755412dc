//! Exact quadratization of σπ-ODEs.
//!
//! Every term `(i, l)` of the source system gets a Driver coordinate
//! `Z_{i,l} = x_i^{-1} X_{i,l}(x)` whose exponent row is
//! `π^l_{i,j} = p^l_{i,j} - δ_{i,j}`. The Driver
//!
//! ```text
//! Ż_{i,l} = Σ_j π^l_{i,j} (v_j' Z_j) Z_{i,l}
//! ```
//!
//! is Driver-type, and the final stage `ẋ_i = (v_i' Z_i) x_i` recovers the
//! original coordinates. Coordinates are flattened as `s = α_i + l` with
//! `α_i = ν_1 + ... + ν_{i-1}` (0-based here).

use serde::Serialize;
use thiserror::Error;

use crate::frame::QuadraticFrame;
use crate::jet::TimeJet;
use crate::monomial::{DomainViolation, Exponent, Monomial};
use crate::ode::{OdeError, SigmaPiOde, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratizeError {
    #[error("every equation is the zero equation; there is nothing to quadratize")]
    EmptySystem,
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratizationKind {
    Canonical,
    Inclusive,
    /// State is `W = Z^{-1}`; the multiplier still uses `Z = W^{-1}`.
    Inverse,
}

/// Position of a Driver coordinate in the source system: term `term` of
/// equation `equation`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub equation: usize,
    pub term: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quadratization {
    source: SigmaPiOde,
    kind: QuadratizationKind,
    slots: Vec<Slot>,
    offsets: Vec<usize>,
    pi: Vec<Vec<f64>>,
    phi: Vec<Monomial>,
    identity: Vec<Option<usize>>,
}

impl Quadratization {
    fn build(source: SigmaPiOde, kind: QuadratizationKind) -> Self {
        let n = source.n();
        let mut slots = Vec::with_capacity(source.total_terms());
        let mut offsets = Vec::with_capacity(n);
        let mut pi = Vec::new();
        let mut phi = Vec::new();
        let mut identity = Vec::with_capacity(n);
        for i in 0..n {
            offsets.push(slots.len());
            let mut ident = None;
            for (l, term) in source.equation(i).iter().enumerate() {
                let z = term.monomial.clone().with(i, Exponent::integer(-1));
                let row: Vec<f64> =
                    (0..n).map(|j| term.monomial.exponent(j).value() - if i == j { 1.0 } else { 0.0 }).collect();
                if ident.is_none() && z == Monomial::var(i) {
                    ident = Some(slots.len());
                }
                slots.push(Slot { equation: i, term: l });
                pi.push(row);
                phi.push(z);
            }
            identity.push(ident);
        }
        Self { source, kind, slots, offsets, pi, phi, identity }
    }

    /// The system that was quadratized (including any fictitious terms).
    pub fn source(&self) -> &SigmaPiOde {
        &self.source
    }

    pub fn kind(&self) -> QuadratizationKind {
        self.kind
    }

    pub fn is_inclusive(&self) -> bool {
        self.kind == QuadratizationKind::Inclusive
    }

    /// `d`, the number of Driver coordinates.
    pub fn driver_dim(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Flattened coordinate of term `l` in equation `i`.
    pub fn flat_index(&self, i: usize, l: usize) -> usize {
        assert!(l < self.source.term_count(i));
        self.offsets[i] + l
    }

    /// `α_i`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Exponent row `π^l_{i,·}` of coordinate `s`.
    pub fn pi(&self, s: usize) -> &[f64] {
        &self.pi[s]
    }

    /// `Φ_{i,l}` of coordinate `s`.
    pub fn phi(&self, s: usize) -> &Monomial {
        &self.phi[s]
    }

    pub fn phi_monomials(&self) -> &[Monomial] {
        &self.phi
    }

    /// For each original coordinate, the Driver coordinate equal to it, if any.
    pub fn identity_coords(&self) -> &[Option<usize>] {
        &self.identity
    }

    /// Permutation listing identity coordinates first (in original order),
    /// then the remaining Driver coordinates in flattened order.
    pub fn identity_first_permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = self.identity.iter().flatten().copied().collect();
        perm.extend((0..self.driver_dim()).filter(|s| !self.identity.contains(&Some(*s))));
        perm
    }

    /// `v_j' Z_j` for every equation `j`.
    fn multipliers(&self, t: f64, z: &[f64]) -> Vec<f64> {
        (0..self.source.n())
            .map(|j| {
                self.source
                    .equation(j)
                    .iter()
                    .enumerate()
                    .map(|(l, term)| term.coeff.eval(t) * z[self.offsets[j] + l])
                    .sum()
            })
            .collect()
    }

    /// Right-hand side of the Driver, `Ż_s = (Σ_j π_{s,j} v_j'Z_j) Z_s`, at
    /// Driver state `z`.
    pub fn driver_rhs(&self, t: f64, z: &[f64]) -> Vec<f64> {
        let h = self.multipliers(t, z);
        self.pi.iter().zip(z).map(|(row, &zs)| row.iter().zip(&h).map(|(p, hj)| p * hj).sum::<f64>() * zs).collect()
    }

    /// Right-hand side of the final stage, `ẋ_i = (v_i' Z_i) x_i`.
    pub fn final_rhs(&self, t: f64, z: &[f64], x: &[f64]) -> Vec<f64> {
        self.multipliers(t, z).iter().zip(x).map(|(h, xi)| h * xi).collect()
    }

    /// The inverse Driver as a σπ-ODE in `W_s = Z_s^{-1}`:
    /// `Ẇ_s = -Σ_{j,r} π_{s,j} v_{j,r} W_{(j,r)}^{-1} W_s`. Terms with
    /// `π_{s,j} = 0` are omitted.
    pub fn inverse_ode(&self) -> SigmaPiOde {
        let d = self.driver_dim();
        let equations = (0..d)
            .map(|s| {
                let mut eq = Vec::new();
                for (j, &p) in self.pi[s].iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    for (r, term) in self.source.equation(j).iter().enumerate() {
                        let w = self.offsets[j] + r;
                        let m = Monomial::var(s).with(w, Exponent::integer(-1));
                        eq.push(Term::new(term.coeff.scale(-p), m));
                    }
                }
                eq
            })
            .collect();
        SigmaPiOde::new(d, equations).expect("inverse Driver indices are in range")
    }
}

pub fn quadratize_canonical(ode: &SigmaPiOde) -> Result<Quadratization, QuadratizeError> {
    if ode.total_terms() == 0 {
        return Err(QuadratizeError::EmptySystem);
    }
    Ok(Quadratization::build(ode.clone(), QuadratizationKind::Canonical))
}

/// Append a fictitious `0 · x_i^2` to every equation lacking `x_i^2`, then
/// quadratize canonically. Each `x_i` becomes a Driver coordinate, so the
/// final stage is redundant.
pub fn quadratize_inclusive(ode: &SigmaPiOde) -> Quadratization {
    let mut augmented = ode.clone();
    for i in 0..ode.n() {
        let square = Monomial::var(i).with(i, Exponent::ONE);
        if !ode.equation(i).iter().any(|t| t.monomial == square) {
            augmented.push_term(i, Term::new(TimeJet::zero(), square)).expect("index within range");
        }
    }
    Quadratization::build(augmented, QuadratizationKind::Inclusive)
}

/// Canonical coordinate layout with state `W = Z^{-1}`. See
/// [`Quadratization::inverse_ode`] for the resulting system.
pub fn inverse_driver(ode: &SigmaPiOde) -> Quadratization {
    Quadratization::build(ode.clone(), QuadratizationKind::Inverse)
}

/// The Driver frame: `V_{(i,l),(j,r)} = π^l_{i,j} v_{j,r}` under the
/// flattening. For inverse quadratizations this is the frame of the direct
/// Driver that supplies the multipliers.
pub fn driver_frame(q: &Quadratization) -> QuadraticFrame {
    let d = q.driver_dim();
    let mut frame = QuadraticFrame::zeros(d);
    for s in 0..d {
        for (j, &p) in q.pi[s].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (r, term) in q.source.equation(j).iter().enumerate() {
                frame.set(s, q.offsets[j] + r, term.coeff.scale(p));
            }
        }
    }
    frame
}

/// `Z_s = Φ_s(x)` for every Driver coordinate.
pub fn phi_eval(q: &Quadratization, x: &[f64]) -> Result<Vec<f64>, DomainViolation> {
    q.phi.iter().map(|m| m.eval(x)).collect()
}

/// Append `0 · q` to equation `host`. After quadratization the coordinate
/// `Z = x_host^{-1} q` satisfies `q(x) = Z · x_host`.
pub fn add_fictitious_monomial(ode: &SigmaPiOde, host: usize, q: Monomial) -> Result<SigmaPiOde, OdeError> {
    if host >= ode.n() {
        return Err(OdeError::IndexOutOfRange { equation: host, index: host, n: ode.n() });
    }
    let mut out = ode.clone();
    out.push_term(host, Term::new(TimeJet::zero(), q))?;
    Ok(out)
}
