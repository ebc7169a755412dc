//! Taylor series of Driver-type ODEs `ẋ_i = (v_i' x) x_i`.
//!
//! The `k`-th derivative of `x_i` is a polynomial in `x` whose coefficients
//! `v^{k+1,s}_{i,i_1,...,i_{s-1}}(t)` obey a layered recursion: a layer grows
//! by one tail index through the multiplier `Σ_l α^l v_{l,j}`, and by a time
//! derivative at fixed length. The multiplier depends only on the multiset
//! of tail indices, so coefficients are aggregated over orderings and
//! keyed by [`IndexMultiset`]. Tail indices range over the support `𝒮` of
//! nonzero frame columns.
//!
//! Internally every layer is divided by `k!`, so the engines produce the
//! series coefficients `a_k = c_k / k!` directly.

mod bounds;
mod continuation;
mod general;
mod multiset;
mod observable;
mod stationary;

use serde::Serialize;
use thiserror::Error;

use crate::frame::QuadraticFrame;

pub use bounds::{bound_envelope, convergence_bound};
pub use continuation::{continue_to, Continuation, ContinuationPolicy};
pub use general::{coefficient_tensor, taylor_general, CoefficientTensor};
pub use multiset::IndexMultiset;
pub use observable::{observable_series, ScalarSeries};
pub use stationary::taylor_stationary;

/// Largest supported order; `k!` overflows `f64` beyond it.
pub const MAX_ORDER: usize = 170;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("initial component x{} is zero", index + 1)]
    ZeroComponent { index: usize },
    #[error("initial point has {found} components, frame has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component x{} out of range for dimension {dim}", index + 1)]
    ComponentOutOfRange { index: usize, dim: usize },
    #[error("order {order} exceeds the supported maximum {}", MAX_ORDER)]
    OrderTooLarge { order: usize },
    #[error(
        "frame entry ({}, {}) cannot supply {needed} derivatives at t0 = {t0} (truncated jet of order {available} centered at {center})",
        row + 1, col + 1
    )]
    OrderBudget { row: usize, col: usize, needed: usize, available: usize, center: f64, t0: f64 },
    #[error("frame is not stationary")]
    NotStationary,
    #[error("|t - t0| = {distance} is not below the convergence bound {radius}")]
    OutOfRadius { distance: f64, radius: f64 },
    #[error("component x{} reached zero near t = {t}", index + 1)]
    DomainExit { index: usize, t: f64 },
    #[error("stopped after {steps} steps at t = {t}")]
    StepLimit { steps: usize, t: f64 },
    #[error("solution is not finite near t = {t}")]
    Divergence { t: f64 },
    #[error("series are centered at different points ({a} and {b})")]
    MixedCenters { a: f64, b: f64 },
    #[error("invalid continuation policy: {0}")]
    InvalidPolicy(String),
}

/// Support of a frame: `𝒮` and, for every column `j`, `ρ(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Support {
    /// Columns with some entry not identically zero.
    pub indices: Vec<usize>,
    /// `rho[j]`: members `l` of `𝒮` with `v_{l,j}` not identically zero.
    /// Empty for columns outside `𝒮`.
    pub rho: Vec<Vec<usize>>,
}

pub fn support(frame: &QuadraticFrame) -> Support {
    let m = frame.dim();
    let nonzero = |i: usize, j: usize| !frame.get(i, j).is_zero();
    let indices: Vec<usize> = (0..m).filter(|&j| (0..m).any(|i| nonzero(i, j))).collect();
    let rho = (0..m).map(|j| indices.iter().copied().filter(|&l| nonzero(l, j)).collect()).collect();
    Support { indices, rho }
}

/// Truncated Taylor series of selected components of a Driver-type solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesSolution {
    t0: f64,
    x0: Vec<f64>,
    order: usize,
    components: Vec<usize>,
    /// `coeffs[c][k] = a_k` for component `components[c]`.
    coeffs: Vec<Vec<f64>>,
    radius_bound: f64,
    frame_ref: u64,
}

impl SeriesSolution {
    pub(crate) fn new(
        frame: &QuadraticFrame,
        x0: &[f64],
        t0: f64,
        order: usize,
        components: Vec<usize>,
        coeffs: Vec<Vec<f64>>,
    ) -> Self {
        Self {
            t0,
            x0: x0.to_vec(),
            order,
            components,
            coeffs,
            radius_bound: convergence_bound(frame, x0, t0),
            frame_ref: frame.fingerprint(),
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Full initial point of the frame.
    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    /// `a_k = c_k / k!` for every order, per requested component.
    pub fn normalized(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// `a_k` of the `c`-th requested component.
    pub fn coefficient(&self, c: usize, k: usize) -> f64 {
        self.coeffs[c][k]
    }

    /// `c_k = x^{(k)}(t0)` of the `c`-th requested component.
    pub fn derivative(&self, c: usize, k: usize) -> f64 {
        self.coeffs[c][k] * factorial(k)
    }

    /// `r̄`, a lower bound on the radius of convergence.
    pub fn radius_bound(&self) -> f64 {
        self.radius_bound
    }

    /// Fingerprint of the frame that produced the series.
    pub fn frame_ref(&self) -> u64 {
        self.frame_ref
    }

    pub fn evaluate(&self, t: f64) -> Evaluation {
        evaluate(self, t)
    }
}

/// Value of a series at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub values: Vec<f64>,
    /// `|a_K (t - t0)^K|` per component, a rough truncation estimate.
    pub error_estimate: Vec<f64>,
    /// `|t - t0| < r̄`.
    pub within_radius: bool,
}

pub fn evaluate(series: &SeriesSolution, t: f64) -> Evaluation {
    let dt = t - series.t0;
    let values = series.coeffs.iter().map(|a| horner(a, dt)).collect();
    let error_estimate = series.coeffs.iter().map(|a| (a[series.order] * dt.powi(series.order as i32)).abs()).collect();
    Evaluation { values, error_estimate, within_radius: dt.abs() < series.radius_bound }
}

pub(crate) fn horner(a: &[f64], dt: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * dt + c)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// Shared validation of engine inputs. Returns the component list to compute.
pub(crate) fn check_inputs(
    frame: &QuadraticFrame,
    x0: &[f64],
    order: usize,
    components: &[usize],
) -> Result<Vec<usize>, SeriesError> {
    let m = frame.dim();
    if x0.len() != m {
        return Err(SeriesError::DimensionMismatch { expected: m, found: x0.len() });
    }
    if order > MAX_ORDER {
        return Err(SeriesError::OrderTooLarge { order });
    }
    if let Some(index) = x0.iter().position(|&v| v == 0.0) {
        return Err(SeriesError::ZeroComponent { index });
    }
    if let Some(&index) = components.iter().find(|&&c| c >= m) {
        return Err(SeriesError::ComponentOutOfRange { index, dim: m });
    }
    Ok(if components.is_empty() { (0..m).collect() } else { components.to_vec() })
}

/// `Π_a x[support[a]]^{counts[a]}`.
pub(crate) fn tail_product(x: &[f64], support: &[usize], counts: &[u16]) -> f64 {
    support.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&j, &c)| x[j].powi(c as i32)).product()
}
