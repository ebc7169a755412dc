use serde::Serialize;

use super::{taylor_general, taylor_stationary, SeriesError};
use crate::frame::QuadraticFrame;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContinuationPolicy {
    /// Fraction `θ ∈ (0, 1]` of the convergence bound taken per step.
    pub step_fraction: f64,
    pub max_steps: usize,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        Self { step_fraction: 0.5, max_steps: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Continuation {
    pub value: Vec<f64>,
    /// Every center after the initial one, ending with the target.
    pub path: Vec<f64>,
}

/// Relative size below which a component counts as having reached zero.
const ZERO_TOLERANCE: f64 = 1e-12;

/// A step shorter than this fraction of the first one means the radius has
/// collapsed, as it does when a pole is approached.
const COLLAPSE_RATIO: f64 = 1e-9;

/// Analytic continuation from `(t0, x0)` to `target` by repeated
/// re-expansion. Each step moves `θ · r̄` toward the target (or lands on it)
/// and evaluates the series there to obtain the next center value.
pub fn continue_to(
    frame: &QuadraticFrame,
    x0: &[f64],
    t0: f64,
    target: f64,
    order: usize,
    policy: ContinuationPolicy,
) -> Result<Continuation, SeriesError> {
    let theta = policy.step_fraction;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(SeriesError::InvalidPolicy(format!("step fraction {theta} is not in (0, 1]")));
    }
    if !target.is_finite() {
        return Err(SeriesError::InvalidPolicy("target must be finite".into()));
    }
    let stationary = frame.is_stationary();
    let mut t = t0;
    let mut x = x0.to_vec();
    let mut path = Vec::new();
    let mut first_step = None;
    while t != target {
        if path.len() >= policy.max_steps {
            return Err(SeriesError::StepLimit { steps: path.len(), t });
        }
        let series = if stationary {
            taylor_stationary(frame, &x, t, order, &[])?
        } else {
            taylor_general(frame, &x, t, order, &[])?
        };
        let remaining = target - t;
        let step = theta * series.radius_bound();
        let first = *first_step.get_or_insert(step);
        if step < COLLAPSE_RATIO * first {
            return Err(SeriesError::StepLimit { steps: path.len(), t });
        }
        let next = if step >= remaining.abs() { target } else { t + step.copysign(remaining) };
        if next == t {
            // The bound has collapsed below the float spacing at t.
            return Err(SeriesError::StepLimit { steps: path.len(), t });
        }
        let values = series.evaluate(next).values;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SeriesError::Divergence { t: next });
        }
        for (i, (&new, &old)) in values.iter().zip(&x).enumerate() {
            if new.abs() <= ZERO_TOLERANCE * old.abs() || new.signum() != old.signum() {
                return Err(SeriesError::DomainExit { index: i, t: next });
            }
        }
        x = values;
        t = next;
        path.push(t);
    }
    Ok(Continuation { value: x, path })
}
