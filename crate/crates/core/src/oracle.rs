//! Fixed-step RK4 reference integrator and trajectory comparison.
//!
//! Deliberately independent of the series machinery: it only evaluates
//! right-hand sides.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::frame::QuadraticFrame;
use crate::monomial::DomainViolation;
use crate::ode::SigmaPiOde;
use crate::parse::format_number;

/// Hard cap on the number of steps of a single run.
pub const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step size must be positive and finite, got {h}")]
    InvalidStep { h: f64 },
    #[error("{steps} steps exceed the limit of {}", MAX_STEPS)]
    TooManySteps { steps: f64 },
    #[error("state is not finite near t = {t}")]
    Blowup { t: f64 },
    #[error("right-hand side undefined near t = {t}: {violation}")]
    DomainExit { t: f64, violation: DomainViolation },
    #[error("initial point has {found} components, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("window [{a}, {b}] must contain t0 = {t0}")]
    InvalidWindow { a: f64, b: f64, t0: f64 },
    #[error("no trajectory samples inside the comparison window")]
    EmptyWindow,
}

/// Anything RK4 can integrate.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, DomainViolation>;
    /// Short label recorded in trajectory metadata.
    fn kind(&self) -> &'static str;
}

impl VectorField for SigmaPiOde {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, DomainViolation> {
        self.rhs(t, x)
    }

    fn kind(&self) -> &'static str {
        "sigma-pi"
    }
}

impl VectorField for QuadraticFrame {
    fn dim(&self) -> usize {
        QuadraticFrame::dim(self)
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, DomainViolation> {
        Ok(self.rhs(t, x))
    }

    fn kind(&self) -> &'static str {
        "driver-frame"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// Strictly increasing.
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step: f64,
    pub kind: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// State at the largest time.
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectories are never empty")
    }

    /// State at the first time equal to `t`, if sampled.
    pub fn state_at(&self, t: f64) -> Option<&[f64]> {
        self.times.iter().position(|&s| s == t).map(|k| self.states[k].as_slice())
    }

    /// CSV with header `t,x1,...,xm` and round-trip decimals.
    pub fn to_csv(&self) -> String {
        let m = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=m {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format_number(*t));
            for v in x {
                out.push(',');
                out.push_str(&format_number(*v));
            }
            out.push('\n');
        }
        out
    }
}

fn check_finite(t: f64, x: &[f64]) -> Result<(), OracleError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(OracleError::Blowup { t })
    }
}

fn rk4_step<F: VectorField + ?Sized>(f: &F, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>, OracleError> {
    let eval = |t: f64, y: &[f64]| {
        check_finite(t, y)?;
        f.eval(t, y).map_err(|violation| OracleError::DomainExit { t, violation })
    };
    let shift = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = eval(t, x)?;
    let k2 = eval(t + h / 2.0, &shift(x, &k1, h / 2.0))?;
    let k3 = eval(t + h / 2.0, &shift(x, &k2, h / 2.0))?;
    let k4 = eval(t + h, &shift(x, &k3, h))?;
    let next: Vec<f64> = (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    check_finite(t + h, &next)?;
    Ok(next)
}

/// Classical RK4 from `t0` to `t1` with step `h`; the last step is shortened
/// to land exactly on `t1`. Integration may run backward, but the returned
/// trajectory is always ordered by increasing time.
pub fn rk4<F: VectorField + ?Sized>(f: &F, x0: &[f64], t0: f64, t1: f64, h: f64) -> Result<Trajectory, OracleError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(OracleError::InvalidStep { h });
    }
    if x0.len() != f.dim() {
        return Err(OracleError::DimensionMismatch { expected: f.dim(), found: x0.len() });
    }
    let distance = (t1 - t0).abs();
    let steps = (distance / h).ceil();
    if steps > MAX_STEPS as f64 {
        return Err(OracleError::TooManySteps { steps });
    }
    check_finite(t0, x0)?;
    f.eval(t0, x0).map_err(|violation| OracleError::DomainExit { t: t0, violation })?;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    // Full steps strictly before t1, then one landing step.
    let full = ((distance / h) * (1.0 - 1e-12)).floor() as usize;
    let mut times = vec![t0];
    let mut states = vec![x0.to_vec()];
    let mut t = t0;
    let mut x = x0.to_vec();
    for k in 1..=full {
        let next_t = t0 + dir * h * k as f64;
        x = rk4_step(f, t, &x, next_t - t)?;
        t = next_t;
        times.push(t);
        states.push(x.clone());
    }
    if t != t1 {
        x = rk4_step(f, t, &x, t1 - t)?;
        times.push(t1);
        states.push(x);
    }
    if dir < 0.0 {
        times.reverse();
        states.reverse();
    }
    Ok(Trajectory { times, states, step: h, kind: f.kind().into() })
}

/// RK4 over `[a, b]` starting from `(t0, x0)` with `a <= t0 <= b`.
pub fn rk4_window<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    t0: f64,
    a: f64,
    b: f64,
    h: f64,
) -> Result<Trajectory, OracleError> {
    if !(a <= t0 && t0 <= b) {
        return Err(OracleError::InvalidWindow { a, b, t0 });
    }
    let back = rk4(f, x0, t0, a, h)?;
    let fwd = rk4(f, x0, t0, b, h)?;
    let mut times = back.times;
    let mut states = back.states;
    times.pop();
    states.pop();
    times.extend(fwd.times);
    states.extend(fwd.states);
    Ok(Trajectory { times, states, step: h, kind: fwd.kind })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub samples: usize,
    pub max_rel_error: f64,
    pub rms_rel_error: f64,
    /// Time of the largest deviation.
    pub worst_time: f64,
    /// Samples at or beyond the supplied convergence radius.
    pub out_of_radius: usize,
}

/// Componentwise relative error `|s - x| / |x|` of `series_eval` against
/// `traj` at the trajectory times inside `window`. When `disc = (t0, r)` is
/// given, samples with `|t - t0| >= r` are counted as out of radius.
pub fn compare(
    series_eval: impl Fn(f64) -> Vec<f64>,
    traj: &Trajectory,
    window: (f64, f64),
    disc: Option<(f64, f64)>,
) -> Result<ComparisonReport, OracleError> {
    let (a, b) = window;
    let mut samples = 0;
    let mut max_rel_error = 0.0f64;
    let mut worst_time = f64::NAN;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    let mut out_of_radius = 0;
    for (&t, x) in traj.times.iter().zip(&traj.states) {
        if t < a || t > b {
            continue;
        }
        samples += 1;
        if disc.is_some_and(|(c, r)| (t - c).abs() >= r) {
            out_of_radius += 1;
        }
        let s = series_eval(t);
        for (si, xi) in s.iter().zip(x) {
            let diff = (si - xi).abs();
            let rel = if diff == 0.0 { 0.0 } else { diff / xi.abs().max(f64::MIN_POSITIVE) };
            let rel = if rel.is_nan() { f64::INFINITY } else { rel };
            if rel > max_rel_error || worst_time.is_nan() {
                max_rel_error = max_rel_error.max(rel);
                worst_time = t;
            }
            sum_sq += rel * rel;
            count += 1;
        }
    }
    if samples == 0 {
        return Err(OracleError::EmptyWindow);
    }
    let rms_rel_error = if count == 0 { 0.0 } else { (sum_sq / count as f64).sqrt() };
    Ok(ComparisonReport { samples, max_rel_error, rms_rel_error, worst_time, out_of_radius })
}
