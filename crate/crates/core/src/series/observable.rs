use serde::Serialize;

use super::{horner, SeriesError, SeriesSolution};

/// A truncated scalar series `Σ a_k (t - t0)^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarSeries {
    pub t0: f64,
    /// `a_k = g^{(k)}(t0) / k!`.
    pub coeffs: Vec<f64>,
}

impl ScalarSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        horner(&self.coeffs, t - self.t0)
    }
}

fn cauchy(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// `1 / a`; requires `a_0 != 0`.
fn reciprocal(a: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; a.len()];
    r[0] = 1.0 / a[0];
    for k in 1..a.len() {
        let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
        r[k] = -s * r[0];
    }
    r
}

fn power(a: &[f64], q: i32) -> Vec<f64> {
    let base = if q < 0 { reciprocal(a) } else { a.to_vec() };
    let mut out = vec![0.0; a.len()];
    out[0] = 1.0;
    let mut e = q.unsigned_abs();
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            out = cauchy(&out, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = cauchy(&sq, &sq);
        }
    }
    out
}

/// Series of the monomial `Π x_c^{q_c}`, where `c` runs over the components
/// of `parts` in order. Truncated at the smallest order among the parts.
///
/// Non-integer exponents are handled by adding the monomial as a fictitious
/// term before quadratizing instead.
pub fn observable_series(parts: &[&SeriesSolution], q: &[i32]) -> Result<ScalarSeries, SeriesError> {
    let total: usize = parts.iter().map(|p| p.components().len()).sum();
    if q.len() != total {
        return Err(SeriesError::DimensionMismatch { expected: total, found: q.len() });
    }
    let t0 = parts.first().map_or(0.0, |p| p.t0());
    if let Some(p) = parts.iter().find(|p| p.t0() != t0) {
        return Err(SeriesError::MixedCenters { a: t0, b: p.t0() });
    }
    let order = parts.iter().map(|p| p.order()).min().unwrap_or(0);
    let mut acc = vec![0.0; order + 1];
    acc[0] = 1.0;
    let columns = parts.iter().flat_map(|p| p.normalized().iter());
    for (a, &qc) in columns.zip(q) {
        if qc != 0 {
            acc = cauchy(&acc, &power(&a[..=order], qc));
        }
    }
    Ok(ScalarSeries { t0, coeffs: acc })
}
