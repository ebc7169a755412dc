use super::{support, SeriesError};
use crate::frame::QuadraticFrame;

/// `σ v_M x_M` at `t0`.
fn rate(frame: &QuadraticFrame, x0: &[f64], t0: f64) -> (f64, f64) {
    let sigma = support(frame).indices.len() as f64;
    let v_max = frame.values_at(t0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let x_max = x0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (sigma * v_max * x_max, x_max)
}

/// `r̄ = 1 / (σ v_M x_M)`, infinite when `σ v_M = 0`.
pub fn convergence_bound(frame: &QuadraticFrame, x0: &[f64], t0: f64) -> f64 {
    let (r, _) = rate(frame, x0, t0);
    if r == 0.0 {
        f64::INFINITY
    } else {
        1.0 / r
    }
}

/// `x_M / (1 - σ v_M x_M |t - t0|)`, an upper bound on every `|x_i(t)|`
/// inside the convergence bound.
pub fn bound_envelope(frame: &QuadraticFrame, x0: &[f64], t0: f64, t: f64) -> Result<f64, SeriesError> {
    let (r, x_max) = rate(frame, x0, t0);
    let distance = (t - t0).abs();
    let radius = if r == 0.0 { f64::INFINITY } else { 1.0 / r };
    if distance >= radius {
        return Err(SeriesError::OutOfRadius { distance, radius });
    }
    Ok(x_max / (1.0 - r * distance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bound_is_the_true_radius() {
        let f = QuadraticFrame::from_constants(&[vec![2.0]]).unwrap();
        assert_eq!(convergence_bound(&f, &[-0.25], 0.0), 2.0);
        assert!((bound_envelope(&f, &[1.0], 0.0, 0.25).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_bound() {
        let f = QuadraticFrame::from_constants(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((convergence_bound(&f, &[3.0, 1.0], 0.0) - 1.0 / 3.0).abs() < 1e-15);
        let env = bound_envelope(&f, &[1.0, 1.0], 0.0, 0.5).unwrap();
        assert_eq!(env, 2.0);
        assert!(env >= 0.5f64.exp());
        assert!(matches!(bound_envelope(&f, &[1.0, 1.0], 0.0, -1.0), Err(SeriesError::OutOfRadius { .. })));
    }

    #[test]
    fn zero_frame_is_unbounded() {
        let f = QuadraticFrame::zeros(2);
        assert_eq!(convergence_bound(&f, &[1.0, 5.0], 0.0), f64::INFINITY);
        assert_eq!(bound_envelope(&f, &[1.0, 5.0], 0.0, 100.0).unwrap(), 5.0);
    }
}
