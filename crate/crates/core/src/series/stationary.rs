use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{check_inputs, support, tail_product, SeriesError, SeriesSolution};
use crate::frame::QuadraticFrame;

/// Single-layer recursion for constant frames:
/// `u^{k+1}(m ∪ {j}) += u^k(m) · γ(m, j) / k` with
/// `γ(m, j) = Σ_{l ∈ ρ(j) ∪ {i}} α^l v_{l,j}`.
fn root_coefficients(
    v: &[f64],
    m: usize,
    sup: &[usize],
    rho: &[Vec<usize>],
    root: usize,
    x0: &[f64],
    order: usize,
) -> Vec<f64> {
    let mut a = vec![0.0; order + 1];
    a[0] = x0[root];
    let sigma = sup.len();
    // ρ(j) as positions inside 𝒮.
    let rho_pos: Vec<Vec<usize>> =
        sup.iter().map(|&j| rho[j].iter().map(|l| sup.binary_search(l).expect("ρ ⊂ 𝒮")).collect()).collect();
    let mut layer: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
    layer.insert(vec![0; sigma], 1.0);
    for k in 1..=order {
        let mut next: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
        for (key, &u) in &layer {
            for (b, &j) in sup.iter().enumerate() {
                let mut gamma = v[root * m + j];
                for &a in &rho_pos[b] {
                    gamma += f64::from(key[a]) * v[sup[a] * m + j];
                }
                if gamma == 0.0 {
                    continue;
                }
                let mut grown = key.clone();
                grown[b] += 1;
                *next.entry(grown).or_insert(0.0) += u * gamma;
            }
        }
        let scale = 1.0 / k as f64;
        next.retain(|_, u| {
            *u *= scale;
            *u != 0.0
        });
        layer = next;
        let sum: f64 = layer.iter().map(|(key, &u)| u * tail_product(x0, sup, key)).sum();
        a[k] = x0[root] * sum;
    }
    a
}

/// Taylor coefficients for a frame whose entries are all constant. Agrees
/// with [`super::taylor_general`] on such frames.
pub fn taylor_stationary(
    frame: &QuadraticFrame,
    x0: &[f64],
    t0: f64,
    order: usize,
    components: &[usize],
) -> Result<SeriesSolution, SeriesError> {
    if !frame.is_stationary() {
        return Err(SeriesError::NotStationary);
    }
    let components = check_inputs(frame, x0, order, components)?;
    let s = support(frame);
    let v = frame.values_at(t0);
    let m = frame.dim();
    let coeffs = components.par_iter().map(|&i| root_coefficients(&v, m, &s.indices, &s.rho, i, x0, order)).collect();
    Ok(SeriesSolution::new(frame, x0, t0, order, components, coeffs))
}
