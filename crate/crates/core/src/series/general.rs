use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_inputs, factorial, support, tail_product, IndexMultiset, SeriesError, SeriesSolution};
use crate::frame::QuadraticFrame;
use crate::jet::TimeJet;

/// Dense coefficients in `τ = t - t0`; empty means identically zero.
type Poly = Vec<f64>;
/// Tail multiset (counts over `𝒮`) to normalized layer coefficient.
type Layer = BTreeMap<Vec<u16>, Poly>;

/// Frame restricted to the support columns, expanded at `t0`.
pub(super) struct Prepared {
    pub(super) support: Vec<usize>,
    /// `v[i][a]` is `v_{i, support[a]}` as a polynomial in `τ`.
    pub(super) v: Vec<Vec<Poly>>,
}

fn trimmed(mut p: Poly) -> Poly {
    while p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

/// Frame entries are needed through `τ^{order-1}`.
pub(super) fn prepare(frame: &QuadraticFrame, t0: f64, order: usize) -> Result<Prepared, SeriesError> {
    let support = support(frame).indices;
    let needed = order.saturating_sub(1);
    let mut v = Vec::with_capacity(frame.dim());
    for i in 0..frame.dim() {
        let mut row = Vec::with_capacity(support.len());
        for &j in &support {
            let jet = frame.get(i, j);
            if jet.is_zero() || order == 0 {
                row.push(Poly::new());
                continue;
            }
            let budget = || SeriesError::OrderBudget {
                row: i,
                col: j,
                needed,
                available: jet.order(),
                center: jet.center(),
                t0,
            };
            let local = jet.shifted(t0).ok_or_else(budget)?;
            if !local.is_exact() && local.order() < needed {
                return Err(budget());
            }
            row.push(trimmed(local.coeffs().iter().take(needed + 1).copied().collect()));
        }
        v.push(row);
    }
    Ok(Prepared { support, v })
}

fn add_into(acc: &mut Poly, p: &[f64]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(p) {
        *a += b;
    }
}

fn mul_trunc(a: &[f64], b: &[f64], len: usize) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Poly::new();
    }
    let n = (a.len() + b.len() - 1).min(len);
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn derivative_trunc(p: &[f64], len: usize) -> Poly {
    p.iter().enumerate().skip(1).take(len).map(|(k, &c)| c * k as f64).collect()
}

/// `γ(m, j) = v_{root,j} + Σ_a m_a v_{support[a], j}` truncated to `len`.
fn gamma(p: &Prepared, root: usize, key: &[u16], b: usize, len: usize) -> Poly {
    let mut g: Poly = p.v[root][b].iter().take(len).copied().collect();
    for (a, &count) in key.iter().enumerate() {
        let row = &p.v[p.support[a]][b];
        if count == 0 || row.is_empty() {
            continue;
        }
        let scaled: Poly = row.iter().take(len).map(|c| c * f64::from(count)).collect();
        add_into(&mut g, &scaled);
    }
    trimmed(g)
}

/// Normalized layers `u^{k+1,s} = v^{k+1,s} / k!` for `k = 1..=order`, one
/// entry per `s = 2..=k+1`. Calls `visit(k, layers)` for every `k`.
fn run_root(p: &Prepared, root: usize, order: usize, mut visit: impl FnMut(usize, &[Layer])) {
    if order == 0 {
        return;
    }
    let sigma = p.support.len();
    let mut first = Layer::new();
    for (b, poly) in p.v[root].iter().enumerate() {
        if !poly.is_empty() {
            let mut key = vec![0u16; sigma];
            key[b] = 1;
            first.insert(key, poly.iter().take(order).copied().collect());
        }
    }
    let mut current = vec![first];
    for k in 1..=order {
        visit(k, &current);
        if k == order {
            break;
        }
        // Layers at step k + 1 are needed through τ^{order - k - 1}.
        let len = order - k;
        let mut next: Vec<Layer> = vec![Layer::new(); current.len() + 1];
        for (s, layer) in current.iter().enumerate() {
            for (key, poly) in layer {
                let d = derivative_trunc(poly, len);
                if d.iter().any(|&c| c != 0.0) {
                    add_into(next[s].entry(key.clone()).or_default(), &d);
                }
                for b in 0..sigma {
                    let g = gamma(p, root, key, b, len);
                    if g.is_empty() {
                        continue;
                    }
                    let product = mul_trunc(poly, &g, len);
                    let mut grown = key.clone();
                    grown[b] += 1;
                    add_into(next[s + 1].entry(grown).or_default(), &product);
                }
            }
        }
        let scale = 1.0 / (k + 1) as f64;
        for layer in &mut next {
            layer.retain(|_, poly| {
                poly.iter_mut().for_each(|c| *c *= scale);
                *poly = trimmed(std::mem::take(poly));
                !poly.is_empty()
            });
        }
        current = next;
    }
}

fn root_coefficients(p: &Prepared, root: usize, x0: &[f64], order: usize) -> Vec<f64> {
    let mut a = vec![0.0; order + 1];
    a[0] = x0[root];
    run_root(p, root, order, |k, layers| {
        let sum: f64 = layers
            .iter()
            .flat_map(|layer| layer.iter())
            .map(|(key, poly)| poly[0] * tail_product(x0, &p.support, key))
            .sum();
        a[k] = x0[root] * sum;
    });
    a
}

/// Taylor coefficients of the requested components (all when `components`
/// is empty) from the general, time-dependent recursion.
///
/// Frame entries are re-expanded at `t0`. Exact polynomials can move freely;
/// a truncated jet must already be centered at `t0` and carry at least
/// `order - 1` derivatives.
pub fn taylor_general(
    frame: &QuadraticFrame,
    x0: &[f64],
    t0: f64,
    order: usize,
    components: &[usize],
) -> Result<SeriesSolution, SeriesError> {
    let components = check_inputs(frame, x0, order, components)?;
    let p = prepare(frame, t0, order)?;
    let coeffs = components.par_iter().map(|&i| root_coefficients(&p, i, x0, order)).collect();
    Ok(SeriesSolution::new(frame, x0, t0, order, components, coeffs))
}

/// Aggregated recursion coefficients `v^{k,s}_{i,·}` of one root, as jets
/// in `t - t0` accurate through the degree still needed at that layer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientTensor {
    pub root: usize,
    pub t0: f64,
    pub order: usize,
    pub support: Vec<usize>,
    layers: BTreeMap<(usize, usize), BTreeMap<IndexMultiset, TimeJet>>,
}

impl CoefficientTensor {
    /// `v^{k,s}`; `None` when no coefficient of the layer is nonzero.
    pub fn layer(&self, k: usize, s: usize) -> Option<&BTreeMap<IndexMultiset, TimeJet>> {
        self.layers.get(&(k, s))
    }

    /// Nonempty layers keyed by `(k, s)`.
    pub fn layers(&self) -> impl Iterator<Item = (&(usize, usize), &BTreeMap<IndexMultiset, TimeJet>)> {
        self.layers.iter()
    }

    /// Single aggregated coefficient, zero when absent.
    pub fn get(&self, k: usize, s: usize, tail: &IndexMultiset) -> f64 {
        self.layer(k, s).and_then(|l| l.get(tail)).map_or(0.0, |j| j.coeffs()[0])
    }
}

/// All layers `(k, s)` with `2 <= s <= k <= order + 1` of the recursion for
/// `root`.
pub fn coefficient_tensor(
    frame: &QuadraticFrame,
    root: usize,
    t0: f64,
    order: usize,
) -> Result<CoefficientTensor, SeriesError> {
    if root >= frame.dim() {
        return Err(SeriesError::ComponentOutOfRange { index: root, dim: frame.dim() });
    }
    if order > super::MAX_ORDER {
        return Err(SeriesError::OrderTooLarge { order });
    }
    let p = prepare(frame, t0, order)?;
    let mut layers = BTreeMap::new();
    run_root(&p, root, order, |k, current| {
        let scale = factorial(k);
        let accurate = order - k + 1;
        for (s_off, layer) in current.iter().enumerate() {
            if layer.is_empty() {
                continue;
            }
            let entries = layer
                .iter()
                .map(|(key, poly)| {
                    let mut c: Vec<f64> = poly.iter().map(|x| x * scale).collect();
                    c.resize(accurate, 0.0);
                    (IndexMultiset::from_counts(&p.support, key), TimeJet::truncated(t0, c))
                })
                .collect();
            layers.insert((k + 1, s_off + 2), entries);
        }
    });
    Ok(CoefficientTensor { root, t0, order, support: p.support, layers })
}
