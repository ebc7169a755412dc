//! Generators and independent reference computations shared by the
//! integration tests. Nothing here calls into the series engine.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sigmapi::{Exponent, Monomial, QuadraticFrame, SigmaPiOde, Term, TimeJet, VectorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

pub fn read_testdata(name: &str) -> String {
    std::fs::read_to_string(testdata(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `|a - b| <= tol * max(|a|, |b|)`, with exact zeros comparing equal.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn random_stationary_frame(rng: &mut impl Rng, m: usize, lo: f64, hi: f64) -> QuadraticFrame {
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(lo..hi)).collect()).collect();
    QuadraticFrame::from_constants(&rows).unwrap()
}

/// Frame with some entries forced to zero, so that `𝒮` is a proper subset.
pub fn random_sparse_frame(rng: &mut impl Rng, m: usize) -> QuadraticFrame {
    let dead: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.3)).collect();
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..m).map(|j| if dead[j] || rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect())
        .collect();
    QuadraticFrame::from_constants(&rows).unwrap()
}

pub fn random_point(rng: &mut impl Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Exponents in `{-3, ..., 3} ∪ {±1/2, ±1/3}`.
pub fn random_exponent(rng: &mut impl Rng) -> Exponent {
    match rng.gen_range(0..11) {
        k @ 0..=6 => Exponent::integer(k - 3),
        7 => Exponent::rational(1, 2).unwrap(),
        8 => Exponent::rational(-1, 2).unwrap(),
        9 => Exponent::rational(1, 3).unwrap(),
        _ => Exponent::rational(-1, 3).unwrap(),
    }
}

pub fn random_monomial(rng: &mut impl Rng, n: usize) -> Monomial {
    (0..n).fold(Monomial::one(), |m, j| if rng.gen_bool(0.5) { m.with(j, random_exponent(rng)) } else { m })
}

/// Random σπ-ODE with `n <= n_max`, `ν_i <= nu_max` and at least one term.
/// Coefficients are polynomials of degree <= 2 with entries in `[-c, c]`.
pub fn random_sigma_pi(rng: &mut impl Rng, n_max: usize, nu_max: usize, c: f64) -> SigmaPiOde {
    loop {
        let n = rng.gen_range(1..=n_max);
        let equations: Vec<Vec<Term>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(0..=nu_max))
                    .map(|_| {
                        let deg = rng.gen_range(0..=2);
                        let coeffs = (0..=deg).map(|_| rng.gen_range(-c..c)).collect();
                        Term::new(TimeJet::poly(0.0, coeffs), random_monomial(rng, n))
                    })
                    .collect()
            })
            .collect();
        let ode = SigmaPiOde::new(n, equations).unwrap();
        if ode.total_terms() > 0 {
            return ode;
        }
    }
}

/// A generator exercising the full text syntax (rational, integer and
/// decimal exponents, all coefficient kinds, zero equations).
pub fn random_text_ode(rng: &mut impl Rng) -> SigmaPiOde {
    let n = rng.gen_range(1..=5);
    let number = |rng: &mut ChaCha8Rng| -> f64 {
        match rng.gen_range(0..4) {
            0 => rng.gen_range(-9..=9) as f64,
            1 => rng.gen_range(-1e3..1e3),
            2 => rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-20..20)),
            _ => rng.gen_range(0..8) as f64 / 4.0,
        }
    };
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let equations = (0..n)
        .map(|_| {
            let count = if inner.gen_bool(0.2) { 0 } else { inner.gen_range(1..=4) };
            (0..count)
                .map(|_| {
                    let coeff = match inner.gen_range(0..5) {
                        0 | 1 => TimeJet::constant(number(&mut inner)),
                        2 => {
                            let cs = (0..inner.gen_range(1..4)).map(|_| number(&mut inner)).collect();
                            TimeJet::poly(0.0, cs)
                        }
                        3 => {
                            let cs = (0..inner.gen_range(1..4)).map(|_| number(&mut inner)).collect();
                            TimeJet::poly(number(&mut inner), cs)
                        }
                        _ => {
                            let cs = (0..inner.gen_range(1..4)).map(|_| number(&mut inner)).collect();
                            TimeJet::truncated(if inner.gen_bool(0.5) { 0.0 } else { 0.5 }, cs)
                        }
                    };
                    let monomial = (0..n).fold(Monomial::one(), |m, j| {
                        if !inner.gen_bool(0.4) {
                            return m;
                        }
                        let p = match inner.gen_range(0..4) {
                            0 => Exponent::integer(inner.gen_range(-4..=4)),
                            1 => Exponent::rational(inner.gen_range(-7..=7), inner.gen_range(1..=6)).unwrap(),
                            2 => Exponent::real(inner.gen_range(-3.0..3.0)),
                            _ => Exponent::real(inner.gen_range(-12..=12) as f64 / 8.0 + 0.0625),
                        };
                        m.with(j, p)
                    });
                    Term::new(coeff, monomial)
                })
                .collect()
        })
        .collect();
    SigmaPiOde::new(n, equations).unwrap()
}

/// `c_k(root)` for `k = 0..=order` by summing the stationary recursion over
/// every ordered index string in `{0..m}^k`:
/// `v^{k+1}_{i,i_1..i_k} = v^k_{i,i_1..i_{k-1}} · Σ_{j<k} v_{i_j,i_k}`.
/// Also returns `Σ |term|` per order as a cancellation-aware scale.
pub fn ordered_string_coefficients(v: &[Vec<f64>], root: usize, x: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let m = v.len();
    let mut c = vec![0.0; order + 1];
    let mut scale = vec![0.0; order + 1];
    c[0] = x[root];
    scale[0] = x[root].abs();
    #[allow(clippy::too_many_arguments)]
    fn walk(
        v: &[Vec<f64>],
        m: usize,
        x: &[f64],
        string: &mut Vec<usize>,
        coeff: f64,
        product: f64,
        order: usize,
        c: &mut [f64],
        scale: &mut [f64],
    ) {
        let k = string.len() - 1;
        if k >= 1 {
            c[k] += coeff * product;
            scale[k] += (coeff * product).abs();
        }
        if k == order {
            return;
        }
        for next in 0..m {
            let factor: f64 = string.iter().map(|&a| v[a][next]).sum();
            string.push(next);
            walk(v, m, x, string, coeff * factor, product * x[next], order, c, scale);
            string.pop();
        }
    }
    let mut string = vec![root];
    walk(v, m, x, &mut string, 1.0, x[root], order, &mut c, &mut scale);
    (c, scale)
}

pub fn frame_rows(frame: &QuadraticFrame, t: f64) -> Vec<Vec<f64>> {
    let m = frame.dim();
    let flat = frame.values_at(t);
    flat.chunks(m).map(<[f64]>::to_vec).collect()
}

/// A closure-backed vector field for the reference integrator.
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64, &[f64]) -> Vec<f64>> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, sigmapi::DomainViolation> {
        Ok((self.f)(t, x))
    }

    fn kind(&self) -> &'static str {
        "closure"
    }
}
