//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use sigmapi::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail}; {:.1} ms", took.as_secs_f64() * 1e3))
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn exponential() -> Outcome {
    timed(Duration::from_millis(100), || {
        let frame = QuadraticFrame::from_constants(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let s = taylor_stationary(&frame, &[1.0, 1.0], 0.0, 20, &[0]).map_err(|e| e.to_string())?;
        for k in 0..=20 {
            let c = s.derivative(0, k);
            ensure(rel(c, 1.0) <= 1e-12, || format!("c_{k} = {c}"))?;
        }
        let e = s.evaluate(1.0).values[0];
        ensure((e - std::f64::consts::E).abs() <= 1e-9, || format!("x(1) = {e}"))?;
        Ok(format!("c_k = 1 for k <= 20, x(1) - e = {:.1e}", e - std::f64::consts::E))
    })
}

fn non_stationary() -> Outcome {
    timed(Duration::from_millis(100), || {
        let x = 1.7;
        let frame = QuadraticFrame::from_rows(vec![
            vec![TimeJet::zero(), TimeJet::poly(0.0, vec![0.0, 2.0])],
            vec![TimeJet::zero(), TimeJet::zero()],
        ])
        .unwrap();
        let s = taylor_general(&frame, &[x, 1.0], 0.0, 8, &[0]).map_err(|e| e.to_string())?;
        let want = [1.0, 0.0, 2.0, 0.0, 12.0, 0.0, 120.0, 0.0, 1680.0];
        for (k, w) in want.iter().enumerate() {
            let c = s.derivative(0, k);
            ensure((c - w * x).abs() <= 1e-10 * (w * x).abs(), || format!("c_{k} = {c}, want {}", w * x))?;
        }
        ensure(s.derivative(0, 1) == 0.0, || "c_1 != 0".into())?;
        ensure(s.derivative(0, 2) == 2.0 * x, || "c_2 != 2x".into())?;
        ensure(s.derivative(0, 3) == 0.0, || "c_3 != 0".into())?;
        ensure(s.derivative(0, 4) == 12.0 * x, || "c_4 != 12x".into())?;
        Ok("c = (1,0,2,0,12,0,120,0,1680) x".into())
    })
}

fn quadratic() -> Outcome {
    let (a, x) = (1.3, 0.6);
    let frame = QuadraticFrame::from_constants(&[vec![a]]).unwrap();
    let s = taylor_stationary(&frame, &[x], 0.0, 15, &[]).map_err(|e| e.to_string())?;
    for k in 0..=15 {
        let want = sigmapi::series::factorial(k) * a.powi(k as i32) * x.powi(k as i32 + 1);
        let c = s.derivative(0, k);
        ensure(rel(c, want) <= 1e-9, || format!("c_{k} = {c}, want {want}"))?;
    }
    let bound = convergence_bound(&frame, &[x], 0.0);
    ensure(bound == 1.0 / (a * x), || format!("r̄ = {bound}"))?;
    let unit = QuadraticFrame::from_constants(&[vec![1.0]]).unwrap();
    let run = continue_to(&unit, &[-2.0], 0.0, 2.0, 30, ContinuationPolicy::default()).map_err(|e| e.to_string())?;
    let v = run.value[0];
    ensure((v + 0.4).abs() <= 1e-8, || format!("x(2) = {v}"))?;
    ensure(run.path.len() > 1, || "no re-centering happened".into())?;
    let pole = continue_to(&unit, &[1.0], 0.0, 1.0, 30, ContinuationPolicy { max_steps: 200, ..Default::default() });
    ensure(matches!(pole, Err(SeriesError::Divergence { .. } | SeriesError::StepLimit { .. })), || {
        format!("continuation into the pole returned {pole:?}")
    })?;
    Ok(format!("c_k = k! a^k x^(k+1) for k <= 15, x(2) = {v:.12} after {} centers", run.path.len()))
}

fn airy() -> Outcome {
    timed(Duration::from_secs(1), || {
        let ode = parse_ode(&read_testdata("airy.spode")).map_err(|e| e.to_string())?;
        let q = quadratize_inclusive(&ode);
        let perm = q.identity_first_permutation();
        let frame = driver_frame(&q).permuted(&perm);
        let expected = parse_frame(&read_testdata("airy.frame")).unwrap();
        ensure(frame == expected, || format!("frame differs:\n{}", serialize_frame(&frame)))?;
        // The printed matrix has row 3 = (0, 1, -t, 0). Every other entry must
        // agree with it exactly.
        let printed = parse_frame("0 0 poly(0,1) 0\n0 0 0 1\n0 1 poly(0,-1) 0\n0 0 poly(0,1) -1").unwrap();
        for i in [0, 1, 3] {
            for j in 0..4 {
                ensure(frame.get(i, j) == printed.get(i, j), || format!("entry ({}, {}) differs", i + 1, j + 1))?;
            }
        }
        let (p1, p2) = (0.7, -1.3);
        let z = phi_eval(&q, &[p2, p1]).map_err(|e| e.to_string())?;
        let z0: Vec<f64> = perm.iter().map(|&k| z[k]).collect();
        let s = taylor_general(&frame, &z0, 0.0, 12, &[1]).map_err(|e| e.to_string())?;
        let c: Vec<f64> = (0..4).map(|k| s.derivative(0, k)).collect();
        let want = [p1, p2, 0.0, p1];
        for k in 0..4 {
            ensure((c[k] - want[k]).abs() <= 1e-12 * want[k].abs().max(1.0), || format!("c_{k} = {}", c[k]))?;
        }
        let mut a = vec![p1, p2, 0.0];
        for k in 0..=9 {
            a.push(a[k] / ((k + 2) * (k + 3)) as f64);
        }
        for (k, w) in a.iter().enumerate() {
            let got = s.coefficient(0, k);
            ensure((got - w).abs() <= 1e-12 * w.abs().max(1e-3), || format!("a_{k} = {got}, want {w}"))?;
        }
        Ok("frame entry-for-entry, row 3 = (0, 0, -t, 1) as implied by Ż_11 = (-t Z_11 + Z_21) Z_11 \
            [the printed row (0, 1, -t, 0) contradicts it]; a_k match y'' = t y to K = 12"
            .into())
    })
}

fn oracle_equivalence() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut r = rng(5);
        let mut worst = 0.0f64;
        for n in 0..20 {
            let m = r.gen_range(1..=3);
            let frame = random_stationary_frame(&mut r, m, -1.0, 1.0);
            let x = random_point(&mut r, m, 0.2, 1.0);
            let s = taylor_stationary(&frame, &x, 0.0, 25, &[]).map_err(|e| e.to_string())?;
            let half = s.radius_bound() / 2.0;
            let traj = rk4_window(&frame, &x, 0.0, -half, half, 1e-4).map_err(|e| e.to_string())?;
            let report = compare(|t| s.evaluate(t).values, &traj, (-half, half), None).map_err(|e| e.to_string())?;
            ensure(report.max_rel_error <= 1e-6, || format!("instance {n}: {report:?}"))?;
            worst = worst.max(report.max_rel_error);
        }
        Ok(format!("20 frames, worst relative deviation {worst:.1e}"))
    })
}

fn relatedness() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for n in 0..20 {
        let ode = random_sigma_pi(&mut r, 4, 3, 1.0);
        let x = random_point(&mut r, ode.n(), 0.5, 1.5);
        let t = r.gen_range(-0.5..0.5);
        let q = quadratize_canonical(&ode).map_err(|e| e.to_string())?;
        let z = phi_eval(&q, &x).map_err(|e| e.to_string())?;
        let rhs = q.driver_rhs(t, &z);
        let v = ode.rhs(t, &x).map_err(|e| e.to_string())?;
        let diff = |h: f64| -> Result<Vec<f64>, String> {
            let fwd = rk4(&ode, &x, t, t + h, h).map_err(|e| e.to_string())?;
            let bwd = rk4(&ode, &x, t, t - h, h).map_err(|e| e.to_string())?;
            let p = phi_eval(&q, fwd.last()).map_err(|e| e.to_string())?;
            let m = phi_eval(&q, &bwd.states[0]).map_err(|e| e.to_string())?;
            Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let (d1, d2) = (diff(2e-4)?, diff(1e-4)?);
        for s in 0..q.driver_dim() {
            let fd = (4.0 * d2[s] - d1[s]) / 3.0;
            let scale: f64 = (0..ode.n()).map(|j| (q.pi(s)[j] * v[j] / x[j]).abs()).sum::<f64>() * z[s].abs();
            let err = (fd - rhs[s]).abs() / scale.max(f64::MIN_POSITIVE);
            let err = if fd == rhs[s] { 0.0 } else { err };
            ensure(err <= 1e-6, || format!("ODE {n}, coordinate {s}: {fd} vs {}", rhs[s]))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("20 ODEs, worst relative mismatch {worst:.1e}"))
}

fn ordered_strings() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for n in 0..10 {
        let m = r.gen_range(1..=3);
        let order = r.gen_range(3..=6);
        let frame = random_stationary_frame(&mut r, m, -1.0, 1.0);
        let x = random_point(&mut r, m, 0.2, 1.0);
        let rows = frame_rows(&frame, 0.0);
        let s = taylor_stationary(&frame, &x, 0.0, order, &[]).map_err(|e| e.to_string())?;
        for root in 0..m {
            let (c, scale) = ordered_string_coefficients(&rows, root, &x, order);
            for k in 0..=order {
                let err = (s.derivative(root, k) - c[k]).abs() / scale[k].max(f64::MIN_POSITIVE);
                ensure(err <= 1e-12, || format!("frame {n}, root {root}, k {k}: {err:.1e}"))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("10 frames, worst relative mismatch {worst:.1e}"))
}

fn support_theorem() -> Outcome {
    let mut r = rng(81);
    let mut keys = 0;
    for _ in 0..20 {
        let m = r.gen_range(2..=5);
        let frame = random_sparse_frame(&mut r, m);
        let sup = support(&frame);
        for root in 0..m {
            let t = coefficient_tensor(&frame, root, 0.0, 5).map_err(|e| e.to_string())?;
            for (_, layer) in t.layers() {
                for key in layer.keys() {
                    keys += 1;
                    ensure(key.iter().all(|j| sup.indices.contains(&j)), || format!("key {key} leaves 𝒮"))?;
                }
            }
        }
    }
    Ok(format!("{keys} stored keys, all inside 𝒮"))
}

fn stationary_vanishing() -> Outcome {
    let mut r = rng(82);
    for _ in 0..20 {
        let m = r.gen_range(1..=4);
        let frame = random_stationary_frame(&mut r, m, -1.0, 1.0);
        let t = coefficient_tensor(&frame, r.gen_range(0..m), 0.0, 7).map_err(|e| e.to_string())?;
        let bad = t.layers().map(|(&key, _)| key).find(|&(k, s)| k > s);
        if let Some((k, s)) = bad {
            return Err(format!("layer ({k}, {s}) is not empty"));
        }
    }
    Ok("no layer with k > s on 20 constant frames".into())
}

fn driver_structure() -> Outcome {
    let mut r = rng(83);
    for _ in 0..20 {
        let m = r.gen_range(1..=4);
        let rows = (0..m)
            .map(|_| (0..m).map(|_| TimeJet::poly(0.0, vec![r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)])).collect())
            .collect();
        let frame = QuadraticFrame::from_rows(rows).unwrap();
        let q = quadratize_canonical(&frame.to_sigma_pi()).map_err(|e| e.to_string())?;
        for s in 0..q.driver_dim() {
            let l = q.slots()[s].term;
            let ok = (0..m).all(|j| q.pi(s)[j] == f64::from(u8::from(j == l)));
            ensure(ok, || format!("π row {s} = {:?}", q.pi(s)))?;
        }
    }
    Ok("π^l_{i,j} = δ_{j,l} on 20 Driver-type systems".into())
}

fn inverse_product() -> Outcome {
    let mut r = rng(84);
    let mut worst = 0.0f64;
    for n in 0..20 {
        let ode = random_sigma_pi(&mut r, 3, 2, 0.5);
        let x = random_point(&mut r, ode.n(), 0.7, 1.3);
        let q = inverse_driver(&ode);
        let frame = driver_frame(&q);
        let z0 = phi_eval(&q, &x).map_err(|e| e.to_string())?;
        let w0: Vec<f64> = z0.iter().map(|z| 1.0 / z).collect();
        let end = (0.5 * convergence_bound(&frame, &z0, 0.0)).min(0.2);
        let h = end / 200.0;
        let z = rk4(&frame, &z0, 0.0, end, h).map_err(|e| e.to_string())?;
        let w = rk4(&q.inverse_ode(), &w0, 0.0, end, h).map_err(|e| e.to_string())?;
        for (zs, ws) in z.states.iter().zip(&w.states) {
            for (a, b) in zs.iter().zip(ws) {
                let err = (a * b - 1.0).abs();
                ensure(err < 1e-8, || format!("ODE {n}: Z W = {}", a * b))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("20 systems, max |Z W - 1| = {worst:.1e}"))
}

fn envelope() -> Outcome {
    let mut r = rng(85);
    for n in 0..50 {
        let m = r.gen_range(1..=3);
        let frame = random_stationary_frame(&mut r, m, -1.0, 1.0);
        let x = random_point(&mut r, m, 0.2, 1.0);
        let rbar = convergence_bound(&frame, &x, 0.0);
        let t = r.gen_range(0.0..0.9) * rbar;
        let env = bound_envelope(&frame, &x, 0.0, t).map_err(|e| e.to_string())?;
        let s = taylor_stationary(&frame, &x, 0.0, 25, &[]).map_err(|e| e.to_string())?;
        let traj = rk4(&frame, &x, 0.0, t, 1e-3).map_err(|e| e.to_string())?;
        for v in s.evaluate(t).values.iter().chain(traj.last()) {
            ensure(v.abs() <= env * (1.0 + 1e-12), || format!("pair {n}: |x| = {} above envelope {env}", v.abs()))?;
        }
    }
    Ok("50 (instance, t) pairs inside the envelope".into())
}

fn singular_decomposition() -> Outcome {
    let read = |name: &str| parse_ode(&read_testdata(name)).map_err(|e| format!("{name}: {e}"));
    let sys = read("exdomsp.spode")?;
    let report = structure(&sys);
    ensure(report.criticality == [1] && report.singularity == [1], || format!("{report:?}"))?;
    let p = project(&sys, &BTreeSet::from([1])).map_err(|e| e.to_string())?;
    ensure(p.ode == read("exsingpart.spode")?, || format!("projected:\n{}", serialize_ode(&p.ode)))?;
    let variant = structure(&read("exdomsp_variant.spode")?);
    ensure(variant.singularity.is_empty(), || format!("{variant:?}"))?;
    Ok("ℐ* = ℐ_s = {2}, projection matches; variant has ℐ_s = ∅".into())
}

fn parser() -> Outcome {
    let mut r = rng(10);
    for n in 0..200 {
        let ode = random_text_ode(&mut r);
        let text = serialize_ode(&ode);
        let back = parse_ode(&text).map_err(|e| format!("case {n}: {e}\n{text}"))?;
        ensure(back == ode, || format!("case {n} changed:\n{text}"))?;
    }
    let mut files = 0;
    for entry in std::fs::read_dir(testdata("")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let again = match path.extension().and_then(|e| e.to_str()) {
            Some("spode") => serialize_ode(&parse_ode(&text).map_err(|e| format!("{path:?}: {e}"))?),
            Some("frame") => serialize_frame(&parse_frame(&text).map_err(|e| format!("{path:?}: {e}"))?),
            _ => continue,
        };
        ensure(again == text, || format!("{path:?} is not canonical"))?;
        files += 1;
    }
    Ok(format!("200 round trips, {files} example files canonical"))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("1 exponential example", exponential),
        ("2 non-stationary example", non_stationary),
        ("3 quadratic example", quadratic),
        ("4 Airy", airy),
        ("5 oracle equivalence", oracle_equivalence),
        ("6 relatedness", relatedness),
        ("7 ordered-string oracle", ordered_strings),
        ("8a support theorem", support_theorem),
        ("8b stationary vanishing", stationary_vanishing),
        ("8c Driver-type structure", driver_structure),
        ("8d inverse driver", inverse_product),
        ("8e envelope", envelope),
        ("9 singular decomposition", singular_decomposition),
        ("10 parser", parser),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
