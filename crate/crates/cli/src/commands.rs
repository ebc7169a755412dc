//! The five subcommands. Each returns a report; printing is left to the caller.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sigmapi::{
    analyze_domain, compare, continue_to, decompose_global, driver_frame, inverse_driver, parse_frame, parse_ode,
    phi_eval, quadratize_canonical, quadratize_inclusive, rk4_window, serialize_frame, serialize_ode, structure,
    taylor_general, taylor_stationary, ContinuationPolicy, DomainClass, QuadraticFrame, Quadratization, SeriesSolution,
    SigmaPiOde,
};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{csv_field, csv_line, index_list, num, one_based, Report};

pub enum Input {
    Ode(SigmaPiOde),
    Frame(QuadraticFrame),
}

impl Input {
    /// `.frame` files are frames; everything else is read as a σπ-ODE.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let parse_err = |source| CliError::Parse { path: path.to_path_buf(), source };
        if path.extension().is_some_and(|e| e == "frame") {
            parse_frame(&text).map(Input::Frame).map_err(parse_err)
        } else {
            parse_ode(&text).map(Input::Ode).map_err(parse_err)
        }
    }

    fn into_ode(self) -> SigmaPiOde {
        match self {
            Input::Ode(ode) => ode,
            Input::Frame(frame) => frame.to_sigma_pi(),
        }
    }
}

/// What the series commands expand: a Driver-type frame, its initial point,
/// and which of its coordinates are the user's state.
struct Expansion {
    frame: QuadraticFrame,
    z0: Vec<f64>,
    /// Frame coordinates holding the user's state, in user order.
    state: Vec<usize>,
    /// Dimension of the Driver when the input was a σπ-ODE.
    driver_dim: Option<usize>,
}

impl Expansion {
    fn new(input: Input, x0: &[f64]) -> Result<Self, CliError> {
        match input {
            Input::Frame(frame) => {
                check_len(x0, frame.dim())?;
                let state = (0..frame.dim()).collect();
                Ok(Self { frame, z0: x0.to_vec(), state, driver_dim: None })
            }
            Input::Ode(ode) => {
                check_len(x0, ode.n())?;
                // With identity coordinates moved to the front, coordinate i
                // of the Driver is x_i itself.
                let q = quadratize_inclusive(&ode);
                let perm = q.identity_first_permutation();
                let z = phi_eval(&q, x0)?;
                let z0 = perm.iter().map(|&k| z[k]).collect();
                let frame = driver_frame(&q).permuted(&perm);
                Ok(Self { driver_dim: Some(frame.dim()), frame, z0, state: (0..ode.n()).collect() })
            }
        }
    }

    fn series(&self, t0: f64, order: usize, components: &[usize]) -> Result<SeriesSolution, CliError> {
        let picked: Vec<usize> = if components.is_empty() {
            self.state.clone()
        } else {
            components
                .iter()
                .map(|&c| {
                    self.state.get(c).copied().ok_or_else(|| {
                        CliError::input(format!("component {} out of range 1..={}", c + 1, self.state.len()))
                    })
                })
                .collect::<Result<_, _>>()?
        };
        let s = if self.frame.is_stationary() {
            taylor_stationary(&self.frame, &self.z0, t0, order, &picked)?
        } else {
            taylor_general(&self.frame, &self.z0, t0, order, &picked)?
        };
        Ok(s)
    }
}

fn check_len(x0: &[f64], n: usize) -> Result<(), CliError> {
    if x0.len() == n {
        Ok(())
    } else {
        Err(CliError::input(format!("x0 has {} components, the system has {n}", x0.len())))
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
pub struct DomainReport {
    classes: Vec<DomainClass>,
    defined: Vec<DomainClass>,
    macro_orthant: Vec<usize>,
    removed_hyperplanes: Vec<usize>,
}

#[derive(Serialize)]
pub struct StageReport {
    indices: Vec<usize>,
    dropped: Vec<usize>,
    regular: bool,
    zero_system: bool,
    ode: String,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    dimension: usize,
    domain: DomainReport,
    criticality: Vec<usize>,
    singularity: Vec<usize>,
    nonsingular_criticality: Vec<usize>,
    decomposition: Vec<StageReport>,
}

pub fn analyze(cfg: &RunConfig) -> Result<AnalyzeReport, CliError> {
    let ode = Input::load(cfg.input()?)?.into_ode();
    let d = analyze_domain(&ode);
    let r = structure(&ode);
    let decomposition = decompose_global(&ode)
        .into_iter()
        .map(|st| StageReport {
            indices: one_based(&st.indices),
            dropped: one_based(&st.dropped),
            regular: st.report.is_regular(),
            zero_system: st.zero_system,
            ode: serialize_ode(&st.ode),
        })
        .collect();
    Ok(AnalyzeReport {
        dimension: ode.n(),
        domain: DomainReport {
            classes: d.classes,
            defined: d.defined,
            macro_orthant: one_based(&d.macro_orthant),
            removed_hyperplanes: one_based(&d.removed_hyperplanes),
        },
        criticality: one_based(&r.criticality),
        singularity: one_based(&r.singularity),
        nonsingular_criticality: one_based(&r.nonsingular_criticality),
        decomposition,
    })
}

fn class_name(c: DomainClass) -> &'static str {
    match c {
        DomainClass::Unrestricted => "unrestricted",
        DomainClass::ClosedPositive => "closed-positive",
        DomainClass::OpenPositive => "open-positive",
        DomainClass::Nonzero => "nonzero",
    }
}

impl Report for AnalyzeReport {
    fn csv(&self) -> String {
        let mut out = csv_line(["index", "class", "defined", "critical", "singular"].map(String::from));
        for i in 0..self.dimension {
            out += &csv_line([
                (i + 1).to_string(),
                class_name(self.domain.classes[i]).into(),
                class_name(self.domain.defined[i]).into(),
                self.criticality.contains(&(i + 1)).to_string(),
                self.singularity.contains(&(i + 1)).to_string(),
            ]);
        }
        out
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dimension: {}", self.dimension);
        for (i, (c, d)) in self.domain.classes.iter().zip(&self.domain.defined).enumerate() {
            let _ = writeln!(s, "  x{}: {} (defined: {})", i + 1, class_name(*c), class_name(*d));
        }
        let _ = writeln!(s, "macro-orthant: {}", index_list(&self.domain.macro_orthant));
        let _ = writeln!(s, "removed hyperplanes: {}", index_list(&self.domain.removed_hyperplanes));
        let _ = writeln!(s, "criticality: {}", index_list(&self.criticality));
        let _ = writeln!(s, "singularity: {}", index_list(&self.singularity));
        let _ = writeln!(s, "non-singular criticality: {}", index_list(&self.nonsingular_criticality));
        for (k, st) in self.decomposition.iter().enumerate() {
            let kind = if st.zero_system {
                "zero system"
            } else if st.regular {
                "regular"
            } else {
                "singular"
            };
            let _ = writeln!(s, "stage {} on {} ({kind}):", k + 1, index_list(&st.indices));
            for line in st.ode.lines() {
                let _ = writeln!(s, "  {line}");
            }
            if !st.dropped.is_empty() {
                let _ = writeln!(s, "  drops {}", index_list(&st.dropped));
            }
        }
        s
    }
}

// ------------------------------------------------------------- quadratize

#[derive(Serialize)]
pub struct Coordinate {
    index: usize,
    equation: usize,
    term: usize,
    phi: String,
    pi: Vec<f64>,
    /// Original coordinate this Driver coordinate equals, if any.
    identity_of: Option<usize>,
}

#[derive(Serialize)]
pub struct QuadratizeReport {
    mode: Mode,
    source_dimension: usize,
    dimension: usize,
    identity_first: bool,
    coordinates: Vec<Coordinate>,
    frame: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverse_ode: Option<String>,
}

pub fn quadratize(cfg: &RunConfig) -> Result<QuadratizeReport, CliError> {
    let ode = Input::load(cfg.input()?)?.into_ode();
    let mode = cfg.mode.unwrap_or_default();
    let q: Quadratization = match mode {
        Mode::Canonical => quadratize_canonical(&ode)?,
        Mode::Inclusive => quadratize_inclusive(&ode),
        Mode::Inverse => inverse_driver(&ode),
    };
    let identity_first = cfg.identity_first.unwrap_or(false);
    let order: Vec<usize> = if identity_first { q.identity_first_permutation() } else { (0..q.driver_dim()).collect() };
    let identity_of = |s: usize| q.identity_coords().iter().position(|&c| c == Some(s)).map(|i| i + 1);
    let coordinates = order
        .iter()
        .enumerate()
        .map(|(new, &s)| Coordinate {
            index: new + 1,
            equation: q.slots()[s].equation + 1,
            term: q.slots()[s].term + 1,
            phi: q.phi(s).to_string(),
            pi: q.pi(s).to_vec(),
            identity_of: identity_of(s),
        })
        .collect();
    let frame = driver_frame(&q).permuted(&order);
    let inverse_ode = (mode == Mode::Inverse).then(|| serialize_ode(&q.inverse_ode()));
    Ok(QuadratizeReport {
        mode,
        source_dimension: ode.n(),
        dimension: q.driver_dim(),
        identity_first,
        coordinates,
        frame: serialize_frame(&frame),
        inverse_ode,
    })
}

impl QuadratizeReport {
    pub fn frame_text(&self) -> &str {
        &self.frame
    }
}

impl Report for QuadratizeReport {
    fn csv(&self) -> String {
        let mut header: Vec<String> = ["index", "equation", "term", "phi", "identity_of"].map(String::from).into();
        header.extend((1..=self.source_dimension).map(|j| format!("pi_{j}")));
        let mut out = csv_line(header);
        for c in &self.coordinates {
            let mut row = vec![c.index.to_string(), c.equation.to_string(), c.term.to_string(), csv_field(&c.phi)];
            row.push(c.identity_of.map_or(String::new(), |i| i.to_string()));
            row.extend(c.pi.iter().map(|&p| num(p)));
            out += &csv_line(row);
        }
        out
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} coordinates for {} equations", self.dimension, self.source_dimension);
        for c in &self.coordinates {
            let id = c.identity_of.map_or(String::new(), |i| format!("  (= x{i})"));
            let _ = writeln!(s, "  Z{} = {}  [equation {}, term {}]{id}", c.index, c.phi, c.equation, c.term);
        }
        let _ = writeln!(s, "frame:");
        for line in self.frame.lines() {
            let _ = writeln!(s, "  {line}");
        }
        if let Some(w) = &self.inverse_ode {
            let _ = writeln!(s, "inverse system (W = 1/Z):");
            for line in w.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        s
    }
}

// ----------------------------------------------------------------- series

#[derive(Serialize)]
pub struct ComponentSeries {
    index: usize,
    /// `c_k`, the k-th derivative at t0.
    derivatives: Vec<f64>,
    /// `c_k / k!`, the series coefficients.
    coefficients: Vec<f64>,
}

#[derive(Serialize)]
pub struct SeriesReport {
    t0: f64,
    order: usize,
    x0: Vec<f64>,
    driver_dimension: Option<usize>,
    stationary: bool,
    /// `null` when the bound is infinite.
    radius_bound: Option<f64>,
    components: Vec<ComponentSeries>,
}

pub fn series(cfg: &RunConfig) -> Result<SeriesReport, CliError> {
    let x0 = cfg.x0()?;
    let (t0, order) = (cfg.t0(), cfg.order(20));
    let components = cfg.components()?;
    let e = Expansion::new(Input::load(cfg.input()?)?, x0)?;
    let s = e.series(t0, order, &components)?;
    let user_index = |frame_coord: usize| e.state.iter().position(|&c| c == frame_coord).expect("picked from state");
    let comps = s
        .components()
        .iter()
        .enumerate()
        .map(|(c, &i)| ComponentSeries {
            index: user_index(i) + 1,
            derivatives: (0..=order).map(|k| s.derivative(c, k)).collect(),
            coefficients: s.normalized()[c].clone(),
        })
        .collect();
    Ok(SeriesReport {
        t0,
        order,
        x0: x0.to_vec(),
        driver_dimension: e.driver_dim,
        stationary: e.frame.is_stationary(),
        radius_bound: finite(s.radius_bound()),
        components: comps,
    })
}

impl Report for SeriesReport {
    fn csv(&self) -> String {
        let mut header = vec!["k".to_string()];
        for c in &self.components {
            header.push(format!("c_x{}", c.index));
            header.push(format!("a_x{}", c.index));
        }
        let mut out = csv_line(header);
        for k in 0..=self.order {
            let mut row = vec![k.to_string()];
            for c in &self.components {
                row.push(num(c.derivatives[k]));
                row.push(num(c.coefficients[k]));
            }
            out += &csv_line(row);
        }
        out
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let r = self.radius_bound.map_or("infinite".into(), num);
        let _ = writeln!(s, "series at t0 = {} to order {}, radius bound {r}", num(self.t0), self.order);
        for c in &self.components {
            let _ = writeln!(s, "x{}:", c.index);
            for (k, (d, a)) in c.derivatives.iter().zip(&c.coefficients).enumerate() {
                let _ = writeln!(s, "  k = {k:>3}  c_k = {:<24} c_k/k! = {}", num(*d), num(*a));
            }
        }
        s
    }
}

// ------------------------------------------------------------------ solve

#[derive(Serialize)]
pub struct SolveReport {
    t0: f64,
    target: f64,
    order: usize,
    theta: f64,
    x0: Vec<f64>,
    value: Vec<f64>,
    path: Vec<f64>,
    steps: usize,
}

pub fn solve(cfg: &RunConfig) -> Result<SolveReport, CliError> {
    let x0 = cfg.x0()?;
    let target = cfg.to.ok_or_else(|| CliError::input("--to is required"))?;
    let (t0, order, theta) = (cfg.t0(), cfg.order(30), cfg.theta()?);
    let e = Expansion::new(Input::load(cfg.input()?)?, x0)?;
    let policy = ContinuationPolicy { step_fraction: theta, max_steps: cfg.max_steps.unwrap_or(10_000) };
    let run = continue_to(&e.frame, &e.z0, t0, target, order, policy)?;
    let value = e.state.iter().map(|&i| run.value[i]).collect();
    Ok(SolveReport { t0, target, order, theta, x0: x0.to_vec(), value, steps: run.path.len(), path: run.path })
}

impl Report for SolveReport {
    fn csv(&self) -> String {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.x0.len()).map(|i| format!("x{i}")));
        let mut out = csv_line(header);
        for (t, x) in [(self.t0, &self.x0), (self.target, &self.value)] {
            out += &csv_line(std::iter::once(num(t)).chain(x.iter().map(|&v| num(v))));
        }
        out
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "x({}) from x({}) in {} steps:", num(self.target), num(self.t0), self.steps);
        for (i, v) in self.value.iter().enumerate() {
            let _ = writeln!(s, "  x{} = {}", i + 1, num(*v));
        }
        s
    }
}

// ------------------------------------------------------------------ check

#[derive(Serialize)]
pub struct CheckReport {
    t0: f64,
    window: [f64; 2],
    step: f64,
    order: usize,
    radius_bound: Option<f64>,
    samples: usize,
    max_rel_error: f64,
    rms_rel_error: f64,
    worst_time: Option<f64>,
    out_of_radius: usize,
    /// Some samples lie outside the convergence bound, where the series is
    /// not expected to agree.
    warning: bool,
    #[serde(skip)]
    rows: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl CheckReport {
    pub fn warning(&self) -> bool {
        self.warning
    }
}

pub fn check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let x0 = cfg.x0()?;
    let (a, b) = cfg.window()?;
    let (t0, order, h) = (cfg.t0(), cfg.order(20), cfg.step()?);
    let input = Input::load(cfg.input()?)?;
    let ode = match &input {
        Input::Ode(ode) => Some(ode.clone()),
        Input::Frame(_) => None,
    };
    let e = Expansion::new(input, x0)?;
    // The reference integrates the system exactly as given.
    let traj = match &ode {
        Some(ode) => rk4_window(ode, x0, t0, a, b, h)?,
        None => rk4_window(&e.frame, x0, t0, a, b, h)?,
    };
    let s = e.series(t0, order, &[])?;
    let eval = |t: f64| s.evaluate(t).values;
    let radius = s.radius_bound();
    let report = compare(eval, &traj, (a, b), Some((t0, radius)))?;
    let rows = traj.times.iter().zip(&traj.states).map(|(&t, x)| (t, x.clone(), eval(t))).collect();
    Ok(CheckReport {
        t0,
        window: [a, b],
        step: h,
        order,
        radius_bound: finite(radius),
        samples: report.samples,
        max_rel_error: report.max_rel_error,
        rms_rel_error: report.rms_rel_error,
        worst_time: finite(report.worst_time),
        out_of_radius: report.out_of_radius,
        warning: report.out_of_radius > 0,
        rows,
    })
}

impl Report for CheckReport {
    fn csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.1.len());
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("series_x{i}")));
        let mut out = csv_line(header);
        for (t, x, s) in &self.rows {
            out += &csv_line(std::iter::once(num(*t)).chain(x.iter().chain(s).map(|&v| num(v))));
        }
        out
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "series (order {}) vs RK4 (h = {}) on [{}, {}]: {} samples",
            self.order,
            num(self.step),
            num(self.window[0]),
            num(self.window[1]),
            self.samples
        );
        let _ = writeln!(s, "  max relative error {:e}", self.max_rel_error);
        let _ = writeln!(s, "  rms relative error {:e}", self.rms_rel_error);
        if let Some(t) = self.worst_time {
            let _ = writeln!(s, "  worst at t = {}", num(t));
        }
        if self.warning {
            let _ = writeln!(s, "  warning: {} samples outside the convergence bound", self.out_of_radius);
        }
        s
    }
}
