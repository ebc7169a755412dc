//! Exact quadratization and power-series solution of σπ-ODEs.
//!
//! A σπ-ODE is `ẋ_i = Σ_l v_{i,l}(t) Π_j x_j^{p^l_{i,j}}` with arbitrary real
//! exponents. Such a system can always be rewritten as a quadratic
//! Driver-type ODE `ẋ_i = (v_i' x) x_i` in the variables
//! `Z_{i,l} = x_i^{-1} X_{i,l}`, and the solutions of Driver-type ODEs have
//! explicitly computable Taylor coefficients.
//!
//! ```
//! use sigmapi::{parse_ode, quadratize_inclusive, driver_frame, phi_eval, taylor_general};
//!
//! let ode = parse_ode("x1' = x1^2").unwrap();
//! let q = quadratize_inclusive(&ode);
//! let frame = driver_frame(&q);
//! let z0 = phi_eval(&q, &[1.0]).unwrap();
//! let series = taylor_general(&frame, &z0, 0.0, 20, &[]).unwrap();
//! let x = series.evaluate(0.25).values[q.identity_coords()[0].unwrap()];
//! assert!((x - 1.0 / 0.75).abs() < 1e-9);
//! ```

pub mod frame;
pub mod jet;
pub mod monomial;
pub mod ode;
pub mod oracle;
pub mod parse;
pub mod quadratize;
pub mod series;
pub mod structure;

pub use frame::{FrameError, QuadraticFrame};
pub use jet::TimeJet;
pub use monomial::{DomainClass, DomainViolation, Exponent, Monomial};
pub use ode::{OdeError, SigmaPiOde, Term};
pub use oracle::{compare, rk4, rk4_window, ComparisonReport, OracleError, Trajectory, VectorField};
pub use parse::{parse_frame, parse_ode, serialize_frame, serialize_ode, ParseError, SourceSpan};
pub use quadratize::{
    add_fictitious_monomial, driver_frame, inverse_driver, phi_eval, quadratize_canonical, quadratize_inclusive,
    Quadratization, QuadratizationKind, QuadratizeError, Slot,
};
pub use series::{
    bound_envelope, coefficient_tensor, continue_to, convergence_bound, evaluate, observable_series, support,
    taylor_general, taylor_stationary, CoefficientTensor, Continuation, ContinuationPolicy, Evaluation, IndexMultiset,
    ScalarSeries, SeriesError, SeriesSolution, Support,
};
pub use structure::{
    analyze_domain, decompose_global, project, structure, structure_within, DomainDescriptor, Projection,
    ProjectionError, Stage, StructureReport,
};
