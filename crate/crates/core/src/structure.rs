//! Domain, criticality and singularity analysis of σπ-ODEs, projection onto
//! coordinate hyperplanes, and the regular/singular decomposition cascade.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::monomial::DomainClass;
use crate::ode::{SigmaPiOde, Term};

/// Per-coordinate description of the system domain.
///
/// `defined` is the intersection of the definedness sets of every power
/// `x_j^{p}` occurring in the system; `classes` is its open interior, the
/// domain on which the right-hand side is smooth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainDescriptor {
    pub classes: Vec<DomainClass>,
    pub defined: Vec<DomainClass>,
    /// Indices `i_1, ..., i_L` of the open positive macro-orthant.
    pub macro_orthant: Vec<usize>,
    /// Indices whose hyperplane `x_j = 0` is removed from the domain.
    pub removed_hyperplanes: Vec<usize>,
}

impl DomainDescriptor {
    fn from_defined(defined: Vec<DomainClass>) -> Self {
        let classes: Vec<_> = defined.iter().map(|c| c.interior()).collect();
        let macro_orthant = indices_where(&classes, |c| c == DomainClass::OpenPositive);
        let removed_hyperplanes = indices_where(&classes, |c| c == DomainClass::Nonzero);
        Self { classes, defined, macro_orthant, removed_hyperplanes }
    }

    /// Intersect with constraints inherited from a parent system.
    pub fn restricted_by(&self, inherited: &[DomainClass]) -> Self {
        let defined = self.defined.iter().zip(inherited).map(|(a, &b)| a.intersect(b)).collect();
        Self::from_defined(defined)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.classes.iter().zip(x).all(|(c, &v)| c.contains(v))
    }
}

fn indices_where(classes: &[DomainClass], pred: impl Fn(DomainClass) -> bool) -> Vec<usize> {
    classes.iter().enumerate().filter(|(_, &c)| pred(c)).map(|(j, _)| j).collect()
}

pub fn analyze_domain(ode: &SigmaPiOde) -> DomainDescriptor {
    let mut defined = vec![DomainClass::Unrestricted; ode.n()];
    for term in ode.equations().iter().flatten() {
        for (j, p) in term.monomial.iter() {
            defined[j] = defined[j].intersect(p.domain_class());
        }
    }
    DomainDescriptor::from_defined(defined)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// `ℐ*`: coordinates whose hyperplane meets the domain.
    pub criticality: Vec<usize>,
    /// `ℐ_s`: critical coordinates for which `x_j ≡ 0` solves equation `j`.
    pub singularity: Vec<usize>,
    /// `ℐ* \ ℐ_s`.
    pub nonsingular_criticality: Vec<usize>,
}

impl StructureReport {
    pub fn is_regular(&self) -> bool {
        self.singularity.is_empty()
    }
}

pub fn structure(ode: &SigmaPiOde) -> StructureReport {
    structure_within(ode, &analyze_domain(ode))
}

/// Structure relative to an explicitly supplied domain (e.g. one inherited
/// from the system a projection came from).
pub fn structure_within(ode: &SigmaPiOde, domain: &DomainDescriptor) -> StructureReport {
    let criticality: Vec<usize> = (0..ode.n()).filter(|&j| domain.classes[j] == DomainClass::Unrestricted).collect();
    let vanishes_on_hyperplane = |j: usize, t: &Term| t.coeff.is_zero() || t.monomial.exponent(j).value() > 0.0;
    let singularity: Vec<usize> =
        criticality.iter().copied().filter(|&j| ode.equation(j).iter().all(|t| vanishes_on_hyperplane(j, t))).collect();
    let nonsingular_criticality = criticality.iter().copied().filter(|j| !singularity.contains(j)).collect();
    StructureReport { criticality, singularity, nonsingular_criticality }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("cannot set x{} = 0: it appears with exponent {exponent} in equation {}", index + 1, equation + 1)]
    InvalidProjection { equation: usize, index: usize, exponent: f64 },
    #[error("index x{} out of range", index + 1)]
    IndexOutOfRange { index: usize },
}

/// A projected system together with its renumbering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub ode: SigmaPiOde,
    /// `kept[new] = old`.
    pub kept: Vec<usize>,
}

/// Remove the equations in `drop` and set those coordinates to zero in the
/// remaining ones; terms with a positive power of a dropped coordinate vanish.
pub fn project(ode: &SigmaPiOde, drop: &BTreeSet<usize>) -> Result<Projection, ProjectionError> {
    if let Some(&index) = drop.iter().find(|&&j| j >= ode.n()) {
        return Err(ProjectionError::IndexOutOfRange { index });
    }
    let kept: Vec<usize> = (0..ode.n()).filter(|j| !drop.contains(j)).collect();
    let mut renumber = vec![usize::MAX; ode.n()];
    for (new, &old) in kept.iter().enumerate() {
        renumber[old] = new;
    }
    let mut equations = Vec::with_capacity(kept.len());
    for &i in &kept {
        let mut eq = Vec::new();
        'terms: for term in ode.equation(i) {
            let mut monomial = crate::monomial::Monomial::one();
            for (j, p) in term.monomial.iter() {
                if drop.contains(&j) {
                    if p.value() > 0.0 {
                        continue 'terms;
                    }
                    return Err(ProjectionError::InvalidProjection { equation: i, index: j, exponent: p.value() });
                }
                monomial = monomial.with(renumber[j], p);
            }
            eq.push(Term::new(term.coeff.clone(), monomial));
        }
        equations.push(eq);
    }
    let ode = SigmaPiOde::new(kept.len(), equations).expect("renumbered indices are in range");
    Ok(Projection { ode, kept })
}

/// One system of the regular/singular cascade.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub ode: SigmaPiOde,
    /// Original (0-based) index of each coordinate of `ode`.
    pub indices: Vec<usize>,
    pub domain: DomainDescriptor,
    pub report: StructureReport,
    /// Original indices projected away to form the next stage (empty on the
    /// last stage).
    pub dropped: Vec<usize>,
    /// The stage is the zero system (possibly in no coordinates).
    pub zero_system: bool,
}

/// Repeatedly project away the singularity indices until the system is
/// regular or is the zero system. Projected stages keep the domain
/// restrictions of their parent.
pub fn decompose_global(ode: &SigmaPiOde) -> Vec<Stage> {
    let mut chain = Vec::new();
    let mut current = ode.clone();
    let mut indices: Vec<usize> = (0..ode.n()).collect();
    let mut domain = analyze_domain(ode);
    loop {
        let report = structure_within(&current, &domain);
        let zero_system = current.is_zero_system();
        if report.is_regular() || zero_system {
            chain.push(Stage { ode: current, indices, domain, report, dropped: Vec::new(), zero_system });
            return chain;
        }
        let drop: BTreeSet<usize> = report.singularity.iter().copied().collect();
        let projection = project(&current, &drop).expect("singular coordinates always project");
        let inherited: Vec<DomainClass> = projection.kept.iter().map(|&j| domain.defined[j]).collect();
        let next_domain = analyze_domain(&projection.ode).restricted_by(&inherited);
        let next_indices: Vec<usize> = projection.kept.iter().map(|&j| indices[j]).collect();
        let dropped = drop.iter().map(|&j| indices[j]).collect();
        chain.push(Stage { ode: current, indices, domain, report, dropped, zero_system });
        current = projection.ode;
        indices = next_indices;
        domain = next_domain;
    }
}
