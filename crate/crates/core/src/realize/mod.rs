//! Numerical construction of the polyhedron with prescribed angles.

mod compound;
mod newton;
mod path;
mod replay;
mod truncate;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::angles::{check_conditions, AngleAssignment, AngleError, ConditionReport};
use crate::complex::{isomorphic, prism, AbstractPolyhedron, CollapseError};
use crate::minkowski::{build_prism_exact, GeometryError, MVec, Realization};
use crate::scalar::{format_rational, ratio};
use crate::whitehead::{MoveError, ReduceError};

pub use compound::{decompose, glue, CompoundPlan, GlueReport, Piece};
pub use newton::{apply_gauge, choose_base, newton_solve, GramSystem};
pub use path::{continue_path, EventInfo};
pub use replay::{build_split_prism, realize_by_reduction, replay_trace, replay_whitehead, SplitPrism};
pub use truncate::{realize_truncated, truncate_ideal, truncate_vertices_at, Truncation};

/// Tolerances and step controls of the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Largest accepted Gram residual.
    pub residual_tol: f64,
    /// Threshold on vertex determinants when classifying triples.
    pub classify_tol: f64,
    /// Vertex determinant below which continuation reports an event.
    pub event_threshold: f64,
    pub max_newton_steps: usize,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Angle of the collapsing edge during a geometric move, as a multiple of π.
    #[serde(serialize_with = "as_fraction")]
    pub whitehead_eps: BigRational,
    pub truncation_delta0: f64,
    pub truncation_delta_min: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            classify_tol: 1e-9,
            event_threshold: 1e-7,
            max_newton_steps: 40,
            initial_step: 0.1,
            max_step: 0.25,
            min_step: 1e-6,
            whitehead_eps: ratio(1, 60),
            truncation_delta0: 1e-2,
            truncation_delta_min: 1e-8,
            seed: 0,
        }
    }
}

fn as_fraction<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Debug, Clone, Error)]
pub enum RealizeError {
    #[error("angles are not in the angle polytope: {0}")]
    InfeasibleAngles(Box<ConditionReport>),
    #[error("Newton iteration diverged (residual {residual:e} after {steps} steps)")]
    Diverged { residual: f64, steps: usize },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("converged to the wrong cell structure: {0}")]
    WrongCombinatorics(String),
    #[error("continuation step fell below the floor at t = {t}: {cause}")]
    StepFloorReached { t: f64, cause: Box<RealizeError> },
    #[error("vertex {} became ideal at t = {} (determinant {:e})", .0.vertex, .0.t, .0.det)]
    EventDetected(Box<EventInfo>),
    #[error("no truncation distance satisfied the side conditions")]
    DeltaSearchFailed,
    #[error("paired triangles are not congruent (Lorentz defect {0:e})")]
    IncongruentTriangles(f64),
    #[error("could not solve for the gluing isometry")]
    IsometrySolveFailed,
    #[error("complex has no essential prismatic 3-circuit")]
    NoEssentialCircuits,
    #[error(transparent)]
    NotSimple(#[from] CollapseError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error("final audit failed: residual {residual:e}, angle deviation {deviation:e}")]
    AuditFailed { residual: f64, deviation: f64 },
    #[error("{0}")]
    Unsupported(String),
}

/// One stage of a pipeline run.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub name: String,
    pub faces: usize,
    pub steps: usize,
    pub residual: f64,
}

/// Diagnostics of a [`realize`] run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PipelineReport {
    pub path: String,
    pub stages: Vec<StageReport>,
    /// Event times of the truncation schedule, as rationals.
    pub events: Vec<String>,
    pub truncation_deltas: Vec<f64>,
    pub moves: usize,
    pub coplanarity_defect: Option<f64>,
    pub residual: f64,
    pub angle_deviation: f64,
    /// Smallest vertex determinant of the result.
    pub margin: f64,
}

impl PipelineReport {
    pub(crate) fn stage(&mut self, name: impl Into<String>, r: &Realization, steps: usize) {
        self.stages.push(StageReport {
            name: name.into(),
            faces: r.complex().face_count(),
            steps,
            residual: r.gram_residual(),
        });
    }

    pub(crate) fn event(&mut self, t: &BigRational) {
        self.events.push(format_rational(t));
    }
}

/// Which construction applies to a complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Prism,
    Simple,
    Truncation,
    Compound,
}

pub fn route(c: &AbstractPolyhedron) -> Result<Route, RealizeError> {
    let n = c.face_count();
    if n <= 4 {
        return Err(RealizeError::Unsupported("the tetrahedron is outside the theorem".into()));
    }
    if isomorphic(&prism(n), c).is_some() {
        return Ok(Route::Prism);
    }
    if c.is_simple() {
        return Ok(Route::Simple);
    }
    if compound::essential_circuits(&c.dual()).is_empty() {
        Ok(Route::Truncation)
    } else {
        Ok(Route::Compound)
    }
}

/// The compact polyhedron with combinatorics `c` and angles `a`.
pub fn realize(c: &AbstractPolyhedron, a: &AngleAssignment, cfg: &SolverConfig) -> Result<Realization, RealizeError> {
    realize_with_report(c, a, cfg).map(|(r, _)| r)
}

pub fn realize_with_report(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
) -> Result<(Realization, PipelineReport), RealizeError> {
    let mut report = PipelineReport::default();
    let r = realize_into(c, a, cfg, &mut report)?;
    report.residual = r.gram_residual();
    report.angle_deviation = r.angle_deviation();
    report.margin = r.margin();
    if report.residual >= cfg.residual_tol || report.angle_deviation >= 1e-8 {
        return Err(RealizeError::AuditFailed {
            residual: report.residual,
            deviation: report.angle_deviation,
        });
    }
    r.validate(cfg.classify_tol)?;
    Ok((r, report))
}

pub(crate) fn realize_into(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
) -> Result<Realization, RealizeError> {
    let check = check_conditions(c, a)?;
    if !check.member {
        return Err(RealizeError::InfeasibleAngles(Box::new(check)));
    }
    let route = route(c)?;
    if report.path.is_empty() {
        report.path = serde_json::to_value(route).unwrap().as_str().unwrap().to_string();
    }
    match route {
        Route::Prism => realize_prism(c, a, cfg, report),
        Route::Simple => realize_by_reduction(c, a, cfg, report),
        Route::Truncation => realize_truncated(c, a, cfg, report),
        Route::Compound => compound::realize_compound(c, a, cfg, report),
    }
}

/// Explicit prism with lateral angles π/4 and caps 49π/100, relabelled onto `c`, then continued.
fn realize_prism(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
) -> Result<Realization, RealizeError> {
    let n = c.face_count();
    let start = build_prism_exact(n, &ratio(1, 4), &ratio(1, 100))?;
    let map = isomorphic(start.complex(), c).ok_or_else(|| RealizeError::Unsupported("not a prism".into()))?;
    let seed = transport(&start, c, &map.faces, map.reflected);
    report.stage("explicit prism", &seed, 0);
    let (r, steps) = path::continue_path_counted(&seed, a, cfg)?;
    report.stage("continuation to target", &r, steps);
    Ok(r)
}

/// Moves a realization onto an isomorphic complex; `faces[f]` is the image of face `f`.
pub(crate) fn transport(r: &Realization, onto: &AbstractPolyhedron, faces: &[usize], reflected: bool) -> Realization {
    let mut normals = vec![MVec::zero(); onto.face_count()];
    for (f, v) in r.normals().iter().enumerate() {
        normals[faces[f]] = if reflected { MVec::new(v.x[0], v.x[1], -v.x[2], v.x[3]) } else { *v };
    }
    let mut target = vec![0.0; onto.edge_count()];
    let mut exact = r.exact().map(|e| e.values().to_vec());
    for (k, e) in r.complex().edges().iter().enumerate() {
        let j = onto.edge_between_faces(faces[e.faces[0]], faces[e.faces[1]]).unwrap();
        target[j] = r.target()[k];
        if let (Some(x), Some(src)) = (exact.as_mut(), r.exact()) {
            x[j] = src.get(k).clone();
        }
    }
    Realization::new(onto.clone(), normals, target, exact.map(AngleAssignment::new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;

    #[test]
    fn routes() {
        assert_eq!(route(&prism(5)).unwrap(), Route::Prism);
        assert_eq!(route(&cube()).unwrap(), Route::Prism);
        assert_eq!(route(&dodecahedron()).unwrap(), Route::Simple);
        assert_eq!(route(&truncated_tetrahedron()).unwrap(), Route::Truncation);
        assert!(route(&tetrahedron()).is_err());
    }

    #[test]
    fn pentagonal_prism_target() {
        let c = prism(5);
        let a = AngleAssignment::new(
            c.edges()
                .iter()
                .map(|e| if e.faces[1] < 3 { ratio(1, 4) } else { ratio(49, 100) })
                .collect(),
        );
        let (r, rep) = realize_with_report(&c, &a, &SolverConfig::default()).unwrap();
        assert!(r.gram_residual() < 1e-10);
        assert_eq!(rep.path, "prism");
    }

    #[test]
    fn infeasible_rejected() {
        let c = alternately_truncated_cube();
        let a = AngleAssignment::uniform(c.edge_count(), ratio(2, 5));
        assert!(matches!(
            realize(&c, &a, &SolverConfig::default()),
            Err(RealizeError::InfeasibleAngles(_))
        ));
    }
}
