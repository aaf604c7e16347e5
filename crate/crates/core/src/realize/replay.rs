//! Split prisms, geometric Whitehead moves, and the route through the reduction trace.

use num_rational::BigRational;

use super::newton::{check_cells, choose_base, solve_normals, vertex_sums};
use super::path::continue_path_counted;
use super::{transport, PipelineReport, RealizeError, SolverConfig};
use crate::angles::AngleAssignment;
use crate::complex::{isomorphic, prism, split_prism, AbstractPolyhedron, DualComplex};
use crate::minkowski::{build_prism_exact, extract_combinatorics, split_prism_angles, Lorentz, MVec, Realization};
use crate::scalar::ratio;
use crate::whitehead::{apply_move, reduce_to_dn, WhiteheadMove};

/// A realized split prism and its construction audit.
#[derive(Debug, Clone)]
pub struct SplitPrism {
    /// Realization of `split_prism(N)` with its exact angles.
    pub realization: Realization,
    /// Largest coordinate difference between a mirrored side plane and itself.
    pub merged_defect: f64,
    /// Angle between the doubled side and its mirror image.
    pub doubled_angle: f64,
    /// Angle of that side with the mirror before doubling.
    pub half_angle: f64,
}

/// Doubles the `(N-1)`-prism with angles π/3 on the top ring, π/2 on the sides
/// and bottom, and π/4 on one bottom edge, across its bottom face.
pub fn build_split_prism(n_faces: usize, cfg: &SolverConfig) -> Result<SplitPrism, RealizeError> {
    if n_faces < 7 {
        return Err(RealizeError::Geometry(crate::minkowski::GeometryError::BadParameters(format!(
            "split prisms need N >= 7, got {n_faces}"
        ))));
    }
    let m = n_faces - 3;
    let (top, bottom) = (m, m + 1);
    let start = build_prism_exact(n_faces - 1, &ratio(1, 4), &ratio(1, 100))?;
    let pc = prism(n_faces - 1);
    let vertical = if m == 4 { ratio(2, 5) } else { ratio(1, 2) };
    let figure = AngleAssignment::new(
        pc.edges()
            .iter()
            .map(|e| {
                let [f, g] = e.faces;
                if g == top {
                    ratio(1, 3)
                } else if g == bottom {
                    if f == 0 {
                        ratio(1, 4)
                    } else {
                        ratio(1, 2)
                    }
                } else {
                    vertical.clone()
                }
            })
            .collect(),
    );
    let (half, _) = continue_path_counted(&start, &figure, cfg)?;
    let x = half.normals();
    let mirror = Lorentz::reflection(&x[bottom]);
    let mut normals: Vec<MVec<f64>> = x[..m].to_vec();
    normals.push(x[top]);
    normals.push(mirror.apply(&x[top]));
    normals.push(mirror.apply(&x[0]));
    let merged_defect = (1..m).fold(0.0f64, |d, j| d.max(mirror.apply(&x[j]).max_abs_diff(&x[j])));
    let half_angle = (-x[0].inner(&x[bottom])).acos();
    let doubled_angle = (-normals[0].inner(&normals[m + 2])).acos();

    let ext = extract_combinatorics(&normals, cfg.classify_tol)?;
    let target = split_prism(n_faces);
    let map = isomorphic(&ext.complex, &target)
        .ok_or_else(|| RealizeError::WrongCombinatorics("doubled prism is not a split prism".into()))?;
    let exact = split_prism_angles(n_faces, &map.faces);
    let raw = Realization::new(ext.complex.clone(), normals, vec![0.0; ext.complex.edge_count()], None);
    let moved = transport(&raw, &target, &map.faces, map.reflected).with_exact(exact);
    moved.validate(cfg.classify_tol)?;
    Ok(SplitPrism {
        realization: moved,
        merged_defect,
        doubled_angle,
        half_angle,
    })
}

/// Angles `eps` on `edge`, π/2 on `four`, 2π/5 elsewhere.
fn collapse_schedule(c: &AbstractPolyhedron, edge: usize, four: &[usize], eps: &BigRational) -> AngleAssignment {
    AngleAssignment::new(
        (0..c.edge_count())
            .map(|e| {
                if e == edge {
                    eps.clone()
                } else if four.contains(&e) {
                    ratio(1, 2)
                } else {
                    ratio(2, 5)
                }
            })
            .collect(),
    )
}

/// Carries a realization of `C` across the move to a realization of `C'` at the
/// standard interior point `(2π/5, ..., 2π/5)`.
pub fn replay_whitehead(
    r: &Realization,
    m: &WhiteheadMove,
    cfg: &SolverConfig,
) -> Result<Realization, RealizeError> {
    replay_counted(r, m, cfg).map(|(x, _)| x)
}

fn replay_counted(
    r: &Realization,
    m: &WhiteheadMove,
    cfg: &SolverConfig,
) -> Result<(Realization, usize), RealizeError> {
    let c = r.complex();
    let [a, b] = m.remove;
    let [x, y] = m.insert;
    let edge = c
        .edge_between_faces(a, b)
        .ok_or(crate::whitehead::MoveError::EdgeMissing(a, b))?;
    let collapse = c.collapse_edge(edge)?;
    let eps = &cfg.whitehead_eps;
    let before = collapse_schedule(c, edge, &collapse.surrounding_edges, eps);
    let (near, s1) = continue_path_counted(r, &before, cfg)?;

    let cp = apply_move(&c.dual(), m)?
        .to_primal()
        .map_err(|e| RealizeError::Unsupported(e.to_string()))?;
    let new_edge = cp.edge_between_faces(x, y).expect("move inserts the edge");
    let four: Vec<usize> = collapse
        .surrounding_faces
        .iter()
        .zip(collapse.surrounding_faces.iter().cycle().skip(1))
        .map(|(&f, &g)| cp.edge_between_faces(f, g).expect("surrounding edges survive the move"))
        .collect();
    let after = collapse_schedule(&cp, new_edge, &four, eps);
    let target = after.radians();
    let base = choose_base(&cp, &vertex_sums(&cp, &target));
    let mut seeds = vec![near.normals().to_vec()];
    for (p, q) in [(a, b), (b, a)] {
        let mut s = near.normals().to_vec();
        s[p] = crossed(&s[p], &s[q]);
        seeds.push(s);
    }
    let mut last = RealizeError::SingularJacobian;
    for seed in seeds {
        match solve_normals(&cp, &target, &seed, base, cfg).and_then(|(n, _)| {
            check_cells(&cp, &n, cfg)?;
            Ok(n)
        }) {
            Ok(n) => {
                let swapped = Realization::new(cp.clone(), n, target.clone(), Some(after.clone()));
                let std = AngleAssignment::uniform(cp.edge_count(), ratio(2, 5));
                let (out, s2) = continue_path_counted(&swapped, &std, cfg)?;
                return Ok((out, s1 + s2 + 1));
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Rotates `v` by twice its small angle with `w` inside their span, past the tangency.
fn crossed(v: &MVec<f64>, w: &MVec<f64>) -> MVec<f64> {
    let ip = v.inner(w);
    let perp = *v - *w * ip;
    match perp.unit_spacelike() {
        Some(f) => *v - f * (2.0 * (1.0 - ip * ip).max(0.0).sqrt()),
        None => *v,
    }
}

/// Simple non-prism route: reduce to `D_N`, realize the split prism, and replay the moves backwards.
pub fn realize_by_reduction(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
) -> Result<Realization, RealizeError> {
    let (r, _) = replay_trace(c, cfg, report, |_, _| {})?;
    let (out, steps) = continue_path_counted(&r, a, cfg)?;
    report.stage("continuation to target", &out, steps);
    Ok(out)
}

/// Realizes every stage of the reduction trace of `c`, from `D_N` back to `c`, at 2π/5.
///
/// `visit` sees each stage after it is realized.
pub fn replay_trace(
    c: &AbstractPolyhedron,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
    mut visit: impl FnMut(usize, &Realization),
) -> Result<(Realization, Vec<DualComplex>), RealizeError> {
    let trace = reduce_to_dn(&c.dual())?;
    let n = c.face_count();
    let mut duals = vec![trace.start.clone()];
    for mv in &trace.moves {
        duals.push(apply_move(duals.last().unwrap(), mv)?);
    }
    report.moves = trace.moves.len();
    let sp = build_split_prism(n, cfg)?;
    report.stage("split prism", &sp.realization, 0);
    let end = trace.end.to_primal().map_err(|e| RealizeError::Unsupported(e.to_string()))?;
    let map = isomorphic(sp.realization.complex(), &end)
        .ok_or_else(|| RealizeError::WrongCombinatorics("reduction did not end at the split prism".into()))?;
    let seed = transport(&sp.realization, &end, &map.faces, map.reflected);
    let std = AngleAssignment::uniform(end.edge_count(), ratio(2, 5));
    let (mut cur, steps) = continue_path_counted(&seed, &std, cfg)?;
    report.stage("split prism at 2pi/5", &cur, steps);
    visit(trace.moves.len(), &cur);
    for (i, mv) in trace.moves.iter().enumerate().rev() {
        let (next, steps) = replay_counted(&cur, &mv.inverse(), cfg)?;
        report.stage(format!("move {i} reversed"), &next, steps);
        visit(i, &next);
        cur = next;
    }
    let back = Realization::new(c.clone(), cur.normals().to_vec(), cur.target().to_vec(), cur.exact().cloned());
    back.validate(cfg.classify_tol)?;
    Ok((back, duals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;

    #[test]
    fn split_prism_eight() {
        let s = build_split_prism(8, &SolverConfig::default()).unwrap();
        assert!(s.merged_defect < 1e-8);
        assert!((s.doubled_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(s.realization.angle_deviation() < 1e-9);
        assert!(isomorphic(s.realization.complex(), &split_prism(8)).is_some());
    }

    #[test]
    fn split_prism_seven_is_a_prism() {
        let s = build_split_prism(7, &SolverConfig::default()).unwrap();
        assert!(isomorphic(s.realization.complex(), &prism(7)).is_some());
    }

    #[test]
    fn move_on_triangular_prism_rejected() {
        let r = crate::minkowski::build_prism(5, 0.7, 0.05).unwrap();
        let m = WhiteheadMove {
            remove: [0, 1],
            insert: [3, 4],
        };
        assert!(matches!(
            replay_whitehead(&r, &m, &SolverConfig::default()),
            Err(RealizeError::NotSimple(_))
        ));
    }
}
