//! Truncation of ideal vertices and the staged schedule for truncated triangles.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::newton::check_cells;
use super::path::{continue_path_counted, follow};
use super::{realize_into, route, transport, PipelineReport, RealizeError, Route, SolverConfig};
use crate::angles::{check_conditions, interior_path, AngleAssignment};
use crate::complex::{truncate_vertices, AbstractPolyhedron, DualComplex};
use crate::minkowski::{perp_plane, MVec, Realization};
use crate::scalar::ratio;

/// Result of [`truncate_ideal`].
#[derive(Debug, Clone)]
pub struct Truncation {
    /// Realization of the truncated complex; new faces follow the old ones.
    pub realization: Realization,
    /// Distance each plane was pushed.
    pub delta: f64,
    /// Truncated vertices of the input, in the order of the new faces.
    pub truncated: Vec<usize>,
}

/// Truncates every vertex whose determinant is within the event threshold of zero.
pub fn truncate_ideal(r: &Realization, cfg: &SolverConfig) -> Result<Truncation, RealizeError> {
    let ideal: Vec<usize> = r
        .vertex_determinants()
        .iter()
        .enumerate()
        .filter(|(_, d)| d.abs() < cfg.event_threshold)
        .map(|(v, _)| v)
        .collect();
    truncate_vertices_at(r, &ideal, cfg)
}

/// Pushes every plane away from an interior point by `delta` and cuts the listed
/// vertices off with the planes perpendicular to their three faces.
pub fn truncate_vertices_at(r: &Realization, ideal: &[usize], cfg: &SolverConfig) -> Result<Truncation, RealizeError> {
    if ideal.is_empty() {
        return Ok(Truncation {
            realization: r.clone(),
            delta: 0.0,
            truncated: Vec::new(),
        });
    }
    let c = r.complex();
    let pts = r.vertex_points();
    let mut sum = MVec::zero();
    for v in (0..c.vertex_count()).filter(|v| !ideal.contains(v)) {
        sum = sum + pts[v];
    }
    let p = sum
        .unit_timelike()
        .ok_or_else(|| RealizeError::Unsupported("no finite vertices to average".into()))?;
    let heights: Vec<f64> = r.normals().iter().map(|v| -p.inner(v)).collect();
    if heights.iter().any(|&h| h <= 0.0) {
        return Err(RealizeError::Unsupported("averaged point is not interior".into()));
    }
    let new_c = truncate_vertices(c, ideal);
    let mut delta = cfg.truncation_delta0;
    while delta >= cfg.truncation_delta_min {
        if let Some(out) = try_delta(r, &new_c, ideal, &p, &heights, delta, cfg) {
            return Ok(Truncation {
                realization: out,
                delta,
                truncated: ideal.to_vec(),
            });
        }
        delta *= 0.5;
    }
    Err(RealizeError::DeltaSearchFailed)
}

fn try_delta(
    r: &Realization,
    new_c: &AbstractPolyhedron,
    ideal: &[usize],
    p: &MVec<f64>,
    heights: &[f64],
    delta: f64,
    cfg: &SolverConfig,
) -> Option<Realization> {
    let c = r.complex();
    let pushed: Vec<MVec<f64>> = r
        .normals()
        .iter()
        .zip(heights)
        .map(|(v, &s)| {
            let d = s.asinh();
            let foot = (*v - *p * s) * (1.0 / d.cosh());
            *p * (d + delta).sinh() + foot * (d + delta).cosh()
        })
        .collect();
    for e in c.edges() {
        let ip = pushed[e.faces[0]].inner(&pushed[e.faces[1]]);
        if !(ip > -1.0 && ip <= 0.0) {
            return None;
        }
    }
    let pushed_r = Realization::new(c.clone(), pushed.clone(), r.target().to_vec(), None);
    let dets = pushed_r.vertex_determinants();
    for (v, &d) in dets.iter().enumerate() {
        let ok = if ideal.contains(&v) { d < -cfg.classify_tol } else { d > cfg.classify_tol };
        if !ok {
            return None;
        }
    }
    let mut normals = pushed;
    for &v in ideal {
        let [a, b, cc] = c.vertex_faces(v);
        let w = perp_plane(&normals[a], &normals[b], &normals[cc], p).ok()?;
        normals.push(w.normal());
    }
    let target: Vec<f64> = new_c
        .edges()
        .iter()
        .map(|e| (-normals[e.faces[0]].inner(&normals[e.faces[1]])).clamp(-1.0, 1.0).acos())
        .collect();
    let out = Realization::new(new_c.clone(), normals, target, None);
    check_cells(new_c, out.normals(), cfg).ok()?;
    let n_old = c.face_count();
    for e in new_c.edges().iter().filter(|e| e.faces[1] >= n_old) {
        let ip = out.normals()[e.faces[0]].inner(&out.normals()[e.faces[1]]);
        if ip.abs() > 1e-8 {
            return None;
        }
    }
    Some(out)
}

/// Nodes of degree three, the triangular faces.
fn triangle_nodes(d: &DualComplex) -> Vec<usize> {
    (0..d.node_count()).filter(|&x| d.degree(x) == 3).collect()
}

/// `d` with the nodes in `remove` replaced by the triangles of their links.
/// Returns the new complex and the old label of each node.
fn remove_nodes(d: &DualComplex, remove: &BTreeSet<usize>) -> (DualComplex, Vec<usize>) {
    let labels: Vec<usize> = (0..d.node_count()).filter(|x| !remove.contains(x)).collect();
    let mut local = vec![usize::MAX; d.node_count()];
    for (i, &g) in labels.iter().enumerate() {
        local[g] = i;
    }
    let mut tris: Vec<[usize; 3]> = d
        .triangles()
        .into_iter()
        .filter(|t| t.iter().all(|x| !remove.contains(x)))
        .collect();
    for &x in remove {
        let r = d.neighbors(x);
        tris.push([r[0], r[1], r[2]]);
    }
    let tris: Vec<[usize; 3]> = tris.iter().map(|t| t.map(|g| local[g])).collect();
    let out = DualComplex::from_triangles(labels.len(), &tris).expect("removing triangles keeps a triangulation");
    (out, labels)
}

/// Angles at parameter `t` of the schedule on a stage complex whose faces carry global `labels`.
struct Schedule<'a> {
    c: &'a AbstractPolyhedron,
    gamma: Vec<Option<BigRational>>,
    beta: Vec<BigRational>,
}

impl Schedule<'_> {
    fn at(&self, k: &AbstractPolyhedron, labels: &[usize], done: &BTreeSet<usize>, t: &BigRational) -> AngleAssignment {
        let one_minus = BigRational::one() - t;
        AngleAssignment::new(
            k.edges()
                .iter()
                .map(|e| {
                    let (f, g) = (labels[e.faces[0]], labels[e.faces[1]]);
                    if done.contains(&f) || done.contains(&g) {
                        return ratio(1, 2);
                    }
                    let ec = self.c.edge_between_faces(f, g).unwrap();
                    let gam = self.gamma[ec].as_ref().expect("schedule edge");
                    &one_minus * gam + t * &self.beta[ec]
                })
                .collect(),
        )
    }
}

/// Route for complexes whose only prismatic 3-circuits surround triangles.
///
/// The triangles are collapsed to vertices, the collapsed complex is realized
/// at `γ`, and the straight path from `γ` to `β` is followed. Each time a collapsed
/// vertex becomes ideal it is truncated, and its new edges stay at π/2.
pub fn realize_truncated(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
) -> Result<Realization, RealizeError> {
    let d = c.dual();
    let tris = triangle_nodes(&d);
    let mut remove: BTreeSet<usize> = tris.iter().copied().collect();
    if d.node_count() - remove.len() <= 4 {
        remove.remove(&tris[0]);
    }
    let (d0, labels0) = remove_nodes(&d, &remove);
    let c0 = d0.to_primal().map_err(|e| RealizeError::Unsupported(e.to_string()))?;
    let r0 = route(&c0)?;
    let is_pr5 = r0 == Route::Prism && c0.face_count() == 5;
    if !(is_pr5 || r0 == Route::Simple || r0 == Route::Prism) {
        return Err(RealizeError::Unsupported("collapsing the triangles left a non-simple complex".into()));
    }

    let beta = interior_path(c, a, &ratio(9, 10))?;
    let delta = ratio(1, 20);
    let cedge = |e: &crate::complex::Edge| c.edge_between_faces(labels0[e.faces[0]], labels0[e.faces[1]]).unwrap();
    let special: Vec<usize> = if is_pr5 {
        c0.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.faces.iter().all(|&f| c0.faces()[f].len() == 4))
            .map(|(i, _)| i)
            .collect()
    } else {
        let mut used = BTreeSet::new();
        let mut out = Vec::new();
        for (i, e) in c0.edges().iter().enumerate() {
            if out.len() == 3 {
                break;
            }
            if e.vertices.iter().all(|v| !used.contains(v)) {
                used.extend(e.vertices);
                out.push(i);
            }
        }
        out
    };
    let mut gamma = vec![None; c.edge_count()];
    let mut gamma0 = Vec::with_capacity(c0.edge_count());
    for (i, e) in c0.edges().iter().enumerate() {
        let ec = cedge(e);
        let g = if special.contains(&i) {
            beta.get(ec).clone()
        } else {
            beta.get(ec) + &delta * ratio(2, 1)
        };
        gamma[ec] = Some(g.clone());
        gamma0.push(g);
    }
    let gamma0 = AngleAssignment::new(gamma0);
    let chk = check_conditions(&c0, &gamma0)?;
    if !chk.member {
        return Err(RealizeError::InfeasibleAngles(Box::new(chk)));
    }
    let sched = Schedule {
        c,
        gamma,
        beta: beta.values().to_vec(),
    };

    // event time of each collapsed triangle
    let mut events: BTreeMap<BigRational, Vec<usize>> = BTreeMap::new();
    for &x in &remove {
        let link = d.neighbors(x);
        let edges = [
            c.edge_between_faces(link[0], link[1]).unwrap(),
            c.edge_between_faces(link[1], link[2]).unwrap(),
            c.edge_between_faces(link[2], link[0]).unwrap(),
        ];
        let sg: BigRational = edges.iter().map(|&e| sched.gamma[e].clone().unwrap()).sum();
        let sb: BigRational = edges.iter().map(|&e| sched.beta[e].clone()).sum();
        let t = (&sg - BigRational::one()) / (&sg - &sb);
        if !(t > BigRational::zero() && t < BigRational::one()) {
            return Err(RealizeError::Unsupported(format!("event time {t} outside (0, 1)")));
        }
        events.entry(t).or_default().push(x);
    }

    let mut cur = realize_into(&c0, &gamma0, cfg, report)?;
    report.stage("collapsed complex at gamma", &cur, 0);
    let mut labels = labels0;
    let mut done: BTreeSet<usize> = BTreeSet::new();
    for (t, xs) in &events {
        let k = cur.complex().clone();
        let target = sched.at(&k, &labels, &done, t);
        let (at_t, steps) = follow(&cur, &target.radians(), cfg, false)?;
        report.stage(format!("schedule to t = {t}"), &at_t, steps);
        report.event(t);
        let ideal: Vec<usize> = xs
            .iter()
            .map(|&x| {
                let l = d.neighbors(x);
                let loc = |g: usize| labels.iter().position(|&y| y == g).unwrap();
                k.vertex_of_faces(loc(l[0]), loc(l[1]), loc(l[2])).unwrap()
            })
            .collect();
        let tr = truncate_vertices_at(&at_t, &ideal, cfg)?;
        report.truncation_deltas.push(tr.delta);
        report.stage("truncated", &tr.realization, 0);
        labels.extend(xs.iter().copied());
        done.extend(xs.iter().copied());
        cur = tr.realization;
    }

    let on_c = transport(&cur, c, &labels, false);
    on_c.validate(cfg.classify_tol)?;
    let end = sched.at(c, &(0..c.face_count()).collect::<Vec<_>>(), &done, &BigRational::one());
    let (at_end, steps) = follow(&on_c, &end.radians(), cfg, true)?;
    report.stage("schedule to t = 1", &at_end, steps);
    let at_end = at_end.with_exact(end);
    let (out, steps) = continue_path_counted(&at_end, a, cfg)?;
    report.stage("continuation to target", &out, steps);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;

    #[test]
    fn no_ideal_vertices_is_identity() {
        let r = crate::minkowski::build_prism(6, 0.8, 0.1).unwrap();
        let t = truncate_ideal(&r, &SolverConfig::default()).unwrap();
        assert_eq!(t.realization, r);
        assert!(t.truncated.is_empty());
    }

    #[test]
    fn collapsing_truncated_tetrahedron() {
        let d = truncated_tetrahedron().dual();
        let tris: BTreeSet<usize> = triangle_nodes(&d).into_iter().collect();
        assert_eq!(tris.len(), 4);
        let (d0, labels) = remove_nodes(&d, &tris);
        assert_eq!(d0.node_count(), 4);
        assert_eq!(labels.len(), 4);
    }
}
