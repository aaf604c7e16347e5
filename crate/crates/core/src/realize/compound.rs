//! Decomposition along essential 3-circuits and gluing of the realized pieces.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::Matrix4;
use serde::Serialize;

use super::newton::{central_vertex, check_cells, solve_normals};
use super::{realize_into, PipelineReport, RealizeError, SolverConfig};
use crate::angles::AngleAssignment;
use crate::complex::{AbstractPolyhedron, DualComplex};
use crate::minkowski::{Lorentz, MVec, Realization};
use crate::scalar::ratio;

/// One piece of a decomposition. Node `i` of `dual` stands for face `labels[i]`
/// of the original complex, or for the new triangle of circuit `l` when
/// `labels[i] = N + l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub dual: DualComplex,
    pub labels: Vec<usize>,
}

impl Piece {
    pub fn local(&self, global: usize) -> Option<usize> {
        self.labels.iter().position(|&g| g == global)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundPlan {
    /// Face count of the original complex.
    pub faces: usize,
    /// Essential circuits, as sorted face triples, indexed by label.
    pub circuits: Vec<[usize; 3]>,
    pub pieces: Vec<Piece>,
    /// `(label, i, j)`: pieces `i < j` both carry the triangle of circuit `label`.
    pub pairs: Vec<(usize, usize, usize)>,
}

/// Nodes of `d` minus `cut`, grouped into connected components (sorted).
fn components(d: &DualComplex, cut: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; d.node_count()];
    for &x in cut {
        seen[x] = true;
    }
    let mut out = Vec::new();
    for s in 0..d.node_count() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &w in d.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    q.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Separating 3-cycles with at least two nodes on each side.
pub fn essential_circuits(d: &DualComplex) -> Vec<[usize; 3]> {
    d.separating_triangles()
        .into_iter()
        .filter(|t| components(d, t).iter().all(|k| k.len() >= 2))
        .collect()
}

/// Cuts `p` along the circuit `tri` (local nodes), capping each side with a new node labelled `label`.
fn split(p: &Piece, tri: [usize; 3], label: usize) -> [Piece; 2] {
    let d = &p.dual;
    let sides = components(d, &tri);
    assert_eq!(sides.len(), 2, "a separating triangle has two sides");
    let mut out = Vec::with_capacity(2);
    for side in &sides {
        let inside: BTreeSet<usize> = side.iter().copied().collect();
        let mut nodes: Vec<usize> = side.iter().chain(tri.iter()).copied().collect();
        nodes.sort_unstable();
        let t = nodes.len();
        let mut local = vec![usize::MAX; d.node_count()];
        for (i, &x) in nodes.iter().enumerate() {
            local[x] = i;
        }
        let mut tris: Vec<[usize; 3]> = d
            .triangles()
            .into_iter()
            .filter(|tr| tr.iter().any(|x| inside.contains(x)))
            .map(|tr| tr.map(|x| local[x]))
            .collect();
        for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let cap = if d.succ(u, v).is_some_and(|w| inside.contains(&w)) {
                [local[v], local[u], t]
            } else {
                [local[u], local[v], t]
            };
            tris.push(cap);
        }
        let dual = DualComplex::from_triangles(t + 1, &tris).expect("capped side is a triangulation");
        let mut labels: Vec<usize> = nodes.iter().map(|&x| p.labels[x]).collect();
        labels.push(label);
        out.push(Piece { dual, labels });
    }
    [out[0].clone(), out[1].clone()]
}

/// Splits `c` along all its essential 3-circuits.
pub fn decompose(c: &AbstractPolyhedron) -> Result<CompoundPlan, RealizeError> {
    let n = c.face_count();
    let d = c.dual();
    if essential_circuits(&d).is_empty() {
        return Err(RealizeError::NoEssentialCircuits);
    }
    let mut pieces = vec![Piece {
        dual: d,
        labels: (0..n).collect(),
    }];
    let mut circuits = Vec::new();
    loop {
        let found = pieces
            .iter()
            .enumerate()
            .find_map(|(i, p)| essential_circuits(&p.dual).first().map(|&t| (i, t)));
        let Some((i, tri)) = found else { break };
        let p = pieces.remove(i);
        let mut global = tri.map(|x| p.labels[x]);
        global.sort_unstable();
        let [a, b] = split(&p, tri, n + circuits.len());
        circuits.push(global);
        pieces.insert(i, b);
        pieces.insert(i, a);
    }
    let pairs = (0..circuits.len())
        .map(|l| {
            let holders: Vec<usize> = (0..pieces.len()).filter(|&k| pieces[k].local(n + l).is_some()).collect();
            (l, holders[0], holders[1])
        })
        .collect();
    Ok(CompoundPlan {
        faces: n,
        circuits,
        pieces,
        pairs,
    })
}

impl CompoundPlan {
    /// Inherited angles on old edges and π/2 on the edges of the new triangles.
    pub fn piece_angles(&self, k: usize, c: &AbstractPolyhedron, a: &AngleAssignment) -> AngleAssignment {
        let p = &self.pieces[k];
        let pc = p.dual.to_primal().expect("pieces are valid");
        AngleAssignment::new(
            pc.edges()
                .iter()
                .map(|e| {
                    let (f, g) = (p.labels[e.faces[0]], p.labels[e.faces[1]]);
                    if f >= self.faces || g >= self.faces {
                        ratio(1, 2)
                    } else {
                        a.get(c.edge_between_faces(f, g).expect("inherited edge")).clone()
                    }
                })
                .collect(),
        )
    }
}

/// Output of [`glue`].
#[derive(Debug, Clone)]
pub struct GlueReport {
    pub realization: Realization,
    /// Largest coordinate difference between the two copies of a merged face.
    pub coplanarity_defect: f64,
    /// `max |M^T J M - J|` of each gluing map, by label.
    pub isometry_defects: Vec<f64>,
}

/// Triangle corners of circuit `label` in piece `k`, keyed by the pair of other
/// faces through them, and the triangle's normal.
fn triangle_frame(
    plan: &CompoundPlan,
    k: usize,
    label: usize,
    r: &Realization,
    t: &Lorentz<f64>,
) -> (BTreeMap<[usize; 2], MVec<f64>>, MVec<f64>) {
    let p = &plan.pieces[k];
    let tri = p.local(plan.faces + label).unwrap();
    let pts = r.vertex_points();
    let c = r.complex();
    let mut corners = BTreeMap::new();
    for &v in &c.faces()[tri] {
        let mut key: Vec<usize> = c.vertex_faces(v).iter().filter(|&&f| f != tri).map(|&f| p.labels[f]).collect();
        key.sort_unstable();
        corners.insert([key[0], key[1]], t.apply(&pts[v]));
    }
    (corners, t.apply(&r.normals()[tri]))
}

fn columns(vs: [MVec<f64>; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| vs[j].x[i])
}

/// Assembles the piece realizations into one realization of `c`.
pub fn glue(
    pieces: &[Realization],
    plan: &CompoundPlan,
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
) -> Result<GlueReport, RealizeError> {
    let m = plan.pieces.len();
    let mut maps = vec![Lorentz::identity(); m];
    let mut cluster: Vec<usize> = (0..m).collect();
    let mut defects = Vec::new();
    let mut pairs = plan.pairs.clone();
    pairs.sort_unstable();
    for &(l, i, j) in &pairs {
        let (pi, ni) = triangle_frame(plan, i, l, &pieces[i], &maps[i]);
        let (pj, nj) = triangle_frame(plan, j, l, &pieces[j], &maps[j]);
        if pi.keys().ne(pj.keys()) || pi.len() != 3 {
            return Err(RealizeError::IncongruentTriangles(f64::INFINITY));
        }
        let p: Vec<MVec<f64>> = pi.values().copied().collect();
        let q: Vec<MVec<f64>> = pj.values().copied().collect();
        let mp = columns([p[0], p[1], p[2], -ni]);
        let mq = columns([q[0], q[1], q[2], nj]);
        let inv = mq.try_inverse().ok_or(RealizeError::IsometrySolveFailed)?;
        let lm = mp * inv;
        let l4 = Lorentz {
            m: std::array::from_fn(|r| std::array::from_fn(|s| lm[(r, s)])),
        };
        let defect = l4.lorentz_defect();
        defects.push(defect);
        if !(defect < 1e-8) {
            return Err(RealizeError::IncongruentTriangles(defect));
        }
        let (ci, cj) = (cluster[i], cluster[j]);
        if ci == cj {
            return Err(RealizeError::Unsupported("gluing pairs form a cycle".into()));
        }
        for k in 0..m {
            if cluster[k] == cj {
                maps[k] = l4.compose(&maps[k]);
                cluster[k] = ci;
            }
        }
    }
    let n = plan.faces;
    let mut normals = vec![None::<MVec<f64>>; n];
    let mut coplanarity: f64 = 0.0;
    for (k, p) in plan.pieces.iter().enumerate() {
        for (loc, &g) in p.labels.iter().enumerate() {
            if g >= n {
                continue;
            }
            let v = maps[k].apply(&pieces[k].normals()[loc]);
            match normals[g] {
                None => normals[g] = Some(v),
                Some(w) => coplanarity = coplanarity.max(w.max_abs_diff(&v)),
            }
        }
    }
    let normals: Vec<MVec<f64>> = normals
        .into_iter()
        .map(|v| v.ok_or_else(|| RealizeError::Unsupported("a face belongs to no piece".into())))
        .collect::<Result<_, _>>()?;
    Ok(GlueReport {
        realization: Realization::new(c.clone(), normals, a.radians(), Some(a.clone())),
        coplanarity_defect: coplanarity,
        isometry_defects: defects,
    })
}

/// Route for complexes with essential circuits: realize every piece, then glue.
pub(crate) fn realize_compound(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    cfg: &SolverConfig,
    report: &mut PipelineReport,
) -> Result<Realization, RealizeError> {
    let plan = decompose(c)?;
    let mut reals = Vec::with_capacity(plan.pieces.len());
    for (k, p) in plan.pieces.iter().enumerate() {
        let pc = p.dual.to_primal().map_err(|e| RealizeError::Unsupported(e.to_string()))?;
        let pa = plan.piece_angles(k, c, a);
        let r = realize_into(&pc, &pa, cfg, report)?;
        report.stage(format!("piece {k}"), &r, 0);
        reals.push(r);
    }
    let g = glue(&reals, &plan, c, a)?;
    report.coplanarity_defect = Some(g.coplanarity_defect);
    report.stage("glued", &g.realization, 0);
    // Composed gluing maps lose a few digits; one Newton solve restores them.
    let target = a.radians();
    let base = central_vertex(c, g.realization.normals());
    let (normals, steps) = solve_normals(c, &target, g.realization.normals(), base, cfg)?;
    check_cells(c, &normals, cfg)?;
    let r = Realization::new(c.clone(), normals, target, Some(a.clone()));
    report.stage("polished", &r, steps);
    Ok(r)
}
