use std::collections::BTreeMap;

use super::realization::corner;
use super::{gram_det3, vertex_point_tol, GeometryError, MVec};
use crate::complex::AbstractPolyhedron;

/// Cell structure recovered from a list of normals, with measurements.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub complex: AbstractPolyhedron,
    /// Point of each vertex of `complex`.
    pub points: Vec<MVec<f64>>,
    /// Dihedral angle of each edge of `complex`.
    pub edge_angles: Vec<f64>,
    pub edge_lengths: Vec<f64>,
    /// Face angle at each corner, following each face's vertex list.
    pub corner_angles: Vec<Vec<f64>>,
}

/// Recovers the polyhedron `∩ {<x, v_i> <= 0}` by enumerating face triples.
///
/// Face `i` of the result is the face on plane `i`; vertices are numbered by
/// their sorted face triples.
pub fn extract_combinatorics(normals: &[MVec<f64>], tol: f64) -> Result<Extraction, GeometryError> {
    let n = normals.len();
    let mut verts: BTreeMap<[usize; 3], MVec<f64>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&normals[i], &normals[j], &normals[k]);
                if a.inner(b).abs() >= 1.0 || a.inner(c).abs() >= 1.0 || b.inner(c).abs() >= 1.0 {
                    continue;
                }
                if gram_det3(a, b, c) <= tol {
                    continue;
                }
                let Ok(p) = vertex_point_tol(a, b, c, tol) else {
                    continue;
                };
                if normals.iter().all(|v| p.inner(v) <= tol.sqrt() * 1e-2) {
                    verts.insert([i, j, k], p);
                }
            }
        }
    }
    if verts.is_empty() {
        return Err(GeometryError::NonCompact("no finite vertices".into()));
    }
    let pts: Vec<MVec<f64>> = verts.values().copied().collect();
    for (x, p) in pts.iter().enumerate() {
        for q in &pts[x + 1..] {
            if -p.inner(q) < 1.0 + 1e-12 {
                return Err(GeometryError::DegenerateFace("more than three planes through a vertex".into()));
            }
        }
    }
    let triples: Vec<[usize; 3]> = verts.keys().copied().collect();
    let mut on_face: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, t) in triples.iter().enumerate() {
        for &f in t {
            on_face[f].push(v);
        }
    }
    let mut faces = Vec::with_capacity(n);
    for f in 0..n {
        let vs = &on_face[f];
        if vs.is_empty() {
            return Err(GeometryError::DegenerateFace(format!("plane {f} does not touch the polyhedron")));
        }
        faces.push(order_face(f, vs, &triples, &pts, &normals[f])?);
    }
    let complex = AbstractPolyhedron::build(triples.len(), faces)
        .map_err(|e| GeometryError::DegenerateFace(e.to_string()))?;
    let edge_angles = complex
        .edges()
        .iter()
        .map(|e| (-normals[e.faces[0]].inner(&normals[e.faces[1]])).clamp(-1.0, 1.0).acos())
        .collect();
    let edge_lengths = complex
        .edges()
        .iter()
        .map(|e| (-pts[e.vertices[0]].inner(&pts[e.vertices[1]])).max(1.0).acosh())
        .collect();
    let corner_angles = complex
        .faces()
        .iter()
        .map(|f| {
            let m = f.len();
            (0..m)
                .map(|i| corner(&pts[f[i]], &pts[f[(i + m - 1) % m]], &pts[f[(i + 1) % m]]))
                .collect()
        })
        .collect();
    Ok(Extraction {
        complex,
        points: pts,
        edge_angles,
        edge_lengths,
        corner_angles,
    })
}

/// Cyclic order of the vertices on face `f`, counterclockwise from outside.
fn order_face(
    f: usize,
    vs: &[usize],
    triples: &[[usize; 3]],
    pts: &[MVec<f64>],
    normal: &MVec<f64>,
) -> Result<Vec<usize>, GeometryError> {
    let others = |v: usize| -> [usize; 2] {
        let t = triples[v];
        let o: Vec<usize> = t.iter().copied().filter(|&g| g != f).collect();
        [o[0], o[1]]
    };
    let partner = |v: usize, g: usize| -> Result<usize, GeometryError> {
        let found: Vec<usize> = vs.iter().copied().filter(|&w| w != v && others(w).contains(&g)).collect();
        match found.len() {
            1 => Ok(found[0]),
            0 => Err(GeometryError::NonCompact(format!("edge between planes {f} and {g} is unbounded"))),
            _ => Err(GeometryError::DegenerateFace(format!("planes {f} and {g} meet in more than one edge"))),
        }
    };
    let mut cycle = vec![vs[0]];
    let mut prev_face = others(vs[0])[0];
    let mut cur = vs[0];
    loop {
        let [g, h] = others(cur);
        let next_face = if g == prev_face { h } else { g };
        let nxt = partner(cur, next_face)?;
        if nxt == vs[0] {
            break;
        }
        if cycle.contains(&nxt) || cycle.len() > vs.len() {
            return Err(GeometryError::DegenerateFace(format!("face {f} is not a polygon")));
        }
        cycle.push(nxt);
        prev_face = next_face;
        cur = nxt;
    }
    if cycle.len() != vs.len() || cycle.len() < 3 {
        return Err(GeometryError::DegenerateFace(format!("face {f} is not a single polygon")));
    }
    let k: Vec<[f64; 3]> = cycle.iter().map(|&v| pts[v].to_klein()).collect();
    let mut newell = [0.0; 3];
    for i in 0..k.len() {
        let (a, b) = (k[i], k[(i + 1) % k.len()]);
        newell[0] += a[1] * b[2] - a[2] * b[1];
        newell[1] += a[2] * b[0] - a[0] * b[2];
        newell[2] += a[0] * b[1] - a[1] * b[0];
    }
    let out = newell[0] * normal.x[1] + newell[1] * normal.x[2] + newell[2] * normal.x[3];
    if out < 0.0 {
        cycle.reverse();
    }
    Ok(cycle)
}

/// True when the two complexes have the same faces with the same oriented
/// cycles of vertices, vertices being identified by their face triples.
pub fn same_cell_structure(a: &AbstractPolyhedron, b: &AbstractPolyhedron) -> bool {
    if a.face_count() != b.face_count() || a.vertex_count() != b.vertex_count() {
        return false;
    }
    let (ta, tb) = (a.vertex_face_sets(), b.vertex_face_sets());
    a.faces().iter().zip(b.faces()).all(|(fa, fb)| {
        let ca: Vec<[usize; 3]> = fa.iter().map(|&v| ta[v]).collect();
        let cb: Vec<[usize; 3]> = fb.iter().map(|&v| tb[v]).collect();
        ca.len() == cb.len() && (0..cb.len()).any(|s| (0..cb.len()).all(|i| ca[i] == cb[(i + s) % cb.len()]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::prism;
    use crate::minkowski::build_prism;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn recovers_pentagonal_prism() {
        let r = build_prism(5, FRAC_PI_4, 0.01 * PI).unwrap();
        let x = extract_combinatorics(r.normals(), 1e-9).unwrap();
        assert_eq!(x.complex.vertex_count(), 6);
        assert_eq!(x.complex.edge_count(), 9);
        assert!(same_cell_structure(&x.complex, &prism(5)));
        assert!(r.validate(1e-9).is_ok());
    }

    #[test]
    fn removing_a_plane_breaks_compactness() {
        let r = build_prism(7, 0.6, 0.05).unwrap();
        let mut normals = r.normals().to_vec();
        normals.pop();
        assert!(matches!(
            extract_combinatorics(&normals, 1e-9),
            Err(GeometryError::NonCompact(_))
        ));
    }

    #[test]
    fn redundant_plane_is_degenerate() {
        let r = build_prism(6, 0.6, 0.05).unwrap();
        let mut normals = r.normals().to_vec();
        // a plane far outside the prism
        normals.push(MVec::new(3.0f64.sinh(), 0.0, 3.0f64.cosh(), 0.0));
        assert!(matches!(
            extract_combinatorics(&normals, 1e-9),
            Err(GeometryError::DegenerateFace(_))
        ));
    }
}
