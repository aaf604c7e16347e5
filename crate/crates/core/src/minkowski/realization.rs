use super::{cross3, gram_det3, vertex_point_tol, GeometryError, Lorentz, MVec};
use crate::angles::AngleAssignment;
use crate::complex::AbstractPolyhedron;

/// Unit outward normals of a polyhedron, one per face of `complex`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    complex: AbstractPolyhedron,
    normals: Vec<MVec<f64>>,
    target: Vec<f64>,
    exact: Option<AngleAssignment>,
}

impl Realization {
    /// Wraps normals without checking them; see [`Realization::validate`].
    pub fn new(
        complex: AbstractPolyhedron,
        normals: Vec<MVec<f64>>,
        target: Vec<f64>,
        exact: Option<AngleAssignment>,
    ) -> Self {
        assert_eq!(normals.len(), complex.face_count());
        assert_eq!(target.len(), complex.edge_count());
        Self {
            complex,
            normals,
            target,
            exact,
        }
    }

    pub fn with_exact(mut self, exact: AngleAssignment) -> Self {
        self.target = exact.radians();
        self.exact = Some(exact);
        self
    }

    pub fn complex(&self) -> &AbstractPolyhedron {
        &self.complex
    }

    pub fn normals(&self) -> &[MVec<f64>] {
        &self.normals
    }

    /// Requested angles in radians, by edge.
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn exact(&self) -> Option<&AngleAssignment> {
        self.exact.as_ref()
    }

    /// Angles `arccos(-<v_i, v_j>)` of the current normals.
    pub fn achieved_angles(&self) -> Vec<f64> {
        self.complex
            .edges()
            .iter()
            .map(|e| {
                let ip = self.normals[e.faces[0]].inner(&self.normals[e.faces[1]]);
                (-ip).clamp(-1.0, 1.0).acos()
            })
            .collect()
    }

    pub fn angle_deviation(&self) -> f64 {
        self.achieved_angles()
            .iter()
            .zip(&self.target)
            .fold(0.0, |m, (a, t)| m.max((a - t).abs()))
    }

    /// Largest violation of the unit-norm and edge equations.
    pub fn gram_residual(&self) -> f64 {
        let norms = self.normals.iter().map(|v| (v.norm2() - 1.0).abs());
        let edges = self.complex.edges().iter().zip(&self.target).map(|(e, t)| {
            (self.normals[e.faces[0]].inner(&self.normals[e.faces[1]]) + t.cos()).abs()
        });
        norms.chain(edges).fold(0.0, f64::max)
    }

    /// Gram determinant of the three normals at each vertex.
    pub fn vertex_determinants(&self) -> Vec<f64> {
        (0..self.complex.vertex_count())
            .map(|v| {
                let [a, b, c] = self.complex.vertex_faces(v);
                gram_det3(&self.normals[a], &self.normals[b], &self.normals[c])
            })
            .collect()
    }

    /// Smallest vertex determinant; positive for a compact polyhedron.
    pub fn margin(&self) -> f64 {
        self.vertex_determinants().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Vertex points; an ideal vertex is returned on the light cone with `x0 = 1`.
    pub fn vertex_points(&self) -> Vec<MVec<f64>> {
        (0..self.complex.vertex_count())
            .map(|v| {
                let [a, b, c] = self.complex.vertex_faces(v);
                let (na, nb, nc) = (&self.normals[a], &self.normals[b], &self.normals[c]);
                vertex_point_tol(na, nb, nc, 0.0).unwrap_or_else(|_| {
                    let w = cross3(na, nb, nc);
                    let s = if w.x[0] < 0.0 { -1.0 } else { 1.0 } / w.x[0].abs().max(f64::MIN_POSITIVE);
                    w * s
                })
            })
            .collect()
    }

    /// Hyperbolic length of every edge.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let p = self.vertex_points();
        self.complex
            .edges()
            .iter()
            .map(|e| (-p[e.vertices[0]].inner(&p[e.vertices[1]])).max(1.0).acosh())
            .collect()
    }

    /// Face angles at every corner, in the order of each face's vertex list.
    pub fn corner_angles(&self) -> Vec<Vec<f64>> {
        let p = self.vertex_points();
        self.complex
            .faces()
            .iter()
            .map(|f| {
                (0..f.len())
                    .map(|i| corner(&p[f[i]], &p[f[(i + f.len() - 1) % f.len()]], &p[f[(i + 1) % f.len()]]))
                    .collect()
            })
            .collect()
    }

    /// Sign of `det[p, v_a, v_b, v_c]` at each vertex, faces taken counterclockwise.
    pub fn orientation_signs(&self) -> Vec<f64> {
        let p = self.vertex_points();
        (0..self.complex.vertex_count())
            .map(|v| {
                let [a, b, c] = self.complex.vertex_faces(v);
                super::det4(&p[v], &self.normals[a], &self.normals[b], &self.normals[c]).signum()
            })
            .collect()
    }

    /// Applies an isometry to every normal.
    pub fn transformed(&self, l: &Lorentz<f64>) -> Self {
        Self {
            normals: self.normals.iter().map(|v| l.apply(v)).collect(),
            ..self.clone()
        }
    }

    /// Same normals, new target angles.
    pub fn retargeted(&self, target: Vec<f64>, exact: Option<AngleAssignment>) -> Self {
        Self::new(self.complex.clone(), self.normals.clone(), target, exact)
    }

    /// Checks the realization invariants: every edge intersecting, every vertex finite,
    /// and the cell structure of the normals equal to `complex`.
    pub fn validate(&self, tol: f64) -> Result<(), GeometryError> {
        for e in self.complex.edges() {
            let ip = self.normals[e.faces[0]].inner(&self.normals[e.faces[1]]);
            if !(ip > -1.0 && ip <= tol) {
                return Err(GeometryError::NotIntersecting(ip));
            }
        }
        if self.margin() <= tol {
            return Err(GeometryError::IdealPoint);
        }
        let x = super::extract_combinatorics(&self.normals, tol)?;
        if !super::same_cell_structure(&x.complex, &self.complex) {
            return Err(GeometryError::DegenerateFace("cell structure differs from the complex".into()));
        }
        Ok(())
    }
}

pub(crate) fn corner(p: &MVec<f64>, q: &MVec<f64>, r: &MVec<f64>) -> f64 {
    let tq = *q + *p * p.inner(q);
    let tr = *r + *p * p.inner(r);
    let c = tq.inner(&tr) / (tq.norm2() * tr.norm2()).sqrt();
    c.clamp(-1.0, 1.0).acos()
}
