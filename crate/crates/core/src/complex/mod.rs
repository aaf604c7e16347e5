//! Abstract polyhedra: trivalent cell complexes on the sphere and their duals.

mod catalog;
mod circuits;
mod dual;
mod iso;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::*;
pub use circuits::{Circuit, CircuitKind};
pub use dual::{DualComplex, DualError};
pub use iso::{canonical_code, isomorphic, isomorphic_duals, FaceMap};

/// Validation failures, reported for the first violated axiom.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("face {face} has {len} vertices; every face needs at least 3")]
    FaceTooSmall { face: usize, len: usize },
    #[error("face {face} uses vertex {vertex}, outside 0..{vertex_count}")]
    VertexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} lists vertex {vertex} more than once")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("faces {a} and {b} meet in more than a single edge or vertex")]
    FacesMeetTwice { a: usize, b: usize },
    #[error("edge {u}-{v} lies on {count} faces instead of 2")]
    EdgeNotInTwoFaces { u: usize, v: usize, count: usize },
    #[error("edge {u}-{v} is traversed twice in the same direction; faces are not coherently oriented")]
    Orientation { u: usize, v: usize },
    #[error("vertex {vertex} has degree {degree}; the complex must be trivalent")]
    NotTrivalent { vertex: usize, degree: usize },
    #[error("not a sphere: {detail}")]
    EulerViolation { detail: String },
}

/// Errors of [`AbstractPolyhedron::collapse_edge`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollapseError {
    #[error("complex has a prismatic 3-circuit")]
    NotSimple,
    #[error("edge {0} lies on a triangular face")]
    EdgeOnTriangle(usize),
    #[error("edge index {0} out of range")]
    NoSuchEdge(usize),
}

/// An edge of the primal complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// Endpoints, `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// Incident faces, sorted.
    pub faces: [usize; 2],
}

/// A validated trivalent cell complex on the sphere.
#[derive(Debug, Clone)]
pub struct AbstractPolyhedron {
    name: Option<String>,
    vertex_count: usize,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    edge_by_vertices: HashMap<(usize, usize), usize>,
    edge_by_faces: HashMap<(usize, usize), usize>,
    vertex_faces: Vec<[usize; 3]>,
    vertex_edges: Vec<[usize; 3]>,
}

impl PartialEq for AbstractPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.faces == other.faces
    }
}

/// JSON shape of a complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertex_count: usize,
    pub faces: Vec<Vec<usize>>,
}

/// Condition-(5) context of a quadrilateral face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadContext {
    pub face: usize,
    /// Boundary edges `v1v2, v2v3, v3v4, v4v1`.
    pub sides: [usize; 4],
    /// Third edges at `v2, v3, v4, v1` respectively.
    pub entering: [usize; 4],
}

/// Result of contracting one edge of a simple complex.
#[derive(Debug, Clone)]
pub struct ContractedComplex {
    /// Vertex count after the merge.
    pub vertex_count: usize,
    /// Face cycles after the merge (same face ids).
    pub faces: Vec<Vec<usize>>,
    /// Id of the merged 4-valent vertex.
    pub merged_vertex: usize,
    /// Surrounding edges of the original complex, in cyclic order.
    pub surrounding_edges: [usize; 4],
    /// Faces `f1..f4`; `f2` and `f4` contained the contracted edge.
    pub surrounding_faces: [usize; 4],
}

impl ContractedComplex {
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut nbrs: Vec<HashSet<usize>> = vec![HashSet::new(); self.vertex_count];
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        nbrs.iter().map(HashSet::len).collect()
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl AbstractPolyhedron {
    /// Validates the incidence axioms and derives edges.
    pub fn build(vertex_count: usize, faces: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        for (i, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(ComplexError::FaceTooSmall { face: i, len: f.len() });
            }
            let mut seen = HashSet::new();
            for &v in f {
                if v >= vertex_count {
                    return Err(ComplexError::VertexOutOfRange {
                        face: i,
                        vertex: v,
                        vertex_count,
                    });
                }
                if !seen.insert(v) {
                    return Err(ComplexError::RepeatedVertex { face: i, vertex: v });
                }
            }
        }

        // two faces may share one vertex, or the two ends of one edge
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
        for (i, f) in faces.iter().enumerate() {
            for &v in f {
                incident[v].push(i);
            }
        }
        let mut common: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (v, fs) in incident.iter().enumerate() {
            for x in 0..fs.len() {
                for y in x + 1..fs.len() {
                    common.entry(key(fs[x], fs[y])).or_default().push(v);
                }
            }
        }
        let consecutive = |f: &[usize], a: usize, b: usize| {
            let n = f.len();
            (0..n).any(|i| {
                let (p, q) = (f[i], f[(i + 1) % n]);
                (p == a && q == b) || (p == b && q == a)
            })
        };
        for (&(a, b), vs) in &common {
            let ok = match vs.len() {
                1 => true,
                2 => consecutive(&faces[a], vs[0], vs[1]) && consecutive(&faces[b], vs[0], vs[1]),
                _ => false,
            };
            if !ok {
                return Err(ComplexError::FacesMeetTwice { a, b });
            }
        }

        let mut directed: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for j in 0..f.len() {
                directed.entry((f[j], f[(j + 1) % f.len()])).or_default().push(i);
            }
        }
        let mut undirected: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for (&(u, v), fs) in &directed {
            let e = undirected.entry(key(u, v)).or_default();
            if u < v {
                e.0 += fs.len();
            } else {
                e.1 += fs.len();
            }
        }
        for (&(u, v), &(fwd, back)) in &undirected {
            if fwd + back != 2 {
                return Err(ComplexError::EdgeNotInTwoFaces {
                    u,
                    v,
                    count: fwd + back,
                });
            }
            if fwd != 1 {
                return Err(ComplexError::Orientation { u, v });
            }
        }

        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in undirected.keys() {
            degree[u] += 1;
            degree[v] += 1;
        }
        for (v, &d) in degree.iter().enumerate() {
            if d != 3 || incident[v].len() != 3 {
                return Err(ComplexError::NotTrivalent {
                    vertex: v,
                    degree: d,
                });
            }
        }

        let n = faces.len();
        let e = undirected.len();
        if n <= 3 {
            return Err(ComplexError::EulerViolation {
                detail: format!("{n} faces; a sphere complex needs at least 4"),
            });
        }
        if n as i64 - e as i64 + vertex_count as i64 != 2 {
            return Err(ComplexError::EulerViolation {
                detail: format!("N - E + V = {} - {} + {} != 2", n, e, vertex_count),
            });
        }

        let mut edges = Vec::with_capacity(e);
        let mut edge_by_vertices = HashMap::new();
        let mut edge_by_faces = HashMap::new();
        for &(u, v) in undirected.keys() {
            let f = directed[&(u, v)][0];
            let g = directed[&(v, u)][0];
            let idx = edges.len();
            edges.push(Edge {
                vertices: [u, v],
                faces: [f.min(g), f.max(g)],
            });
            edge_by_vertices.insert((u, v), idx);
            edge_by_faces.insert(key(f, g), idx);
        }

        // dual connectivity
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for ed in &edges {
                let [a, b] = ed.faces;
                let other = if a == f {
                    b
                } else if b == f {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(ComplexError::EulerViolation {
                detail: "face adjacency graph is disconnected".into(),
            });
        }

        // faces around each vertex, counterclockwise from outside
        let mut vertex_faces = vec![[0usize; 3]; vertex_count];
        let mut vertex_edges = vec![[0usize; 3]; vertex_count];
        for v in 0..vertex_count {
            let first = incident[v][0];
            let mut ring = [first, 0, 0];
            let mut cur = first;
            for slot in ring.iter_mut().skip(1) {
                let f = &faces[cur];
                let pos = f.iter().position(|&x| x == v).unwrap();
                let pred = f[(pos + f.len() - 1) % f.len()];
                cur = directed[&(v, pred)][0];
                *slot = cur;
            }
            vertex_faces[v] = ring;
            let mut es = [0usize; 3];
            let mut k = 0;
            for (&(a, b), &idx) in &edge_by_vertices {
                if a == v || b == v {
                    es[k] = idx;
                    k += 1;
                }
            }
            es.sort_unstable();
            vertex_edges[v] = es;
        }

        Ok(Self {
            name: None,
            vertex_count,
            faces,
            edges,
            edge_by_vertices,
            edge_by_faces,
            vertex_faces,
            vertex_edges,
        })
    }

    pub fn from_json(j: ComplexJson) -> Result<Self, ComplexError> {
        let mut c = Self::build(j.vertex_count, j.faces)?;
        c.name = j.name;
        Ok(c)
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            name: self.name.clone(),
            vertex_count: self.vertex_count,
            faces: self.faces.clone(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of faces `N`.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge index of the vertex pair, if adjacent.
    pub fn edge_between_vertices(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_by_vertices.get(&key(u, v)).copied()
    }

    /// Edge index shared by two faces, if adjacent.
    pub fn edge_between_faces(&self, f: usize, g: usize) -> Option<usize> {
        self.edge_by_faces.get(&key(f, g)).copied()
    }

    /// The three faces at `v`, counterclockwise as seen from outside.
    pub fn vertex_faces(&self, v: usize) -> [usize; 3] {
        self.vertex_faces[v]
    }

    /// The three edges at `v`, sorted by index.
    pub fn vertex_edges(&self, v: usize) -> [usize; 3] {
        self.vertex_edges[v]
    }

    /// Vertex at which three given faces meet.
    pub fn vertex_of_faces(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        let mut want = [a, b, c];
        want.sort_unstable();
        (0..self.vertex_count).find(|&v| {
            let mut fs = self.vertex_faces[v];
            fs.sort_unstable();
            fs == want
        })
    }

    /// Sorted face triple of every vertex.
    pub fn vertex_face_sets(&self) -> Vec<[usize; 3]> {
        self.vertex_faces
            .iter()
            .map(|fs| {
                let mut s = *fs;
                s.sort_unstable();
                s
            })
            .collect()
    }

    pub fn dual(&self) -> DualComplex {
        let directed: HashMap<(usize, usize), usize> = self
            .faces
            .iter()
            .enumerate()
            .flat_map(|(i, f)| (0..f.len()).map(move |j| ((f[j], f[(j + 1) % f.len()]), i)))
            .collect();
        let rotation = self
            .faces
            .iter()
            .map(|f| {
                (0..f.len())
                    .map(|j| directed[&(f[(j + 1) % f.len()], f[j])])
                    .collect()
            })
            .collect();
        DualComplex::from_rotation(rotation).expect("dual of a valid complex is valid")
    }

    pub fn prismatic_circuits(&self, k: usize) -> Vec<Circuit> {
        circuits::prismatic_circuits(self, k)
    }

    pub fn is_simple(&self) -> bool {
        self.prismatic_circuits(3).is_empty()
    }

    /// Condition-(5) data for each quadrilateral face, by face index.
    pub fn quadrilateral_contexts(&self) -> Vec<QuadContext> {
        let mut out = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if f.len() != 4 {
                continue;
            }
            let e = |a: usize, b: usize| self.edge_between_vertices(f[a], f[b]).unwrap();
            let sides = [e(0, 1), e(1, 2), e(2, 3), e(3, 0)];
            let third = |v: usize| {
                self.vertex_edges[f[v]]
                    .into_iter()
                    .find(|x| !sides.contains(x))
                    .unwrap()
            };
            out.push(QuadContext {
                face: fi,
                sides,
                entering: [third(1), third(2), third(3), third(0)],
            });
        }
        out
    }

    /// Contracts `edge` to a single 4-valent vertex.
    pub fn collapse_edge(&self, edge: usize) -> Result<ContractedComplex, CollapseError> {
        if edge >= self.edges.len() {
            return Err(CollapseError::NoSuchEdge(edge));
        }
        let [v1, v2] = self.edges[edge].vertices;
        let [fa, fb] = self.edges[edge].faces;
        if !self.is_simple() {
            return Err(CollapseError::NotSimple);
        }
        if self.faces[fa].len() == 3 || self.faces[fb].len() == 3 {
            return Err(CollapseError::EdgeOnTriangle(edge));
        }
        let succ = |f: usize, v: usize| {
            let c = &self.faces[f];
            c[(c.iter().position(|&x| x == v).unwrap() + 1) % c.len()]
        };
        let (f2, f4) = if succ(fa, v1) == v2 { (fa, fb) } else { (fb, fa) };
        let third = |v: usize| {
            self.vertex_faces[v]
                .into_iter()
                .find(|&f| f != f2 && f != f4)
                .unwrap()
        };
        let f1 = third(v1);
        let f3 = third(v2);
        let ef = |a, b| self.edge_between_faces(a, b).unwrap();
        let surrounding_edges = [ef(f1, f2), ef(f2, f3), ef(f3, f4), ef(f4, f1)];

        let faces = self
            .faces
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.iter()
                    .filter(|&&x| !(x == v2 && (i == f2 || i == f4)))
                    .map(|&x| {
                        let x = if x == v2 { v1 } else { x };
                        if x > v2 {
                            x - 1
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(ContractedComplex {
            vertex_count: self.vertex_count - 1,
            faces,
            merged_vertex: v1,
            surrounding_edges,
            surrounding_faces: [f1, f2, f3, f4],
        })
    }
}

impl Serialize for AbstractPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbstractPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ComplexJson::deserialize(d)?;
        Self::from_json(j).map_err(serde::de::Error::custom)
    }
}
