use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AbstractPolyhedron, ComplexError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("node {0} has fewer than 3 neighbors")]
    LowDegree(usize),
    #[error("node {0} lists an invalid neighbor")]
    BadNeighbor(usize),
    #[error("edge {0}-{1} is not listed by both endpoints")]
    Asymmetric(usize, usize),
    #[error("rotation system is inconsistent around node {0}")]
    Inconsistent(usize),
    #[error("not a sphere triangulation: {0}")]
    Euler(String),
    #[error("triangle list does not close up around node {0}")]
    OpenFan(usize),
    #[error(transparent)]
    Primal(#[from] ComplexError),
}

/// Simplicial triangulation of the sphere stored as a rotation system.
///
/// `rotation[a]` lists the neighbors of `a` counterclockwise as seen from
/// outside; consecutive neighbors `b, c` span the triangle `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualComplex {
    rotation: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DualJson {
    node_count: usize,
    rotation: Vec<Vec<usize>>,
}

impl Serialize for DualComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DualJson {
            node_count: self.rotation.len(),
            rotation: self.rotation.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DualJson::deserialize(d)?;
        if j.node_count != j.rotation.len() {
            return Err(serde::de::Error::custom("node_count does not match rotation"));
        }
        Self::from_rotation(j.rotation).map_err(serde::de::Error::custom)
    }
}

impl DualComplex {
    /// Validates a rotation system; each list is rotated to start at its smallest entry.
    pub fn from_rotation(mut rotation: Vec<Vec<usize>>) -> Result<Self, DualError> {
        let n = rotation.len();
        for r in rotation.iter_mut() {
            if let Some(i) = r.iter().enumerate().min_by_key(|&(_, &x)| x).map(|(i, _)| i) {
                r.rotate_left(i);
            }
        }
        for (a, r) in rotation.iter().enumerate() {
            if r.len() < 3 {
                return Err(DualError::LowDegree(a));
            }
            let set: BTreeSet<_> = r.iter().collect();
            if set.len() != r.len() || r.iter().any(|&b| b >= n || b == a) {
                return Err(DualError::BadNeighbor(a));
            }
        }
        let d = Self { rotation };
        for a in 0..n {
            for (i, &b) in d.rotation[a].iter().enumerate() {
                if !d.rotation[b].contains(&a) {
                    return Err(DualError::Asymmetric(a, b));
                }
                let c = d.rotation[a][(i + 1) % d.rotation[a].len()];
                if d.succ(b, c) != Some(a) {
                    return Err(DualError::Inconsistent(a));
                }
            }
        }
        let e = d.edge_count();
        let t = d.triangles().len();
        if n < 4 || n as i64 - e as i64 + t as i64 != 2 || 2 * e != 3 * t {
            return Err(DualError::Euler(format!("nodes {n}, edges {e}, triangles {t}")));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &b in &d.rotation[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DualError::Euler("disconnected".into()));
        }
        Ok(d)
    }

    /// Builds the rotation system from consistently oriented triangles.
    pub fn from_triangles(n: usize, triangles: &[[usize; 3]]) -> Result<Self, DualError> {
        let mut next: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
        for &[a, b, c] in triangles {
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                if x >= n || next[x].insert(y, z).is_some() {
                    return Err(DualError::Inconsistent(x));
                }
            }
        }
        let mut rotation = Vec::with_capacity(n);
        for (a, m) in next.iter().enumerate() {
            let start = *m.keys().min().ok_or(DualError::LowDegree(a))?;
            let mut r = vec![start];
            let mut cur = start;
            loop {
                cur = *m.get(&cur).ok_or(DualError::OpenFan(a))?;
                if cur == start {
                    break;
                }
                if r.len() > m.len() {
                    return Err(DualError::OpenFan(a));
                }
                r.push(cur);
            }
            if r.len() != m.len() {
                return Err(DualError::OpenFan(a));
            }
            rotation.push(r);
        }
        Self::from_rotation(rotation)
    }

    pub fn node_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.rotation[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.rotation[a].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rotation[a].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted list of edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, r) in self.rotation.iter().enumerate() {
            for &b in r {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Neighbor of `a` following `b` counterclockwise.
    pub fn succ(&self, a: usize, b: usize) -> Option<usize> {
        let r = &self.rotation[a];
        let i = r.iter().position(|&x| x == b)?;
        Some(r[(i + 1) % r.len()])
    }

    /// Neighbor of `a` preceding `b` counterclockwise.
    pub fn pred(&self, a: usize, b: usize) -> Option<usize> {
        let r = &self.rotation[a];
        let i = r.iter().position(|&x| x == b)?;
        Some(r[(i + r.len() - 1) % r.len()])
    }

    /// Oriented triangles, each rotated so its smallest node comes first, sorted.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut set = BTreeSet::new();
        for (a, r) in self.rotation.iter().enumerate() {
            for i in 0..r.len() {
                set.insert(canonical_triangle([a, r[i], r[(i + 1) % r.len()]]));
            }
        }
        set.into_iter().collect()
    }

    /// True when `{a, b, c}` bounds a triangle.
    pub fn is_face(&self, a: usize, b: usize, c: usize) -> bool {
        self.succ(a, b) == Some(c) || self.succ(a, c) == Some(b)
    }

    /// Primal complex: faces keep node ids; vertices are the sorted triangles.
    pub fn to_primal(&self) -> Result<AbstractPolyhedron, DualError> {
        let tris = self.triangles();
        let index: BTreeMap<[usize; 3], usize> =
            tris.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let faces = self
            .rotation
            .iter()
            .enumerate()
            .map(|(a, r)| {
                (0..r.len())
                    .map(|i| index[&canonical_triangle([a, r[(i + r.len() - 1) % r.len()], r[i]])])
                    .collect()
            })
            .collect();
        Ok(AbstractPolyhedron::build(tris.len(), faces)?)
    }

    /// 3-cycles `a < b < c` that do not bound a triangle.
    pub fn separating_triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..self.node_count() {
            for &b in &self.rotation[a] {
                if b <= a {
                    continue;
                }
                for &c in &self.rotation[b] {
                    if c <= b || !self.adjacent(a, c) {
                        continue;
                    }
                    if !self.is_face(a, b, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_simple(&self) -> bool {
        self.separating_triangles().is_empty()
    }

    /// Inserts a new degree-3 node inside the triangle `(a, b, c)`.
    pub fn insert_in_triangle(&self, a: usize, b: usize, c: usize) -> Option<Self> {
        let (b, c) = if self.succ(a, b) == Some(c) {
            (b, c)
        } else if self.succ(a, c) == Some(b) {
            (c, b)
        } else {
            return None;
        };
        let x = self.node_count();
        let mut rot = self.rotation.clone();
        let put_after = |rot: &mut Vec<Vec<usize>>, at: usize, after: usize| {
            let i = rot[at].iter().position(|&y| y == after).unwrap();
            rot[at].insert(i + 1, x);
        };
        put_after(&mut rot, a, b);
        put_after(&mut rot, b, c);
        put_after(&mut rot, c, a);
        rot.push(vec![a, b, c]);
        Self::from_rotation(rot).ok()
    }

    /// Removes a degree-3 node, renumbering later nodes down by one.
    pub fn remove_degree3(&self, x: usize) -> Option<Self> {
        if self.degree(x) != 3 || self.node_count() <= 4 {
            return None;
        }
        let rot = self
            .rotation
            .iter()
            .enumerate()
            .filter(|&(a, _)| a != x)
            .map(|(_, r)| {
                r.iter()
                    .filter(|&&y| y != x)
                    .map(|&y| if y > x { y - 1 } else { y })
                    .collect()
            })
            .collect();
        Self::from_rotation(rot).ok()
    }

    /// Applies a node permutation: node `a` becomes `map[a]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let mut rot = vec![Vec::new(); self.node_count()];
        for (a, r) in self.rotation.iter().enumerate() {
            rot[map[a]] = r.iter().map(|&b| map[b]).collect();
        }
        Self::from_rotation(rot).expect("relabeling preserves validity")
    }
}

pub(crate) fn canonical_triangle(t: [usize; 3]) -> [usize; 3] {
    let [a, b, c] = t;
    if a <= b && a <= c {
        [a, b, c]
    } else if b <= a && b <= c {
        [b, c, a]
    } else {
        [c, a, b]
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn cube_dual_is_octahedron() {
        let d = cube().dual();
        assert_eq!(d.node_count(), 6);
        assert_eq!(d.triangles().len(), 8);
        assert!(d.rotation().iter().all(|r| r.len() == 4));
    }

    #[test]
    fn dodecahedron_dual_is_icosahedron() {
        let d = dodecahedron().dual();
        assert_eq!((d.node_count(), d.triangles().len(), d.edge_count()), (12, 20, 30));
    }

    #[test]
    fn prism_dual_counts() {
        let d = prism(5).dual();
        assert_eq!((d.node_count(), d.triangles().len(), d.edge_count()), (5, 6, 9));
    }

    #[test]
    fn primal_dual_round_trip() {
        for c in corpus() {
            let back = c.dual().to_primal().unwrap();
            assert!(isomorphic(&c, &back).is_some(), "{:?}", c.name());
            assert_eq!(back.dual(), c.dual());
        }
    }

    #[test]
    fn insert_and_remove_are_inverse() {
        let d = dodecahedron().dual();
        let t = d.triangles()[3];
        let e = d.insert_in_triangle(t[0], t[1], t[2]).unwrap();
        assert_eq!(e.node_count(), 13);
        assert_eq!(e.separating_triangles(), vec![t]);
        assert_eq!(e.remove_degree3(12).unwrap(), d);
    }

    #[test]
    fn json_shape() {
        let d = tetrahedron().dual();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["node_count"], 4);
        let back: DualComplex = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
