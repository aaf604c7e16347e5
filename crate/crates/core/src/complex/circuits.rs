use std::collections::HashSet;

use serde::Serialize;

use super::AbstractPolyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Prismatic3,
    Prismatic4,
}

/// A prismatic circuit of the dual complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Circuit {
    pub kind: CircuitKind,
    /// Cyclic node sequence, starting at the smallest node and heading to
    /// its smaller cycle neighbor.
    pub dual_nodes: Vec<usize>,
    /// Primal edges crossed, `crossed_edges[i]` between `dual_nodes[i]` and `dual_nodes[i + 1]`.
    pub crossed_edges: Vec<usize>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.dual_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dual_nodes.is_empty()
    }

    pub fn sorted_nodes(&self) -> Vec<usize> {
        let mut v = self.dual_nodes.clone();
        v.sort_unstable();
        v
    }
}

pub(crate) fn crossed(c: &AbstractPolyhedron, cycle: &[usize]) -> Option<Vec<usize>> {
    (0..cycle.len())
        .map(|i| c.edge_between_faces(cycle[i], cycle[(i + 1) % cycle.len()]))
        .collect()
}

pub(crate) fn endpoints_distinct(c: &AbstractPolyhedron, edges: &[usize]) -> bool {
    let mut seen = HashSet::new();
    edges
        .iter()
        .flat_map(|&e| c.edges()[e].vertices)
        .all(|v| seen.insert(v))
}

pub(super) fn prismatic_circuits(c: &AbstractPolyhedron, k: usize) -> Vec<Circuit> {
    let n = c.face_count();
    let adj = |a: usize, b: usize| c.edge_between_faces(a, b).is_some();
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&b| b != a && adj(a, b)).collect())
        .collect();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    match k {
        3 => {
            for a in 0..n {
                for &b in nbrs[a].iter().filter(|&&b| b > a) {
                    for &cc in nbrs[b].iter().filter(|&&x| x > b) {
                        if adj(a, cc) {
                            cycles.push(vec![a, b, cc]);
                        }
                    }
                }
            }
        }
        4 => {
            for a in 0..n {
                let up: Vec<usize> = nbrs[a].iter().copied().filter(|&b| b > a).collect();
                for (i, &b) in up.iter().enumerate() {
                    for &d in &up[i + 1..] {
                        let (b, d) = (b.min(d), b.max(d));
                        for &x in nbrs[b].iter().filter(|&&x| x > a && x != d) {
                            if adj(x, d) {
                                cycles.push(vec![a, b, x, d]);
                            }
                        }
                    }
                }
            }
        }
        _ => return Vec::new(),
    }
    let kind = if k == 3 {
        CircuitKind::Prismatic3
    } else {
        CircuitKind::Prismatic4
    };
    let mut out: Vec<Circuit> = cycles
        .into_iter()
        .filter_map(|cyc| {
            let e = crossed(c, &cyc)?;
            endpoints_distinct(c, &e).then(|| Circuit {
                kind,
                dual_nodes: cyc,
                crossed_edges: e,
            })
        })
        .collect();
    out.sort_by(|x, y| {
        (x.sorted_nodes(), &x.dual_nodes).cmp(&(y.sorted_nodes(), &y.dual_nodes))
    });
    out
}
