use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{apply_move, move_for_edge, new_3cycles, MoveError, ReduceError, WhiteheadMove};
use crate::complex::{isomorphic_duals, prism_dual, split_prism_dual, DualComplex};

/// The outer polygon `P` (link of `v_inf`) and how interior nodes attach to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterPolygonView {
    pub v_inf: usize,
    /// Link of `v_inf` in rotation order, starting at its lowest id.
    pub polygon: Vec<usize>,
    pub interior: Vec<usize>,
    pub interior_edges: Vec<(usize, usize)>,
    /// Runs of consecutive polygon nodes in each interior node's link.
    pub components: BTreeMap<usize, Vec<Vec<usize>>>,
    /// Interior nodes with exactly one interior neighbor.
    pub endpoints: Vec<usize>,
}

impl OuterPolygonView {
    pub fn interior_degree(&self, a: usize) -> usize {
        self.interior_edges
            .iter()
            .filter(|&&(x, y)| x == a || y == a)
            .count()
    }

    pub fn is_endpoint(&self, a: usize) -> bool {
        self.endpoints.contains(&a)
    }
}

fn view_at(d: &DualComplex, v_inf: usize) -> OuterPolygonView {
    let mut polygon = d.neighbors(v_inf).to_vec();
    let start = polygon
        .iter()
        .enumerate()
        .min_by_key(|&(_, &x)| x)
        .map(|(i, _)| i)
        .unwrap();
    polygon.rotate_left(start);
    let pos: BTreeMap<usize, usize> = polygon.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let interior: Vec<usize> = (0..d.node_count())
        .filter(|&x| x != v_inf && !pos.contains_key(&x))
        .collect();
    let is_int = |x: usize| x != v_inf && !pos.contains_key(&x);
    let interior_edges: Vec<(usize, usize)> = d
        .edges()
        .into_iter()
        .filter(|&(a, b)| is_int(a) && is_int(b))
        .collect();
    let mut components = BTreeMap::new();
    for &a in &interior {
        let r = d.neighbors(a);
        let k = r.len();
        let Some(off) = (0..k).find(|&i| !pos.contains_key(&r[i])) else {
            components.insert(a, vec![r.to_vec()]);
            continue;
        };
        let mut runs: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        for i in 1..=k {
            let x = r[(off + i) % k];
            if pos.contains_key(&x) {
                cur.push(x);
            } else if !cur.is_empty() {
                runs.push(std::mem::take(&mut cur));
            }
        }
        runs.sort_by_key(|run| run.iter().map(|x| pos[x]).min().unwrap());
        components.insert(a, runs);
    }
    let endpoints = interior
        .iter()
        .copied()
        .filter(|&a| {
            interior_edges
                .iter()
                .filter(|&&(x, y)| x == a || y == a)
                .count()
                == 1
        })
        .collect();
    OuterPolygonView {
        v_inf,
        polygon,
        interior,
        interior_edges,
        components,
        endpoints,
    }
}

fn choose_v_inf(d: &DualComplex) -> usize {
    (0..d.node_count())
        .max_by_key(|&a| (d.degree(a), std::cmp::Reverse(a)))
        .unwrap()
}

fn check_input(d: &DualComplex) -> Result<(), ReduceError> {
    let n = d.node_count();
    if n <= 7 {
        return Err(ReduceError::TooSmall(n));
    }
    if !d.is_simple() {
        return Err(ReduceError::NotSimple);
    }
    if isomorphic_duals(d, &prism_dual(n)).is_some() {
        return Err(ReduceError::IsPrism);
    }
    Ok(())
}

/// Outer polygon view at the highest-degree node (lowest id on ties).
pub fn outer_view(d: &DualComplex) -> Result<OuterPolygonView, ReduceError> {
    check_input(d)?;
    Ok(view_at(d, choose_v_inf(d)))
}

/// Role of a move within the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// Shrinks a component of a non-endpoint.
    ShrinkComponent,
    /// Hands one connection of an endpoint to its interior neighbor.
    Transfer,
    /// Removes a component other than the kept pair.
    Eliminate,
    /// Flips a polygon edge, adding a node to the polygon.
    Grow,
    /// Detaches the branch node from the far end of the endpoint's run.
    BranchPivot,
    /// Walks the connection back along the path of the endpoint.
    BranchSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpisodeCase {
    /// A non-endpoint has a component of two or more nodes.
    Component,
    /// An endpoint has more than three polygon neighbors.
    Borrow,
    /// Only single-node components and endpoints with exactly three.
    Branch,
    /// Final shrinking of one endpoint to exactly three polygon neighbors.
    Finish,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Episode {
    pub case: EpisodeCase,
    pub moves: Range<usize>,
    pub polygon_before: usize,
    pub polygon_after: usize,
}

/// Certified sequence of moves from a simple complex to the split prism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub start: DualComplex,
    pub moves: Vec<WhiteheadMove>,
    /// Prismatic 3-circuits after each step (always zero).
    pub witnesses: Vec<usize>,
    pub kinds: Vec<StepKind>,
    pub episodes: Vec<Episode>,
    pub end: DualComplex,
    pub v_inf: usize,
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    start: DualComplex,
    moves: Vec<WhiteheadMove>,
    end: DualComplex,
}

impl Serialize for ReductionTrace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TraceJson {
            start: self.start.clone(),
            moves: self.moves.clone(),
            end: self.end.clone(),
        }
        .serialize(s)
    }
}

/// A trace as read from disk: only the start, moves and claimed end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub start: DualComplex,
    pub moves: Vec<WhiteheadMove>,
    pub end: DualComplex,
}

impl TraceFile {
    /// Replays the moves, checking simplicity at every step and the claimed end.
    pub fn verify(&self) -> Result<DualComplex, ReduceError> {
        let mut d = self.start.clone();
        for (i, m) in self.moves.iter().enumerate() {
            d = apply_move(&d, m)?;
            if !d.is_simple() {
                return Err(ReduceError::InternalInvariantBroken(format!(
                    "step {i} leaves a prismatic 3-circuit"
                )));
            }
        }
        if d != self.end {
            return Err(ReduceError::InternalInvariantBroken(
                "replayed complex differs from the recorded end".into(),
            ));
        }
        if isomorphic_duals(&d, &split_prism_dual(d.node_count())).is_none() {
            return Err(ReduceError::InternalInvariantBroken("end is not the split prism".into()));
        }
        Ok(d)
    }
}

struct Reducer {
    d: DualComplex,
    v_inf: usize,
    moves: Vec<WhiteheadMove>,
    witnesses: Vec<usize>,
    kinds: Vec<StepKind>,
    seen: HashSet<DualComplex>,
}

fn broken(msg: impl Into<String>) -> ReduceError {
    ReduceError::InternalInvariantBroken(msg.into())
}

impl Reducer {
    fn view(&self) -> OuterPolygonView {
        view_at(&self.d, self.v_inf)
    }

    fn flip(&mut self, a: usize, b: usize, kind: StepKind) -> Result<(), ReduceError> {
        let m = move_for_edge(&self.d, a, b)
            .map_err(|e: MoveError| broken(format!("{kind:?} flip {a}-{b}: {e}")))?;
        let after = apply_move(&self.d, &m)?;
        for [x, y, z] in new_3cycles(&self.d, &m)? {
            if !after.is_face(x, y, z) {
                return Err(broken(format!(
                    "{kind:?} flip {a}-{b} creates prismatic 3-circuit {x}-{y}-{z}"
                )));
            }
        }
        let witness = after.separating_triangles().len();
        if witness != 0 {
            return Err(broken(format!("{kind:?} flip {a}-{b} leaves the complex non-simple")));
        }
        if !self.seen.insert(after.clone()) {
            return Err(broken("reduction revisited a complex"));
        }
        self.d = after;
        self.moves.push(m);
        self.witnesses.push(witness);
        self.kinds.push(kind);
        Ok(())
    }

    fn components(&self, a: usize) -> Vec<Vec<usize>> {
        self.view().components.remove(&a).unwrap_or_default()
    }

    /// Shrink `comp` of `a` to two nodes, remove all other components, then grow.
    fn component_case(&mut self, a: usize, mut comp: Vec<usize>) -> Result<(), ReduceError> {
        while comp.len() > 2 {
            let q = comp.pop().unwrap();
            self.flip(a, q, StepKind::ShrinkComponent)?;
        }
        self.eliminate_except(a, &comp)?;
        let comps = self.components(a);
        if comps.len() != 1 || comps[0].len() != 2 {
            return Err(broken(format!("node {a} not attached at exactly two polygon nodes")));
        }
        self.flip(comp[0], comp[1], StepKind::Grow)
    }

    /// Flips away every component of `a` that contains none of `keep`.
    fn eliminate_except(&mut self, a: usize, keep: &[usize]) -> Result<(), ReduceError> {
        loop {
            let comps = self.components(a);
            let Some(other) = comps.iter().find(|c| !c.iter().any(|x| keep.contains(x))) else {
                return Ok(());
            };
            let q = *other.last().unwrap();
            self.flip(a, q, StepKind::Eliminate)?;
        }
    }

    fn borrow_case(&mut self, a: usize, view: &OuterPolygonView) -> Result<(), ReduceError> {
        let comp = view.components[&a][0].clone();
        let e = view
            .interior_edges
            .iter()
            .find_map(|&(x, y)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .unwrap();
        let qm = *comp.last().unwrap();
        self.flip(a, qm, StepKind::Transfer)?;
        let grown = self
            .components(e)
            .into_iter()
            .find(|c| c.contains(&qm))
            .ok_or_else(|| broken("transfer lost the connection"))?;
        if grown.len() != 2 || !grown.contains(&comp[comp.len() - 2]) {
            return Err(broken(format!("transfer to {e} did not create a two-node component")));
        }
        self.component_case(e, grown)
    }

    fn branch_case(&mut self, view: &OuterPolygonView) -> Result<(), ReduceError> {
        let i1 = view.endpoints[0];
        let run = &view.components[&i1][0];
        if run.len() != 3 {
            return Err(broken(format!("endpoint {i1} is not attached at three nodes")));
        }
        let (p1, p2, p3) = (run[0], run[1], run[2]);
        let int_nbrs = |x: usize| -> Vec<usize> {
            view.interior_edges
                .iter()
                .filter_map(|&(u, w)| {
                    if u == x {
                        Some(w)
                    } else if w == x {
                        Some(u)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let mut path = vec![i1];
        let mut prev = i1;
        let mut cur = int_nbrs(i1)[0];
        loop {
            let nb = int_nbrs(cur);
            if nb.len() > 2 {
                break;
            }
            if nb.len() < 2 {
                return Err(broken("interior graph is a path"));
            }
            path.push(cur);
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        let im = cur;
        if !self.d.adjacent(im, p1) || !self.d.adjacent(im, p3) {
            return Err(broken(format!("branch node {im} misses the ends of the endpoint run")));
        }
        self.eliminate_except(im, &[p1, p3])?;
        self.flip(im, p3, StepKind::BranchPivot)?;
        for &ik in path.iter().rev() {
            self.flip(ik, p1, StepKind::BranchSweep)?;
        }
        let comps = self.components(im);
        if comps.len() != 1 || comps[0].len() != 2 || !comps[0].contains(&p2) {
            return Err(broken("branch node not attached at the first two run nodes"));
        }
        self.flip(p1, p2, StepKind::Grow)
    }
}

/// Reduces a simple non-prism complex with more than 7 faces to the split prism.
pub fn reduce_to_dn(start: &DualComplex) -> Result<ReductionTrace, ReduceError> {
    check_input(start)?;
    let n = start.node_count();
    let mut r = Reducer {
        d: start.clone(),
        v_inf: choose_v_inf(start),
        moves: Vec::new(),
        witnesses: Vec::new(),
        kinds: Vec::new(),
        seen: HashSet::from([start.clone()]),
    };
    let mut episodes = Vec::new();
    loop {
        let view = r.view();
        let before = view.polygon.len();
        if before + 3 == n {
            break;
        }
        if before + 3 > n {
            return Err(broken("outer polygon too long"));
        }
        let first = r.moves.len();
        let non_end = view
            .interior
            .iter()
            .copied()
            .filter(|a| !view.is_endpoint(*a))
            .find_map(|a| {
                view.components[&a]
                    .iter()
                    .find(|c| c.len() >= 2)
                    .map(|c| (a, c.clone()))
            });
        let case = if let Some((a, comp)) = non_end {
            r.component_case(a, comp)?;
            EpisodeCase::Component
        } else if let Some(&a) = view
            .endpoints
            .iter()
            .find(|&&a| view.components[&a].len() == 1 && view.components[&a][0].len() > 3)
        {
            r.borrow_case(a, &view)?;
            EpisodeCase::Borrow
        } else {
            r.branch_case(&view)?;
            EpisodeCase::Branch
        };
        let after = r.view().polygon.len();
        if after != before + 1 {
            return Err(broken(format!("episode grew the polygon from {before} to {after}")));
        }
        episodes.push(Episode {
            case,
            moves: first..r.moves.len(),
            polygon_before: before,
            polygon_after: after,
        });
    }

    let view = r.view();
    if view.interior.len() != 2 {
        return Err(broken("expected exactly two interior nodes"));
    }
    let sizes: Vec<usize> = view
        .interior
        .iter()
        .map(|a| view.components[a].iter().map(Vec::len).sum())
        .collect();
    if !sizes.contains(&3) {
        let first = r.moves.len();
        let a = view.interior[0];
        loop {
            let comps = r.components(a);
            if comps.len() != 1 {
                return Err(broken("finishing node has several components"));
            }
            if comps[0].len() == 3 {
                break;
            }
            let q = *comps[0].last().unwrap();
            r.flip(a, q, StepKind::Transfer)?;
        }
        episodes.push(Episode {
            case: EpisodeCase::Finish,
            moves: first..r.moves.len(),
            polygon_before: view.polygon.len(),
            polygon_after: r.view().polygon.len(),
        });
    }
    if isomorphic_duals(&r.d, &split_prism_dual(n)).is_none() {
        return Err(broken("end is not the split prism"));
    }
    Ok(ReductionTrace {
        start: start.clone(),
        moves: r.moves,
        witnesses: r.witnesses,
        kinds: r.kinds,
        episodes,
        end: r.d,
        v_inf: r.v_inf,
    })
}

impl ReductionTrace {
    pub fn to_file(&self) -> TraceFile {
        TraceFile {
            start: self.start.clone(),
            moves: self.moves.clone(),
            end: self.end.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;
    use crate::whitehead::random_simple;

    #[test]
    fn icosahedron_view() {
        let v = outer_view(&icosahedron_dual()).unwrap();
        assert_eq!(v.v_inf, 0);
        assert_eq!(v.polygon.len(), 5);
        assert_eq!(v.interior.len(), 6);
    }

    #[test]
    fn split_prism_view() {
        let v = outer_view(&split_prism_dual(18)).unwrap();
        assert_eq!(v.polygon.len(), 15);
        assert_eq!(v.interior.len(), 2);
        assert!(v.endpoints.len() == 2);
    }

    #[test]
    fn prism_and_small_rejected() {
        assert_eq!(outer_view(&prism_dual(9)).unwrap_err(), ReduceError::IsPrism);
        assert_eq!(outer_view(&cube().dual()).unwrap_err(), ReduceError::TooSmall(6));
        assert_eq!(reduce_to_dn(&prism_dual(9)).unwrap_err(), ReduceError::IsPrism);
    }

    #[test]
    fn dodecahedron_reduces() {
        let t = reduce_to_dn(&icosahedron_dual()).unwrap();
        assert!(t.witnesses.iter().all(|&w| w == 0));
        assert!(isomorphic_duals(&t.end, &split_prism_dual(12)).is_some());
        let f = t.to_file();
        assert_eq!(f.verify().unwrap(), t.end);
        for e in &t.episodes {
            if e.case != EpisodeCase::Finish {
                assert_eq!(e.polygon_after, e.polygon_before + 1);
            }
        }
    }

    #[test]
    fn random_complexes_reduce() {
        for seed in 0..20 {
            let d = random_simple(8 + (seed as usize % 7), seed, 30);
            match reduce_to_dn(&d) {
                Ok(t) => assert!(t.witnesses.iter().all(|&w| w == 0)),
                Err(ReduceError::IsPrism) => {}
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
    }

    #[test]
    fn trace_json_has_three_keys() {
        let t = reduce_to_dn(&icosahedron_dual()).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, vec!["end", "moves", "start"]);
        let back: TraceFile = serde_json::from_value(v).unwrap();
        assert_eq!(back, t.to_file());
    }
}
