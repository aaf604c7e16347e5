//! Oracles shared by the integration targets. They use only the adjacency
//! and triangle lists of a dual, never the circuit code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use andreev::complex::{AbstractPolyhedron, DualComplex};

/// Rotation and reflection class representative of a cyclic sequence.
pub fn canonical_cycle(c: &[usize]) -> Vec<usize> {
    let k = c.len();
    let mut best: Option<Vec<usize>> = None;
    for s in 0..k {
        for dir in [1isize, -1] {
            let v: Vec<usize> = (0..k)
                .map(|i| c[((s as isize + dir * i as isize).rem_euclid(k as isize)) as usize])
                .collect();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.unwrap()
}

/// Every simple `k`-cycle of the dual graph, canonicalized, by exhaustive search.
pub fn simple_cycles(d: &DualComplex, k: usize) -> BTreeSet<Vec<usize>> {
    let n = d.node_count();
    let adj = |a: usize, b: usize| d.neighbors(a).contains(&b);
    let mut out = BTreeSet::new();
    let mut path = Vec::new();
    fn grow(
        n: usize,
        k: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        path: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if path.len() == k {
            if adj(path[k - 1], path[0]) {
                out.insert(canonical_cycle(path));
            }
            return;
        }
        for x in 0..n {
            if x > path[0] && !path.contains(&x) && adj(*path.last().unwrap(), x) {
                path.push(x);
                grow(n, k, adj, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        path.clear();
        path.push(s);
        grow(n, k, &adj, &mut path, &mut out);
    }
    out
}

/// Primal edges crossed by a dual cycle, found from face vertex lists.
pub fn crossed_edges(c: &AbstractPolyhedron, cycle: &[usize]) -> Vec<[usize; 2]> {
    let k = cycle.len();
    (0..k)
        .map(|i| {
            let (f, g) = (&c.faces()[cycle[i]], &c.faces()[cycle[(i + 1) % k]]);
            let mut shared: Vec<usize> = f.iter().copied().filter(|v| g.contains(v)).collect();
            shared.sort_unstable();
            [shared[0], shared[1]]
        })
        .collect()
}

pub fn distinct_endpoints(edges: &[[usize; 2]]) -> bool {
    let s: BTreeSet<usize> = edges.iter().flatten().copied().collect();
    s.len() == 2 * edges.len()
}

/// Brute-force prismatic circuits of length `k`.
pub fn brute_prismatic(c: &AbstractPolyhedron, k: usize) -> BTreeSet<Vec<usize>> {
    simple_cycles(&c.dual(), k)
        .into_iter()
        .filter(|cy| distinct_endpoints(&crossed_edges(c, cy)))
        .collect()
}

/// Number of dual triangles on each side of a cycle, by flood fill across non-cycle edges.
pub fn sides(d: &DualComplex, cycle: &[usize]) -> (usize, usize) {
    let k = cycle.len();
    let cut: BTreeSet<(usize, usize)> = (0..k)
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % k]);
            (a.min(b), a.max(b))
        })
        .collect();
    let tris = d.triangles();
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for j in 0..3 {
            let (a, b) = (t[j], t[(j + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    let first = by_edge[cut.iter().next().unwrap()][0];
    let mut seen = vec![false; tris.len()];
    seen[first] = true;
    let mut q = VecDeque::from([first]);
    let mut count = 0;
    while let Some(i) = q.pop_front() {
        count += 1;
        let t = tris[i];
        for j in 0..3 {
            let (a, b) = (t[j], t[(j + 1) % 3]);
            let e = (a.min(b), a.max(b));
            if cut.contains(&e) {
                continue;
            }
            for &o in &by_edge[&e] {
                if !seen[o] {
                    seen[o] = true;
                    q.push_back(o);
                }
            }
        }
    }
    (count, tris.len() - count)
}

/// Three-cycles of the dual graph that are not triangles of it.
pub fn separating_3cycles(d: &DualComplex) -> Vec<[usize; 3]> {
    let tris: BTreeSet<[usize; 3]> = d
        .triangles()
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect();
    simple_cycles(d, 3)
        .into_iter()
        .map(|c| {
            let mut t = [c[0], c[1], c[2]];
            t.sort_unstable();
            t
        })
        .filter(|t| !tris.contains(t))
        .collect()
}

/// Largest distance between two realizations' sorted edge lengths.
pub fn edge_length_gap(a: &[f64], b: &[f64]) -> f64 {
    let sort = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    sort(a).iter().zip(sort(b)).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
