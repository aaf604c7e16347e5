//! Named complexes used as fixtures and reduction targets.

use super::{AbstractPolyhedron, DualComplex};

/// Tetrahedron, `N = 4`.
pub fn tetrahedron() -> AbstractPolyhedron {
    AbstractPolyhedron::build(4, vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]])
        .unwrap()
        .with_name("tetrahedron")
}

/// Prism `Pr_N` with `N - 2` quadrilateral sides.
///
/// Faces `0..N-2` are the sides in cyclic order, `N - 2` is the top and
/// `N - 1` the bottom. Top vertices are `0..n`, bottom vertices `n..2n`.
pub fn prism(n_faces: usize) -> AbstractPolyhedron {
    assert!(n_faces >= 5, "a prism has at least 5 faces");
    let n = n_faces - 2;
    let mut faces: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let k = (j + 1) % n;
            vec![k, j, n + j, n + k]
        })
        .collect();
    faces.push((0..n).collect());
    faces.push((0..n).rev().map(|i| n + i).collect());
    AbstractPolyhedron::build(2 * n, faces)
        .unwrap()
        .with_name(format!("prism_{n_faces}"))
}

pub fn cube() -> AbstractPolyhedron {
    prism(6).with_name("cube")
}

/// Dual of the prism: sides `0..n`, top `n`, bottom `n + 1`.
pub fn prism_dual(n_faces: usize) -> DualComplex {
    let n = n_faces - 2;
    let (top, bottom) = (n, n + 1);
    let mut tris = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        tris.push([j, i, top]);
        tris.push([i, j, bottom]);
    }
    DualComplex::from_triangles(n_faces, &tris).unwrap()
}

/// Dual of the split prism `D_N`.
///
/// Nodes `0..N-3` form the outer polygon, `N - 3` is the node at infinity,
/// `N - 2` is joined to polygon nodes `0, 1, 2` and `N - 1` to `2..N-3` and `0`.
pub fn split_prism_dual(n_faces: usize) -> DualComplex {
    assert!(n_faces >= 7, "split prisms have at least 7 faces");
    let k = n_faces - 3;
    let (inf, u, w) = (k, k + 1, k + 2);
    let mut tris = Vec::new();
    for i in 0..k {
        tris.push([(i + 1) % k, i, inf]);
    }
    tris.push([0, 1, u]);
    tris.push([1, 2, u]);
    tris.push([2, w, u]);
    tris.push([0, u, w]);
    for j in 2..k - 1 {
        tris.push([j, j + 1, w]);
    }
    tris.push([k - 1, 0, w]);
    DualComplex::from_triangles(n_faces, &tris).unwrap()
}

pub fn split_prism(n_faces: usize) -> AbstractPolyhedron {
    split_prism_dual(n_faces)
        .to_primal()
        .unwrap()
        .with_name(format!("split_prism_{n_faces}"))
}

/// The icosahedral triangulation: top `0`, upper ring `1..6`, lower ring `6..11`, bottom `11`.
pub fn icosahedron_dual() -> DualComplex {
    let u = |i: usize| 1 + i % 5;
    let l = |i: usize| 6 + i % 5;
    let mut tris = Vec::new();
    for i in 0..5 {
        tris.push([0, u(i), u(i + 1)]);
        tris.push([u(i), l(i), u(i + 1)]);
        tris.push([l(i), l(i + 1), u(i + 1)]);
        tris.push([11, l(i + 1), l(i)]);
    }
    DualComplex::from_triangles(12, &tris).unwrap()
}

pub fn dodecahedron() -> AbstractPolyhedron {
    icosahedron_dual().to_primal().unwrap().with_name("dodecahedron")
}

/// Cuts off each listed vertex by a new triangular face (ids `N, N+1, ...`).
pub fn truncate_vertices(c: &AbstractPolyhedron, vertices: &[usize]) -> AbstractPolyhedron {
    let mut d = c.dual();
    for &v in vertices {
        let [a, b, x] = c.vertex_faces(v);
        d = d.insert_in_triangle(a, b, x).expect("vertex triangle present");
    }
    d.to_primal().unwrap()
}

pub fn truncated_tetrahedron() -> AbstractPolyhedron {
    truncate_vertices(&tetrahedron(), &[0, 1, 2, 3]).with_name("truncated_tetrahedron")
}

/// Cube with four pairwise non-adjacent vertices cut off.
pub fn alternately_truncated_cube() -> AbstractPolyhedron {
    // prism labeling: top 0..4, bottom 4..8; 0, 2, 5, 7 are mutually non-adjacent
    truncate_vertices(&cube(), &[0, 2, 5, 7]).with_name("alternately_truncated_cube")
}

/// Glues `c1` and `c2` along the triangles obtained by cutting off `v1` and `v2`.
///
/// Faces `0..N1` are those of `c1`; the faces of `c2` not at `v2` follow in
/// increasing order. The three faces at `v1` absorb those at `v2`, and the
/// triangle of dual nodes around them becomes an essential 3-circuit.
pub fn vertex_sum(c1: &AbstractPolyhedron, v1: usize, c2: &AbstractPolyhedron, v2: usize) -> AbstractPolyhedron {
    let corner = |c: &AbstractPolyhedron, v: usize| {
        let mut key = c.vertex_faces(v);
        key.sort_unstable();
        let tris = c.dual().triangles();
        let t = *tris
            .iter()
            .find(|t| {
                let mut s = **t;
                s.sort_unstable();
                s == key
            })
            .unwrap();
        (t, tris)
    };
    let (t1, tris1) = corner(c1, v1);
    let (t2, tris2) = corner(c2, v2);
    let n1 = c1.face_count();
    let mut map = vec![usize::MAX; c2.face_count()];
    map[t2[0]] = t1[0];
    map[t2[1]] = t1[2];
    map[t2[2]] = t1[1];
    let mut next = n1;
    for m in map.iter_mut().filter(|m| **m == usize::MAX) {
        *m = next;
        next += 1;
    }
    let mut tris: Vec<[usize; 3]> = tris1.into_iter().filter(|&t| t != t1).collect();
    tris.extend(tris2.into_iter().filter(|&t| t != t2).map(|t| t.map(|x| map[x])));
    DualComplex::from_triangles(next, &tris).unwrap().to_primal().unwrap()
}

/// Two cubes, each with one vertex cut off, glued along the triangles.
pub fn twin_truncated_cubes() -> AbstractPolyhedron {
    vertex_sum(&cube(), 0, &cube(), 0).with_name("twin_truncated_cubes")
}

/// Every named complex with at most 14 faces.
pub fn corpus() -> Vec<AbstractPolyhedron> {
    let mut v = vec![tetrahedron(), cube()];
    v.extend((5..=10).map(prism));
    v.push(dodecahedron());
    v.push(truncated_tetrahedron());
    v.push(alternately_truncated_cube());
    v.push(twin_truncated_cubes());
    v.extend((7..=12).map(split_prism));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for c in corpus() {
            let n = c.face_count();
            assert_eq!(c.edge_count(), 3 * (n - 2), "{:?}", c.name());
            assert_eq!(3 * c.vertex_count(), 2 * c.edge_count());
        }
    }

    #[test]
    fn alternately_truncated_cube_shape() {
        let c = alternately_truncated_cube();
        assert_eq!((c.face_count(), c.edge_count(), c.vertex_count()), (10, 24, 16));
    }

    #[test]
    fn split_prism_outer_polygon() {
        let d = split_prism_dual(18);
        assert_eq!(d.degree(15), 15);
        assert!(d.is_simple());
    }

    #[test]
    fn prism_dual_matches_primal() {
        for n in 5..=10 {
            assert!(super::super::isomorphic_duals(&prism(n).dual(), &prism_dual(n)).is_some());
        }
    }
}
