use super::{AbstractPolyhedron, DualComplex};

/// Label bijection between two complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceMap {
    /// `faces[f]` is the image of face (dual node) `f`.
    pub faces: Vec<usize>,
    /// `vertices[v]` is the image of vertex `v` (empty for dual-only maps).
    pub vertices: Vec<usize>,
    /// True when the map reverses orientation.
    pub reflected: bool,
}

const SEP: usize = usize::MAX;

fn code_from(rot: &[Vec<usize>], start: usize, second: usize, reverse: bool) -> (Vec<usize>, Vec<usize>) {
    let n = rot.len();
    let mut label = vec![SEP; n];
    let mut reference = vec![SEP; n];
    let mut order = vec![start];
    label[start] = 0;
    reference[start] = second;
    let mut code = Vec::with_capacity(2 * n + 6 * n);
    let mut head = 0;
    while head < order.len() {
        let w = order[head];
        head += 1;
        let r = &rot[w];
        let d = r.len();
        let pos = r.iter().position(|&x| x == reference[w]).unwrap();
        for k in 0..d {
            let x = if reverse { r[(pos + d - k) % d] } else { r[(pos + k) % d] };
            if label[x] == SEP {
                label[x] = order.len();
                reference[x] = w;
                order.push(x);
            }
            code.push(label[x]);
        }
        code.push(SEP);
    }
    (code, label)
}

/// Canonical code of a rotation system up to relabeling and reflection,
/// together with the canonical labeling and whether it is mirrored.
fn canonical(d: &DualComplex) -> (Vec<usize>, Vec<usize>, bool) {
    let rot = d.rotation();
    let mut best: Option<(Vec<usize>, Vec<usize>, bool)> = None;
    let min_deg = rot.iter().map(Vec::len).min().unwrap_or(0);
    let count = |k: usize| rot.iter().filter(|r| r.len() == k).count();
    // start from the rarest degree class to cut the search
    let start_deg = (min_deg..=rot.iter().map(Vec::len).max().unwrap_or(0))
        .filter(|&k| count(k) > 0)
        .min_by_key(|&k| (count(k), k))
        .unwrap_or(0);
    for (s, r) in rot.iter().enumerate() {
        if r.len() != start_deg {
            continue;
        }
        for &t in r {
            for reverse in [false, true] {
                let (code, label) = code_from(rot, s, t, reverse);
                let better = match &best {
                    None => true,
                    Some((b, _, _)) => code < *b,
                };
                if better {
                    best = Some((code, label, reverse));
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Canonical form of a dual complex; equal codes mean isomorphic complexes.
pub fn canonical_code(d: &DualComplex) -> Vec<usize> {
    let mut code = vec![d.rotation().iter().map(Vec::len).min().unwrap_or(0)];
    let mut hist: Vec<usize> = d.rotation().iter().map(Vec::len).collect();
    hist.sort_unstable();
    code.extend(hist);
    code.push(SEP);
    code.extend(canonical(d).0);
    code
}

/// Isomorphism of dual complexes (reflections allowed).
pub fn isomorphic_duals(a: &DualComplex, b: &DualComplex) -> Option<FaceMap> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let mut da: Vec<usize> = a.rotation().iter().map(Vec::len).collect();
    let mut db: Vec<usize> = b.rotation().iter().map(Vec::len).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return None;
    }
    let (ca, la, ra) = canonical(a);
    let (cb, lb, rb) = canonical(b);
    if ca != cb {
        return None;
    }
    let mut inv_b = vec![0; lb.len()];
    for (node, &l) in lb.iter().enumerate() {
        inv_b[l] = node;
    }
    let faces: Vec<usize> = la.iter().map(|&l| inv_b[l]).collect();
    for x in 0..a.node_count() {
        for &y in a.neighbors(x) {
            if !b.adjacent(faces[x], faces[y]) {
                return None;
            }
        }
    }
    Some(FaceMap {
        faces,
        vertices: Vec::new(),
        reflected: ra != rb,
    })
}

/// Isomorphism of primal complexes, mapping both faces and vertices.
pub fn isomorphic(a: &AbstractPolyhedron, b: &AbstractPolyhedron) -> Option<FaceMap> {
    if a.face_count() != b.face_count() || a.vertex_count() != b.vertex_count() {
        return None;
    }
    let mut m = isomorphic_duals(&a.dual(), &b.dual())?;
    let sets_b = b.vertex_face_sets();
    let vertices = a
        .vertex_face_sets()
        .iter()
        .map(|s| {
            let mut img = [m.faces[s[0]], m.faces[s[1]], m.faces[s[2]]];
            img.sort_unstable();
            sets_b.iter().position(|t| *t == img)
        })
        .collect::<Option<Vec<_>>>()?;
    m.vertices = vertices;
    Some(m)
}
