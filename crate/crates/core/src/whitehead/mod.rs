//! Whitehead moves on dual complexes and the reduction to the split prism.

mod reduce;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{split_prism_dual, DualComplex};

pub use reduce::{
    outer_view, reduce_to_dn, Episode, EpisodeCase, OuterPolygonView, ReductionTrace, StepKind,
    TraceFile,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("edge {0}-{1} is not in the complex")]
    EdgeMissing(usize, usize),
    #[error("edge {0}-{1} already exists")]
    TargetEdgeExists(usize, usize),
    #[error("edge {0}-{1} is not flanked by the stated triangles")]
    NotFlankedByTwoTriangles(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("complex is a prism")]
    IsPrism,
    #[error("complex has {0} faces; reduction needs more than 7")]
    TooSmall(usize),
    #[error("complex is not simple")]
    NotSimple,
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// Replace the dual edge `remove` by `insert`, the opposite corners of its two triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WhiteheadMove {
    pub remove: [usize; 2],
    pub insert: [usize; 2],
}

impl WhiteheadMove {
    pub fn inverse(&self) -> Self {
        Self {
            remove: self.insert,
            insert: self.remove,
        }
    }
}

/// The move flipping `a`-`b`, if one exists.
pub fn move_for_edge(d: &DualComplex, a: usize, b: usize) -> Result<WhiteheadMove, MoveError> {
    if a == b || a >= d.node_count() || b >= d.node_count() || !d.adjacent(a, b) {
        return Err(MoveError::EdgeMissing(a, b));
    }
    let x = d.succ(a, b).unwrap();
    let y = d.pred(a, b).unwrap();
    if x == y || d.adjacent(x, y) {
        return Err(MoveError::TargetEdgeExists(x, y));
    }
    Ok(WhiteheadMove {
        remove: [a, b],
        insert: [x, y],
    })
}

/// Applies a move, checking its preconditions.
pub fn apply_move(d: &DualComplex, m: &WhiteheadMove) -> Result<DualComplex, MoveError> {
    let [a, b] = m.remove;
    let n = d.node_count();
    if a == b || a >= n || b >= n || !d.adjacent(a, b) {
        return Err(MoveError::EdgeMissing(a, b));
    }
    let [p, q] = m.insert;
    let x = d.succ(a, b).unwrap();
    let y = d.pred(a, b).unwrap();
    if BTreeSet::from([p, q]) != BTreeSet::from([x, y]) {
        return Err(MoveError::NotFlankedByTwoTriangles(a, b));
    }
    if x == y || d.adjacent(x, y) {
        return Err(MoveError::TargetEdgeExists(x, y));
    }
    let mut rot = d.rotation().to_vec();
    rot[a].retain(|&z| z != b);
    rot[b].retain(|&z| z != a);
    // new triangles (a, y, x) and (b, x, y)
    let ix = rot[x].iter().position(|&z| z == a).unwrap();
    rot[x].insert(ix + 1, y);
    let iy = rot[y].iter().position(|&z| z == b).unwrap();
    rot[y].insert(iy + 1, x);
    Ok(DualComplex::from_rotation(rot).expect("flip preserves a sphere triangulation"))
}

/// 3-cycles created by a move; none of them may be prismatic in a simple complex.
pub fn new_3cycles(d: &DualComplex, m: &WhiteheadMove) -> Result<Vec<[usize; 3]>, MoveError> {
    let after = apply_move(d, m)?;
    let [x, y] = m.insert;
    let mut out: Vec<[usize; 3]> = after
        .neighbors(x)
        .iter()
        .filter(|&&z| after.adjacent(y, z))
        .map(|&z| {
            let mut t = [x, y, z];
            t.sort_unstable();
            t
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// True when every 3-cycle created by the move bounds a triangle.
pub fn preserves_simplicity(d: &DualComplex, m: &WhiteheadMove) -> Result<bool, MoveError> {
    let after = apply_move(d, m)?;
    Ok(new_3cycles(d, m)?
        .iter()
        .all(|&[a, b, c]| after.is_face(a, b, c)))
}

/// Random simple complex reached from `D_N*` by `moves` simplicity-preserving flips.
pub fn random_simple(n: usize, seed: u64, moves: usize) -> DualComplex {
    assert!(n >= 8, "random_simple needs N >= 8");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = split_prism_dual(n);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < moves && attempts < 200 * (moves + 1) {
        attempts += 1;
        let edges = d.edges();
        let &(mut a, mut b) = edges.choose(&mut rng).unwrap();
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        let Ok(m) = move_for_edge(&d, a, b) else {
            continue;
        };
        if matches!(preserves_simplicity(&d, &m), Ok(true)) {
            d = apply_move(&d, &m).unwrap();
            accepted += 1;
        }
    }
    d
}
