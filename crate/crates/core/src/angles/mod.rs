//! Exact checking of the angle conditions and the feasibility linear program.

pub mod lp;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{AbstractPolyhedron, Circuit, QuadContext};
use crate::scalar::{format_rational, parse_rational, ratio, rational_to_f64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AngleError {
    #[error("assignment has {got} values but the complex has {expected} edges")]
    SizeMismatch { expected: usize, got: usize },
    #[error("assignment is not in the angle polytope: {0}")]
    NotMember(Box<ConditionReport>),
    #[error("interpolation parameter must satisfy 0 <= t < 1")]
    BadParameter,
    #[error("cannot parse angle file: {0}")]
    Parse(String),
}

/// Dihedral angles as exact rational multiples of π, indexed by edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AngleAssignment {
    values: Vec<BigRational>,
}

/// JSON shape of an assignment; `default` fills edges not listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleJson {
    pub angles: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

impl AngleAssignment {
    pub fn new(values: Vec<BigRational>) -> Self {
        Self { values }
    }

    pub fn uniform(edges: usize, r: BigRational) -> Self {
        Self {
            values: vec![r; edges],
        }
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, edge: usize) -> &BigRational {
        &self.values[edge]
    }

    pub fn set(&mut self, edge: usize, r: BigRational) {
        self.values[edge] = r;
    }

    /// Angles in radians.
    pub fn radians(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|r| rational_to_f64(r) * std::f64::consts::PI)
            .collect()
    }

    pub fn to_json(&self) -> AngleJson {
        AngleJson {
            angles: self
                .values
                .iter()
                .enumerate()
                .map(|(i, r)| (i.to_string(), format_rational(r)))
                .collect(),
            default: None,
        }
    }

    pub fn from_json(j: &AngleJson, edges: usize) -> Result<Self, AngleError> {
        let default = match &j.default {
            Some(s) => Some(parse_rational(s).ok_or_else(|| AngleError::Parse(format!("bad default {s:?}")))?),
            None => None,
        };
        let mut values: Vec<Option<BigRational>> = vec![default; edges];
        for (k, v) in &j.angles {
            let idx: usize = k
                .parse()
                .map_err(|_| AngleError::Parse(format!("bad edge index {k:?}")))?;
            if idx >= edges {
                return Err(AngleError::SizeMismatch {
                    expected: edges,
                    got: idx + 1,
                });
            }
            values[idx] =
                Some(parse_rational(v).ok_or_else(|| AngleError::Parse(format!("bad rational {v:?}")))?);
        }
        let got = values.iter().filter(|v| v.is_some()).count();
        let values: Option<Vec<BigRational>> = values.into_iter().collect();
        values
            .map(Self::new)
            .ok_or(AngleError::SizeMismatch { expected: edges, got })
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: &BigRational) -> Self {
        let s = BigRational::one() - t;
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * &s + b * t)
                .collect(),
        )
    }
}

/// The linear constraints cutting out the angle polytope.
#[derive(Debug, Clone)]
pub struct AndreevConstraints {
    pub edge_count: usize,
    /// The three edges at each vertex.
    pub vertices: Vec<[usize; 3]>,
    pub prismatic3: Vec<Circuit>,
    pub prismatic4: Vec<Circuit>,
    pub quads: Vec<QuadContext>,
}

impl AndreevConstraints {
    pub fn new(c: &AbstractPolyhedron) -> Self {
        Self {
            edge_count: c.edge_count(),
            vertices: (0..c.vertex_count()).map(|v| c.vertex_edges(v)).collect(),
            prismatic3: c.prismatic_circuits(3),
            prismatic4: c.prismatic_circuits(4),
            quads: c.quadrilateral_contexts(),
        }
    }

    /// Edge lists of both condition-(5) sums for every quadrilateral.
    pub fn quad_sums(&self) -> Vec<(usize, usize, [usize; 6])> {
        let mut out = Vec::new();
        for q in &self.quads {
            let [a, b, c, d] = q.entering;
            out.push((q.face, 0, [q.sides[0], q.sides[2], a, b, c, d]));
            out.push((q.face, 1, [q.sides[1], q.sides[3], a, b, c, d]));
        }
        out
    }
}

/// Outcome of checking conditions (1)-(5) exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    /// Condition (1): edges with `r <= 0`.
    pub nonpositive_edges: Vec<usize>,
    /// Edges with `r > 1/2` (outside the non-obtuse range).
    pub obtuse_edges: Vec<usize>,
    /// Condition (2): vertices whose sum is not `> 1`.
    pub vertex_violations: Vec<usize>,
    /// Condition (3): prismatic 3-circuits (dual nodes) whose sum is not `< 1`.
    pub prismatic3_violations: Vec<Vec<usize>>,
    /// Condition (4): prismatic 4-circuits whose sum is not `< 2`.
    pub prismatic4_violations: Vec<Vec<usize>>,
    /// Condition (5): `(face, which)` for failing sums, `which` 0 uses `e1 + e3`.
    pub quad_violations: Vec<(usize, usize)>,
    pub member: bool,
}

impl ConditionReport {
    /// Verdict of condition `k` in `1..=5`.
    pub fn holds(&self, k: usize) -> bool {
        match k {
            1 => self.nonpositive_edges.is_empty(),
            2 => self.vertex_violations.is_empty(),
            3 => self.prismatic3_violations.is_empty(),
            4 => self.prismatic4_violations.is_empty(),
            5 => self.quad_violations.is_empty(),
            _ => false,
        }
    }

    pub fn conditions_hold(&self) -> bool {
        (1..=5).all(|k| self.holds(k))
    }
}

impl std::fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let failed: Vec<String> = (1..=5)
            .filter(|&k| !self.holds(k))
            .map(|k| format!("({k})"))
            .collect();
        if failed.is_empty() && self.obtuse_edges.is_empty() {
            write!(f, "all conditions hold")
        } else if failed.is_empty() {
            write!(f, "obtuse edges {:?}", self.obtuse_edges)
        } else {
            write!(f, "conditions {} fail", failed.join(", "))
        }
    }
}

fn sum(a: &AngleAssignment, edges: &[usize]) -> BigRational {
    edges.iter().fold(BigRational::zero(), |s, &e| s + a.get(e))
}

/// Checks conditions (1)-(5). With `closed_vertices`, condition (2) is
/// relaxed to `>= 1`, describing the closure along vertex faces only.
pub fn check_with(
    k: &AndreevConstraints,
    a: &AngleAssignment,
    closed_vertices: bool,
) -> Result<ConditionReport, AngleError> {
    if a.len() != k.edge_count {
        return Err(AngleError::SizeMismatch {
            expected: k.edge_count,
            got: a.len(),
        });
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let two = ratio(2, 1);
    let three = ratio(3, 1);
    let half = ratio(1, 2);
    let nonpositive_edges: Vec<usize> = (0..a.len()).filter(|&i| *a.get(i) <= zero).collect();
    let obtuse_edges: Vec<usize> = (0..a.len()).filter(|&i| *a.get(i) > half).collect();
    let vertex_violations: Vec<usize> = k
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, es)| {
            let s = sum(a, &es[..]);
            if closed_vertices {
                s < one
            } else {
                s <= one
            }
        })
        .map(|(v, _)| v)
        .collect();
    let prismatic3_violations = k
        .prismatic3
        .iter()
        .filter(|c| sum(a, &c.crossed_edges) >= one)
        .map(|c| c.dual_nodes.clone())
        .collect();
    let prismatic4_violations = k
        .prismatic4
        .iter()
        .filter(|c| sum(a, &c.crossed_edges) >= two)
        .map(|c| c.dual_nodes.clone())
        .collect();
    let quad_violations = k
        .quad_sums()
        .into_iter()
        .filter(|(_, _, es)| sum(a, es) >= three)
        .map(|(f, w, _)| (f, w))
        .collect();
    let mut r = ConditionReport {
        nonpositive_edges,
        obtuse_edges,
        vertex_violations,
        prismatic3_violations,
        prismatic4_violations,
        quad_violations,
        member: false,
    };
    r.member = r.conditions_hold() && r.obtuse_edges.is_empty();
    Ok(r)
}

pub fn check_conditions(c: &AbstractPolyhedron, a: &AngleAssignment) -> Result<ConditionReport, AngleError> {
    check_with(&AndreevConstraints::new(c), a, false)
}

/// Exact verdict on whether the angle polytope is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub nonempty: bool,
    pub witness: Option<AngleAssignment>,
    /// Optimal common slack `t` of the strict constraints, in units of π.
    pub max_slack: BigRational,
    pub pivots: usize,
}

#[derive(Serialize)]
struct FeasibilityJson {
    verdict: &'static str,
    max_slack: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<BTreeMap<String, String>>,
}

impl Serialize for FeasibilityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FeasibilityJson {
            verdict: if self.nonempty { "nonempty" } else { "empty" },
            max_slack: format_rational(&self.max_slack),
            witness: self.witness.as_ref().map(|w| w.to_json().angles),
        }
        .serialize(s)
    }
}

/// Maximizes the common slack `t` of all strict constraints.
///
/// The program is posed in `s = t + 3 >= 0` so that the all-zero point is a
/// feasible basis and no phase one is needed.
pub fn feasible(c: &AbstractPolyhedron) -> FeasibilityReport {
    feasible_with(&AndreevConstraints::new(c))
}

pub fn feasible_with(k: &AndreevConstraints) -> FeasibilityReport {
    let e = k.edge_count;
    let n = e + 1;
    let s = e;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let mut push = |coef: Vec<(usize, i64)>, b: BigRational| {
        let mut row = vec![BigRational::zero(); n];
        for (j, x) in coef {
            row[j] += ratio(x, 1);
        }
        rows.push(row);
        rhs.push(b);
    };
    for i in 0..e {
        push(vec![(s, 1), (i, -1)], ratio(3, 1));
        push(vec![(i, 1)], ratio(1, 2));
    }
    for es in &k.vertices {
        let mut coef: Vec<(usize, i64)> = es.iter().map(|&x| (x, -1)).collect();
        coef.push((s, 1));
        push(coef, ratio(2, 1));
    }
    for c in &k.prismatic3 {
        let mut coef: Vec<(usize, i64)> = c.crossed_edges.iter().map(|&x| (x, 1)).collect();
        coef.push((s, 1));
        push(coef, ratio(4, 1));
    }
    for c in &k.prismatic4 {
        let mut coef: Vec<(usize, i64)> = c.crossed_edges.iter().map(|&x| (x, 1)).collect();
        coef.push((s, 1));
        push(coef, ratio(5, 1));
    }
    for (_, _, es) in k.quad_sums() {
        let mut coef: Vec<(usize, i64)> = es.iter().map(|&x| (x, 1)).collect();
        coef.push((s, 1));
        push(coef, ratio(6, 1));
    }
    let mut obj = vec![BigRational::zero(); n];
    obj[s] = BigRational::one();
    let sol = lp::maximize(&rows, &rhs, &obj).expect("bounded with feasible origin");
    let t = sol.x[s].clone() - ratio(3, 1);
    let nonempty = t > BigRational::zero();
    FeasibilityReport {
        nonempty,
        witness: nonempty.then(|| AngleAssignment::new(sol.x[..e].to_vec())),
        max_slack: t,
        pivots: sol.pivots,
    }
}

/// `(1 - t) a + t (1/3, ..., 1/3)`, checked to stay in the polytope.
pub fn interior_path(
    c: &AbstractPolyhedron,
    a: &AngleAssignment,
    t: &BigRational,
) -> Result<AngleAssignment, AngleError> {
    if *t < BigRational::zero() || *t >= BigRational::one() {
        return Err(AngleError::BadParameter);
    }
    let k = AndreevConstraints::new(c);
    let r = check_with(&k, a, false)?;
    if !r.member {
        return Err(AngleError::NotMember(Box::new(r)));
    }
    let third = AngleAssignment::uniform(a.len(), ratio(1, 3));
    let out = a.lerp(&third, t);
    let r = check_with(&k, &out, false)?;
    if !r.member {
        return Err(AngleError::NotMember(Box::new(r)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::*;

    fn prism5_witness() -> (AbstractPolyhedron, AngleAssignment) {
        let p = prism(5);
        let vals = p
            .edges()
            .iter()
            .map(|e| {
                let lateral = e.faces.iter().all(|&f| p.faces()[f].len() == 4);
                if lateral {
                    ratio(1, 4)
                } else {
                    ratio(49, 100)
                }
            })
            .collect();
        (p, AngleAssignment::new(vals))
    }

    #[test]
    fn dodecahedron_two_fifths_member() {
        let d = dodecahedron();
        let r = check_conditions(&d, &AngleAssignment::uniform(30, ratio(2, 5))).unwrap();
        assert!(r.member, "{r}");
    }

    #[test]
    fn prism_two_fifths_violates_three() {
        let p = prism(5);
        let r = check_conditions(&p, &AngleAssignment::uniform(9, ratio(2, 5))).unwrap();
        assert!(!r.holds(3));
        assert!(r.holds(2));
        assert!(!r.member);
    }

    #[test]
    fn prism_witness_member() {
        let (p, a) = prism5_witness();
        assert!(check_conditions(&p, &a).unwrap().member);
        let b = interior_path(&p, &a, &ratio(9, 10)).unwrap();
        assert!(check_conditions(&p, &b).unwrap().member);
    }

    #[test]
    fn size_mismatch() {
        let p = prism(5);
        assert!(matches!(
            check_conditions(&p, &AngleAssignment::uniform(8, ratio(1, 3))),
            Err(AngleError::SizeMismatch { expected: 9, got: 8 })
        ));
    }

    #[test]
    fn interior_path_examples() {
        let d = dodecahedron();
        let a = AngleAssignment::uniform(30, ratio(2, 5));
        let h = interior_path(&d, &a, &ratio(1, 2)).unwrap();
        assert!(h.values().iter().all(|x| *x == ratio(11, 30)));
        assert_eq!(interior_path(&d, &a, &ratio(0, 1)).unwrap(), a);
        assert_eq!(
            interior_path(&d, &a, &ratio(1, 1)).unwrap_err(),
            AngleError::BadParameter
        );
    }

    #[test]
    fn feasibility_verdicts() {
        let f = feasible(&alternately_truncated_cube());
        assert!(!f.nonempty);
        assert!(f.max_slack <= BigRational::zero());
        let f = feasible(&dodecahedron());
        assert!(f.nonempty);
        assert!(check_conditions(&dodecahedron(), f.witness.as_ref().unwrap()).unwrap().member);
    }

    #[test]
    fn truncated_tetrahedron_candidate() {
        let c = truncated_tetrahedron();
        let vals = c
            .edges()
            .iter()
            .map(|e| {
                if e.faces.iter().any(|&f| c.faces()[f].len() == 3) {
                    ratio(1, 2)
                } else {
                    ratio(1, 10)
                }
            })
            .collect();
        assert!(check_conditions(&c, &AngleAssignment::new(vals)).unwrap().member);
        assert!(feasible(&c).nonempty);
    }

    #[test]
    fn json_round_trip() {
        let a = AngleAssignment::uniform(9, ratio(2, 5));
        let j = a.to_json();
        assert_eq!(AngleAssignment::from_json(&j, 9).unwrap(), a);
        let d = AngleJson {
            angles: BTreeMap::from([("0".to_string(), "1/3".to_string())]),
            default: Some("2/5".into()),
        };
        let b = AngleAssignment::from_json(&d, 9).unwrap();
        assert_eq!(*b.get(0), ratio(1, 3));
        assert_eq!(*b.get(8), ratio(2, 5));
    }
}
