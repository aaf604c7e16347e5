//! Newton iteration on the Gram system with gauge fixing.

use nalgebra::{DMatrix, DVector};

use super::{RealizeError, SolverConfig};
use crate::complex::AbstractPolyhedron;
use crate::minkowski::{extract_combinatorics, same_cell_structure, Lorentz, MVec, Realization};

/// Equations `<v_i, v_i> = 1`, `<v_i, v_j> = -cos a_ij` and six gauge constraints
/// pinning the three faces at a base vertex.
#[derive(Debug, Clone)]
pub struct GramSystem<'a> {
    complex: &'a AbstractPolyhedron,
    cosines: Vec<f64>,
    base: [usize; 3],
}

impl<'a> GramSystem<'a> {
    /// `base` is a vertex of `complex`; its faces are taken counterclockwise.
    pub fn new(complex: &'a AbstractPolyhedron, target: &[f64], base: usize) -> Self {
        Self {
            complex,
            cosines: target.iter().map(|a| a.cos()).collect(),
            base: complex.vertex_faces(base),
        }
    }

    pub fn unknowns(&self) -> usize {
        4 * self.complex.face_count()
    }

    pub fn equations(&self) -> usize {
        self.complex.face_count() + self.complex.edge_count() + 6
    }

    pub fn residual(&self, x: &[MVec<f64>]) -> DVector<f64> {
        let n = self.complex.face_count();
        let mut f = DVector::zeros(self.equations());
        for (i, v) in x.iter().enumerate() {
            f[i] = v.norm2() - 1.0;
        }
        for (k, e) in self.complex.edges().iter().enumerate() {
            f[n + k] = x[e.faces[0]].inner(&x[e.faces[1]]) + self.cosines[k];
        }
        let g = n + self.complex.edge_count();
        let [a, b, c] = self.base;
        f[g] = x[a].x[0];
        f[g + 1] = x[a].x[1];
        f[g + 2] = x[a].x[2];
        f[g + 3] = x[b].x[0];
        f[g + 4] = x[b].x[2];
        f[g + 5] = x[c].x[0];
        f
    }

    pub fn jacobian(&self, x: &[MVec<f64>]) -> DMatrix<f64> {
        let n = self.complex.face_count();
        let mut j = DMatrix::zeros(self.equations(), self.unknowns());
        let lower = |v: &MVec<f64>| [-v.x[0], v.x[1], v.x[2], v.x[3]];
        for (i, v) in x.iter().enumerate() {
            let l = lower(v);
            for k in 0..4 {
                j[(i, 4 * i + k)] = 2.0 * l[k];
            }
        }
        for (r, e) in self.complex.edges().iter().enumerate() {
            let [p, q] = e.faces;
            let (lp, lq) = (lower(&x[p]), lower(&x[q]));
            for k in 0..4 {
                j[(n + r, 4 * p + k)] = lq[k];
                j[(n + r, 4 * q + k)] = lp[k];
            }
        }
        let g = n + self.complex.edge_count();
        let [a, b, c] = self.base;
        j[(g, 4 * a)] = 1.0;
        j[(g + 1, 4 * a + 1)] = 1.0;
        j[(g + 2, 4 * a + 2)] = 1.0;
        j[(g + 3, 4 * b)] = 1.0;
        j[(g + 4, 4 * b + 2)] = 1.0;
        j[(g + 5, 4 * c)] = 1.0;
        j
    }
}

/// Lowest-index vertex whose angle sum is at least half the largest excess over π.
pub fn choose_base(c: &AbstractPolyhedron, sums: &[f64]) -> usize {
    let pi = std::f64::consts::PI;
    let best = sums.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s - pi));
    (0..c.vertex_count())
        .find(|&v| sums[v] - pi >= 0.5 * best)
        .unwrap_or(0)
}

/// Vertex nearest the Lorentzian centroid of the vertex points of `normals`.
///
/// As a gauge base it keeps coordinates small on long polyhedra.
pub(crate) fn central_vertex(c: &AbstractPolyhedron, normals: &[MVec<f64>]) -> usize {
    let pts: Vec<MVec<f64>> = (0..c.vertex_count())
        .map(|v| {
            let [a, b, f] = c.vertex_faces(v);
            let w = crate::minkowski::cross3(&normals[a], &normals[b], &normals[f]);
            w.unit_timelike().map(|p| if p.x[0] < 0.0 { -p } else { p }).unwrap_or_else(MVec::zero)
        })
        .collect();
    let centre = pts.iter().fold(MVec::zero(), |s, p| s + *p);
    (0..pts.len())
        .max_by(|&u, &v| pts[u].inner(&centre).total_cmp(&pts[v].inner(&centre)))
        .unwrap_or(0)
}

pub(crate) fn vertex_sums(c: &AbstractPolyhedron, angles: &[f64]) -> Vec<f64> {
    (0..c.vertex_count())
        .map(|v| c.vertex_edges(v).iter().map(|&e| angles[e]).sum())
        .collect()
}

/// Moves normals into the gauge of `base`: its point to the origin, `v_a` to
/// `e_3`, `v_b` into the `x1 x3` half-plane with `x1 > 0`, and `v_c` to `x2 > 0`.
pub fn apply_gauge(c: &AbstractPolyhedron, normals: &[MVec<f64>], base: usize) -> Vec<MVec<f64>> {
    let [a, b, cc] = c.vertex_faces(base);
    let w = crate::minkowski::cross3(&normals[a], &normals[b], &normals[cc]);
    let boost = match w.unit_timelike() {
        Some(p) => Lorentz::to_origin(&p),
        None => Lorentz::identity(),
    };
    let moved: Vec<MVec<f64>> = normals.iter().map(|v| boost.apply(v)).collect();
    let sp = |v: &MVec<f64>| [v.x[1], v.x[2], v.x[3]];
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let unit = |u: [f64; 3]| {
        let n = dot(u, u).sqrt();
        [u[0] / n, u[1] / n, u[2] / n]
    };
    let e3 = unit(sp(&moved[a]));
    let vb = sp(&moved[b]);
    let k = dot(vb, e3);
    let e1 = unit([vb[0] - k * e3[0], vb[1] - k * e3[1], vb[2] - k * e3[2]]);
    let e2 = [
        e3[1] * e1[2] - e3[2] * e1[1],
        e3[2] * e1[0] - e3[0] * e1[2],
        e3[0] * e1[1] - e3[1] * e1[0],
    ];
    let flip = dot(sp(&moved[cc]), e2) < 0.0;
    moved
        .iter()
        .map(|v| {
            let s = sp(v);
            let y2 = dot(s, e2);
            MVec::new(v.x[0], dot(s, e1), if flip { -y2 } else { y2 }, dot(s, e3))
        })
        .collect()
}

/// Solves the Gram system from `seed`, returning the gauge-fixed normals and the iteration count.
pub(crate) fn solve_normals(
    c: &AbstractPolyhedron,
    target: &[f64],
    seed: &[MVec<f64>],
    base: usize,
    cfg: &SolverConfig,
) -> Result<(Vec<MVec<f64>>, usize), RealizeError> {
    let sys = GramSystem::new(c, target, base);
    let mut x = apply_gauge(c, seed, base);
    let inf_norm = |f: &DVector<f64>| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut f = sys.residual(&x);
    let goal = cfg.residual_tol * 1e-3;
    for it in 0..cfg.max_newton_steps {
        let r = inf_norm(&f);
        if !r.is_finite() {
            return Err(RealizeError::Diverged { residual: r, steps: it });
        }
        if r < goal {
            return finish(c, x, base, it);
        }
        let jac = sys.jacobian(&x);
        let dx = jac.lu().solve(&(-&f)).ok_or(RealizeError::SingularJacobian)?;
        if !dx.iter().all(|v| v.is_finite()) {
            return Err(RealizeError::SingularJacobian);
        }
        let merit = f.norm_squared();
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<MVec<f64>> = x
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    MVec::new(
                        v.x[0] + lambda * dx[4 * i],
                        v.x[1] + lambda * dx[4 * i + 1],
                        v.x[2] + lambda * dx[4 * i + 2],
                        v.x[3] + lambda * dx[4 * i + 3],
                    )
                })
                .collect();
            let ft = sys.residual(&trial);
            if ft.norm_squared() < merit {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            let r = inf_norm(&f);
            if r < cfg.residual_tol {
                return finish(c, x, base, it);
            }
            return Err(RealizeError::Diverged { residual: r, steps: it });
        }
    }
    let r = inf_norm(&f);
    if r < cfg.residual_tol {
        finish(c, x, base, cfg.max_newton_steps)
    } else {
        Err(RealizeError::Diverged {
            residual: r,
            steps: cfg.max_newton_steps,
        })
    }
}

fn finish(
    c: &AbstractPolyhedron,
    x: Vec<MVec<f64>>,
    base: usize,
    steps: usize,
) -> Result<(Vec<MVec<f64>>, usize), RealizeError> {
    let [a, b, cc] = c.vertex_faces(base);
    if !(x[a].x[3] > 0.0 && x[b].x[1] > 0.0 && x[cc].x[2] > 0.0) {
        return Err(RealizeError::WrongCombinatorics("gauge signs flipped".into()));
    }
    Ok((x, steps))
}

/// Checks that the normals bound a polyhedron with the cell structure of `c`.
pub(crate) fn check_cells(c: &AbstractPolyhedron, x: &[MVec<f64>], cfg: &SolverConfig) -> Result<(), RealizeError> {
    let ext = extract_combinatorics(x, cfg.classify_tol)
        .map_err(|e| RealizeError::WrongCombinatorics(e.to_string()))?;
    if !same_cell_structure(&ext.complex, c) {
        return Err(RealizeError::WrongCombinatorics("cell structure differs from the complex".into()));
    }
    Ok(())
}

/// Newton solve for `(c, target)` from `seed`; the result is audited against `c`.
pub fn newton_solve(
    c: &AbstractPolyhedron,
    target: &[f64],
    seed: &[MVec<f64>],
    cfg: &SolverConfig,
) -> Result<Realization, RealizeError> {
    if target.len() != c.edge_count() || seed.len() != c.face_count() {
        return Err(RealizeError::Unsupported("target or seed size does not match the complex".into()));
    }
    let base = choose_base(c, &vertex_sums(c, target));
    let (x, _) = solve_normals(c, target, seed, base, cfg)?;
    check_cells(c, &x, cfg)?;
    Ok(Realization::new(c.clone(), x, target.to_vec(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::prism;
    use crate::minkowski::build_prism;

    #[test]
    fn system_is_square() {
        let c = prism(8);
        let t = vec![1.0; c.edge_count()];
        let s = GramSystem::new(&c, &t, 0);
        assert_eq!(s.unknowns(), s.equations());
    }

    #[test]
    fn jacobian_matches_differences() {
        let r = build_prism(6, 0.9, 0.1).unwrap();
        let c = r.complex();
        let s = GramSystem::new(c, r.target(), 0);
        let x = r.normals().to_vec();
        let j = s.jacobian(&x);
        let h = 1e-6;
        for col in [0, 5, 13, 22] {
            let mut xp = x.clone();
            xp[col / 4].x[col % 4] += h;
            let d = (s.residual(&xp) - s.residual(&x)) / h;
            for row in 0..s.equations() {
                assert!((d[row] - j[(row, col)]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn gauge_fixes_base_faces() {
        let r = build_prism(7, 0.8, 0.05).unwrap();
        let c = r.complex();
        let g = apply_gauge(c, r.normals(), 3);
        let [a, b, cc] = c.vertex_faces(3);
        assert!(g[a].max_abs_diff(&MVec::new(0.0, 0.0, 0.0, 1.0)) < 1e-12);
        assert!(g[b].x[0].abs() < 1e-12 && g[b].x[2].abs() < 1e-12 && g[b].x[1] > 0.0);
        assert!(g[cc].x[0].abs() < 1e-12 && g[cc].x[2] > 0.0);
    }

    #[test]
    fn converges_from_perturbed_prism() {
        let r = build_prism(5, std::f64::consts::FRAC_PI_4, 0.01 * std::f64::consts::PI).unwrap();
        let seed: Vec<MVec<f64>> = r
            .normals()
            .iter()
            .enumerate()
            .map(|(i, v)| *v + MVec::new(1e-3 * i as f64, -2e-3, 1e-3, 0.0))
            .collect();
        let s = newton_solve(r.complex(), r.target(), &seed, &SolverConfig::default()).unwrap();
        assert!(s.gram_residual() < 1e-12);
    }
}
