//! Explicit prisms.

use num_rational::BigRational;

use super::{GeometryError, MVec, Realization};
use crate::angles::AngleAssignment;
use crate::complex::{prism, split_prism};
use crate::scalar::{rational_to_f64, ratio};

/// Parameters of an explicit prism, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrismParams {
    pub n_faces: usize,
    pub polygon_angle: f64,
    pub gap: f64,
}

/// `Pr_N` with side-side angles `polygon_angle` and cap angles `pi/2 - gap`.
///
/// The sides are vertical planes over a regular hyperbolic `(N-2)`-gon centred
/// at the origin; the caps are horizontal planes at heights `±h`.
pub fn build_prism(n_faces: usize, polygon_angle: f64, gap: f64) -> Result<Realization, GeometryError> {
    let normals = prism_normals(PrismParams {
        n_faces,
        polygon_angle,
        gap,
    })?;
    let c = prism(n_faces);
    let target = c
        .edges()
        .iter()
        .map(|e| {
            if e.faces[1] < n_faces - 2 {
                polygon_angle
            } else {
                std::f64::consts::FRAC_PI_2 - gap
            }
        })
        .collect();
    Ok(Realization::new(c, normals, target, None))
}

/// [`build_prism`] with angles given as rational multiples of π; keeps the exact assignment.
pub fn build_prism_exact(
    n_faces: usize,
    polygon_angle: &BigRational,
    gap: &BigRational,
) -> Result<Realization, GeometryError> {
    let pi = std::f64::consts::PI;
    let r = build_prism(n_faces, rational_to_f64(polygon_angle) * pi, rational_to_f64(gap) * pi)?;
    let half = ratio(1, 2);
    let exact = AngleAssignment::new(
        r.complex()
            .edges()
            .iter()
            .map(|e| {
                if e.faces[1] < n_faces - 2 {
                    polygon_angle.clone()
                } else {
                    &half - gap
                }
            })
            .collect(),
    );
    Ok(r.with_exact(exact))
}

fn prism_normals(p: PrismParams) -> Result<Vec<MVec<f64>>, GeometryError> {
    let PrismParams {
        n_faces,
        polygon_angle,
        gap,
    } = p;
    if n_faces < 5 {
        return Err(GeometryError::BadParameters(format!("a prism needs N >= 5, got {n_faces}")));
    }
    let n = n_faces - 2;
    let turn = 2.0 * std::f64::consts::PI / n as f64;
    if !(polygon_angle > 0.0 && polygon_angle < std::f64::consts::PI - turn) {
        return Err(GeometryError::BadParameters(format!(
            "no regular {n}-gon with angle {polygon_angle}"
        )));
    }
    if !(gap > 0.0 && gap < std::f64::consts::FRAC_PI_2) {
        return Err(GeometryError::BadParameters(format!("gap {gap} outside (0, pi/2)")));
    }
    let cosh2 = (1.0 + polygon_angle.cos()) / (1.0 - turn.cos());
    let (ch, sh) = (cosh2.sqrt(), (cosh2 - 1.0).sqrt());
    let mut normals: Vec<MVec<f64>> = (0..n)
        .map(|j| {
            let phi = turn * (j as f64 + 0.5);
            MVec::new(sh, ch * phi.cos(), ch * phi.sin(), 0.0)
        })
        .collect();
    let sinh_h = gap.sin() / sh;
    let cosh_h = (1.0 + sinh_h * sinh_h).sqrt();
    normals.push(MVec::new(sinh_h, 0.0, 0.0, cosh_h));
    normals.push(MVec::new(sinh_h, 0.0, 0.0, -cosh_h));
    Ok(normals)
}

/// Exact angles of `D_N` obtained by doubling the prism of the construction.
///
/// `labels` gives the catalog face of each construction face, in the order
/// `S_0..S_{n-1}, T, R(T), R(S_0)`.
pub fn split_prism_angles(n_faces: usize, labels: &[usize]) -> AngleAssignment {
    let n = n_faces - 3;
    let c = split_prism(n_faces);
    let vertical = if n == 4 { ratio(2, 5) } else { ratio(1, 2) };
    let mut inverse = vec![0; n_faces];
    for (i, &l) in labels.iter().enumerate() {
        inverse[l] = i;
    }
    let values = c
        .edges()
        .iter()
        .map(|e| {
            let (f, g) = (inverse[e.faces[0]], inverse[e.faces[1]]);
            let caps = [n, n + 1];
            if caps.contains(&f) || caps.contains(&g) {
                ratio(1, 3)
            } else if (f, g) == (0, n + 2) || (g, f) == (0, n + 2) {
                ratio(1, 2)
            } else {
                vertical.clone()
            }
        })
        .collect();
    AngleAssignment::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn pentagonal_angles() {
        let r = build_prism(5, FRAC_PI_4, 0.01 * PI).unwrap();
        let achieved = r.achieved_angles();
        for (e, a) in r.complex().edges().iter().zip(&achieved) {
            if e.faces[1] < 3 {
                assert!((a - FRAC_PI_4).abs() < 1e-12);
            } else {
                assert!((a - (FRAC_PI_2 - 0.01 * PI)).abs() < 1e-12);
            }
        }
        assert!(r.gram_residual() < 1e-12);
        assert!(r.vertex_determinants().iter().all(|&d| d > 0.0));
    }

    #[test]
    fn bad_parameters() {
        assert!(build_prism(4, 0.5, 0.01).is_err());
        assert!(build_prism(5, 1.2, 0.01).is_err());
        assert!(build_prism(6, 0.5, 0.0).is_err());
    }

    #[test]
    fn exact_variant_matches() {
        let r = build_prism_exact(7, &ratio(1, 4), &ratio(1, 100)).unwrap();
        assert!(r.angle_deviation() < 1e-12);
        assert_eq!(r.exact().unwrap().get(0), &ratio(49, 100));
    }
}
