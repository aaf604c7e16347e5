//! Continuation along straight segments of angle space.

use super::newton::{check_cells, choose_base, solve_normals, vertex_sums};
use super::{RealizeError, SolverConfig};
use crate::angles::{check_with, AndreevConstraints, AngleAssignment};
use crate::complex::AbstractPolyhedron;
use crate::minkowski::{vertex_determinant, MVec, Realization};

/// State reported when a vertex determinant drops below the event threshold.
#[derive(Debug, Clone)]
pub struct EventInfo {
    /// Path parameter at which the threshold is crossed.
    pub t: f64,
    pub vertex: usize,
    /// Gram determinant of the vertex in the returned realization.
    pub det: f64,
    pub realization: Realization,
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

fn vertex_dets(c: &AbstractPolyhedron, angles: &[f64]) -> Vec<f64> {
    (0..c.vertex_count())
        .map(|v| {
            let [x, y, z] = c.vertex_edges(v);
            vertex_determinant(angles[x], angles[y], angles[z])
        })
        .collect()
}

/// Earliest `t` in `(0, 1]` at which some vertex determinant of the schedule falls below `threshold`.
pub(crate) fn first_event(c: &AbstractPolyhedron, from: &[f64], to: &[f64], threshold: f64) -> Option<(f64, usize)> {
    let below = |t: f64| -> Option<usize> {
        let d = vertex_dets(c, &lerp(from, to, t));
        (0..d.len()).filter(|&v| d[v] < threshold).min_by(|&a, &b| d[a].total_cmp(&d[b]))
    };
    below(1.0)?;
    let samples = 2000;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for k in 1..=samples {
        let t = k as f64 / samples as f64;
        if below(t).is_some() {
            hi = t;
            break;
        }
        lo = t;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if below(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    below(hi).map(|v| (hi, v))
}

/// Follows the solution from `start` (solving `from`) to the angles `to` at parameter `t_end`.
///
/// Returns the normals at `t_end` and the number of accepted steps.
pub(crate) fn track(
    c: &AbstractPolyhedron,
    from: &[f64],
    to: &[f64],
    t_end: f64,
    start: &[MVec<f64>],
    cfg: &SolverConfig,
) -> Result<(Vec<MVec<f64>>, usize), RealizeError> {
    let sums_from = vertex_sums(c, from);
    let sums_to = vertex_sums(c, &lerp(from, to, t_end));
    let low: Vec<f64> = sums_from.iter().zip(&sums_to).map(|(a, b)| a.min(*b)).collect();
    let base = choose_base(c, &low);
    let mut x = start.to_vec();
    let mut prev: Option<(Vec<MVec<f64>>, f64)> = None;
    let mut t = 0.0;
    let mut h = cfg.initial_step;
    let mut steps = 0;
    while t_end - t > 1e-15 {
        let last = h >= t_end - t;
        let step = if last { t_end - t } else { h };
        let t_next = if last { t_end } else { t + step };
        let seed: Vec<MVec<f64>> = match &prev {
            Some((xp, hp)) => x.iter().zip(xp).map(|(a, b)| *a + (*a - *b) * (step / hp)).collect(),
            None => x.clone(),
        };
        let angles = lerp(from, to, t_next);
        let attempt = solve_normals(c, &angles, &seed, base, cfg).and_then(|(xn, _)| {
            let margin = vertex_dets(c, &angles).into_iter().fold(f64::INFINITY, f64::min);
            if margin > 1e-6 {
                check_cells(c, &xn, cfg)?;
            }
            Ok(xn)
        });
        match attempt {
            Ok(xn) => {
                prev = Some((std::mem::replace(&mut x, xn), step));
                t = t_next;
                steps += 1;
                h = (step * 1.5).min(cfg.max_step);
            }
            Err(e) => {
                h = step * 0.5;
                if h < cfg.min_step {
                    return Err(RealizeError::StepFloorReached {
                        t,
                        cause: Box::new(e),
                    });
                }
            }
        }
    }
    Ok((x, steps))
}

/// Continues `start` along the segment from its target angles to `target`.
pub fn continue_path(
    start: &Realization,
    target: &AngleAssignment,
    cfg: &SolverConfig,
) -> Result<Realization, RealizeError> {
    continue_path_counted(start, target, cfg).map(|(r, _)| r)
}

pub(crate) fn continue_path_counted(
    start: &Realization,
    target: &AngleAssignment,
    cfg: &SolverConfig,
) -> Result<(Realization, usize), RealizeError> {
    let c = start.complex();
    let k = AndreevConstraints::new(c);
    let report = check_with(&k, target, true)?;
    if !report.member {
        return Err(RealizeError::InfeasibleAngles(Box::new(report)));
    }
    let from = start.target().to_vec();
    let to = target.radians();
    if let Some((t, vertex)) = first_event(c, &from, &to, cfg.event_threshold) {
        let (x, _) = track(c, &from, &to, t, start.normals(), cfg)?;
        let r = Realization::new(c.clone(), x, lerp(&from, &to, t), None);
        let det = r.vertex_determinants()[vertex];
        return Err(RealizeError::EventDetected(Box::new(EventInfo {
            t,
            vertex,
            det,
            realization: r,
        })));
    }
    let (x, steps) = track(c, &from, &to, 1.0, start.normals(), cfg)?;
    check_cells(c, &x, cfg)?;
    Ok((Realization::new(c.clone(), x, to, Some(target.clone())), steps))
}

/// Continuation between float angle vectors without event handling, used by the staged schedules.
pub(crate) fn follow(
    start: &Realization,
    to: &[f64],
    cfg: &SolverConfig,
    check_end: bool,
) -> Result<(Realization, usize), RealizeError> {
    let c = start.complex();
    let (x, steps) = track(c, start.target(), to, 1.0, start.normals(), cfg)?;
    if check_end {
        check_cells(c, &x, cfg)?;
    }
    Ok((Realization::new(c.clone(), x, to.to_vec(), None), steps))
}
