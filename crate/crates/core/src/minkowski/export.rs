use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{GeometryError, MVec, Realization};
use crate::angles::{AngleAssignment, AngleJson};
use crate::complex::{AbstractPolyhedron, ComplexJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Off,
    Json,
    BallJson,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "off" => Ok(Self::Off),
            "json" => Ok(Self::Json),
            "ball_json" => Ok(Self::BallJson),
            other => Err(format!("unknown format {other:?}; expected off, json or ball_json")),
        }
    }
}

/// Serializes a realization. Output bytes depend only on the realization.
/// Fifteen decimals, without a sign on values that round to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.15}");
    match s.strip_prefix('-') {
        Some(t) if t.bytes().all(|c| c == b'0' || c == b'.') => t.to_string(),
        _ => s,
    }
}

pub fn export(r: &Realization, format: ExportFormat) -> String {
    match format {
        ExportFormat::Off => to_off(r),
        ExportFormat::Json => serde_json::to_string_pretty(&to_json(r)).unwrap() + "\n",
        ExportFormat::BallJson => serde_json::to_string_pretty(&to_ball_json(r)).unwrap() + "\n",
    }
}

fn to_off(r: &Realization) -> String {
    let c = r.complex();
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} {}", c.vertex_count(), c.face_count(), c.edge_count()).unwrap();
    for p in r.vertex_points() {
        let b = p.to_ball();
        writeln!(s, "{} {} {}", fixed(b[0]), fixed(b[1]), fixed(b[2])).unwrap();
    }
    for f in c.faces() {
        let ids: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{} {}", f.len(), ids.join(" ")).unwrap();
    }
    s
}

fn to_json(r: &Realization) -> serde_json::Value {
    let normals: Vec<[String; 4]> = r.normals().iter().map(|v| v.x.map(|c| format!("{c:?}"))).collect();
    let vertices: Vec<[String; 4]> = r.vertex_points().iter().map(|v| v.x.map(|c| format!("{c:?}"))).collect();
    json!({
        "complex": r.complex().to_json(),
        "normals": normals,
        "target_radians": r.target().iter().map(|t| format!("{t:?}")).collect::<Vec<_>>(),
        "angles": r.exact().map(|a| a.to_json()),
        "vertices": vertices,
        "achieved_radians": r.achieved_angles().iter().map(|t| format!("{t:?}")).collect::<Vec<_>>(),
        "edge_lengths": r.edge_lengths().iter().map(|t| format!("{t:?}")).collect::<Vec<_>>(),
        "gram_residual": r.gram_residual(),
    })
}

fn to_ball_json(r: &Realization) -> serde_json::Value {
    let vertices: Vec<[f64; 3]> = r.vertex_points().iter().map(|p| p.to_ball()).collect();
    json!({
        "vertices": vertices,
        "faces": r.complex().faces(),
    })
}

#[derive(Deserialize)]
struct RealizationJson {
    complex: ComplexJson,
    normals: Vec<[String; 4]>,
    target_radians: Vec<String>,
    angles: Option<AngleJson>,
}

impl Realization {
    /// Parses the `json` export format.
    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        let bad = |m: String| GeometryError::BadParameters(m);
        let j: RealizationJson = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        let c = AbstractPolyhedron::from_json(j.complex).map_err(|e| bad(e.to_string()))?;
        let num = |t: &str| t.parse::<f64>().map_err(|e| bad(format!("{t:?}: {e}")));
        let mut normals = Vec::with_capacity(j.normals.len());
        for v in &j.normals {
            normals.push(MVec::new(num(&v[0])?, num(&v[1])?, num(&v[2])?, num(&v[3])?));
        }
        let target = j.target_radians.iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
        if normals.len() != c.face_count() || target.len() != c.edge_count() {
            return Err(bad("normal or angle count does not match the complex".into()));
        }
        let exact = match j.angles {
            Some(a) => Some(AngleAssignment::from_json(&a, c.edge_count()).map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        Ok(Realization::new(c, normals, target, exact))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::build_prism;

    #[test]
    fn off_counts() {
        let r = build_prism(5, std::f64::consts::FRAC_PI_4, 0.03).unwrap();
        let off = export(&r, ExportFormat::Off);
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("6 5 9"));
        assert_eq!(off.lines().count(), 2 + 6 + 5);
    }

    #[test]
    fn json_round_trip() {
        let r = build_prism(6, 0.7, 0.03).unwrap();
        let s = export(&r, ExportFormat::Json);
        let back = Realization::from_json_str(&s).unwrap();
        assert_eq!(back.normals(), r.normals());
        assert_eq!(back.target(), r.target());
        assert_eq!(export(&back, ExportFormat::Json), s);
    }
}
