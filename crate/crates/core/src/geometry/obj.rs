use std::io::Write;

use super::{GeometryError, TriMesh};
use crate::math::Vec3;

/// Parses the `v`/`f` subset of Wavefront OBJ. Polygonal faces are fan-triangulated;
/// `/vt` and `/vn` suffixes are ignored. Indices are 1-based and must be positive.
pub fn parse_obj(text: &str) -> Result<TriMesh, GeometryError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut face_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|p| {
                        p.parse::<f64>()
                            .map_err(|_| GeometryError::at_line(line_no, format!("bad coordinate `{p}`")))
                    })
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(GeometryError::at_line(line_no, "vertex needs three coordinates"));
                }
                let v = Vec3::new(coords[0], coords[1], coords[2]);
                if !v.is_finite() {
                    return Err(GeometryError::at_line(line_no, "non-finite coordinate"));
                }
                vertices.push(v);
            }
            Some("f") => {
                let mut idxs = Vec::new();
                for p in parts {
                    let head = p.split('/').next().unwrap_or("");
                    let i: i64 = head
                        .parse()
                        .map_err(|_| GeometryError::at_line(line_no, format!("bad face index `{p}`")))?;
                    if i == 0 {
                        return Err(GeometryError::at_line(line_no, "face index 0 (OBJ indices are 1-based)"));
                    }
                    if i < 0 {
                        return Err(GeometryError::at_line(line_no, "relative (negative) face indices are not supported"));
                    }
                    idxs.push((i - 1) as u64);
                }
                if idxs.len() < 3 {
                    return Err(GeometryError::at_line(line_no, "face needs at least three vertices"));
                }
                for k in 1..idxs.len() - 1 {
                    faces.push([idxs[0], idxs[k], idxs[k + 1]]);
                    face_lines.push(line_no);
                }
            }
            _ => {}
        }
    }

    let n = vertices.len() as u64;
    let mut out = Vec::with_capacity(faces.len());
    for (f, &line_no) in faces.iter().zip(&face_lines) {
        if f.iter().any(|&i| i >= n) {
            return Err(GeometryError::at_line(line_no, format!("face index out of range ({n} vertices)")));
        }
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return Err(GeometryError::at_line(line_no, "face repeats a vertex"));
        }
        out.push([f[0] as u32, f[1] as u32, f[2] as u32]);
    }
    if out.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    TriMesh::new(vertices, out)
}

pub fn write_obj<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    for v in mesh.vertices() {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParseLocation;

    #[test]
    fn minimal_triangle() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn zero_index_is_rejected_with_line() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n").unwrap_err();
        match err {
            GeometryError::Parse { at, .. } => assert_eq!(at, ParseLocation::Line(4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_indices_are_rejected() {
        assert!(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").is_err());
    }

    #[test]
    fn suffixes_and_quads() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2/2/1 3//1 4\n";
        let m = parse_obj(text).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn out_of_range_and_empty() {
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(matches!(parse_obj("v 0 0 0\n"), Err(GeometryError::EmptyMesh)));
        assert!(parse_obj("v 0 zero 0\n").is_err());
    }

    #[test]
    fn writer_round_trips_vertex_order() {
        let m = parse_obj("v 0.5 -1 2\nv 1 0 0\nv 0 1e-3 0\nf 1 2 3\n").unwrap();
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        assert_eq!(parse_obj(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
    }
}
