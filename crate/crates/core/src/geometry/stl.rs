use std::collections::HashMap;
use std::io::Write;

use super::{GeometryError, TriMesh, DEDUP_TOLERANCE};
use crate::math::Vec3;

const HEADER_LEN: usize = 80;
const FACET_LEN: usize = 50;

pub(crate) fn looks_ascii(bytes: &[u8]) -> bool {
    if bytes.len() >= HEADER_LEN + 4 {
        let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        if HEADER_LEN + 4 + count.saturating_mul(FACET_LEN) == bytes.len() {
            return false;
        }
    }
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(0);
    bytes[start..].starts_with(b"solid")
}

pub fn parse_stl_ascii(text: &str, dedup: bool) -> Result<TriMesh, GeometryError> {
    let mut triangles: Vec<[Vec3; 3]> = Vec::new();
    let mut pending: Vec<Vec3> = Vec::new();
    let mut seen_solid = false;
    let mut in_facet = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut parts = raw.split_whitespace();
        let Some(keyword) = parts.next() else { continue };
        match keyword {
            "solid" => seen_solid = true,
            "facet" => {
                if in_facet {
                    return Err(GeometryError::at_line(line_no, "nested facet"));
                }
                in_facet = true;
                pending.clear();
            }
            "outer" | "endloop" => {}
            "vertex" => {
                if !in_facet {
                    return Err(GeometryError::at_line(line_no, "vertex outside facet"));
                }
                let c: Vec<f64> = parts
                    .map(|p| {
                        p.parse::<f64>()
                            .map_err(|_| GeometryError::at_line(line_no, format!("bad coordinate `{p}`")))
                    })
                    .collect::<Result<_, _>>()?;
                if c.len() != 3 || c.iter().any(|v| !v.is_finite()) {
                    return Err(GeometryError::at_line(line_no, "vertex needs three finite coordinates"));
                }
                pending.push(Vec3::new(c[0], c[1], c[2]));
            }
            "endfacet" => {
                if pending.len() != 3 {
                    return Err(GeometryError::at_line(
                        line_no,
                        format!("facet has {} vertices", pending.len()),
                    ));
                }
                triangles.push([pending[0], pending[1], pending[2]]);
                in_facet = false;
            }
            "endsolid" => break,
            other => {
                return Err(GeometryError::at_line(line_no, format!("unexpected keyword `{other}`")));
            }
        }
    }
    if !seen_solid {
        return Err(GeometryError::at_line(1, "missing `solid` header"));
    }
    if in_facet {
        return Err(GeometryError::at_line(text.lines().count(), "unterminated facet"));
    }
    build(triangles, dedup)
}

pub fn parse_stl_binary(bytes: &[u8], dedup: bool) -> Result<TriMesh, GeometryError> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(GeometryError::at_offset(bytes.len(), "file shorter than the 84-byte header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let needed = HEADER_LEN + 4 + count * FACET_LEN;
    if bytes.len() < needed {
        return Err(GeometryError::at_offset(
            bytes.len(),
            format!("truncated: {count} facets need {needed} bytes"),
        ));
    }
    let read_f32 = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
    let mut triangles = Vec::with_capacity(count);
    for i in 0..count {
        let base = HEADER_LEN + 4 + i * FACET_LEN + 12;
        let mut tri = [Vec3::ZERO; 3];
        for (k, v) in tri.iter_mut().enumerate() {
            let o = base + k * 12;
            *v = Vec3::new(read_f32(o), read_f32(o + 4), read_f32(o + 8));
            if !v.is_finite() {
                return Err(GeometryError::at_offset(o, "non-finite coordinate"));
            }
        }
        triangles.push(tri);
    }
    build(triangles, dedup)
}

fn build(triangles: Vec<[Vec3; 3]>, dedup: bool) -> Result<TriMesh, GeometryError> {
    if triangles.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    if !dedup {
        let vertices: Vec<Vec3> = triangles.iter().flatten().copied().collect();
        let faces = (0..triangles.len() as u32)
            .map(|i| [3 * i, 3 * i + 1, 3 * i + 2])
            .collect();
        return TriMesh::new(vertices, faces);
    }

    let mut welder = Welder::new(DEDUP_TOLERANCE);
    let mut faces = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let f = [welder.insert(tri[0]), welder.insert(tri[1]), welder.insert(tri[2])];
        if f[0] != f[1] && f[1] != f[2] && f[0] != f[2] {
            faces.push(f);
        }
    }
    if faces.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    TriMesh::new(welder.points, faces)
}

/// Merges points within `tol`, keeping first-seen order.
pub(crate) struct Welder {
    tol: f64,
    pub(crate) points: Vec<Vec3>,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl Welder {
    pub(crate) fn new(tol: f64) -> Self {
        Welder { tol, points: Vec::new(), cells: HashMap::new() }
    }

    fn key(&self, p: Vec3) -> (i64, i64, i64) {
        (
            (p.x / self.tol).floor() as i64,
            (p.y / self.tol).floor() as i64,
            (p.z / self.tol).floor() as i64,
        )
    }

    pub(crate) fn insert(&mut self, p: Vec3) -> u32 {
        let (kx, ky, kz) = self.key(p);
        let mut best: Option<(f64, u32)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &id in ids {
                            let d = (self.points[id as usize] - p).norm();
                            if d <= self.tol && best.map_or(true, |(bd, bid)| d < bd || (d == bd && id < bid)) {
                                best = Some((d, id));
                            }
                        }
                    }
                }
            }
        }
        if let Some((_, id)) = best {
            return id;
        }
        let id = self.points.len() as u32;
        self.points.push(p);
        self.cells.entry((kx, ky, kz)).or_default().push(id);
        id
    }
}

fn facet_normal(t: [Vec3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(t[2] - t[0]).normalized()
}

pub fn write_stl_binary<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    let mut header = [0u8; HEADER_LEN];
    let tag = b"orthoforge binary stl";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    w.write_all(&(mesh.faces().len() as u32).to_le_bytes())?;
    for t in mesh.triangles() {
        let n = facet_normal(t);
        for v in std::iter::once(n).chain(t) {
            for c in v.to_array() {
                w.write_all(&(c as f32).to_le_bytes())?;
            }
        }
        w.write_all(&[0, 0])?;
    }
    w.flush()
}

pub fn write_stl_ascii<W: Write>(mesh: &TriMesh, mut w: W) -> std::io::Result<()> {
    writeln!(w, "solid orthoforge")?;
    for t in mesh.triangles() {
        let n = facet_normal(t);
        writeln!(w, "  facet normal {} {} {}", n.x, n.y, n.z)?;
        writeln!(w, "    outer loop")?;
        for v in t {
            writeln!(w, "      vertex {} {} {}", v.x, v.y, v.z)?;
        }
        writeln!(w, "    endloop")?;
        writeln!(w, "  endfacet")?;
    }
    writeln!(w, "endsolid orthoforge")?;
    w.flush()
}
