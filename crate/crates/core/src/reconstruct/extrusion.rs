use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ReconstructError, VoxelGrid};
use crate::math::Point2;
use crate::planar::{chain_loops, remove_collinear, ring_contains, signed_area, Polygon2D};
use crate::vectorize::{simplify, Contour};

/// Profile simplification tolerance, in voxels.
pub const PROFILE_EPSILON_VOXELS: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// Profile plane coordinates for this axis, in increasing axis order.
    pub fn plane_axes(self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

/// A prism: `profile` in the plane of the other two axes (increasing order), swept over `span`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrusionProgram {
    pub profile: Polygon2D,
    pub axis: Axis,
    pub span: (f64, f64),
}

#[derive(Serialize, Deserialize)]
struct ProgramJson {
    profile: Vec<[f64; 2]>,
    holes: Vec<Vec<[f64; 2]>>,
    axis: Axis,
    span: [f64; 2],
}

fn ring_json(r: &[Point2]) -> Vec<[f64; 2]> {
    r.iter().map(|p| [p.x, p.y]).collect()
}

fn ring_from_json(r: &[[f64; 2]]) -> Vec<Point2> {
    r.iter().map(|p| Point2::new(p[0], p[1])).collect()
}

impl ExtrusionProgram {
    pub fn to_json(&self) -> String {
        let j = ProgramJson {
            profile: ring_json(&self.profile.outer),
            holes: self.profile.holes.iter().map(|h| ring_json(h)).collect(),
            axis: self.axis,
            span: [self.span.0, self.span.1],
        };
        serde_json::to_string_pretty(&j).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ReconstructError> {
        let j: ProgramJson = serde_json::from_str(s).map_err(|e| ReconstructError::InvalidProgram(e.to_string()))?;
        if !(j.span[1] > j.span[0]) || j.profile.len() < 3 {
            return Err(ReconstructError::InvalidProgram("need hi > lo and a profile of at least 3 points".into()));
        }
        Ok(ExtrusionProgram {
            profile: Polygon2D::new(ring_from_json(&j.profile), j.holes.iter().map(|h| ring_from_json(h)).collect()),
            axis: j.axis,
            span: (j.span[0], j.span[1]),
        })
    }

    pub fn volume(&self) -> f64 {
        self.profile.area() * (self.span.1 - self.span.0)
    }
}

/// Cell `(i, j, k)` where `k` runs along `axis` and `(i, j)` are the plane axes.
fn cell(g: &VoxelGrid, axis: Axis, i: usize, j: usize, k: usize) -> bool {
    match axis {
        Axis::X => g.get(k, i, j),
        Axis::Y => g.get(i, k, j),
        Axis::Z => g.get(i, j, k),
    }
}

fn slice(g: &VoxelGrid, axis: Axis, k: usize) -> Vec<bool> {
    let n = g.resolution();
    (0..n * n).map(|c| cell(g, axis, c % n, c / n, k)).collect()
}

/// Boundary of the occupied cells of an `n`×`n` mask as polygons in model units.
fn trace_mask(mask: &[bool], n: usize, g: &VoxelGrid) -> Vec<Polygon2D> {
    let at = |i: i64, j: i64| i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n && mask[j as usize * n + i as usize];
    let corner = |i: usize, j: usize| j * (n + 1) + i;
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !mask[j * n + i] {
                continue;
            }
            let (ii, jj) = (i as i64, j as i64);
            if !at(ii, jj - 1) {
                edges.push((corner(i, j), corner(i + 1, j)));
            }
            if !at(ii + 1, jj) {
                edges.push((corner(i + 1, j), corner(i + 1, j + 1)));
            }
            if !at(ii, jj + 1) {
                edges.push((corner(i + 1, j + 1), corner(i, j + 1)));
            }
            if !at(ii - 1, jj) {
                edges.push((corner(i, j + 1), corner(i, j)));
            }
        }
    }
    let o = g.origin().x;
    let vs = g.voxel_size();
    let points: Vec<Point2> = (0..(n + 1) * (n + 1))
        .map(|c| Point2::new(o + (c % (n + 1)) as f64 * vs, o + (c / (n + 1)) as f64 * vs))
        .collect();
    let mut outers = Vec::new();
    let mut holes = Vec::new();
    for ring in chain_loops(&points, &edges) {
        let pts: Vec<Point2> = ring.iter().map(|&i| points[i]).collect();
        let pts = remove_collinear(&pts, 1e-12);
        let c = simplify(&Contour { points: pts, closed: true, hole: false }, PROFILE_EPSILON_VOXELS * vs).points;
        if c.len() < 3 {
            continue;
        }
        if signed_area(&c) > 0.0 {
            outers.push((c, Vec::new()));
        } else {
            holes.push(c);
        }
    }
    for h in holes {
        let probe = h[0].lerp(h[1], 0.5);
        let owner = outers
            .iter_mut()
            .filter(|(o, _)| ring_contains(o, probe))
            .min_by(|a, b| signed_area(&a.0).total_cmp(&signed_area(&b.0)));
        if let Some((_, hs)) = owner {
            hs.push(h);
        }
    }
    outers.into_iter().map(|(o, h)| Polygon2D::new(o, h)).collect()
}

/// A prism program when every occupied slice along some axis (tried Z, Y, X) is
/// bitwise identical, the occupied slices are contiguous, and the profile is one region.
pub fn detect_extrusion(g: &VoxelGrid) -> Option<ExtrusionProgram> {
    let n = g.resolution();
    for axis in [Axis::Z, Axis::Y, Axis::X] {
        let slices: Vec<Vec<bool>> = (0..n).map(|k| slice(g, axis, k)).collect();
        let occupied: Vec<usize> = (0..n).filter(|&k| slices[k].iter().any(|&b| b)).collect();
        let (Some(&lo), Some(&hi)) = (occupied.first(), occupied.last()) else {
            return None;
        };
        if hi - lo + 1 != occupied.len() || occupied.iter().any(|&k| slices[k] != slices[lo]) {
            continue;
        }
        let mut profiles = trace_mask(&slices[lo], n, g);
        if profiles.len() != 1 {
            continue;
        }
        let o = g.origin().x;
        let vs = g.voxel_size();
        return Some(ExtrusionProgram {
            profile: profiles.remove(0),
            axis,
            span: (o + lo as f64 * vs, o + (hi + 1) as f64 * vs),
        });
    }
    None
}
