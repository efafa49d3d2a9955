use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::ViewPose;
use crate::geometry::{TriMesh, Welder};
use crate::math::{Point2, Vec3};
use crate::planar::{BucketGrid, Rect2};

const MIN_PROJECTED_LEN: f64 = 1e-9;
const SAMPLES: usize = 16;
const BISECT_TOL: f64 = 1e-4;
const INSIDE_MARGIN: f64 = 1e-9;
const DEPTH_EPS: f64 = 1e-7;
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Silhouette,
    Feature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedEdge {
    pub a: Point2,
    pub b: Point2,
    pub visibility: Visibility,
    pub kind: EdgeKind,
}

/// A classified piece of a mesh edge, before coincident pieces are merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePiece {
    pub a: Vec3,
    pub b: Vec3,
    pub visibility: Visibility,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeOptions {
    pub feature_angle_deg: f64,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions { feature_angle_deg: 20.0 }
    }
}

/// Projected triangles with depth. A point is occluded when its projection lies in a
/// triangle (boundary included) that is nearer to the camera at that location.
pub struct OcclusionIndex {
    pose: ViewPose,
    tris: Vec<([Point2; 3], [f64; 3], f64)>,
    grid: BucketGrid,
}

impl OcclusionIndex {
    pub fn new(mesh: &TriMesh, pose: &ViewPose) -> Self {
        let mut tris = Vec::with_capacity(mesh.faces().len());
        for t in mesh.triangles() {
            let p = t.map(|v| pose.project(v));
            let area2 = (p[1] - p[0]).cross(p[2] - p[0]);
            if area2.abs() <= 1e-18 {
                continue;
            }
            tris.push((p, t.map(|v| pose.depth(v)), area2));
        }
        let bounds = Rect2::from_points(tris.iter().flat_map(|t| t.0.iter()))
            .unwrap_or(Rect2::centered(1.0))
            .inflate(1e-6);
        let mut grid = BucketGrid::for_items(bounds, tris.len());
        for (i, t) in tris.iter().enumerate() {
            grid.insert(i as u32, &Rect2::from_points(&t.0).unwrap());
        }
        OcclusionIndex { pose: *pose, tris, grid }
    }

    pub fn is_occluded(&self, p: Vec3) -> bool {
        let q = self.pose.project(p);
        let depth = self.pose.depth(p);
        let mut cand = Vec::new();
        self.grid.query(&Rect2::new(q, q), &mut cand);
        cand.iter().any(|&i| {
            let (t, d, area2) = &self.tris[i as usize];
            let l0 = (t[1] - q).cross(t[2] - q) / area2;
            let l1 = (t[2] - q).cross(t[0] - q) / area2;
            let l2 = 1.0 - l0 - l1;
            l0 >= -INSIDE_MARGIN
                && l1 >= -INSIDE_MARGIN
                && l2 >= -INSIDE_MARGIN
                && l0 * d[0] + l1 * d[1] + l2 * d[2] < depth - DEPTH_EPS
        })
    }
}

struct MeshEdge {
    a: usize,
    b: usize,
    kind: EdgeKind,
}

fn drawable_edges(mesh: &TriMesh, pose: &ViewPose, opts: &EdgeOptions) -> (Vec<Vec3>, Vec<MeshEdge>) {
    let mut welder = Welder::new(1e-9);
    let ids: Vec<u32> = mesh.vertices().iter().map(|&v| welder.insert(v)).collect();
    let mut adj: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        let g = f.map(|i| ids[i as usize]);
        for k in 0..3 {
            let (a, b) = (g[k], g[(k + 1) % 3]);
            if a != b {
                adj.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
    }
    let d = pose.view_dir();
    let normals: Vec<Vec3> = (0..mesh.faces().len()).map(|i| mesh.face_normal(i).normalized()).collect();
    let front = |n: Vec3| n.dot(d) < -1e-9;
    let cos_limit = opts.feature_angle_deg.to_radians().cos();
    let mut out = Vec::new();
    for ((a, b), faces) in adj {
        let kind = if faces.len() == 2 {
            let (n0, n1) = (normals[faces[0]], normals[faces[1]]);
            if front(n0) != front(n1) {
                Some(EdgeKind::Silhouette)
            } else if n0.dot(n1) < cos_limit {
                Some(EdgeKind::Feature)
            } else {
                None
            }
        } else {
            Some(EdgeKind::Feature)
        };
        if let Some(kind) = kind {
            out.push(MeshEdge { a: a as usize, b: b as usize, kind });
        }
    }
    (welder.points, out)
}

/// Silhouette and feature edges, split at visibility changes, without merging.
pub fn classify_edges_raw(mesh: &TriMesh, pose: &ViewPose, opts: &EdgeOptions) -> Vec<EdgePiece> {
    let (points, edges) = drawable_edges(mesh, pose, opts);
    let occ = OcclusionIndex::new(mesh, pose);
    let mut out = Vec::new();
    for e in edges {
        let (a, b) = (points[e.a], points[e.b]);
        let plen = pose.project(a).dist(pose.project(b));
        if plen < MIN_PROJECTED_LEN {
            continue;
        }
        let vis = |t: f64| !occ.is_occluded(a.lerp(b, t));
        let ts: Vec<f64> = (0..SAMPLES).map(|i| (i as f64 + 0.5) / SAMPLES as f64).collect();
        let states: Vec<bool> = ts.iter().map(|&t| vis(t)).collect();
        let mut start = 0.0;
        for i in 0..SAMPLES {
            let last = i + 1 == SAMPLES;
            if !last && states[i] == states[i + 1] {
                continue;
            }
            let end = if last {
                1.0
            } else {
                let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                while (hi - lo) * plen > BISECT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if vis(mid) == states[i] {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            out.push(EdgePiece {
                a: a.lerp(b, start),
                b: a.lerp(b, end),
                visibility: if states[i] { Visibility::Visible } else { Visibility::Hidden },
                kind: e.kind,
            });
            start = end;
        }
    }
    out
}

pub fn classify_edges(mesh: &TriMesh, pose: &ViewPose) -> Vec<ProjectedEdge> {
    classify_edges_with(mesh, pose, &EdgeOptions::default())
}

pub fn classify_edges_with(mesh: &TriMesh, pose: &ViewPose, opts: &EdgeOptions) -> Vec<ProjectedEdge> {
    let projected: Vec<ProjectedEdge> = classify_edges_raw(mesh, pose, opts)
        .into_iter()
        .map(|p| ProjectedEdge {
            a: pose.project(p.a),
            b: pose.project(p.b),
            visibility: p.visibility,
            kind: p.kind,
        })
        .collect();
    merge_edges(&projected)
}

struct LineKey {
    theta: f64,
    offset: f64,
    dir: Point2,
}

fn line_key(a: Point2, b: Point2) -> LineKey {
    let mut dir = (b - a).normalized();
    if dir.y < 0.0 || (dir.y == 0.0 && dir.x < 0.0) {
        dir = -dir;
    }
    let mut theta = dir.y.atan2(dir.x);
    if theta >= std::f64::consts::PI - 1e-9 {
        theta -= std::f64::consts::PI;
        dir = -dir;
    }
    LineKey { theta, offset: dir.cross(a), dir }
}

fn union(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 + MERGE_TOL => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn subtract(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(lo, hi) in a {
        let mut cur = lo;
        for &(blo, bhi) in b {
            if bhi <= cur || blo >= hi {
                continue;
            }
            if blo > cur {
                out.push((cur, blo));
            }
            cur = cur.max(bhi);
        }
        if cur < hi {
            out.push((cur, hi));
        }
    }
    out
}

/// Merges collinear overlapping edges: visible coverage wins, hidden keeps only what no
/// visible piece covers. A merged run is a silhouette if any contributing piece was one.
pub fn merge_edges(edges: &[ProjectedEdge]) -> Vec<ProjectedEdge> {
    let mut keyed: Vec<(LineKey, &ProjectedEdge)> = edges
        .iter()
        .filter(|e| e.a.dist(e.b) > MERGE_TOL)
        .map(|e| (line_key(e.a, e.b), e))
        .collect();
    keyed.sort_by(|x, y| x.0.theta.total_cmp(&y.0.theta).then(x.0.offset.total_cmp(&y.0.offset)));

    // Cluster by direction, then by offset within each direction cluster.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0.theta - keyed[j - 1].0.theta <= MERGE_TOL {
            j += 1;
        }
        let mut band: Vec<usize> = (i..j).collect();
        band.sort_by(|&x, &y| keyed[x].0.offset.total_cmp(&keyed[y].0.offset));
        let mut start = 0;
        for k in 1..=band.len() {
            if k == band.len() || keyed[band[k]].0.offset - keyed[band[k - 1]].0.offset > MERGE_TOL {
                groups.push(band[start..k].to_vec());
                start = k;
            }
        }
        i = j;
    }

    let mut out = Vec::new();
    for g in groups {
        let (key, rep) = (&keyed[g[0]].0, keyed[g[0]].1);
        let base = rep.a - key.dir * key.dir.dot(rep.a);
        let s = |p: Point2| key.dir.dot(p);
        let mut visible = Vec::new();
        let mut hidden = Vec::new();
        let mut silhouettes = Vec::new();
        for &i in &g {
            let e = keyed[i].1;
            let (lo, hi) = (s(e.a).min(s(e.b)), s(e.a).max(s(e.b)));
            match e.visibility {
                Visibility::Visible => visible.push((lo, hi)),
                Visibility::Hidden => hidden.push((lo, hi)),
            }
            if e.kind == EdgeKind::Silhouette {
                silhouettes.push((lo, hi));
            }
        }
        let visible = union(visible);
        let hidden = subtract(&union(hidden), &visible);
        for (vis, runs) in [(Visibility::Visible, visible), (Visibility::Hidden, hidden)] {
            for (lo, hi) in runs {
                if hi - lo <= MERGE_TOL {
                    continue;
                }
                let kind = if silhouettes.iter().any(|&(a, b)| a < hi - MERGE_TOL && b > lo + MERGE_TOL) {
                    EdgeKind::Silhouette
                } else {
                    EdgeKind::Feature
                };
                out.push(ProjectedEdge {
                    a: base + key.dir * lo,
                    b: base + key.dir * hi,
                    visibility: vis,
                    kind,
                });
            }
        }
    }
    out
}
