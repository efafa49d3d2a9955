use std::collections::BTreeSet;
use std::f64::consts::TAU;

use super::ReconstructError;
use crate::drawing::{PathSegment, TechnicalDrawing};
use crate::math::Point2;
use crate::planar::{dist_point_segment, ring_contains, segment_contacts, signed_area, BucketGrid, PointPool, Polygon2D, Rect2};
use crate::projection::Visibility;

/// Endpoint snapping distance in model units; two pixels at the standard 512 px raster.
pub const DEFAULT_SNAP: f64 = 2.0 * 2.4 / 512.0;

/// Dangling chains longer than this many snap distances are treated as open outlines.
pub const MAX_SPUR_SNAPS: f64 = 5.0;

const CURVE_PIECES: f64 = 64.0;

fn polylines(d: &TechnicalDrawing) -> Vec<(Point2, Point2)> {
    let mut out = Vec::new();
    for s in d.segments.iter().filter(|s| s.visibility == Visibility::Visible) {
        let pts: Vec<Point2> = match &s.segment {
            PathSegment::Line { a, b } => vec![*a, *b],
            PathSegment::Circle { center, radius } => {
                let ring = &Polygon2D::circle(*center, *radius, CURVE_PIECES as usize).outer;
                ring.iter().chain(ring.first()).copied().collect()
            }
            PathSegment::Arc { start, end, .. } => {
                let n = ((CURVE_PIECES * (end - start) / TAU).ceil() as usize).max(2);
                (0..=n).map(|k| s.segment.point_at(k as f64 / n as f64)).collect()
            }
        };
        out.extend(pts.windows(2).map(|w| (w[0], w[1])));
    }
    out
}

/// Undirected planar graph after snapping and splitting at every contact.
struct Graph {
    points: Vec<Point2>,
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    fn build(segs: &[(Point2, Point2)], snap: f64) -> Graph {
        let mut pool = PointPool::new(snap);
        let bounds = segs
            .iter()
            .fold(None::<Rect2>, |acc, &(a, b)| {
                let r = Rect2::new(a, a).including(b);
                Some(acc.map_or(r, |x| x.union(r)))
            })
            .unwrap_or(Rect2::centered(1.0))
            .inflate(snap);
        let mut index = BucketGrid::for_items(bounds, segs.len());
        let boxes: Vec<Rect2> = segs.iter().map(|&(a, b)| Rect2::new(a, a).including(b).inflate(snap)).collect();
        for (i, r) in boxes.iter().enumerate() {
            index.insert(i as u32, r);
        }
        // Endpoints first so crossings snap onto existing corners.
        for &(a, b) in segs {
            pool.insert(a);
            pool.insert(b);
        }
        let mut edges = BTreeSet::new();
        let mut cand = Vec::new();
        for (i, &(a, b)) in segs.iter().enumerate() {
            let mut ts = vec![0.0, 1.0];
            index.query(&boxes[i], &mut cand);
            for &j in &cand {
                if j as usize != i {
                    let (c, d) = segs[j as usize];
                    ts.extend(segment_contacts(a, b, c, d, snap).into_iter().map(|(t, _)| t));
                }
            }
            ts.sort_by(f64::total_cmp);
            let ids: Vec<usize> = ts.iter().map(|&t| pool.insert(a.lerp(b, t))).collect();
            for w in ids.windows(2) {
                if w[0] != w[1] {
                    edges.insert((w[0].min(w[1]), w[0].max(w[1])));
                }
            }
        }
        let points = pool.points().to_vec();
        let mut adj = vec![BTreeSet::new(); points.len()];
        for &(u, v) in &edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Graph { points, adj }
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    /// Strips dangling chains, failing on any longer than `max_len`.
    fn prune(&mut self, max_len: f64) -> Result<(), Point2> {
        loop {
            let Some(start) = (0..self.points.len()).find(|&v| self.adj[v].len() == 1) else {
                return Ok(());
            };
            let mut chain = Vec::new();
            let (mut prev, mut cur) = (start, *self.adj[start].iter().next().unwrap());
            let mut len = self.points[prev].dist(self.points[cur]);
            chain.push((prev, cur));
            while self.adj[cur].len() == 2 && cur != start {
                let next = *self.adj[cur].iter().find(|&&n| n != prev).unwrap();
                len += self.points[cur].dist(self.points[next]);
                chain.push((cur, next));
                prev = cur;
                cur = next;
            }
            if len > max_len {
                return Err(self.points[start]);
            }
            for (u, v) in chain {
                self.remove(u, v);
            }
        }
    }

    /// Every face boundary, traced with the face on the left.
    fn faces(&self) -> Vec<Vec<Point2>> {
        let angle = |u: usize, v: usize| {
            let d = self.points[v] - self.points[u];
            d.y.atan2(d.x)
        };
        let sorted: Vec<Vec<usize>> = (0..self.points.len())
            .map(|u| {
                let mut n: Vec<usize> = self.adj[u].iter().copied().collect();
                n.sort_by(|&a, &b| angle(u, a).total_cmp(&angle(u, b)));
                n
            })
            .collect();
        let mut used = BTreeSet::new();
        let mut faces = Vec::new();
        for u in 0..self.points.len() {
            for &v in &sorted[u] {
                if used.contains(&(u, v)) {
                    continue;
                }
                let mut ring = Vec::new();
                let (mut a, mut b) = (u, v);
                while used.insert((a, b)) {
                    ring.push(self.points[a]);
                    let around = &sorted[b];
                    let k = around.iter().position(|&x| x == a).unwrap();
                    let next = around[(k + around.len() - 1) % around.len()];
                    a = b;
                    b = next;
                }
                faces.push(ring);
            }
        }
        faces
    }
}

fn ring_inside(inner: &[Point2], outer: &[Point2]) -> bool {
    let n = inner.len();
    let probes = inner.iter().copied().chain((0..n).map(|i| inner[i].lerp(inner[(i + 1) % n], 0.5)));
    for p in probes {
        let m = outer.len();
        let clearance = (0..m).map(|j| dist_point_segment(p, outer[j], outer[(j + 1) % m])).fold(f64::INFINITY, f64::min);
        if clearance > 1e-9 {
            return ring_contains(outer, p);
        }
    }
    false
}

/// Groups CCW outlines into polygons by nesting depth: even depth is solid, odd is a hole.
fn nest(outlines: Vec<Vec<Point2>>) -> Vec<Polygon2D> {
    let n = outlines.len();
    let containers: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && ring_inside(&outlines[i], &outlines[j])).collect())
        .collect();
    let depth: Vec<usize> = containers.iter().map(|c| c.len()).collect();
    let mut holes: Vec<Vec<Vec<Point2>>> = vec![Vec::new(); n];
    for i in (0..n).filter(|&i| depth[i] % 2 == 1) {
        let parent = containers[i]
            .iter()
            .copied()
            .filter(|&j| depth[j] + 1 == depth[i])
            .min_by(|&a, &b| signed_area(&outlines[a]).total_cmp(&signed_area(&outlines[b])));
        if let Some(p) = parent {
            holes[p].push(outlines[i].clone());
        }
    }
    (0..n)
        .filter(|&i| depth[i] % 2 == 0)
        .map(|i| Polygon2D::new(outlines[i].clone(), std::mem::take(&mut holes[i])))
        .collect()
}

/// Closed silhouette regions of one drawing. Visible strokes are snapped, split at
/// crossings and T-junctions, pruned of short spurs, and each connected component
/// contributes its outer boundary.
pub fn loops_from_drawing(d: &TechnicalDrawing, snap: f64) -> Result<Vec<Polygon2D>, ReconstructError> {
    let segs = polylines(d);
    let mut g = Graph::build(&segs, snap);
    g.prune(MAX_SPUR_SNAPS * snap)
        .map_err(|at| ReconstructError::OpenLoop { view: d.view, x: at.x, y: at.y })?;
    let min_area = snap * snap;
    let outlines: Vec<Vec<Point2>> = g
        .faces()
        .into_iter()
        .filter(|f| signed_area(f) < -min_area)
        .map(|mut f| {
            f.reverse();
            f
        })
        .collect();
    if outlines.is_empty() {
        return Err(ReconstructError::NoLoops(d.view));
    }
    let mut polys = nest(outlines);
    polys.sort_by(|a, b| {
        let (ra, rb) = (a.bounds(), b.bounds());
        (ra.min.x, ra.min.y).partial_cmp(&(rb.min.x, rb.min.y)).unwrap()
    });
    Ok(polys)
}
