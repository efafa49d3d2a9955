//! Planar geometry helpers shared by projection, vectorization and reconstruction.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::math::Point2;

/// Axis-aligned rectangle in a 2D frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect2 {
    pub min: Point2,
    pub max: Point2,
}

impl Rect2 {
    pub const fn new(min: Point2, max: Point2) -> Self {
        Rect2 { min, max }
    }

    /// Square `[-half, half]²`.
    pub const fn centered(half: f64) -> Self {
        Rect2 {
            min: Point2::new(-half, -half),
            max: Point2::new(half, half),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point2>) -> Option<Rect2> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(Rect2::new(first, first), |r, p| r.including(*p)))
    }

    pub fn including(self, p: Point2) -> Rect2 {
        Rect2 {
            min: Point2::new(self.min.x.min(p.x), self.min.y.min(p.y)),
            max: Point2::new(self.max.x.max(p.x), self.max.y.max(p.y)),
        }
    }

    pub fn union(self, o: Rect2) -> Rect2 {
        self.including(o.min).including(o.max)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= self.min.x - tol && p.x <= self.max.x + tol && p.y >= self.min.y - tol && p.y <= self.max.y + tol
    }

    pub fn inflate(self, d: f64) -> Rect2 {
        Rect2 {
            min: Point2::new(self.min.x - d, self.min.y - d),
            max: Point2::new(self.max.x + d, self.max.y + d),
        }
    }

    pub fn intersects(&self, o: &Rect2) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }
}

/// Shoelace area; positive for counter-clockwise rings.
pub fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += ring[i].cross(ring[(i + 1) % n]);
    }
    acc * 0.5
}

/// Crossing-number test for a single closed ring.
pub fn ring_contains(ring: &[Point2], p: Point2) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Polygon with holes. The outer ring is counter-clockwise, holes clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon2D {
    pub outer: Vec<Point2>,
    pub holes: Vec<Vec<Point2>>,
}

impl Polygon2D {
    /// Builds a polygon, reorienting rings to the outer-CCW / holes-CW convention.
    pub fn new(mut outer: Vec<Point2>, mut holes: Vec<Vec<Point2>>) -> Self {
        if signed_area(&outer) < 0.0 {
            outer.reverse();
        }
        for h in &mut holes {
            if signed_area(h) > 0.0 {
                h.reverse();
            }
        }
        Polygon2D { outer, holes }
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.outer) + self.holes.iter().map(|h| signed_area(h)).sum::<f64>()
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    /// Even-odd containment over all rings.
    pub fn contains(&self, p: Point2) -> bool {
        self.rings().filter(|r| ring_contains(r, p)).count() % 2 == 1
    }

    pub fn bounds(&self) -> Rect2 {
        Rect2::from_points(&self.outer).unwrap_or(Rect2::centered(0.0))
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Polygon2D {
        Polygon2D::new(
            self.outer.iter().map(|&p| f(p)).collect(),
            self.holes.iter().map(|h| h.iter().map(|&p| f(p)).collect()).collect(),
        )
    }

    /// Horizontal mirror `x → -x`, re-oriented.
    pub fn mirrored_x(&self) -> Polygon2D {
        self.map(|p| Point2::new(-p.x, p.y))
    }

    /// Regular `n`-gon approximation of a circle, vertices starting at angle 0.
    pub fn circle(center: Point2, radius: f64, n: usize) -> Polygon2D {
        let ring = (0..n)
            .map(|k| {
                let (s, c) = (std::f64::consts::TAU * k as f64 / n as f64).sin_cos();
                center + Point2::new(c, s) * radius
            })
            .collect();
        Polygon2D::new(ring, Vec::new())
    }

    pub fn rect(r: Rect2) -> Polygon2D {
        Polygon2D::new(
            vec![r.min, Point2::new(r.max.x, r.min.y), r.max, Point2::new(r.min.x, r.max.y)],
            Vec::new(),
        )
    }
}

/// Even-odd containment across a set of polygons.
pub fn polygons_contain(polys: &[Polygon2D], p: Point2) -> bool {
    polys
        .iter()
        .flat_map(|poly| poly.rings())
        .filter(|r| ring_contains(r, p))
        .count()
        % 2
        == 1
}

pub fn polygons_bounds(polys: &[Polygon2D]) -> Option<Rect2> {
    polys.iter().map(|p| p.bounds()).reduce(Rect2::union)
}

pub fn dist_point_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Contact parameters between segments `p→p2` and `q→q2` as `(t, u)` pairs, where the
/// contact point is `p + t(p2-p) = q + u(q2-q)`. Collinear overlaps yield the overlap ends.
pub fn segment_contacts(p: Point2, p2: Point2, q: Point2, q2: Point2, tol: f64) -> Vec<(f64, f64)> {
    let r = p2 - p;
    let s = q2 - q;
    let (lr, ls) = (r.norm(), s.norm());
    if lr == 0.0 || ls == 0.0 {
        return Vec::new();
    }
    let denom = r.cross(s);
    let qp = q - p;
    if denom.abs() > 1e-12 * lr * ls {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let (tt, tu) = (tol / lr, tol / ls);
        if t >= -tt && t <= 1.0 + tt && u >= -tu && u <= 1.0 + tu {
            // Near-parallel pairs can produce far-off parameters; verify the contact point.
            let (tc, uc) = (t.clamp(0.0, 1.0), u.clamp(0.0, 1.0));
            if (p + r * tc).dist(q + s * uc) <= 2.0 * tol {
                return vec![(tc, uc)];
            }
        }
        // A near-parallel pair may still touch at an endpoint.
        let mut out = Vec::new();
        for (pt, is_p, param) in [(q, false, 0.0), (q2, false, 1.0), (p, true, 0.0), (p2, true, 1.0)] {
            if is_p {
                if dist_point_segment(pt, q, q2) <= tol {
                    let u = ((pt - q).dot(s) / (ls * ls)).clamp(0.0, 1.0);
                    out.push((param, u));
                }
            } else if dist_point_segment(pt, p, p2) <= tol {
                let t = ((pt - p).dot(r) / (lr * lr)).clamp(0.0, 1.0);
                out.push((t, param));
            }
        }
        return out;
    }
    if qp.cross(r).abs() / lr > tol {
        return Vec::new();
    }
    let t0 = qp.dot(r) / (lr * lr);
    let t1 = (q2 - p).dot(r) / (lr * lr);
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(1.0);
    if lo > hi + tol / lr {
        return Vec::new();
    }
    let u_at = |t: f64| ((p + r * t - q).dot(s) / (ls * ls)).clamp(0.0, 1.0);
    let hi = hi.max(lo);
    vec![(lo, u_at(lo)), (hi, u_at(hi))]
}

/// Tolerance-based point welding in the plane; returns stable ids in insertion order.
#[derive(Debug, Clone)]
pub struct PointPool {
    tol: f64,
    points: Vec<Point2>,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl PointPool {
    pub fn new(tol: f64) -> Self {
        PointPool { tol, points: Vec::new(), cells: HashMap::new() }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.tol).floor() as i64, (p.y / self.tol).floor() as i64)
    }

    pub fn find(&self, p: Point2) -> Option<usize> {
        let (kx, ky) = self.key(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        let d = self.points[id].dist(p);
                        if d <= self.tol && best.map_or(true, |(bd, bid)| d < bd || (d == bd && id < bid)) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    pub fn insert(&mut self, p: Point2) -> usize {
        if let Some(id) = self.find(p) {
            return id;
        }
        let id = self.points.len();
        self.points.push(p);
        let k = self.key(p);
        self.cells.entry(k).or_default().push(id);
        id
    }

    pub fn get(&self, id: usize) -> Point2 {
        self.points[id]
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Uniform bucket grid over rectangles, for candidate lookups.
#[derive(Debug, Clone)]
pub struct BucketGrid {
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<u32>>,
}

impl BucketGrid {
    pub fn new(bounds: Rect2, cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let nx = ((bounds.width() / cell).ceil() as usize).clamp(1, 4096);
        let ny = ((bounds.height() / cell).ceil() as usize).clamp(1, 4096);
        BucketGrid {
            origin: bounds.min,
            cell,
            nx,
            ny,
            bins: vec![Vec::new(); nx * ny],
        }
    }

    /// Sizes cells so that `n` items spread over `bounds` give a few items per bucket.
    pub fn for_items(bounds: Rect2, n: usize) -> Self {
        let side = bounds.width().max(bounds.height()).max(1e-9);
        let per_axis = ((n as f64).sqrt().ceil()).clamp(1.0, 512.0);
        BucketGrid::new(bounds.inflate(side * 1e-6), side / per_axis)
    }

    fn range(&self, r: &Rect2) -> (usize, usize, usize, usize) {
        let cx = |x: f64| (((x - self.origin.x) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = |y: f64| (((y - self.origin.y) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        (cx(r.min.x), cx(r.max.x), cy(r.min.y), cy(r.max.y))
    }

    pub fn insert(&mut self, id: u32, r: &Rect2) {
        let (x0, x1, y0, y1) = self.range(r);
        for y in y0..=y1 {
            for x in x0..=x1 {
                self.bins[y * self.nx + x].push(id);
            }
        }
    }

    /// Candidate ids whose rectangles may intersect `r`, sorted and unique.
    pub fn query(&self, r: &Rect2, out: &mut Vec<u32>) {
        out.clear();
        let (x0, x1, y0, y1) = self.range(r);
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend_from_slice(&self.bins[y * self.nx + x]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Chains directed edges into closed loops. At vertices with several unused outgoing
/// edges the sharpest left turn is taken, which splits pinched boundaries into simple loops.
pub fn chain_loops(points: &[Point2], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (i, &(a, _)) in edges.iter().enumerate() {
        outgoing[a].push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut ring = vec![edges[start].0];
        let mut cur = start;
        loop {
            let (a, b) = edges[cur];
            let din = points[b] - points[a];
            let mut best: Option<(f64, usize)> = None;
            let closing = b == edges[start].0;
            for &cand in outgoing[b].iter() {
                if used[cand] && !(closing && cand == start) {
                    continue;
                }
                let dout = points[edges[cand].1] - points[b];
                let turn = din.cross(dout).atan2(din.dot(dout));
                if best.map_or(true, |(bt, _)| turn > bt) {
                    best = Some((turn, cand));
                }
            }
            match best {
                Some((_, next)) if next == start => break,
                Some((_, next)) => {
                    used[next] = true;
                    ring.push(b);
                    cur = next;
                }
                None => break,
            }
        }
        loops.push(ring);
    }
    loops
}

/// Drops vertices whose neighbours are collinear with them (within `tol` distance).
pub fn remove_collinear(ring: &[Point2], tol: f64) -> Vec<Point2> {
    let mut pts: Vec<Point2> = ring.to_vec();
    let mut changed = true;
    while changed && pts.len() > 3 {
        changed = false;
        let n = pts.len();
        let mut keep = Vec::with_capacity(n);
        for i in 0..n {
            let prev = if keep.is_empty() { pts[(i + n - 1) % n] } else { *keep.last().unwrap() };
            let next = pts[(i + 1) % n];
            let cur = pts[i];
            let d = next - prev;
            let off = if d.norm() > 0.0 { (cur - prev).cross(d).abs() / d.norm() } else { cur.dist(prev) };
            let between = (cur - prev).dot(next - cur) >= 0.0;
            if off <= tol && between && keep.len() + (n - i) > 3 {
                changed = true;
            } else {
                keep.push(cur);
            }
        }
        pts = keep;
    }
    pts
}

/// Andrew's monotone chain; returns the hull counter-clockwise without repeating the start.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 2]) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 2]) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Indices of the two points farthest apart (first occurrence wins ties).
pub fn farthest_pair(points: &[Point2]) -> (usize, usize) {
    if points.len() < 2 {
        return (0, 0);
    }
    let hull = convex_hull(points);
    let mut best = (0.0, hull[0], hull[hull.len().min(2) - 1]);
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            let d = hull[i].dist(hull[j]);
            if d > best.0 {
                best = (d, hull[i], hull[j]);
            }
        }
    }
    let find = |q: Point2| points.iter().position(|&p| p == q).unwrap_or(0);
    let (a, b) = (find(best.1), find(best.2));
    (a.min(b), a.max(b))
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
pub fn triangulate_polygon(ring: &[Point2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    let mut tris = Vec::new();
    let inside = |p: Point2, a: Point2, b: Point2, c: Point2| {
        (b - a).cross(p - a) >= 0.0 && (c - b).cross(p - b) >= 0.0 && (a - c).cross(p - c) >= 0.0
    };
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * ring.len() * ring.len() {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (ia, ib, ic) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (ring[ia], ring[ib], ring[ic]);
            if (b - a).cross(c - b) <= 0.0 {
                continue;
            }
            let blocked = idx
                .iter()
                .any(|&k| k != ia && k != ib && k != ic && inside(ring[k], a, b, c));
            if !blocked {
                tris.push([ia, ib, ic]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

/// Algebraic least-squares circle fit: minimizes the residual of `x² + y² + Dx + Ey + F`.
pub fn fit_circle_kasa(points: &[Point2]) -> Option<(Point2, f64)> {
    if points.len() < 3 {
        return None;
    }
    // Centre the data for conditioning.
    let n = points.len() as f64;
    let mean = points.iter().fold(Point2::new(0.0, 0.0), |acc, &p| acc + p) * (1.0 / n);
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &p in points {
        let q = p - mean;
        let row = [q.x, q.y, 1.0];
        let z = -(q.x * q.x + q.y * q.y);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
            b[i] += row[i] * z;
        }
    }
    let [d, e, f] = crate::math::solve3(a, b)?;
    let c = Point2::new(-d / 2.0, -e / 2.0);
    let r2 = c.x * c.x + c.y * c.y - f;
    if !(r2 > 0.0) {
        return None;
    }
    Some((c + mean, r2.sqrt()))
}

/// Largest angular gap, in radians, between consecutive point directions around `center`.
pub fn max_angular_gap(points: &[Point2], center: Point2) -> f64 {
    let mut angles: Vec<f64> = points.iter().map(|&p| (p.y - center.y).atan2(p.x - center.x)).collect();
    if angles.is_empty() {
        return std::f64::consts::TAU;
    }
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x0: f64, y0: f64, s: f64) -> Vec<Point2> {
        vec![
            Point2::new(x0, y0),
            Point2::new(x0 + s, y0),
            Point2::new(x0 + s, y0 + s),
            Point2::new(x0, y0 + s),
        ]
    }

    #[test]
    fn area_and_containment() {
        let outer = sq(0.0, 0.0, 4.0);
        let mut hole = sq(1.0, 1.0, 1.0);
        hole.reverse();
        let p = Polygon2D::new(outer, vec![hole]);
        assert!((p.area() - 15.0).abs() < 1e-12);
        assert!(p.contains(Point2::new(0.5, 0.5)));
        assert!(!p.contains(Point2::new(1.5, 1.5)));
        assert!(!p.contains(Point2::new(5.0, 0.5)));
    }

    #[test]
    fn contacts_cover_crossing_touching_and_overlap() {
        let o = Point2::new(0.0, 0.0);
        let c = segment_contacts(o, Point2::new(2.0, 0.0), Point2::new(1.0, -1.0), Point2::new(1.0, 1.0), 1e-9);
        assert_eq!(c.len(), 1);
        assert!((c[0].0 - 0.5).abs() < 1e-12 && (c[0].1 - 0.5).abs() < 1e-12);
        let t = segment_contacts(o, Point2::new(2.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), 1e-9);
        assert_eq!(t.len(), 1);
        let ov = segment_contacts(o, Point2::new(2.0, 0.0), Point2::new(1.0, 0.0), Point2::new(3.0, 0.0), 1e-9);
        assert_eq!(ov.len(), 2);
        assert!((ov[0].0 - 0.5).abs() < 1e-12 && (ov[1].0 - 1.0).abs() < 1e-12);
        assert!(segment_contacts(o, Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0), 1e-9).is_empty());
    }

    #[test]
    fn chaining_separates_pinched_squares() {
        let mut pool = PointPool::new(1e-9);
        let mut edges = Vec::new();
        for ring in [sq(0.0, 0.0, 1.0), sq(1.0, 1.0, 1.0)] {
            let ids: Vec<usize> = ring.iter().map(|&p| pool.insert(p)).collect();
            for i in 0..ids.len() {
                edges.push((ids[i], ids[(i + 1) % ids.len()]));
            }
        }
        let loops = chain_loops(pool.points(), &edges);
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.len() == 4));
    }

    #[test]
    fn collinear_removal_keeps_corners() {
        let ring = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(1.0, 2.0),
            Point2::new(0.0, 2.0),
            Point2::new(0.0, 1.0),
        ];
        let out = remove_collinear(&ring, 1e-12);
        assert_eq!(out.len(), 4);
        assert!((signed_area(&out) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hull_and_farthest_pair() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.2),
            Point2::new(3.0, 0.0),
            Point2::new(1.5, 1.0),
            Point2::new(1.0, 0.1),
        ];
        assert_eq!(convex_hull(&pts).len(), 3);
        assert_eq!(farthest_pair(&pts), (0, 2));
    }

    #[test]
    fn ear_clipping_l_shape() {
        let l = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        let tris = triangulate_polygon(&l);
        assert_eq!(tris.len(), 4);
        let area: f64 = tris
            .iter()
            .map(|t| signed_area(&[l[t[0]], l[t[1]], l[t[2]]]))
            .sum();
        assert!((area - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kasa_recovers_exact_circle() {
        let pts: Vec<Point2> = (0..20)
            .map(|k| {
                let (s, c) = (k as f64 * 0.3).sin_cos();
                Point2::new(3.0 + 2.0 * c, -1.0 + 2.0 * s)
            })
            .collect();
        let (c, r) = fit_circle_kasa(&pts).unwrap();
        assert!(c.dist(Point2::new(3.0, -1.0)) < 1e-9 && (r - 2.0).abs() < 1e-9);
        assert!(max_angular_gap(&pts, c) > 0.3);
        assert!(fit_circle_kasa(&pts[..2]).is_none());
    }

    #[test]
    fn bucket_grid_finds_overlapping_items() {
        let mut g = BucketGrid::new(Rect2::centered(1.0), 0.25);
        g.insert(0, &Rect2::new(Point2::new(-1.0, -1.0), Point2::new(-0.9, -0.9)));
        g.insert(1, &Rect2::new(Point2::new(0.1, 0.1), Point2::new(0.9, 0.2)));
        let mut out = Vec::new();
        g.query(&Rect2::new(Point2::new(0.5, 0.0), Point2::new(0.6, 0.3)), &mut out);
        assert_eq!(out, vec![1]);
    }
}
