use std::collections::BTreeSet;

use super::{ProjectionError, ViewPose};
use crate::geometry::TriMesh;
use crate::math::Point2;
use crate::planar::{
    chain_loops, remove_collinear, ring_contains, segment_contacts, signed_area, BucketGrid, PointPool, Polygon2D,
    Rect2,
};

const POOL_TOL: f64 = 1e-9;
const AREA_EPS: f64 = 1e-14;

fn seg_rect(a: Point2, b: Point2) -> Rect2 {
    Rect2::new(a, a).including(b).inflate(POOL_TOL)
}

/// Boundary of the union of all projected triangles, as polygons with holes.
pub fn silhouette(mesh: &TriMesh, pose: &ViewPose) -> Result<Vec<Polygon2D>, ProjectionError> {
    let mut pool = PointPool::new(POOL_TOL);
    let ids: Vec<usize> = mesh.vertices().iter().map(|&v| pool.insert(pose.project(v))).collect();

    let mut tris: Vec<[usize; 3]> = Vec::new();
    for f in mesh.faces() {
        let mut t = [ids[f[0] as usize], ids[f[1] as usize], ids[f[2] as usize]];
        let area = signed_area(&[pool.get(t[0]), pool.get(t[1]), pool.get(t[2])]);
        if area.abs() <= AREA_EPS {
            continue;
        }
        if area < 0.0 {
            t.swap(1, 2);
        }
        tris.push(t);
    }
    if tris.is_empty() {
        return Err(ProjectionError::DegenerateProjection);
    }

    let edges: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let bounds = Rect2::from_points(pool.points()).unwrap().inflate(1e-6);
    let mut edge_grid = BucketGrid::for_items(bounds, edges.len());
    for (i, &(a, b)) in edges.iter().enumerate() {
        edge_grid.insert(i as u32, &seg_rect(pool.get(a), pool.get(b)));
    }

    // Split every edge at its contacts with other edges.
    let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); edges.len()];
    let mut cand = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        let (pa, pb) = (pool.get(a), pool.get(b));
        edge_grid.query(&seg_rect(pa, pb), &mut cand);
        for &j in &cand {
            let j = j as usize;
            if j <= i {
                continue;
            }
            let (c, d) = edges[j];
            let (pc, pd) = (pool.get(c), pool.get(d));
            for (t, u) in segment_contacts(pa, pb, pc, pd, POOL_TOL) {
                cuts[i].push(t);
                cuts[j].push(u);
            }
        }
    }
    let mut subs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        let (pa, pb) = (pool.get(a), pool.get(b));
        let c = &mut cuts[i];
        c.sort_by(f64::total_cmp);
        let mut chain = vec![a];
        for &t in c.iter() {
            let id = pool.insert(pa.lerp(pb, t));
            if *chain.last().unwrap() != id {
                chain.push(id);
            }
        }
        if *chain.last().unwrap() != b {
            chain.push(b);
        }
        for w in chain.windows(2) {
            if w[0] != w[1] {
                subs.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }

    let mut tri_grid = BucketGrid::for_items(bounds, tris.len());
    for (i, t) in tris.iter().enumerate() {
        let r = Rect2::from_points(&[pool.get(t[0]), pool.get(t[1]), pool.get(t[2])]).unwrap();
        tri_grid.insert(i as u32, &r.inflate(POOL_TOL));
    }

    let mut boundary = Vec::new();
    for &(a, b) in &subs {
        let (pa, pb) = (pool.get(a), pool.get(b));
        let m = pa.lerp(pb, 0.5);
        let dir = (pb - pa).normalized();
        tri_grid.query(&Rect2::new(m, m).inflate(POOL_TOL), &mut cand);
        let (mut left, mut right) = (false, false);
        for &ti in &cand {
            let t = tris[ti as usize];
            let corners = [pool.get(t[0]), pool.get(t[1]), pool.get(t[2])];
            match coverage(&corners, m, dir) {
                Cover::Both => {
                    left = true;
                    right = true;
                }
                Cover::Left => left = true,
                Cover::Right => right = true,
                Cover::None => {}
            }
            if left && right {
                break;
            }
        }
        if left != right {
            boundary.push(if left { (a, b) } else { (b, a) });
        }
    }

    let mut outers: Vec<Vec<Point2>> = Vec::new();
    let mut holes: Vec<Vec<Point2>> = Vec::new();
    for lp in chain_loops(pool.points(), &boundary) {
        let ring: Vec<Point2> = lp.iter().map(|&i| pool.get(i)).collect();
        let ring = remove_collinear(&ring, POOL_TOL);
        let area = signed_area(&ring);
        if area.abs() <= AREA_EPS || ring.len() < 3 {
            continue;
        }
        if area > 0.0 {
            outers.push(ring);
        } else {
            holes.push(ring);
        }
    }

    let mut assigned: Vec<Vec<Vec<Point2>>> = vec![Vec::new(); outers.len()];
    for h in holes {
        // A point just inside the hole, to the right of its first edge.
        let (p, q) = (h[0], h[1]);
        let probe = p.lerp(q, 0.5) + (q - p).normalized().perp() * -1e-7;
        let host = outers
            .iter()
            .enumerate()
            .filter(|(_, o)| ring_contains(o, probe))
            .min_by(|a, b| signed_area(a.1).total_cmp(&signed_area(b.1)))
            .map(|(i, _)| i);
        if let Some(i) = host {
            assigned[i].push(h);
        }
    }
    let mut polys: Vec<Polygon2D> = outers
        .into_iter()
        .zip(assigned)
        .map(|(o, hs)| Polygon2D::new(o, hs))
        .collect();
    polys.sort_by(|a, b| {
        let (ra, rb) = (a.bounds(), b.bounds());
        ra.min.x.total_cmp(&rb.min.x).then(ra.min.y.total_cmp(&rb.min.y))
    });
    Ok(polys)
}

enum Cover {
    None,
    Left,
    Right,
    Both,
}

/// Which sides of the direction `dir` through `m` the CCW triangle covers near `m`.
fn coverage(t: &[Point2; 3], m: Point2, dir: Point2) -> Cover {
    let mut on_edge = None;
    for k in 0..3 {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        let e = b - a;
        let len = e.norm();
        let w = e.cross(m - a) / len;
        if w < -POOL_TOL {
            return Cover::None;
        }
        if w <= POOL_TOL {
            if on_edge.is_some() {
                return Cover::None;
            }
            on_edge = Some(k);
        }
    }
    let Some(k) = on_edge else { return Cover::Both };
    let (a, b) = (t[k], t[(k + 1) % 3]);
    let e = (b - a) * (1.0 / (b - a).norm());
    if e.cross(dir).abs() > 1e-6 {
        // Transversal contact would have been split; treat as interior.
        return Cover::Both;
    }
    let third = t[(k + 2) % 3];
    if dir.cross(third - m) > 0.0 {
        Cover::Left
    } else {
        Cover::Right
    }
}
