use super::{Contour, FittedPath, VectorizeError};
use crate::drawing::PathSegment;
use crate::math::{solve3, Point2};
use crate::planar::{dist_point_segment, farthest_pair, fit_circle_kasa, max_angular_gap};

const CIRCLE_MAX_GAP_DEG: f64 = 60.0;
const CIRCLE_MIN_RADIUS_PX: f64 = 3.0;
const CIRCLE_MAX_RADIUS_PX: f64 = 1e5;

fn douglas_peucker(pts: &[Point2], eps: f64) -> Vec<Point2> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut keep = vec![false; pts.len()];
    keep[0] = true;
    keep[pts.len() - 1] = true;
    let mut stack = vec![(0, pts.len() - 1)];
    while let Some((i, j)) = stack.pop() {
        let mut best = (0.0, 0);
        for k in i + 1..j {
            let d = dist_point_segment(pts[k], pts[i], pts[j]);
            if d > best.0 {
                best = (d, k);
            }
        }
        if best.0 > eps {
            keep[best.1] = true;
            stack.push((i, best.1));
            stack.push((best.1, j));
        }
    }
    pts.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}

/// Douglas–Peucker. Closed contours are split at their two farthest-apart points and both
/// halves simplified, so those points always survive.
pub fn simplify(c: &Contour, epsilon: f64) -> Contour {
    if !c.closed || c.points.len() < 4 {
        return Contour { points: douglas_peucker(&c.points, epsilon), ..c.clone() };
    }
    let n = c.points.len();
    let (i, j) = farthest_pair(&c.points);
    let first: Vec<Point2> = c.points[i..=j].to_vec();
    let second: Vec<Point2> = c.points[j..].iter().chain(c.points[..=i].iter()).copied().collect();
    let mut a = douglas_peucker(&first, epsilon);
    let b = douglas_peucker(&second, epsilon);
    a.extend_from_slice(&b[1..b.len() - 1]);
    // Keep the original starting point first when it survived.
    if let Some(pos) = a.iter().position(|&p| p == c.points[0]) {
        a.rotate_left(pos);
    }
    debug_assert!(a.len() <= n);
    Contour { points: a, ..c.clone() }
}

/// One Gauss–Newton step on the geometric residual `|p - c| - r`.
fn refine(points: &[Point2], c: Point2, r: f64) -> (Point2, f64) {
    let mut jtj = [[0.0; 3]; 3];
    let mut jte = [0.0; 3];
    for &p in points {
        let d = p.dist(c);
        if d == 0.0 {
            continue;
        }
        let j = [-(p.x - c.x) / d, -(p.y - c.y) / d, -1.0];
        let e = d - r;
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] += j[a] * j[b];
            }
            jte[a] -= j[a] * e;
        }
    }
    match solve3(jtj, jte) {
        Some([dx, dy, dr]) if (r + dr) > 0.0 => (Point2::new(c.x + dx, c.y + dy), r + dr),
        _ => (c, r),
    }
}

/// Circle through the points if it fits tightly and covers the whole turn.
pub fn fit_circle(points: &[Point2], residual_max: f64) -> Option<(Point2, f64, f64)> {
    let (c0, r0) = fit_circle_kasa(points)?;
    let (c, r) = refine(points, c0, r0);
    if !(CIRCLE_MIN_RADIUS_PX..=CIRCLE_MAX_RADIUS_PX).contains(&r) {
        return None;
    }
    let residual = points.iter().map(|p| (p.dist(c) - r).abs()).fold(0.0, f64::max);
    if residual > residual_max || max_angular_gap(points, c) >= CIRCLE_MAX_GAP_DEG.to_radians() {
        return None;
    }
    Some((c, r, residual))
}

fn polyline(c: &Contour) -> FittedPath {
    let mut pts = c.points.clone();
    pts.dedup();
    if c.closed && pts.len() > 2 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut segments: Vec<PathSegment> = pts.windows(2).map(|w| PathSegment::Line { a: w[0], b: w[1] }).collect();
    if c.closed && pts.len() > 2 {
        segments.push(PathSegment::Line { a: pts[pts.len() - 1], b: pts[0] });
    }
    FittedPath { segments, residual: 0.0 }
}

/// A single circle when the whole contour fits one within `circle_residual_max` pixels,
/// otherwise the contour polyline as lines.
pub fn fit_primitives(c: &Contour, circle_residual_max: f64) -> Result<FittedPath, VectorizeError> {
    let mut distinct = c.points.clone();
    distinct.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(VectorizeError::DegenerateFit);
    }
    if c.closed && distinct.len() >= 3 {
        if let Some((center, radius, residual)) = fit_circle(&c.points, circle_residual_max) {
            return Ok(FittedPath { segments: vec![PathSegment::Circle { center, radius }], residual });
        }
    }
    Ok(polyline(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn closed(points: Vec<Point2>) -> Contour {
        Contour { points, closed: true, hole: false }
    }

    fn open(points: Vec<Point2>) -> Contour {
        Contour { points, closed: false, hole: false }
    }

    fn circle_pts(c: Point2, r: f64, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|k| {
                let (s, co) = (std::f64::consts::TAU * k as f64 / n as f64).sin_cos();
                c + Point2::new(co, s) * r
            })
            .collect()
    }

    #[test]
    fn collinear_reduces_to_endpoints() {
        let c = open(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)]);
        assert_eq!(simplify(&c, 0.5).points, vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)]);
    }

    #[test]
    fn square_corners_survive() {
        let sq = vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 10.0), Point2::new(0.0, 10.0)];
        let s = simplify(&closed(sq.clone()), 0.5);
        assert_eq!(s.points.len(), 4);
        for p in sq {
            assert!(s.points.contains(&p));
        }
    }

    #[test]
    fn staircase_diagonal() {
        let mut pts = vec![Point2::new(0.0, 0.0)];
        for k in 0..71 {
            pts.push(Point2::new(k as f64 + 1.0, k as f64));
            pts.push(Point2::new(k as f64 + 1.0, k as f64 + 1.0));
        }
        assert!(pts[0].dist(*pts.last().unwrap()) >= 100.0);
        assert!(simplify(&open(pts), 1.5).points.len() <= 4);
    }

    #[test]
    fn exact_circle_fit() {
        let pts = circle_pts(Point2::new(300.0, 200.0), 80.0, 64);
        let f = fit_primitives(&closed(pts), 1.0).unwrap();
        assert_eq!(f.segments.len(), 1);
        match f.segments[0] {
            PathSegment::Circle { center, radius } => {
                assert!(center.dist(Point2::new(300.0, 200.0)) < 1e-9);
                assert!((radius - 80.0).abs() < 1e-9);
            }
            ref s => panic!("{s:?}"),
        }
        assert!(f.residual < 1e-9);
    }

    #[test]
    fn noisy_circle_fit_against_reference_least_squares() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let truth = (Point2::new(300.0, 200.0), 80.0);
        let pts: Vec<Point2> = circle_pts(truth.0, truth.1, 64)
            .into_iter()
            .map(|p| p + Point2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        let f = fit_primitives(&closed(pts.clone()), 1.0).unwrap();
        let PathSegment::Circle { center, radius } = f.segments[0] else { panic!("expected circle") };
        assert!(center.dist(truth.0) < 0.5 && (radius - truth.1).abs() < 0.5);
        // Reference geometric fit: many Gauss–Newton iterations from the truth.
        let (mut c, mut r) = truth;
        for _ in 0..50 {
            (c, r) = refine(&pts, c, r);
        }
        assert!(center.dist(c) < 0.05 && (radius - r).abs() < 0.05);
    }

    #[test]
    fn square_falls_through_to_lines() {
        let sq = vec![Point2::new(0.0, 0.0), Point2::new(40.0, 0.0), Point2::new(40.0, 40.0), Point2::new(0.0, 40.0)];
        let f = fit_primitives(&closed(sq), 1.0).unwrap();
        assert_eq!(f.segments.len(), 4);
        assert!(f.segments.iter().all(|s| matches!(s, PathSegment::Line { .. })));
        assert!(matches!(
            fit_primitives(&open(vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)]), 1.0),
            Err(VectorizeError::DegenerateFit)
        ));
    }

    proptest! {
        #[test]
        fn simplify_bounds(seed in any::<u64>(), n in 3usize..120, eps in 0.3f64..4.0, is_closed in any::<bool>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut p = Point2::new(0.0, 0.0);
            let mut pts = Vec::new();
            for _ in 0..n {
                p = p + Point2::new(rng.gen_range(-1i32..=1) as f64, rng.gen_range(-1i32..=1) as f64);
                pts.push(p);
            }
            let c = Contour { points: pts.clone(), closed: is_closed, hole: false };
            let s = simplify(&c, eps);
            prop_assert!(s.points.len() <= pts.len());
            let m = s.points.len();
            for q in &pts {
                let mut d = f64::INFINITY;
                if m == 1 {
                    d = q.dist(s.points[0]);
                }
                for k in 0..m.saturating_sub(1) {
                    d = d.min(dist_point_segment(*q, s.points[k], s.points[k + 1]));
                }
                if is_closed && m > 1 {
                    d = d.min(dist_point_segment(*q, s.points[m - 1], s.points[0]));
                }
                prop_assert!(d <= eps + 1e-9, "point {:?} at {}", q, d);
            }
        }

        #[test]
        fn exact_samples_give_exact_radius(cx in -500.0f64..500.0, cy in -500.0f64..500.0, r in 5.0f64..400.0, n in 8usize..200) {
            let f = fit_primitives(&closed(circle_pts(Point2::new(cx, cy), r, n)), 1.0).unwrap();
            let PathSegment::Circle { radius, .. } = f.segments[0] else { panic!("expected circle") };
            prop_assert!((radius - r).abs() < 1e-9);
        }
    }
}
