use std::collections::BTreeMap;

use super::{standard_window, DrawingError, PathSegment, Stroke, TechnicalDrawing};
use crate::geometry::TriMesh;
use crate::math::Point2;
use crate::planar::{fit_circle_kasa, max_angular_gap, PointPool, Rect2};
use crate::projection::{
    classify_edges_raw, merge_edges, silhouette, view_pose, EdgeKind, EdgeOptions, ProjectedEdge, StandardView,
    Visibility,
};

const CIRCLE_MIN_VERTICES: usize = 12;
const CIRCLE_MAX_GAP_DEG: f64 = 45.0;
const JOIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Emit hidden (dashed) lines.
    pub hidden: bool,
    pub feature_angle_deg: f64,
    /// Overrides the standard window for the view.
    pub window: Option<Rect2>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            hidden: true,
            feature_angle_deg: EdgeOptions::default().feature_angle_deg,
            window: None,
        }
    }
}

pub fn render_drawing(mesh: &TriMesh, view: StandardView) -> Result<TechnicalDrawing, DrawingError> {
    render_drawing_with(mesh, view, &RenderOptions::default())
}

pub fn render_drawing_with(
    mesh: &TriMesh,
    view: StandardView,
    opts: &RenderOptions,
) -> Result<TechnicalDrawing, DrawingError> {
    let pose = view_pose(view);
    let outline = silhouette(mesh, &pose)?;
    let mut edges: Vec<ProjectedEdge> = classify_edges_raw(mesh, &pose, &EdgeOptions { feature_angle_deg: opts.feature_angle_deg })
        .into_iter()
        .map(|p| ProjectedEdge {
            a: pose.project(p.a),
            b: pose.project(p.b),
            visibility: p.visibility,
            kind: p.kind,
        })
        .collect();
    for poly in &outline {
        for ring in poly.rings() {
            for i in 0..ring.len() {
                edges.push(ProjectedEdge {
                    a: ring[i],
                    b: ring[(i + 1) % ring.len()],
                    visibility: Visibility::Visible,
                    kind: EdgeKind::Silhouette,
                });
            }
        }
    }
    let mut merged = merge_edges(&edges);
    if !opts.hidden {
        merged.retain(|e| e.visibility == Visibility::Visible);
    }

    let window = opts.window.unwrap_or_else(|| standard_window(view));
    let mut strokes = Vec::new();
    for vis in [Visibility::Visible, Visibility::Hidden] {
        let lines: Vec<(Point2, Point2)> =
            merged.iter().filter(|e| e.visibility == vis).map(|e| (e.a, e.b)).collect();
        for seg in detect_circles(&lines) {
            strokes.extend(clip(seg, &window).into_iter().map(|segment| Stroke { segment, visibility: vis }));
        }
    }
    Ok(TechnicalDrawing { view, segments: strokes, window })
}

/// Replaces closed chains of short segments that fit a circle tightly with `Circle`s.
fn detect_circles(lines: &[(Point2, Point2)]) -> Vec<PathSegment> {
    let mut pool = PointPool::new(JOIN_TOL);
    let ends: Vec<(usize, usize)> = lines.iter().map(|&(a, b)| (pool.insert(a), pool.insert(b))).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pool.len()];
    for (i, &(a, b)) in ends.iter().enumerate() {
        adj[a].push(i);
        adj[b].push(i);
    }
    let mut consumed = vec![false; lines.len()];
    let mut out = Vec::new();
    let mut seen = vec![false; pool.len()];
    for start in 0..pool.len() {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        // Collect the connected component.
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for &e in &adj[v] {
                let (a, b) = ends[e];
                for w in [a, b] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
        }
        if comp.len() < CIRCLE_MIN_VERTICES || comp.iter().any(|&v| adj[v].len() != 2) {
            continue;
        }
        let pts: Vec<Point2> = comp.iter().map(|&v| pool.get(v)).collect();
        let Some((center, radius)) = fit_circle_kasa(&pts) else { continue };
        let residual = pts.iter().map(|p| (p.dist(center) - radius).abs()).fold(0.0, f64::max);
        if residual > 1e-6 * radius.max(1.0) || max_angular_gap(&pts, center) > CIRCLE_MAX_GAP_DEG.to_radians() {
            continue;
        }
        let mut edge_ids: Vec<usize> = comp.iter().flat_map(|&v| adj[v].iter().copied()).collect();
        edge_ids.sort_unstable();
        edge_ids.dedup();
        for e in edge_ids {
            consumed[e] = true;
        }
        out.push((comp.iter().copied().min().unwrap(), PathSegment::Circle { center, radius }));
    }
    let mut keyed: BTreeMap<usize, Vec<PathSegment>> = BTreeMap::new();
    for (i, &(a, b)) in lines.iter().enumerate() {
        if !consumed[i] {
            keyed.entry(ends[i].0.min(ends[i].1)).or_default().push(PathSegment::Line { a, b });
        }
    }
    for (k, c) in out {
        keyed.entry(k).or_default().push(c);
    }
    keyed.into_values().flatten().collect()
}

/// Liang–Barsky clip of `a→b` to `r`.
fn clip_line(a: Point2, b: Point2, r: &Rect2) -> Option<(Point2, Point2)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-d.x, a.x - r.min.x),
        (d.x, r.max.x - a.x),
        (-d.y, a.y - r.min.y),
        (d.y, r.max.y - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    let (p0, p1) = (a + d * t0, a + d * t1);
    (p0.dist(p1) > 0.0).then_some((p0, p1))
}

fn clip(seg: PathSegment, r: &Rect2) -> Vec<PathSegment> {
    let inside = {
        let b = seg.bounds();
        r.contains(b.min, 1e-12) && r.contains(b.max, 1e-12)
    };
    if inside {
        return vec![seg];
    }
    let pts = match seg {
        PathSegment::Line { a, b } => vec![a, b],
        _ => seg.flatten(seg.length() / 128.0),
    };
    pts.windows(2)
        .filter_map(|w| clip_line(w[0], w[1], r))
        .map(|(a, b)| PathSegment::Line { a, b })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalize_longest_edge;
    use crate::shapes::{cylinder_z, unit_cube};

    fn normalized(m: &TriMesh) -> TriMesh {
        normalize_longest_edge(m, 2.0).unwrap().0
    }

    #[test]
    fn cube_front_is_square() {
        let d = render_drawing(&normalized(&unit_cube()), StandardView::Front).unwrap();
        assert_eq!(d.segments.len(), 4);
        for s in &d.segments {
            assert_eq!(s.visibility, Visibility::Visible);
            assert!((s.segment.length() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cylinder_top_is_circle() {
        let d = render_drawing(&normalized(&cylinder_z(1.0, 2.0, 64)), StandardView::Top).unwrap();
        assert_eq!(d.segments.len(), 1, "{:?}", d.segments);
        match d.segments[0].segment {
            PathSegment::Circle { center, radius } => {
                assert!(center.norm() < 1e-9);
                assert!((radius - 1.0).abs() < 1e-9);
            }
            other => panic!("expected circle, got {other:?}"),
        }
    }

    #[test]
    fn cylinder_front_is_rectangle() {
        let d = render_drawing(&normalized(&cylinder_z(1.0, 2.0, 64)), StandardView::Front).unwrap();
        assert_eq!(d.segments.len(), 4, "{:?}", d.segments);
        let mut corners: Vec<Point2> = d
            .segments
            .iter()
            .flat_map(|s| match s.segment {
                PathSegment::Line { a, b } => [a, b],
                _ => panic!("line expected"),
            })
            .collect();
        corners.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        corners.dedup_by(|a, b| a.dist(*b) < 1e-9);
        assert_eq!(corners.len(), 4);
        for c in corners {
            assert!((c.x.abs() - 1.0).abs() < 1e-3 && (c.y.abs() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn hidden_toggle_and_window_clipping() {
        let m = normalized(&unit_cube());
        let all = render_drawing(&m, StandardView::Isometric).unwrap();
        assert!(all.segments.iter().any(|s| s.visibility == Visibility::Hidden));
        let vis_only = render_drawing_with(&m, StandardView::Isometric, &RenderOptions { hidden: false, ..Default::default() }).unwrap();
        assert!(vis_only.segments.iter().all(|s| s.visibility == Visibility::Visible));
        let small = Rect2::centered(0.5);
        let clipped = render_drawing_with(&m, StandardView::Front, &RenderOptions { window: Some(small), ..Default::default() }).unwrap();
        assert!(clipped.segments.is_empty());
        for s in &all.segments {
            let b = s.segment.bounds();
            assert!(all.window.contains(b.min, 1e-6) && all.window.contains(b.max, 1e-6));
        }
    }

    #[test]
    fn liang_barsky() {
        let r = Rect2::centered(1.0);
        let (a, b) = clip_line(Point2::new(-2.0, 0.0), Point2::new(2.0, 0.0), &r).unwrap();
        assert_eq!((a, b), (Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)));
        assert!(clip_line(Point2::new(-2.0, 2.0), Point2::new(2.0, 2.0), &r).is_none());
    }

    #[test]
    fn render_is_deterministic() {
        let m = normalized(&crate::shapes::box_with_through_hole(1.0, 1.2, 0.5, 32));
        for v in StandardView::ALL {
            assert_eq!(render_drawing(&m, v).unwrap(), render_drawing(&m, v).unwrap());
        }
    }
}
