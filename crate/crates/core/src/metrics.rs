//! Drawing Chamfer distance, voxel IoU, cross-view consistency and Table-style statistics.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drawing::{standard_window, TechnicalDrawing};
use crate::math::Point2;
use crate::planar::{polygons_bounds, Rect2};
use crate::projection::StandardView;
use crate::reconstruct::{SilhouetteSet, VoxelGrid};

/// Raster size at which drawing distances are measured.
pub const CHAMFER_SIZE: usize = 256;

pub const DEFAULT_CONSISTENCY_TOLERANCE: f64 = 0.01;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("drawing has no segments")]
    EmptyDrawing,
    #[error("cannot compare a {0} drawing with a {1} drawing")]
    ViewMismatch(StandardView, StandardView),
    #[error("voxel grids use different lattices")]
    GridMismatch,
    #[error("no drawing pairs given")]
    EmptyInput,
}

/// Points spaced one pixel apart along every segment, each segment contributing
/// `max(1, round(length))` samples at the centres of equal sub-intervals.
pub fn sample_drawing(d: &TechnicalDrawing, window: Rect2, size: usize) -> Vec<Point2> {
    let sx = size as f64 / window.width();
    let sy = size as f64 / window.height();
    let to_px = |p: Point2| Point2::new((p.x - window.min.x) * sx, (window.max.y - p.y) * sy);
    let mut out = Vec::new();
    for s in &d.segments {
        let seg = &s.segment;
        // Length in pixels, measured on a fine polyline so anisotropic windows stay exact.
        let fine = seg.flatten(seg.length() / 256.0 + 1e-12);
        let len: f64 = fine.windows(2).map(|w| to_px(w[0]).dist(to_px(w[1]))).sum();
        let n = (len.round() as usize).max(1);
        out.extend((0..n).map(|k| to_px(seg.point_at((k as f64 + 0.5) / n as f64))));
    }
    out
}

/// Uniform-grid nearest-neighbour index.
struct NearestGrid<'a> {
    points: &'a [Point2],
    cell: f64,
    origin: Point2,
    dims: (i64, i64),
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl<'a> NearestGrid<'a> {
    fn new(points: &'a [Point2]) -> Self {
        let b = Rect2::from_points(points).expect("non-empty point set");
        let cell = ((b.width() * b.height() / points.len() as f64).sqrt() * 2.0).max(1.0);
        let key = |p: Point2| (((p.x - b.min.x) / cell).floor() as i64, ((p.y - b.min.y) / cell).floor() as i64);
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, &p) in points.iter().enumerate() {
            cells.entry(key(p)).or_default().push(i as u32);
        }
        let dims = ((b.width() / cell).floor() as i64 + 1, (b.height() / cell).floor() as i64 + 1);
        NearestGrid { points, cell, origin: b.min, dims, cells }
    }

    fn nearest(&self, p: Point2) -> f64 {
        let kx = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let ky = ((p.y - self.origin.y) / self.cell).floor() as i64;
        let mut best = f64::INFINITY;
        // Rings beyond this reach contain no cells of the grid.
        let reach = kx.abs().max(ky.abs()).max((kx - self.dims.0).abs()).max((ky - self.dims.1).abs()) + 1;
        for r in 0..=reach {
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs() != r && dy.abs() != r {
                        continue;
                    }
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy)) {
                        for &i in ids {
                            best = best.min(self.points[i as usize].dist(p));
                        }
                    }
                }
            }
            // Anything in ring r + 1 is at least r cells away.
            if best <= r as f64 * self.cell {
                break;
            }
        }
        best
    }
}

fn mean_nearest(from: &[Point2], to: &[Point2]) -> f64 {
    let g = NearestGrid::new(to);
    from.iter().map(|&p| g.nearest(p)).sum::<f64>() / from.len() as f64
}

/// Symmetric mean nearest-sample distance in pixels at `size`×`size`.
pub fn chamfer_2d(a: &TechnicalDrawing, b: &TechnicalDrawing, size: usize) -> Result<f64, MetricsError> {
    if a.view != b.view {
        return Err(MetricsError::ViewMismatch(a.view, b.view));
    }
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptyDrawing);
    }
    let window = if a.window == b.window { a.window } else { standard_window(a.view) };
    let pa = sample_drawing(a, window, size);
    let pb = sample_drawing(b, window, size);
    Ok(0.5 * (mean_nearest(&pa, &pb) + mean_nearest(&pb, &pa)))
}

pub fn voxel_iou(a: &VoxelGrid, b: &VoxelGrid) -> Result<f64, MetricsError> {
    if !a.same_lattice(b) {
        return Err(MetricsError::GridMismatch);
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.occupancy().iter().zip(b.occupancy()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub relations: Vec<Relation>,
    pub tolerance: f64,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }
}

const RELATIVE_FLOOR: f64 = 1e-12;

fn relation(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Relation {
    let scale = lhs.abs().max(rhs.abs()).max(RELATIVE_FLOOR);
    // A hair of slack so a mismatch of exactly `tolerance` is not lost to rounding.
    let pass = (lhs - rhs).abs() <= tolerance * scale * (1.0 + 1e-12);
    Relation { name: name.to_string(), lhs, rhs, pass }
}

/// Compares the shared extents of the three views: X (front/top widths),
/// Z (front/side heights) and Y (top height against side width).
pub fn consistency_check(s: &SilhouetteSet, tolerance: f64) -> ConsistencyReport {
    let dims = |p| polygons_bounds(p).map_or((0.0, 0.0), |b: Rect2| (b.width(), b.height()));
    let (tw, th) = dims(&s.top);
    let (fw, fh) = dims(&s.front);
    let (sw, sh) = dims(&s.side);
    ConsistencyReport {
        relations: vec![
            relation("width(front) = width(top)", fw, tw, tolerance),
            relation("height(front) = height(side)", fh, sh, tolerance),
            relation("height(top) = width(side)", th, sw, tolerance),
        ],
        tolerance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamferRow {
    /// A view name, or `"Mean"` for the average of the view rows.
    pub view: String,
    pub count: usize,
    pub avg: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamferReport {
    pub views: Vec<ChamferRow>,
    pub mean: ChamferRow,
}

fn display_name(v: StandardView) -> &'static str {
    match v {
        StandardView::Top => "Top",
        StandardView::Front => "Front",
        StandardView::Side => "Side",
        StandardView::Isometric => "Isometric",
    }
}

fn row(view: &str, values: &[f64]) -> ChamferRow {
    let n = values.len() as f64;
    let avg = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / n;
    ChamferRow {
        view: view.to_string(),
        count: values.len(),
        avg,
        std: var.sqrt(),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

impl ChamferReport {
    /// Rows for each view present (Top, Front, Side, Isometric order) and a Mean row whose
    /// entries are the averages of the view rows' entries.
    pub fn from_distances(per_view: &[(StandardView, f64)]) -> Result<Self, MetricsError> {
        if per_view.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        let order = [StandardView::Top, StandardView::Front, StandardView::Side, StandardView::Isometric];
        let views: Vec<ChamferRow> = order
            .iter()
            .filter_map(|&v| {
                let vals: Vec<f64> = per_view.iter().filter(|(w, _)| *w == v).map(|(_, d)| *d).collect();
                (!vals.is_empty()).then(|| row(display_name(v), &vals))
            })
            .collect();
        let k = views.len() as f64;
        let avg_of = |f: fn(&ChamferRow) -> f64| views.iter().map(f).sum::<f64>() / k;
        let mean = ChamferRow {
            view: "Mean".into(),
            count: per_view.len(),
            avg: avg_of(|r| r.avg),
            std: avg_of(|r| r.std),
            max: avg_of(|r| r.max),
            min: avg_of(|r| r.min),
        };
        Ok(ChamferReport { views, mean })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Aligned text table with three decimals.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}{:>10}", "View", "Avg", "STD", "Max", "Min");
        for r in self.views.iter().chain(std::iter::once(&self.mean)) {
            let _ = writeln!(s, "{:<10}{:>10.3}{:>10.3}{:>10.3}{:>10.3}", r.view, r.avg, r.std, r.max, r.min);
        }
        s
    }
}

/// Chamfer statistics over (generated, ground truth) pairs at [`CHAMFER_SIZE`].
pub fn chamfer_stats(pairs: &[(TechnicalDrawing, TechnicalDrawing)]) -> Result<ChamferReport, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let distances: Vec<(StandardView, f64)> = pairs
        .par_iter()
        .map(|(g, t)| chamfer_2d(g, t, CHAMFER_SIZE).map(|d| (t.view, d)))
        .collect::<Result<_, _>>()?;
    ChamferReport::from_distances(&distances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{PathSegment, Stroke};
    use crate::planar::Polygon2D;
    use proptest::prelude::*;

    fn px_window() -> Rect2 {
        Rect2::new(Point2::new(0.0, -256.0), Point2::new(256.0, 0.0))
    }

    /// Drawing whose model units equal pixels at size 256 (y flipped).
    fn px_drawing(lines: &[(f64, f64, f64, f64)]) -> TechnicalDrawing {
        let mut d = TechnicalDrawing::with_segments(
            StandardView::Front,
            lines
                .iter()
                .map(|&(ax, ay, bx, by)| Stroke::visible(PathSegment::Line { a: Point2::new(ax, -ay), b: Point2::new(bx, -by) }))
                .collect(),
        );
        d.window = px_window();
        d
    }

    fn brute(a: &[Point2], b: &[Point2]) -> f64 {
        let one = |x: &[Point2], y: &[Point2]| {
            x.iter().map(|p| y.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min)).sum::<f64>() / x.len() as f64
        };
        0.5 * (one(a, b) + one(b, a))
    }

    #[test]
    fn point_like_segments() {
        let a = px_drawing(&[(0.0, 0.0, 1.0, 0.0)]);
        let b = px_drawing(&[(3.0, 4.0, 4.0, 4.0)]);
        assert!((chamfer_2d(&a, &b, 256).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(chamfer_2d(&a, &a, 256).unwrap(), 0.0);
        let empty = px_drawing(&[]);
        assert_eq!(chamfer_2d(&a, &empty, 256), Err(MetricsError::EmptyDrawing));
        let mut top = a.clone();
        top.view = StandardView::Top;
        assert!(matches!(chamfer_2d(&a, &top, 256), Err(MetricsError::ViewMismatch(..))));
    }

    #[test]
    fn sample_count_follows_length() {
        let d = px_drawing(&[(10.0, 10.0, 110.0, 10.0)]);
        let s = sample_drawing(&d, px_window(), 256);
        assert_eq!(s.len(), 100);
        assert!((s[0].x - 10.5).abs() < 1e-9 && (s[0].y - 10.0).abs() < 1e-9);
    }

    fn arb_lines() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
        prop::collection::vec((0.0..256.0, 0.0..256.0, 0.0..256.0, 0.0..256.0), 1..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_brute_force_and_is_symmetric(la in arb_lines(), lb in arb_lines()) {
            let (a, b) = (px_drawing(&la), px_drawing(&lb));
            let (sa, sb) = (sample_drawing(&a, px_window(), 256), sample_drawing(&b, px_window(), 256));
            prop_assume!(sa.len() + sb.len() <= 1000);
            let cd = chamfer_2d(&a, &b, 256).unwrap();
            prop_assert!((cd - brute(&sa, &sb)).abs() < 1e-6);
            prop_assert!((cd - chamfer_2d(&b, &a, 256).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn iou_cases() {
        let mut a = VoxelGrid::standard(8);
        let mut b = VoxelGrid::standard(8);
        assert_eq!(voxel_iou(&a, &b).unwrap(), 1.0);
        a.set(1, 1, 1, true);
        b.set(2, 2, 2, true);
        assert_eq!(voxel_iou(&a, &b).unwrap(), 0.0);
        b.set(1, 1, 1, true);
        assert_eq!(voxel_iou(&a, &b).unwrap(), 0.5);
        assert_eq!(voxel_iou(&a, &VoxelGrid::standard(9)), Err(MetricsError::GridMismatch));
    }

    fn rect_set(front_scale: f64) -> SilhouetteSet {
        let r = |w: f64, h: f64| vec![Polygon2D::rect(Rect2::new(Point2::new(-w / 2.0, -h / 2.0), Point2::new(w / 2.0, h / 2.0)))];
        SilhouetteSet { top: r(2.0, 1.0), front: r(2.0 * front_scale, 0.5), side: r(1.0, 0.5) }
    }

    #[test]
    fn consistency_relations() {
        assert!(consistency_check(&rect_set(1.0), 1e-6).pass());
        let bad = consistency_check(&rect_set(1.1), 0.01);
        assert!(!bad.relations[0].pass && bad.relations[1].pass && bad.relations[2].pass);
        // Exactly 1% relative to the larger extent.
        let s = rect_set(1.0 / 0.99);
        assert!(consistency_check(&s, 0.01).pass());
        assert!(!consistency_check(&s, 0.009).pass());
    }

    #[test]
    fn stats_rows_and_table() {
        let d = px_drawing(&[(0.0, 0.0, 1.0, 0.0)]);
        let e = px_drawing(&[(3.0, 4.0, 4.0, 4.0)]);
        let r = chamfer_stats(&[(d.clone(), e)]).unwrap();
        assert_eq!((r.mean.avg, r.mean.max, r.mean.min, r.mean.std), (5.0, 5.0, 5.0, 0.0));
        let same = chamfer_stats(&[(d.clone(), d.clone()), (d.clone(), d)]).unwrap();
        assert_eq!((same.mean.avg, same.mean.std), (0.0, 0.0));
        assert_eq!(chamfer_stats(&[]), Err(MetricsError::EmptyInput));

        let rep = ChamferReport::from_distances(&[
            (StandardView::Top, 1.0),
            (StandardView::Top, 3.0),
            (StandardView::Front, 2.0),
            (StandardView::Side, 4.0),
        ])
        .unwrap();
        assert_eq!(rep.views.iter().map(|r| r.view.as_str()).collect::<Vec<_>>(), ["Top", "Front", "Side"]);
        assert_eq!(rep.views[0].std, 1.0);
        assert!((rep.mean.avg - 8.0 / 3.0).abs() < 1e-12);
        let t = rep.to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("View") && lines[4].starts_with("Mean"));
        assert!(lines[1].contains("2.000") && lines[1].contains("1.000"));
        let back: ChamferReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }
}
