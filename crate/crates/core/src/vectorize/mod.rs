//! Raster-to-vector conversion: binarization, contour tracing, simplification and fitting.

mod fit;
mod trace;

use serde::{Deserialize, Serialize};

use crate::drawing::{standard_window, PathSegment, Raster, Stroke, TechnicalDrawing};
use crate::math::Point2;
use crate::projection::StandardView;

pub use fit::{fit_circle, fit_primitives, simplify};
pub use trace::trace_contours;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VectorizeError {
    #[error("contour has fewer than two distinct points")]
    DegenerateFit,
}

/// Traced pixel boundary; points are pixel indices `(column, row)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<Point2>,
    pub closed: bool,
    /// Boundary of an enclosed background region rather than an ink region's outside.
    pub hole: bool,
}

/// Primitives fitted to one contour, in pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPath {
    pub segments: Vec<PathSegment>,
    /// Largest point-to-fit distance, pixels.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorizeOptions {
    pub threshold: u8,
    /// Bridge dash gaps with a 7×7 morphological closing before tracing.
    pub close_dashes: bool,
    pub epsilon: f64,
    pub circle_residual_max: f64,
}

impl Default for VectorizeOptions {
    fn default() -> Self {
        VectorizeOptions { threshold: 128, close_dashes: false, epsilon: 1.5, circle_residual_max: 1.0 }
    }
}

pub fn binarize(r: &Raster, threshold: u8) -> Raster {
    let px = r.pixels().iter().map(|&p| if p < threshold { 0 } else { 255 }).collect();
    Raster::from_pixels(r.width(), r.height(), px).expect("same dimensions")
}

/// Square min/max filter over ink; `grow` dilates ink, otherwise erodes it. Outside pixels
/// never add ink and never erode it.
fn morph(r: &Raster, k: usize, grow: bool) -> Raster {
    let (w, h) = (r.width(), r.height());
    let half = (k / 2) as i64;
    let ink: Vec<bool> = r.pixels().iter().map(|&p| p < 128).collect();
    let pass = |src: &[bool], horizontal: bool| -> Vec<bool> {
        let mut dst = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = !grow;
                for d in -half..=half {
                    let (nx, ny) = if horizontal { (x as i64 + d, y as i64) } else { (x as i64, y as i64 + d) };
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let v = src[ny as usize * w + nx as usize];
                    if grow {
                        acc |= v;
                    } else {
                        acc &= v;
                    }
                }
                dst[y * w + x] = acc;
            }
        }
        dst
    };
    let out = pass(&pass(&ink, true), false);
    Raster::from_pixels(w, h, out.into_iter().map(|i| if i { 0 } else { 255 }).collect()).expect("same dimensions")
}

/// Morphological closing of ink with a `k`×`k` square (dilate, then erode).
pub fn close_gaps(r: &Raster, k: usize) -> Raster {
    morph(&morph(r, k, true), k, false)
}

pub fn binarize_with(r: &Raster, threshold: u8, close_dashes: bool) -> Raster {
    let b = binarize(r, threshold);
    if close_dashes {
        close_gaps(&b, 7)
    } else {
        b
    }
}

const LINE_MERGE_PX: f64 = 1.0;
const LINE_MERGE_DEG: f64 = 2.0;
const CIRCLE_PAIR_PX: f64 = 1.5;

struct LineCluster {
    origin: Point2,
    dir: Point2,
    lo: f64,
    hi: f64,
}

impl LineCluster {
    fn absorbs(&self, a: Point2, b: Point2) -> Option<(f64, f64)> {
        let d = (b - a).normalized();
        if d.cross(self.dir).abs() > LINE_MERGE_DEG.to_radians().sin() {
            return None;
        }
        let off = |p: Point2| self.dir.cross(p - self.origin).abs();
        if off(a) > LINE_MERGE_PX || off(b) > LINE_MERGE_PX {
            return None;
        }
        let (sa, sb) = (self.dir.dot(a - self.origin), self.dir.dot(b - self.origin));
        let (lo, hi) = (sa.min(sb), sa.max(sb));
        (lo <= self.hi + LINE_MERGE_PX && hi >= self.lo - LINE_MERGE_PX).then_some((lo, hi))
    }
}

/// Collapses near-collinear overlapping segments (both sides of a 1-px stroke) into one.
fn merge_lines(mut lines: Vec<(Point2, Point2)>) -> Vec<(Point2, Point2)> {
    lines.sort_by(|x, y| y.0.dist(y.1).total_cmp(&x.0.dist(x.1)));
    loop {
        let mut clusters: Vec<LineCluster> = Vec::new();
        for &(a, b) in &lines {
            if let Some(c) = clusters.iter_mut().find_map(|c| c.absorbs(a, b).map(|iv| (c, iv))) {
                let (cl, (lo, hi)) = c;
                cl.lo = cl.lo.min(lo);
                cl.hi = cl.hi.max(hi);
            } else {
                let dir = (b - a).normalized();
                clusters.push(LineCluster { origin: a, dir, lo: 0.0, hi: a.dist(b) });
            }
        }
        let merged: Vec<(Point2, Point2)> = clusters
            .iter()
            .map(|c| (c.origin + c.dir * c.lo, c.origin + c.dir * c.hi))
            .collect();
        if merged.len() == lines.len() {
            return merged;
        }
        lines = merged;
    }
}

fn pair_circles(circles: &[(Point2, f64)]) -> Vec<(Point2, f64)> {
    let mut groups: Vec<(Point2, f64, usize)> = Vec::new();
    for &(c, r) in circles {
        let hit = groups.iter_mut().find(|(gc, gr, n)| {
            let (mc, mr) = (*gc * (1.0 / *n as f64), *gr / *n as f64);
            mc.dist(c) <= CIRCLE_PAIR_PX && (mr - r).abs() <= CIRCLE_PAIR_PX
        });
        match hit {
            Some(g) => {
                g.0 = g.0 + c;
                g.1 += r;
                g.2 += 1;
            }
            None => groups.push((c, r, 1)),
        }
    }
    groups.into_iter().map(|(c, r, n)| (c * (1.0 / n as f64), r / n as f64)).collect()
}

pub fn vectorize_drawing(r: &Raster, view: StandardView) -> TechnicalDrawing {
    vectorize_drawing_with(r, view, &VectorizeOptions::default())
}

/// Every recovered segment is marked visible.
pub fn vectorize_drawing_with(r: &Raster, view: StandardView, opts: &VectorizeOptions) -> TechnicalDrawing {
    let b = binarize_with(r, opts.threshold, opts.close_dashes);
    let mut circles = Vec::new();
    let mut lines = Vec::new();
    for c in trace_contours(&b) {
        if c.closed {
            if let Some((center, radius, _)) = fit_circle(&c.points, opts.circle_residual_max) {
                circles.push((center, radius));
                continue;
            }
        }
        let s = simplify(&c, opts.epsilon);
        match fit_primitives(&Contour { closed: s.closed && s.points.len() >= 3, ..s }, 0.0) {
            Ok(f) => lines.extend(f.segments.into_iter().filter_map(|seg| match seg {
                PathSegment::Line { a, b } => Some((a, b)),
                _ => None,
            })),
            // Isolated single pixels carry no path.
            Err(VectorizeError::DegenerateFit) => {}
        }
    }

    let window = standard_window(view);
    let (w, h) = (r.width() as f64, r.height() as f64);
    let to_model = |p: Point2| {
        Point2::new(
            window.min.x + (p.x + 0.5) / w * window.width(),
            window.max.y - (p.y + 0.5) / h * window.height(),
        )
    };
    let px_per_unit = w / window.width();
    let mut d = TechnicalDrawing::new(view);
    for (a, b) in merge_lines(lines) {
        let (a, b) = (to_model(a), to_model(b));
        if a != b {
            d.push(Stroke::visible(PathSegment::Line { a, b }));
        }
    }
    for (c, rad) in pair_circles(&circles) {
        d.push(Stroke::visible(PathSegment::Circle { center: to_model(c), radius: rad / px_per_unit }));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::rasterize;

    fn components(r: &Raster) -> usize {
        trace_contours(r).iter().filter(|c| !c.hole).count()
    }

    #[test]
    fn binarize_threshold() {
        let r = Raster::from_pixels(2, 1, vec![100, 200]).unwrap();
        assert_eq!(binarize(&r, 128).pixels(), &[0, 255]);
        let blank = Raster::new(8, 8);
        assert_eq!(binarize(&blank, 128), blank);
    }

    #[test]
    fn closing_bridges_dashes() {
        let mut d = TechnicalDrawing::new(StandardView::Front);
        d.push(Stroke::hidden(PathSegment::Line { a: Point2::new(-1.0, 0.3), b: Point2::new(1.0, 0.3) }));
        let r = rasterize(&d, 256);
        assert!(components(&binarize(&r, 128)) > 10);
        let closed = binarize_with(&r, 128, true);
        assert_eq!(components(&closed), 1);
    }

    #[test]
    fn blank_raster_gives_empty_drawing() {
        assert!(vectorize_drawing(&Raster::new(64, 64), StandardView::Top).is_empty());
    }

    #[test]
    fn rasterized_circle_becomes_one_circle() {
        let mut d = TechnicalDrawing::new(StandardView::Top);
        d.push(Stroke::visible(PathSegment::Circle { center: Point2::new(0.1, -0.2), radius: 0.6 }));
        let v = vectorize_drawing(&rasterize(&d, 512), StandardView::Top);
        assert_eq!(v.segments.len(), 1, "{:?}", v.segments);
        let PathSegment::Circle { center, radius } = v.segments[0].segment else { panic!("expected circle") };
        let px = 512.0 / 2.4;
        assert!(center.dist(Point2::new(0.1, -0.2)) * px < 1.0);
        assert!((radius - 0.6).abs() * px < 1.0);
    }

    #[test]
    fn square_outline_gives_four_lines() {
        let mut d = TechnicalDrawing::new(StandardView::Front);
        let c = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            d.push(Stroke::visible(PathSegment::Line { a: Point2::new(a.0, a.1), b: Point2::new(b.0, b.1) }));
        }
        let v = vectorize_drawing(&rasterize(&d, 512), StandardView::Front);
        assert_eq!(v.segments.len(), 4, "{:?}", v.segments);
    }
}
