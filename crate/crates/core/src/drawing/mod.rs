//! Technical-drawing document model, SVG I/O, rasterization and multi-view sheets.

mod raster;
mod render;
mod sheet;
mod svg;

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::math::Point2;
use crate::planar::Rect2;
use crate::projection::{ProjectionError, StandardView, Visibility};

pub use raster::{load_raster, rasterize, rasterize_with, save_raster, DashPattern, Raster, DASH_OFF_PX, DASH_ON_PX};
pub use render::{render_drawing, render_drawing_with, RenderOptions};
pub use sheet::compose_sheet;
pub use svg::{emit_svg, parse_svg, parse_svg_str, to_svg_string, SVG_DASH, SVG_STROKE_WIDTH};

/// Default raster edge length in pixels.
pub const DEFAULT_RASTER_SIZE: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum DrawingError {
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("unsupported SVG feature: {0}")]
    UnsupportedSvgFeature(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("view {0} appears more than once")]
    DuplicateView(StandardView),
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The fixed model-space window mapped onto the full image for a view.
pub fn standard_window(view: StandardView) -> Rect2 {
    match view {
        StandardView::Isometric => Rect2::centered(1.8),
        _ => Rect2::centered(1.2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathSegment {
    Line { a: Point2, b: Point2 },
    /// Counter-clockwise from `start` to `end` (radians, `start < end ≤ start + 2π`).
    Arc { center: Point2, radius: f64, start: f64, end: f64 },
    Circle { center: Point2, radius: f64 },
}

impl PathSegment {
    /// Arc with `start` normalized into `[0, 2π)` and the sweep preserved.
    pub fn arc(center: Point2, radius: f64, start: f64, end: f64) -> PathSegment {
        let sweep = end - start;
        let mut s = start.rem_euclid(TAU);
        if TAU - s < 1e-12 {
            s = 0.0;
        }
        PathSegment::Arc { center, radius, start: s, end: s + sweep }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Line { a, b } => a.dist(b),
            PathSegment::Arc { radius, start, end, .. } => radius * (end - start),
            PathSegment::Circle { radius, .. } => radius * TAU,
        }
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        match *self {
            PathSegment::Line { a, b } => a.lerp(b, t),
            PathSegment::Arc { center, radius, start, end } => {
                let (s, c) = (start + (end - start) * t).sin_cos();
                center + Point2::new(c, s) * radius
            }
            PathSegment::Circle { center, radius } => {
                let (s, c) = (TAU * t).sin_cos();
                center + Point2::new(c, s) * radius
            }
        }
    }

    /// Polyline approximation with chords no longer than `max_chord`.
    pub fn flatten(&self, max_chord: f64) -> Vec<Point2> {
        match self {
            PathSegment::Line { a, b } => vec![*a, *b],
            _ => {
                let n = ((self.length() / max_chord.max(1e-12)).ceil() as usize).clamp(8, 100_000);
                (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
            }
        }
    }

    pub fn bounds(&self) -> Rect2 {
        match *self {
            PathSegment::Line { a, b } => Rect2::new(a, a).including(b),
            PathSegment::Circle { center, radius } => Rect2::new(center, center).inflate(radius),
            PathSegment::Arc { .. } => Rect2::from_points(&self.flatten(self.length() / 256.0)).unwrap(),
        }
    }

    /// Component-wise comparison within `tol`; arcs compare by angles as well.
    pub fn approx_eq(&self, other: &PathSegment, tol: f64) -> bool {
        let close = |a: Point2, b: Point2| a.dist(b) <= tol;
        match (*self, *other) {
            (PathSegment::Line { a, b }, PathSegment::Line { a: c, b: d }) => {
                (close(a, c) && close(b, d)) || (close(a, d) && close(b, c))
            }
            (PathSegment::Circle { center: c1, radius: r1 }, PathSegment::Circle { center: c2, radius: r2 }) => {
                close(c1, c2) && (r1 - r2).abs() <= tol
            }
            (
                PathSegment::Arc { center: c1, radius: r1, start: s1, end: e1 },
                PathSegment::Arc { center: c2, radius: r2, start: s2, end: e2 },
            ) => close(c1, c2) && (r1 - r2).abs() <= tol && (s1 - s2).abs() <= tol && (e1 - e2).abs() <= tol,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub segment: PathSegment,
    pub visibility: Visibility,
}

impl Stroke {
    pub fn visible(segment: PathSegment) -> Stroke {
        Stroke { segment, visibility: Visibility::Visible }
    }

    pub fn hidden(segment: PathSegment) -> Stroke {
        Stroke { segment, visibility: Visibility::Hidden }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnicalDrawing {
    pub view: StandardView,
    pub segments: Vec<Stroke>,
    pub window: Rect2,
}

impl TechnicalDrawing {
    pub fn new(view: StandardView) -> Self {
        TechnicalDrawing { view, segments: Vec::new(), window: standard_window(view) }
    }

    pub fn with_segments(view: StandardView, segments: Vec<Stroke>) -> Self {
        TechnicalDrawing { view, segments, window: standard_window(view) }
    }

    pub fn push(&mut self, s: Stroke) {
        self.segments.push(s);
    }

    pub fn visible(&self) -> impl Iterator<Item = &PathSegment> {
        self.segments.iter().filter(|s| s.visibility == Visibility::Visible).map(|s| &s.segment)
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Two drawings hold the same multiset of strokes within `tol`.
    pub fn same_segments(&self, other: &TechnicalDrawing, tol: f64) -> bool {
        if self.segments.len() != other.segments.len() {
            return false;
        }
        let mut used = vec![false; other.segments.len()];
        self.segments.iter().all(|s| {
            let hit = other.segments.iter().enumerate().position(|(i, o)| {
                !used[i] && o.visibility == s.visibility && o.segment.approx_eq(&s.segment, tol)
            });
            match hit {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_normalization_and_length() {
        let a = PathSegment::arc(Point2::new(0.0, 0.0), 2.0, -std::f64::consts::FRAC_PI_2, 0.0);
        match a {
            PathSegment::Arc { start, end, .. } => {
                assert!((start - 1.5 * std::f64::consts::PI).abs() < 1e-12);
                assert!((end - start - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
        assert!((a.length() - std::f64::consts::PI).abs() < 1e-12);
        assert!(a.point_at(1.0).dist(Point2::new(2.0, 0.0)) < 1e-12);
    }

    #[test]
    fn multiset_comparison_ignores_order() {
        let l1 = Stroke::visible(PathSegment::Line { a: Point2::new(0.0, 0.0), b: Point2::new(1.0, 0.0) });
        let l2 = Stroke::hidden(PathSegment::Line { a: Point2::new(0.0, 1.0), b: Point2::new(1.0, 1.0) });
        let a = TechnicalDrawing::with_segments(StandardView::Front, vec![l1, l2]);
        let b = TechnicalDrawing::with_segments(StandardView::Front, vec![l2, l1]);
        assert!(a.same_segments(&b, 1e-12));
        let c = TechnicalDrawing::with_segments(StandardView::Front, vec![l1, l1]);
        assert!(!a.same_segments(&c, 1e-12));
    }
}
