use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use super::{standard_window, DrawingError, PathSegment, Stroke, TechnicalDrawing, DEFAULT_RASTER_SIZE};
use crate::math::Point2;
use crate::planar::Rect2;
use crate::projection::{StandardView, Visibility};

/// One pixel at the default raster size for the standard orthographic window.
pub const SVG_STROKE_WIDTH: f64 = 2.4 / DEFAULT_RASTER_SIZE as f64;
/// Hidden-line dash pattern (6 on, 3 off) in pixel-equivalent user units.
pub const SVG_DASH: [f64; 2] = [6.0 * SVG_STROKE_WIDTH, 3.0 * SVG_STROKE_WIDTH];

pub fn to_svg_string(d: &TechnicalDrawing) -> String {
    let w = d.window;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{px}" height="{px}" viewBox="{} {} {} {}" data-view="{}">"#,
        w.min.x,
        -w.max.y,
        w.width(),
        w.height(),
        d.view,
        px = DEFAULT_RASTER_SIZE
    );
    for stroke in &d.segments {
        let style = match stroke.visibility {
            Visibility::Visible => format!(r#"fill="none" stroke="black" stroke-width="{SVG_STROKE_WIDTH}""#),
            Visibility::Hidden => format!(
                r#"fill="none" stroke="black" stroke-width="{SVG_STROKE_WIDTH}" stroke-dasharray="{} {}""#,
                SVG_DASH[0], SVG_DASH[1]
            ),
        };
        match stroke.segment {
            PathSegment::Line { a, b } => {
                let _ = writeln!(s, r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#, a.x, -a.y, b.x, -b.y);
            }
            PathSegment::Arc { center, radius, start, end } if end - start >= TAU - 1e-12 => {
                let _ = writeln!(s, r#"  <circle cx="{}" cy="{}" r="{}" {style}/>"#, center.x, -center.y, radius);
            }
            PathSegment::Circle { center, radius } => {
                let _ = writeln!(s, r#"  <circle cx="{}" cy="{}" r="{}" {style}/>"#, center.x, -center.y, radius);
            }
            PathSegment::Arc { center, radius, start, end } => {
                let p0 = stroke.segment.point_at(0.0);
                let p1 = stroke.segment.point_at(1.0);
                let large = (end - start) > PI;
                let _ = writeln!(
                    s,
                    r#"  <path d="M {} {} A {r} {r} 0 {} 0 {} {}" data-center="{} {}" {style}/>"#,
                    p0.x,
                    -p0.y,
                    large as u8,
                    p1.x,
                    -p1.y,
                    center.x,
                    -center.y,
                    r = radius
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(d: &TechnicalDrawing, path: &Path) -> Result<(), DrawingError> {
    std::fs::write(path, to_svg_string(d))?;
    Ok(())
}

pub fn parse_svg(path: &Path) -> Result<TechnicalDrawing, DrawingError> {
    let text = std::fs::read_to_string(path)?;
    parse_svg_str(&text)
}

fn num(node: &roxmltree::Node, name: &str) -> Result<f64, DrawingError> {
    let raw = node
        .attribute(name)
        .ok_or_else(|| DrawingError::Parse(format!("<{}> missing `{name}`", node.tag_name().name())))?;
    parse_number(raw)
}

fn parse_number(raw: &str) -> Result<f64, DrawingError> {
    let v: f64 = raw.trim().parse().map_err(|_| DrawingError::Parse(format!("bad number `{raw}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DrawingError::Parse(format!("non-finite number `{raw}`")))
    }
}

fn visibility(node: &roxmltree::Node) -> Visibility {
    let dashed = |v: &str| {
        let v = v.trim();
        !v.is_empty() && v != "none"
    };
    let from_style = node.attribute("style").and_then(|st| {
        st.split(';').find_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            (k.trim() == "stroke-dasharray").then(|| dashed(v))
        })
    });
    let hidden = from_style.unwrap_or(false) || node.attribute("stroke-dasharray").is_some_and(dashed);
    if hidden {
        Visibility::Hidden
    } else {
        Visibility::Visible
    }
}

/// Parses the emitted SVG subset. Image y is flipped back to model y.
pub fn parse_svg_str(text: &str) -> Result<TechnicalDrawing, DrawingError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| DrawingError::Parse(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(DrawingError::Parse("root element is not <svg>".into()));
    }
    let view = match root.attribute("data-view") {
        Some(v) => v.parse::<StandardView>().map_err(DrawingError::Parse)?,
        None => StandardView::Front,
    };
    let window = match root.attribute("viewBox") {
        Some(vb) => {
            let v: Vec<f64> = vb
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(parse_number)
                .collect::<Result<_, _>>()?;
            if v.len() != 4 || v[2] <= 0.0 || v[3] <= 0.0 {
                return Err(DrawingError::Parse(format!("bad viewBox `{vb}`")));
            }
            Rect2::new(Point2::new(v[0], -(v[1] + v[3])), Point2::new(v[0] + v[2], -v[1]))
        }
        None => standard_window(view),
    };

    let mut segments = Vec::new();
    for node in root.descendants().filter(|n| n.is_element()) {
        if node.attribute("transform").is_some() {
            return Err(DrawingError::UnsupportedSvgFeature(format!(
                "transform on <{}>",
                node.tag_name().name()
            )));
        }
        let vis = visibility(&node);
        let flip = |x: f64, y: f64| Point2::new(x, -y);
        match node.tag_name().name() {
            "svg" | "g" | "title" | "desc" | "metadata" => {}
            "line" => {
                let a = flip(num(&node, "x1")?, num(&node, "y1")?);
                let b = flip(num(&node, "x2")?, num(&node, "y2")?);
                if a != b {
                    segments.push(Stroke { segment: PathSegment::Line { a, b }, visibility: vis });
                }
            }
            "circle" => {
                let center = flip(num(&node, "cx")?, num(&node, "cy")?);
                let radius = num(&node, "r")?;
                if radius <= 0.0 {
                    return Err(DrawingError::Parse("circle radius must be positive".into()));
                }
                segments.push(Stroke { segment: PathSegment::Circle { center, radius }, visibility: vis });
            }
            "path" => {
                let d = node.attribute("d").ok_or_else(|| DrawingError::Parse("<path> missing `d`".into()))?;
                let hint = node.attribute("data-center").and_then(|c| {
                    let v: Vec<f64> = c.split_whitespace().filter_map(|t| t.parse().ok()).collect();
                    (v.len() == 2).then(|| flip(v[0], v[1]))
                });
                for segment in parse_path_data(d, hint)? {
                    segments.push(Stroke { segment, visibility: vis });
                }
            }
            other => return Err(DrawingError::UnsupportedSvgFeature(format!("element <{other}>"))),
        }
    }
    Ok(TechnicalDrawing { view, segments, window })
}

struct Tokens<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Tokens<'a> {
    fn skip_sep(&mut self) {
        while self.i < self.s.len() && (self.s[self.i].is_ascii_whitespace() || self.s[self.i] == b',') {
            self.i += 1;
        }
    }

    fn peek_command(&mut self) -> Option<u8> {
        self.skip_sep();
        self.s.get(self.i).copied().filter(|c| c.is_ascii_alphabetic() && *c != b'e' && *c != b'E')
    }

    fn at_number(&mut self) -> bool {
        self.skip_sep();
        self.s
            .get(self.i)
            .is_some_and(|c| c.is_ascii_digit() || *c == b'-' || *c == b'+' || *c == b'.')
    }

    fn number(&mut self) -> Result<f64, DrawingError> {
        self.skip_sep();
        let start = self.i;
        let mut seen_dot = false;
        let mut seen_exp = false;
        while self.i < self.s.len() {
            let c = self.s[self.i];
            let ok = match c {
                b'0'..=b'9' => true,
                b'+' | b'-' => self.i == start || matches!(self.s[self.i - 1], b'e' | b'E'),
                b'.' if !seen_dot && !seen_exp => {
                    seen_dot = true;
                    true
                }
                b'e' | b'E' if !seen_exp && self.i > start => {
                    seen_exp = true;
                    true
                }
                _ => false,
            };
            if !ok {
                break;
            }
            self.i += 1;
        }
        let tok = std::str::from_utf8(&self.s[start..self.i]).unwrap_or("");
        if tok.is_empty() {
            return Err(DrawingError::Parse(format!("expected number at offset {start} in path data")));
        }
        parse_number(tok)
    }

    fn flag(&mut self) -> Result<bool, DrawingError> {
        self.skip_sep();
        match self.s.get(self.i) {
            Some(b'0') => {
                self.i += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.i += 1;
                Ok(true)
            }
            _ => Err(DrawingError::Parse(format!("expected arc flag at offset {}", self.i))),
        }
    }
}

/// Path data with M/L/H/V/A/Z (absolute and relative) in SVG coordinates.
fn parse_path_data(d: &str, center_hint: Option<Point2>) -> Result<Vec<PathSegment>, DrawingError> {
    let mut t = Tokens { s: d.as_bytes(), i: 0 };
    let mut out = Vec::new();
    let mut cur = Point2::new(0.0, 0.0);
    let mut sub_start = cur;
    let mut cmd: Option<u8> = None;
    let line = |out: &mut Vec<PathSegment>, a: Point2, b: Point2| {
        if a != b {
            out.push(PathSegment::Line { a: Point2::new(a.x, -a.y), b: Point2::new(b.x, -b.y) });
        }
    };
    loop {
        if let Some(c) = t.peek_command() {
            t.i += 1;
            cmd = Some(c);
        } else if t.i >= t.s.len() {
            break;
        } else if !t.at_number() || cmd.is_none() {
            return Err(DrawingError::Parse(format!("unexpected character at offset {} in path data", t.i)));
        }
        let c = cmd.unwrap();
        let rel = c.is_ascii_lowercase();
        let base = if rel { cur } else { Point2::new(0.0, 0.0) };
        match c.to_ascii_uppercase() {
            b'M' => {
                cur = base + Point2::new(t.number()?, t.number()?);
                sub_start = cur;
                // Subsequent pairs are implicit line-tos.
                cmd = Some(if rel { b'l' } else { b'L' });
            }
            b'L' => {
                let p = base + Point2::new(t.number()?, t.number()?);
                line(&mut out, cur, p);
                cur = p;
            }
            b'H' => {
                let x = t.number()? + if rel { cur.x } else { 0.0 };
                let p = Point2::new(x, cur.y);
                line(&mut out, cur, p);
                cur = p;
            }
            b'V' => {
                let y = t.number()? + if rel { cur.y } else { 0.0 };
                let p = Point2::new(cur.x, y);
                line(&mut out, cur, p);
                cur = p;
            }
            b'Z' => {
                line(&mut out, cur, sub_start);
                cur = sub_start;
                cmd = None;
            }
            b'A' => {
                let rx = t.number()?;
                let ry = t.number()?;
                let _rot = t.number()?;
                let large = t.flag()?;
                let sweep = t.flag()?;
                let p = base + Point2::new(t.number()?, t.number()?);
                if (rx - ry).abs() > 1e-9 * rx.abs().max(1.0) {
                    return Err(DrawingError::UnsupportedSvgFeature("elliptical arc".into()));
                }
                if let Some(seg) = arc_from_endpoints(cur, p, rx.abs(), large, sweep, center_hint) {
                    out.push(seg);
                } else {
                    line(&mut out, cur, p);
                }
                cur = p;
            }
            b'C' | b'S' | b'Q' | b'T' => {
                return Err(DrawingError::UnsupportedSvgFeature(format!("bezier path command `{}`", c as char)))
            }
            other => return Err(DrawingError::UnsupportedSvgFeature(format!("path command `{}`", other as char))),
        }
    }
    Ok(out)
}

/// Endpoint-to-centre arc conversion (circular arcs only), returned in model coordinates.
fn arc_from_endpoints(
    p0: Point2,
    p1: Point2,
    r: f64,
    large: bool,
    sweep: bool,
    hint: Option<Point2>,
) -> Option<PathSegment> {
    if p0 == p1 || r == 0.0 {
        return None;
    }
    // Work in model coordinates (y up): an SVG sweep of 0 is counter-clockwise there.
    let (a, b) = (Point2::new(p0.x, -p0.y), Point2::new(p1.x, -p1.y));
    let (from, to) = if sweep { (b, a) } else { (a, b) };
    let half = from.dist(to) / 2.0;
    let r = r.max(half);
    let h = (r * r - half * half).max(0.0).sqrt();
    let mid = from.lerp(to, 0.5);
    let n = (to - from).normalized().perp();
    // Centre to the left of from→to gives a minor CCW arc.
    let candidates = [mid + n * h, mid - n * h];
    let center = match hint {
        Some(c) if h > 0.0 => *candidates.iter().min_by(|x, y| x.dist(c).total_cmp(&y.dist(c))).unwrap(),
        _ => {
            if large {
                candidates[1]
            } else {
                candidates[0]
            }
        }
    };
    let ang = |p: Point2| (p.y - center.y).atan2(p.x - center.x);
    let start = ang(from);
    let mut extent = (ang(to) - start).rem_euclid(TAU);
    if extent == 0.0 {
        extent = TAU;
    }
    Some(PathSegment::arc(center, r, start, start + extent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (f64, f64), b: (f64, f64)) -> PathSegment {
        PathSegment::Line { a: Point2::new(a.0, a.1), b: Point2::new(b.0, b.1) }
    }

    #[test]
    fn empty_drawing_round_trip() {
        let d = TechnicalDrawing::new(StandardView::Top);
        let s = to_svg_string(&d);
        assert!(!s.contains("<line") && !s.contains("<path") && !s.contains("<circle"));
        assert_eq!(parse_svg_str(&s).unwrap(), d);
    }

    #[test]
    fn line_endpoints_flip_y() {
        let mut d = TechnicalDrawing::new(StandardView::Front);
        d.push(Stroke::visible(seg((0.0, 0.0), (1.0, 1.0))));
        let s = to_svg_string(&d);
        assert!(s.contains(r#"x1="0" y1="-0" x2="1" y2="-1""#), "{s}");
        let back = parse_svg_str(&s).unwrap();
        assert!(back.same_segments(&d, 1e-12));
    }

    #[test]
    fn mixed_round_trip_with_hidden_and_arcs() {
        let mut d = TechnicalDrawing::new(StandardView::Isometric);
        d.push(Stroke::hidden(seg((0.1, -0.3), (0.7, 0.25))));
        d.push(Stroke::visible(PathSegment::Circle { center: Point2::new(0.2, 0.3), radius: 0.4 }));
        d.push(Stroke::visible(PathSegment::arc(Point2::new(-0.2, 0.1), 0.5, 0.3, 1.2)));
        d.push(Stroke::hidden(PathSegment::arc(Point2::new(0.3, -0.1), 0.25, 2.0, 2.0 + 4.5)));
        let back = parse_svg_str(&to_svg_string(&d)).unwrap();
        assert_eq!(back.view, StandardView::Isometric);
        assert_eq!(back.window, d.window);
        assert!(back.same_segments(&d, 1e-9), "{:?}", back.segments);
    }

    #[test]
    fn hand_written_subset() {
        let s = r#"<svg xmlns="http://www.w3.org/2000/svg"><circle cx="0" cy="0" r="1"/></svg>"#;
        let d = parse_svg_str(s).unwrap();
        assert_eq!(d.view, StandardView::Front);
        assert_eq!(d.segments.len(), 1);
        assert!(matches!(d.segments[0].segment, PathSegment::Circle { radius, .. } if radius == 1.0));

        let p = r#"<svg viewBox="-1 -1 2 2"><path d="M0,0 h1 v-1 z" style="stroke-dasharray: 2 1"/></svg>"#;
        let d = parse_svg_str(p).unwrap();
        assert_eq!(d.segments.len(), 3);
        assert!(d.segments.iter().all(|s| s.visibility == Visibility::Hidden));
        assert!(d.segments[1].segment.approx_eq(&seg((1.0, 0.0), (1.0, 1.0)), 1e-12));

        let arc = r#"<svg><path d="M 1 0 A 1 1 0 0 0 0 -1"/></svg>"#;
        let d = parse_svg_str(arc).unwrap();
        match d.segments[0].segment {
            PathSegment::Arc { center, radius, start, end } => {
                assert!(center.norm() < 1e-12 && (radius - 1.0).abs() < 1e-12);
                assert!(start.abs() < 1e-12 && (end - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsupported_features() {
        for s in [
            r#"<svg><path d="M0 0 C 1 1 2 2 3 3"/></svg>"#,
            r#"<svg><path d="M0 0 q 1 1 2 2"/></svg>"#,
            r#"<svg><g transform="scale(2)"><line x1="0" y1="0" x2="1" y2="1"/></g></svg>"#,
            r#"<svg><rect x="0" y="0" width="1" height="1"/></svg>"#,
        ] {
            assert!(matches!(parse_svg_str(s), Err(DrawingError::UnsupportedSvgFeature(_))), "{s}");
        }
        assert!(matches!(parse_svg_str("<svg><line x1='a'/></svg>"), Err(DrawingError::Parse(_))));
        assert!(matches!(parse_svg_str("<svg"), Err(DrawingError::Parse(_))));
    }
}
