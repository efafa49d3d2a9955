use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DrawingError, PathSegment, TechnicalDrawing};
use crate::math::Point2;
use crate::planar::Rect2;
use crate::projection::Visibility;

pub const DASH_ON_PX: usize = 6;
pub const DASH_OFF_PX: usize = 3;

/// Grayscale image, row-major, 0 = ink and 255 = background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Raster { width, height, pixels: vec![255; width * height] }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, DrawingError> {
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(DrawingError::InvalidRaster(format!(
                "{width}x{height} needs {} bytes, got {}",
                width.saturating_mul(height),
                pixels.len()
            )));
        }
        Ok(Raster { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Pixels darker than mid-gray.
    pub fn ink_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p < 128).count()
    }

    /// Copies `src` with its top-left corner at `(x0, y0)`, clipping at the border.
    pub fn blit(&mut self, src: &Raster, x0: usize, y0: usize) {
        for y in 0..src.height.min(self.height.saturating_sub(y0)) {
            for x in 0..src.width.min(self.width.saturating_sub(x0)) {
                self.set(x0 + x, y0 + y, src.get(x, y));
            }
        }
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Reads binary PGM (P5, maxval 255), allowing `#` comments in the header.
    pub fn from_pgm(bytes: &[u8]) -> Result<Self, DrawingError> {
        let mut pos = 0;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(DrawingError::InvalidRaster("truncated PGM header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        if fields[0] != "P5" {
            return Err(DrawingError::InvalidRaster(format!("unsupported magic `{}`", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| DrawingError::InvalidRaster(format!("bad PGM header field `{s}`")))
        };
        let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval != 255 {
            return Err(DrawingError::InvalidRaster(format!("maxval {maxval} unsupported")));
        }
        // Exactly one whitespace byte separates the header from the data.
        let data = bytes.get(pos + 1..).unwrap_or(&[]);
        if data.len() < w * h {
            return Err(DrawingError::InvalidRaster(format!("expected {} data bytes, got {}", w * h, data.len())));
        }
        Raster::from_pixels(w, h, data[..w * h].to_vec())
    }

    pub fn to_png(&self) -> Result<Vec<u8>, DrawingError> {
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.pixels.clone())
            .ok_or_else(|| DrawingError::InvalidRaster("buffer size mismatch".into()))?;
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png)
            .map_err(|e| DrawingError::InvalidRaster(e.to_string()))?;
        Ok(out.into_inner())
    }

    pub fn from_png(bytes: &[u8]) -> Result<Self, DrawingError> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
            .map_err(|e| DrawingError::InvalidRaster(e.to_string()))?
            .into_luma8();
        let (w, h) = img.dimensions();
        Raster::from_pixels(w as usize, h as usize, img.into_raw())
    }
}

fn is_png(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Writes PGM, or PNG when the extension is `.png`.
pub fn save_raster(r: &Raster, path: &Path) -> Result<(), DrawingError> {
    let bytes = if is_png(path) { r.to_png()? } else { r.to_pgm() };
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn load_raster(path: &Path) -> Result<Raster, DrawingError> {
    let bytes = std::fs::read(path)?;
    if is_png(path) || bytes.starts_with(b"\x89PNG") {
        Raster::from_png(&bytes)
    } else {
        Raster::from_pgm(&bytes)
    }
}

/// Maps model coordinates of `window` onto a `size`×`size` image.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PixelMap {
    pub window: Rect2,
    pub size: usize,
}

impl PixelMap {
    pub fn to_px(&self, p: Point2) -> (f64, f64) {
        let s = self.size as f64;
        (
            (p.x - self.window.min.x) / self.window.width() * s,
            (self.window.max.y - p.y) / self.window.height() * s,
        )
    }

    pub fn px_per_unit(&self) -> f64 {
        self.size as f64 / self.window.width()
    }

    fn index(&self, p: Point2) -> (i64, i64) {
        let (u, v) = self.to_px(p);
        let clampi = |x: f64| {
            let i = x.floor() as i64;
            // The far window edge belongs to the last pixel.
            if i == self.size as i64 && x - self.size as f64 <= 1e-9 {
                i - 1
            } else {
                i
            }
        };
        (clampi(u), clampi(v))
    }
}

fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64, mut plot: impl FnMut(i64, i64)) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Hidden-line dash in pixels along the stroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DashPattern {
    pub on: usize,
    pub off: usize,
}

impl Default for DashPattern {
    fn default() -> Self {
        DashPattern { on: DASH_ON_PX, off: DASH_OFF_PX }
    }
}

fn stroke_polyline(r: &mut Raster, map: &PixelMap, pts: &[Point2], dash: Option<DashPattern>) {
    let mut k = 0usize;
    let mut last: Option<(i64, i64)> = None;
    for w in pts.windows(2) {
        let (a, b) = (map.index(w[0]), map.index(w[1]));
        bresenham(a.0, a.1, b.0, b.1, |x, y| {
            if last == Some((x, y)) {
                return;
            }
            last = Some((x, y));
            let on = dash.map_or(true, |d| d.off == 0 || k % (d.on + d.off) < d.on);
            k += 1;
            if on && x >= 0 && y >= 0 && (x as usize) < r.width && (y as usize) < r.height {
                r.set(x as usize, y as usize, 0);
            }
        });
    }
}

pub(crate) fn draw_segment(r: &mut Raster, map: &PixelMap, seg: &PathSegment, dash: Option<DashPattern>) {
    let pts = seg.flatten(0.5 / map.px_per_unit());
    stroke_polyline(r, map, &pts, dash);
}

/// 1-pixel strokes, no anti-aliasing; the drawing window fills the image.
pub fn rasterize(d: &TechnicalDrawing, size: usize) -> Raster {
    rasterize_with(d, size, DashPattern::default())
}

pub fn rasterize_with(d: &TechnicalDrawing, size: usize, dash: DashPattern) -> Raster {
    assert!(size >= 32, "raster size must be at least 32 pixels");
    let mut r = Raster::new(size, size);
    let map = PixelMap { window: d.window, size };
    for s in &d.segments {
        draw_segment(&mut r, &map, &s.segment, (s.visibility == Visibility::Hidden).then_some(dash));
    }
    r
}
