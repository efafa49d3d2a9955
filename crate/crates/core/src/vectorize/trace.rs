use std::collections::VecDeque;

use super::Contour;
use crate::drawing::Raster;
use crate::math::Point2;
use crate::planar::signed_area;

/// Moore neighbourhood in clockwise order as displayed (y grows downward).
const DIRS: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

struct Grid<'a> {
    r: &'a Raster,
}

impl Grid<'_> {
    fn ink(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.r.width()
            && (y as usize) < self.r.height()
            && self.r.get(x as usize, y as usize) < 128
    }
}

fn dir_index(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    DIRS.iter().position(|&k| k == d).expect("backtrack must neighbour the current pixel")
}

/// Moore-neighbour trace from `start` whose background neighbour `back` is the search origin.
/// Jacob's stopping criterion in its move form: the state after a step depends only on the
/// step itself, so the trace ends when the first step out of `start` repeats.
fn moore(g: &Grid, start: (i64, i64), back: (i64, i64), limit: usize) -> Vec<(i64, i64)> {
    let step_from = |p: (i64, i64), b: (i64, i64)| {
        let k = dir_index(p, b);
        (1..8).find_map(|step| {
            let i = (k + step) % 8;
            let c = (p.0 + DIRS[i].0, p.1 + DIRS[i].1);
            let j = (k + step - 1) % 8;
            g.ink(c.0, c.1).then_some((c, (p.0 + DIRS[j].0, p.1 + DIRS[j].1)))
        })
    };
    let mut out = vec![start];
    let Some(first) = step_from(start, back) else { return out };
    let (mut p, mut b) = first;
    for _ in 0..limit {
        let (c, nb) = step_from(p, b).expect("a traced pixel always has an ink neighbour");
        out.push(p);
        if c == first.0 && p == start {
            out.pop();
            break;
        }
        p = c;
        b = nb;
    }
    out
}

fn to_contour(px: Vec<(i64, i64)>, want_ccw: bool, hole: bool) -> Contour {
    let mut points: Vec<Point2> = px.into_iter().map(|(x, y)| Point2::new(x as f64, y as f64)).collect();
    // Pixel rows grow downward, so displayed orientation is the negated shoelace sign.
    let ccw_displayed = -signed_area(&points) > 0.0;
    if ccw_displayed != want_ccw && points.len() > 2 {
        points[1..].reverse();
    }
    let closed = points.len() >= 3;
    Contour { points, closed, hole }
}

/// Boundaries of 8-connected ink regions (outer, counter-clockwise as displayed) and of the
/// 4-connected background regions they enclose (holes, clockwise). Pixels outside the image
/// count as background.
pub fn trace_contours(r: &Raster) -> Vec<Contour> {
    let (w, h) = (r.width(), r.height());
    let g = Grid { r };
    let limit = 8 * w * h + 16;
    let mut out = Vec::new();

    let mut comp = vec![u32::MAX; w * h];
    let mut next_label = 0;
    for y in 0..h {
        for x in 0..w {
            if comp[y * w + x] != u32::MAX || !g.ink(x as i64, y as i64) {
                continue;
            }
            let label = next_label;
            next_label += 1;
            let mut q = VecDeque::from([(x, y)]);
            comp[y * w + x] = label;
            while let Some((cx, cy)) = q.pop_front() {
                for (dx, dy) in DIRS {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if g.ink(nx, ny) && comp[ny as usize * w + nx as usize] == u32::MAX {
                        comp[ny as usize * w + nx as usize] = label;
                        q.push_back((nx as usize, ny as usize));
                    }
                }
            }
            let s = (x as i64, y as i64);
            out.push(to_contour(moore(&g, s, (s.0 - 1, s.1), limit), true, false));
        }
    }

    // Background regions not touching the border are holes.
    let mut region = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if region[y * w + x] || g.ink(x as i64, y as i64) {
                continue;
            }
            let mut q = VecDeque::from([(x, y)]);
            region[y * w + x] = true;
            let mut touches_border = false;
            while let Some((cx, cy)) = q.pop_front() {
                if cx == 0 || cy == 0 || cx + 1 == w || cy + 1 == h {
                    touches_border = true;
                }
                for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let i = ny as usize * w + nx as usize;
                    if !region[i] && !g.ink(nx, ny) {
                        region[i] = true;
                        q.push_back((nx as usize, ny as usize));
                    }
                }
            }
            if !touches_border {
                let first = (x as i64, y as i64);
                let s = (first.0, first.1 - 1);
                out.push(to_contour(moore(&g, s, first, limit), false, true));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn raster_from(rows: &[&str]) -> Raster {
        let h = rows.len();
        let w = rows[0].len();
        let px = rows.iter().flat_map(|r| r.bytes().map(|b| if b == b'#' { 0 } else { 255 })).collect();
        Raster::from_pixels(w, h, px).unwrap()
    }

    /// Ink pixels with a 4-neighbour that is background or outside the image.
    fn boundary_oracle(r: &Raster) -> BTreeSet<(i64, i64)> {
        let g = Grid { r };
        let mut s = BTreeSet::new();
        for y in 0..r.height() as i64 {
            for x in 0..r.width() as i64 {
                if g.ink(x, y) && [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| !g.ink(x + dx, y + dy)) {
                    s.insert((x, y));
                }
            }
        }
        s
    }

    fn traced(cs: &[Contour]) -> BTreeSet<(i64, i64)> {
        cs.iter().flat_map(|c| c.points.iter().map(|p| (p.x as i64, p.y as i64))).collect()
    }

    #[test]
    fn blank_has_no_contours() {
        assert!(trace_contours(&Raster::new(16, 16)).is_empty());
    }

    #[test]
    fn block_three_by_three() {
        let r = raster_from(&[".......", ".......", "..###..", "..###..", "..###..", ".......", "......."]);
        let c = trace_contours(&r);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].points.len(), 8);
        assert!(c[0].closed && !c[0].hole);
        assert_eq!(traced(&c), boundary_oracle(&r));
        assert!(-signed_area(&c[0].points) > 0.0);
    }

    #[test]
    fn two_blocks_and_a_ring() {
        let r = raster_from(&["##....", "##..##", "....##", "......"]);
        assert_eq!(trace_contours(&r).len(), 2);
        let ring = raster_from(&["#####", "#...#", "#...#", "#####"]);
        let c = trace_contours(&ring);
        assert_eq!(c.len(), 2);
        assert!(c.iter().any(|c| c.hole && signed_area(&c.points) > 0.0));
        assert_eq!(traced(&c), boundary_oracle(&ring));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn traced_pixels_match_boundary_scan(w in 3usize..40, h in 3usize..40, seed in any::<u64>(), density in 0.2f64..0.8) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let px = (0..w * h).map(|_| if rng.gen_bool(density) { 0 } else { 255 }).collect();
            let r = Raster::from_pixels(w, h, px).unwrap();
            let c = trace_contours(&r);
            prop_assert_eq!(traced(&c), boundary_oracle(&r));
            for k in &c {
                for w2 in k.points.windows(2) {
                    prop_assert!((w2[0].x - w2[1].x).abs() <= 1.0 && (w2[0].y - w2[1].y).abs() <= 1.0);
                }
            }
        }
    }
}
