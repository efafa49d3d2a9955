use super::{rasterize, DrawingError, Raster, TechnicalDrawing};
use crate::projection::StandardView;

/// Third-angle sheet: Top above Front, Side right of Front, Isometric top-right.
/// Each view is rasterized at half the sheet size into its quadrant.
pub fn compose_sheet(drawings: &[TechnicalDrawing], size: usize) -> Result<Raster, DrawingError> {
    let mut seen = Vec::new();
    for d in drawings {
        if seen.contains(&d.view) {
            return Err(DrawingError::DuplicateView(d.view));
        }
        seen.push(d.view);
    }
    let cell = size / 2;
    let mut sheet = Raster::new(size, size);
    for d in drawings {
        let (col, row) = match d.view {
            StandardView::Top => (0, 0),
            StandardView::Isometric => (1, 0),
            StandardView::Front => (0, 1),
            StandardView::Side => (1, 1),
        };
        sheet.blit(&rasterize(d, cell), col * cell, row * cell);
    }
    Ok(sheet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::render_drawing;
    use crate::geometry::normalize_longest_edge;
    use crate::shapes::unit_cube;

    fn quadrant_ink(r: &Raster, col: usize, row: usize) -> usize {
        let c = r.width() / 2;
        (row * c..(row + 1) * c)
            .flat_map(|y| (col * c..(col + 1) * c).map(move |x| (x, y)))
            .filter(|&(x, y)| r.get(x, y) == 0)
            .count()
    }

    #[test]
    fn quadrant_layout() {
        let (m, _) = normalize_longest_edge(&unit_cube(), 2.0).unwrap();
        let front = render_drawing(&m, StandardView::Front).unwrap();
        let one = compose_sheet(std::slice::from_ref(&front), 512).unwrap();
        assert!(quadrant_ink(&one, 0, 1) > 0);
        assert_eq!(quadrant_ink(&one, 0, 0) + quadrant_ink(&one, 1, 0) + quadrant_ink(&one, 1, 1), 0);

        let top = render_drawing(&m, StandardView::Top).unwrap();
        let only_top = compose_sheet(std::slice::from_ref(&top), 512).unwrap();
        assert!(quadrant_ink(&only_top, 0, 0) > 0);

        let all: Vec<_> = StandardView::ALL.iter().map(|&v| render_drawing(&m, v).unwrap()).collect();
        let sheet = compose_sheet(&all, 512).unwrap();
        for (c, r) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            assert!(quadrant_ink(&sheet, c, r) > 0);
        }
        assert!(matches!(compose_sheet(&[front.clone(), front], 512), Err(DrawingError::DuplicateView(StandardView::Front))));
    }
}
