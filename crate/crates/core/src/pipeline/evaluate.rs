use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DirectoryViewSource, PipelineError, ViewRequest, ViewSource, ORTHOGRAPHIC_ORDER};
use crate::drawing::{load_raster, Raster};
use crate::metrics::{chamfer_2d, ChamferReport, CHAMFER_SIZE};
use crate::projection::StandardView;
use crate::vectorize::vectorize_drawing;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedView {
    pub id: String,
    pub view: StandardView,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub report: ChamferReport,
    pub skipped: Vec<SkippedView>,
}

impl Evaluation {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// Chamfer statistics of generated orthographic rasters against the manifest's
/// ground-truth rasters. Both sides are vectorized the same way before comparison.
pub fn evaluate_generated(
    manifest: &super::CorpusManifest,
    manifest_dir: &Path,
    generated_dir: &Path,
) -> Result<Evaluation, PipelineError> {
    let mut distances = Vec::new();
    let mut skipped = Vec::new();
    let probe = Raster::new(32, 32);
    for e in manifest.succeeded() {
        let source = DirectoryViewSource::new(generated_dir, e.id.clone());
        for view in ORTHOGRAPHIC_ORDER {
            let skip = |reason: String| SkippedView { id: e.id.clone(), view, reason };
            let Some(truth_path) = e.drawings.get(view.as_str()) else {
                skipped.push(skip("no ground-truth drawing".into()));
                continue;
            };
            let generated = match source.request(&ViewRequest::new(probe.clone(), view)?) {
                Ok(r) => r,
                Err(err) => {
                    skipped.push(skip(err.to_string()));
                    continue;
                }
            };
            let truth = load_raster(&manifest_dir.join(&truth_path.raster))?;
            let (g, t) = (vectorize_drawing(&generated, view), vectorize_drawing(&truth, view));
            match chamfer_2d(&g, &t, CHAMFER_SIZE) {
                Ok(d) => distances.push((view, d)),
                Err(err) => skipped.push(skip(err.to_string())),
            }
        }
    }
    Ok(Evaluation { report: ChamferReport::from_distances(&distances)?, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{rasterize, PathSegment, Stroke, TechnicalDrawing};
    use crate::math::Point2;
    use crate::pipeline::{build_dataset, CorpusManifest, DatasetOptions, DrawingPaths, EntryStatus, ManifestEntry, PromptTemplate, SCHEMA_VERSION};
    use crate::geometry::write_obj;
    use crate::shapes::unit_cube;
    use std::collections::BTreeMap;

    #[test]
    fn copies_score_zero_and_missing_views_skip() {
        let (src, out, gen) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let mut buf = Vec::new();
        write_obj(&unit_cube(), &mut buf).unwrap();
        std::fs::write(src.path().join("cube.obj"), buf).unwrap();
        let m = build_dataset(src.path(), out.path(), &DatasetOptions::default()).unwrap();
        for v in ["top", "front"] {
            let from = out.path().join(&m.entries[0].drawings[v].raster);
            std::fs::copy(from, gen.path().join(format!("cube_{v}.pgm"))).unwrap();
        }
        let ev = evaluate_generated(&m, out.path(), gen.path()).unwrap();
        assert_eq!(ev.report.views.len(), 2);
        assert!(ev.report.views.iter().all(|r| r.avg == 0.0 && r.max == 0.0 && r.std == 0.0));
        assert_eq!(ev.skipped.len(), 1);
        assert_eq!(ev.skipped[0].view, StandardView::Side);
    }

    /// Vertical lines shifted sideways move every sample by the shift.
    #[test]
    fn uniform_shift_is_measured() {
        let (base, gen) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let lines = |dx: f64| {
            let segs = (0..5)
                .map(|k| {
                    let x = -0.8 + 0.4 * k as f64 + dx;
                    Stroke::visible(PathSegment::Line { a: Point2::new(x, -0.9), b: Point2::new(x, 0.9) })
                })
                .collect();
            TechnicalDrawing::with_segments(StandardView::Front, segs)
        };
        // Three pixels at 256 px across the 2.4-wide window.
        let shift = 3.0 * 2.4 / 256.0;
        let mut drawings = BTreeMap::new();
        for v in ORTHOGRAPHIC_ORDER {
            let mut d = lines(0.0);
            d.view = v;
            let rel = format!("{}.pgm", v.as_str());
            std::fs::write(base.path().join(&rel), rasterize(&d, 512).to_pgm()).unwrap();
            drawings.insert(v.as_str().to_string(), DrawingPaths { svg: rel.clone(), raster: rel });
            let g = if v == StandardView::Front { lines(shift) } else { d };
            std::fs::write(gen.path().join(format!("p_{}.pgm", v.as_str())), rasterize(&g, 512).to_pgm()).unwrap();
        }
        let m = CorpusManifest {
            schema_version: SCHEMA_VERSION.into(),
            entries: vec![ManifestEntry {
                id: "p".into(),
                mesh_path: String::new(),
                status: EntryStatus::Ok,
                error: None,
                prompt: PromptTemplate::default(),
                drawings,
                metrics: None,
            }],
        };
        let ev = evaluate_generated(&m, base.path(), gen.path()).unwrap();
        let names: Vec<&str> = ev.report.views.iter().map(|r| r.view.as_str()).collect();
        assert_eq!(names, ["Top", "Front", "Side"]);
        let front = &ev.report.views[1];
        assert!((front.avg - 3.0).abs() <= 0.2, "{}", front.avg);
        assert_eq!(ev.report.views[0].avg, 0.0);
    }
}
