use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{oracle_view_source, run_text_to_cad, PipelineError, TextToCadOptions, Thresholds, ORTHOGRAPHIC_ORDER};
use crate::drawing::render_drawing_with;
use crate::geometry::{normalize_longest_edge, TriMesh, NORMALIZED_EXTENT};
use crate::metrics::{chamfer_2d, voxel_iou, ConsistencyReport, CHAMFER_SIZE};
use crate::projection::StandardView;
use crate::reconstruct::{voxelize_mesh, Axis, ReconstructOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub resolution: usize,
    pub iou: f64,
    /// Vectorized against rendered drawing, pixels at 256, keyed by view name.
    pub chamfer: BTreeMap<String, f64>,
    pub consistency: ConsistencyReport,
    pub extrusion_axis: Option<Axis>,
    pub thresholds: Thresholds,
    pub pass: bool,
}

impl RoundtripReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("IoU @{}: {:.4} (min {:.2})\n", self.resolution, self.iou, self.thresholds.iou_min);
        for (v, d) in &self.chamfer {
            s += &format!("Chamfer {v:<6} {d:.3} px (max {:.2})\n", self.thresholds.chamfer_max_px);
        }
        s += &format!("Consistency (tolerance {}):\n", self.consistency.tolerance);
        for r in &self.consistency.relations {
            s += &format!("  {:<30} {:.6} vs {:.6}  {}\n", r.name, r.lhs, r.rhs, if r.pass { "pass" } else { "FAIL" });
        }
        s += &format!(
            "Extrusion: {}\nResult: {}\n",
            self.extrusion_axis.map_or("none".to_string(), |a| a.to_string()),
            if self.pass { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Normalizes the mesh, runs the oracle text-to-CAD path and scores it against the original.
pub fn run_roundtrip(mesh: &TriMesh, resolution: usize, thresholds: &Thresholds) -> Result<RoundtripReport, PipelineError> {
    let (mesh, _) = normalize_longest_edge(mesh, NORMALIZED_EXTENT)?;
    let source = oracle_view_source(mesh.clone());
    let iso = source.render(StandardView::Isometric)?;
    let opts = TextToCadOptions {
        reconstruct: ReconstructOptions { resolution, ..Default::default() },
        consistency_tolerance: thresholds.consistency_tolerance,
        ..Default::default()
    };
    let out = run_text_to_cad(&iso, &source, &opts)?;
    let iou = voxel_iou(&out.grid, &voxelize_mesh(&mesh, resolution))?;
    let mut chamfer = BTreeMap::new();
    for (view, vectorized) in ORTHOGRAPHIC_ORDER.iter().zip(&out.drawings) {
        let truth = render_drawing_with(&mesh, *view, &source.render)?;
        chamfer.insert(view.as_str().to_string(), chamfer_2d(vectorized, &truth, CHAMFER_SIZE)?);
    }
    let pass = iou >= thresholds.iou_min
        && chamfer.values().all(|&d| d <= thresholds.chamfer_max_px)
        && out.consistency.pass();
    Ok(RoundtripReport {
        resolution,
        iou,
        chamfer,
        consistency: out.consistency,
        extrusion_axis: out.extrusion.map(|e| e.axis),
        thresholds: *thresholds,
        pass,
    })
}
