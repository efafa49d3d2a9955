//! View-source abstraction, text-to-CAD composition, dataset building and evaluation.

mod config;
mod dataset;
mod evaluate;
mod roundtrip;
mod source;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::drawing::{DrawingError, Raster, TechnicalDrawing};
use crate::geometry::{GeometryError, TriMesh};
use crate::metrics::{consistency_check, ConsistencyReport, MetricsError, DEFAULT_CONSISTENCY_TOLERANCE};
use crate::projection::StandardView;
use crate::reconstruct::{
    reconstruct_from_silhouettes, silhouettes_from_drawings_with, ExtrusionProgram, ReconstructError, ReconstructOptions,
    SilhouetteSet, VoxelGrid,
};
use crate::vectorize::{vectorize_drawing_with, VectorizeOptions};

pub use config::{Config, Thresholds, CONFIG_ENV};
pub use dataset::{
    build_dataset, discover_meshes, write_random_corpus, CorpusManifest, DatasetOptions, DrawingPaths, EntryMetrics,
    EntryStatus, ManifestEntry, RasterFormat, SCHEMA_VERSION,
};
pub use evaluate::{evaluate_generated, Evaluation, SkippedView};
pub use roundtrip::{run_roundtrip, RoundtripReport};
pub use source::{
    directory_view_source, oracle_view_source, DirectoryViewSource, OracleViewSource, ViewRequest, ViewSource,
    DEFAULT_VIEW_PATTERN,
};

/// Fixed opening of every text prompt.
pub const DEFAULT_PROMPT_PREFIX: &str = "An isometric view of a 3D CAD model depicting a mechanical part";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("no {view} view available for `{id}`")]
    MissingView { id: String, view: StandardView },
    #[error("invalid view request: {0}")]
    InvalidRequest(String),
    #[error("no mesh files found in {0}")]
    NoMeshes(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Drawing(#[from] DrawingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub prefix: String,
    /// Object type and key features; empty until labelled.
    pub body: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate { prefix: DEFAULT_PROMPT_PREFIX.to_string(), body: String::new() }
    }
}

impl PromptTemplate {
    pub fn with_body(body: impl Into<String>) -> Self {
        PromptTemplate { body: body.into(), ..Default::default() }
    }

    pub fn render(&self) -> String {
        if self.body.is_empty() {
            self.prefix.clone()
        } else {
            format!("{}, {}", self.prefix, self.body)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextToCadOptions {
    pub reconstruct: ReconstructOptions,
    pub vectorize: VectorizeOptions,
    pub consistency_tolerance: f64,
}

impl Default for TextToCadOptions {
    fn default() -> Self {
        TextToCadOptions {
            reconstruct: ReconstructOptions::default(),
            vectorize: VectorizeOptions::default(),
            consistency_tolerance: DEFAULT_CONSISTENCY_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TextToCadOutput {
    pub mesh: TriMesh,
    pub extrusion: Option<ExtrusionProgram>,
    /// Reconstruction proceeds even when this fails; callers decide what to do with the flag.
    pub consistency: ConsistencyReport,
    pub grid: VoxelGrid,
    pub silhouettes: SilhouetteSet,
    /// Vectorized Top, Front and Side drawings.
    pub drawings: [TechnicalDrawing; 3],
}

pub const ORTHOGRAPHIC_ORDER: [StandardView; 3] = [StandardView::Top, StandardView::Front, StandardView::Side];

/// Requests the three orthographic views, vectorizes them, checks cross-view consistency
/// and reconstructs.
pub fn run_text_to_cad(
    isometric: &Raster,
    source: &dyn ViewSource,
    opts: &TextToCadOptions,
) -> Result<TextToCadOutput, PipelineError> {
    let mut drawings = Vec::with_capacity(3);
    for view in ORTHOGRAPHIC_ORDER {
        let raster = source.request(&ViewRequest::new(isometric.clone(), view)?)?;
        drawings.push(vectorize_drawing_with(&raster, view, &opts.vectorize));
    }
    let drawings: [TechnicalDrawing; 3] = drawings.try_into().expect("three views");
    let silhouettes = silhouettes_from_drawings_with(&drawings[0], &drawings[1], &drawings[2], opts.reconstruct.snap)?;
    let consistency = consistency_check(&silhouettes, opts.consistency_tolerance);
    let r = reconstruct_from_silhouettes(&silhouettes, &opts.reconstruct)?;
    Ok(TextToCadOutput { mesh: r.mesh, extrusion: r.extrusion, consistency, grid: r.grid, silhouettes, drawings })
}
