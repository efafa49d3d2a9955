//! Visual-hull reconstruction from three orthographic drawings.

mod extrusion;
mod loops;
mod surface;
mod voxel;

use serde::{Deserialize, Serialize};

use crate::drawing::TechnicalDrawing;
use crate::geometry::TriMesh;
use crate::planar::Polygon2D;
use crate::projection::{silhouette, view_pose, ProjectionError, StandardView};

pub use extrusion::{detect_extrusion, Axis, ExtrusionProgram, PROFILE_EPSILON_VOXELS};
pub use loops::{loops_from_drawing, DEFAULT_SNAP, MAX_SPUR_SNAPS};
pub use surface::{voxels_to_mesh, voxels_to_mesh_smooth};
pub use voxel::{carve_visual_hull, voxelize_mesh, VoxelGrid, VoxelRle, GRID_HALF_EXTENT};

pub const DEFAULT_RESOLUTION: usize = 128;

#[derive(Debug, thiserror::Error)]
pub enum ReconstructError {
    #[error("{view} drawing has an open outline near ({x:.4}, {y:.4})")]
    OpenLoop { view: StandardView, x: f64, y: f64 },
    #[error("{0} drawing contains no closed loops")]
    NoLoops(StandardView),
    #[error("expected a {expected} drawing, got {found}")]
    WrongView { expected: StandardView, found: StandardView },
    #[error("silhouettes do not intersect inside the grid")]
    EmptyIntersection,
    #[error("voxel grid is empty")]
    EmptyGrid,
    #[error("invalid voxel grid: {0}")]
    InvalidGrid(String),
    #[error("invalid extrusion program: {0}")]
    InvalidProgram(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Solid regions of the three orthographic views, in each view's image coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteSet {
    pub top: Vec<Polygon2D>,
    pub front: Vec<Polygon2D>,
    pub side: Vec<Polygon2D>,
}

impl SilhouetteSet {
    /// Exact silhouettes of a mesh projected into the three orthographic views.
    pub fn from_mesh(mesh: &TriMesh) -> Result<Self, ReconstructError> {
        let s = |v| silhouette(mesh, &view_pose(v));
        Ok(SilhouetteSet { top: s(StandardView::Top)?, front: s(StandardView::Front)?, side: s(StandardView::Side)? })
    }

    pub fn get(&self, view: StandardView) -> Option<&[Polygon2D]> {
        match view {
            StandardView::Top => Some(&self.top),
            StandardView::Front => Some(&self.front),
            StandardView::Side => Some(&self.side),
            StandardView::Isometric => None,
        }
    }
}

fn checked<'a>(d: &'a TechnicalDrawing, expected: StandardView) -> Result<&'a TechnicalDrawing, ReconstructError> {
    if d.view != expected {
        return Err(ReconstructError::WrongView { expected, found: d.view });
    }
    Ok(d)
}

pub fn silhouettes_from_drawings(
    top: &TechnicalDrawing,
    front: &TechnicalDrawing,
    side: &TechnicalDrawing,
) -> Result<SilhouetteSet, ReconstructError> {
    silhouettes_from_drawings_with(top, front, side, DEFAULT_SNAP)
}

pub fn silhouettes_from_drawings_with(
    top: &TechnicalDrawing,
    front: &TechnicalDrawing,
    side: &TechnicalDrawing,
    snap: f64,
) -> Result<SilhouetteSet, ReconstructError> {
    Ok(SilhouetteSet {
        top: loops_from_drawing(checked(top, StandardView::Top)?, snap)?,
        front: loops_from_drawing(checked(front, StandardView::Front)?, snap)?,
        side: loops_from_drawing(checked(side, StandardView::Side)?, snap)?,
    })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub mesh: TriMesh,
    pub extrusion: Option<ExtrusionProgram>,
    pub grid: VoxelGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    pub resolution: usize,
    pub snap: f64,
    /// Extract a marching-tetrahedra isosurface instead of the block mesh.
    pub smooth: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { resolution: DEFAULT_RESOLUTION, snap: DEFAULT_SNAP, smooth: false }
    }
}

pub fn reconstruct_from_silhouettes(s: &SilhouetteSet, opts: &ReconstructOptions) -> Result<Reconstruction, ReconstructError> {
    let grid = carve_visual_hull(s, opts.resolution)?;
    let mesh = if opts.smooth { voxels_to_mesh_smooth(&grid)? } else { voxels_to_mesh(&grid)? };
    Ok(Reconstruction { mesh, extrusion: detect_extrusion(&grid), grid })
}

pub fn reconstruct_from_drawings(
    top: &TechnicalDrawing,
    front: &TechnicalDrawing,
    side: &TechnicalDrawing,
    resolution: usize,
) -> Result<Reconstruction, ReconstructError> {
    reconstruct_from_drawings_with(top, front, side, &ReconstructOptions { resolution, ..Default::default() })
}

pub fn reconstruct_from_drawings_with(
    top: &TechnicalDrawing,
    front: &TechnicalDrawing,
    side: &TechnicalDrawing,
    opts: &ReconstructOptions,
) -> Result<Reconstruction, ReconstructError> {
    let s = silhouettes_from_drawings_with(top, front, side, opts.snap)?;
    reconstruct_from_silhouettes(&s, opts)
}
