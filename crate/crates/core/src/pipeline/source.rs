use std::path::PathBuf;

use super::PipelineError;
use crate::drawing::{load_raster, rasterize_with, render_drawing_with, DashPattern, Raster, RenderOptions, DEFAULT_RASTER_SIZE};
use crate::geometry::TriMesh;
use crate::projection::{view_pose, StandardView, ViewPose};

/// Conditioning for one generated view: the isometric image plus the target camera pose.
#[derive(Debug, Clone)]
pub struct ViewRequest {
    pub isometric: Raster,
    pub pose: ViewPose,
    pub target_view: StandardView,
}

impl ViewRequest {
    pub fn new(isometric: Raster, target_view: StandardView) -> Result<Self, PipelineError> {
        if target_view == StandardView::Isometric {
            return Err(PipelineError::InvalidRequest("target view must be top, front or side".into()));
        }
        Ok(ViewRequest { isometric, pose: view_pose(target_view), target_view })
    }
}

/// Anything that can produce an orthographic drawing raster from a request.
pub trait ViewSource: Send + Sync {
    fn request(&self, req: &ViewRequest) -> Result<Raster, PipelineError>;
}

/// Renders the requested view straight from a known mesh, ignoring the isometric image.
#[derive(Debug, Clone)]
pub struct OracleViewSource {
    mesh: TriMesh,
    pub size: usize,
    pub render: RenderOptions,
    pub dash: DashPattern,
}

impl OracleViewSource {
    pub fn new(mesh: TriMesh) -> Self {
        OracleViewSource { mesh, size: DEFAULT_RASTER_SIZE, render: RenderOptions::default(), dash: DashPattern::default() }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn render(&self, view: StandardView) -> Result<Raster, PipelineError> {
        let d = render_drawing_with(&self.mesh, view, &self.render)?;
        Ok(rasterize_with(&d, self.size, self.dash))
    }
}

pub fn oracle_view_source(mesh: TriMesh) -> OracleViewSource {
    OracleViewSource::new(mesh)
}

impl ViewSource for OracleViewSource {
    fn request(&self, req: &ViewRequest) -> Result<Raster, PipelineError> {
        self.render(req.target_view)
    }
}

/// Reads stored rasters named by a pattern with `{id}` and `{view}` placeholders,
/// trying `.pgm` then `.png`.
#[derive(Debug, Clone)]
pub struct DirectoryViewSource {
    dir: PathBuf,
    id: String,
    pattern: String,
}

pub const DEFAULT_VIEW_PATTERN: &str = "{id}_{view}";

impl DirectoryViewSource {
    pub fn new(dir: impl Into<PathBuf>, id: impl Into<String>) -> Self {
        DirectoryViewSource { dir: dir.into(), id: id.into(), pattern: DEFAULT_VIEW_PATTERN.into() }
    }

    pub fn with_pattern(mut self, pattern: impl Into<String>) -> Self {
        self.pattern = pattern.into();
        self
    }

    pub fn resolve(&self, view: StandardView) -> Option<PathBuf> {
        let stem = self.pattern.replace("{id}", &self.id).replace("{view}", view.as_str());
        ["pgm", "png"].iter().map(|ext| self.dir.join(format!("{stem}.{ext}"))).find(|p| p.is_file())
    }
}

pub fn directory_view_source(dir: impl Into<PathBuf>, id: impl Into<String>) -> DirectoryViewSource {
    DirectoryViewSource::new(dir, id)
}

impl ViewSource for DirectoryViewSource {
    fn request(&self, req: &ViewRequest) -> Result<Raster, PipelineError> {
        let path = self
            .resolve(req.target_view)
            .ok_or_else(|| PipelineError::MissingView { id: self.id.clone(), view: req.target_view })?;
        Ok(load_raster(&path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{rasterize, render_drawing};
    use crate::shapes::axis_box;
    use crate::math::Vec3;

    fn cube() -> TriMesh {
        axis_box(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0))
    }

    #[test]
    fn oracle_matches_direct_render_and_is_deterministic() {
        let src = oracle_view_source(cube());
        let iso = src.render(StandardView::Isometric).unwrap();
        let req = ViewRequest::new(iso, StandardView::Front).unwrap();
        let a = src.request(&req).unwrap();
        assert_eq!(a, rasterize(&render_drawing(&cube(), StandardView::Front).unwrap(), 512));
        assert_eq!(a, src.request(&req).unwrap());
        assert!(ViewRequest::new(Raster::new(32, 32), StandardView::Isometric).is_err());
    }

    #[test]
    fn directory_source_formats_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Raster::new(40, 40);
        r.set(3, 7, 0);
        std::fs::write(dir.path().join("cube_front.pgm"), r.to_pgm()).unwrap();
        std::fs::write(dir.path().join("cube_top.png"), r.to_png().unwrap()).unwrap();
        let src = directory_view_source(dir.path(), "cube");
        let req = |v| ViewRequest::new(Raster::new(32, 32), v).unwrap();
        let front = src.request(&req(StandardView::Front)).unwrap();
        let top = src.request(&req(StandardView::Top)).unwrap();
        assert_eq!(front, r);
        assert_eq!(front, top);
        assert!(matches!(src.request(&req(StandardView::Side)), Err(PipelineError::MissingView { .. })));
        let custom = DirectoryViewSource::new(dir.path(), "x").with_pattern("cube_{view}");
        assert!(custom.request(&req(StandardView::Front)).is_ok());
    }
}
