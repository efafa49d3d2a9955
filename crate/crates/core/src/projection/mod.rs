//! Camera poses for the four standard views, silhouettes and hidden-line edge classification.

mod edges;
mod silhouette;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::math::{Mat3, Point2, Vec3};

pub use edges::{
    classify_edges, classify_edges_raw, classify_edges_with, merge_edges, EdgeKind, EdgeOptions, EdgePiece,
    OcclusionIndex, ProjectedEdge, Visibility,
};
pub use silhouette::silhouette;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProjectionError {
    #[error("all triangles project to zero area")]
    DegenerateProjection,
    #[error("invalid pose: {0}")]
    InvalidPose(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardView {
    Top,
    Front,
    Side,
    Isometric,
}

impl StandardView {
    pub const ALL: [StandardView; 4] = [StandardView::Top, StandardView::Front, StandardView::Side, StandardView::Isometric];
    pub const ORTHOGRAPHIC: [StandardView; 3] = [StandardView::Top, StandardView::Front, StandardView::Side];

    pub fn as_str(self) -> &'static str {
        match self {
            StandardView::Top => "top",
            StandardView::Front => "front",
            StandardView::Side => "side",
            StandardView::Isometric => "isometric",
        }
    }
}

impl fmt::Display for StandardView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StandardView {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "top" => Ok(StandardView::Top),
            "front" => Ok(StandardView::Front),
            "side" | "right" => Ok(StandardView::Side),
            "isometric" | "iso" => Ok(StandardView::Isometric),
            other => Err(format!("unknown view `{other}`")),
        }
    }
}

/// Orthographic camera. Rows of `rotation` are the image x axis, image y axis and the
/// viewing direction; the camera looks along the third row from infinitely far behind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewPose {
    rotation: Mat3,
    translation: Vec3,
}

impl ViewPose {
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self, ProjectionError> {
        let err = rotation.orthonormality_error();
        if !(err <= 1e-9) {
            return Err(ProjectionError::InvalidPose(format!("rotation not orthonormal (error {err:e})")));
        }
        if !translation.is_finite() {
            return Err(ProjectionError::InvalidPose("non-finite translation".into()));
        }
        Ok(ViewPose { rotation, translation })
    }

    pub fn rotation(&self) -> Mat3 {
        self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn view_dir(&self) -> Vec3 {
        self.rotation.row(2)
    }

    pub fn project(&self, p: Vec3) -> Point2 {
        let q = p - self.translation;
        Point2::new(self.rotation.row(0).dot(q), self.rotation.row(1).dot(q))
    }

    /// Distance along the viewing direction; smaller is closer to the camera.
    pub fn depth(&self, p: Vec3) -> f64 {
        self.view_dir().dot(p - self.translation)
    }
}

pub fn view_pose(view: StandardView) -> ViewPose {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (u, v) = match view {
        StandardView::Front => (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)),
        StandardView::Top => (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 0.0)),
        StandardView::Side => (Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)),
        StandardView::Isometric => {
            // Azimuth 45°, elevation 45°: d = (-cos45·cos45, -sin45·cos45, -sin45).
            let d = Vec3::new(-0.5, -0.5, -h);
            let u = Vec3::new(h, -h, 0.0);
            (u, d.cross(u))
        }
    };
    let d = u.cross(v);
    ViewPose {
        rotation: Mat3::from_rows(u, v, d),
        translation: Vec3::ZERO,
    }
}

pub fn project_point(p: Vec3, pose: &ViewPose) -> Point2 {
    pose.project(p)
}
