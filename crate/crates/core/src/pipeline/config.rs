use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::drawing::DashPattern;
use crate::planar::Rect2;
use crate::math::Point2;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "ORTHOFORGE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub iou_min: f64,
    /// Per-view Chamfer bound between vectorized and rendered drawings, pixels at 256.
    pub chamfer_max_px: f64,
    pub consistency_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { iou_min: 0.95, chamfer_max_px: 1.5, consistency_tolerance: 0.01 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub workers: Option<usize>,
    /// Drawing window `[xmin, ymin, xmax, ymax]` overriding the per-view default.
    pub window: Option<[f64; 4]>,
    /// Hidden-line dash `[on, off]` in pixels.
    pub dash_pattern: Option<[usize; 2]>,
    pub raster_size: Option<usize>,
    pub resolution: Option<usize>,
    pub thresholds: Thresholds,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let c: Config =
            serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        c.validate()?;
        Ok(c)
    }

    /// The explicit path if given, else the file named by `ORTHOFORGE_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, PipelineError> {
        match explicit {
            Some(p) => Config::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Config::load(&PathBuf::from(p)),
                _ => Ok(Config::default()),
            },
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.workers == Some(0) {
            return Err(PipelineError::Config("workers must be at least 1".into()));
        }
        if let Some([x0, y0, x1, y1]) = self.window {
            if !(x1 > x0 && y1 > y0) {
                return Err(PipelineError::Config("window needs xmax > xmin and ymax > ymin".into()));
            }
        }
        if let Some([on, _]) = self.dash_pattern {
            if on == 0 {
                return Err(PipelineError::Config("dash on-length must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn window_rect(&self) -> Option<Rect2> {
        self.window.map(|[x0, y0, x1, y1]| Rect2::new(Point2::new(x0, y0), Point2::new(x1, y1)))
    }

    pub fn dash(&self) -> DashPattern {
        self.dash_pattern.map_or_else(DashPattern::default, |[on, off]| DashPattern { on, off })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_and_reject() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"workers": 3, "dash_pattern": [4, 2], "thresholds": {"iou_min": 0.9}}"#).unwrap();
        let c = Config::resolve(Some(&p)).unwrap();
        assert_eq!(c.workers, Some(3));
        assert_eq!(c.dash(), DashPattern { on: 4, off: 2 });
        assert_eq!(c.thresholds.iou_min, 0.9);
        assert_eq!(c.thresholds.chamfer_max_px, 1.5);
        std::fs::write(&p, r#"{"wrokers": 3}"#).unwrap();
        assert!(Config::load(&p).is_err());
        std::fs::write(&p, r#"{"window": [1, 0, 0, 1]}"#).unwrap();
        assert!(Config::load(&p).is_err());
    }
}
