use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PipelineError, PromptTemplate};
use crate::drawing::{rasterize_with, render_drawing_with, to_svg_string, DashPattern, RenderOptions, DEFAULT_RASTER_SIZE};
use crate::geometry::{load_mesh_auto, normalize_longest_edge, write_obj, LoadOptions, NORMALIZED_EXTENT};
use crate::metrics::consistency_check;
use crate::projection::StandardView;
use crate::reconstruct::SilhouetteSet;
use crate::shapes::random_corpus;

pub const SCHEMA_VERSION: &str = "1";

/// Consistency tolerance recorded for exact self-rendered silhouettes.
const SELF_CONSISTENCY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterFormat {
    Pgm,
    Png,
}

impl RasterFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RasterFormat::Pgm => "pgm",
            RasterFormat::Png => "png",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOptions {
    /// Worker threads; logical CPU count when unset.
    pub workers: Option<usize>,
    pub size: usize,
    pub format: RasterFormat,
    pub render: RenderOptions,
    pub dash: DashPattern,
    pub load: LoadOptions,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions {
            workers: None,
            size: DEFAULT_RASTER_SIZE,
            format: RasterFormat::Pgm,
            render: RenderOptions::default(),
            dash: DashPattern::default(),
            load: LoadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawingPaths {
    pub svg: String,
    pub raster: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryMetrics {
    pub vertices: usize,
    pub faces: usize,
    pub normalization_scale: f64,
    /// Visible and hidden stroke counts per view.
    pub visible_segments: BTreeMap<String, usize>,
    pub hidden_segments: BTreeMap<String, usize>,
    /// Whether the exact silhouettes agree across views at 1e-6.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub mesh_path: String,
    pub status: EntryStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub prompt: PromptTemplate,
    /// Paths relative to the manifest's directory, keyed by view name.
    #[serde(default)]
    pub drawings: BTreeMap<String, DrawingPaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<EntryMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub schema_version: String,
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, PipelineError> {
        let m: CorpusManifest = serde_json::from_str(s).map_err(|e| PipelineError::Manifest(e.to_string()))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(PipelineError::Manifest(format!("unsupported schema_version `{}`", m.schema_version)));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        CorpusManifest::from_json(&std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        std::fs::write(path, self.to_json()).map_err(|e| PipelineError::io(path, e))
    }

    /// Checks id uniqueness and that every referenced drawing exists under `base`.
    pub fn validate(&self, base: &Path) -> Result<(), PipelineError> {
        let mut ids = BTreeSet::new();
        for e in &self.entries {
            if !ids.insert(e.id.as_str()) {
                return Err(PipelineError::Manifest(format!("duplicate id `{}`", e.id)));
            }
            for p in e.drawings.values().flat_map(|d| [&d.svg, &d.raster]) {
                if !base.join(p).is_file() {
                    return Err(PipelineError::Manifest(format!("`{}` references missing file {p}", e.id)));
                }
            }
        }
        Ok(())
    }

    pub fn succeeded(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.status == EntryStatus::Ok)
    }
}

fn is_mesh_file(p: &Path) -> bool {
    p.is_file()
        && p.extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("obj") || e.eq_ignore_ascii_case("stl"))
}

/// OBJ and STL files directly inside `dir`, sorted by file name, with unique ids.
pub fn discover_meshes(dir: &Path) -> Result<Vec<(String, PathBuf)>, PipelineError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_mesh_file(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(PipelineError::NoMeshes(dir.to_path_buf()));
    }
    let stem = |p: &Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for f in &files {
        *counts.entry(stem(f)).or_default() += 1;
    }
    Ok(files
        .into_iter()
        .map(|f| {
            let s = stem(&f);
            let id = if counts[&s] > 1 {
                let ext = f.extension().map(|e| e.to_string_lossy().to_ascii_lowercase()).unwrap_or_default();
                format!("{s}_{ext}")
            } else {
                s
            };
            (id, f)
        })
        .collect())
}

fn process(id: &str, path: &Path, out_dir: &Path, opts: &DatasetOptions) -> Result<(BTreeMap<String, DrawingPaths>, EntryMetrics), PipelineError> {
    let raw = load_mesh_auto(path, opts.load)?;
    let (mesh, t) = normalize_longest_edge(&raw, NORMALIZED_EXTENT)?;
    let mut drawings = BTreeMap::new();
    let mut visible = BTreeMap::new();
    let mut hidden = BTreeMap::new();
    for view in StandardView::ALL {
        let d = render_drawing_with(&mesh, view, &opts.render)?;
        let name = view.as_str();
        let svg = format!("drawings/{id}_{name}.svg");
        let raster = format!("drawings/{id}_{name}.{}", opts.format.extension());
        let write = |rel: &str, bytes: &[u8]| {
            let p = out_dir.join(rel);
            std::fs::write(&p, bytes).map_err(|e| PipelineError::io(&p, e))
        };
        write(&svg, to_svg_string(&d).as_bytes())?;
        let r = rasterize_with(&d, opts.size, opts.dash);
        match opts.format {
            RasterFormat::Pgm => write(&raster, &r.to_pgm())?,
            RasterFormat::Png => write(&raster, &r.to_png()?)?,
        }
        let nv = d.visible().count();
        visible.insert(name.to_string(), nv);
        hidden.insert(name.to_string(), d.segments.len() - nv);
        drawings.insert(name.to_string(), DrawingPaths { svg, raster });
    }
    let consistent = SilhouetteSet::from_mesh(&mesh).map(|s| consistency_check(&s, SELF_CONSISTENCY_TOLERANCE).pass()).unwrap_or(false);
    let metrics = EntryMetrics {
        vertices: mesh.vertices().len(),
        faces: mesh.faces().len(),
        normalization_scale: t.scale(),
        visible_segments: visible,
        hidden_segments: hidden,
        consistent,
    };
    Ok((drawings, metrics))
}

/// Normalizes and renders every mesh in `corpus_dir` into `out_dir`, writing
/// `out_dir/manifest.json`. Per-mesh failures are recorded rather than raised.
pub fn build_dataset(corpus_dir: &Path, out_dir: &Path, opts: &DatasetOptions) -> Result<CorpusManifest, PipelineError> {
    let meshes = discover_meshes(corpus_dir)?;
    let drawings_dir = out_dir.join("drawings");
    std::fs::create_dir_all(&drawings_dir).map_err(|e| PipelineError::io(&drawings_dir, e))?;
    let workers = opts.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let mut entries: Vec<ManifestEntry> = pool.install(|| {
        meshes
            .par_iter()
            .map(|(id, path)| {
                let mesh_path = path.to_string_lossy().into_owned();
                match process(id, path, out_dir, opts) {
                    Ok((drawings, metrics)) => ManifestEntry {
                        id: id.clone(),
                        mesh_path,
                        status: EntryStatus::Ok,
                        error: None,
                        prompt: PromptTemplate::default(),
                        drawings,
                        metrics: Some(metrics),
                    },
                    Err(e) => ManifestEntry {
                        id: id.clone(),
                        mesh_path,
                        status: EntryStatus::Failed,
                        error: Some(e.to_string()),
                        prompt: PromptTemplate::default(),
                        drawings: BTreeMap::new(),
                        metrics: None,
                    },
                }
            })
            .collect()
    });
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let manifest = CorpusManifest { schema_version: SCHEMA_VERSION.to_string(), entries };
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Writes `count` seeded procedural meshes as OBJ files named `mesh_0000.obj`, ...
pub fn write_random_corpus(dir: &Path, seed: u64, count: usize) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    random_corpus(seed, count)
        .into_iter()
        .enumerate()
        .map(|(i, (_, m))| {
            let p = dir.join(format!("mesh_{i:04}.obj"));
            let mut buf = Vec::new();
            write_obj(&m, &mut buf).expect("writing to memory");
            std::fs::write(&p, buf).map_err(|e| PipelineError::io(&p, e))?;
            Ok(p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::write_obj;
    use crate::shapes::unit_cube;

    fn corpus(dir: &Path, bad: bool) {
        let mut buf = Vec::new();
        write_obj(&unit_cube(), &mut buf).unwrap();
        std::fs::write(dir.join("cube.obj"), buf).unwrap();
        if bad {
            std::fs::write(dir.join("broken.obj"), "v 0 0 0\nf 1 2 3\n").unwrap();
        }
        std::fs::write(dir.join("notes.txt"), "ignored").unwrap();
    }

    #[test]
    fn one_cube() {
        let (src, out) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        corpus(src.path(), false);
        let m = build_dataset(src.path(), out.path(), &DatasetOptions::default()).unwrap();
        assert_eq!(m.entries.len(), 1);
        let e = &m.entries[0];
        assert_eq!(e.status, EntryStatus::Ok);
        assert_eq!(e.drawings.len(), 4);
        assert_eq!(e.prompt.render(), super::super::DEFAULT_PROMPT_PREFIX);
        assert!(e.metrics.as_ref().unwrap().consistent);
        m.validate(out.path()).unwrap();
        let files = std::fs::read_dir(out.path().join("drawings")).unwrap().count();
        assert_eq!(files, 8);
    }

    #[test]
    fn failures_recorded_and_rerun_is_byte_identical() {
        let (src, out1, out2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        corpus(src.path(), true);
        let m = build_dataset(src.path(), out1.path(), &DatasetOptions { workers: Some(2), ..Default::default() }).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].id, "broken");
        assert_eq!(m.entries[0].status, EntryStatus::Failed);
        assert!(m.entries[0].error.is_some());
        assert_eq!(m.entries[1].status, EntryStatus::Ok);
        build_dataset(src.path(), out2.path(), &DatasetOptions { workers: Some(1), ..Default::default() }).unwrap();
        let a = std::fs::read(out1.path().join("manifest.json")).unwrap();
        let b = std::fs::read(out2.path().join("manifest.json")).unwrap();
        assert_eq!(a, b);
        let parsed = CorpusManifest::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
        assert_eq!(parsed.to_json().as_bytes(), &a[..]);
        assert!(CorpusManifest::from_json(r#"{"schema_version":"2","entries":[]}"#).is_err());
    }

    #[test]
    fn duplicate_stems_and_empty_dir() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(discover_meshes(dir.path()), Err(PipelineError::NoMeshes(_))));
        std::fs::write(dir.path().join("a.obj"), "").unwrap();
        std::fs::write(dir.path().join("a.STL"), "").unwrap();
        let ids: Vec<String> = discover_meshes(dir.path()).unwrap().into_iter().map(|(i, _)| i).collect();
        assert_eq!(ids, ["a_stl", "a_obj"]);
    }
}
