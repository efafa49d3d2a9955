//! Mesh data model, OBJ/STL parsing and the normalization transform.

mod mesh;
mod obj;
mod stl;

use std::fmt;
use std::path::Path;

pub use mesh::{
    aabb, normalize_longest_edge, reflect_mesh_x, rotate_z, scale_axes, transform_mesh, Aabb,
    RigidScaleTransform, TriMesh,
};
pub use obj::{parse_obj, write_obj};
pub(crate) use stl::Welder;
pub use stl::{parse_stl_ascii, parse_stl_binary, write_stl_ascii, write_stl_binary};

/// Longest-extent target used for every model before rendering.
pub const NORMALIZED_EXTENT: f64 = 2.0;

/// Distance under which STL vertices are merged when deduplication is requested.
pub const DEDUP_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseLocation {
    Line(usize),
    Offset(usize),
}

impl fmt::Display for ParseLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseLocation::Line(l) => write!(f, "line {l}"),
            ParseLocation::Offset(o) => write!(f, "byte offset {o}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("parse error at {at}: {message}")]
    Parse { at: ParseLocation, message: String },
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("mesh is degenerate: all points coincide")]
    DegenerateMesh,
    #[error("invalid face {face}: {reason}")]
    InvalidFace { face: usize, reason: String },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("unknown mesh format for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GeometryError {
    pub(crate) fn at_line(line: usize, message: impl Into<String>) -> Self {
        GeometryError::Parse {
            at: ParseLocation::Line(line),
            message: message.into(),
        }
    }

    pub(crate) fn at_offset(offset: usize, message: impl Into<String>) -> Self {
        GeometryError::Parse {
            at: ParseLocation::Offset(offset),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    StlAscii,
    StlBinary,
}

impl MeshFormat {
    /// Picks a format from the file extension, sniffing STL content to tell ASCII from binary.
    pub fn detect(path: &Path, bytes: &[u8]) -> Result<MeshFormat, GeometryError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("obj") => Ok(MeshFormat::Obj),
            Some("stl") => Ok(if stl::looks_ascii(bytes) {
                MeshFormat::StlAscii
            } else {
                MeshFormat::StlBinary
            }),
            _ => Err(GeometryError::UnknownFormat(path.display().to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Merge STL vertices closer than [`DEDUP_TOLERANCE`].
    pub dedup: bool,
}

pub fn load_mesh(path: &Path, format: MeshFormat, options: LoadOptions) -> Result<TriMesh, GeometryError> {
    let bytes = std::fs::read(path)?;
    parse_mesh(&bytes, format, options)
}

/// Loads a mesh, inferring the format from the extension.
pub fn load_mesh_auto(path: &Path, options: LoadOptions) -> Result<TriMesh, GeometryError> {
    let bytes = std::fs::read(path)?;
    let format = MeshFormat::detect(path, &bytes)?;
    parse_mesh(&bytes, format, options)
}

pub fn parse_mesh(bytes: &[u8], format: MeshFormat, options: LoadOptions) -> Result<TriMesh, GeometryError> {
    let mesh = match format {
        MeshFormat::Obj => {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| GeometryError::at_offset(e.valid_up_to(), "invalid UTF-8"))?;
            parse_obj(text)?
        }
        MeshFormat::StlAscii => {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| GeometryError::at_offset(e.valid_up_to(), "invalid UTF-8"))?;
            parse_stl_ascii(text, options.dedup)?
        }
        MeshFormat::StlBinary => parse_stl_binary(bytes, options.dedup)?,
    };
    if mesh.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    Ok(mesh)
}
