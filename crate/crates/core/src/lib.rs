//! Orthographic drawing generation, vectorization and visual-hull reconstruction for CAD meshes.

pub mod drawing;
pub mod geometry;
pub mod math;
pub mod metrics;
pub mod pipeline;
pub mod planar;
pub mod projection;
pub mod reconstruct;
pub mod shapes;
pub mod vectorize;
