use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::math::{Mat3, Vec3};

/// Indexed triangle mesh.
///
/// Construction through [`TriMesh::new`] checks that every face references existing
/// vertices, that no face repeats an index and that all coordinates are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> Result<Self, GeometryError> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFiniteVertex(i));
        }
        let n = vertices.len() as u64;
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i as u64 >= n) {
                return Err(GeometryError::InvalidFace {
                    face: fi,
                    reason: format!("index out of range for {n} vertices"),
                });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeometryError::InvalidFace {
                    face: fi,
                    reason: "repeated vertex index".into(),
                });
            }
        }
        Ok(TriMesh { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let f = self.faces[face];
        [
            self.vertices[f[0] as usize],
            self.vertices[f[1] as usize],
            self.vertices[f[2] as usize],
        ]
    }

    pub fn triangles(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        (0..self.faces.len()).map(move |i| self.triangle(i))
    }

    /// Unnormalized face normal (length = twice the triangle area).
    pub fn face_normal(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        (b - a).cross(c - a)
    }

    /// Signed enclosed volume; positive for closed meshes with outward winding.
    pub fn signed_volume(&self) -> f64 {
        self.triangles()
            .map(|[a, b, c]| a.dot(b.cross(c)) / 6.0)
            .sum()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len())
            .map(|i| self.face_normal(i).norm() * 0.5)
            .sum()
    }

    /// True when every directed edge appears exactly once and its reverse exactly once.
    pub fn is_closed_manifold(&self) -> bool {
        use std::collections::HashMap;
        let mut directed: HashMap<(u32, u32), u32> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &count)| count == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Concatenates two meshes without merging vertices.
    pub fn merged(&self, other: &TriMesh) -> TriMesh {
        let offset = self.vertices.len() as u32;
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| [f[0] + offset, f[1] + offset, f[2] + offset]));
        TriMesh { vertices, faces }
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points(points: &[Vec3]) -> Option<Aabb> {
        let first = *points.first()?;
        let (min, max) = points
            .iter()
            .fold((first, first), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        Some(Aabb { min, max })
    }

    pub fn extents(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn max_extent(&self) -> f64 {
        self.extents().max_component()
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.y >= self.min.y - tol
            && p.z >= self.min.z - tol
            && p.x <= self.max.x + tol
            && p.y <= self.max.y + tol
            && p.z <= self.max.z + tol
    }
}

/// `v ↦ scale · (rotation · v) + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidScaleTransform {
    rotation: Mat3,
    translation: Vec3,
    scale: f64,
}

impl RigidScaleTransform {
    pub const IDENTITY: RigidScaleTransform = RigidScaleTransform {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
        scale: 1.0,
    };

    pub fn new(rotation: Mat3, translation: Vec3, scale: f64) -> Result<Self, GeometryError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(GeometryError::InvalidTransform(format!("scale {scale} is not positive")));
        }
        let err = rotation.orthonormality_error();
        if !(err <= 1e-9) {
            return Err(GeometryError::InvalidTransform(format!(
                "rotation is not orthonormal (error {err:e})"
            )));
        }
        if !translation.is_finite() {
            return Err(GeometryError::InvalidTransform("non-finite translation".into()));
        }
        Ok(RigidScaleTransform { rotation, translation, scale })
    }

    pub fn rotation(rotation: Mat3) -> Result<Self, GeometryError> {
        Self::new(rotation, Vec3::ZERO, 1.0)
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.rotation.mul_vec(v) * self.scale + self.translation
    }
}

pub fn aabb(mesh: &TriMesh) -> Result<Aabb, GeometryError> {
    if mesh.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    // Only referenced vertices count toward the bounds.
    let mut used = vec![false; mesh.vertices.len()];
    for f in &mesh.faces {
        for &i in f {
            used[i as usize] = true;
        }
    }
    let pts: Vec<Vec3> = mesh
        .vertices
        .iter()
        .zip(&used)
        .filter_map(|(v, &u)| u.then_some(*v))
        .collect();
    Aabb::from_points(&pts).ok_or(GeometryError::EmptyMesh)
}

/// Uniformly scales and translates the mesh so its bounding box is centered at the
/// origin with its largest extent equal to `target`.
pub fn normalize_longest_edge(
    mesh: &TriMesh,
    target: f64,
) -> Result<(TriMesh, RigidScaleTransform), GeometryError> {
    let bounds = aabb(mesh)?;
    let extent = bounds.max_extent();
    if !(extent > 0.0) {
        return Err(GeometryError::DegenerateMesh);
    }
    let scale = target / extent;
    let translation = -(bounds.center() * scale);
    let t = RigidScaleTransform::new(Mat3::IDENTITY, translation, scale)?;
    // Apply as (v - c) * s so an already-normalized mesh maps onto itself exactly.
    let center = bounds.center();
    let vertices = mesh.vertices.iter().map(|&v| (v - center) * scale).collect();
    Ok((
        TriMesh {
            vertices,
            faces: mesh.faces.clone(),
        },
        t,
    ))
}

pub fn transform_mesh(mesh: &TriMesh, t: &RigidScaleTransform) -> TriMesh {
    TriMesh {
        vertices: mesh.vertices.iter().map(|&v| t.apply(v)).collect(),
        faces: mesh.faces.clone(),
    }
}

/// Mirrors the mesh through the YZ plane, flipping winding to keep normals outward.
pub fn reflect_mesh_x(mesh: &TriMesh) -> TriMesh {
    TriMesh {
        vertices: mesh
            .vertices
            .iter()
            .map(|v| Vec3::new(-v.x, v.y, v.z))
            .collect(),
        faces: mesh.faces.iter().map(|f| [f[0], f[2], f[1]]).collect(),
    }
}

/// Rotates the mesh about the world Z axis by `angle` radians.
pub fn rotate_z(mesh: &TriMesh, angle: f64) -> TriMesh {
    let r = Mat3::rotation_z(angle);
    TriMesh {
        vertices: mesh.vertices.iter().map(|&v| r.mul_vec(v)).collect(),
        faces: mesh.faces.clone(),
    }
}

/// Scales the mesh about the origin independently per axis. Negative determinants flip winding.
pub fn scale_axes(mesh: &TriMesh, s: Vec3) -> TriMesh {
    let flip = s.x * s.y * s.z < 0.0;
    TriMesh {
        vertices: mesh
            .vertices
            .iter()
            .map(|v| Vec3::new(v.x * s.x, v.y * s.y, v.z * s.z))
            .collect(),
        faces: mesh
            .faces
            .iter()
            .map(|f| if flip { [f[0], f[2], f[1]] } else { *f })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn box_mesh(min: Vec3, max: Vec3) -> TriMesh {
        crate::shapes::axis_box(min, max)
    }

    fn assert_close(a: Vec3, b: Vec3, tol: f64) {
        assert!((a - b).norm() <= tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn rejects_out_of_range_and_repeated_indices() {
        let v = vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 1]]).is_err());
        assert!(TriMesh::new(v, vec![[0, 1, 2]]).is_ok());
    }

    #[test]
    fn aabb_of_single_triangle() {
        let m = TriMesh::new(
            vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let b = aabb(&m).unwrap();
        assert_eq!(b.min, Vec3::ZERO);
        assert_eq!(b.max, Vec3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn aabb_of_unit_cube_and_empty_mesh() {
        let cube = box_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
        let b = aabb(&cube).unwrap();
        assert_eq!(b.min, Vec3::ZERO);
        assert_eq!(b.max, Vec3::new(1.0, 1.0, 1.0));
        let empty = TriMesh::new(vec![Vec3::ZERO], vec![]).unwrap();
        assert!(matches!(aabb(&empty), Err(GeometryError::EmptyMesh)));
    }

    #[test]
    fn normalize_cube_0_to_4() {
        let cube = box_mesh(Vec3::ZERO, Vec3::new(4.0, 4.0, 4.0));
        let (n, t) = normalize_longest_edge(&cube, 2.0).unwrap();
        let b = aabb(&n).unwrap();
        assert_close(b.min, Vec3::new(-1.0, -1.0, -1.0), 1e-12);
        assert_close(b.max, Vec3::new(1.0, 1.0, 1.0), 1e-12);
        for (src, dst) in cube.vertices().iter().zip(n.vertices()) {
            assert_close(t.apply(*src), *dst, 1e-12);
        }
    }

    #[test]
    fn normalize_box_1_2_8() {
        let b = box_mesh(Vec3::ZERO, Vec3::new(1.0, 2.0, 8.0));
        let (n, _) = normalize_longest_edge(&b, 2.0).unwrap();
        let bb = aabb(&n).unwrap();
        assert_close(bb.extents(), Vec3::new(0.25, 0.5, 2.0), 1e-12);
        assert_close(bb.center(), Vec3::ZERO, 1e-12);
    }

    #[test]
    fn normalize_degenerate_mesh_fails() {
        let p = Vec3::new(1.0, 1.0, 1.0);
        // TriMesh::new forbids repeated indices but not coincident vertices.
        let m = TriMesh::new(vec![p, p, p], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(
            normalize_longest_edge(&m, 2.0),
            Err(GeometryError::DegenerateMesh)
        ));
    }

    #[test]
    fn transform_examples() {
        let cube = box_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
        assert_eq!(transform_mesh(&cube, &RigidScaleTransform::IDENTITY), cube);

        let rot = RigidScaleTransform::rotation(Mat3::rotation_z(std::f64::consts::FRAC_PI_2)).unwrap();
        assert_close(rot.apply(Vec3::new(1.0, 0.0, 0.0)), Vec3::new(0.0, 1.0, 0.0), 1e-15);

        let half = RigidScaleTransform::new(Mat3::IDENTITY, Vec3::ZERO, 0.5).unwrap();
        let b = aabb(&transform_mesh(&cube, &half)).unwrap();
        assert_close(b.extents(), Vec3::new(0.5, 0.5, 0.5), 1e-15);
    }

    #[test]
    fn transform_rejects_bad_parameters() {
        assert!(RigidScaleTransform::new(Mat3::IDENTITY, Vec3::ZERO, 0.0).is_err());
        let skew = Mat3 {
            rows: [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
        assert!(RigidScaleTransform::new(skew, Vec3::ZERO, 1.0).is_err());
    }

    #[test]
    fn reflect_examples() {
        let m = TriMesh::new(
            vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let r = reflect_mesh_x(&m);
        assert_eq!(r.vertices()[0], Vec3::new(-1.0, 2.0, 3.0));
        assert_eq!(reflect_mesh_x(&r), m);

        let cube = box_mesh(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0));
        let rc = reflect_mesh_x(&cube);
        assert!(rc.is_closed_manifold());
        assert!((rc.signed_volume() - cube.signed_volume()).abs() < 1e-12);
        assert_eq!(aabb(&rc).unwrap(), aabb(&cube).unwrap());
    }

    fn arb_mesh() -> impl Strategy<Value = TriMesh> {
        prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0), 3..40).prop_flat_map(
            |pts| {
                let n = pts.len() as u32;
                let faces = prop::collection::vec((0..n, 0..n, 0..n), 1..30);
                (Just(pts), faces)
            },
        )
        .prop_filter_map("needs valid faces and extent", |(pts, faces)| {
            let vertices: Vec<Vec3> = pts.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
            let faces: Vec<[u32; 3]> = faces
                .into_iter()
                .filter(|(a, b, c)| a != b && b != c && a != c)
                .map(|(a, b, c)| [a, b, c])
                .collect();
            let m = TriMesh::new(vertices, faces).ok()?;
            (aabb(&m).ok()?.max_extent() > 1e-3).then_some(m)
        })
    }

    proptest! {
        #[test]
        fn normalization_postconditions_and_idempotence(m in arb_mesh()) {
            let (once, _) = normalize_longest_edge(&m, 2.0).unwrap();
            let b = aabb(&once).unwrap();
            prop_assert!((b.max_extent() - 2.0).abs() <= 1e-9);
            prop_assert!(b.center().norm() <= 1e-9);
            let (twice, _) = normalize_longest_edge(&once, 2.0).unwrap();
            for (a, b) in once.vertices().iter().zip(twice.vertices()) {
                prop_assert!((*a - *b).norm() <= 1e-9);
            }
        }

        #[test]
        fn reflection_is_an_involution(m in arb_mesh()) {
            prop_assert_eq!(reflect_mesh_x(&reflect_mesh_x(&m)), m);
        }
    }
}
