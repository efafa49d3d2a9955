//! Procedural meshes: the built-in test corpus and a seeded random corpus generator.
//!
//! Every generator returns a closed, consistently outward-wound mesh.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geometry::{rotate_z, TriMesh};
use crate::math::{Mat3, Point2, Vec3};
use crate::planar::{signed_area, triangulate_polygon};

fn mesh(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> TriMesh {
    TriMesh::new(vertices, faces).expect("generator produced an invalid mesh")
}

fn push_quad(faces: &mut Vec<[u32; 3]>, a: u32, b: u32, c: u32, d: u32) {
    faces.push([a, b, c]);
    faces.push([a, c, d]);
}

/// Axis-aligned box. Vertex `i` sits at the corner selected by the bits of `i` (x, y, z).
pub fn axis_box(min: Vec3, max: Vec3) -> TriMesh {
    let vertices = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { min.x } else { max.x },
                if i & 2 == 0 { min.y } else { max.y },
                if i & 4 == 0 { min.z } else { max.z },
            )
        })
        .collect();
    let mut faces = Vec::with_capacity(12);
    for q in [
        [0, 2, 3, 1],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 4, 6, 2],
        [1, 3, 7, 5],
    ] {
        push_quad(&mut faces, q[0], q[1], q[2], q[3]);
    }
    mesh(vertices, faces)
}

pub fn unit_cube() -> TriMesh {
    axis_box(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0))
}

/// Extrudes a simple counter-clockwise profile in the XY plane between `z0` and `z1`.
pub fn extrude_z(profile: &[Point2], z0: f64, z1: f64) -> TriMesh {
    assert!(profile.len() >= 3 && z1 > z0);
    let mut ring: Vec<Point2> = profile.to_vec();
    if signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    let n = ring.len() as u32;
    let mut vertices: Vec<Vec3> = ring.iter().map(|p| Vec3::new(p.x, p.y, z0)).collect();
    vertices.extend(ring.iter().map(|p| Vec3::new(p.x, p.y, z1)));
    let mut faces = Vec::new();
    for [a, b, c] in triangulate_polygon(&ring) {
        let (a, b, c) = (a as u32, b as u32, c as u32);
        faces.push([a + n, b + n, c + n]);
        faces.push([a, c, b]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        push_quad(&mut faces, i, j, j + n, i + n);
    }
    mesh(vertices, faces)
}

/// Cylinder along Z centered at the origin.
pub fn cylinder_z(radius: f64, height: f64, segments: usize) -> TriMesh {
    assert!(segments >= 3);
    let n = segments as u32;
    let (z0, z1) = (-height / 2.0, height / 2.0);
    let mut vertices = Vec::with_capacity(2 * segments + 2);
    for z in [z0, z1] {
        for k in 0..segments {
            let (s, c) = (TAU * k as f64 / segments as f64).sin_cos();
            vertices.push(Vec3::new(radius * c, radius * s, z));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, z0));
    vertices.push(Vec3::new(0.0, 0.0, z1));
    let (bc, tc) = (2 * n, 2 * n + 1);
    let mut faces = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        push_quad(&mut faces, k, k1, k1 + n, k + n);
        faces.push([tc, k + n, k1 + n]);
        faces.push([bc, k1, k]);
    }
    mesh(vertices, faces)
}

pub fn regular_polygon(radius: f64, sides: usize) -> Vec<Point2> {
    (0..sides)
        .map(|k| {
            let (s, c) = (TAU * k as f64 / sides as f64).sin_cos();
            Point2::new(radius * c, radius * s)
        })
        .collect()
}

/// Hexagonal prism along Z with a vertex on the +X axis.
pub fn hex_prism(radius: f64, height: f64) -> TriMesh {
    extrude_z(&regular_polygon(radius, 6), -height / 2.0, height / 2.0)
}

/// L-shaped profile in the XZ plane extruded along Y: a box with one upper corner block removed.
pub fn l_bracket(width: f64, height: f64, depth: f64, notch_w: f64, notch_h: f64) -> TriMesh {
    let (hw, hh) = (width / 2.0, height / 2.0);
    let profile = [
        Point2::new(-hw, -hh),
        Point2::new(hw, -hh),
        Point2::new(hw, hh - notch_h),
        Point2::new(hw - notch_w, hh - notch_h),
        Point2::new(hw - notch_w, hh),
        Point2::new(-hw, hh),
    ];
    into_xz_plane(&extrude_z(&profile, -depth / 2.0, depth / 2.0))
}

/// Maps the XY profile plane onto XZ (profile y → world z), sweeping the extrusion along Y.
fn into_xz_plane(m: &TriMesh) -> TriMesh {
    let r = Mat3::rotation_x(FRAC_PI_2);
    // Snap the ±1e-17 residue of cos(π/2) so axis-aligned inputs stay axis-aligned.
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    mesh(
        m.vertices()
            .iter()
            .map(|&v| {
                let p = r.mul_vec(v);
                Vec3::new(snap(p.x), snap(p.y), snap(p.z))
            })
            .collect(),
        m.faces().to_vec(),
    )
}

/// Square plate `[-half, half]²` in XZ with a cylindrical through-hole along Y.
/// `segments` must be a multiple of 8 so the square corners line up with hole vertices.
pub fn box_with_through_hole(half: f64, depth: f64, radius: f64, segments: usize) -> TriMesh {
    assert!(segments % 8 == 0 && radius < half);
    let n = segments as u32;
    let (z0, z1) = (-depth / 2.0, depth / 2.0);
    let mut hole = Vec::with_capacity(segments);
    let mut outer = Vec::with_capacity(segments);
    for k in 0..segments {
        let (s, c) = (TAU * k as f64 / segments as f64).sin_cos();
        let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        hole.push(Point2::new(snap(radius * c), snap(radius * s)));
        let (ac, as_) = (c.abs(), s.abs());
        let o = if (ac - as_).abs() < 1e-12 {
            Point2::new(half * c.signum(), half * s.signum())
        } else if ac > as_ {
            Point2::new(half * c.signum(), snap(half * s / ac))
        } else {
            Point2::new(snap(half * c / as_), half * s.signum())
        };
        outer.push(o);
    }
    // Vertex blocks: outer bottom, outer top, hole bottom, hole top.
    let mut vertices = Vec::with_capacity(4 * segments);
    for (ring, z) in [(&outer, z0), (&outer, z1), (&hole, z0), (&hole, z1)] {
        vertices.extend(ring.iter().map(|p| Vec3::new(p.x, p.y, z)));
    }
    let (ob, ot, hb, ht) = (0, n, 2 * n, 3 * n);
    let mut faces = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        push_quad(&mut faces, ht + k, ot + k, ot + k1, ht + k1);
        push_quad(&mut faces, hb + k, hb + k1, ob + k1, ob + k);
        push_quad(&mut faces, ob + k, ob + k1, ot + k1, ot + k);
        push_quad(&mut faces, hb + k1, hb + k, ht + k, ht + k1);
    }
    into_xz_plane(&mesh(vertices, faces))
}

pub fn uv_sphere(radius: f64, segments: usize, stacks: usize) -> TriMesh {
    assert!(segments >= 3 && stacks >= 2);
    let mut vertices = vec![Vec3::new(0.0, 0.0, radius)];
    for i in 1..stacks {
        let (sp, cp) = (PI * i as f64 / stacks as f64).sin_cos();
        for j in 0..segments {
            let (st, ct) = (TAU * j as f64 / segments as f64).sin_cos();
            vertices.push(Vec3::new(radius * sp * ct, radius * sp * st, radius * cp));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, -radius));
    let m = segments as u32;
    let ring = |i: usize, j: u32| 1 + (i as u32 - 1) * m + (j % m);
    let south = vertices.len() as u32 - 1;
    let mut faces = Vec::new();
    for j in 0..m {
        faces.push([ring(1, j), ring(1, j + 1), 0]);
        faces.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..m {
            let (up_j, up_j1) = (ring(i, j), ring(i, j + 1));
            let (lo_j, lo_j1) = (ring(i + 1, j), ring(i + 1, j + 1));
            push_quad(&mut faces, lo_j, lo_j1, up_j1, up_j);
        }
    }
    mesh(vertices, faces)
}

/// The five-model corpus used by the round-trip acceptance checks, un-normalized.
pub fn builtin_corpus() -> Vec<(&'static str, TriMesh)> {
    vec![
        ("cube", unit_cube()),
        ("box_with_hole", box_with_through_hole(1.0, 1.2, 0.5, 32)),
        ("l_bracket", l_bracket(2.0, 2.0, 1.0, 1.0, 1.0)),
        ("cylinder", cylinder_z(1.0, 2.0, 64)),
        ("hex_prism", hex_prism(1.0, 1.5)),
    ]
}

/// Seeded random meshes drawn from the corpus families with varied proportions.
pub fn random_corpus(seed: u64, count: usize) -> Vec<(String, TriMesh)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let family = rng.gen_range(0..5);
            let m = match family {
                0 => axis_box(
                    Vec3::ZERO,
                    Vec3::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)),
                ),
                1 => box_with_through_hole(1.0, rng.gen_range(0.4..1.8), rng.gen_range(0.2..0.7), 32),
                2 => {
                    let (w, h) = (rng.gen_range(1.0..2.0), rng.gen_range(1.0..2.0));
                    l_bracket(
                        w,
                        h,
                        rng.gen_range(0.4..1.6),
                        w * rng.gen_range(0.2..0.7),
                        h * rng.gen_range(0.2..0.7),
                    )
                }
                3 => cylinder_z(rng.gen_range(0.3..1.0), rng.gen_range(0.5..2.0), 8 * rng.gen_range(3..8)),
                _ => hex_prism(rng.gen_range(0.4..1.0), rng.gen_range(0.4..2.0)),
            };
            let quarter_turns = rng.gen_range(0..4);
            let m = if quarter_turns == 0 {
                m
            } else {
                rotate_z(&m, FRAC_PI_2 * quarter_turns as f64)
            };
            (format!("part_{i:04}"), m)
        })
        .collect()
}
