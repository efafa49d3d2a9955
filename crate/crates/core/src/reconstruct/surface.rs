use std::collections::HashMap;

use super::{ReconstructError, VoxelGrid};
use crate::geometry::TriMesh;
use crate::math::Vec3;

/// Exposed voxel faces as quads over shared lattice corners, wound outward.
pub fn voxels_to_mesh(g: &VoxelGrid) -> Result<TriMesh, ReconstructError> {
    if g.occupied_count() == 0 {
        return Err(ReconstructError::EmptyGrid);
    }
    let n = g.resolution();
    let m = n + 1;
    let mut ids = vec![u32::MAX; m * m * m];
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let o = g.origin();
    let vs = g.voxel_size();
    let mut vertex = |c: [usize; 3], vertices: &mut Vec<Vec3>| {
        let k = (c[2] * m + c[1]) * m + c[0];
        if ids[k] == u32::MAX {
            ids[k] = vertices.len() as u32;
            vertices.push(Vec3::new(o.x + c[0] as f64 * vs, o.y + c[1] as f64 * vs, o.z + c[2] as f64 * vs));
        }
        ids[k]
    };
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                if !g.get(ix, iy, iz) {
                    continue;
                }
                let cell = [ix, iy, iz];
                for a in 0..3 {
                    for positive in [false, true] {
                        let mut nb = cell.map(|c| c as i64);
                        nb[a] += if positive { 1 } else { -1 };
                        if g.get_signed(nb[0], nb[1], nb[2]) {
                            continue;
                        }
                        let (u, v) = ((a + 1) % 3, (a + 2) % 3);
                        let mut c0 = cell;
                        if positive {
                            c0[a] += 1;
                        }
                        let mut cu = c0;
                        cu[u] += 1;
                        let mut cv = c0;
                        cv[v] += 1;
                        let mut cuv = cu;
                        cuv[v] += 1;
                        let mut q = [c0, cu, cuv, cv].map(|c| vertex(c, &mut vertices));
                        if !positive {
                            q.reverse();
                        }
                        faces.push([q[0], q[1], q[2]]);
                        faces.push([q[0], q[2], q[3]]);
                    }
                }
            }
        }
    }
    Ok(TriMesh::new(vertices, faces).expect("lattice faces are valid"))
}

const TETS: [[usize; 4]; 6] = [[0, 1, 3, 7], [0, 3, 2, 7], [0, 2, 6, 7], [0, 6, 4, 7], [0, 4, 5, 7], [0, 5, 1, 7]];

/// Marching-tetrahedra isosurface at 0.5 of the 3×3×3 box-filtered occupancy.
pub fn voxels_to_mesh_smooth(g: &VoxelGrid) -> Result<TriMesh, ReconstructError> {
    if g.occupied_count() == 0 {
        return Err(ReconstructError::EmptyGrid);
    }
    let n = g.resolution();
    let p = n + 2;
    let idx = |x: usize, y: usize, z: usize| (z * p + y) * p + x;
    let mut f = vec![0.0f64; p * p * p];
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                if g.get(x, y, z) {
                    f[idx(x + 1, y + 1, z + 1)] = 1.0;
                }
            }
        }
    }
    for axis in 0..3 {
        let src = f.clone();
        for z in 0..p {
            for y in 0..p {
                for x in 0..p {
                    let c = [x, y, z];
                    let mut s = 0.0;
                    for d in [-1i64, 0, 1] {
                        let mut q = c.map(|v| v as i64);
                        q[axis] += d;
                        if q.iter().all(|&v| v >= 0 && (v as usize) < p) {
                            s += src[idx(q[0] as usize, q[1] as usize, q[2] as usize)];
                        }
                    }
                    f[idx(x, y, z)] = s / 3.0;
                }
            }
        }
    }
    let o = g.origin();
    let vs = g.voxel_size();
    let pos = |x: usize, y: usize, z: usize| {
        Vec3::new(o.x + (x as f64 - 0.5) * vs, o.y + (y as f64 - 0.5) * vs, o.z + (z as f64 - 0.5) * vs)
    };
    let mut vertices = Vec::new();
    let mut edge_ids: HashMap<(usize, usize), u32> = HashMap::new();
    let mut faces = Vec::new();
    for z in 0..p - 1 {
        for y in 0..p - 1 {
            for x in 0..p - 1 {
                let corners: [(usize, Vec3); 8] = std::array::from_fn(|b| {
                    let (cx, cy, cz) = (x + (b & 1), y + ((b >> 1) & 1), z + ((b >> 2) & 1));
                    (idx(cx, cy, cz), pos(cx, cy, cz))
                });
                for tet in TETS {
                    let c = tet.map(|b| corners[b]);
                    let inside: Vec<usize> = (0..4).filter(|&k| f[c[k].0] > 0.5).collect();
                    if inside.is_empty() || inside.len() == 4 {
                        continue;
                    }
                    let outside: Vec<usize> = (0..4).filter(|k| !inside.contains(k)).collect();
                    let mut cross = |a: usize, b: usize| {
                        let (ia, ib) = (c[a].0, c[b].0);
                        let key = (ia.min(ib), ia.max(ib));
                        *edge_ids.entry(key).or_insert_with(|| {
                            let t = (0.5 - f[ia]) / (f[ib] - f[ia]);
                            vertices.push(c[a].1.lerp(c[b].1, t));
                            (vertices.len() - 1) as u32
                        })
                    };
                    let ring: Vec<u32> = match (inside.len(), outside.len()) {
                        (1, 3) => outside.iter().map(|&b| cross(inside[0], b)).collect(),
                        (3, 1) => inside.iter().map(|&a| cross(a, outside[0])).collect(),
                        _ => {
                            let (a, b, cc, d) = (inside[0], inside[1], outside[0], outside[1]);
                            vec![cross(a, cc), cross(a, d), cross(b, d), cross(b, cc)]
                        }
                    };
                    let inner = inside.iter().fold(Vec3::ZERO, |s, &k| s + c[k].1) * (1.0 / inside.len() as f64);
                    let mut emit = |t: [u32; 3]| {
                        let [a, b, cc] = t.map(|i| vertices[i as usize]);
                        let nrm = (b - a).cross(cc - a);
                        let centroid = (a + b + cc) * (1.0 / 3.0);
                        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                            return;
                        }
                        faces.push(if nrm.dot(centroid - inner) < 0.0 { [t[0], t[2], t[1]] } else { t });
                    };
                    emit([ring[0], ring[1], ring[2]]);
                    if ring.len() == 4 {
                        emit([ring[0], ring[2], ring[3]]);
                    }
                }
            }
        }
    }
    Ok(TriMesh::new(vertices, faces).expect("isosurface faces are valid"))
}
