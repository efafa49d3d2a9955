use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ReconstructError, SilhouetteSet};
use crate::geometry::TriMesh;
use crate::math::{Point2, Vec3};
use crate::planar::{polygons_contain, BucketGrid, Polygon2D, Rect2};

/// Half-extent of the default reconstruction cube, matching the orthographic window.
pub const GRID_HALF_EXTENT: f64 = 1.2;

/// Occupancy over an `N`³ lattice; cell `(ix, iy, iz)` lives at index `(iz·N + iy)·N + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    resolution: usize,
    origin: Vec3,
    voxel_size: f64,
    occupancy: Vec<bool>,
}

impl VoxelGrid {
    /// Empty grid spanning `[-1.2, 1.2]³`.
    pub fn standard(resolution: usize) -> Self {
        assert!(resolution >= 8, "resolution must be at least 8");
        VoxelGrid {
            resolution,
            origin: Vec3::new(-GRID_HALF_EXTENT, -GRID_HALF_EXTENT, -GRID_HALF_EXTENT),
            voxel_size: 2.0 * GRID_HALF_EXTENT / resolution as f64,
            occupancy: vec![false; resolution.pow(3)],
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (iz * self.resolution + iy) * self.resolution + ix
    }

    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> bool {
        self.occupancy[self.index(ix, iy, iz)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, iz: usize, v: bool) {
        let i = self.index(ix, iy, iz);
        self.occupancy[i] = v;
    }

    /// `get` with out-of-range coordinates reading as empty.
    pub fn get_signed(&self, ix: i64, iy: i64, iz: i64) -> bool {
        let n = self.resolution as i64;
        (0..n).contains(&ix) && (0..n).contains(&iy) && (0..n).contains(&iz) && self.get(ix as usize, iy as usize, iz as usize)
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn center(&self, i: usize) -> f64 {
        self.origin.x + (i as f64 + 0.5) * self.voxel_size
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    pub fn volume(&self) -> f64 {
        self.occupied_count() as f64 * self.voxel_size.powi(3)
    }

    pub fn same_lattice(&self, o: &VoxelGrid) -> bool {
        self.resolution == o.resolution && self.origin == o.origin && self.voxel_size == o.voxel_size
    }

    /// Run-length encoding of occupied runs over the linear index.
    pub fn to_rle(&self) -> VoxelRle {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.occupancy.len() {
            if self.occupancy[i] {
                let start = i;
                while i < self.occupancy.len() && self.occupancy[i] {
                    i += 1;
                }
                runs.push([start, i - start]);
            } else {
                i += 1;
            }
        }
        VoxelRle {
            resolution: self.resolution,
            origin: self.origin.to_array(),
            voxel_size: self.voxel_size,
            runs,
        }
    }

    pub fn from_rle(r: &VoxelRle) -> Result<Self, ReconstructError> {
        let n3 = r.resolution.checked_pow(3).ok_or(ReconstructError::InvalidGrid("resolution overflow".into()))?;
        if r.resolution < 8 || !(r.voxel_size > 0.0) {
            return Err(ReconstructError::InvalidGrid("resolution < 8 or non-positive voxel size".into()));
        }
        let mut occupancy = vec![false; n3];
        for &[start, len] in &r.runs {
            let end = start.checked_add(len).filter(|&e| e <= n3).ok_or(ReconstructError::InvalidGrid("run out of range".into()))?;
            occupancy[start..end].iter_mut().for_each(|o| *o = true);
        }
        Ok(VoxelGrid {
            resolution: r.resolution,
            origin: Vec3::new(r.origin[0], r.origin[1], r.origin[2]),
            voxel_size: r.voxel_size,
            occupancy,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoxelRle {
    pub resolution: usize,
    pub origin: [f64; 3],
    pub voxel_size: f64,
    /// `[start, length]` pairs over the linear cell index.
    pub runs: Vec<[usize; 2]>,
}

/// Even-odd point-in-polygon mask on the `N`×`N` lattice of cell centres.
fn mask(polys: &[Polygon2D], g: &VoxelGrid, map: impl Fn(f64, f64) -> Point2 + Sync) -> Vec<bool> {
    let n = g.resolution();
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            polygons_contain(polys, map(g.center(i), g.center(j)))
        })
        .collect()
}

/// A centre is occupied iff `(x,−y)` lies in Top, `(x,z)` in Front and `(−y,z)` in Side.
pub fn carve_visual_hull(s: &SilhouetteSet, resolution: usize) -> Result<VoxelGrid, ReconstructError> {
    let mut g = VoxelGrid::standard(resolution);
    let n = resolution;
    // Lattice axes: top(ix, iy), front(ix, iz), side(iy, iz).
    let top = mask(&s.top, &g, |x, y| Point2::new(x, -y));
    let front = mask(&s.front, &g, |x, z| Point2::new(x, z));
    let side = mask(&s.side, &g, |y, z| Point2::new(-y, z));
    g.occupancy.par_chunks_mut(n * n).enumerate().for_each(|(iz, slab)| {
        for iy in 0..n {
            for ix in 0..n {
                slab[iy * n + ix] = top[iy * n + ix] && front[iz * n + ix] && side[iz * n + iy];
            }
        }
    });
    if g.occupied_count() == 0 {
        return Err(ReconstructError::EmptyIntersection);
    }
    Ok(g)
}

/// Inside/outside by ray parity along +X through each (y, z) cell centre.
pub fn voxelize_mesh(mesh: &TriMesh, resolution: usize) -> VoxelGrid {
    let mut g = VoxelGrid::standard(resolution);
    let n = resolution;
    // Irrational nudges keep rays off mesh edges and vertices.
    let (dy, dz) = (std::f64::consts::SQRT_2 * 1e-7, std::f64::consts::PI * 1e-7);
    let tris: Vec<[Vec3; 3]> = mesh.triangles().collect();
    let yz = |v: Vec3| Point2::new(v.y, v.z);
    let bounds = Rect2::from_points(tris.iter().flatten().map(|v| yz(*v)).collect::<Vec<_>>().iter())
        .unwrap_or(Rect2::centered(1.0));
    let mut index = BucketGrid::for_items(bounds, tris.len());
    for (i, t) in tris.iter().enumerate() {
        index.insert(i as u32, &Rect2::from_points(&t.map(yz)).unwrap());
    }
    let centers: Vec<f64> = (0..n).map(|i| g.center(i)).collect();
    g.occupancy.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
        let (iy, iz) = (row % n, row / n);
        let p = Point2::new(centers[iy] + dy, centers[iz] + dz);
        let mut cand = Vec::new();
        index.query(&Rect2::new(p, p), &mut cand);
        let mut hits: Vec<f64> = cand
            .iter()
            .filter_map(|&ti| {
                let t = &tris[ti as usize];
                let (a, b, c) = (yz(t[0]), yz(t[1]), yz(t[2]));
                let area = (b - a).cross(c - a);
                if area == 0.0 {
                    return None;
                }
                let l0 = (b - p).cross(c - p) / area;
                let l1 = (c - p).cross(a - p) / area;
                let l2 = 1.0 - l0 - l1;
                (l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0).then(|| l0 * t[0].x + l1 * t[1].x + l2 * t[2].x)
            })
            .collect();
        hits.sort_by(f64::total_cmp);
        for pair in hits.chunks_exact(2) {
            for (ix, cell) in line.iter_mut().enumerate() {
                let x = centers[ix];
                if x >= pair[0] && x < pair[1] {
                    *cell = true;
                }
            }
        }
    });
    g
}
