use orthoforge::geometry::{normalize_longest_edge, TriMesh};
use orthoforge::math::{Point2, Vec3};
use orthoforge::planar::{dist_point_segment, polygons_contain, Polygon2D};
use orthoforge::reconstruct::{carve_visual_hull, detect_extrusion, voxelize_mesh, SilhouetteSet, VoxelGrid};
use orthoforge::shapes::{axis_box, builtin_corpus, l_bracket, random_corpus};
use proptest::prelude::*;

fn normalized(m: &TriMesh) -> TriMesh {
    normalize_longest_edge(m, 2.0).unwrap().0
}

fn corpus() -> Vec<(String, TriMesh)> {
    let mut v: Vec<(String, TriMesh)> = builtin_corpus().into_iter().map(|(n, m)| (n.to_string(), normalized(&m))).collect();
    v.extend(random_corpus(11, 12).into_iter().map(|(n, m)| (n, normalized(&m))));
    v
}

fn near_occupied(g: &VoxelGrid, x: usize, y: usize, z: usize) -> bool {
    let (x, y, z) = (x as i64, y as i64, z as i64);
    (-1..=1).any(|dx| (-1..=1).any(|dy| (-1..=1).any(|dz| g.get_signed(x + dx, y + dy, z + dz))))
}

/// Object voxels outside the hull, counting only those not adjacent to it.
fn superset_violations(m: &TriMesh, n: usize) -> usize {
    let hull = carve_visual_hull(&SilhouetteSet::from_mesh(m).unwrap(), n).unwrap();
    let obj = voxelize_mesh(m, n);
    let mut bad = 0;
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                if obj.get(x, y, z) && !hull.get(x, y, z) && !near_occupied(&hull, x, y, z) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

#[test]
fn hull_contains_object() {
    for (name, m) in corpus() {
        assert_eq!(superset_violations(&m, 64), 0, "{name}");
    }
}

fn boundary_distance(polys: &[Polygon2D], p: Point2) -> f64 {
    polys
        .iter()
        .flat_map(|q| q.rings().map(|r| r.to_vec()).collect::<Vec<_>>())
        .flat_map(|r| (0..r.len()).map(move |i| (r[i], r[(i + 1) % r.len()])))
        .map(|(a, b)| dist_point_segment(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn hull_reprojects_onto_silhouettes() {
    let n = 64;
    for (name, m) in corpus() {
        let s = SilhouetteSet::from_mesh(&m).unwrap();
        let g = carve_visual_hull(&s, n).unwrap();
        let band = g.voxel_size() * 2f64.sqrt();
        // (axis a, axis b, projected point, silhouette, occupancy along the remaining axis)
        let checks: [(&[Polygon2D], Box<dyn Fn(usize, usize) -> bool>, Box<dyn Fn(f64, f64) -> Point2>); 3] = [
            (&s.top, Box::new(|i, j| (0..n).any(|k| g.get(i, j, k))), Box::new(|x, y| Point2::new(x, -y))),
            (&s.front, Box::new(|i, j| (0..n).any(|k| g.get(i, k, j))), Box::new(|x, z| Point2::new(x, z))),
            (&s.side, Box::new(|i, j| (0..n).any(|k| g.get(k, i, j))), Box::new(|y, z| Point2::new(-y, z))),
        ];
        for (polys, column, map) in checks.iter() {
            for j in 0..n {
                for i in 0..n {
                    let p = map(g.center(i), g.center(j));
                    if column(i, j) != polygons_contain(polys, p) {
                        assert!(boundary_distance(polys, p) <= band, "{name} at {p:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn volume_converges_with_resolution() {
    for (name, m) in corpus().into_iter().take(8) {
        let s = SilhouetteSet::from_mesh(&m).unwrap();
        let area = m.surface_area();
        for n in [32, 64] {
            let a = carve_visual_hull(&s, n).unwrap();
            let b = carve_visual_hull(&s, 2 * n).unwrap();
            assert!((a.volume() - b.volume()).abs() < 6.0 * area * a.voxel_size(), "{name} at {n}");
        }
    }
}

#[test]
fn prisms_are_detected_as_extrusions() {
    for (name, m) in builtin_corpus() {
        let s = SilhouetteSet::from_mesh(&normalized(&m)).unwrap();
        let g = carve_visual_hull(&s, 128).unwrap();
        assert!(detect_extrusion(&g).is_some(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn random_boxes_and_brackets_stay_inside_hull(
        w in 0.5f64..2.0, h in 0.5f64..2.0, d in 0.5f64..2.0, nw in 0.2f64..0.8, nh in 0.2f64..0.8, bracket in any::<bool>()
    ) {
        let m = if bracket {
            l_bracket(w, h, d, w * nw, h * nh)
        } else {
            axis_box(Vec3::ZERO, Vec3::new(w, h, d))
        };
        prop_assert_eq!(superset_violations(&normalized(&m), 40), 0);
    }
}
