use crate::geom::{angle_between, cot_between, Vec3};
use crate::mesh::{OneRingTable, TriangleMesh, VertexAreas};
use crate::scalar::Real;

/// Angle-weighted average of incident face normals. Isolated or fully
/// degenerate vertices get the zero vector.
pub fn vertex_normals<T: Real>(mesh: &TriangleMesh<T>) -> Vec<Vec3<T>> {
    let mut acc = vec![Vec3::zero(); mesh.vertex_count()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.is_degenerate(t) {
            continue;
        }
        let Some(n) = mesh.face_normal(t) else { continue };
        let p = mesh.corners(t);
        for k in 0..3 {
            let a = p[k];
            let w = angle_between(p[(k + 1) % 3] - a, p[(k + 2) % 3] - a);
            acc[tri[k]] += n * w;
        }
    }
    acc.into_iter()
        .map(|v| v.normalized().unwrap_or_else(Vec3::zero))
        .collect()
}

/// Cotangent Laplace–Beltrami operator applied to the coordinates,
/// `Δx_i = 1/(2A_i) Σ_j (cot α_ij + cot β_ij)(x_j − x_i)`.
/// Vertices with zero area get the zero vector.
pub fn mean_curvature_normals<T: Real>(mesh: &TriangleMesh<T>, areas: &VertexAreas<T>) -> Vec<Vec3<T>> {
    let mut lap = vec![Vec3::zero(); mesh.vertex_count()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.is_degenerate(t) {
            continue;
        }
        let p = mesh.corners(t);
        for k in 0..3 {
            // Corner k is opposite edge (i, j).
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let Some(cot) = cot_between(p[i] - p[k], p[j] - p[k]) else {
                continue;
            };
            let e = (p[j] - p[i]) * cot;
            lap[tri[i]] += e;
            lap[tri[j]] -= e;
        }
    }
    lap.iter_mut().enumerate().for_each(|(v, l)| {
        let a = areas.get(v);
        *l = if a > T::zero() {
            *l / (T::two() * a)
        } else {
            Vec3::zero()
        };
    });
    lap
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanField<T> {
    /// Signed mean curvature, 1/m.
    pub values: Vec<T>,
    /// Outward vertex normals used for the sign.
    pub normals: Vec<Vec3<T>>,
    /// Open fan: value computed but unreliable.
    pub boundary: Vec<bool>,
    pub zero_area: Vec<bool>,
}

/// `|H| = ½‖Δx‖`, positive where the Laplacian points against the outward
/// normal (convex side), so an outward sphere has `H = 1/r`.
pub fn mean_field<T: Real>(mesh: &TriangleMesh<T>, rings: &OneRingTable, areas: &VertexAreas<T>) -> MeanField<T> {
    let lap = mean_curvature_normals(mesh, areas);
    let normals = vertex_normals(mesh);
    let values = lap
        .iter()
        .zip(&normals)
        .map(|(l, n)| {
            let mag = l.norm() * T::half();
            if l.dot(*n) > T::zero() {
                -mag
            } else {
                mag
            }
        })
        .collect();
    MeanField {
        values,
        normals,
        boundary: rings.boundary_flags().to_vec(),
        zero_area: areas.areas.iter().map(|&a| a <= T::zero()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_one_rings, shapes, vertex_areas, AreaScheme};

    fn mean(m: &TriangleMesh<f64>) -> MeanField<f64> {
        let r = build_one_rings(m).unwrap();
        mean_field(m, &r, &vertex_areas(m, AreaScheme::BarycentricThird))
    }

    #[test]
    fn sphere_positive_and_close() {
        let m = shapes::icosphere::<f64>(2.0, 4);
        let h = mean(&m);
        let avg = h.values.iter().sum::<f64>() / h.values.len() as f64;
        assert!(h.values.iter().all(|&x| x > 0.0));
        assert!((avg - 0.5).abs() < 0.01, "{avg}");
    }

    #[test]
    fn inverted_sphere_is_negative() {
        let m = shapes::icosphere::<f64>(1.0, 2);
        let flipped = TriangleMesh::new(
            m.vertices().to_vec(),
            m.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect(),
        )
        .unwrap();
        assert!(mean(&flipped).values.iter().all(|&x| x < 0.0));
    }

    #[test]
    fn plane_laplacian_vanishes() {
        let m = shapes::plane_grid::<f64>(5, 5, 0.2);
        let h = mean(&m);
        for (v, &x) in h.values.iter().enumerate() {
            if !h.boundary[v] {
                assert!(x.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn normals_point_out_on_sphere() {
        let m = shapes::icosphere::<f64>(1.0, 2);
        for (p, n) in m.vertices().iter().zip(vertex_normals(&m)) {
            assert!(p.dot(n) > 0.99);
        }
    }
}
