use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::geom::cot_between;
use crate::scalar::Real;

/// How triangle area is distributed to its corners.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaScheme {
    /// One third of each incident triangle.
    #[default]
    BarycentricThird,
    /// Voronoi cell clipped to the triangle, with the obtuse-triangle fallback.
    MixedVoronoi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexAreas<T> {
    pub areas: Vec<T>,
    pub scheme: AreaScheme,
}

impl<T: Real> VertexAreas<T> {
    pub fn total(&self) -> T {
        self.areas.iter().copied().sum()
    }

    #[inline]
    pub fn get(&self, v: usize) -> T {
        self.areas[v]
    }
}

pub fn vertex_areas<T: Real>(mesh: &TriangleMesh<T>, scheme: AreaScheme) -> VertexAreas<T> {
    let mut areas = vec![T::zero(); mesh.vertex_count()];
    let third = T::one() / T::lit(3.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        match scheme {
            AreaScheme::BarycentricThird => {
                for &v in tri {
                    areas[v] = areas[v] + area * third;
                }
            }
            AreaScheme::MixedVoronoi => {
                for (v, share) in tri.iter().zip(mixed_shares(mesh, t, area)) {
                    areas[*v] = areas[*v] + share;
                }
            }
        }
    }
    VertexAreas { areas, scheme }
}

/// Mixed-area shares of triangle `t` for its three corners.
fn mixed_shares<T: Real>(mesh: &TriangleMesh<T>, t: usize, area: T) -> [T; 3] {
    let p = mesh.corners(t);
    let third = area / T::lit(3.0);
    let mut cots = [T::zero(); 3];
    for k in 0..3 {
        let a = p[k];
        let b = p[(k + 1) % 3];
        let c = p[(k + 2) % 3];
        match cot_between(b - a, c - a) {
            Some(c) => cots[k] = c,
            None => return [third; 3],
        }
    }
    // A negative cotangent marks the obtuse corner.
    if let Some(obtuse) = (0..3).find(|&k| cots[k] < T::zero()) {
        let mut s = [area / T::lit(4.0); 3];
        s[obtuse] = area * T::half();
        return s;
    }
    let eighth = T::lit(0.125);
    let mut s = [T::zero(); 3];
    for k in 0..3 {
        let a = p[k];
        let b = p[(k + 1) % 3];
        let c = p[(k + 2) % 3];
        // Edge a-b is opposite c, edge a-c is opposite b.
        s[k] = eighth * ((b - a).norm_squared() * cots[(k + 2) % 3] + (c - a).norm_squared() * cots[(k + 1) % 3]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::mesh::shapes;

    fn equilateral() -> TriangleMesh<f64> {
        TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn equilateral_thirds() {
        let a = vertex_areas(&equilateral(), AreaScheme::BarycentricThird);
        let want = 3f64.sqrt() / 4.0 / 3.0;
        for v in 0..3 {
            assert!((a.get(v) - want).abs() < 1e-15);
        }
        // Voronoi cells of an equilateral triangle are also equal thirds.
        let m = vertex_areas(&equilateral(), AreaScheme::MixedVoronoi);
        for v in 0..3 {
            assert!((m.get(v) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn tetrahedron_unit_edge() {
        let m = shapes::tetrahedron::<f64>(1.0);
        let a = vertex_areas(&m, AreaScheme::BarycentricThird);
        for v in 0..4 {
            assert!((a.get(v) - 3f64.sqrt() / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partitions_total_area() {
        let m = shapes::icosphere::<f64>(1.0, 3);
        let total = m.total_area();
        for scheme in [AreaScheme::BarycentricThird, AreaScheme::MixedVoronoi] {
            let a = vertex_areas(&m, scheme);
            assert!(a.areas.iter().all(|&x| x >= 0.0));
            assert!(((a.total() - total) / total).abs() < 1e-9);
        }
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!(((total - four_pi) / four_pi).abs() < 0.01);
    }

    #[test]
    fn obtuse_fallback() {
        let m = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.5, 0.1, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let a = vertex_areas(&m, AreaScheme::MixedVoronoi);
        let area: f64 = m.total_area();
        assert!((a.get(2) - area / 2.0).abs() < 1e-15);
        assert!((a.get(0) - area / 4.0).abs() < 1e-15);
    }
}
