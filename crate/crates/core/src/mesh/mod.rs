//! Indexed triangle meshes, adjacency, per-vertex areas and file I/O.

mod areas;
pub mod io;
mod rings;
pub mod shapes;
mod validate;

pub use areas::{vertex_areas, AreaScheme, VertexAreas};
pub use rings::{build_one_rings, OneRingTable};
pub use validate::{validate, ValidationReport};

use thiserror::Error;

use crate::geom::Vec3;
use crate::scalar::Real;

/// Triangles with an area below this (m²) are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Tolerance on the length of stored unit normals.
pub const NORMAL_UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangle {triangle} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("triangle {triangle} repeats vertex {index}")]
    RepeatedVertex { triangle: usize, index: usize },
    #[error("normal count {normals} does not match vertex count {vertices}")]
    NormalCount { normals: usize, vertices: usize },
    #[error("normal of vertex {vertex} is not unit length")]
    NormalNotUnit { vertex: usize },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFinite { vertex: usize },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction (inconsistent orientation)")]
    InconsistentOrientation(usize, usize),
    #[error("vertex {0} joins more than one triangle fan")]
    NonManifoldVertex(usize),
}

/// Indexed triangle surface. Positions are in meters; triangles are
/// counter-clockwise seen from outside.
///
/// Construction checks index range and repeated corners; degenerate
/// triangles are allowed and surface through [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh<T> {
    vertices: Vec<Vec3<T>>,
    triangles: Vec<[usize; 3]>,
    normals: Option<Vec<Vec3<T>>>,
}

impl<T: Real> TriangleMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = vertices.len();
        for (v, p) in vertices.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFinite { vertex: v });
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= n {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        vertex_count: n,
                    });
                }
            }
            if tri[0] == tri[1] || tri[0] == tri[2] {
                return Err(MeshError::RepeatedVertex {
                    triangle: t,
                    index: tri[0],
                });
            }
            if tri[1] == tri[2] {
                return Err(MeshError::RepeatedVertex {
                    triangle: t,
                    index: tri[1],
                });
            }
        }
        Ok(Self {
            vertices,
            triangles,
            normals: None,
        })
    }

    /// Attaches per-vertex unit normals.
    pub fn with_normals(mut self, normals: Vec<Vec3<T>>) -> Result<Self, MeshError> {
        if normals.len() != self.vertices.len() {
            return Err(MeshError::NormalCount {
                normals: normals.len(),
                vertices: self.vertices.len(),
            });
        }
        let tol = T::lit(NORMAL_UNIT_TOLERANCE);
        if let Some(v) = normals.iter().position(|n| (n.norm() - T::one()).abs() > tol) {
            return Err(MeshError::NormalNotUnit { vertex: v });
        }
        self.normals = Some(normals);
        Ok(self)
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec3<T>] {
        &self.vertices
    }

    #[inline]
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> Option<&[Vec3<T>]> {
        self.normals.as_deref()
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Vec3<T>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.corners(t);
        (b - a).cross(c - a).norm() * T::half()
    }

    pub fn total_area(&self) -> T {
        (0..self.triangle_count()).map(|t| self.triangle_area(t)).sum()
    }

    /// Unit normal of triangle `t`, `None` when degenerate.
    pub fn face_normal(&self, t: usize) -> Option<Vec3<T>> {
        let [a, b, c] = self.corners(t);
        (b - a).cross(c - a).normalized()
    }

    pub fn is_degenerate(&self, t: usize) -> bool {
        self.triangle_area(t).to_f64_lossy() < DEGENERATE_AREA
    }

    /// Same connectivity, new positions. Drops normals.
    pub fn with_positions(&self, vertices: Vec<Vec3<T>>) -> Result<Self, MeshError> {
        assert_eq!(vertices.len(), self.vertices.len(), "position count must match");
        Self::new(vertices, self.triangles.clone())
    }

    /// Applies `f` to every position, keeping connectivity.
    pub fn map_positions(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            triangles: self.triangles.clone(),
            normals: None,
        }
    }

    pub fn same_connectivity(&self, other: &Self) -> bool {
        self.vertices.len() == other.vertices.len() && self.triangles == other.triangles
    }

    /// Axis-aligned bounds `(min, max)`; `None` for an empty mesh.
    pub fn bounds(&self) -> Option<(Vec3<T>, Vec3<T>)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }

    pub fn cast<U: Real>(&self) -> TriangleMesh<U> {
        TriangleMesh {
            vertices: self.vertices.iter().map(|p| p.cast()).collect(),
            triangles: self.triangles.clone(),
            normals: self.normals.as_ref().map(|ns| ns.iter().map(|n| n.cast()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Vec<Vec3<f64>> {
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn rejects_out_of_range() {
        let err = TriangleMesh::new(tri(), vec![[0, 1, 8]]).unwrap_err();
        assert!(matches!(err, MeshError::IndexOutOfRange { index: 8, .. }));
    }

    #[test]
    fn rejects_repeated_corner() {
        let err = TriangleMesh::new(tri(), vec![[0, 1, 1]]).unwrap_err();
        assert!(matches!(err, MeshError::RepeatedVertex { .. }));
    }

    #[test]
    fn normals_must_be_unit() {
        let m = TriangleMesh::new(tri(), vec![[0, 1, 2]]).unwrap();
        let bad = vec![Vec3::new(0.0, 0.0, 1.1); 3];
        assert!(matches!(
            m.clone().with_normals(bad),
            Err(MeshError::NormalNotUnit { vertex: 0 })
        ));
        let ok = vec![Vec3::new(0.0, 0.0, 1.0); 3];
        assert!(m.with_normals(ok).unwrap().normals().is_some());
    }

    #[test]
    fn area_and_normal() {
        let m = TriangleMesh::new(tri(), vec![[0, 1, 2]]).unwrap();
        assert!((m.total_area() - 0.5).abs() < 1e-15);
        assert_eq!(m.face_normal(0).unwrap(), Vec3::new(0.0, 0.0, 1.0));
    }
}
