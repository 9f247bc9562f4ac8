use serde::Serialize;

use super::rings::{build_one_rings, edge_use_counts};
use super::TriangleMesh;
use crate::scalar::Real;

/// Vertices closer than this (m) are reported as duplicates.
pub const DUPLICATE_DISTANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub triangle_count: usize,
    pub edge_count: usize,
    pub boundary_edge_count: usize,
    pub euler_characteristic: i64,
    pub degenerate_triangles: Vec<usize>,
    pub non_manifold_edges: Vec<(usize, usize)>,
    pub duplicate_vertices: Vec<(usize, usize)>,
    /// Adjacency problem other than a non-manifold edge (bow-tie vertex,
    /// inconsistent orientation).
    pub adjacency_error: Option<String>,
}

impl ValidationReport {
    pub fn is_closed(&self) -> bool {
        self.boundary_edge_count == 0
    }

    pub fn is_manifold(&self) -> bool {
        self.non_manifold_edges.is_empty() && self.adjacency_error.is_none()
    }

    /// Manifold, no degenerate triangles, no duplicated vertices.
    pub fn is_valid(&self) -> bool {
        self.is_manifold() && self.degenerate_triangles.is_empty() && self.duplicate_vertices.is_empty()
    }
}

pub fn validate<T: Real>(mesh: &TriangleMesh<T>) -> ValidationReport {
    let degenerate_triangles = (0..mesh.triangle_count()).filter(|&t| mesh.is_degenerate(t)).collect();

    let counts = edge_use_counts(mesh.triangles());
    let mut non_manifold_edges: Vec<_> = counts.iter().filter(|(_, &c)| c > 2).map(|(&e, _)| e).collect();
    non_manifold_edges.sort_unstable();
    let boundary_edge_count = counts.values().filter(|&&c| c == 1).count();
    let edge_count = counts.len();

    let adjacency_error = if non_manifold_edges.is_empty() {
        build_one_rings(mesh).err().map(|e| e.to_string())
    } else {
        None
    };

    let euler_characteristic = mesh.vertex_count() as i64 - edge_count as i64 + mesh.triangle_count() as i64;

    ValidationReport {
        vertex_count: mesh.vertex_count(),
        triangle_count: mesh.triangle_count(),
        edge_count,
        boundary_edge_count,
        euler_characteristic,
        degenerate_triangles,
        non_manifold_edges,
        duplicate_vertices: duplicates(mesh),
        adjacency_error,
    }
}

fn duplicates<T: Real>(mesh: &TriangleMesh<T>) -> Vec<(usize, usize)> {
    let pts: Vec<[f64; 3]> = mesh
        .vertices()
        .iter()
        .map(|p| [p.x.to_f64_lossy(), p.y.to_f64_lossy(), p.z.to_f64_lossy()])
        .collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(a.cmp(&b)));
    let mut out = Vec::new();
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if pts[b][0] - pts[a][0] >= DUPLICATE_DISTANCE {
                break;
            }
            let d2: f64 = (0..3).map(|i| (pts[a][i] - pts[b][i]).powi(2)).sum();
            if d2 < DUPLICATE_DISTANCE * DUPLICATE_DISTANCE {
                out.push((a.min(b), a.max(b)));
            }
        }
    }
    out.sort_unstable();
    out
}
