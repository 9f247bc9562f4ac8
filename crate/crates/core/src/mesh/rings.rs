use std::collections::HashMap;

use super::{MeshError, TriangleMesh};
use crate::scalar::Real;

/// Per-vertex ordered one-ring: neighbors and incident triangles follow the
/// triangle winding around the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneRingTable {
    neighbors: Vec<Vec<usize>>,
    triangles: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

impl OneRingTable {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn incident_triangles(&self, v: usize) -> &[usize] {
        &self.triangles[v]
    }

    /// True when the triangle fan around `v` is open.
    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// True when no triangle references `v`.
    pub fn is_isolated(&self, v: usize) -> bool {
        self.triangles[v].is_empty()
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }
}

/// Undirected edge key with the smaller index first.
#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Counts triangles per undirected edge.
pub(crate) fn edge_use_counts(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), u32> {
    let mut counts = HashMap::with_capacity(triangles.len() * 3 / 2 + 1);
    for t in triangles {
        for k in 0..3 {
            *counts.entry(edge_key(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    counts
}

/// Builds the ordered one-ring table of a manifold, consistently oriented mesh.
pub fn build_one_rings<T: Real>(mesh: &TriangleMesh<T>) -> Result<OneRingTable, MeshError> {
    let tris = mesh.triangles();
    let n = mesh.vertex_count();

    let counts = edge_use_counts(tris);
    // Report the smallest offending edge so the error is deterministic.
    if let Some(&(a, b)) = counts.iter().filter(|(_, &c)| c > 2).map(|(e, _)| e).min() {
        return Err(MeshError::NonManifoldEdge(a, b));
    }

    let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(tris.len() * 3);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            let e = (tri[k], tri[(k + 1) % 3]);
            if directed.insert(e, t).is_some() {
                return Err(MeshError::InconsistentOrientation(e.0, e.1));
            }
            incident[tri[k]].push(t);
        }
    }

    // Corners of `t` rotated so that `v` comes first.
    let rotated = |t: usize, v: usize| -> [usize; 3] {
        let tri = tris[t];
        if tri[0] == v {
            tri
        } else if tri[1] == v {
            [tri[1], tri[2], tri[0]]
        } else {
            [tri[2], tri[0], tri[1]]
        }
    };

    let mut neighbors = Vec::with_capacity(n);
    let mut fans = Vec::with_capacity(n);
    let mut boundary = Vec::with_capacity(n);

    for (v, inc) in incident.iter().enumerate() {
        if inc.is_empty() {
            neighbors.push(Vec::new());
            fans.push(Vec::new());
            boundary.push(false);
            continue;
        }
        // An open fan starts at the triangle whose leading edge v->a has no twin.
        let start = inc
            .iter()
            .copied()
            .filter(|&t| {
                let [_, a, _] = rotated(t, v);
                !directed.contains_key(&(a, v))
            })
            .min();
        let is_open = start.is_some();
        let start = start.unwrap_or_else(|| *inc.iter().min().expect("non-empty"));

        let mut fan = Vec::with_capacity(inc.len());
        let mut ring = Vec::with_capacity(inc.len() + 1);
        let mut t = start;
        loop {
            let [_, a, b] = rotated(t, v);
            fan.push(t);
            ring.push(a);
            match directed.get(&(v, b)) {
                Some(&next) if next == start => break,
                Some(&next) => {
                    if fan.len() > inc.len() {
                        return Err(MeshError::NonManifoldVertex(v));
                    }
                    t = next;
                }
                None => {
                    ring.push(b);
                    break;
                }
            }
        }
        if fan.len() != inc.len() {
            return Err(MeshError::NonManifoldVertex(v));
        }
        neighbors.push(ring);
        fans.push(fan);
        boundary.push(is_open);
    }

    Ok(OneRingTable {
        neighbors,
        triangles: fans,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::mesh::shapes;

    #[test]
    fn tetrahedron_rings() {
        let m = shapes::tetrahedron::<f64>(1.0);
        let r = build_one_rings(&m).unwrap();
        for v in 0..4 {
            assert_eq!(r.degree(v), 3);
            assert_eq!(r.incident_triangles(v).len(), 3);
            assert!(!r.is_boundary(v));
        }
    }

    #[test]
    fn single_triangle_is_all_boundary() {
        let m = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let r = build_one_rings(&m).unwrap();
        for v in 0..3 {
            assert!(r.is_boundary(v));
            assert_eq!(r.degree(v), 2);
        }
        assert_eq!(r.neighbors(0), &[1, 2]);
    }

    #[test]
    fn icosphere_degrees() {
        let m = shapes::icosphere::<f64>(1.0, 2);
        let r = build_one_rings(&m).unwrap();
        let mut fives = 0;
        for v in 0..m.vertex_count() {
            assert!(!r.is_boundary(v));
            let d = r.degree(v);
            assert!(d == 5 || d == 6, "degree {d}");
            assert_eq!(d, r.incident_triangles(v).len());
            fives += usize::from(d == 5);
        }
        assert_eq!(fives, 12);
    }

    #[test]
    fn neighbors_follow_winding() {
        let m = shapes::icosphere::<f64>(1.0, 1);
        let r = build_one_rings(&m).unwrap();
        for v in 0..m.vertex_count() {
            let ring = r.neighbors(v);
            for (k, &t) in r.incident_triangles(v).iter().enumerate() {
                let tri = m.triangles()[t];
                let a = ring[k];
                let b = ring[(k + 1) % ring.len()];
                let pos = tri.iter().position(|&x| x == v).unwrap();
                assert_eq!(tri[(pos + 1) % 3], a);
                assert_eq!(tri[(pos + 2) % 3], b);
            }
        }
    }

    #[test]
    fn non_manifold_edge_reported() {
        let verts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let m = TriangleMesh::new(verts, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap();
        assert_eq!(build_one_rings(&m).unwrap_err(), MeshError::NonManifoldEdge(0, 1));
    }

    #[test]
    fn bowtie_vertex_reported() {
        let verts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(-1.0, -1.0, 0.0),
        ];
        let m = TriangleMesh::new(verts, vec![[0, 1, 2], [0, 3, 4]]).unwrap();
        assert_eq!(build_one_rings(&m).unwrap_err(), MeshError::NonManifoldVertex(0));
    }

    #[test]
    fn deterministic() {
        let m = shapes::icosphere::<f64>(1.0, 2);
        assert_eq!(build_one_rings(&m).unwrap(), build_one_rings(&m).unwrap());
    }
}
