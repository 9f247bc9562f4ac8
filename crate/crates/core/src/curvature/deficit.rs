use crate::geom::angle_between;
use crate::mesh::{OneRingTable, TriangleMesh, VertexAreas};
use crate::scalar::Real;

/// Per-vertex sums of incident interior angles and the resulting deficits.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleDeficitTable<T> {
    pub angle_sums: Vec<T>,
    /// `2π − Σθ` at interior vertices, `π − Σθ` at boundary vertices.
    pub deficits: Vec<T>,
    pub boundary: Vec<bool>,
}

impl<T: Real> AngleDeficitTable<T> {
    /// Sum of all deficits; `2πχ` for a closed mesh.
    pub fn total(&self) -> T {
        self.deficits.iter().copied().sum()
    }
}

pub fn angle_deficits<T: Real>(mesh: &TriangleMesh<T>, rings: &OneRingTable) -> AngleDeficitTable<T> {
    let n = mesh.vertex_count();
    let mut sums = vec![T::zero(); n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.is_degenerate(t) {
            continue;
        }
        let p = mesh.corners(t);
        for k in 0..3 {
            let a = p[k];
            let theta = angle_between(p[(k + 1) % 3] - a, p[(k + 2) % 3] - a);
            sums[tri[k]] = sums[tri[k]] + theta;
        }
    }
    let boundary = rings.boundary_flags().to_vec();
    let deficits = sums
        .iter()
        .zip(&boundary)
        .enumerate()
        .map(|(v, (&s, &b))| {
            if rings.is_isolated(v) {
                T::zero()
            } else if b {
                T::PI() - s
            } else {
                T::TAU() - s
            }
        })
        .collect();
    AngleDeficitTable {
        angle_sums: sums,
        deficits,
        boundary,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianField<T> {
    /// Gaussian curvature, 1/m².
    pub values: Vec<T>,
    pub deficits: AngleDeficitTable<T>,
    pub boundary: Vec<bool>,
    /// Vertex area was zero; value forced to 0.
    pub zero_area: Vec<bool>,
}

/// Angle deficit divided by vertex area.
pub fn gaussian_field<T: Real>(
    mesh: &TriangleMesh<T>,
    rings: &OneRingTable,
    areas: &VertexAreas<T>,
) -> GaussianField<T> {
    let deficits = angle_deficits(mesh, rings);
    let mut zero_area = vec![false; mesh.vertex_count()];
    let values = deficits
        .deficits
        .iter()
        .enumerate()
        .map(|(v, &d)| {
            let a = areas.get(v);
            if a > T::zero() {
                d / a
            } else {
                zero_area[v] = true;
                T::zero()
            }
        })
        .collect();
    GaussianField {
        values,
        boundary: deficits.boundary.clone(),
        deficits,
        zero_area,
    }
}
