//! Discrete curvature fields on triangle meshes.
//!
//! Gaussian curvature comes from the angle deficit normalised by the vertex
//! area, mean curvature from the cotangent Laplace–Beltrami operator applied
//! to vertex positions. Principal, absolute and RMS curvatures are derived
//! from the pair `(H, K)`.

mod deficit;
mod laplace;
mod principal;

pub use deficit::{angle_deficits, gaussian_field, AngleDeficitTable, GaussianField};
pub use laplace::{mean_curvature_normals, mean_field, vertex_normals, MeanField};
pub use principal::{derived_fields, principal_from_hk, Principal, RmsConvention, RMS_CONVENTION};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mesh::{build_one_rings, vertex_areas, AreaScheme, MeshError, TriangleMesh};
use crate::scalar::Real;

/// Which per-vertex quantity of a [`CurvatureField`] to read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureKind {
    #[default]
    Gaussian,
    Mean,
    Absolute,
    Rms,
    K1,
    K2,
}

impl CurvatureKind {
    /// The four curvatures tracked by the knee time series.
    pub const BASIC: [CurvatureKind; 4] = [Self::Gaussian, Self::Mean, Self::Absolute, Self::Rms];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Mean => "mean",
            Self::Absolute => "absolute",
            Self::Rms => "rms",
            Self::K1 => "k1",
            Self::K2 => "k2",
        }
    }

    /// SI unit of the quantity.
    pub fn unit(self) -> &'static str {
        match self {
            Self::Gaussian => "1/m^2",
            _ => "1/m",
        }
    }
}

impl fmt::Display for CurvatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurvatureKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "gaussian" | "k" => Self::Gaussian,
            "mean" | "h" => Self::Mean,
            "absolute" | "abs" | "k_abs" => Self::Absolute,
            "rms" | "k_rms" => Self::Rms,
            "k1" => Self::K1,
            "k2" => Self::K2,
            other => return Err(format!("unknown curvature type `{other}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CurvatureOptions {
    pub area_scheme: AreaScheme,
    pub rms: RmsConvention,
}

/// Per-vertex curvature of one mesh frame.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField<T> {
    /// Gaussian curvature, 1/m².
    pub gaussian: Vec<T>,
    /// Signed mean curvature, 1/m; positive on an outward-oriented sphere.
    pub mean: Vec<T>,
    pub k1: Vec<T>,
    pub k2: Vec<T>,
    pub absolute: Vec<T>,
    pub rms: Vec<T>,
    /// `H² < K` was clamped to an umbilic point.
    pub clamped: Vec<bool>,
    /// Open triangle fan.
    pub boundary: Vec<bool>,
    /// Vertex with zero area (isolated or only degenerate triangles).
    pub zero_area: Vec<bool>,
}

impl<T: Real> CurvatureField<T> {
    pub fn len(&self) -> usize {
        self.gaussian.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussian.is_empty()
    }

    pub fn values(&self, kind: CurvatureKind) -> &[T] {
        match kind {
            CurvatureKind::Gaussian => &self.gaussian,
            CurvatureKind::Mean => &self.mean,
            CurvatureKind::Absolute => &self.absolute,
            CurvatureKind::Rms => &self.rms,
            CurvatureKind::K1 => &self.k1,
            CurvatureKind::K2 => &self.k2,
        }
    }

    /// Vertex may enter full-body maps: it has area and a closed fan.
    #[inline]
    pub fn is_reliable(&self, v: usize) -> bool {
        !self.boundary[v] && !self.zero_area[v]
    }

    /// Vertex may enter regional means: reliable and not clamped.
    #[inline]
    pub fn is_regional(&self, v: usize) -> bool {
        self.is_reliable(v) && !self.clamped[v]
    }
}

pub fn curvature_field<T: Real>(mesh: &TriangleMesh<T>) -> Result<CurvatureField<T>, MeshError> {
    curvature_field_with(mesh, CurvatureOptions::default())
}

pub fn curvature_field_with<T: Real>(
    mesh: &TriangleMesh<T>,
    options: CurvatureOptions,
) -> Result<CurvatureField<T>, MeshError> {
    let rings = build_one_rings(mesh)?;
    let areas = vertex_areas(mesh, options.area_scheme);
    let k = gaussian_field(mesh, &rings, &areas);
    let h = mean_field(mesh, &rings, &areas);

    let n = mesh.vertex_count();
    let mut field = CurvatureField {
        gaussian: k.values,
        mean: h.values,
        k1: Vec::with_capacity(n),
        k2: Vec::with_capacity(n),
        absolute: Vec::with_capacity(n),
        rms: Vec::with_capacity(n),
        clamped: Vec::with_capacity(n),
        boundary: k.boundary,
        zero_area: k.zero_area,
    };
    for v in 0..n {
        let p = principal_from_hk(field.mean[v], field.gaussian[v]);
        let (abs, rms) = derived_fields(p.k1, p.k2, options.rms);
        field.k1.push(p.k1);
        field.k2.push(p.k2);
        field.absolute.push(abs);
        field.rms.push(rms);
        field.clamped.push(p.clamped);
    }
    Ok(field)
}
