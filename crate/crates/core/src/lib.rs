//! Discrete curvature maps on triangle-mesh sequences of a walking body.
//!
//! The crate is layered bottom-up:
//!
//! * [`mesh`]: indexed triangle meshes, one-ring adjacency, vertex areas,
//!   validation and OBJ/PLY I/O.
//! * [`curvature`]: Gaussian (angle deficit), mean (cotangent
//!   Laplace–Beltrami), principal, absolute and RMS curvature fields.
//! * [`colormap`]: blue-green-red mapping of scalar fields to vertex colors.
//! * [`synth`]: a procedural capsule-limb humanoid walking with a normal,
//!   a locked-left-knee and a half-step gait.
//! * [`analysis`]: knee-region time series, half-cycle left/right symmetry,
//!   cycle-averaged maps and the symmetric/anomalous rule.
//!
//! Mesh, curvature and colormap code is generic over [`Real`] (`f32` or
//! `f64`); the aliases below fix `f64`, which the gait layers use.

pub mod analysis;
pub mod colormap;
pub mod curvature;
pub mod geom;
pub mod mesh;
pub mod scalar;
pub mod spatial;
pub mod synth;

pub use scalar::Real;

/// `f64` mesh.
pub type Mesh = mesh::TriangleMesh<f64>;
/// `f32` mesh.
pub type MeshF32 = mesh::TriangleMesh<f32>;
/// `f64` curvature field.
pub type Field = curvature::CurvatureField<f64>;
/// `f32` curvature field.
pub type FieldF32 = curvature::CurvatureField<f32>;
/// `f64` point or vector.
pub type Point = geom::Vec3<f64>;
/// `f64` color scale.
pub type Scale = colormap::ColorScale<f64>;
