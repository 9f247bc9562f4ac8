use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knee::{detect_knee_region, RegionParams};
use super::{sagittal_x, AnalysisError};
use crate::curvature::CurvatureKind;
use crate::geom::Vec3;
use crate::mesh::{vertex_areas, AreaScheme};
use crate::spatial::PointGrid;
use crate::synth::{PostureLabel, Side};
use crate::{Field, Mesh, Point};

/// Vertices below this fraction of body height enter the asymmetry index.
pub const LOWER_BODY_FRACTION: f64 = 0.55;
/// Mirror matches farther than this count as far, m.
pub const FAR_DISTANCE: f64 = 0.10;
/// A pair fails when more than this fraction of matches is far.
pub const FAR_FRACTION_LIMIT: f64 = 0.20;

/// Pairs `(i, i + fpc/2)` for the first half of every cycle.
pub fn half_cycle_pairs(len: usize, frames_per_cycle: usize) -> Result<Vec<(usize, usize)>, AnalysisError> {
    if frames_per_cycle == 0 || !frames_per_cycle.is_multiple_of(2) {
        return Err(AnalysisError::OddCycle(frames_per_cycle));
    }
    let half = frames_per_cycle / 2;
    Ok((0..len / frames_per_cycle)
        .flat_map(|c| (0..half).map(move |i| (c * frames_per_cycle + i, c * frames_per_cycle + i + half)))
        .collect())
}

/// Nearest-neighbour matches from one mesh into the mirror image of another.
#[derive(Clone, Debug, PartialEq)]
pub struct Correspondence {
    /// `matches[v]` is the vertex of the reflected mesh closest to `v`.
    pub matches: Vec<usize>,
    pub distances: Vec<f64>,
}

impl Correspondence {
    pub fn far_fraction(&self, distance: f64) -> f64 {
        if self.distances.is_empty() {
            return 0.0;
        }
        self.distances.iter().filter(|&&d| d > distance).count() as f64 / self.distances.len() as f64
    }
}

fn centroid(points: &[Point]) -> Point {
    points.iter().fold(Point::zero(), |a, &p| a + p) / points.len().max(1) as f64
}

/// Reflects `b` across its median plane, shifts it horizontally so its
/// centroid lines up with `a`'s, and matches every vertex of `a` to the
/// nearest reflected vertex. Heights are left alone: both frames stand on
/// the same ground.
pub fn mirror_correspondence(a: &Mesh, b: &Mesh) -> Correspondence {
    let plane = sagittal_x(b);
    let reflected: Vec<Point> = b
        .vertices()
        .iter()
        .map(|p| Vec3::new(2.0 * plane - p.x, p.y, p.z))
        .collect();
    let (ca, cb) = (centroid(a.vertices()), centroid(&reflected));
    let shift = Vec3::new(ca.x - cb.x, 0.0, ca.z - cb.z);
    let moved: Vec<Point> = reflected.iter().map(|&p| p + shift).collect();
    let grid = PointGrid::new(&moved, 0.02);
    let (matches, distances) = a
        .vertices()
        .par_iter()
        .map(|&p| grid.nearest(p).expect("non-empty mesh"))
        .unzip();
    Correspondence { matches, distances }
}

/// Area-weighted mean |residual| over included vertices below the
/// lower-body height.
fn lower_body_index(mesh: &Mesh, residual: &[f64], include: impl Fn(usize) -> bool, body_height: f64) -> f64 {
    let areas = vertex_areas(mesh, AreaScheme::BarycentricThird);
    let limit = LOWER_BODY_FRACTION * body_height;
    let (mut num, mut den) = (0.0, 0.0);
    for (v, p) in mesh.vertices().iter().enumerate() {
        if p.y < limit && include(v) {
            num += areas.areas[v] * residual[v].abs();
            den += areas.areas[v];
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Asymmetry index of one map against its own mirror image.
pub fn self_mirror_index(mesh: &Mesh, values: &[f64], reliable: impl Fn(usize) -> bool, body_height: f64) -> f64 {
    let c = mirror_correspondence(mesh, mesh);
    let residual: Vec<f64> = (0..values.len()).map(|v| values[v] - values[c.matches[v]]).collect();
    lower_body_index(mesh, &residual, |v| reliable(v) && reliable(c.matches[v]), body_height)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub frame_i: usize,
    pub frame_j: usize,
    pub label_i: Option<PostureLabel>,
    pub label_j: Option<PostureLabel>,
    pub kind: CurvatureKind,
    /// Area-weighted mean |residual| below the lower-body height.
    pub asymmetry_index: f64,
    /// Knee center heights `[left, right]` in frame i, m.
    pub knee_heights_i: [f64; 2],
    /// Knee center heights `[left, right]` in frame j, m.
    pub knee_heights_j: [f64; 2],
    /// Largest height gap between a knee of frame i and the opposite knee
    /// of frame j, m.
    pub knee_discrepancy: f64,
    /// Share of matches farther than [`FAR_DISTANCE`].
    pub far_fraction: f64,
    /// Per-vertex residual on frame i's vertices.
    #[serde(skip)]
    pub residual: Vec<f64>,
}

/// Compares frame i with the mirror image of frame j.
pub fn symmetry_report(
    (mesh_i, field_i): (&Mesh, &Field),
    (mesh_j, field_j): (&Mesh, &Field),
    kind: CurvatureKind,
    body_height: f64,
    params: &RegionParams,
) -> Result<SymmetryEntry, AnalysisError> {
    let c = mirror_correspondence(mesh_i, mesh_j);
    let far = c.far_fraction(FAR_DISTANCE);
    if far > FAR_FRACTION_LIMIT {
        return Err(AnalysisError::Correspondence {
            far: far * 100.0,
            distance: FAR_DISTANCE,
            limit: FAR_FRACTION_LIMIT * 100.0,
        });
    }
    let (vi, vj) = (field_i.values(kind), field_j.values(kind));
    let residual: Vec<f64> = (0..vi.len()).map(|v| vi[v] - vj[c.matches[v]]).collect();
    let index = lower_body_index(
        mesh_i,
        &residual,
        |v| field_i.is_reliable(v) && field_j.is_reliable(c.matches[v]),
        body_height,
    );
    let heights = |mesh: &Mesh, field: &Field| -> Result<[f64; 2], AnalysisError> {
        let mut out = [0.0; 2];
        for side in Side::BOTH {
            let r = detect_knee_region(mesh, field, side, body_height, params)?;
            out[side.index()] = mesh.vertices()[r.center].y;
        }
        Ok(out)
    };
    let (hi, hj) = (heights(mesh_i, field_i)?, heights(mesh_j, field_j)?);
    let discrepancy = (hi[0] - hj[1]).abs().max((hi[1] - hj[0]).abs());
    Ok(SymmetryEntry {
        frame_i: 0,
        frame_j: 0,
        label_i: None,
        label_j: None,
        kind,
        asymmetry_index: index,
        knee_heights_i: hi,
        knee_heights_j: hj,
        knee_discrepancy: discrepancy,
        far_fraction: far,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub kind: CurvatureKind,
    pub frames_per_cycle: usize,
    pub pairs: Vec<SymmetryEntry>,
}

impl SymmetryReport {
    pub fn max_index(&self) -> f64 {
        self.pairs.iter().map(|p| p.asymmetry_index).fold(0.0, f64::max)
    }
}

/// Symmetry entries for every half-cycle pair.
pub fn symmetry_reports(
    frames: &[Mesh],
    fields: &[Field],
    frames_per_cycle: usize,
    kind: CurvatureKind,
    body_height: f64,
    params: &RegionParams,
) -> Result<SymmetryReport, AnalysisError> {
    let pairs = half_cycle_pairs(frames.len(), frames_per_cycle)?;
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut e = symmetry_report(
                (&frames[i], &fields[i]),
                (&frames[j], &fields[j]),
                kind,
                body_height,
                params,
            )
            .map_err(|e| e.at_frame(i))?;
            e.frame_i = i;
            e.frame_j = j;
            e.label_i = PostureLabel::at_frame(i, frames_per_cycle);
            e.label_j = PostureLabel::at_frame(j, frames_per_cycle);
            Ok(e)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(SymmetryReport {
        kind,
        frames_per_cycle,
        pairs: entries,
    })
}
