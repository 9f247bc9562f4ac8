//! Knee-region time series, half-cycle left/right symmetry, cycle-averaged
//! maps and the symmetric/anomalous rule.

mod average;
mod classify;
mod export;
mod knee;
mod symmetry;

pub use average::{average_curvature_map, average_values, noise_reduction, AverageCurvatureMap, NoiseReduction};
pub use classify::{
    classify_symmetry, half_cycle_deviation, Classification, KindDeviation, SymmetryClass, DEFAULT_TAU,
};
pub use export::{knee_series_csv, round_sig, to_json_rounded, SIG_DIGITS};
pub use knee::{
    detect_knee_region, detect_region, knee_time_series, knee_time_series_from, region_means, CurvatureMeans,
    KneeFrame, KneeTimeSeries, RegionParams, RegionSample,
};
pub use symmetry::{
    half_cycle_pairs, mirror_correspondence, self_mirror_index, symmetry_report, symmetry_reports, Correspondence,
    SymmetryEntry, SymmetryReport, FAR_DISTANCE, FAR_FRACTION_LIMIT, LOWER_BODY_FRACTION,
};

use rayon::prelude::*;
use thiserror::Error;

use crate::curvature::curvature_field;
use crate::mesh::MeshError;
use crate::synth::{GaitSequence, Side};
use crate::{Field, Mesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no {side} vertices in the height band [{lo:.4}, {hi:.4}] m")]
    EmptyBand { side: Side, lo: f64, hi: f64 },
    #[error("frame {frame}: {source}")]
    Frame {
        frame: usize,
        #[source]
        source: Box<AnalysisError>,
    },
    #[error("frames per cycle must be even and positive, got {0}")]
    OddCycle(usize),
    #[error("series of {len} frames is shorter than one cycle of {frames_per_cycle}")]
    TooShort { len: usize, frames_per_cycle: usize },
    #[error("cycle {cycle} out of range for {cycles} cycles")]
    CycleOutOfRange { cycle: usize, cycles: usize },
    #[error("frame {frame} has different connectivity from frame 0")]
    Connectivity { frame: usize },
    #[error("{count} values for {vertices} vertices")]
    ValueCount { count: usize, vertices: usize },
    #[error("{far:.1}% of vertices are farther than {distance} m from their mirror match (limit {limit:.0}%)")]
    Correspondence { far: f64, distance: f64, limit: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl AnalysisError {
    pub(crate) fn at_frame(self, frame: usize) -> Self {
        AnalysisError::Frame {
            frame,
            source: Box::new(self),
        }
    }
}

/// Median vertex x, the sagittal plane of one frame.
pub fn sagittal_x(mesh: &Mesh) -> f64 {
    let mut xs: Vec<f64> = mesh.vertices().iter().map(|p| p.x).collect();
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Which side of the plane `x = plane` a point lies on; `None` on the plane.
/// The body faces +z with +y up, so its left is +x.
pub fn side_of(x: f64, plane: f64) -> Option<Side> {
    if x > plane {
        Some(Side::Left)
    } else if x < plane {
        Some(Side::Right)
    } else {
        None
    }
}

/// Curvature fields of every frame, in frame order.
pub fn sequence_fields(frames: &[Mesh]) -> Result<Vec<Field>, AnalysisError> {
    frames
        .par_iter()
        .enumerate()
        .map(|(i, m)| curvature_field(m).map_err(|e| AnalysisError::from(e).at_frame(i)))
        .collect()
}

/// Checks that all frames share frame 0's triangles.
pub fn check_connectivity(frames: &[Mesh]) -> Result<(), AnalysisError> {
    match frames.iter().position(|f| !f.same_connectivity(&frames[0])) {
        Some(frame) => Err(AnalysisError::Connectivity { frame }),
        None => Ok(()),
    }
}

/// A sequence with its per-frame curvature fields.
#[derive(Clone, Debug)]
pub struct AnalyzedSequence<'a> {
    pub sequence: &'a GaitSequence,
    pub fields: Vec<Field>,
}

impl<'a> AnalyzedSequence<'a> {
    pub fn new(sequence: &'a GaitSequence) -> Result<Self, AnalysisError> {
        check_connectivity(&sequence.frames)?;
        let fields = sequence_fields(&sequence.frames)?;
        Ok(Self { sequence, fields })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;

    #[test]
    fn median_plane() {
        let m = Mesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(5.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(sagittal_x(&m), 1.0);
        assert_eq!(side_of(2.0, 1.0), Some(Side::Left));
        assert_eq!(side_of(0.0, 1.0), Some(Side::Right));
        assert_eq!(side_of(1.0, 1.0), None);
    }
}
