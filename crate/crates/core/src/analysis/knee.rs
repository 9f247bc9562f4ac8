use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_connectivity, sagittal_x, sequence_fields, side_of, AnalysisError};
use crate::curvature::CurvatureKind;
use crate::spatial::PointGrid;
use crate::synth::{GaitSequence, PostureLabel, Side};
use crate::{Field, Mesh};

/// Knee search band and averaging radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    /// Height band as fractions of body height.
    pub band: (f64, f64),
    /// Euclidean averaging radius, m.
    pub radius: f64,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self {
            band: (0.25, 0.30),
            radius: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub side: Side,
    pub center: usize,
    /// Ascending vertex indices within `radius` of the center, same side.
    pub members: Vec<usize>,
    pub radius: f64,
    pub band: (f64, f64),
}

/// Finds the knee of one side: the vertex of largest `values` among
/// reliable vertices in the height band on that side of the median plane,
/// plus every same-side vertex within the radius.
pub fn detect_region(
    mesh: &Mesh,
    values: &[f64],
    reliable: impl Fn(usize) -> bool,
    side: Side,
    body_height: f64,
    params: &RegionParams,
) -> Result<RegionSample, AnalysisError> {
    if values.len() != mesh.vertex_count() {
        return Err(AnalysisError::ValueCount {
            count: values.len(),
            vertices: mesh.vertex_count(),
        });
    }
    let plane = sagittal_x(mesh);
    let (lo, hi) = (params.band.0 * body_height, params.band.1 * body_height);
    let pos = mesh.vertices();
    let mut center: Option<usize> = None;
    for (v, p) in pos.iter().enumerate() {
        if p.y < lo || p.y > hi || side_of(p.x, plane) != Some(side) || !reliable(v) {
            continue;
        }
        // Strict comparison keeps the lowest index on ties.
        if center.is_none_or(|c| values[v] > values[c]) {
            center = Some(v);
        }
    }
    let center = center.ok_or(AnalysisError::EmptyBand { side, lo, hi })?;
    let grid = PointGrid::new(pos, params.radius);
    let members = grid
        .within(pos[center], params.radius)
        .into_iter()
        .filter(|&v| side_of(pos[v].x, plane) == Some(side))
        .collect();
    Ok(RegionSample {
        side,
        center,
        members,
        radius: params.radius,
        band: params.band,
    })
}

/// Knee region located at the Gaussian-curvature maximum.
pub fn detect_knee_region(
    mesh: &Mesh,
    field: &Field,
    side: Side,
    body_height: f64,
    params: &RegionParams,
) -> Result<RegionSample, AnalysisError> {
    detect_region(
        mesh,
        &field.gaussian,
        |v| field.is_reliable(v),
        side,
        body_height,
        params,
    )
}

/// Region means of the four basic curvatures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMeans {
    pub gaussian: f64,
    pub mean: f64,
    pub absolute: f64,
    pub rms: f64,
    /// Members that entered the means.
    pub count: usize,
    /// No member was regional, so reliable clamped members were used.
    pub fallback: bool,
}

impl CurvatureMeans {
    pub fn get(&self, kind: CurvatureKind) -> f64 {
        match kind {
            CurvatureKind::Gaussian => self.gaussian,
            CurvatureKind::Mean => self.mean,
            CurvatureKind::Absolute => self.absolute,
            CurvatureKind::Rms => self.rms,
            CurvatureKind::K1 | CurvatureKind::K2 => f64::NAN,
        }
    }
}

/// Means over members that are neither boundary, zero-area nor clamped.
/// If every member is clamped, clamped reliable members are used instead.
pub fn region_means(field: &Field, region: &RegionSample) -> CurvatureMeans {
    let mut use_v: Vec<usize> = region
        .members
        .iter()
        .copied()
        .filter(|&v| field.is_regional(v))
        .collect();
    let fallback = use_v.is_empty();
    if fallback {
        use_v = region
            .members
            .iter()
            .copied()
            .filter(|&v| field.is_reliable(v))
            .collect();
    }
    let n = use_v.len();
    if n == 0 {
        return CurvatureMeans {
            fallback,
            ..Default::default()
        };
    }
    let avg = |xs: &[f64]| use_v.iter().map(|&v| xs[v]).sum::<f64>() / n as f64;
    CurvatureMeans {
        gaussian: avg(&field.gaussian),
        mean: avg(&field.mean),
        absolute: avg(&field.absolute),
        rms: avg(&field.rms),
        count: n,
        fallback,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneeFrame {
    pub frame: usize,
    pub label: Option<PostureLabel>,
    /// Indexed by [`Side::index`].
    pub regions: [RegionSample; 2],
    pub means: [CurvatureMeans; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KneeTimeSeries {
    pub frames_per_cycle: usize,
    pub frames: Vec<KneeFrame>,
}

impl KneeTimeSeries {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// One side's region mean of `kind` over all frames.
    pub fn series(&self, side: Side, kind: CurvatureKind) -> Vec<f64> {
        self.frames.iter().map(|f| f.means[side.index()].get(kind)).collect()
    }
}

/// Knee series over explicit frames and fields.
pub fn knee_time_series_from(
    frames: &[Mesh],
    fields: &[Field],
    frames_per_cycle: usize,
    body_height: f64,
    params: &RegionParams,
) -> Result<KneeTimeSeries, AnalysisError> {
    if frames_per_cycle == 0 || !frames_per_cycle.is_multiple_of(2) {
        return Err(AnalysisError::OddCycle(frames_per_cycle));
    }
    let out = frames
        .par_iter()
        .zip(fields)
        .enumerate()
        .map(|(i, (mesh, field))| {
            let region = |side| detect_knee_region(mesh, field, side, body_height, params).map_err(|e| e.at_frame(i));
            let regions = [region(Side::Left)?, region(Side::Right)?];
            let means = [region_means(field, &regions[0]), region_means(field, &regions[1])];
            Ok(KneeFrame {
                frame: i,
                label: PostureLabel::at_frame(i, frames_per_cycle),
                regions,
                means,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(KneeTimeSeries {
        frames_per_cycle,
        frames: out,
    })
}

/// Curvature fields, knee detection and region means for every frame.
pub fn knee_time_series(seq: &GaitSequence, params: &RegionParams) -> Result<KneeTimeSeries, AnalysisError> {
    check_connectivity(&seq.frames)?;
    let fields = sequence_fields(&seq.frames)?;
    knee_time_series_from(&seq.frames, &fields, seq.frames_per_cycle, seq.body_height, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvature_field;
    use crate::mesh::shapes;

    #[test]
    fn ties_break_to_lowest_index() {
        let m = shapes::icosphere::<f64>(1.0, 2);
        let values = vec![1.0; m.vertex_count()];
        let p = RegionParams {
            band: (-0.2, 0.2),
            radius: 0.3,
        };
        let r = detect_region(&m, &values, |_| true, Side::Left, 1.0, &p).unwrap();
        let plane = sagittal_x(&m);
        let first = m
            .vertices()
            .iter()
            .position(|q| q.y >= -0.2 && q.y <= 0.2 && q.x > plane)
            .unwrap();
        assert_eq!(r.center, first);
        assert!(r.members.contains(&r.center));
        assert!(r.members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_band_is_an_error() {
        let m = shapes::icosphere::<f64>(1.0, 1);
        let f = curvature_field(&m).unwrap();
        let p = RegionParams {
            band: (5.0, 6.0),
            radius: 0.1,
        };
        assert!(matches!(
            detect_knee_region(&m, &f, Side::Right, 1.0, &p),
            Err(AnalysisError::EmptyBand { .. })
        ));
    }
}
