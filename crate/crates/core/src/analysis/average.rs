use serde::{Deserialize, Serialize};

use super::knee::{detect_region, RegionParams};
use super::symmetry::self_mirror_index;
use super::AnalysisError;
use crate::curvature::CurvatureKind;
use crate::synth::Side;
use crate::{Field, Mesh, Point};

/// Per-vertex mean of one curvature over the frames of a cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageCurvatureMap {
    pub kind: CurvatureKind,
    pub cycle: usize,
    /// Averaged frames, `start..end`.
    pub frames: (usize, usize),
    pub values: Vec<f64>,
    /// Vertex reliable in every averaged frame.
    pub reliable: Vec<bool>,
    /// Cycle-mean vertex positions, used to display and mirror the map.
    #[serde(skip)]
    pub geometry: Option<Mesh>,
}

/// Running per-vertex mean. A value repeated in every frame comes back
/// unchanged.
pub fn average_values(series: &[&[f64]]) -> Vec<f64> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    let mut mean = first.to_vec();
    for (k, values) in series.iter().enumerate().skip(1) {
        let n = (k + 1) as f64;
        for (m, &x) in mean.iter_mut().zip(values.iter()) {
            *m += (x - *m) / n;
        }
    }
    mean
}

fn mean_geometry(frames: &[Mesh]) -> Result<Mesh, AnalysisError> {
    let xs: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            let per: Vec<Vec<f64>> = frames
                .iter()
                .map(|f| f.vertices().iter().map(|p| p[a]).collect())
                .collect();
            let refs: Vec<&[f64]> = per.iter().map(Vec::as_slice).collect();
            average_values(&refs)
        })
        .collect();
    let pos: Vec<Point> = (0..xs[0].len())
        .map(|v| Point::new(xs[0][v], xs[1][v], xs[2][v]))
        .collect();
    Ok(frames[0].with_positions(pos)?)
}

/// Averages `kind` over the frames of cycle `cycle`.
pub fn average_curvature_map(
    frames: &[Mesh],
    fields: &[Field],
    frames_per_cycle: usize,
    kind: CurvatureKind,
    cycle: usize,
) -> Result<AverageCurvatureMap, AnalysisError> {
    if frames_per_cycle == 0 {
        return Err(AnalysisError::OddCycle(frames_per_cycle));
    }
    let cycles = fields.len() / frames_per_cycle;
    if cycle >= cycles {
        return Err(AnalysisError::CycleOutOfRange { cycle, cycles });
    }
    let (start, end) = (cycle * frames_per_cycle, (cycle + 1) * frames_per_cycle);
    let refs: Vec<&[f64]> = fields[start..end].iter().map(|f| f.values(kind)).collect();
    let values = average_values(&refs);
    let reliable = (0..values.len())
        .map(|v| fields[start..end].iter().all(|f| f.is_reliable(v)))
        .collect();
    let geometry = if frames.len() >= end {
        Some(mean_geometry(&frames[start..end])?)
    } else {
        None
    };
    Ok(AverageCurvatureMap {
        kind,
        cycle,
        frames: (start, end),
        values,
        reliable,
        geometry,
    })
}

impl AverageCurvatureMap {
    /// Asymmetry index of the map against its mirror image on the
    /// cycle-mean geometry.
    pub fn mirror_index(&self, body_height: f64) -> Option<f64> {
        let g = self.geometry.as_ref()?;
        Some(self_mirror_index(g, &self.values, |v| self.reliable[v], body_height))
    }

    /// Mean |value| over the knee region found on the averaged map.
    pub fn knee_abs_mean(&self, side: Side, body_height: f64, params: &RegionParams) -> Result<f64, AnalysisError> {
        let g = self.geometry.as_ref().ok_or(AnalysisError::ValueCount {
            count: self.values.len(),
            vertices: 0,
        })?;
        let r = detect_region(g, &self.values, |v| self.reliable[v], side, body_height, params)?;
        let used: Vec<usize> = r.members.into_iter().filter(|&v| self.reliable[v]).collect();
        Ok(used.iter().map(|&v| self.values[v].abs()).sum::<f64>() / used.len().max(1) as f64)
    }
}

/// Error of the averaged noisy map and of each noisy frame, against the
/// noise-free counterparts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseReduction {
    pub kind: CurvatureKind,
    /// Mean |average(noisy) − average(clean)| over vertices.
    pub average_error: f64,
    /// Mean |noisy − clean| per frame.
    pub frame_errors: Vec<f64>,
}

impl NoiseReduction {
    /// Average error over the smallest single-frame error.
    pub fn ratio(&self) -> f64 {
        let best = self.frame_errors.iter().copied().fold(f64::INFINITY, f64::min);
        self.average_error / best
    }
}

pub fn noise_reduction(clean: &[Field], noisy: &[Field], kind: CurvatureKind) -> NoiseReduction {
    let n = clean.first().map_or(0, |f| f.len());
    let ok: Vec<usize> = (0..n)
        .filter(|&v| clean.iter().chain(noisy).all(|f| f.is_reliable(v)))
        .collect();
    let mean_abs_diff =
        |a: &[f64], b: &[f64]| ok.iter().map(|&v| (a[v] - b[v]).abs()).sum::<f64>() / ok.len().max(1) as f64;
    let avg = |fs: &[Field]| {
        let refs: Vec<&[f64]> = fs.iter().map(|f| f.values(kind)).collect();
        average_values(&refs)
    };
    NoiseReduction {
        kind,
        average_error: mean_abs_diff(&avg(noisy), &avg(clean)),
        frame_errors: clean
            .iter()
            .zip(noisy)
            .map(|(c, z)| mean_abs_diff(z.values(kind), c.values(kind)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_exact() {
        let x = [0.1, -3.7, 1e-9];
        assert_eq!(average_values(&[&x, &x, &x, &x, &x]), x.to_vec());
        assert_eq!(average_values(&[&[1.0, 2.0], &[3.0, 6.0]]), vec![2.0, 4.0]);
        assert!(average_values(&[]).is_empty());
    }
}
