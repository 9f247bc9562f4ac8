use serde::{Deserialize, Serialize};

use super::knee::KneeTimeSeries;
use super::AnalysisError;
use crate::curvature::CurvatureKind;
use crate::synth::Side;

/// Normalized RMS difference below which a gait counts as symmetric.
pub const DEFAULT_TAU: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    SymmetricNormal,
    AsymmetricAnomalous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindDeviation {
    pub kind: CurvatureKind,
    /// RMS of right − shifted left over the pooled range of both series.
    pub nrmsd: f64,
    /// Largest |right − shifted left| over the largest |right|.
    pub max_relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SymmetryClass,
    pub tau: f64,
    /// Curvature the decision is based on.
    pub decided_on: CurvatureKind,
    pub nrmsd: f64,
    pub breakdown: Vec<KindDeviation>,
}

/// Compares the right series with the left series shifted by half a cycle.
pub fn half_cycle_deviation(series: &KneeTimeSeries, kind: CurvatureKind) -> Result<KindDeviation, AnalysisError> {
    let fpc = series.frames_per_cycle;
    if fpc == 0 || !fpc.is_multiple_of(2) {
        return Err(AnalysisError::OddCycle(fpc));
    }
    let n = series.len();
    if n < fpc {
        return Err(AnalysisError::TooShort {
            len: n,
            frames_per_cycle: fpc,
        });
    }
    let left = series.series(Side::Left, kind);
    let right = series.series(Side::Right, kind);
    let diff: Vec<f64> = (0..n).map(|i| right[i] - left[(i + fpc / 2) % n]).collect();
    let rms = (diff.iter().map(|d| d * d).sum::<f64>() / n as f64).sqrt();
    let (lo, hi) = left
        .iter()
        .chain(&right)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let range = hi - lo;
    let nrmsd = if range > 0.0 { rms / range } else { 0.0 };
    let max_diff = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let scale = right.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_relative = if scale > 0.0 { max_diff / scale } else { max_diff };
    Ok(KindDeviation {
        kind,
        nrmsd,
        max_relative,
    })
}

/// Symmetric when the Gaussian knee series of the two sides agree after a
/// half-cycle shift to within `tau`.
pub fn classify_symmetry(series: &KneeTimeSeries, tau: f64) -> Result<Classification, AnalysisError> {
    let breakdown = CurvatureKind::BASIC
        .iter()
        .map(|&k| half_cycle_deviation(series, k))
        .collect::<Result<Vec<_>, _>>()?;
    let nrmsd = breakdown[0].nrmsd;
    Ok(Classification {
        class: if nrmsd < tau {
            SymmetryClass::SymmetricNormal
        } else {
            SymmetryClass::AsymmetricAnomalous
        },
        tau,
        decided_on: CurvatureKind::Gaussian,
        nrmsd,
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::knee::{CurvatureMeans, KneeFrame, RegionSample};

    fn series(left: &[f64], right: &[f64], fpc: usize) -> KneeTimeSeries {
        let region = |side| RegionSample {
            side,
            center: 0,
            members: vec![0],
            radius: 0.05,
            band: (0.25, 0.3),
        };
        let m = |g: f64| CurvatureMeans {
            gaussian: g,
            mean: g,
            absolute: g,
            rms: g,
            count: 1,
            fallback: false,
        };
        KneeTimeSeries {
            frames_per_cycle: fpc,
            frames: left
                .iter()
                .zip(right)
                .enumerate()
                .map(|(i, (&l, &r))| KneeFrame {
                    frame: i,
                    label: None,
                    regions: [region(Side::Left), region(Side::Right)],
                    means: [m(l), m(r)],
                })
                .collect(),
        }
    }

    #[test]
    fn shifted_copy_is_symmetric() {
        let right = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let left = [5.0, 6.0, 7.0, 8.0, 1.0, 2.0, 3.0, 4.0];
        let c = classify_symmetry(&series(&left, &right, 8), DEFAULT_TAU).unwrap();
        assert_eq!(c.class, SymmetryClass::SymmetricNormal);
        assert_eq!(c.nrmsd, 0.0);
        let flat = [4.5; 8];
        let c = classify_symmetry(&series(&flat, &right, 8), DEFAULT_TAU).unwrap();
        assert_eq!(c.class, SymmetryClass::AsymmetricAnomalous);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            classify_symmetry(&series(&[1.0; 4], &[1.0; 4], 8), DEFAULT_TAU),
            Err(AnalysisError::TooShort { .. })
        ));
    }
}
