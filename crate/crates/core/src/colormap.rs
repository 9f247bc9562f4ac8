//! Blue-green-red diverging color maps for per-vertex scalar fields.
//!
//! Values at or below `vmin` are pure blue, the center value is pure green
//! and values at or above `vmax` are pure red, with linear ramps between.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::TriangleMesh;
use crate::scalar::Real;

pub type Rgb = [u8; 3];

pub const BLUE: Rgb = [0, 0, 255];
pub const GREEN: Rgb = [0, 255, 0];
pub const RED: Rgb = [255, 0, 0];

/// Lower and upper percentiles used by [`auto_scale`].
pub const AUTO_PERCENTILES: (f64, f64) = (0.02, 0.98);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// `vmax - center == center - vmin`.
    #[default]
    Symmetric,
    MinMax,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColorError {
    #[error("invalid color scale: vmin {vmin} must be below vmax {vmax}")]
    EmptyRange { vmin: f64, vmax: f64 },
    #[error("symmetric scale must be centred: vmin {vmin}, center {center}, vmax {vmax}")]
    NotSymmetric { vmin: f64, center: f64, vmax: f64 },
    #[error("gamma must be positive, got {0}")]
    Gamma(f64),
    #[error("cannot derive a scale from an empty field")]
    EmptyField,
    #[error("{values} values for {vertices} vertices")]
    LengthMismatch { values: usize, vertices: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorScale<T> {
    pub vmin: T,
    pub vmax: T,
    pub center: T,
    pub mode: ScaleMode,
    pub gamma: T,
}

impl<T: Real> ColorScale<T> {
    pub fn new(vmin: T, vmax: T, center: T, mode: ScaleMode, gamma: T) -> Result<Self, ColorError> {
        let s = Self {
            vmin,
            vmax,
            center,
            mode,
            gamma,
        };
        s.check()?;
        Ok(s)
    }

    /// Symmetric scale `center ± half_range`.
    pub fn symmetric(center: T, half_range: T) -> Result<Self, ColorError> {
        Self::new(
            center - half_range,
            center + half_range,
            center,
            ScaleMode::Symmetric,
            T::one(),
        )
    }

    pub fn check(&self) -> Result<(), ColorError> {
        if !(self.vmin < self.vmax) {
            return Err(ColorError::EmptyRange {
                vmin: self.vmin.to_f64_lossy(),
                vmax: self.vmax.to_f64_lossy(),
            });
        }
        if !(self.gamma > T::zero()) {
            return Err(ColorError::Gamma(self.gamma.to_f64_lossy()));
        }
        if self.mode == ScaleMode::Symmetric {
            let up = self.vmax - self.center;
            let down = self.center - self.vmin;
            let tol = T::epsilon() * T::lit(8.0) * (up.abs() + down.abs() + self.center.abs());
            if (up - down).abs() > tol {
                return Err(ColorError::NotSymmetric {
                    vmin: self.vmin.to_f64_lossy(),
                    center: self.center.to_f64_lossy(),
                    vmax: self.vmax.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// True when `value` falls outside `[vmin, vmax]`.
    pub fn clamps(&self, value: T) -> bool {
        value < self.vmin || value > self.vmax
    }
}

#[inline]
fn channel<T: Real>(t: T) -> u8 {
    // Round half up.
    (t * T::lit(255.0) + T::half()).floor().to_f64_lossy().clamp(0.0, 255.0) as u8
}

pub fn map_to_color<T: Real>(value: T, scale: &ColorScale<T>) -> Rgb {
    if value.is_nan() {
        return GREEN;
    }
    let v = value.max(scale.vmin).min(scale.vmax);
    let (span, dist, low) = if v < scale.center {
        (scale.center - scale.vmin, scale.center - v, true)
    } else {
        (scale.vmax - scale.center, v - scale.center, false)
    };
    let d = if span > T::zero() {
        (dist / span).min(T::one()).max(T::zero())
    } else if dist > T::zero() {
        T::one()
    } else {
        T::zero()
    };
    let d = if scale.gamma == T::one() {
        d
    } else {
        d.powf(scale.gamma)
    };
    let hot = channel(d);
    let green = channel(T::one() - d);
    if low {
        [0, green, hot]
    } else {
        [hot, green, 0]
    }
}

pub fn colorize_mesh<T: Real>(
    mesh: &TriangleMesh<T>,
    values: &[T],
    scale: &ColorScale<T>,
) -> Result<Vec<Rgb>, ColorError> {
    if values.len() != mesh.vertex_count() {
        return Err(ColorError::LengthMismatch {
            values: values.len(),
            vertices: mesh.vertex_count(),
        });
    }
    Ok(values.iter().map(|&v| map_to_color(v, scale)).collect())
}

/// Linear-interpolation percentile (`q` in `[0, 1]`) of sorted data.
pub fn percentile_sorted<T: Real>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty());
    let rank = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = T::lit(rank - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Derives a scale from the 2nd and 98th percentiles of the finite values.
///
/// Symmetric mode uses `center = 0` and a half range equal to the larger of
/// the two percentile tails. A zero-width range falls back to one field unit.
pub fn auto_scale<T: Real>(values: &[T], mode: ScaleMode) -> Result<ColorScale<T>, ColorError> {
    let mut sorted: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Err(ColorError::EmptyField);
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let lo = percentile_sorted(&sorted, AUTO_PERCENTILES.0);
    let hi = percentile_sorted(&sorted, AUTO_PERCENTILES.1);
    let center = T::zero();
    match mode {
        ScaleMode::Symmetric => {
            let mut half = (hi - center).max(center - lo);
            if !(half > T::zero()) {
                half = T::one();
            }
            ColorScale::symmetric(center, half)
        }
        ScaleMode::MinMax => {
            let (vmin, vmax) = if hi > lo {
                (lo, hi)
            } else {
                (lo - T::half(), lo + T::half())
            };
            ColorScale::new(vmin, vmax, center, ScaleMode::MinMax, T::one())
        }
    }
}
