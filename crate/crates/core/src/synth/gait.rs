use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::body::Body;
use super::skeleton::{ArmAngles, Joint, LegAngles, PoseAngles, Skeleton};
use super::{Side, SynthError};
use crate::geom::Vec3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaitType {
    #[default]
    Normal,
    LockedLeftKnee,
    HalfStep,
}

impl GaitType {
    pub const ALL: [GaitType; 3] = [GaitType::Normal, GaitType::LockedLeftKnee, GaitType::HalfStep];

    pub fn name(self) -> &'static str {
        match self {
            GaitType::Normal => "normal",
            GaitType::LockedLeftKnee => "locked-left-knee",
            GaitType::HalfStep => "half-step",
        }
    }
}

impl fmt::Display for GaitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GaitType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "normal" => Ok(GaitType::Normal),
            "locked-left-knee" | "locked" => Ok(GaitType::LockedLeftKnee),
            "half-step" | "halfstep" => Ok(GaitType::HalfStep),
            other => Err(format!("unknown gait `{other}` (normal, locked-left-knee, half-step)")),
        }
    }
}

/// Free parameters of the abnormal gaits and the arm swing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitOptions {
    /// Peak hip abduction of the locked leg during its swing, rad.
    pub locked_abduction: f64,
    /// Half-step hip amplitude relative to the normal one.
    pub half_step_fraction: f64,
    /// Peak shoulder swing, rad.
    pub arm_swing: f64,
}

impl Default for GaitOptions {
    fn default() -> Self {
        Self {
            locked_abduction: 15f64.to_radians(),
            half_step_fraction: 0.5,
            arm_swing: 0.35,
        }
    }
}

/// Periodic monotone cubic Hermite curve through eight equally spaced keys
/// at phases `k / 8`. Tangents are harmonic means of the adjacent secants
/// (zero at local extrema), so the curve never overshoots its keys.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicSpline {
    keys: [f64; 8],
    slopes: [f64; 8],
}

impl PeriodicSpline {
    pub fn new(keys: [f64; 8]) -> Self {
        let h = 1.0 / 8.0;
        let secant = |k: usize| (keys[(k + 1) % 8] - keys[k]) / h;
        let mut slopes = [0.0; 8];
        for (k, m) in slopes.iter_mut().enumerate() {
            let (a, b) = (secant((k + 7) % 8), secant(k));
            if a * b > 0.0 {
                *m = 2.0 * a * b / (a + b);
            }
        }
        Self { keys, slopes }
    }

    pub fn keys(&self) -> &[f64; 8] {
        &self.keys
    }

    /// Value at `phase`, taken modulo 1. Key phases return keys exactly.
    pub fn eval(&self, phase: f64) -> f64 {
        let u = phase.rem_euclid(1.0) * 8.0;
        let k = (u.floor() as usize).min(7);
        let t = u - k as f64;
        let (y0, y1) = (self.keys[k], self.keys[(k + 1) % 8]);
        if t == 0.0 {
            return y0;
        }
        let h = 1.0 / 8.0;
        let (m0, m1) = (self.slopes[k] * h, self.slopes[(k + 1) % 8] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }
}

struct LegKeys {
    /// Hip flexion in units of the hip amplitude.
    hip: [f64; 8],
    /// Knee flexion, degrees.
    knee: [f64; 8],
    /// Ankle dorsiflexion, degrees.
    ankle: [f64; 8],
}

/// Right leg of the normal gait; the left leg runs half a cycle behind.
const NORMAL_RIGHT: LegKeys = LegKeys {
    hip: [1.0, 0.6, 0.0, -0.5, -1.0, -0.5, 0.3, 0.9],
    knee: [5.0, 20.0, 5.0, 5.0, 15.0, 45.0, 60.0, 30.0],
    ankle: [5.0, 0.0, 5.0, 10.0, 15.0, 0.0, 5.0, 5.0],
};

/// Half step: the right foot leads and the left foot trails all cycle.
const HALF_RIGHT: LegKeys = LegKeys {
    hip: [1.0, 0.75, 0.5, 0.25, 0.0, 0.3, 0.75, 1.0],
    knee: [10.0, 38.0, 35.0, 20.0, 15.0, 30.0, 58.0, 25.0],
    ankle: [5.0, 0.0, 5.0, -5.0, -10.0, -5.0, 5.0, 5.0],
};

const HALF_LEFT: LegKeys = LegKeys {
    hip: [-1.0, -0.8, -0.5, -0.2, 0.0, -0.25, -0.4, -0.75],
    knee: [10.0, 20.0, 25.0, 10.0, 0.0, 0.0, 5.0, 5.0],
    ankle: [-5.0, -5.0, 0.0, 5.0, 5.0, 0.0, -5.0, -5.0],
};

#[derive(Clone, Copy, Debug, PartialEq)]
struct LegCurves {
    hip: PeriodicSpline,
    knee: PeriodicSpline,
    ankle: PeriodicSpline,
}

impl LegCurves {
    fn new(k: &LegKeys) -> Self {
        Self {
            hip: PeriodicSpline::new(k.hip),
            knee: PeriodicSpline::new(k.knee.map(f64::to_radians)),
            ankle: PeriodicSpline::new(k.ankle.map(f64::to_radians)),
        }
    }

    fn at(&self, phase: f64, amplitude: f64) -> LegAngles {
        LegAngles {
            hip_flexion: self.hip.eval(phase) * amplitude,
            hip_abduction: 0.0,
            knee_flexion: self.knee.eval(phase).max(0.0),
            ankle_dorsiflexion: self.ankle.eval(phase),
        }
    }
}

fn arm(phase: f64, swing: f64) -> ArmAngles {
    let shoulder = -swing * (TAU * phase).cos();
    ArmAngles {
        shoulder_flexion: shoulder,
        elbow_flexion: 0.3 + 0.12 * shoulder,
    }
}

fn shifted(phase: f64) -> f64 {
    (phase.rem_euclid(1.0) + 0.5).rem_euclid(1.0)
}

/// Joint angles of `gait` at `phase` for hip amplitude `amplitude` (rad),
/// with no pelvis translation. Phase 0 is right heel strike.
pub fn gait_angles(gait: GaitType, phase: f64, amplitude: f64, options: &GaitOptions) -> PoseAngles {
    let phase = phase.rem_euclid(1.0);
    let normal = LegCurves::new(&NORMAL_RIGHT);
    let (left_leg, right_leg) = match gait {
        GaitType::Normal => (normal.at(shifted(phase), amplitude), normal.at(phase, amplitude)),
        GaitType::LockedLeftKnee => {
            let mut left = normal.at(shifted(phase), amplitude);
            left.knee_flexion = 0.0;
            left.hip_abduction = if phase < 0.5 {
                options.locked_abduction * (TAU * phase).sin().powi(2)
            } else {
                0.0
            };
            (left, normal.at(phase, amplitude))
        }
        GaitType::HalfStep => {
            let a = amplitude * options.half_step_fraction;
            (
                LegCurves::new(&HALF_LEFT).at(phase, a),
                LegCurves::new(&HALF_RIGHT).at(phase, a),
            )
        }
    };
    PoseAngles {
        left_leg,
        right_leg,
        left_arm: arm(shifted(phase), options.arm_swing),
        right_arm: arm(phase, options.arm_swing),
        pelvis: Vec3::zero(),
    }
}

/// A gait with its hip amplitude tuned to the body's step length.
#[derive(Clone, Debug, PartialEq)]
pub struct GaitModel {
    gait: GaitType,
    options: GaitOptions,
    amplitude: f64,
    skeleton: Skeleton,
    heel: [Vec3<f64>; 2],
    sole: [[Vec3<f64>; 2]; 2],
}

impl GaitModel {
    /// Bisects the hip amplitude until the heel-to-heel distance at right
    /// heel strike of the normal gait equals the body's step length.
    pub fn tune(body: &Body, gait: GaitType, options: GaitOptions) -> Result<Self, SynthError> {
        let mut model = Self {
            gait,
            options,
            amplitude: 0.0,
            skeleton: body.weights.skeleton.clone(),
            heel: body.markers.heel,
            sole: body.markers.sole,
        };
        let target = body.params.step_length;
        let (mut lo, mut hi) = (0.0, 1.2);
        if model.step_at(hi) < target {
            return Err(SynthError::StepOutOfReach(target));
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if model.step_at(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        model.amplitude = 0.5 * (lo + hi);
        Ok(model)
    }

    /// Heel-to-heel forward distance at phase 0 of the normal gait.
    fn step_at(&self, amplitude: f64) -> f64 {
        let pose = gait_angles(GaitType::Normal, 0.0, amplitude, &self.options);
        let [l, r] = self.heels(&pose);
        r.z - l.z
    }

    /// Posed heel markers, indexed by [`Side::index`].
    pub fn heels(&self, pose: &PoseAngles) -> [Vec3<f64>; 2] {
        let t = self.skeleton.bone_transforms(pose);
        Side::BOTH.map(|s| t[Joint::ankle(s).index()].apply(self.heel[s.index()]))
    }

    pub fn gait_type(&self) -> GaitType {
        self.gait
    }

    pub fn options(&self) -> &GaitOptions {
        &self.options
    }

    /// Tuned normal-gait hip amplitude, rad.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Full pose at `phase`; the pelvis moves vertically so the lowest sole
    /// contact point touches the ground plane `y = 0`.
    pub fn angles(&self, phase: f64) -> PoseAngles {
        let mut pose = gait_angles(self.gait, phase, self.amplitude, &self.options);
        let t = self.skeleton.bone_transforms(&pose);
        let low = Side::BOTH
            .iter()
            .flat_map(|&s| self.sole[s.index()].map(|p| t[Joint::ankle(s).index()].apply(p).y))
            .fold(f64::INFINITY, f64::min);
        pose.pelvis = Vec3::new(0.0, -low, 0.0);
        pose
    }
}
