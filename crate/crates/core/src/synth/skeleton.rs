use serde::{Deserialize, Serialize};

use super::{Side, SynthError};
use crate::geom::{Mat3, Rigid, Vec3};
use crate::{Mesh, Point};

/// The 15 joints of the rig. Each joint drives the bone distal to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Joint {
    Pelvis,
    Spine,
    Neck,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    RightShoulder,
    RightElbow,
    RightWrist,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    RightHip,
    RightKnee,
    RightAnkle,
}

pub const JOINT_COUNT: usize = 15;

impl Joint {
    pub const ALL: [Joint; JOINT_COUNT] = [
        Joint::Pelvis,
        Joint::Spine,
        Joint::Neck,
        Joint::LeftShoulder,
        Joint::LeftElbow,
        Joint::LeftWrist,
        Joint::RightShoulder,
        Joint::RightElbow,
        Joint::RightWrist,
        Joint::LeftHip,
        Joint::LeftKnee,
        Joint::LeftAnkle,
        Joint::RightHip,
        Joint::RightKnee,
        Joint::RightAnkle,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parent(self) -> Option<Joint> {
        use Joint::*;
        Some(match self {
            Pelvis => return None,
            Spine | LeftHip | RightHip => Pelvis,
            Neck | LeftShoulder | RightShoulder => Spine,
            LeftElbow => LeftShoulder,
            LeftWrist => LeftElbow,
            RightElbow => RightShoulder,
            RightWrist => RightElbow,
            LeftKnee => LeftHip,
            LeftAnkle => LeftKnee,
            RightKnee => RightHip,
            RightAnkle => RightKnee,
        })
    }

    /// Same joint on the other side of the body.
    pub fn mirrored(self) -> Joint {
        use Joint::*;
        match self {
            LeftShoulder => RightShoulder,
            LeftElbow => RightElbow,
            LeftWrist => RightWrist,
            RightShoulder => LeftShoulder,
            RightElbow => LeftElbow,
            RightWrist => LeftWrist,
            LeftHip => RightHip,
            LeftKnee => RightKnee,
            LeftAnkle => RightAnkle,
            RightHip => LeftHip,
            RightKnee => LeftKnee,
            RightAnkle => LeftAnkle,
            other => other,
        }
    }

    pub fn hip(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftHip,
            Side::Right => Joint::RightHip,
        }
    }

    pub fn knee(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftKnee,
            Side::Right => Joint::RightKnee,
        }
    }

    pub fn ankle(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftAnkle,
            Side::Right => Joint::RightAnkle,
        }
    }

    pub fn shoulder(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftShoulder,
            Side::Right => Joint::RightShoulder,
        }
    }

    pub fn elbow(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftElbow,
            Side::Right => Joint::RightElbow,
        }
    }

    pub fn wrist(side: Side) -> Joint {
        match side {
            Side::Left => Joint::LeftWrist,
            Side::Right => Joint::RightWrist,
        }
    }
}

/// Rest-pose pivot of every joint.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    pub pivots: [Point; JOINT_COUNT],
}

impl Skeleton {
    pub fn pivot(&self, j: Joint) -> Point {
        self.pivots[j.index()]
    }

    /// World transform of every bone for `angles`, mapping rest positions to
    /// posed positions. Parents precede children in [`Joint::ALL`].
    pub fn bone_transforms(&self, angles: &PoseAngles) -> [Rigid<f64>; JOINT_COUNT] {
        let mut out = [Rigid::identity(); JOINT_COUNT];
        for j in Joint::ALL {
            let local = match j {
                Joint::Pelvis => Rigid::translation(angles.pelvis),
                _ => Rigid::about(self.pivot(j), angles.local_rotation(j)),
            };
            out[j.index()] = match j.parent() {
                Some(p) => out[p.index()].compose(&local),
                None => local,
            };
        }
        out
    }

    /// Posed pivot positions.
    pub fn posed_pivots(&self, angles: &PoseAngles) -> [Point; JOINT_COUNT] {
        let t = self.bone_transforms(angles);
        let mut out = [Point::zero(); JOINT_COUNT];
        for j in Joint::ALL {
            out[j.index()] = t[j.index()].apply(self.pivot(j));
        }
        out
    }
}

/// Up to two bone influences per vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Influence {
    pub joints: [Joint; 2],
    pub weights: [f64; 2],
}

impl Influence {
    pub fn single(j: Joint) -> Self {
        Self {
            joints: [j, j],
            weights: [1.0, 0.0],
        }
    }

    /// `w` on `b`, `1 − w` on `a`.
    pub fn blend(a: Joint, b: Joint, w: f64) -> Self {
        if w <= 0.0 {
            Self::single(a)
        } else if w >= 1.0 {
            Self::single(b)
        } else {
            Self {
                joints: [a, b],
                weights: [1.0 - w, w],
            }
        }
    }

    pub fn mirrored(self) -> Self {
        Self {
            joints: [self.joints[0].mirrored(), self.joints[1].mirrored()],
            weights: self.weights,
        }
    }

    pub fn weight_of(&self, j: Joint) -> f64 {
        (0..2).filter(|&k| self.joints[k] == j).map(|k| self.weights[k]).sum()
    }
}

/// Skinning data for a rest mesh: pivots plus per-vertex influences.
#[derive(Clone, Debug, PartialEq)]
pub struct SkinWeights {
    pub skeleton: Skeleton,
    pub influences: Vec<Influence>,
}

impl SkinWeights {
    pub fn len(&self) -> usize {
        self.influences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.influences.is_empty()
    }
}

/// Sagittal-plane and lateral angles of one leg, radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LegAngles {
    /// Thigh forward of vertical.
    pub hip_flexion: f64,
    /// Thigh away from the midline.
    pub hip_abduction: f64,
    /// Shank backward relative to the thigh.
    pub knee_flexion: f64,
    /// Toes up relative to the shank.
    pub ankle_dorsiflexion: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmAngles {
    /// Upper arm forward of vertical.
    pub shoulder_flexion: f64,
    /// Forearm forward relative to the upper arm.
    pub elbow_flexion: f64,
}

/// Full-body pose. The default is the rest pose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoseAngles {
    pub left_leg: LegAngles,
    pub right_leg: LegAngles,
    pub left_arm: ArmAngles,
    pub right_arm: ArmAngles,
    /// Whole-body translation, m.
    pub pelvis: Point,
}

/// Inclusive joint limits in radians.
pub mod limits {
    pub const HIP_FLEXION: (f64, f64) = (-0.8, 2.0);
    pub const HIP_ABDUCTION: (f64, f64) = (-0.5, 0.8);
    pub const KNEE_FLEXION: (f64, f64) = (0.0, 2.6);
    pub const ANKLE_DORSIFLEXION: (f64, f64) = (-0.9, 0.6);
    pub const SHOULDER_FLEXION: (f64, f64) = (-1.2, 3.0);
    pub const ELBOW_FLEXION: (f64, f64) = (0.0, 2.6);
}

impl PoseAngles {
    pub fn leg(&self, side: Side) -> &LegAngles {
        match side {
            Side::Left => &self.left_leg,
            Side::Right => &self.right_leg,
        }
    }

    pub fn arm(&self, side: Side) -> &ArmAngles {
        match side {
            Side::Left => &self.left_arm,
            Side::Right => &self.right_arm,
        }
    }

    /// Left and right swapped; the pose of the mirror-image body.
    pub fn mirrored(&self) -> Self {
        Self {
            left_leg: self.right_leg,
            right_leg: self.left_leg,
            left_arm: self.right_arm,
            right_arm: self.left_arm,
            pelvis: self.pelvis.mirror_x(),
        }
    }

    pub fn check_limits(&self) -> Result<(), SynthError> {
        let check = |name: &'static str, v: f64, (lo, hi): (f64, f64)| {
            if v.is_finite() && (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(SynthError::JointLimit {
                    joint: name,
                    value: v,
                    min: lo,
                    max: hi,
                })
            }
        };
        for (tag, leg) in [("left", &self.left_leg), ("right", &self.right_leg)] {
            let n = |s: &'static str, l: &'static str| if tag == "left" { s } else { l };
            check(
                n("left hip flexion", "right hip flexion"),
                leg.hip_flexion,
                limits::HIP_FLEXION,
            )?;
            check(
                n("left hip abduction", "right hip abduction"),
                leg.hip_abduction,
                limits::HIP_ABDUCTION,
            )?;
            check(
                n("left knee flexion", "right knee flexion"),
                leg.knee_flexion,
                limits::KNEE_FLEXION,
            )?;
            check(
                n("left ankle dorsiflexion", "right ankle dorsiflexion"),
                leg.ankle_dorsiflexion,
                limits::ANKLE_DORSIFLEXION,
            )?;
        }
        for (tag, arm) in [("left", &self.left_arm), ("right", &self.right_arm)] {
            let n = |s: &'static str, l: &'static str| if tag == "left" { s } else { l };
            check(
                n("left shoulder flexion", "right shoulder flexion"),
                arm.shoulder_flexion,
                limits::SHOULDER_FLEXION,
            )?;
            check(
                n("left elbow flexion", "right elbow flexion"),
                arm.elbow_flexion,
                limits::ELBOW_FLEXION,
            )?;
        }
        if !(self.pelvis.x.is_finite() && self.pelvis.y.is_finite() && self.pelvis.z.is_finite()) {
            return Err(SynthError::JointLimit {
                joint: "pelvis translation",
                value: f64::NAN,
                min: f64::NEG_INFINITY,
                max: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// Rotation of joint `j` relative to its parent bone.
    fn local_rotation(&self, j: Joint) -> Mat3<f64> {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let z = Vec3::new(0.0, 0.0, 1.0);
        // About +x, a positive angle swings a downward segment backward.
        let forward = |a: f64| Mat3::rotation(x, -a);
        let leg = |side: Side| {
            let l = self.leg(side);
            // Outward is +x on the left, −x on the right.
            let out = match side {
                Side::Left => l.hip_abduction,
                Side::Right => -l.hip_abduction,
            };
            Mat3::rotation(z, out).mul_mat(&forward(l.hip_flexion))
        };
        match j {
            Joint::LeftHip => leg(Side::Left),
            Joint::RightHip => leg(Side::Right),
            Joint::LeftKnee => Mat3::rotation(x, self.left_leg.knee_flexion),
            Joint::RightKnee => Mat3::rotation(x, self.right_leg.knee_flexion),
            Joint::LeftAnkle => forward(self.left_leg.ankle_dorsiflexion),
            Joint::RightAnkle => forward(self.right_leg.ankle_dorsiflexion),
            Joint::LeftShoulder => forward(self.left_arm.shoulder_flexion),
            Joint::RightShoulder => forward(self.right_arm.shoulder_flexion),
            Joint::LeftElbow => forward(self.left_arm.elbow_flexion),
            Joint::RightElbow => forward(self.right_arm.elbow_flexion),
            _ => Mat3::identity(),
        }
    }
}

/// Linear-blend skinning of `rest` by `angles`.
pub fn pose_body(rest: &Mesh, weights: &SkinWeights, angles: &PoseAngles) -> Result<Mesh, SynthError> {
    if weights.len() != rest.vertex_count() {
        return Err(SynthError::WeightCount {
            weights: weights.len(),
            vertices: rest.vertex_count(),
        });
    }
    angles.check_limits()?;
    let t = weights.skeleton.bone_transforms(angles);
    let posed = rest
        .vertices()
        .iter()
        .zip(&weights.influences)
        .map(|(&p, inf)| {
            let (ta, tb) = (&t[inf.joints[0].index()], &t[inf.joints[1].index()]);
            let a = ta.apply(p);
            if inf.weights[1] == 0.0 || ta == tb {
                a
            } else {
                a * inf.weights[0] + tb.apply(p) * inf.weights[1]
            }
        })
        .collect();
    Ok(rest.with_positions(posed)?)
}
