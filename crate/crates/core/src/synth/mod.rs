//! Procedural walking body.
//!
//! [`make_body`] builds a closed, mirror-symmetric humanoid with skin
//! weights over a 15-joint rig, [`GaitModel`] turns a gait type and phase
//! into joint angles, and [`Synthesizer`] poses the body into a
//! [`GaitSequence`] of frames sharing one connectivity.

mod body;
mod gait;
mod skeleton;

pub use body::{make_body, ratios, Body, BodyMarkers, BodyParams};
pub use gait::{gait_angles, GaitModel, GaitOptions, GaitType, PeriodicSpline};
pub use skeleton::{
    limits, pose_body, ArmAngles, Influence, Joint, LegAngles, PoseAngles, Skeleton, SkinWeights, JOINT_COUNT,
};

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::vertex_normals;
use crate::mesh::MeshError;
use crate::{Mesh, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("{joint} = {value} rad is outside [{min}, {max}]")]
    JointLimit {
        joint: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{weights} skin weights for {vertices} vertices")]
    WeightCount { weights: usize, vertices: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("body is not mirror symmetric: {0}")]
    Asymmetric(String),
    #[error("step length {0} m is out of reach for this body")]
    StepOutOfReach(f64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// 0 for left, 1 for right.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Contact,
    Low,
    Passing,
    High,
}

/// One of the eight key postures of a cycle. `side` is the leg whose heel
/// strikes at the cycle's contact posture, i.e. the leading leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PostureLabel {
    pub phase: Phase,
    pub side: Side,
}

impl PostureLabel {
    /// Key postures in cycle order, starting at right heel strike.
    pub const CYCLE: [PostureLabel; 8] = [
        PostureLabel {
            phase: Phase::Contact,
            side: Side::Right,
        },
        PostureLabel {
            phase: Phase::Low,
            side: Side::Right,
        },
        PostureLabel {
            phase: Phase::Passing,
            side: Side::Right,
        },
        PostureLabel {
            phase: Phase::High,
            side: Side::Right,
        },
        PostureLabel {
            phase: Phase::Contact,
            side: Side::Left,
        },
        PostureLabel {
            phase: Phase::Low,
            side: Side::Left,
        },
        PostureLabel {
            phase: Phase::Passing,
            side: Side::Left,
        },
        PostureLabel {
            phase: Phase::High,
            side: Side::Left,
        },
    ];

    /// Label of key posture `k` (mod 8).
    pub fn key(k: usize) -> Self {
        Self::CYCLE[k % 8]
    }

    /// Label at a frame, if the frame falls on one of the eight key phases.
    pub fn at_frame(frame: usize, frames_per_cycle: usize) -> Option<Self> {
        let i = frame % frames_per_cycle;
        (i * 8)
            .is_multiple_of(frames_per_cycle)
            .then(|| Self::key(i * 8 / frames_per_cycle))
    }
}

impl fmt::Display for PostureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phase = match self.phase {
            Phase::Contact => "contact",
            Phase::Low => "low",
            Phase::Passing => "passing",
            Phase::High => "high",
        };
        write!(f, "{phase}-{}", self.side)
    }
}

/// Gaussian vertex jitter along the normals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    /// Standard deviation, m.
    pub sigma: f64,
    /// Frame `i` draws from a generator seeded with `seed + i`.
    pub seed: u64,
}

/// Frames of a gait, all sharing the rest body's triangles.
#[derive(Clone, Debug)]
pub struct GaitSequence {
    pub frames: Vec<Mesh>,
    pub labels: Vec<Option<PostureLabel>>,
    pub frames_per_cycle: usize,
    pub cycles: usize,
    pub gait_type: GaitType,
    pub body_height: f64,
    pub step_length: f64,
}

/// Checks a cycle layout: at least one cycle, an even number of frames per
/// cycle and no fewer than eight.
pub fn check_layout(cycles: usize, frames_per_cycle: usize) -> Result<(), SynthError> {
    if cycles == 0 {
        return Err(SynthError::InvalidParams("at least one cycle required".into()));
    }
    if frames_per_cycle < 8 || !frames_per_cycle.is_multiple_of(2) {
        return Err(SynthError::InvalidParams(format!(
            "frames per cycle must be even and at least 8, got {frames_per_cycle}"
        )));
    }
    Ok(())
}

impl GaitSequence {
    /// Wraps frames after checking layout and shared connectivity.
    pub fn new(
        frames: Vec<Mesh>,
        frames_per_cycle: usize,
        gait_type: GaitType,
        body_height: f64,
        step_length: f64,
    ) -> Result<Self, SynthError> {
        if frames.is_empty() || !frames.len().is_multiple_of(frames_per_cycle.max(1)) {
            return Err(SynthError::InvalidParams(format!(
                "{} frames do not fill whole cycles of {frames_per_cycle}",
                frames.len()
            )));
        }
        let cycles = frames.len() / frames_per_cycle;
        check_layout(cycles, frames_per_cycle)?;
        if let Some(i) = frames.iter().position(|f| !f.same_connectivity(&frames[0])) {
            return Err(SynthError::InvalidParams(format!(
                "frame {i} has different connectivity from frame 0"
            )));
        }
        let labels = (0..frames.len())
            .map(|i| PostureLabel::at_frame(i, frames_per_cycle))
            .collect();
        Ok(Self {
            frames,
            labels,
            frames_per_cycle,
            cycles,
            gait_type,
            body_height,
            step_length,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Phase fraction of frame `i` within its cycle.
    pub fn phase(&self, i: usize) -> f64 {
        (i % self.frames_per_cycle) as f64 / self.frames_per_cycle as f64
    }
}

/// Rest body plus a tuned gait, ready to pose frames.
#[derive(Clone, Debug)]
pub struct Synthesizer {
    pub body: Body,
    pub model: GaitModel,
}

impl Synthesizer {
    pub fn new(params: &BodyParams, gait: GaitType) -> Result<Self, SynthError> {
        let body = make_body(params)?;
        let model = GaitModel::tune(&body, gait, GaitOptions::default())?;
        Ok(Self { body, model })
    }

    pub fn pose(&self, phase: f64) -> PoseAngles {
        self.model.angles(phase)
    }

    pub fn frame(&self, phase: f64) -> Result<Mesh, SynthError> {
        pose_body(&self.body.mesh, &self.body.weights, &self.pose(phase))
    }

    /// Posed knee joint centers, indexed by [`Side::index`].
    pub fn knee_centers(&self, phase: f64) -> [Point; 2] {
        let p = self.body.weights.skeleton.posed_pivots(&self.pose(phase));
        [p[Joint::LeftKnee.index()], p[Joint::RightKnee.index()]]
    }

    /// Posed kneecap apex positions, indexed by [`Side::index`].
    pub fn patella_positions(&self, frame: &Mesh) -> [Point; 2] {
        self.body.markers.patella.map(|v| frame.vertices()[v])
    }

    pub fn sequence(
        &self,
        cycles: usize,
        frames_per_cycle: usize,
        noise: Option<Noise>,
    ) -> Result<GaitSequence, SynthError> {
        check_layout(cycles, frames_per_cycle)?;
        if let Some(n) = noise {
            if !(n.sigma.is_finite() && n.sigma >= 0.0) {
                return Err(SynthError::InvalidParams(format!(
                    "noise sigma must be non-negative, got {}",
                    n.sigma
                )));
            }
        }
        // One cycle is posed; later cycles repeat it exactly.
        let cycle: Vec<Mesh> = (0..frames_per_cycle)
            .into_par_iter()
            .map(|i| self.frame(i as f64 / frames_per_cycle as f64))
            .collect::<Result<_, _>>()?;
        let mut frames: Vec<Mesh> = (0..cycles).flat_map(|_| cycle.iter().cloned()).collect();
        if let Some(n) = noise.filter(|n| n.sigma > 0.0) {
            frames = frames
                .into_par_iter()
                .enumerate()
                .map(|(i, f)| jitter(&f, n, i as u64))
                .collect::<Result<_, _>>()?;
        }
        GaitSequence::new(
            frames,
            frames_per_cycle,
            self.model.gait_type(),
            self.body.params.height,
            self.body.params.step_length,
        )
    }
}

fn jitter(mesh: &Mesh, noise: Noise, frame: u64) -> Result<Mesh, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed.wrapping_add(frame));
    let normal = Normal::new(0.0, noise.sigma).map_err(|e| SynthError::InvalidParams(e.to_string()))?;
    let normals = vertex_normals(mesh);
    let moved = mesh
        .vertices()
        .iter()
        .zip(&normals)
        .map(|(&p, &n)| p + n * normal.sample(&mut rng))
        .collect();
    Ok(mesh.with_positions(moved)?)
}

/// Builds the body, tunes the gait and poses `cycles × frames_per_cycle`
/// noise-free frames.
pub fn synth_gait(
    params: &BodyParams,
    gait: GaitType,
    cycles: usize,
    frames_per_cycle: usize,
) -> Result<GaitSequence, SynthError> {
    check_layout(cycles, frames_per_cycle)?;
    Synthesizer::new(params, gait)?.sequence(cycles, frames_per_cycle, None)
}
