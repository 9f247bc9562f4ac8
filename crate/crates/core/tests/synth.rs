use std::sync::OnceLock;

use curvegait::mesh::validate;
use curvegait::synth::{
    check_layout, gait_angles, make_body, pose_body, ratios, BodyParams, GaitOptions, GaitType, Joint, LegAngles,
    PoseAngles, Side, Synthesizer,
};
use curvegait::Mesh;

fn synth(gait: GaitType) -> &'static Synthesizer {
    static CELLS: [OnceLock<Synthesizer>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = GaitType::ALL.iter().position(|&g| g == gait).unwrap();
    CELLS[i].get_or_init(|| Synthesizer::new(&BodyParams::default(), gait).unwrap())
}

/// Largest distance between each vertex and the reflection of its mirror
/// partner.
fn mirror_gap(mesh: &Mesh, other: &Mesh, mirror: &[usize]) -> f64 {
    let (p, q) = (mesh.vertices(), other.vertices());
    (0..p.len())
        .map(|v| p[v].distance(q[mirror[v]].mirror_x()))
        .fold(0.0, f64::max)
}

#[test]
fn rest_body_is_a_closed_sphere() {
    let body = &synth(GaitType::Normal).body;
    let r = validate(&body.mesh);
    assert!(r.is_valid() && r.is_closed(), "{r:?}");
    assert_eq!(r.euler_characteristic, 2);
    let (lo, hi) = body.mesh.bounds().unwrap();
    assert!(lo.y >= -1e-12 && (hi.y - 1.73).abs() < 0.02, "{lo:?} {hi:?}");
}

#[test]
fn rest_body_is_mirror_symmetric() {
    let body = &synth(GaitType::Normal).body;
    assert!(mirror_gap(&body.mesh, &body.mesh, &body.mirror) < 1e-9);
    let [l, r] = body.markers.patella;
    assert_eq!(body.mirror[l], r);
}

#[test]
fn kneecap_marker_at_knee_height() {
    let body = &synth(GaitType::Normal).body;
    for v in body.markers.patella {
        let p = body.mesh.vertices()[v];
        assert!((p.y - ratios::KNEE * 1.73).abs() < 0.01, "{p:?}");
    }
    let left = body.mesh.vertices()[body.markers.patella[Side::Left.index()]];
    assert!(left.x > 0.0 && left.z > 0.0);
}

#[test]
fn identity_pose_reproduces_rest() {
    let body = &synth(GaitType::Normal).body;
    let posed = pose_body(&body.mesh, &body.weights, &PoseAngles::default()).unwrap();
    assert_eq!(posed.vertices(), body.mesh.vertices());
    assert!(posed.same_connectivity(&body.mesh));
}

#[test]
fn mirrored_angles_give_mirror_image() {
    let s = synth(GaitType::Normal);
    let body = &s.body;
    for phase in [0.0, 0.125, 0.3, 0.7] {
        let a = s.pose(phase);
        let p = pose_body(&body.mesh, &body.weights, &a).unwrap();
        let q = pose_body(&body.mesh, &body.weights, &a.mirrored()).unwrap();
        assert!(mirror_gap(&p, &q, &body.mirror) < 1e-9, "phase {phase}");
    }
}

#[test]
fn right_angle_knee_bends_shank_perpendicular() {
    let body = &synth(GaitType::Normal).body;
    let a = PoseAngles {
        left_leg: LegAngles {
            knee_flexion: std::f64::consts::FRAC_PI_2,
            ..Default::default()
        },
        ..Default::default()
    };
    let p = body.weights.skeleton.posed_pivots(&a);
    let thigh = p[Joint::LeftKnee.index()] - p[Joint::LeftHip.index()];
    let shank = p[Joint::LeftAnkle.index()] - p[Joint::LeftKnee.index()];
    let cos = thigh.dot(shank) / (thigh.norm() * shank.norm());
    assert!(cos.abs() < 1e-12, "cos {cos}");
    assert!(shank.z < 0.0, "shank folds backward");
}

#[test]
fn joint_limits_are_enforced() {
    let body = &synth(GaitType::Normal).body;
    let mut a = PoseAngles::default();
    a.right_leg.knee_flexion = -0.2;
    assert!(pose_body(&body.mesh, &body.weights, &a).is_err());
}

#[test]
fn frames_repeat_every_cycle() {
    let s = synth(GaitType::HalfStep);
    let seq = s.sequence(2, 8, None).unwrap();
    assert_eq!(seq.len(), 16);
    for i in 0..8 {
        assert_eq!(seq.frames[i].vertices(), seq.frames[i + 8].vertices());
        assert!(seq.frames[i].same_connectivity(&seq.frames[0]));
    }
    let f = s.frame(0.25).unwrap();
    assert_eq!(f.vertices(), seq.frames[2].vertices());
}

#[test]
fn normal_half_cycle_is_a_mirror_image() {
    let s = synth(GaitType::Normal);
    for k in 0..4 {
        let a = s.frame(k as f64 / 8.0).unwrap();
        let b = s.frame((k + 4) as f64 / 8.0).unwrap();
        // Walking direction is shared, so reflect in x only.
        assert!(mirror_gap(&a, &b, &s.body.mirror) < 1e-9, "frame {k}");
    }
}

#[test]
fn heels_step_the_tuned_length() {
    let s = synth(GaitType::Normal);
    let h = s.model.heels(&s.pose(0.0));
    assert!(((h[0].z - h[1].z).abs() - 0.65).abs() < 1e-3, "{h:?}");
    for k in 0..8 {
        let f = s.frame(k as f64 / 8.0).unwrap();
        let (lo, _) = f.bounds().unwrap();
        assert!(lo.y > -0.03 && lo.y < 0.03, "frame {k}: {}", lo.y);
    }
}

#[test]
fn upper_body_matches_normal() {
    let normal = synth(GaitType::Normal);
    let limit = 0.55 * 1.73;
    for gait in [GaitType::LockedLeftKnee, GaitType::HalfStep] {
        let s = synth(gait);
        for k in 0..8 {
            let phase = k as f64 / 8.0;
            let (a, b) = (normal.frame(phase).unwrap(), s.frame(phase).unwrap());
            let shift = normal.pose(phase).pelvis - s.pose(phase).pelvis;
            let mut checked = 0;
            for (p, q) in a.vertices().iter().zip(b.vertices()) {
                if p.y > limit {
                    assert!(p.distance(*q + shift) < 1e-6, "{gait} frame {k}");
                    checked += 1;
                }
            }
            assert!(checked > 1000);
        }
    }
}

#[test]
fn locked_left_knee_never_bends() {
    let o = GaitOptions::default();
    for i in 0..64 {
        let phase = i as f64 / 64.0;
        let a = gait_angles(GaitType::LockedLeftKnee, phase, 0.3, &o);
        assert_eq!(a.left_leg.knee_flexion, 0.0);
        assert!(a.right_leg.knee_flexion > 0.0);
        let abd = a.left_leg.hip_abduction;
        if phase < 0.5 {
            let want = o.locked_abduction * (std::f64::consts::TAU * phase).sin().powi(2);
            assert!((abd - want).abs() < 1e-12);
        } else {
            assert_eq!(abd, 0.0);
        }
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let low = BodyParams {
        radial_segments: 6,
        ..Default::default()
    };
    assert!(make_body(&low).is_err());
    let short = BodyParams {
        height: -1.0,
        ..Default::default()
    };
    assert!(make_body(&short).is_err());
    assert!(check_layout(2, 7).is_err());
    assert!(check_layout(2, 6).is_err());
    assert!(check_layout(1, 10).is_ok());
    assert!(synth(GaitType::Normal).sequence(1, 9, None).is_err());
}
