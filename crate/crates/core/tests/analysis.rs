use std::sync::OnceLock;

use curvegait::analysis::{
    average_curvature_map, average_values, check_connectivity, classify_symmetry, detect_knee_region, knee_series_csv,
    knee_time_series_from, self_mirror_index, sequence_fields, symmetry_report, to_json_rounded, AnalysisError,
    KneeTimeSeries, RegionParams, SymmetryClass, DEFAULT_TAU,
};
use curvegait::curvature::{curvature_field, CurvatureKind};
use curvegait::geom::Vec3;
use curvegait::synth::{BodyParams, GaitSequence, GaitType, Side, Synthesizer};
use curvegait::Field;
use proptest::prelude::*;

struct Run {
    synth: Synthesizer,
    seq: GaitSequence,
    fields: Vec<Field>,
    series: KneeTimeSeries,
}

fn run(gait: GaitType) -> &'static Run {
    static CELLS: [OnceLock<Run>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = GaitType::ALL.iter().position(|&g| g == gait).unwrap();
    CELLS[i].get_or_init(|| {
        let synth = Synthesizer::new(&BodyParams::default(), gait).unwrap();
        let seq = synth.sequence(2, 8, None).unwrap();
        let fields = sequence_fields(&seq.frames).unwrap();
        let series = knee_time_series_from(&seq.frames, &fields, 8, 1.73, &RegionParams::default()).unwrap();
        Run {
            synth,
            seq,
            fields,
            series,
        }
    })
}

#[test]
fn knee_found_at_the_kneecap() {
    let r = run(GaitType::Normal);
    for (i, f) in r.series.frames.iter().enumerate() {
        let marks = r.synth.patella_positions(&r.seq.frames[i]);
        for side in Side::BOTH {
            let c = r.seq.frames[i].vertices()[f.regions[side.index()].center];
            let d = c.distance(marks[side.index()]);
            assert!(d < 0.02, "frame {i} {side}: {d}");
        }
        assert!(f.means.iter().all(|m| m.count > 0 && !m.fallback));
    }
}

#[test]
fn rest_body_has_no_self_asymmetry() {
    let body = &run(GaitType::Normal).synth.body;
    let f = curvature_field(&body.mesh).unwrap();
    for kind in CurvatureKind::BASIC {
        let idx = self_mirror_index(&body.mesh, f.values(kind), |v| f.is_reliable(v), 1.73);
        assert!(idx < 1e-6, "{kind}: {idx}");
    }
}

#[test]
fn region_members_stay_on_their_side() {
    let r = run(GaitType::HalfStep);
    for f in &r.series.frames {
        let mesh = &r.seq.frames[f.frame];
        let plane = curvegait::analysis::sagittal_x(mesh);
        for reg in &f.regions {
            let c = mesh.vertices()[reg.center];
            assert!((0.25 * 1.73..=0.30 * 1.73).contains(&c.y));
            for &v in &reg.members {
                let p = mesh.vertices()[v];
                assert!(p.distance(c) <= reg.radius);
                assert_eq!(p.x > plane, reg.side == Side::Left);
            }
        }
    }
}

#[test]
fn normal_gait_classified_symmetric() {
    let c = classify_symmetry(&run(GaitType::Normal).series, DEFAULT_TAU).unwrap();
    assert_eq!(c.class, SymmetryClass::SymmetricNormal);
    assert!(c.breakdown.iter().all(|d| d.max_relative < 0.01));
}

#[test]
fn abnormal_gaits_classified_anomalous() {
    for gait in [GaitType::LockedLeftKnee, GaitType::HalfStep] {
        let c = classify_symmetry(&run(gait).series, DEFAULT_TAU).unwrap();
        assert_eq!(c.class, SymmetryClass::AsymmetricAnomalous, "{gait}");
    }
}

#[test]
fn classification_ignores_whole_cycle_rotation() {
    for gait in GaitType::ALL {
        let s = &run(gait).series;
        let base = classify_symmetry(s, DEFAULT_TAU).unwrap();
        let mut rotated = s.clone();
        rotated.frames.rotate_left(8);
        let c = classify_symmetry(&rotated, DEFAULT_TAU).unwrap();
        assert_eq!(c.class, base.class);
        assert!((c.nrmsd - base.nrmsd).abs() < 1e-12);
    }
}

#[test]
fn pair_report_on_identical_halves() {
    let r = run(GaitType::Normal);
    let rp = RegionParams::default();
    let e = symmetry_report(
        (&r.seq.frames[1], &r.fields[1]),
        (&r.seq.frames[5], &r.fields[5]),
        CurvatureKind::Gaussian,
        1.73,
        &rp,
    )
    .unwrap();
    assert!(e.asymmetry_index < 1e-6, "{}", e.asymmetry_index);
    assert!(e.knee_discrepancy < 1e-9);
    assert_eq!(e.far_fraction, 0.0);
}

#[test]
fn far_correspondence_is_rejected() {
    let r = run(GaitType::Normal);
    let lifted = r.seq.frames[4].map_positions(|p| p + Vec3::new(0.0, 0.5, 0.0));
    let f = curvature_field(&lifted).unwrap();
    let e = symmetry_report(
        (&r.seq.frames[0], &r.fields[0]),
        (&lifted, &f),
        CurvatureKind::Gaussian,
        1.73,
        &RegionParams::default(),
    );
    assert!(matches!(e, Err(AnalysisError::Correspondence { .. })), "{e:?}");
}

#[test]
fn average_map_checks_cycle() {
    let r = run(GaitType::Normal);
    let a = average_curvature_map(&r.seq.frames, &r.fields, 8, CurvatureKind::Mean, 1).unwrap();
    assert_eq!(a.frames, (8, 16));
    assert!(matches!(
        average_curvature_map(&r.seq.frames, &r.fields, 8, CurvatureKind::Mean, 2),
        Err(AnalysisError::CycleOutOfRange { .. })
    ));
    // Cycles repeat exactly, so both cycles average to the same map.
    let b = average_curvature_map(&r.seq.frames, &r.fields, 8, CurvatureKind::Mean, 0).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn mixed_connectivity_is_rejected() {
    let r = run(GaitType::Normal);
    let other = curvegait::mesh::shapes::icosphere::<f64>(1.0, 2);
    assert!(matches!(
        check_connectivity(&[r.seq.frames[0].clone(), other]),
        Err(AnalysisError::Connectivity { frame: 1 })
    ));
}

#[test]
fn knee_detection_is_deterministic() {
    let r = run(GaitType::LockedLeftKnee);
    let rp = RegionParams::default();
    let again = knee_time_series_from(&r.seq.frames, &r.fields, 8, 1.73, &rp).unwrap();
    assert_eq!(again, r.series);
    assert_eq!(knee_series_csv(&again), knee_series_csv(&r.series));
    assert_eq!(to_json_rounded(&again).unwrap(), to_json_rounded(&r.series).unwrap());
    let d = detect_knee_region(&r.seq.frames[3], &r.fields[3], Side::Right, 1.73, &rp).unwrap();
    assert_eq!(d, r.series.frames[3].regions[Side::Right.index()]);
}

fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
    v.iter().map(Vec::as_slice).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn averaging_is_linear(
        a in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 16), 1..10),
        s in -4.0f64..4.0,
        t in -4.0f64..4.0,
    ) {
        let b: Vec<Vec<f64>> = a.iter().map(|row| row.iter().map(|x| x.sin() * 7.0).collect()).collect();
        let combo: Vec<Vec<f64>> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| s * p + t * q).collect())
            .collect();
        let (ma, mb, mc) = (average_values(&refs(&a)), average_values(&refs(&b)), average_values(&refs(&combo)));
        for i in 0..16 {
            prop_assert!((mc[i] - (s * ma[i] + t * mb[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_frames_average_exactly(row in prop::collection::vec(-1e6f64..1e6, 8), n in 1usize..16) {
        let frames = vec![row.as_slice(); n];
        prop_assert_eq!(average_values(&frames), row.clone());
    }
}
