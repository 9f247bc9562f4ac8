use curvegait::colormap::{auto_scale, colorize_mesh, map_to_color, ScaleMode, BLUE, GREEN, RED};
use curvegait::curvature::curvature_field;
use curvegait::mesh::io::{read_mesh, save_mesh, MeshFormat};
use curvegait::mesh::{shapes, validate};
use curvegait::synth::{make_body, BodyParams};
use curvegait::Mesh;

fn max_offset(a: &Mesh, b: &Mesh) -> f64 {
    a.vertices()
        .iter()
        .zip(b.vertices())
        .map(|(p, q)| p.distance(*q))
        .fold(0.0, f64::max)
}

#[test]
fn body_round_trips_through_both_formats() {
    let body = make_body(&BodyParams::default()).unwrap();
    let field = curvature_field(&body.mesh).unwrap();
    let scale = auto_scale(&field.gaussian, ScaleMode::Symmetric).unwrap();
    let colors = colorize_mesh(&body.mesh, &field.gaussian, &scale).unwrap();
    for format in [MeshFormat::Obj, MeshFormat::Ply] {
        let bytes = save_mesh(&body.mesh, Some(&colors), format).unwrap();
        let back = read_mesh::<f64>(&bytes, format).unwrap();
        assert_eq!(back.mesh.triangles(), body.mesh.triangles(), "{format:?}");
        assert!(max_offset(&back.mesh, &body.mesh) < 1e-6, "{format:?}");
        assert_eq!(back.colors.as_deref(), Some(colors.as_slice()));
        assert_eq!(save_mesh(&back.mesh, back.colors.as_deref(), format).unwrap(), bytes);
    }
}

#[test]
fn saving_is_deterministic() {
    let m = shapes::torus::<f64>(1.0, 0.4, 20, 10);
    for format in [MeshFormat::Obj, MeshFormat::Ply] {
        assert_eq!(
            save_mesh(&m, None, format).unwrap(),
            save_mesh(&m, None, format).unwrap()
        );
    }
}

#[test]
fn loaded_mesh_keeps_topology() {
    let m = shapes::icosphere::<f64>(0.2, 3);
    let bytes = save_mesh(&m, None, MeshFormat::Ply).unwrap();
    let back = read_mesh::<f64>(&bytes, MeshFormat::Ply).unwrap();
    assert!(back.colors.is_none());
    let (a, b) = (validate(&m), validate(&back.mesh));
    assert_eq!(a, b);
    assert_eq!(b.euler_characteristic, 2);
}

#[test]
fn color_ramp_endpoints() {
    let field = [-3.0, -1.0, 0.0, 1.0, 3.0];
    let scale = auto_scale(&field, ScaleMode::Symmetric).unwrap();
    assert_eq!(scale.center, 0.0);
    assert_eq!(scale.vmax, -scale.vmin);
    assert_eq!(map_to_color(-100.0, &scale), BLUE);
    assert_eq!(map_to_color(0.0, &scale), GREEN);
    assert_eq!(map_to_color(100.0, &scale), RED);
}
