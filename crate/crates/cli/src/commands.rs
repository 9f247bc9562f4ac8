use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use curvegait::analysis::{
    average_curvature_map, check_connectivity, classify_symmetry, knee_series_csv, knee_time_series_from,
    sequence_fields, symmetry_reports, Classification, RegionParams,
};
use curvegait::colormap::{auto_scale, colorize_mesh, ColorScale, ScaleMode};
use curvegait::curvature::{angle_deficits, curvature_field, CurvatureKind};
use curvegait::mesh::io::{read_mesh_file, save_mesh, MeshFormat};
use curvegait::mesh::{build_one_rings, validate as validate_mesh, ValidationReport};
use curvegait::synth::{BodyParams, GaitType, Noise, Side, Synthesizer};
use curvegait::{Mesh, Scale};

use crate::output::OutDir;
use crate::{Analysis, AnalyzeArgs, ColorArgs, CurvArgs, SynthArgs, ValidateArgs};

pub const SEQUENCE_MANIFEST: &str = "sequence.json";

/// Frame files of a sequence and how they were made.
#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceManifest {
    pub gait_type: GaitType,
    pub frames_per_cycle: usize,
    pub cycles: usize,
    /// Key posture of each frame, or null between key postures.
    pub labels: Vec<Option<String>>,
    pub body_height: f64,
    pub step_length: f64,
    /// Tuned hip amplitude, rad.
    pub amplitude: f64,
    pub noise: Option<Noise>,
    /// Frame files relative to the manifest.
    pub files: Vec<String>,
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn scale_for(color: &ColorArgs, values: &[f64]) -> Result<Scale> {
    Ok(match color.range {
        Some(r) => ColorScale::symmetric(0.0, r)?,
        None => auto_scale(values, ScaleMode::from(color.scale))?,
    })
}

fn encode(mesh: &Mesh, values: &[f64], scale: &Scale, format: MeshFormat) -> Result<Vec<u8>> {
    let colors = colorize_mesh(mesh, values, scale)?;
    Ok(save_mesh(mesh, Some(&colors), format)?)
}

pub fn synth(a: &SynthArgs) -> Result<()> {
    let params = BodyParams {
        height: a.height,
        step_length: a.step,
        radial_segments: a.radial_segments,
        rings_per_height: a.rings_per_height,
    };
    let noise = (a.noise != 0.0).then_some(Noise {
        sigma: a.noise,
        seed: a.seed,
    });
    let synth = Synthesizer::new(&params, a.gait)?;
    let seq = synth.sequence(a.cycles as usize, a.fpc, noise)?;
    let out = OutDir::create(&a.out)?;
    let ext = a.format.extension();
    let files: Vec<String> = (0..seq.len()).map(|i| format!("frame_{i:04}.{ext}")).collect();
    seq.frames
        .par_iter()
        .zip(&files)
        .try_for_each(|(f, name)| out.write(name, &save_mesh(f, None, a.format)?))?;
    let manifest = SequenceManifest {
        gait_type: seq.gait_type,
        frames_per_cycle: seq.frames_per_cycle,
        cycles: seq.cycles,
        labels: seq.labels.iter().map(|l| l.map(|l| l.to_string())).collect(),
        body_height: seq.body_height,
        step_length: seq.step_length,
        amplitude: synth.model.amplitude(),
        noise,
        files,
    };
    out.write_json(SEQUENCE_MANIFEST, &manifest)?;
    println!(
        "{} frames of {} gait written to {}",
        seq.len(),
        seq.gait_type,
        a.out.display()
    );
    out.finish(
        "synth",
        Vec::new(),
        json!({
            "gait_type": a.gait,
            "cycles": a.cycles,
            "frames_per_cycle": a.fpc,
            "height": a.height,
            "step_length": a.step,
            "radial_segments": a.radial_segments,
            "rings_per_height": a.rings_per_height,
            "noise": a.noise,
            "seed": a.seed,
            "format": a.format,
        }),
    )
}

fn load_checked(path: &Path) -> Result<Mesh> {
    let mesh = read_mesh_file::<f64>(path)
        .with_context(|| format!("reading {}", path.display()))?
        .mesh;
    let report = validate_mesh(&mesh);
    if !report.is_valid() {
        bail!(
            "{} is not a valid mesh:\n{}",
            path.display(),
            serde_json::to_string_pretty(&report)?
        );
    }
    Ok(mesh)
}

#[derive(Serialize)]
struct FieldStats {
    kind: CurvatureKind,
    unit: &'static str,
    vertices: usize,
    triangles: usize,
    /// Vertices with a closed fan and positive area; the statistics use
    /// only these.
    reliable: usize,
    boundary: usize,
    clamped: usize,
    min: f64,
    max: f64,
    mean: f64,
    euler_characteristic: i64,
    closed: bool,
    /// Sum of angle deficits, for closed meshes.
    gauss_bonnet_total: Option<f64>,
    /// 2πχ, for closed meshes.
    gauss_bonnet_expected: Option<f64>,
    scale: Scale,
}

pub fn curv(a: &CurvArgs) -> Result<()> {
    let mesh = load_checked(&a.mesh)?;
    let report = validate_mesh(&mesh);
    let field = curvature_field(&mesh)?;
    let values = field.values(a.kind);
    let used: Vec<f64> = (0..values.len())
        .filter(|&v| field.is_reliable(v))
        .map(|v| values[v])
        .collect();
    ensure!(
        !used.is_empty(),
        "{} has no interior vertex with positive area",
        a.mesh.display()
    );
    let scale = scale_for(&a.color, &used)?;
    let closed = report.is_closed();
    let chi = report.euler_characteristic;
    let stats = FieldStats {
        kind: a.kind,
        unit: a.kind.unit(),
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        reliable: used.len(),
        boundary: field.boundary.iter().filter(|&&b| b).count(),
        clamped: field.clamped.iter().filter(|&&c| c).count(),
        min: used.iter().copied().fold(f64::INFINITY, f64::min),
        max: used.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: used.iter().sum::<f64>() / used.len() as f64,
        euler_characteristic: chi,
        closed,
        gauss_bonnet_total: closed.then(|| angle_deficits(&mesh, &build_one_rings(&mesh).expect("validated")).total()),
        gauss_bonnet_expected: closed.then_some(std::f64::consts::TAU * chi as f64),
        scale,
    };
    let stem = a.mesh.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh");
    let out = OutDir::create(&a.out)?;
    let fmt = a.color.format;
    out.write(
        &format!("{stem}.{}.{}", a.kind, fmt.extension()),
        &encode(&mesh, values, &scale, fmt)?,
    )?;
    out.write_json(&format!("{stem}.{}.json", a.kind), &stats)?;
    println!(
        "{}: {} averages {:.6} over [{:.6}, {:.6}] {}",
        a.mesh.display(),
        a.kind,
        stats.mean,
        stats.min,
        stats.max,
        a.kind.unit()
    );
    out.finish(
        "curv",
        vec![display(&a.mesh)],
        json!({
            "type": a.kind,
            "scale_mode": ScaleMode::from(a.color.scale),
            "range": a.color.range,
            "format": fmt,
        }),
    )
}

fn load_sequence(path: &Path) -> Result<(SequenceManifest, Vec<Mesh>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: SequenceManifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    ensure!(!manifest.files.is_empty(), "{} lists no frames", path.display());
    ensure!(
        manifest.frames_per_cycle >= 2 && manifest.frames_per_cycle.is_multiple_of(2),
        "frames per cycle must be even, got {}",
        manifest.frames_per_cycle
    );
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let frames = manifest
        .files
        .par_iter()
        .map(|f| {
            let p = base.join(f);
            read_mesh_file::<f64>(&p)
                .map(|l| l.mesh)
                .with_context(|| format!("reading {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Err(e) = check_connectivity(&frames) {
        let name = match e {
            curvegait::analysis::AnalysisError::Connectivity { frame } => manifest.files[frame].clone(),
            _ => String::new(),
        };
        return Err(anyhow::Error::new(e).context(format!("frame file {name}")));
    }
    Ok((manifest, frames))
}

#[derive(Serialize)]
struct ClassificationOut<'a> {
    gait_type: GaitType,
    #[serde(flatten)]
    classification: &'a Classification,
}

#[derive(Serialize)]
struct KneeAbs {
    left: f64,
    right: f64,
    /// Left over right.
    ratio: f64,
}

#[derive(Serialize)]
struct AverageOut {
    gait_type: GaitType,
    kind: CurvatureKind,
    cycle: usize,
    frames: (usize, usize),
    /// Asymmetry index of the averaged map against its mirror image.
    mirror_index: Option<f64>,
    /// Mean |value| over the knee region detected on the averaged map.
    knee_abs_mean: KneeAbs,
    scale: Scale,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let (lo, hi) = (a.band[0], a.band[1]);
    ensure!(lo < hi, "knee band must satisfy LO < HI, got {lo} {hi}");
    ensure!(a.radius > 0.0, "radius must be positive, got {}", a.radius);
    let (manifest, frames) = load_sequence(&a.sequence)?;
    let fields = sequence_fields(&frames)?;
    let fpc = manifest.frames_per_cycle;
    let h = manifest.body_height;
    let rp = RegionParams {
        band: (lo, hi),
        radius: a.radius,
    };
    let out = OutDir::create(&a.out)?;
    let fmt = a.color.format;
    let name = match a.analysis {
        Analysis::Knees => {
            let series = knee_time_series_from(&frames, &fields, fpc, h, &rp)?;
            out.write("knees.csv", knee_series_csv(&series).as_bytes())?;
            out.write_json("knees.json", &series)?;
            let c = classify_symmetry(&series, a.tau)?;
            out.write_json(
                "classification.json",
                &ClassificationOut {
                    gait_type: manifest.gait_type,
                    classification: &c,
                },
            )?;
            println!(
                "{}: {:?} (NRMSD {:.4}, tau {})",
                manifest.gait_type, c.class, c.nrmsd, a.tau
            );
            "knees"
        }
        Analysis::Symmetry => {
            let report = symmetry_reports(&frames, &fields, fpc, a.kind, h, &rp)?;
            out.write_json("symmetry.json", &report)?;
            let pooled: Vec<f64> = report.pairs.iter().flat_map(|p| p.residual.iter().copied()).collect();
            let shared = scale_for(&a.color, &pooled)?;
            report.pairs.par_iter().try_for_each(|p| {
                let scale = if a.color.per_frame_scale {
                    scale_for(&a.color, &p.residual)?
                } else {
                    shared
                };
                let file = format!("residual_{:04}_{:04}.{}", p.frame_i, p.frame_j, fmt.extension());
                out.write(&file, &encode(&frames[p.frame_i], &p.residual, &scale, fmt)?)
            })?;
            println!(
                "{}: {} pairs, largest asymmetry index {:.4} {}",
                manifest.gait_type,
                report.pairs.len(),
                report.max_index(),
                a.kind.unit()
            );
            "symmetry"
        }
        Analysis::Average => {
            let avg = average_curvature_map(&frames, &fields, fpc, a.kind, a.cycle)?;
            let geometry = avg.geometry.as_ref().context("average map has no geometry")?;
            let used: Vec<f64> = (0..avg.values.len())
                .filter(|&v| avg.reliable[v])
                .map(|v| avg.values[v])
                .collect();
            let scale = scale_for(&a.color, &used)?;
            out.write(
                &format!("average.{}", fmt.extension()),
                &encode(geometry, &avg.values, &scale, fmt)?,
            )?;
            let left = avg.knee_abs_mean(Side::Left, h, &rp)?;
            let right = avg.knee_abs_mean(Side::Right, h, &rp)?;
            let summary = AverageOut {
                gait_type: manifest.gait_type,
                kind: a.kind,
                cycle: a.cycle,
                frames: avg.frames,
                mirror_index: avg.mirror_index(h),
                knee_abs_mean: KneeAbs {
                    left,
                    right,
                    ratio: left / right,
                },
                scale,
            };
            out.write_json("average.json", &summary)?;
            println!(
                "{}: average {} over frames {}..{}, knee |{}| left/right {:.4}",
                manifest.gait_type, a.kind, avg.frames.0, avg.frames.1, a.kind, summary.knee_abs_mean.ratio
            );
            "average"
        }
    };
    out.finish(
        &format!("analyze {name}"),
        vec![display(&a.sequence)],
        json!({
            "analysis": name,
            "type": a.kind,
            "band": [lo, hi],
            "radius": a.radius,
            "tau": a.tau,
            "cycle": a.cycle,
            "scale_mode": ScaleMode::from(a.color.scale),
            "range": a.color.range,
            "per_frame_scale": a.color.per_frame_scale,
            "format": fmt,
        }),
    )
}

#[derive(Serialize)]
struct ValidationEntry {
    path: String,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ValidationReport>,
}

pub fn validate(a: &ValidateArgs) -> Result<()> {
    let entries: Vec<ValidationEntry> = a
        .meshes
        .par_iter()
        .map(|p| match read_mesh_file::<f64>(p) {
            Ok(l) => {
                let report = validate_mesh(&l.mesh);
                ValidationEntry {
                    path: display(p),
                    valid: report.is_valid(),
                    error: None,
                    report: Some(report),
                }
            }
            Err(e) => ValidationEntry {
                path: display(p),
                valid: false,
                error: Some(format!("{e:#}")),
                report: None,
            },
        })
        .collect();
    let text = serde_json::to_string_pretty(&entries)?;
    // A closed pipe downstream is not an error here.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(dir) = &a.out {
        let out = OutDir::create(dir)?;
        out.write("validation.json", format!("{text}\n").as_bytes())?;
        out.finish("validate", a.meshes.iter().map(|p| display(p)).collect(), json!({}))?;
    }
    let bad = entries.iter().filter(|e| !e.valid).count();
    ensure!(bad == 0, "{bad} of {} meshes failed validation", entries.len());
    Ok(())
}
