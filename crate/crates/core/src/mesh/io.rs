//! OBJ and PLY reading and writing.
//!
//! OBJ: ASCII `v x y z [r g b]` (colors as floats in `[0, 1]`, or `0..=255`
//! when any component exceeds 1) and `f i j k ...` with 1-based or negative
//! indices. Polygons are fan-triangulated from their first corner.
//!
//! PLY: ASCII and binary little-endian are read; binary little-endian is
//! written, with optional `uchar red/green/blue` vertex properties.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use super::{MeshError, TriangleMesh};
use crate::colormap::Rgb;
use crate::geom::Vec3;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(Self::Obj),
            "ply" => Some(Self::Ply),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Obj => "obj",
            Self::Ply => "ply",
        }
    }
}

impl FromStr for MeshFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "ply" => Ok(Self::Ply),
            other => Err(format!("unknown mesh format `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed PLY: {0}")]
    Ply(String),
    #[error("face at line {line} has {count} corners; at least 3 are required")]
    ShortFace { line: usize, count: usize },
    #[error("face {face} references vertex {index} but only {vertex_count} vertices exist")]
    IndexOutOfRange {
        face: usize,
        index: i64,
        vertex_count: usize,
    },
    #[error("{colors} colors given for {vertices} vertices")]
    ColorCount { colors: usize, vertices: usize },
    #[error("unsupported mesh format for `{0}`")]
    UnknownFormat(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A mesh plus whatever per-vertex colors the file carried.
#[derive(Clone, Debug)]
pub struct LoadedMesh<T> {
    pub mesh: TriangleMesh<T>,
    pub colors: Option<Vec<Rgb>>,
}

pub fn load_mesh<T: Real>(bytes: &[u8], format: MeshFormat) -> Result<TriangleMesh<T>, MeshIoError> {
    read_mesh(bytes, format).map(|l| l.mesh)
}

pub fn read_mesh<T: Real>(bytes: &[u8], format: MeshFormat) -> Result<LoadedMesh<T>, MeshIoError> {
    match format {
        MeshFormat::Obj => read_obj(bytes),
        MeshFormat::Ply => read_ply(bytes),
    }
}

pub fn read_mesh_file<T: Real>(path: &Path) -> Result<LoadedMesh<T>, MeshIoError> {
    let format = MeshFormat::from_path(path).ok_or_else(|| MeshIoError::UnknownFormat(path.display().to_string()))?;
    let bytes = std::fs::read(path)?;
    read_mesh(&bytes, format)
}

pub fn save_mesh<T: Real>(
    mesh: &TriangleMesh<T>,
    colors: Option<&[Rgb]>,
    format: MeshFormat,
) -> Result<Vec<u8>, MeshIoError> {
    if let Some(c) = colors {
        if c.len() != mesh.vertex_count() {
            return Err(MeshIoError::ColorCount {
                colors: c.len(),
                vertices: mesh.vertex_count(),
            });
        }
    }
    Ok(match format {
        MeshFormat::Obj => write_obj(mesh, colors),
        MeshFormat::Ply => write_ply(mesh, colors),
    })
}

fn fan(corners: &[usize]) -> impl Iterator<Item = [usize; 3]> + '_ {
    (1..corners.len() - 1).map(move |k| [corners[0], corners[k], corners[k + 1]])
}

fn read_obj<T: Real>(bytes: &[u8]) -> Result<LoadedMesh<T>, MeshIoError> {
    let text = String::from_utf8_lossy(bytes);
    let mut positions = Vec::new();
    let mut raw_colors: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();

    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tok = line.split_whitespace();
        let parse = |s: &str| -> Result<f64, MeshIoError> {
            s.parse::<f64>().map_err(|_| MeshIoError::Parse {
                line: line_no,
                message: format!("bad number `{s}`"),
            })
        };
        match tok.next() {
            Some("v") => {
                let nums = tok.map(parse).collect::<Result<Vec<_>, _>>()?;
                if nums.len() < 3 {
                    return Err(MeshIoError::Parse {
                        line: line_no,
                        message: "vertex needs three coordinates".into(),
                    });
                }
                positions.push(Vec3::new(T::lit(nums[0]), T::lit(nums[1]), T::lit(nums[2])));
                if nums.len() >= 6 {
                    raw_colors.push([nums[3], nums[4], nums[5]]);
                }
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tok {
                    let head = t.split('/').next().unwrap_or("");
                    let i = head.parse::<i64>().map_err(|_| MeshIoError::Parse {
                        line: line_no,
                        message: format!("bad face index `{t}`"),
                    })?;
                    idx.push(i);
                }
                if idx.len() < 3 {
                    return Err(MeshIoError::ShortFace {
                        line: line_no,
                        count: idx.len(),
                    });
                }
                faces.push((line_no, idx));
            }
            _ => {}
        }
    }

    let n = positions.len();
    let mut triangles = Vec::new();
    for (face, (_, idx)) in faces.iter().enumerate() {
        let mut corners = Vec::with_capacity(idx.len());
        for &i in idx {
            let resolved = if i > 0 { i - 1 } else { n as i64 + i };
            if i == 0 || resolved < 0 || resolved >= n as i64 {
                return Err(MeshIoError::IndexOutOfRange {
                    face,
                    index: i,
                    vertex_count: n,
                });
            }
            corners.push(resolved as usize);
        }
        triangles.extend(fan(&corners));
    }

    let colors = if !raw_colors.is_empty() && raw_colors.len() == n {
        let byte_scale = raw_colors.iter().flatten().any(|&c| c > 1.0);
        let to_u8 = |c: f64| {
            let v = if byte_scale { c } else { c * 255.0 };
            v.round().clamp(0.0, 255.0) as u8
        };
        Some(
            raw_colors
                .iter()
                .map(|c| [to_u8(c[0]), to_u8(c[1]), to_u8(c[2])])
                .collect(),
        )
    } else {
        None
    };

    Ok(LoadedMesh {
        mesh: TriangleMesh::new(positions, triangles)?,
        colors,
    })
}

fn write_obj<T: Real>(mesh: &TriangleMesh<T>, colors: Option<&[Rgb]>) -> Vec<u8> {
    let mut s = String::with_capacity(mesh.vertex_count() * 40 + mesh.triangle_count() * 20);
    s.push_str("# curvegait mesh\n");
    for (i, p) in mesh.vertices().iter().enumerate() {
        let (x, y, z) = (p.x.to_f64_lossy(), p.y.to_f64_lossy(), p.z.to_f64_lossy());
        match colors {
            Some(c) => {
                let [r, g, b] = c[i];
                let _ = writeln!(
                    s,
                    "v {x} {y} {z} {:.6} {:.6} {:.6}",
                    f64::from(r) / 255.0,
                    f64::from(g) / 255.0,
                    f64::from(b) / 255.0
                );
            }
            None => {
                let _ = writeln!(s, "v {x} {y} {z}");
            }
        }
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s.into_bytes()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PlyType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => f64::from(b[0] as i8),
            Self::U8 => f64::from(b[0]),
            Self::I16 => f64::from(i16::from_le_bytes([b[0], b[1]])),
            Self::U16 => f64::from(u16::from_le_bytes([b[0], b[1]])),
            Self::I32 => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::U32 => f64::from(u32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F32 => f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F64 => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
        }
    }
}

#[derive(Clone, Debug)]
enum PlyProperty {
    Scalar {
        name: String,
        ty: PlyType,
    },
    List {
        name: String,
        count: PlyType,
        item: PlyType,
    },
}

#[derive(Clone, Debug)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

/// Value source over either ASCII tokens or little-endian bytes.
enum PlyCursor<'a> {
    Ascii(std::str::SplitAsciiWhitespace<'a>),
    Binary { data: &'a [u8], pos: usize },
}

impl PlyCursor<'_> {
    fn next(&mut self, ty: PlyType) -> Result<f64, MeshIoError> {
        match self {
            Self::Ascii(tokens) => {
                let t = tokens
                    .next()
                    .ok_or_else(|| MeshIoError::Ply("unexpected end of data".into()))?;
                t.parse::<f64>()
                    .map_err(|_| MeshIoError::Ply(format!("bad value `{t}`")))
            }
            Self::Binary { data, pos } => {
                let n = ty.size();
                let chunk = data
                    .get(*pos..*pos + n)
                    .ok_or_else(|| MeshIoError::Ply("unexpected end of data".into()))?;
                *pos += n;
                Ok(ty.read_le(chunk))
            }
        }
    }
}

fn read_ply<T: Real>(bytes: &[u8]) -> Result<LoadedMesh<T>, MeshIoError> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| MeshIoError::Ply("missing end_header".into()))?;
    let mut body_start = end + END.len();
    while body_start < bytes.len() && bytes[body_start] != b'\n' {
        body_start += 1;
    }
    body_start = (body_start + 1).min(bytes.len());
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| MeshIoError::Ply("header is not UTF-8".into()))?;

    let mut lines = header.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(MeshIoError::Ply("missing `ply` magic".into()));
    }
    let mut ascii = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "ascii", ..] => ascii = Some(true),
            ["format", "binary_little_endian", ..] => ascii = Some(false),
            ["format", other, ..] => return Err(MeshIoError::Ply(format!("unsupported format `{other}`"))),
            ["element", name, count] => elements.push(PlyElement {
                name: (*name).to_string(),
                count: count
                    .parse()
                    .map_err(|_| MeshIoError::Ply(format!("bad element count `{count}`")))?,
                properties: Vec::new(),
            }),
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| MeshIoError::Ply("property before element".into()))?;
                el.properties.push(PlyProperty::List {
                    name: (*name).to_string(),
                    count: PlyType::parse(count).ok_or_else(|| MeshIoError::Ply(format!("bad type `{count}`")))?,
                    item: PlyType::parse(item).ok_or_else(|| MeshIoError::Ply(format!("bad type `{item}`")))?,
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| MeshIoError::Ply("property before element".into()))?;
                el.properties.push(PlyProperty::Scalar {
                    name: (*name).to_string(),
                    ty: PlyType::parse(ty).ok_or_else(|| MeshIoError::Ply(format!("bad type `{ty}`")))?,
                });
            }
            _ => {}
        }
    }
    let ascii = ascii.ok_or_else(|| MeshIoError::Ply("missing format line".into()))?;
    let body = &bytes[body_start..];
    let text;
    let mut cursor = if ascii {
        text = std::str::from_utf8(body).map_err(|_| MeshIoError::Ply("ASCII body is not UTF-8".into()))?;
        PlyCursor::Ascii(text.split_ascii_whitespace())
    } else {
        PlyCursor::Binary { data: body, pos: 0 }
    };

    let mut positions = Vec::new();
    let mut normals = Vec::new();
    let mut colors = Vec::new();
    let mut triangles = Vec::new();
    let mut face_no = 0usize;

    for el in &elements {
        let has = |n: &str| {
            el.properties
                .iter()
                .any(|p| matches!(p, PlyProperty::Scalar { name, .. } if name == n))
        };
        let want_normals = el.name == "vertex" && has("nx") && has("ny") && has("nz");
        let want_colors = el.name == "vertex" && has("red") && has("green") && has("blue");
        for _ in 0..el.count {
            let mut p = [0.0f64; 3];
            let mut nrm = [0.0f64; 3];
            let mut rgb = [0u8; 3];
            for prop in &el.properties {
                match prop {
                    PlyProperty::Scalar { name, ty } => {
                        let v = cursor.next(*ty)?;
                        match name.as_str() {
                            "x" => p[0] = v,
                            "y" => p[1] = v,
                            "z" => p[2] = v,
                            "nx" => nrm[0] = v,
                            "ny" => nrm[1] = v,
                            "nz" => nrm[2] = v,
                            "red" => rgb[0] = v.clamp(0.0, 255.0) as u8,
                            "green" => rgb[1] = v.clamp(0.0, 255.0) as u8,
                            "blue" => rgb[2] = v.clamp(0.0, 255.0) as u8,
                            _ => {}
                        }
                    }
                    PlyProperty::List { name, count, item } => {
                        let k = cursor.next(*count)?;
                        if k < 0.0 {
                            return Err(MeshIoError::Ply("negative list length".into()));
                        }
                        let mut idx = Vec::with_capacity(k as usize);
                        for _ in 0..k as usize {
                            idx.push(cursor.next(*item)?);
                        }
                        if el.name == "face" && (name == "vertex_indices" || name == "vertex_index") {
                            if idx.len() < 3 {
                                return Err(MeshIoError::ShortFace {
                                    line: face_no,
                                    count: idx.len(),
                                });
                            }
                            let vc = elements.iter().find(|e| e.name == "vertex").map_or(0, |e| e.count);
                            let mut corners = Vec::with_capacity(idx.len());
                            for &i in &idx {
                                if i < 0.0 || i as usize >= vc {
                                    return Err(MeshIoError::IndexOutOfRange {
                                        face: face_no,
                                        index: i as i64,
                                        vertex_count: vc,
                                    });
                                }
                                corners.push(i as usize);
                            }
                            triangles.extend(fan(&corners));
                            face_no += 1;
                        }
                    }
                }
            }
            if el.name == "vertex" {
                positions.push(Vec3::new(T::lit(p[0]), T::lit(p[1]), T::lit(p[2])));
                if want_normals {
                    let n = Vec3::new(nrm[0], nrm[1], nrm[2])
                        .normalized()
                        .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
                    normals.push(n.cast::<T>());
                }
                if want_colors {
                    colors.push(rgb);
                }
            }
        }
    }

    let mut mesh = TriangleMesh::new(positions, triangles)?;
    if !normals.is_empty() {
        mesh = mesh.with_normals(normals)?;
    }
    Ok(LoadedMesh {
        mesh,
        colors: (!colors.is_empty()).then_some(colors),
    })
}

fn write_ply<T: Real>(mesh: &TriangleMesh<T>, colors: Option<&[Rgb]>) -> Vec<u8> {
    let mut out = Vec::with_capacity(256 + mesh.vertex_count() * 15 + mesh.triangle_count() * 13);
    let mut header = String::new();
    header.push_str("ply\nformat binary_little_endian 1.0\ncomment curvegait mesh\n");
    let _ = writeln!(header, "element vertex {}", mesh.vertex_count());
    header.push_str("property float x\nproperty float y\nproperty float z\n");
    if colors.is_some() {
        header.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    let _ = writeln!(header, "element face {}", mesh.triangle_count());
    header.push_str("property list uchar int vertex_indices\nend_header\n");
    out.extend_from_slice(header.as_bytes());
    for (i, p) in mesh.vertices().iter().enumerate() {
        for c in [p.x, p.y, p.z] {
            out.extend_from_slice(&(c.to_f64_lossy() as f32).to_le_bytes());
        }
        if let Some(c) = colors {
            out.extend_from_slice(&c[i]);
        }
    }
    for t in mesh.triangles() {
        out.push(3);
        for &i in t {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn minimal_obj() {
        let m: TriangleMesh<f64> = load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", MeshFormat::Obj).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn obj_index_out_of_range() {
        let err = load_mesh::<f64>(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, MeshIoError::IndexOutOfRange { index: 9, .. }));
    }

    #[test]
    fn obj_short_face_and_garbage() {
        let err = load_mesh::<f64>(b"v 0 0 0\nv 1 0 0\nf 1 2\n", MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, MeshIoError::ShortFace { line: 3, count: 2 }));
        let err = load_mesh::<f64>(b"v 0 zero 0\n", MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, MeshIoError::Parse { line: 1, .. }));
    }

    #[test]
    fn obj_quads_and_slashes_and_comments() {
        let src = b"# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0 # corner\nf 1/1/1 2/2/2 3/3/3 4/4/4\n";
        let m: TriangleMesh<f64> = load_mesh(src, MeshFormat::Obj).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        let neg: TriangleMesh<f64> = load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n", MeshFormat::Obj).unwrap();
        assert_eq!(neg.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn obj_single_triangle_text() {
        let m: TriangleMesh<f64> = load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", MeshFormat::Obj).unwrap();
        let text = String::from_utf8(save_mesh(&m, None, MeshFormat::Obj).unwrap()).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 1);
    }

    #[test]
    fn ply_header_declares_colors() {
        let m: TriangleMesh<f64> = load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", MeshFormat::Obj).unwrap();
        let bytes = save_mesh(&m, Some(&[[255, 0, 0]; 3]), MeshFormat::Ply).unwrap();
        let head = String::from_utf8_lossy(&bytes[..200.min(bytes.len())]);
        for p in ["property uchar red", "property uchar green", "property uchar blue"] {
            assert!(head.contains(p));
        }
        let back = read_mesh::<f64>(&bytes, MeshFormat::Ply).unwrap();
        assert_eq!(back.colors.unwrap(), vec![[255, 0, 0]; 3]);
    }

    #[test]
    fn color_count_mismatch() {
        let m = shapes::tetrahedron::<f64>(1.0);
        assert!(matches!(
            save_mesh(&m, Some(&[[0, 0, 0]; 3]), MeshFormat::Ply),
            Err(MeshIoError::ColorCount { colors: 3, vertices: 4 })
        ));
    }

    #[test]
    fn ascii_ply_with_normals_and_quads() {
        let src = "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n\
                   property float nx\nproperty float ny\nproperty float nz\nelement face 1\n\
                   property list uchar int vertex_indices\nend_header\n\
                   0 0 0 0 0 1\n1 0 0 0 0 1\n1 1 0 0 0 2\n0 1 0 0 0 1\n4 0 1 2 3\n";
        let m: TriangleMesh<f64> = load_mesh(src.as_bytes(), MeshFormat::Ply).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.normals().unwrap()[2], Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn ply_rejects_bad_index() {
        let src = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n\
                   element face 1\nproperty list uchar int vertex_indices\nend_header\n\
                   0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n";
        assert!(matches!(
            load_mesh::<f64>(src.as_bytes(), MeshFormat::Ply),
            Err(MeshIoError::IndexOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn icosphere_round_trip_both_formats() {
        let m = shapes::icosphere::<f64>(1.0, 3);
        let colors: Vec<Rgb> = (0..m.vertex_count())
            .map(|i| [(i % 256) as u8, (i * 7 % 256) as u8, (i * 13 % 256) as u8])
            .collect();
        for fmt in [MeshFormat::Obj, MeshFormat::Ply] {
            let bytes = save_mesh(&m, Some(&colors), fmt).unwrap();
            let back = read_mesh::<f64>(&bytes, fmt).unwrap();
            assert_eq!(back.mesh.triangles(), m.triangles());
            for (a, b) in back.mesh.vertices().iter().zip(m.vertices()) {
                assert!(a.distance(*b) <= 1e-6);
            }
            assert_eq!(back.colors.as_deref(), Some(colors.as_slice()));
        }
    }
}
