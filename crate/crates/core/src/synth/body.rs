//! Procedural humanoid: a rounded lattice torso with tubular limbs, neck and
//! head swept out of holes cut in it. The result is one closed genus-0
//! surface that is exactly symmetric about the plane `x = 0`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::skeleton::{Influence, Joint, Skeleton, SkinWeights, JOINT_COUNT};
use super::{Side, SynthError};
use crate::geom::{Mat3, Vec3};
use crate::spatial::PointGrid;
use crate::{Mesh, Point};

/// Body proportions and mesh resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    /// Standing height, m.
    pub height: f64,
    /// Heel-to-heel distance at contact for the normal gait, m.
    pub step_length: f64,
    /// Segments around each leg; rounded up to a multiple of 8.
    pub radial_segments: usize,
    /// Rings along the limbs per body height.
    pub rings_per_height: usize,
}

impl Default for BodyParams {
    fn default() -> Self {
        Self {
            height: 1.73,
            step_length: 0.65,
            radial_segments: 24,
            rings_per_height: 110,
        }
    }
}

/// Anthropometric ratios as fractions of body height.
pub mod ratios {
    pub const HIP_JOINT: f64 = 0.53;
    pub const KNEE: f64 = 0.285;
    pub const ANKLE: f64 = 0.039;
    pub const THIGH: f64 = HIP_JOINT - KNEE;
    pub const SHANK: f64 = KNEE - ANKLE;
    pub const CROTCH: f64 = 0.485;
    pub const SHOULDER_LINE: f64 = 0.82;
    pub const TORSO_HALF_WIDTH: f64 = 0.1;
    pub const TORSO_HALF_DEPTH: f64 = 0.06;
    pub const WAIST: f64 = 0.62;
    pub const NECK_RADIUS: f64 = 0.03;
    pub const HEAD_RADIUS: f64 = 0.062;
    pub const FOOT_RADIUS: f64 = 0.017;
    pub const FOOT_LENGTH: f64 = 0.08;
    pub const UPPER_ARM: f64 = 0.16;
    pub const FOREARM: f64 = 0.13;
    pub const HAND: f64 = 0.07;
}

/// Leg radius keys `(height, radius)`, both fractions of body height,
/// from the crotch down to the ankle.
const LEG_PROFILE: [(f64, f64); 7] = [
    (0.485, 0.042),
    (0.40, 0.033),
    (0.33, 0.029),
    (0.24, 0.029),
    (0.19, 0.031),
    (0.09, 0.019),
    (0.039, ratios::FOOT_RADIUS),
];

/// Arm radius keys `(arclength fraction, radius / height)`.
const ARM_PROFILE: [(f64, f64); 6] = [
    (0.0, 0.024),
    (0.2, 0.022),
    (0.5, 0.019),
    (0.75, 0.015),
    (0.9, 0.013),
    (1.0, 0.016),
];

/// Kneecap bump: height, vertical and angular spread.
const PATELLA_HEIGHT: f64 = 0.0015;
const PATELLA_SPREAD: f64 = 0.015;
const PATELLA_ANGLE: f64 = 0.6;

/// Superellipsoid exponent of the torso.
const TORSO_ROUNDNESS: f64 = 6.0;

/// Skin blend widths as fractions of body height.
const HIP_BLEND: f64 = 0.08;
const KNEE_BLEND: f64 = 0.10;
const ANKLE_BLEND: f64 = 0.03;
const ELBOW_BLEND: f64 = 0.05;
const WRIST_BLEND: f64 = 0.03;

/// Surface points tied to the skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyMarkers {
    /// Kneecap apex vertex, indexed by [`Side::index`].
    pub patella: [usize; 2],
    /// Rest position of the back of each heel, carried by the foot bone.
    pub heel: [Point; 2],
    /// Rest heel and ball contact points, carried by the foot bone.
    pub sole: [[Point; 2]; 2],
}

/// Rest body with everything needed to pose it.
#[derive(Clone, Debug)]
pub struct Body {
    pub params: BodyParams,
    pub mesh: Mesh,
    pub weights: SkinWeights,
    pub markers: BodyMarkers,
    /// `mirror[v]` is the vertex at the reflection of `v` across `x = 0`.
    pub mirror: Vec<usize>,
}

impl BodyParams {
    pub fn check(&self) -> Result<(), SynthError> {
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(SynthError::InvalidParams(format!(
                "height must be positive, got {}",
                self.height
            )));
        }
        if !(self.step_length.is_finite() && self.step_length > 0.0 && self.step_length < self.height) {
            return Err(SynthError::InvalidParams(format!(
                "step length must lie in (0, height), got {}",
                self.step_length
            )));
        }
        if self.radial_segments < 8 {
            return Err(SynthError::InvalidParams(format!(
                "at least 8 radial segments required, got {}",
                self.radial_segments
            )));
        }
        if self.rings_per_height < 40 {
            return Err(SynthError::InvalidParams(format!(
                "at least 40 rings per height required, got {}",
                self.rings_per_height
            )));
        }
        Ok(())
    }

    /// Rest height of the knee joint, m.
    pub fn knee_height(&self) -> f64 {
        ratios::KNEE * self.height
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Part {
    Torso,
    Neck,
    Leg(Side),
    Arm(Side),
}

#[derive(Clone, Copy, Debug)]
struct Tag {
    part: Part,
    /// Arclength along the part's centerline, m.
    s: f64,
}

#[derive(Default)]
struct Builder {
    pos: Vec<Point>,
    tags: Vec<Tag>,
    polys: Vec<Vec<usize>>,
}

impl Builder {
    fn add(&mut self, p: Point, tag: Tag) -> usize {
        self.pos.push(p);
        self.tags.push(tag);
        self.pos.len() - 1
    }
}

/// Centerline station with a parallel-transported frame.
#[derive(Clone, Copy, Debug)]
struct Station {
    c: Point,
    t: Point,
    n: Point,
    b: Point,
    s: f64,
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(f64),
    /// Quarter-style bend turning the tangent toward `toward`.
    Arc {
        radius: f64,
        angle: f64,
        toward: Point,
    },
}

fn march(start: Station, pieces: &[Piece], spacing: f64) -> Vec<Station> {
    let mut out = vec![start];
    let mut cur = start;
    for piece in pieces {
        match *piece {
            Piece::Line(len) => {
                let m = (len / spacing).ceil().max(1.0) as usize;
                let base = cur;
                for j in 1..=m {
                    let d = len * j as f64 / m as f64;
                    cur = Station {
                        c: base.c + base.t * d,
                        s: base.s + d,
                        ..base
                    };
                    out.push(cur);
                }
            }
            Piece::Arc { radius, angle, toward } => {
                let base = cur;
                let u = (toward - base.t * toward.dot(base.t))
                    .normalized()
                    .expect("arc direction");
                let axis = base.t.cross(u);
                let m = (radius * angle / spacing).ceil().max(1.0) as usize;
                for j in 1..=m {
                    let phi = angle * j as f64 / m as f64;
                    let r = Mat3::rotation(axis, phi);
                    cur = Station {
                        c: base.c + (base.t * phi.sin() + u * (1.0 - phi.cos())) * radius,
                        t: r.apply(base.t),
                        n: r.apply(base.n),
                        b: r.apply(base.b),
                        s: base.s + radius * phi,
                    };
                    out.push(cur);
                }
            }
        }
    }
    out
}

/// Stations closing a tube with a spherical end of radius `big` that meets
/// the last station, whose own radius is `small`. The final station is the
/// pole.
fn sphere_end(last: Station, small: f64, big: f64, spacing: f64) -> Vec<(Station, f64)> {
    let phi0 = (small / big).min(1.0).asin();
    let center = last.c + last.t * (big * phi0.cos());
    let m = (big * (PI - phi0) / spacing).ceil().max(2.0) as usize;
    (1..=m)
        .map(|j| {
            let phi = phi0 + (PI - phi0) * j as f64 / m as f64;
            let st = Station {
                c: center - last.t * (big * phi.cos()),
                s: last.s + big * (phi - phi0),
                ..last
            };
            (st, if j == m { 0.0 } else { big * phi.sin() })
        })
        .collect()
}

struct Tube<'a> {
    part: Part,
    ring0: Vec<usize>,
    start: Station,
    pieces: Vec<Piece>,
    radius: &'a dyn Fn(&Station, f64) -> f64,
    end_radius: f64,
}

struct TubeOut {
    stations: Vec<Station>,
    /// Vertex index of angle 0 on each station after the first.
    rings: Vec<Vec<usize>>,
}

fn sweep(b: &mut Builder, tube: Tube, spacing: f64) -> TubeOut {
    let n = tube.ring0.len();
    let s0 = tube.start;
    // Rotational sense of the hole loop in the start frame.
    let angle_of = |p: Point| {
        let d = p - s0.c;
        d.dot(s0.b).atan2(d.dot(s0.n))
    };
    let a0 = angle_of(b.pos[tube.ring0[0]]);
    let a1 = angle_of(b.pos[tube.ring0[1]]);
    let mut da = a1 - a0;
    if da > PI {
        da -= TAU;
    } else if da < -PI {
        da += TAU;
    }
    let sense = if da >= 0.0 { 1.0 } else { -1.0 };
    let thetas: Vec<f64> = (0..n).map(|i| sense * TAU * i as f64 / n as f64).collect();

    let mut stations = march(s0, &tube.pieces, spacing);
    let last = *stations.last().expect("stations");
    let small = (tube.radius)(&last, 0.0);
    let cap = sphere_end(last, small, tube.end_radius.max(small), spacing);

    let mut rings = vec![tube.ring0.clone()];
    for st in stations.iter().skip(1) {
        let ring = thetas
            .iter()
            .map(|&th| {
                let r = (tube.radius)(st, th);
                let p = st.c + (st.n * th.cos() + st.b * th.sin()) * r;
                b.add(
                    p,
                    Tag {
                        part: tube.part,
                        s: st.s,
                    },
                )
            })
            .collect();
        rings.push(ring);
    }
    let mut pole = None;
    for (st, r) in &cap {
        if *r == 0.0 {
            pole = Some(b.add(
                st.c,
                Tag {
                    part: tube.part,
                    s: st.s,
                },
            ));
        } else {
            let ring = thetas
                .iter()
                .map(|&th| {
                    b.add(
                        st.c + (st.n * th.cos() + st.b * th.sin()) * *r,
                        Tag {
                            part: tube.part,
                            s: st.s,
                        },
                    )
                })
                .collect();
            rings.push(ring);
        }
        stations.push(*st);
    }
    for w in rings.windows(2) {
        let (a, c) = (&w[0], &w[1]);
        for i in 0..n {
            let j = (i + 1) % n;
            b.polys.push(vec![a[j], a[i], c[i], c[j]]);
        }
    }
    let pole = pole.expect("cap ends in a pole");
    let z = rings.last().expect("rings");
    for i in 0..n {
        let j = (i + 1) % n;
        b.polys.push(vec![z[j], z[i], pole]);
    }
    TubeOut { stations, rings }
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Piecewise smoothstep through `keys`, which are sorted by their first
/// coordinate in either direction.
fn profile(keys: &[(f64, f64)], x: f64) -> f64 {
    let ascending = keys[0].0 <= keys[keys.len() - 1].0;
    let (first, last) = (keys[0], keys[keys.len() - 1]);
    let before = if ascending { x <= first.0 } else { x >= first.0 };
    let after = if ascending { x >= last.0 } else { x <= last.0 };
    if before {
        return first.1;
    }
    if after {
        return last.1;
    }
    for w in keys.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inside = if ascending { x <= b.0 } else { x >= b.0 };
        if inside {
            let t = (x - a.0) / (b.0 - a.0);
            return a.1 + (b.1 - a.1) * smoothstep(t);
        }
    }
    last.1
}

/// Cells of a rectangular hole on one lattice face.
#[derive(Clone, Copy, Debug)]
struct Hole {
    /// Face normal axis and whether it is the positive face.
    axis: usize,
    positive: bool,
    /// Cell ranges along the two in-face axes, in cyclic order after `axis`.
    b: (usize, usize),
    c: (usize, usize),
}

struct Lattice {
    n: [usize; 3],
    index: HashMap<[usize; 3], usize>,
}

impl Lattice {
    fn vertex(&self, p: [usize; 3]) -> usize {
        self.index[&p]
    }
}

fn build_torso(b: &mut Builder, n: [usize; 3], center: Point, half: Point, holes: &[Hole]) -> Lattice {
    let mut index = HashMap::new();
    for i in 0..=n[0] {
        for j in 0..=n[1] {
            for k in 0..=n[2] {
                let on_surface = i == 0 || i == n[0] || j == 0 || j == n[1] || k == 0 || k == n[2];
                if !on_surface {
                    continue;
                }
                let u = [i, j, k].map(|v| v as f64);
                let q = [0, 1, 2].map(|a| 2.0 * u[a] / n[a] as f64 - 1.0);
                let norm = q
                    .iter()
                    .map(|v| v.abs().powf(TORSO_ROUNDNESS))
                    .sum::<f64>()
                    .powf(1.0 / TORSO_ROUNDNESS);
                let p = Vec3::new(
                    center.x + half.x * q[0] / norm,
                    center.y + half.y * q[1] / norm,
                    center.z + half.z * q[2] / norm,
                );
                let v = b.add(
                    p,
                    Tag {
                        part: Part::Torso,
                        s: 0.0,
                    },
                );
                index.insert([i, j, k], v);
            }
        }
    }
    let lat = Lattice { n, index };
    for axis in 0..3 {
        let (ab, ac) = ((axis + 1) % 3, (axis + 2) % 3);
        for positive in [false, true] {
            let level = if positive { n[axis] } else { 0 };
            for p in 0..n[ab] {
                for q in 0..n[ac] {
                    let removed = holes.iter().any(|h| {
                        h.axis == axis
                            && h.positive == positive
                            && (h.b.0..h.b.1).contains(&p)
                            && (h.c.0..h.c.1).contains(&q)
                    });
                    if removed {
                        continue;
                    }
                    let at = |dp: usize, dq: usize| {
                        let mut c = [0; 3];
                        c[axis] = level;
                        c[ab] = p + dp;
                        c[ac] = q + dq;
                        lat.vertex(c)
                    };
                    let mut quad = vec![at(0, 0), at(1, 0), at(1, 1), at(0, 1)];
                    if !positive {
                        quad.reverse();
                    }
                    b.polys.push(quad);
                }
            }
        }
    }
    lat
}

/// Boundary loop of a hole, ordered along the torso's directed edges and
/// starting at lattice point `start`.
fn hole_loop(b: &Builder, lat: &Lattice, hole: &Hole, start: [usize; 3]) -> Vec<usize> {
    let (ab, ac) = ((hole.axis + 1) % 3, (hole.axis + 2) % 3);
    let level = if hole.positive { lat.n[hole.axis] } else { 0 };
    let at = |p: usize, q: usize| {
        let mut c = [0; 3];
        c[hole.axis] = level;
        c[ab] = p;
        c[ac] = q;
        lat.vertex(c)
    };
    let mut rim: HashSet<(usize, usize)> = HashSet::new();
    let (b0, b1, c0, c1) = (hole.b.0, hole.b.1, hole.c.0, hole.c.1);
    for p in b0..b1 {
        rim.insert(key(at(p, c0), at(p + 1, c0)));
        rim.insert(key(at(p, c1), at(p + 1, c1)));
    }
    for q in c0..c1 {
        rim.insert(key(at(b0, q), at(b0, q + 1)));
        rim.insert(key(at(b1, q), at(b1, q + 1)));
    }
    let mut directed: HashMap<usize, Vec<usize>> = HashMap::new();
    for poly in &b.polys {
        for i in 0..poly.len() {
            let (u, v) = (poly[i], poly[(i + 1) % poly.len()]);
            if rim.contains(&key(u, v)) {
                directed.entry(u).or_default().push(v);
            }
        }
    }
    let first = lat.vertex(start);
    let mut out = vec![first];
    let mut cur = first;
    loop {
        let next = directed[&cur][0];
        if next == first {
            break;
        }
        out.push(next);
        cur = next;
    }
    out
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn centroid(b: &Builder, ids: &[usize]) -> Point {
    ids.iter().fold(Point::zero(), |acc, &v| acc + b.pos[v]) / ids.len() as f64
}

/// One blend zone between two bones along a centerline.
#[derive(Clone, Copy, Debug)]
struct Zone {
    from: Joint,
    to: Joint,
    start: f64,
    end: f64,
}

fn chain_influence(zones: &[Zone], s: f64) -> Influence {
    for z in zones {
        if s < z.start {
            return Influence::single(z.from);
        }
        if s <= z.end {
            return Influence::blend(z.from, z.to, smoothstep((s - z.start) / (z.end - z.start)));
        }
    }
    Influence::single(zones.last().expect("zones").to)
}

struct LimbInfo {
    zones: Vec<Zone>,
}

pub fn make_body(params: &BodyParams) -> Result<Body, SynthError> {
    params.check()?;
    let h = params.height;
    let spacing = h / params.rings_per_height as f64;
    let k = 2 * params.radial_segments.div_ceil(8);
    let ka = 2 * ((k as f64 / 3.0).round() as usize).max(1);
    let kn = ka;
    let nx = 2 * k + 4;
    let nz = k + 2;
    let bottom = ratios::CROTCH * h;
    let top = ratios::SHOULDER_LINE * h;
    let half = Vec3::new(
        ratios::TORSO_HALF_WIDTH * h,
        (top - bottom) / 2.0,
        ratios::TORSO_HALF_DEPTH * h,
    );
    let cell = (2.0 * half.x / nx as f64 + 2.0 * half.z / nz as f64) / 2.0;
    let ny = (((top - bottom) / cell).round() as usize).max(ka + 4);
    let n = [nx, ny, nz];
    let center = Vec3::new(0.0, (top + bottom) / 2.0, 0.0);

    let leg_hole = |side: Side| {
        let c = match side {
            Side::Left => (nx / 2 + 1, nx / 2 + 1 + k),
            Side::Right => (nx / 2 - 1 - k, nx / 2 - 1),
        };
        Hole {
            axis: 1,
            positive: false,
            b: (1, 1 + k),
            c,
        }
    };
    let arm_top_margin = 1;
    let arm_hole = |side: Side| Hole {
        axis: 0,
        positive: side == Side::Left,
        b: (ny - arm_top_margin - ka, ny - arm_top_margin),
        c: ((nz - ka) / 2, (nz + ka) / 2),
    };
    let neck_hole = Hole {
        axis: 1,
        positive: true,
        b: ((nz - kn) / 2, (nz + kn) / 2),
        c: ((nx - kn) / 2, (nx + kn) / 2),
    };
    let holes = [
        leg_hole(Side::Left),
        leg_hole(Side::Right),
        arm_hole(Side::Left),
        arm_hole(Side::Right),
        neck_hole,
    ];

    let mut b = Builder::default();
    let lat = build_torso(&mut b, n, center, half, &holes);

    // Loop start points sit at angle 0 of each tube frame.
    let leg_start = |side: Side| {
        let h = leg_hole(side);
        [(h.c.0 + h.c.1) / 2, 0, h.b.1]
    };
    let arm_start = |side: Side| {
        let h = arm_hole(side);
        [if side == Side::Left { nx } else { 0 }, h.b.0, (h.c.0 + h.c.1) / 2]
    };
    let neck_start = [nx / 2, ny, neck_hole.b.1];

    let ex = Vec3::new(1.0, 0.0, 0.0);
    let ey = Vec3::new(0.0, 1.0, 0.0);
    let ez = Vec3::new(0.0, 0.0, 1.0);

    let y_knee = ratios::KNEE * h;
    let y_ankle = ratios::ANKLE * h;
    let r_foot = ratios::FOOT_RADIUS * h;
    let bend = y_ankle - r_foot;

    let mut pivots = [Point::zero(); JOINT_COUNT];
    let mut patella = [0usize; 2];
    let mut heel = [Point::zero(); 2];
    let mut sole = [[Point::zero(); 2]; 2];
    let mut limb_zones: HashMap<(u8, u8), LimbInfo> = HashMap::new();
    let part_key = |p: Part| match p {
        Part::Torso => (0, 0),
        Part::Neck => (1, 0),
        Part::Leg(s) => (2, s.index() as u8),
        Part::Arm(s) => (3, s.index() as u8),
    };

    // Loops must be collected before any tube adds polygons around them.
    let loops: Vec<Vec<usize>> = [
        (&holes[0], leg_start(Side::Left)),
        (&holes[1], leg_start(Side::Right)),
        (&holes[2], arm_start(Side::Left)),
        (&holes[3], arm_start(Side::Right)),
        (&holes[4], neck_start),
    ]
    .iter()
    .map(|(hole, start)| hole_loop(&b, &lat, hole, *start))
    .collect();

    for side in [Side::Left, Side::Right] {
        let ring0 = loops[side.index()].clone();
        let c0 = centroid(&b, &ring0);
        let start = Station {
            c: c0,
            t: -ey,
            n: ez,
            b: (-ey).cross(ez),
            s: 0.0,
        };
        let s_knee = c0.y - y_knee;
        let s_ankle = c0.y - y_ankle;
        let radius = move |st: &Station, th: f64| {
            let base = if st.s <= s_ankle {
                profile(&LEG_PROFILE, st.c.y / h) * h
            } else {
                r_foot
            };
            let dy = st.c.y - y_knee;
            let wrapped = (th + PI).rem_euclid(TAU) - PI;
            let bump = if st.s <= s_ankle {
                PATELLA_HEIGHT
                    * h
                    * (-dy * dy / (2.0 * (PATELLA_SPREAD * h).powi(2))).exp()
                    * (-wrapped * wrapped / (2.0 * PATELLA_ANGLE * PATELLA_ANGLE)).exp()
            } else {
                0.0
            };
            base + bump
        };
        let out = sweep(
            &mut b,
            Tube {
                part: Part::Leg(side),
                ring0,
                start,
                pieces: vec![
                    Piece::Line(s_knee),
                    Piece::Line(y_knee - y_ankle),
                    Piece::Arc {
                        radius: bend,
                        angle: FRAC_PI_2,
                        toward: ez,
                    },
                    Piece::Line(ratios::FOOT_LENGTH * h),
                ],
                radius: &radius,
                end_radius: r_foot,
            },
            spacing,
        );
        let knee_station = out
            .stations
            .iter()
            .position(|st| (st.s - s_knee).abs() < 1e-12)
            .expect("station at the knee");
        patella[side.index()] = out.rings[knee_station][0];
        let hip_pivot = Vec3::new(c0.x, ratios::HIP_JOINT * h, c0.z);
        pivots[Joint::hip(side).index()] = hip_pivot;
        pivots[Joint::knee(side).index()] = Vec3::new(c0.x, y_knee, c0.z);
        pivots[Joint::ankle(side).index()] = Vec3::new(c0.x, y_ankle, c0.z);
        let phi = FRAC_PI_2 / 2.0;
        let arc_point = Vec3::new(c0.x, y_ankle - bend * phi.sin(), c0.z + bend * (1.0 - phi.cos()));
        let outward = Vec3::new(0.0, -phi.sin(), -phi.cos());
        heel[side.index()] = arc_point + outward * r_foot;
        let ball = Vec3::new(c0.x, 0.0, c0.z + bend);
        sole[side.index()] = [heel[side.index()], ball];
        let hb = HIP_BLEND * h;
        let kb = KNEE_BLEND * h / 2.0;
        let ab = ANKLE_BLEND * h / 2.0;
        limb_zones.insert(
            part_key(Part::Leg(side)),
            LimbInfo {
                zones: vec![
                    Zone {
                        from: Joint::Pelvis,
                        to: Joint::hip(side),
                        start: 0.0,
                        end: hb,
                    },
                    Zone {
                        from: Joint::hip(side),
                        to: Joint::knee(side),
                        start: s_knee - kb,
                        end: s_knee + kb,
                    },
                    Zone {
                        from: Joint::knee(side),
                        to: Joint::ankle(side),
                        start: s_ankle - ab,
                        end: s_ankle + ab,
                    },
                ],
            },
        );
    }

    for side in [Side::Left, Side::Right] {
        let ring0 = loops[2 + side.index()].clone();
        let c0 = centroid(&b, &ring0);
        let out_dir = match side {
            Side::Left => ex,
            Side::Right => -ex,
        };
        let start = Station {
            c: c0,
            t: out_dir,
            n: -ey,
            b: out_dir.cross(-ey),
            s: 0.0,
        };
        let reach = 0.01 * h;
        let bend = 0.035 * h;
        let (upper, fore, hand) = (ratios::UPPER_ARM * h, ratios::FOREARM * h, ratios::HAND * h);
        let s_shoulder = reach + bend * FRAC_PI_2;
        let s_elbow = s_shoulder + upper;
        let s_wrist = s_elbow + fore;
        let total = s_wrist + hand;
        let radius = move |st: &Station, _th: f64| profile(&ARM_PROFILE, st.s / total) * h;
        let end_radius = ARM_PROFILE[ARM_PROFILE.len() - 1].1 * h;
        sweep(
            &mut b,
            Tube {
                part: Part::Arm(side),
                ring0,
                start,
                pieces: vec![
                    Piece::Line(reach),
                    Piece::Arc {
                        radius: bend,
                        angle: FRAC_PI_2,
                        toward: -ey,
                    },
                    Piece::Line(upper),
                    Piece::Line(fore),
                    Piece::Line(hand),
                ],
                radius: &radius,
                end_radius,
            },
            spacing,
        );
        let shoulder = c0 + out_dir * (reach + bend) - ey * bend;
        pivots[Joint::shoulder(side).index()] = shoulder;
        pivots[Joint::elbow(side).index()] = shoulder - ey * upper;
        pivots[Joint::wrist(side).index()] = shoulder - ey * (upper + fore);
        let eb = ELBOW_BLEND * h / 2.0;
        let wb = WRIST_BLEND * h / 2.0;
        limb_zones.insert(
            part_key(Part::Arm(side)),
            LimbInfo {
                zones: vec![
                    Zone {
                        from: Joint::Spine,
                        to: Joint::shoulder(side),
                        start: 0.0,
                        end: s_shoulder,
                    },
                    Zone {
                        from: Joint::shoulder(side),
                        to: Joint::elbow(side),
                        start: s_elbow - eb,
                        end: s_elbow + eb,
                    },
                    Zone {
                        from: Joint::elbow(side),
                        to: Joint::wrist(side),
                        start: s_wrist - wb,
                        end: s_wrist + wb,
                    },
                ],
            },
        );
    }

    {
        let ring0 = loops[4].clone();
        let c0 = centroid(&b, &ring0);
        let start = Station {
            c: c0,
            t: ey,
            n: ez,
            b: ey.cross(ez),
            s: 0.0,
        };
        let r_neck = ratios::NECK_RADIUS * h;
        let r_head = ratios::HEAD_RADIUS * h;
        let phi0 = (r_neck / r_head).asin();
        let neck_len = h - r_head * (1.0 + phi0.cos()) - c0.y;
        let radius = move |_st: &Station, _th: f64| r_neck;
        sweep(
            &mut b,
            Tube {
                part: Part::Neck,
                ring0,
                start,
                pieces: vec![Piece::Line(neck_len)],
                radius: &radius,
                end_radius: r_head,
            },
            spacing,
        );
        pivots[Joint::Neck.index()] = Vec3::new(0.0, c0.y, 0.0);
        limb_zones.insert(
            part_key(Part::Neck),
            LimbInfo {
                zones: vec![Zone {
                    from: Joint::Spine,
                    to: Joint::Neck,
                    start: 0.0,
                    end: neck_len,
                }],
            },
        );
    }
    pivots[Joint::Pelvis.index()] = Vec3::new(0.0, ratios::HIP_JOINT * h, 0.0);
    pivots[Joint::Spine.index()] = Vec3::new(0.0, ratios::WAIST * h, 0.0);

    let mirror = mirror_map(&b.pos)?;
    symmetrize(&mut b.pos, &mirror);
    for side in [Side::Left] {
        for j in [
            Joint::hip(side),
            Joint::knee(side),
            Joint::ankle(side),
            Joint::shoulder(side),
            Joint::elbow(side),
            Joint::wrist(side),
        ] {
            pivots[j.mirrored().index()] = pivots[j.index()].mirror_x();
        }
    }
    heel[Side::Right.index()] = heel[Side::Left.index()].mirror_x();
    sole[Side::Right.index()] = sole[Side::Left.index()].map(|p| p.mirror_x());
    if mirror[patella[0]] != patella[1] {
        return Err(SynthError::Asymmetric("kneecap markers are not mirror images".into()));
    }

    let (triangles, extra) = triangulate_symmetric(&b.polys, &b.pos, &mirror)?;
    let mut mirror = mirror;
    for (p, tag) in extra {
        let v = b.add(p, tag);
        mirror.push(v);
    }
    // Lattice points inside the holes belong to no polygon.
    let mut used = vec![false; b.pos.len()];
    triangles.iter().flatten().for_each(|&v| used[v] = true);
    let mut remap = vec![usize::MAX; b.pos.len()];
    let mut kept = 0;
    for v in 0..b.pos.len() {
        if used[v] {
            remap[v] = kept;
            kept += 1;
        }
    }
    let pos: Vec<Point> = b.pos.iter().zip(&used).filter(|p| *p.1).map(|p| *p.0).collect();
    let tags: Vec<Tag> = b.tags.iter().zip(&used).filter(|t| *t.1).map(|t| *t.0).collect();
    b.pos = pos;
    b.tags = tags;
    let mirror: Vec<usize> = (0..used.len()).filter(|&v| used[v]).map(|v| remap[mirror[v]]).collect();
    let triangles: Vec<[usize; 3]> = triangles.iter().map(|t| t.map(|v| remap[v])).collect();
    let patella = patella.map(|v| remap[v]);

    let torso_zone = Zone {
        from: Joint::Pelvis,
        to: Joint::Spine,
        start: ratios::WAIST * h - 0.04 * h,
        end: ratios::WAIST * h + 0.04 * h,
    };
    let mut influences: Vec<Influence> = b
        .tags
        .iter()
        .zip(&b.pos)
        .map(|(tag, p)| match tag.part {
            Part::Torso => chain_influence(&[torso_zone], p.y),
            part => chain_influence(&limb_zones[&part_key(part)].zones, tag.s),
        })
        .collect();
    for v in 0..influences.len() {
        let m = mirror[v];
        if b.pos[v].x > 0.0 {
            influences[m] = influences[v].mirrored();
        }
    }

    let mesh = Mesh::new(b.pos, triangles)?;
    Ok(Body {
        params: *params,
        mesh,
        weights: SkinWeights {
            skeleton: Skeleton { pivots },
            influences,
        },
        markers: BodyMarkers { patella, heel, sole },
        mirror,
    })
}

/// Pairs every vertex with the vertex nearest its reflection.
fn mirror_map(pos: &[Point]) -> Result<Vec<usize>, SynthError> {
    let grid = PointGrid::new(pos, 0.02);
    let mut m = Vec::with_capacity(pos.len());
    for (v, p) in pos.iter().enumerate() {
        let (w, d) = grid.nearest(p.mirror_x()).expect("non-empty");
        if d > 1e-7 {
            return Err(SynthError::Asymmetric(format!(
                "vertex {v} has no mirror partner ({d:e} m off)"
            )));
        }
        m.push(w);
    }
    for v in 0..m.len() {
        if m[m[v]] != v {
            return Err(SynthError::Asymmetric(format!(
                "mirror pairing is not an involution at vertex {v}"
            )));
        }
    }
    Ok(m)
}

fn symmetrize(pos: &mut [Point], mirror: &[usize]) {
    for v in 0..pos.len() {
        let w = mirror[v];
        if w == v {
            pos[v].x = 0.0;
        } else if v < w {
            let (a, b) = (pos[v], pos[w].mirror_x());
            let mid = Vec3::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0, (a.z + b.z) / 2.0);
            pos[v] = mid;
            pos[w] = mid.mirror_x();
        }
    }
}

type Extra = Vec<(Point, Tag)>;

/// Splits quads so that the triangulation commutes with the reflection.
/// Quads mapped onto themselves get a centre vertex on the plane.
fn triangulate_symmetric(
    polys: &[Vec<usize>],
    pos: &[Point],
    mirror: &[usize],
) -> Result<(Vec<[usize; 3]>, Extra), SynthError> {
    let sorted = |p: &[usize]| {
        let mut s = p.to_vec();
        s.sort_unstable();
        s
    };
    let by_set: HashMap<Vec<usize>, usize> = polys.iter().enumerate().map(|(i, p)| (sorted(p), i)).collect();
    // Diagonal chosen for each quad, as a vertex pair.
    let mut diagonal: Vec<Option<(usize, usize)>> = vec![None; polys.len()];
    let mut tris = Vec::new();
    let mut extra: Extra = Vec::new();
    let next_index = pos.len();
    for (qi, poly) in polys.iter().enumerate() {
        match poly.len() {
            3 => tris.push([poly[0], poly[1], poly[2]]),
            4 => {
                let image: Vec<usize> = poly.iter().map(|&v| mirror[v]).collect();
                let Some(&mi) = by_set.get(&sorted(&image)) else {
                    return Err(SynthError::Asymmetric(format!("polygon {qi} has no mirror image")));
                };
                let [a, b, c, d] = [poly[0], poly[1], poly[2], poly[3]];
                if mi == qi {
                    let centre = (pos[a] + pos[b] + pos[c] + pos[d]) / 4.0;
                    let m = next_index + extra.len();
                    extra.push((
                        Vec3::new(0.0, centre.y, centre.z),
                        Tag {
                            part: Part::Torso,
                            s: 0.0,
                        },
                    ));
                    tris.extend([[a, b, m], [b, c, m], [c, d, m], [d, a, m]]);
                    continue;
                }
                let diag = match diagonal[mi] {
                    Some((x, y)) => (mirror[x], mirror[y]),
                    None => {
                        if pos[a].distance(pos[c]) <= pos[b].distance(pos[d]) {
                            (a, c)
                        } else {
                            (b, d)
                        }
                    }
                };
                diagonal[qi] = Some(diag);
                if key(diag.0, diag.1) == key(a, c) {
                    tris.push([a, b, c]);
                    tris.push([a, c, d]);
                } else {
                    tris.push([a, b, d]);
                    tris.push([b, c, d]);
                }
            }
            k => return Err(SynthError::Asymmetric(format!("unexpected {k}-gon"))),
        }
    }
    Ok((tris, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_hits_keys() {
        let keys = [(0.0, 1.0), (1.0, 3.0), (2.0, 3.0)];
        assert_eq!(profile(&keys, -1.0), 1.0);
        assert_eq!(profile(&keys, 1.0), 3.0);
        assert_eq!(profile(&keys, 1.5), 3.0);
        assert!((profile(&keys, 0.5) - 2.0).abs() < 1e-12);
        let down = [(2.0, 0.0), (1.0, 1.0)];
        assert_eq!(profile(&down, 0.5), 1.0);
    }

    #[test]
    fn arc_frames_stay_orthonormal() {
        let s = Station {
            c: Point::zero(),
            t: Vec3::new(0.0, -1.0, 0.0),
            n: Vec3::new(0.0, 0.0, 1.0),
            b: Vec3::new(-1.0, 0.0, 0.0),
            s: 0.0,
        };
        let st = march(
            s,
            &[Piece::Arc {
                radius: 0.1,
                angle: FRAC_PI_2,
                toward: Vec3::new(0.0, 0.0, 1.0),
            }],
            0.01,
        );
        let last = st.last().unwrap();
        assert!((last.t.z - 1.0).abs() < 1e-12);
        assert!((last.c.y + 0.1).abs() < 1e-12 && (last.c.z - 0.1).abs() < 1e-12);
        assert!(last.t.dot(last.n).abs() < 1e-12 && (last.s - 0.1 * FRAC_PI_2).abs() < 1e-12);
    }
}
