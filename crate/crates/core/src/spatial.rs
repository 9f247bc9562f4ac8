//! Uniform-grid point index for nearest-neighbour queries.

use std::collections::HashMap;

use crate::geom::Vec3;

type Cell = (i64, i64, i64);

/// Bucket grid over a fixed point set.
#[derive(Clone, Debug)]
pub struct PointGrid {
    points: Vec<Vec3<f64>>,
    cell: f64,
    buckets: HashMap<Cell, Vec<usize>>,
    lo: Cell,
    hi: Cell,
}

impl PointGrid {
    /// Builds a grid with the given cell edge (m). A non-positive or
    /// non-finite `cell` falls back to a size derived from the bounding box.
    pub fn new(points: &[Vec3<f64>], cell: f64) -> Self {
        let cell = if cell.is_finite() && cell > 0.0 {
            cell
        } else {
            auto_cell(points)
        };
        let mut buckets: HashMap<Cell, Vec<usize>> = HashMap::new();
        let mut lo = (i64::MAX, i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN, i64::MIN);
        for (i, &p) in points.iter().enumerate() {
            let c = cell_of(p, cell);
            lo = (lo.0.min(c.0), lo.1.min(c.1), lo.2.min(c.2));
            hi = (hi.0.max(c.0), hi.1.max(c.1), hi.2.max(c.2));
            buckets.entry(c).or_default().push(i);
        }
        Self {
            points: points.to_vec(),
            cell,
            buckets,
            lo,
            hi,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance of the point closest to `q`; ties go to the
    /// lowest index.
    pub fn nearest(&self, q: Vec3<f64>) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let c = cell_of(q, self.cell);
        // Largest shell that can still intersect the occupied box.
        let reach = [
            (c.0 - self.lo.0).abs().max((self.hi.0 - c.0).abs()),
            (c.1 - self.lo.1).abs().max((self.hi.1 - c.1).abs()),
            (c.2 - self.lo.2).abs().max((self.hi.2 - c.2).abs()),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        for r in 0..=reach {
            self.visit_shell(c, r, |i| {
                let d = self.points[i].distance(q);
                match best {
                    Some((bi, bd)) if d > bd || (d == bd && i > bi) => {}
                    _ => best = Some((i, d)),
                }
            });
            if let Some((_, d)) = best {
                // Any point in shell r + 1 is at least r cells away.
                if d <= r as f64 * self.cell {
                    break;
                }
            }
        }
        best
    }

    /// All indices within `radius` of `q`, ascending.
    pub fn within(&self, q: Vec3<f64>, radius: f64) -> Vec<usize> {
        let c = cell_of(q, self.cell);
        let r = (radius / self.cell).ceil() as i64;
        let mut out = Vec::new();
        for i in c.0 - r..=c.0 + r {
            for j in c.1 - r..=c.1 + r {
                for k in c.2 - r..=c.2 + r {
                    if let Some(b) = self.buckets.get(&(i, j, k)) {
                        out.extend(b.iter().copied().filter(|&v| self.points[v].distance(q) <= radius));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn visit_shell(&self, c: Cell, r: i64, mut f: impl FnMut(usize)) {
        for i in c.0 - r..=c.0 + r {
            for j in c.1 - r..=c.1 + r {
                for k in c.2 - r..=c.2 + r {
                    let on_shell = (i - c.0).abs() == r || (j - c.1).abs() == r || (k - c.2).abs() == r;
                    if !on_shell {
                        continue;
                    }
                    if let Some(b) = self.buckets.get(&(i, j, k)) {
                        b.iter().for_each(|&v| f(v));
                    }
                }
            }
        }
    }
}

fn cell_of(p: Vec3<f64>, cell: f64) -> Cell {
    (
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    )
}

fn auto_cell(points: &[Vec3<f64>]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let extent = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    let per_axis = (points.len().max(1) as f64).cbrt();
    let cell = extent / per_axis;
    if cell.is_finite() && cell > 0.0 {
        cell
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    fn brute(points: &[Vec3<f64>], q: Vec3<f64>) -> (usize, f64) {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.distance(q)))
            .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
    }

    #[test]
    fn matches_brute_force() {
        let pts = shapes::icosphere::<f64>(1.0, 3).vertices().to_vec();
        for cell in [0.05, 0.3, 5.0, 0.0] {
            let g = PointGrid::new(&pts, cell);
            for q in [
                Vec3::new(0.1, 0.2, 0.3),
                Vec3::new(3.0, -2.0, 0.5),
                Vec3::new(0.0, 0.0, 1.0),
            ] {
                let (i, d) = g.nearest(q).unwrap();
                let (bi, bd) = brute(&pts, q);
                assert_eq!(d, bd);
                assert_eq!(i, bi);
            }
        }
    }

    #[test]
    fn within_radius() {
        let pts: Vec<_> = (0..10).map(|i| Vec3::new(i as f64 * 0.1, 0.0, 0.0)).collect();
        let g = PointGrid::new(&pts, 0.07);
        assert_eq!(g.within(Vec3::new(0.0, 0.0, 0.0), 0.25), vec![0, 1, 2]);
        assert!(PointGrid::new(&[], 1.0).nearest(Vec3::zero()).is_none());
    }
}
