//! Routing of integration paths through the domain.
//!
//! Anchors (a square grid plus guard rings around the holes, the puncture and
//! inside the exterior circle) are joined by straight chords that keep clear
//! of every obstacle. A shortest-path tree from the base point fixes one
//! path to each anchor, and `int F dG` is accumulated along it once. A
//! target is reached from the nearest anchor whose chord to it is clear,
//! after a radial step away from any obstacle closer than the guard offset.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{segment_integral, HolomorphicData, PUNCTURE_GUARD};
use crate::domain::CircularDomain;
use crate::error::{Error, Result};

const GRID_SIDE: usize = 24;
const MIN_RING: usize = 48;
const EDGE_REACH: f64 = 2.5;
const CANDIDATES: usize = 32;

#[derive(Debug, Clone, Copy)]
enum Obstacle {
    Hole { center: Complex64, radius: f64 },
    Exterior { center: Complex64, radius: f64 },
    Point(Complex64),
}

impl Obstacle {
    fn clearance(&self, z: Complex64) -> f64 {
        match *self {
            Obstacle::Hole { center, radius } => (z - center).norm() - radius,
            Obstacle::Exterior { center, radius } => radius - (z - center).norm(),
            Obstacle::Point(p) => (z - p).norm(),
        }
    }

    fn segment_clearance(&self, a: Complex64, b: Complex64) -> f64 {
        match *self {
            Obstacle::Hole { center, radius } => point_segment_distance(center, a, b) - radius,
            Obstacle::Exterior { .. } => self.clearance(a).min(self.clearance(b)),
            Obstacle::Point(p) => point_segment_distance(p, a, b),
        }
    }

    /// Radial projection to clearance `delta`.
    fn lift(&self, z: Complex64, delta: f64) -> Complex64 {
        let (center, radius) = match *self {
            Obstacle::Hole { center, radius } => (center, radius + delta),
            Obstacle::Exterior { center, radius } => (center, radius - delta),
            Obstacle::Point(p) => (p, delta),
        };
        let d = z - center;
        let dir = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        center + dir * radius
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

#[derive(Debug, Clone)]
pub(crate) struct Router {
    base: Complex64,
    obstacles: Vec<Obstacle>,
    delta: f64,
    anchors: Vec<Complex64>,
    /// `int F dG` from the base point, `None` for unreachable anchors
    values: Vec<Option<Complex64>>,
}

#[derive(PartialEq)]
struct Queued(f64, usize);

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by index
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl Router {
    pub(crate) fn build(data: &HolomorphicData, base: Complex64) -> Result<Self> {
        let d = data.domain();
        let obstacles = obstacles(d);
        let delta = guard_offset(d);
        let spacing = 2.0 * d.outer.radius / GRID_SIDE as f64;
        let mut router = Router {
            base,
            obstacles,
            delta,
            anchors: Vec::new(),
            values: Vec::new(),
        };

        let root = router.lift(base);
        let mut anchors = alloc::vec![root];
        for i in 0..GRID_SIDE {
            for j in 0..GRID_SIDE {
                let off = Complex64::new(
                    -1.0 + (2 * i + 1) as f64 / GRID_SIDE as f64,
                    -1.0 + (2 * j + 1) as f64 / GRID_SIDE as f64,
                );
                let z = d.outer.center + off * d.outer.radius;
                if router.clearance(z) >= delta {
                    anchors.push(z);
                }
            }
        }
        for o in router.obstacles.clone() {
            let (center, radius) = match o {
                Obstacle::Hole { center, radius } => (center, radius + delta),
                Obstacle::Exterior { center, radius } => (center, radius - delta),
                Obstacle::Point(p) => (p, delta),
            };
            let m = ring_size(radius, delta, spacing);
            for j in 0..m {
                let z = center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
                if router.clearance(z) >= 0.9 * delta {
                    anchors.push(z);
                }
            }
        }

        let n = anchors.len();
        let reach = EDGE_REACH * spacing;
        let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        let clear: Vec<f64> = anchors.iter().map(|z| router.clearance(*z)).collect();
        for i in 0..n {
            for j in i + 1..n {
                if (anchors[i] - anchors[j]).norm() <= reach
                    && router.admissible(anchors[i], anchors[j], clear[i], clear[j])
                {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }

        // shortest-path tree from the root
        let mut dist = alloc::vec![f64::INFINITY; n];
        let mut parent = alloc::vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut done = alloc::vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[0] = 0.0;
        heap.push(Queued(0.0, 0));
        while let Some(Queued(dv, v)) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            order.push(v);
            for &w in &adj[v] {
                let nd = dv + (anchors[v] - anchors[w]).norm();
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = v;
                    heap.push(Queued(nd, w));
                }
            }
        }

        let mut values = alloc::vec![None; n];
        values[0] = Some(segment_integral(data, base, root)?);
        for &v in order.iter().skip(1) {
            let p = parent[v];
            let start = values[p].expect("parents are settled first");
            values[v] = Some(start + segment_integral(data, anchors[p], anchors[v])?);
        }
        router.anchors = anchors;
        router.values = values;
        Ok(router)
    }

    fn clearance(&self, z: Complex64) -> f64 {
        self.obstacles.iter().map(|o| o.clearance(z)).fold(f64::INFINITY, f64::min)
    }

    fn admissible(&self, a: Complex64, b: Complex64, ca: f64, cb: f64) -> bool {
        let need = 0.5 * self.delta.min(ca).min(cb);
        need > 0.0 && self.obstacles.iter().all(|o| o.segment_clearance(a, b) >= need)
    }

    /// Moves `z` radially away from the nearest obstacle when it is closer
    /// than the guard offset.
    fn lift(&self, z: Complex64) -> Complex64 {
        let nearest = self
            .obstacles
            .iter()
            .min_by(|a, b| a.clearance(z).total_cmp(&b.clearance(z)))
            .expect("the exterior circle is always an obstacle");
        if nearest.clearance(z) >= self.delta {
            z
        } else {
            nearest.lift(z, self.delta)
        }
    }

    pub(crate) fn integral(&self, data: &HolomorphicData, target: Complex64) -> Result<Complex64> {
        if target == self.base {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ct = self.clearance(target);
        if !(ct > 0.0) || self.obstacles.iter().any(|o| matches!(o, Obstacle::Point(p) if (target - p).norm() < PUNCTURE_GUARD)) {
            return Err(Error::PathRoutingFailed(target));
        }
        let w = self.lift(target);
        let cw = self.clearance(w);
        let mut near: Vec<(f64, usize)> = self
            .anchors
            .iter()
            .enumerate()
            .filter(|(i, _)| self.values[*i].is_some())
            .map(|(i, a)| ((a - w).norm(), i))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, i) in near.iter().take(CANDIDATES) {
            let a = self.anchors[i];
            if self.admissible(a, w, self.clearance(a), cw) {
                let start = self.values[i].expect("filtered to reachable anchors");
                return Ok(start + segment_integral(data, a, w)? + segment_integral(data, w, target)?);
            }
        }
        Err(Error::PathRoutingFailed(target))
    }
}

fn obstacles(d: &CircularDomain) -> Vec<Obstacle> {
    let mut v: Vec<Obstacle> = d
        .inner
        .iter()
        .map(|c| Obstacle::Hole {
            center: c.center,
            radius: c.radius,
        })
        .collect();
    v.push(Obstacle::Exterior {
        center: d.outer.center,
        radius: d.outer.radius,
    });
    v.push(Obstacle::Point(d.puncture));
    v
}

/// Three tenths of the narrowest gap between obstacles.
fn guard_offset(d: &CircularDomain) -> f64 {
    let mut gap = d.boundary_clearance(d.puncture);
    for (i, c) in d.inner.iter().enumerate() {
        gap = gap.min(-d.outer.signed_distance(c.center) - c.radius);
        for e in &d.inner[i + 1..] {
            gap = gap.min((c.center - e.center).norm() - c.radius - e.radius);
        }
    }
    0.3 * gap
}

/// Ring nodes spaced at most one grid step apart and with chord sag at most
/// a quarter of the guard offset.
fn ring_size(radius: f64, delta: f64, spacing: f64) -> usize {
    let by_spacing = libm::ceil(2.0 * PI * radius / spacing) as usize;
    let cos_half = 1.0 - 0.25 * delta / radius.max(delta);
    let by_sag = libm::ceil(PI / libm::acos(cos_half.clamp(-1.0, 1.0))) as usize;
    MIN_RING.max(by_spacing).max(by_sag)
}
