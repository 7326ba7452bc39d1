//! Surface sampling on a polar grid about the puncture, CSV and OBJ output.

use std::f64::consts::PI;
use std::fmt::Write as _;

use hessone_core::{AffineSphereSolution, CircularDomain, Complex64, SurfaceSample};
use rayon::prelude::*;

use crate::config::GridSpec;

pub const CSV_HEADER: &str = "x,y,phi,phi_x,phi_y,phi_xx,phi_xy,phi_yy,ma_residual";

/// Smallest radius of the grid as a fraction of the ray length.
const INNER_FRACTION: f64 = 0.05;

/// Samples in grid order, `None` where evaluation failed.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub radial: usize,
    pub angular: usize,
    pub samples: Vec<Option<SurfaceSample>>,
}

impl SurfaceGrid {
    pub fn skipped(&self) -> usize {
        self.samples.iter().filter(|s| s.is_none()).count()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SurfaceSample> {
        self.samples.iter().flatten()
    }
}

/// Distance from `from` along the unit direction `dir` to the first
/// boundary circle.
fn ray_length(d: &CircularDomain, from: Complex64, dir: Complex64) -> f64 {
    // |from + t dir - c|^2 = R^2  <=>  t^2 + 2 b t + k = 0
    let hit = |c: Complex64, r: f64| {
        let w = from - c;
        let b = (w * dir.conj()).re;
        let k = w.norm_sqr() - r * r;
        let disc = b * b - k;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        [-b - s, -b + s].into_iter().find(|t| *t > 0.0)
    };
    let mut t = hit(d.outer.center, d.outer.radius).unwrap_or(f64::INFINITY);
    for c in &d.inner {
        if let Some(u) = hit(c.center, c.radius) {
            t = t.min(u);
        }
    }
    t
}

/// Conformal grid points, ring by ring from the puncture outwards. Rings are
/// clustered towards the boundary, and the last one stops `boundary_offset`
/// short of it.
pub fn polar_points(d: &CircularDomain, grid: &GridSpec) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(grid.radial_steps * grid.angular_steps);
    let rays: Vec<(Complex64, f64)> = (0..grid.angular_steps)
        .map(|j| {
            let dir = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / grid.angular_steps as f64);
            (dir, ray_length(d, d.puncture, dir) - grid.boundary_offset)
        })
        .collect();
    for i in 0..grid.radial_steps {
        let t = i as f64 / (grid.radial_steps - 1) as f64;
        let s = INNER_FRACTION + (1.0 - INNER_FRACTION) * (0.5 * PI * t).sin();
        for &(dir, len) in &rays {
            out.push(d.puncture + dir * (s * len));
        }
    }
    out
}

pub fn sample_surface(sol: &AffineSphereSolution, grid: &GridSpec) -> SurfaceGrid {
    let points = polar_points(sol.domain(), grid);
    let samples = points.par_iter().map(|&z| sol.phi_derivatives(z).ok()).collect();
    SurfaceGrid {
        radial: grid.radial_steps,
        angular: grid.angular_steps,
        samples,
    }
}

pub fn csv(grid: &SurfaceGrid) -> String {
    let mut s = String::with_capacity(160 * grid.samples.len());
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in grid.rows() {
        let [xx, xy, yy] = p.hessian;
        let vals = [p.x, p.y, p.phi, p.phi_x, p.phi_y, xx, xy, yy, p.ma_residual];
        for (k, v) in vals.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            write!(s, "{v:.14e}").expect("writing to a string");
        }
        s.push('\n');
    }
    s
}

/// Triangulated `(x, y, phi)` mesh; cells touching a skipped point are
/// dropped.
pub fn obj(grid: &SurfaceGrid) -> String {
    let mut s = String::new();
    let mut index = vec![0usize; grid.samples.len()];
    let mut next = 1;
    for (k, p) in grid.samples.iter().enumerate() {
        if let Some(p) = p {
            writeln!(s, "v {:.14e} {:.14e} {:.14e}", p.x, p.y, p.phi).expect("writing to a string");
            index[k] = next;
            next += 1;
        }
    }
    let at = |i: usize, j: usize| i * grid.angular + j % grid.angular;
    for i in 0..grid.radial - 1 {
        for j in 0..grid.angular {
            let (a, b, c, d) = (at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
            if [a, b, c, d].iter().any(|k| index[*k] == 0) {
                continue;
            }
            writeln!(s, "f {} {} {}", index[a], index[b], index[c]).expect("writing to a string");
            writeln!(s, "f {} {} {}", index[a], index[c], index[d]).expect("writing to a string");
        }
    }
    s
}
