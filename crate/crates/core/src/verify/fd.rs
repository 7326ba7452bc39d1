//! Finite-difference Monge-Ampere oracle on planar grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::AffineSphereSolution;

/// Planar evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGrid {
    pub points: Vec<[f64; 2]>,
}

impl PlanarGrid {
    /// `radial x angular` points on circles of radius between `r_min` and
    /// `r_max` about `center`, cell-centred in both directions.
    pub fn polar(center: [f64; 2], r_min: f64, r_max: f64, radial: usize, angular: usize) -> Self {
        let mut points = Vec::with_capacity(radial * angular);
        for i in 0..radial {
            let r = r_min + (r_max - r_min) * (i as f64 + 0.5) / radial as f64;
            for j in 0..angular {
                let (s, c) = libm::sincos(2.0 * PI * (j as f64 + 0.5) / angular as f64);
                points.push([center[0] + r * c, center[1] + r * s]);
            }
        }
        PlanarGrid { points }
    }

    /// A 10 x 10 polar grid about the centroid of the singular points,
    /// starting `clearance` beyond the farthest of them and `width` wide.
    pub fn around_singularities(singular: &[Complex64], clearance: f64, width: f64) -> Self {
        let centroid = singular.iter().sum::<Complex64>() / singular.len().max(1) as f64;
        let reach = singular.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
        let r_min = reach + clearance;
        PlanarGrid::polar([centroid.re, centroid.im], r_min, r_min + width, 10, 10)
    }
}

/// Central-difference Hessian at one planar point together with the
/// chain-rule Hessian there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdPoint {
    pub z: Complex64,
    /// `(phi_xx, phi_xy, phi_yy)` by differences
    pub fd: [f64; 3],
    /// `(phi_xx, phi_xy, phi_yy)` by the chain rule
    pub analytic: [f64; 3],
}

impl FdPoint {
    /// `|det - 1|` of the difference Hessian.
    pub fn residual(&self) -> f64 {
        let [xx, xy, yy] = self.fd;
        (xx * yy - xy * xy - 1.0).abs()
    }

    /// Largest entrywise gap between the two Hessians.
    pub fn gap(&self) -> f64 {
        self.fd
            .iter()
            .zip(&self.analytic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`ma_residual_fd`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdSummary {
    pub worst: f64,
    pub worst_at: Option<[f64; 2]>,
    pub worst_gap: f64,
    pub worst_gap_at: Option<[f64; 2]>,
    pub evaluated: usize,
    pub skipped: Vec<([f64; 2], Error)>,
}

/// Evaluates `phi` on a 3 x 3 stencil of spacing `h` about `xy`.
///
/// Every stencil value is measured relative to the stencil centre by
/// integrating along the short segment between the two conformal preimages,
/// so the routed part of the path integral cancels exactly. The small
/// mismatch left by the inversion is removed to first order with the
/// gradient.
pub fn fd_point(sol: &AffineSphereSolution, xy: [f64; 2], h: f64) -> Result<FdPoint> {
    check_step(h)?;
    let target = Complex64::new(xy[0], xy[1]);
    for p in sol.singularity_estimates() {
        if (p - target).norm() < 10.0 * h {
            return Err(Error::SingularityTarget);
        }
    }
    let zc = sol.invert_graph((xy[0], xy[1]))?;
    let centre = sol.local_derivatives(zc)?;
    let shift = |s: &crate::sphere::SurfaceSample, t: Complex64| s.phi_x * (t.re - s.x) + s.phi_y * (t.im - s.y);
    let base = shift(&centre, target);
    let mut v = [[0.0f64; 3]; 3];
    for (i, dx) in [-1.0, 0.0, 1.0].iter().enumerate() {
        for (j, dy) in [-1.0, 0.0, 1.0].iter().enumerate() {
            if i == 1 && j == 1 {
                continue;
            }
            let t = target + Complex64::new(dx * h, dy * h);
            let z = sol.invert_graph_from(zc, (t.re, t.im))?;
            let s = sol.local_derivatives(z)?;
            v[i][j] = sol.phi_difference(zc, z)? + shift(&s, t) - base;
        }
    }
    let h2 = h * h;
    let xx = (v[2][1] + v[0][1]) / h2;
    let yy = (v[1][2] + v[1][0]) / h2;
    let xy_ = (v[2][2] - v[2][0] - v[0][2] + v[0][0]) / (4.0 * h2);
    Ok(FdPoint {
        z: zc,
        fd: [xx, xy_, yy],
        analytic: centre.hessian,
    })
}

fn check_step(h: f64) -> Result<()> {
    if (1e-5..=1e-2).contains(&h) {
        Ok(())
    } else {
        Err(Error::InvalidStep(h))
    }
}

/// Worst `|det D^2 phi - 1|` of the difference Hessian over the grid. Points
/// that cannot be evaluated (within `10 h` of a singular point, failed
/// inversion) are skipped and listed.
pub fn ma_residual_fd(sol: &AffineSphereSolution, grid: &PlanarGrid, h: f64) -> Result<FdSummary> {
    check_step(h)?;
    let mut out = FdSummary {
        worst: 0.0,
        worst_at: None,
        worst_gap: 0.0,
        worst_gap_at: None,
        evaluated: 0,
        skipped: Vec::new(),
    };
    for &xy in &grid.points {
        match fd_point(sol, xy, h) {
            Ok(p) => {
                out.evaluated += 1;
                let r = p.residual();
                if !(r <= out.worst) {
                    out.worst = r;
                    out.worst_at = Some(xy);
                }
                let g = p.gap();
                if !(g <= out.worst_gap) {
                    out.worst_gap = g;
                    out.worst_gap_at = Some(xy);
                }
            }
            Err(e) => out.skipped.push((xy, e)),
        }
    }
    Ok(out)
}
