//! Newton inversion of `z -> (G + conj F)(z) / 2`.
//!
//! With `a = G'/2` and `b = conj(F')/2` a step solves
//! `a dz + b conj(dz) = -e`, i.e. `dz = (b conj e - conj(a) e) / (|a|^2 - |b|^2)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{AffineSphereSolution, HolomorphicData};
use crate::error::{Error, Result};

const SEED_SIDE: usize = 64;
const MAX_ITER: usize = 100;
const TOLERANCE: f64 = 1e-11;
const GRID_SEEDS: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct SeedGrid {
    nodes: Vec<(Complex64, Complex64)>,
}

impl SeedGrid {
    pub(crate) fn build(data: &HolomorphicData) -> Self {
        let margin = 1e-3 * data.domain().outer.radius;
        let nodes = data
            .grid_points(SEED_SIDE, margin)
            .into_iter()
            .filter_map(|z| data.values(z).ok().map(|v| (z, v.planar())))
            .collect();
        SeedGrid { nodes }
    }

    fn nearest(&self, target: Complex64, count: usize) -> Vec<Complex64> {
        let mut v: Vec<(f64, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, (_, w))| ((w - target).norm(), i))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        v.iter().take(count).map(|(_, i)| self.nodes[*i].0).collect()
    }
}

pub(crate) fn invert(sol: &AffineSphereSolution, target: Complex64, seed: Option<Complex64>) -> Result<Complex64> {
    let d = sol.domain();
    let grid = sol.seeds.nearest(target, GRID_SEEDS);
    let mut seeds: Vec<Complex64> = seed.into_iter().collect();
    seeds.push(grid[0]);
    if target.norm() > 0.0 {
        // near the puncture the map behaves like 1/(z - z0)
        let pole = d.puncture + target.inv();
        if d.contains(pole) {
            seeds.push(pole);
        }
    }
    seeds.extend(grid.iter().skip(1));

    let tol = TOLERANCE * target.norm().max(1.0);
    let mut best = f64::INFINITY;
    for &s in &seeds {
        match newton(sol, s, target, MAX_ITER) {
            Ok((z, res)) if res < tol => return Ok(z),
            Ok((_, res)) => best = best.min(res),
            Err(_) => {}
        }
    }
    // where |F'/G'| is close to 1 the basin of plain Newton is thin; follow
    // the straight line from a seed's image to the target instead
    for &s in seeds.iter().take(2) {
        if let Ok((z, res)) = continuation(sol, s, target) {
            if res < tol {
                return Ok(z);
            }
            best = best.min(res);
        }
    }
    Err(Error::NoConvergence(best))
}

fn continuation(sol: &AffineSphereSolution, seed: Complex64, target: Complex64) -> Result<(Complex64, f64)> {
    let from = sol.data.values(seed)?.planar();
    let loose = 1e-9 * target.norm().max(1.0);
    let mut z = seed;
    let mut done: f64 = 0.0;
    let mut step: f64 = 0.125;
    while done < 1.0 {
        let next = (done + step).min(1.0);
        let t = from + (target - from) * next;
        match newton(sol, z, t, 12) {
            Ok((zn, res)) if res < loose * (1.0 + t.norm()) => {
                z = zn;
                done = next;
                step = (2.0 * step).min(0.25);
            }
            _ => {
                step *= 0.5;
                if step < 1e-6 {
                    return Err(Error::NoConvergence(f64::INFINITY));
                }
            }
        }
    }
    newton(sol, z, target, MAX_ITER)
}

/// Returns the final point and residual.
fn newton(sol: &AffineSphereSolution, seed: Complex64, target: Complex64, max_iter: usize) -> Result<(Complex64, f64)> {
    let d = sol.domain();
    let data = &sol.data;
    let polish = 4.0 * f64::EPSILON * target.norm().max(1.0);
    let mut z = seed;
    let mut v = data.values(z)?;
    let mut e = v.planar() - target;
    for _ in 0..max_iter {
        if e.norm() <= polish {
            break;
        }
        let a = v.dg * 0.5;
        let b = v.df.conj() * 0.5;
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) {
            break;
        }
        let dz = (b * e.conj() - a.conj() * e) / det;
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let zn = z + dz * lambda;
            if d.contains(zn) && (zn - d.puncture).norm() > 1e-12 {
                if let Ok(vn) = data.values(zn) {
                    let en = vn.planar() - target;
                    if en.norm() < e.norm() {
                        z = zn;
                        v = vn;
                        e = en;
                        moved = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok((z, e.norm()))
}
