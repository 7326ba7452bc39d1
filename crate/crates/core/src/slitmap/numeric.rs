//! Least-squares construction of the slit maps on an arbitrary circular
//! domain.
//!
//! `p = 1/(z - z0) + h(z)` with `h` a finite sum of negative powers about
//! each inner center and non-negative powers about the exterior center. The
//! unknown coefficients and the boundary constants are fitted so that `Re p`
//! (for `q`: `Im q`) equals a constant on each inner circle and zero on the
//! exterior one.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{PoleSeries, SlitKind, SlitPair};
use crate::domain::CircularDomain;
use crate::error::{Error, Result};
use crate::lstsq;

/// Residual at which degree escalation stops.
pub const TARGET_RESIDUAL: f64 = 1e-8;
/// Residual above which the solve is rejected.
pub const FAIL_RESIDUAL: f64 = 1e-6;
pub const MAX_DEGREE: usize = 64;
const DEGREE_STEP: usize = 8;
const CHECK_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    /// `Re` is constant on each circle (the map `p`)
    Real,
    /// `Im` is constant on each circle (the map `q`)
    Imag,
}

impl Part {
    fn of(self, w: Complex64) -> f64 {
        match self {
            Part::Real => w.re,
            Part::Imag => w.im,
        }
    }
}

struct Fit {
    series: PoleSeries,
    constants: Vec<f64>,
    residual: f64,
}

/// Solves for `p` and `q` starting at `degree`, raising it in steps of 8 up to
/// 64 until the boundary residual drops below `1e-8`. `collocation` is the
/// number of nodes per circle; it is raised to `8 * degree` when smaller.
pub fn solve_pq_numeric(domain: &CircularDomain, degree: usize, collocation: usize) -> Result<SlitPair> {
    domain.validate()?;
    let degree = degree.max(4);
    let mut n = degree;
    let mut best: Option<(Fit, Fit, usize)> = None;
    loop {
        let nodes = collocation.max(8 * n);
        let p = fit(domain, n, nodes, Part::Real)?;
        let q = fit(domain, n, nodes, Part::Imag)?;
        let residual = p.residual.max(q.residual);
        let better = best.as_ref().map_or(true, |(bp, bq, _)| residual < bp.residual.max(bq.residual));
        if better {
            best = Some((p, q, n));
        }
        if residual <= TARGET_RESIDUAL || n >= MAX_DEGREE {
            break;
        }
        n = (n + DEGREE_STEP).min(MAX_DEGREE);
    }
    let (p, q, n) = best.expect("at least one degree is tried");
    let residual = p.residual.max(q.residual);
    if residual > FAIL_RESIDUAL {
        return Err(Error::IllConditioned { residual, degree: n });
    }
    Ok(SlitPair {
        domain: domain.clone(),
        kind: SlitKind::Numeric,
        annulus_params: None,
        p_series: Some(p.series),
        q_series: Some(q.series),
        lambda: p.constants,
        mu: q.constants,
        degree: n,
        residual,
    })
}

fn fit(domain: &CircularDomain, degree: usize, nodes: usize, part: Part) -> Result<Fit> {
    let n_in = domain.inner.len();
    let z0 = domain.puncture;
    // inner coefficients (2 reals each), outer m = 1..=N (2 reals each),
    // the relevant half of the outer constant, one constant per inner circle
    let cols = 2 * degree * n_in + 2 * degree + 1 + n_in;
    let lambda_col = cols - n_in;
    let rows = nodes * domain.n();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    // For a = x + iy: Re(a w) = x Re w - y Im w, Im(a w) = x Im w + y Re w.
    let pair = |w: Complex64| match part {
        Part::Real => (w.re, -w.im),
        Part::Imag => (w.im, w.re),
    };
    let mut row = 0;
    for k in 0..domain.n() {
        let circle = domain.boundary(k);
        for j in 0..nodes {
            let zeta = circle.point(2.0 * PI * j as f64 / nodes as f64);
            let mut col = 0;
            for c in &domain.inner {
                let s = c.radius / (zeta - c.center);
                let mut sm = s;
                for _ in 0..degree {
                    let (x, y) = pair(sm);
                    a[(row, col)] = x;
                    a[(row, col + 1)] = y;
                    col += 2;
                    sm *= s;
                }
            }
            let t = (zeta - domain.outer.center) / domain.outer.radius;
            let mut tm = t;
            for _ in 0..degree {
                let (x, y) = pair(tm);
                a[(row, col)] = x;
                a[(row, col + 1)] = y;
                col += 2;
                tm *= t;
            }
            a[(row, col)] = 1.0;
            if k < n_in {
                a[(row, lambda_col + k)] = -1.0;
            }
            b[row] = -part.of((zeta - z0).inv());
            row += 1;
        }
    }
    let x = lstsq::solve(a, &b).ok_or(Error::IllConditioned {
        residual: f64::INFINITY,
        degree,
    })?;

    let mut idx = 0;
    let mut next = || {
        let v = Complex64::new(x[idx], x[idx + 1]);
        idx += 2;
        v
    };
    let inner: Vec<Vec<Complex64>> = domain
        .inner
        .iter()
        .map(|c| {
            let mut scale = 1.0;
            (0..degree)
                .map(|_| {
                    scale *= c.radius;
                    next() * scale
                })
                .collect()
        })
        .collect();
    let rad = domain.outer.radius;
    let mut outer = alloc::vec![Complex64::new(0.0, 0.0); degree + 1];
    let mut scale = 1.0;
    for coef in outer.iter_mut().skip(1) {
        scale /= rad;
        *coef = next() * scale;
    }
    let c0 = x[idx];
    outer[0] = match part {
        Part::Real => Complex64::new(c0, 0.0),
        Part::Imag => Complex64::new(0.0, c0),
    };
    let mut series = PoleSeries {
        residue: 1.0,
        inner,
        outer,
    };
    // gauge: the free constant (imaginary for p, real for q) vanishes at the
    // reference node
    let zc = domain.reference_node();
    let (vc, _) = series.eval(domain, z0, zc);
    match part {
        Part::Real => series.outer[0].im = -vc.im,
        Part::Imag => series.outer[0].re = -vc.re,
    }

    let mut constants: Vec<f64> = (0..n_in).map(|k| x[lambda_col + k]).collect();
    constants.push(0.0);
    let mut residual: f64 = 0.0;
    for k in 0..domain.n() {
        let circle = domain.boundary(k);
        for j in 0..CHECK_NODES {
            let zeta = circle.point(2.0 * PI * (j as f64 + 0.37) / CHECK_NODES as f64);
            let (v, _) = series.eval(domain, z0, zeta);
            residual = residual.max((part.of(v) - constants[k]).abs());
        }
    }
    Ok(Fit {
        series,
        constants,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{moduli_to_domain, ModuliPoint};
    use crate::quad::circle_integral;
    use crate::slitmap::closed::{annulus_pq, disk_pq, AnnulusParams};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn probes(d: &CircularDomain, count: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < count {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if d.boundary_clearance(z) > 1e-2 && (z - d.puncture).norm() > 1e-2 {
                out.push(z);
            }
        }
        out
    }

    #[test]
    fn unit_disk_recovers_closed_form() {
        let d = CircularDomain::unit_disk(c(0.0, 0.0)).unwrap();
        let pair = solve_pq_numeric(&d, 8, 64).unwrap();
        // closed forms in the numeric gauge: p(1) = 0 already, q shifted by q(1) = 2
        for z in probes(&d, 50, 1) {
            let (p, q) = disk_pq(z).unwrap();
            let v = pair.values(z).unwrap();
            assert_abs_diff_eq!((v.p - p).norm(), 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!((v.q - (q - 2.0)).norm(), 0.0, epsilon = 1e-10);
        }
        assert_eq!(pair.lambda, alloc::vec![0.0]);
    }

    #[test]
    fn annulus_recovers_theta_form() {
        let prm = AnnulusParams::new(0.5, c(0.7, 0.0)).unwrap();
        let d = CircularDomain::annulus(0.5, prm.z0).unwrap();
        let pair = solve_pq_numeric(&d, 24, 0).unwrap();
        assert!(pair.residual <= TARGET_RESIDUAL);
        let (p1, q1) = annulus_pq(&prm, c(1.0, 0.0)).unwrap();
        for z in probes(&d, 50, 2) {
            let (p, q) = annulus_pq(&prm, z).unwrap();
            let v = pair.values(z).unwrap();
            let dp = v.p - (p - Complex64::new(0.0, p1.im));
            let dq = v.q - (q - q1.re);
            assert!(dp.norm() <= 1e-6 && dq.norm() <= 1e-6, "{z}: {dp} {dq}");
        }
        assert_abs_diff_eq!(pair.lambda[0], -1.0 / 0.7, epsilon = 1e-8);
    }

    #[test]
    fn three_circle_invariants() {
        let m = ModuliPoint::new(3.0, alloc::vec![c(-3.0, 0.0)], alloc::vec![0.6, 0.6]).unwrap();
        let d = moduli_to_domain(&m).unwrap();
        let pair = solve_pq_numeric(&d, 24, 0).unwrap();
        for k in 0..d.n() {
            let circle = d.boundary(k);
            let (re, im): (Vec<f64>, Vec<f64>) = (0..256)
                .map(|j| {
                    let v = pair.values(circle.point(2.0 * PI * j as f64 / 256.0)).unwrap();
                    (v.p.re, v.q.im)
                })
                .unzip();
            assert!(stddev(&re) <= 1e-7 && stddev(&im) <= 1e-7);
            // single-valuedness: derivative integrates to zero around each circle
            let ring = crate::domain::Circle::new(circle.center, circle.radius * (1.0 + 1e-3));
            let ring = if k + 1 == d.n() {
                crate::domain::Circle::new(circle.center, circle.radius * (1.0 - 1e-3))
            } else {
                ring
            };
            let loop_p = circle_integral(&ring, 512, |z| pair.values(z).unwrap().dp);
            assert!(loop_p.norm() <= 1e-8);
        }
        // the poles of p and q cancel
        for j in 0..16 {
            let z = d.puncture + Complex64::from_polar(1e-3, 0.4 * j as f64);
            let v = pair.values(z).unwrap();
            assert!((v.p - v.q).norm() < 100.0);
        }
    }

    fn stddev(v: &[f64]) -> f64 {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        libm::sqrt(v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64)
    }
}
