//! Real harmonic functions on circular domains: Green function, the fields
//! `u`, `v` obtained from it by differentiating in the source point, harmonic
//! measures and the period system that makes `u + sum lambda_j omega_j` the
//! real part of a single-valued function.
//!
//! General domains use a boundary least-squares fit over
//! `{1, log|z - c_k|, Re/Im (r_k/(z - c_k))^m, Re/Im ((z - c)/R)^m}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::domain::CircularDomain;
use crate::error::{Error, Result};
use crate::lstsq;
use crate::theta::{theta1, ThetaParams};

/// Degrees tried in turn by the harmonic fit.
const FIT_DEGREES: [usize; 4] = [32, 48, 64, 96];
/// Boundary residual that stops the degree escalation.
const FIT_TARGET: f64 = 1e-11;
/// Boundary residual above which the fit is reported as failed.
pub const FIT_FAILURE: f64 = 1e-8;
/// Finite-difference step for normal derivatives.
pub const NORMAL_STEP: f64 = 1e-5;
/// Quadrature nodes per circle for flux integrals.
pub const FLUX_NODES: usize = 512;
const CHECK_NODES: usize = 256;

/// Fitted real harmonic function.
#[derive(Debug, Clone)]
pub struct HarmonicSeries {
    domain: CircularDomain,
    degree: usize,
    constant: f64,
    log_weights: Vec<f64>,
    /// fixed `w log|z - a|` terms centred outside the domain
    poles: Vec<(Complex64, f64)>,
    /// per inner circle, scaled coefficients on `(r_k/(z-c_k))^m`, m = 1..=N
    inner: Vec<Vec<Complex64>>,
    /// scaled coefficients on `((z-c)/R)^m`, m = 1..=N
    outer: Vec<Complex64>,
    pub residual: f64,
}

impl HarmonicSeries {
    /// Fits boundary data `data(zeta, k)` (k is the boundary index),
    /// escalating the degree until the check residual is small.
    pub fn fit<F: Fn(Complex64, usize) -> f64>(domain: &CircularDomain, data: F) -> Result<Self> {
        Self::fit_with_poles(domain, &[], data)
    }

    /// Fits `data - sum w log|z - a|` over `(a, w)` in `poles` and adds the
    /// logarithms back on evaluation. Each `a` must lie off the closed domain.
    pub fn fit_with_poles<F: Fn(Complex64, usize) -> f64>(
        domain: &CircularDomain,
        poles: &[(Complex64, f64)],
        data: F,
    ) -> Result<Self> {
        let mut best: Option<HarmonicSeries> = None;
        for &degree in &FIT_DEGREES {
            let s = Self::fit_degree(domain, degree, poles, &data)?;
            let done = s.residual <= FIT_TARGET;
            if best.as_ref().map_or(true, |b| s.residual < b.residual) {
                best = Some(s);
            }
            if done {
                break;
            }
        }
        let best = best.expect("at least one degree is tried");
        if best.residual > FIT_FAILURE {
            return Err(Error::SolverFailure(best.residual));
        }
        Ok(best)
    }

    pub fn fit_degree<F: Fn(Complex64, usize) -> f64>(
        domain: &CircularDomain,
        degree: usize,
        poles: &[(Complex64, f64)],
        data: &F,
    ) -> Result<Self> {
        let n_in = domain.inner.len();
        let nodes = 8 * degree;
        let cols = 1 + n_in + 2 * degree * n_in + 2 * degree;
        let rows = nodes * domain.n();
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        let mut b = DVector::<f64>::zeros(rows);
        let mut row = 0;
        for k in 0..domain.n() {
            let circle = domain.boundary(k);
            for j in 0..nodes {
                let zeta = circle.point(2.0 * PI * j as f64 / nodes as f64);
                let basis = basis_row(domain, degree, zeta);
                for (col, v) in basis.into_iter().enumerate() {
                    a[(row, col)] = v;
                }
                b[row] = data(zeta, k) - log_sum(poles, zeta);
                row += 1;
            }
        }
        let x = lstsq::solve(a, &b).ok_or(Error::SolverFailure(f64::INFINITY))?;
        let mut s = HarmonicSeries::from_vector(domain, degree, &x);
        s.poles = poles.to_vec();
        let mut residual: f64 = 0.0;
        for k in 0..domain.n() {
            let circle = domain.boundary(k);
            for j in 0..CHECK_NODES {
                let zeta = circle.point(2.0 * PI * (j as f64 + 0.37) / CHECK_NODES as f64);
                residual = residual.max((s.eval(zeta) - data(zeta, k)).abs());
            }
        }
        s.residual = residual;
        Ok(s)
    }

    fn from_vector(domain: &CircularDomain, degree: usize, x: &DVector<f64>) -> Self {
        let n_in = domain.inner.len();
        let log_weights = (0..n_in).map(|k| x[1 + k]).collect();
        let mut idx = 1 + n_in;
        let mut take = || {
            let v = Complex64::new(x[idx], x[idx + 1]);
            idx += 2;
            v
        };
        let inner = (0..n_in).map(|_| (0..degree).map(|_| take()).collect()).collect();
        let outer = (0..degree).map(|_| take()).collect();
        HarmonicSeries {
            domain: domain.clone(),
            degree,
            constant: x[0],
            log_weights,
            poles: Vec::new(),
            inner,
            outer,
            residual: 0.0,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let mut v = self.constant;
        for (k, c) in self.domain.inner.iter().enumerate() {
            v += self.log_weights[k] * libm::log((z - c.center).norm());
            v += power_sum(c.radius / (z - c.center), &self.inner[k]).re;
        }
        v += log_sum(&self.poles, z);
        let t = (z - self.domain.outer.center) / self.domain.outer.radius;
        v + power_sum(t, &self.outer).re
    }
}

fn log_sum(poles: &[(Complex64, f64)], z: Complex64) -> f64 {
    poles.iter().map(|(a, w)| w * libm::log((z - a).norm())).sum()
}

/// `sum_{m>=1} coef[m-1] w^m`.
fn power_sum(w: Complex64, coef: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in coef.iter().rev() {
        acc = (acc + a) * w;
    }
    acc
}

/// Real basis values in the column order of [`HarmonicSeries`]: with a complex
/// coefficient `a = x + iy`, `Re(a w^m) = x Re w^m - y Im w^m`.
fn basis_row(domain: &CircularDomain, degree: usize, z: Complex64) -> Vec<f64> {
    let mut row = Vec::with_capacity(1 + domain.inner.len() * (1 + 2 * degree) + 2 * degree);
    row.push(1.0);
    for c in &domain.inner {
        row.push(libm::log((z - c.center).norm()));
    }
    let mut push_powers = |w: Complex64| {
        let mut wm = w;
        for _ in 0..degree {
            row.push(wm.re);
            row.push(-wm.im);
            wm *= w;
        }
    };
    for c in &domain.inner {
        push_powers(c.radius / (z - c.center));
    }
    push_powers((z - domain.outer.center) / domain.outer.radius);
    row
}

/// Green function with pole at a fixed source point.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    source: Complex64,
    repr: GreenRepr,
}

#[derive(Debug, Clone)]
enum GreenRepr {
    Disk { center: Complex64, radius: f64 },
    Annulus { center: Complex64, radius: f64, theta: ThetaParams },
    Series(HarmonicSeries),
}

impl GreenFunction {
    /// Closed form for disks and concentric annuli, least squares otherwise.
    pub fn new(domain: &CircularDomain, source: Complex64) -> Result<Self> {
        check_interior(domain, source)?;
        let repr = if domain.n() == 1 {
            GreenRepr::Disk {
                center: domain.outer.center,
                radius: domain.outer.radius,
            }
        } else if let Some(r) = domain.concentric_ratio() {
            GreenRepr::Annulus {
                center: domain.outer.center,
                radius: domain.outer.radius,
                theta: ThetaParams::new(r),
            }
        } else {
            return Self::numeric(domain, source);
        };
        Ok(GreenFunction { source, repr })
    }

    /// Least-squares route for any domain.
    pub fn numeric(domain: &CircularDomain, source: Complex64) -> Result<Self> {
        check_interior(domain, source)?;
        // the reflection in the nearest circle takes up the part of the data
        // that is sharply peaked when the source is close to that circle
        let nearest = domain
            .boundaries()
            .into_iter()
            .min_by(|a, b| a.signed_distance(source).abs().total_cmp(&b.signed_distance(source).abs()))
            .expect("a domain has an exterior circle");
        let images: Vec<(Complex64, f64)> = nearest.reflect(source).map(|a| (a, 1.0)).into_iter().collect();
        let series = HarmonicSeries::fit_with_poles(domain, &images, |zeta, _| libm::log((zeta - source).norm()))?;
        Ok(GreenFunction {
            source,
            repr: GreenRepr::Series(series),
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        let d = z - self.source;
        if d.norm() < 1e-12 {
            return Err(Error::CoincidentPoints);
        }
        match &self.repr {
            GreenRepr::Disk { center, radius } => {
                let w = (z - center) / radius;
                let w0 = (self.source - center) / radius;
                Ok(libm::log(((1.0 - w * w0.conj()) / (w - w0)).norm()))
            }
            GreenRepr::Annulus { center, radius, theta } => {
                let w = (z - center) / radius;
                let w0 = (self.source - center) / radius;
                let lr = libm::log(theta.r);
                let head = libm::log(w.norm()) * (1.0 + libm::log(w0.norm()) / lr);
                let num = theta1(w0 / w, theta)?;
                let den = theta1(w * w0.conj(), theta)?;
                Ok(head - libm::log((num / den).norm()))
            }
            GreenRepr::Series(s) => Ok(s.eval(z) - libm::log(d.norm())),
        }
    }
}

fn check_interior(domain: &CircularDomain, z: Complex64) -> Result<()> {
    if domain.boundary_clearance(z) > 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain(z))
    }
}

/// `G(z, z0)`, the Green function of the domain with pole at `z0`.
pub fn green(domain: &CircularDomain, z: Complex64, z0: Complex64) -> Result<f64> {
    GreenFunction::new(domain, z0)?.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Green,
    U,
    V,
    /// harmonic measure of inner circle `j` (1-based)
    HarmonicMeasure(usize),
}

/// An evaluable harmonic field on a domain.
#[derive(Debug, Clone)]
pub struct HarmonicFieldHandle {
    pub kind: FieldKind,
    pub domain: CircularDomain,
    pub source: Option<Complex64>,
    repr: FieldRepr,
}

#[derive(Debug, Clone)]
enum FieldRepr {
    Green(GreenFunction),
    /// `(1/R) Re/Im(1/(w - w0) -/+ w/(1 - w conj(w0)))` on a disk of radius R
    DiskDerivative { imaginary: bool },
    /// pole part `Re/Im 1/(z - z0)` plus a fitted regular part
    Dipole { imaginary: bool, regular: HarmonicSeries },
    Measure(HarmonicSeries),
}

impl HarmonicFieldHandle {
    pub fn eval(&self, z: Complex64) -> Result<f64> {
        match &self.repr {
            FieldRepr::Green(g) => g.eval(z),
            FieldRepr::DiskDerivative { imaginary } => {
                let z0 = self.source.expect("u and v fields carry their source");
                if (z - z0).norm() < 1e-12 {
                    return Err(Error::CoincidentPoints);
                }
                let c = self.domain.outer.center;
                let rad = self.domain.outer.radius;
                let w = (z - c) / rad;
                let w0 = (z0 - c) / rad;
                let pole = (w - w0).inv();
                let image = w / (1.0 - w * w0.conj());
                Ok(if *imaginary {
                    (pole + image).im / rad
                } else {
                    (pole - image).re / rad
                })
            }
            FieldRepr::Dipole { imaginary, regular } => {
                let z0 = self.source.expect("u and v fields carry their source");
                let d = z - z0;
                if d.norm() < 1e-12 {
                    return Err(Error::CoincidentPoints);
                }
                let pole = d.inv();
                Ok(regular.eval(z) + if *imaginary { pole.im } else { pole.re })
            }
            FieldRepr::Measure(s) => Ok(s.eval(z)),
        }
    }

    pub fn green(domain: &CircularDomain, z0: Complex64) -> Result<Self> {
        Ok(HarmonicFieldHandle {
            kind: FieldKind::Green,
            domain: domain.clone(),
            source: Some(z0),
            repr: FieldRepr::Green(GreenFunction::new(domain, z0)?),
        })
    }

    pub fn harmonic_measure(domain: &CircularDomain, j: usize) -> Result<Self> {
        let max = domain.n() - 1;
        if j == 0 || j > max {
            return Err(Error::IndexOutOfRange { index: j, max });
        }
        let series = HarmonicSeries::fit(domain, |_, k| if k + 1 == j { 1.0 } else { 0.0 })?;
        Ok(HarmonicFieldHandle {
            kind: FieldKind::HarmonicMeasure(j),
            domain: domain.clone(),
            source: None,
            repr: FieldRepr::Measure(series),
        })
    }

    /// Outward normal derivative (out of the domain) on boundary `k` at angle
    /// `t`, by central differences across the circle.
    fn normal_derivative(&self, k: usize, t: f64) -> Result<f64> {
        let circle = self.domain.boundary(k);
        let e = Complex64::from_polar(1.0, t);
        let n = if k + 1 == self.domain.n() { e } else { -e };
        let zeta = circle.center + circle.radius * e;
        let h = NORMAL_STEP;
        Ok((self.eval(zeta + n * h)? - self.eval(zeta - n * h)?) / (2.0 * h))
    }

    /// Flux `int_{C_k} df/dn ds`, normal pointing out of the domain.
    pub fn flux(&self, k: usize) -> Result<f64> {
        let radius = self.domain.boundary(k).radius;
        let mut acc = 0.0;
        for j in 0..FLUX_NODES {
            acc += self.normal_derivative(k, 2.0 * PI * j as f64 / FLUX_NODES as f64)?;
        }
        Ok(acc * radius * 2.0 * PI / FLUX_NODES as f64)
    }
}

/// The fields `u = dG/dz0 + dG/dconj(z0)` and `v = dG/dz0 - dG/dconj(z0)`
/// (the latter taken with the factor `i` that makes it real). They vanish on
/// the boundary and have pole parts `Re 1/(z - z0)` and `Im 1/(z - z0)`.
///
/// The Dirichlet data of the Green function are differentiated in `z0`
/// analytically, so the regular parts come from one fit each.
pub fn uv_fields(domain: &CircularDomain, z0: Complex64) -> Result<(HarmonicFieldHandle, HarmonicFieldHandle)> {
    check_interior(domain, z0)?;
    let make = |imaginary: bool, repr: FieldRepr| HarmonicFieldHandle {
        kind: if imaginary { FieldKind::V } else { FieldKind::U },
        domain: domain.clone(),
        source: Some(z0),
        repr,
    };
    if domain.n() == 1 {
        return Ok((
            make(false, FieldRepr::DiskDerivative { imaginary: false }),
            make(true, FieldRepr::DiskDerivative { imaginary: true }),
        ));
    }
    let ru = HarmonicSeries::fit(domain, |zeta, _| -(zeta - z0).inv().re)?;
    let rv = HarmonicSeries::fit(domain, |zeta, _| -(zeta - z0).inv().im)?;
    Ok((
        make(false, FieldRepr::Dipole { imaginary: false, regular: ru }),
        make(true, FieldRepr::Dipole { imaginary: true, regular: rv }),
    ))
}

/// Harmonic measure of inner circle `j` (1-based) evaluated at `z`.
pub fn harmonic_measure(domain: &CircularDomain, j: usize, z: Complex64) -> Result<f64> {
    HarmonicFieldHandle::harmonic_measure(domain, j)?.eval(z)
}

/// `alpha[(j, k)]` is the flux of `omega_j` through `C_k`, `a[k]` the flux of
/// `u`, and `lambda` solves `sum_j lambda_j alpha[(j, k)] = -a[k]`.
#[derive(Debug, Clone)]
pub struct PeriodSystem {
    pub alpha: DMatrix<f64>,
    pub a: DVector<f64>,
    pub lambda: DVector<f64>,
}

pub fn period_system(domain: &CircularDomain, z0: Complex64) -> Result<PeriodSystem> {
    let m = domain.n() - 1;
    if m == 0 {
        return Ok(PeriodSystem {
            alpha: DMatrix::zeros(0, 0),
            a: DVector::zeros(0),
            lambda: DVector::zeros(0),
        });
    }
    let (u, _) = uv_fields(domain, z0)?;
    let mut alpha = DMatrix::zeros(m, m);
    for j in 0..m {
        let w = HarmonicFieldHandle::harmonic_measure(domain, j + 1)?;
        for k in 0..m {
            alpha[(j, k)] = w.flux(k)?;
        }
    }
    let a = DVector::from_iterator(m, (0..m).map(|k| u.flux(k)).collect::<Result<Vec<_>>>()?);
    let scale = alpha.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let det = alpha.determinant();
    if !(det.abs() > 1e-12 * libm::pow(scale, m as f64)) {
        return Err(Error::SingularMatrix);
    }
    let lambda = alpha
        .transpose()
        .lu()
        .solve(&(-&a))
        .ok_or(Error::SingularMatrix)?;
    Ok(PeriodSystem { alpha, a, lambda })
}
