//! Parabolic affine spheres from the slit maps.
//!
//! With `G = p + q` and `F = p - q` the immersion is
//!
//! `x + iy = (G + conj F) / 2`,
//! `phi = ((|G|^2 - |F|^2 + 2 Re(G F)) / 4 - Re int F dG) / 2`,
//!
//! and `phi` solves `phi_xx phi_yy - phi_xy^2 = 1` on the plane minus the
//! images of the boundary circles.

mod invert;
mod route;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spin::RwLock;

use crate::domain::{Circle, CircularDomain};
use crate::error::{Error, Result};
use crate::quad::AdaptiveLine;
use crate::slitmap::{self, SlitPair};
use crate::theta::ThetaParams;

use invert::SeedGrid;
use route::Router;

/// Side of the interior sample grid used by [`make_data`].
pub const CHECK_GRID: usize = 32;
/// Radial offset of the nodes used to locate the boundary images.
pub const SINGULARITY_OFFSET: f64 = 1e-7;
pub const SINGULARITY_NODES: usize = 64;
/// Largest accepted spread of a boundary image.
pub const SINGULARITY_SPREAD: f64 = 1e-5;
/// Targets closer than this to the puncture are refused.
pub const PUNCTURE_GUARD: f64 = 1e-9;

/// `G`, `F` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataValues {
    pub g: Complex64,
    pub f: Complex64,
    pub dg: Complex64,
    pub df: Complex64,
}

impl DataValues {
    /// `(G + conj F) / 2`.
    pub fn planar(&self) -> Complex64 {
        (self.g + self.f.conj()) * 0.5
    }

    /// `|F'/G'|`.
    pub fn ratio(&self) -> f64 {
        self.df.norm() / self.dg.norm()
    }

    /// `(|G'|^2 - |F'|^2) / 4`, the conformal factor of the affine metric.
    pub fn metric(&self) -> f64 {
        0.25 * (self.dg.norm_sqr() - self.df.norm_sqr())
    }
}

/// `G = p + q`, `F = s (p - q)` with `s = 1` except for deliberately
/// perturbed data.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicData {
    pub slit: SlitPair,
    pub f_scale: f64,
    theta: Option<ThetaParams>,
}

/// Wires `G` and `F` to the slit maps and spot-checks `|F'/G'| < 1` and
/// `G' != 0` on a 32 x 32 grid.
pub fn make_data(slit: SlitPair) -> Result<HolomorphicData> {
    let data = HolomorphicData::unchecked(slit, 1.0)?;
    data.check_grid()?;
    Ok(data)
}

impl HolomorphicData {
    /// Builds the data without the contraction check.
    pub fn unchecked(slit: SlitPair, f_scale: f64) -> Result<Self> {
        slit.validate()?;
        let theta = slit.annulus_params.map(|p| p.theta());
        Ok(HolomorphicData { slit, f_scale, theta })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.slit.domain
    }

    pub fn values(&self, z: Complex64) -> Result<DataValues> {
        let v = slitmap::eval_with(&self.slit, self.theta.as_ref(), z)?;
        Ok(DataValues {
            g: v.p + v.q,
            f: (v.p - v.q) * self.f_scale,
            dg: v.dp + v.dq,
            df: (v.dp - v.dq) * self.f_scale,
        })
    }

    /// `F G'`, the integrand of `int F dG`.
    pub fn f_dg(&self, z: Complex64) -> Result<Complex64> {
        let v = self.values(z)?;
        Ok(v.f * v.dg)
    }

    /// Interior points of a `side x side` grid over the bounding square of the
    /// exterior circle.
    pub fn grid_points(&self, side: usize, margin: f64) -> Vec<Complex64> {
        let d = self.domain();
        let (c, rad) = (d.outer.center, d.outer.radius);
        let mut out = Vec::new();
        for i in 0..side {
            for j in 0..side {
                let u = -1.0 + (2 * i + 1) as f64 / side as f64;
                let v = -1.0 + (2 * j + 1) as f64 / side as f64;
                let z = c + Complex64::new(u, v) * rad;
                if d.boundary_clearance(z) > margin && (z - d.puncture).norm() > margin {
                    out.push(z);
                }
            }
        }
        out
    }

    fn check_grid(&self) -> Result<()> {
        for z in self.grid_points(CHECK_GRID, 0.0) {
            let v = self.values(z)?;
            let ratio = v.ratio();
            if !(v.dg.norm() > 0.0) || !(ratio < 1.0) {
                return Err(Error::ContractionViolated { ratio, at: z });
            }
        }
        Ok(())
    }
}

/// One evaluated point of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub z: Complex64,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub phi_x: f64,
    pub phi_y: f64,
    /// `(phi_xx, phi_xy, phi_yy)`
    pub hessian: [f64; 3],
    /// `det D^2 phi - 1`, from the Jacobians of `(x, y)` and `grad phi` in
    /// the conformal parameter
    pub ma_residual: f64,
    /// difference of the two off-diagonal entries before symmetrization
    pub asymmetry: f64,
}

impl SurfaceSample {
    pub fn det(&self) -> f64 {
        let [xx, xy, yy] = self.hessian;
        xx * yy - xy * xy
    }
}

/// `(x, y, phi) -> (a (x, y) + (b1, b2), phi + shear . (x, y) + b3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquiaffineTransform {
    pub a: [[f64; 2]; 2],
    pub shear: [f64; 2],
    pub b: [f64; 3],
}

impl EquiaffineTransform {
    pub fn identity() -> Self {
        EquiaffineTransform {
            a: [[1.0, 0.0], [0.0, 1.0]],
            shear: [0.0, 0.0],
            b: [0.0; 3],
        }
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = libm::sincos(angle);
        EquiaffineTransform {
            a: [[c, -s], [s, c]],
            ..Self::identity()
        }
    }

    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[1][0] * self.a[0][1]
    }

    pub fn validate(&self) -> Result<()> {
        let det = self.det();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(())
    }
}

/// Moves samples by an equiaffine map. The gradient becomes
/// `a^{-T} (grad + shear)` and the Hessian `a^{-T} H a^{-1}`.
pub fn apply_equiaffine(samples: &[SurfaceSample], t: &EquiaffineTransform) -> Result<Vec<SurfaceSample>> {
    t.validate()?;
    let [[a11, a12], [a21, a22]] = t.a;
    let det = t.det();
    // a^{-1}
    let (i11, i12, i21, i22) = (a22 / det, -a12 / det, -a21 / det, a11 / det);
    Ok(samples
        .iter()
        .map(|s| {
            let x = a11 * s.x + a12 * s.y + t.b[0];
            let y = a21 * s.x + a22 * s.y + t.b[1];
            let phi = s.phi + t.shear[0] * s.x + t.shear[1] * s.y + t.b[2];
            let gx = s.phi_x + t.shear[0];
            let gy = s.phi_y + t.shear[1];
            let phi_x = i11 * gx + i21 * gy;
            let phi_y = i12 * gx + i22 * gy;
            let [hxx, hxy, hyy] = s.hessian;
            // H a^{-1}
            let m11 = hxx * i11 + hxy * i21;
            let m12 = hxx * i12 + hxy * i22;
            let m21 = hxy * i11 + hyy * i21;
            let m22 = hxy * i12 + hyy * i22;
            let h11 = i11 * m11 + i21 * m21;
            let h12 = i11 * m12 + i21 * m22;
            let h21 = i12 * m11 + i22 * m21;
            let h22 = i12 * m12 + i22 * m22;
            let hessian = [h11, 0.5 * (h12 + h21), h22];
            let mut out = SurfaceSample {
                x,
                y,
                phi,
                phi_x,
                phi_y,
                hessian,
                ..*s
            };
            out.ma_residual = (1.0 + s.ma_residual) / (det * det) - 1.0;
            out
        })
        .collect())
}

/// A constructed global solution. Immutable apart from the memo of path
/// integrals.
pub struct AffineSphereSolution {
    pub data: HolomorphicData,
    pub base_point: Complex64,
    estimates: Vec<Complex64>,
    spreads: Vec<f64>,
    router: Router,
    seeds: SeedGrid,
    cache: RwLock<BTreeMap<(u64, u64), Complex64>>,
}

impl core::fmt::Debug for AffineSphereSolution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("AffineSphereSolution")
            .field("kind", &self.data.slit.kind)
            .field("base_point", &self.base_point)
            .field("singularities", &self.estimates)
            .finish_non_exhaustive()
    }
}

impl Clone for AffineSphereSolution {
    fn clone(&self) -> Self {
        AffineSphereSolution {
            data: self.data.clone(),
            base_point: self.base_point,
            estimates: self.estimates.clone(),
            spreads: self.spreads.clone(),
            router: self.router.clone(),
            seeds: self.seeds.clone(),
            cache: RwLock::new(self.cache.read().clone()),
        }
    }
}

impl AffineSphereSolution {
    /// Integration based at the reference node of the exterior circle.
    pub fn new(data: HolomorphicData) -> Result<Self> {
        let base = data.domain().reference_node();
        Self::with_base_point(data, base)
    }

    pub fn with_base_point(data: HolomorphicData, base_point: Complex64) -> Result<Self> {
        let domain = data.domain();
        if domain.boundary_clearance(base_point) < 0.0 || (base_point - domain.puncture).norm() < 1e-3 {
            return Err(Error::OutsideDomain(base_point));
        }
        let (estimates, spreads) = boundary_images(&data)?;
        let router = Router::build(&data, base_point)?;
        let seeds = SeedGrid::build(&data);
        Ok(AffineSphereSolution {
            data,
            base_point,
            estimates,
            spreads,
            router,
            seeds,
            cache: RwLock::new(BTreeMap::new()),
        })
    }

    pub fn domain(&self) -> &CircularDomain {
        self.data.domain()
    }

    /// Circles in the order used for the boundary images: exterior first,
    /// then the inner circles.
    pub fn image_circles(&self) -> Vec<Circle> {
        image_order(self.domain())
    }

    /// Images of the boundary circles, exterior first. Fails if any image is
    /// not a point to within `1e-5`.
    pub fn singularities(&self) -> Result<Vec<Complex64>> {
        if let Some((circle, &spread)) = self
            .spreads
            .iter()
            .enumerate()
            .find(|(_, s)| !(**s <= SINGULARITY_SPREAD))
        {
            return Err(Error::NotConstantOnBoundary { circle, spread });
        }
        Ok(self.estimates.clone())
    }

    /// Mean boundary images without the spread check.
    pub fn singularity_estimates(&self) -> &[Complex64] {
        &self.estimates
    }

    pub fn singularity_spreads(&self) -> &[f64] {
        &self.spreads
    }

    /// `int F dG` from the base point to `target` along a routed polygonal
    /// path. Values are memoized per target.
    pub fn integrate_f_dg(&self, target: Complex64) -> Result<Complex64> {
        let key = (target.re.to_bits(), target.im.to_bits());
        if let Some(v) = self.cache.read().get(&key) {
            return Ok(*v);
        }
        let v = self.router.integral(&self.data, target)?;
        self.cache.write().entry(key).or_insert(v);
        Ok(v)
    }

    /// `int F dG` along the polyline through `path`.
    pub fn integrate_along(&self, path: &[Complex64]) -> Result<Complex64> {
        path.windows(2)
            .map(|w| segment_integral(&self.data, w[0], w[1]))
            .sum()
    }

    pub fn cached_targets(&self) -> usize {
        self.cache.read().len()
    }

    /// `x + iy`.
    pub fn planar(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.data.values(z)?.planar())
    }

    /// `(x, y, phi)`.
    pub fn immerse(&self, z: Complex64) -> Result<(f64, f64, f64)> {
        let v = self.data.values(z)?;
        let xy = v.planar();
        let phi = phi_from(&v, self.integrate_f_dg(z)?);
        Ok((xy.re, xy.im, phi))
    }

    /// `phi(z) - phi(from)`, integrating only along the segment between the
    /// two points. Both values share the same routed part, so the difference
    /// is free of routing error.
    pub fn phi_difference(&self, from: Complex64, z: Complex64) -> Result<f64> {
        let a = self.data.values(from)?;
        let b = self.data.values(z)?;
        let di = segment_integral(&self.data, from, z)?;
        let quad = |v: &DataValues| v.g.norm_sqr() - v.f.norm_sqr() + 2.0 * (v.g * v.f).re;
        Ok(0.5 * (0.25 * (quad(&b) - quad(&a)) - di.re))
    }

    /// Solves `(G + conj F)(z) / 2 = target` by damped Newton iteration.
    pub fn invert_graph(&self, target: (f64, f64)) -> Result<Complex64> {
        let t = Complex64::new(target.0, target.1);
        if self.estimates.iter().any(|p| (p - t).norm() < 1e-9) {
            return Err(Error::SingularityTarget);
        }
        invert::invert(self, t, None)
    }

    /// As [`Self::invert_graph`], starting from `seed` before trying the grid.
    pub fn invert_graph_from(&self, seed: Complex64, target: (f64, f64)) -> Result<Complex64> {
        let t = Complex64::new(target.0, target.1);
        if self.estimates.iter().any(|p| (p - t).norm() < 1e-9) {
            return Err(Error::SingularityTarget);
        }
        invert::invert(self, t, Some(seed))
    }

    /// Gradient and Hessian by the chain rule through the conformal
    /// parameter.
    pub fn phi_derivatives(&self, z: Complex64) -> Result<SurfaceSample> {
        let v = self.data.values(z)?;
        let mut s = local_derivatives(z, &v)?;
        s.phi = phi_from(&v, self.integrate_f_dg(z)?);
        Ok(s)
    }

    /// Derivatives without `phi` (left at 0), which skips the path integral.
    pub fn local_derivatives(&self, z: Complex64) -> Result<SurfaceSample> {
        local_derivatives(z, &self.data.values(z)?)
    }
}

fn phi_from(v: &DataValues, integral: Complex64) -> f64 {
    0.5 * (0.25 * (v.g.norm_sqr() - v.f.norm_sqr() + 2.0 * (v.g * v.f).re) - integral.re)
}

fn local_derivatives(z: Complex64, v: &DataValues) -> Result<SurfaceSample> {
    let jac = v.metric();
    if !(jac >= 1e-14) {
        return Err(Error::DegenerateJacobian(jac));
    }
    let xy = v.planar();
    let i4 = Complex64::new(0.0, 4.0);
    let x_z = (v.dg + v.df) / 4.0;
    let y_z = (v.dg - v.df) / i4;
    let px_z = (v.dg - v.df) / 4.0;
    let py_z = (v.dg + v.df) / i4;
    // real Jacobian rows (d/ds, d/dt) of a real function with Wirtinger
    // derivative w: (2 Re w, -2 Im w)
    let row = |w: Complex64| (2.0 * w.re, -2.0 * w.im);
    let (xs, xt) = row(x_z);
    let (ys, yt) = row(y_z);
    let (us, ut) = row(px_z);
    let (vs, vt) = row(py_z);
    let det = xs * yt - xt * ys;
    // inverse of [[xs, xt], [ys, yt]]
    let (j11, j12, j21, j22) = (yt / det, -xt / det, -ys / det, xs / det);
    let hxx = us * j11 + ut * j21;
    let hxy = us * j12 + ut * j22;
    let hyx = vs * j11 + vt * j21;
    let hyy = vs * j12 + vt * j22;
    let grad_det = us * vt - ut * vs;
    let mut s = SurfaceSample {
        z,
        x: xy.re,
        y: xy.im,
        phi: 0.0,
        phi_x: 0.5 * (v.g - v.f).re,
        phi_y: 0.5 * (v.g + v.f).im,
        hessian: [hxx, 0.5 * (hxy + hyx), hyy],
        ma_residual: 0.0,
        asymmetry: hxy - hyx,
    };
    // det D^2 phi as a ratio of Jacobian determinants; the product of the
    // Hessian entries loses digits where both eigenvalues are far from 1
    s.ma_residual = grad_det / det - 1.0;
    Ok(s)
}

/// Adaptive Gauss-Legendre value of `int_a^b F dG`.
pub(crate) fn segment_integral(data: &HolomorphicData, a: Complex64, b: Complex64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut err = None;
    let v = AdaptiveLine::default().integrate(a, b, |z| match data.f_dg(z) {
        Ok(w) => w,
        Err(e) => {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn image_order(d: &CircularDomain) -> Vec<Circle> {
    let mut v = Vec::with_capacity(d.n());
    v.push(d.outer);
    v.extend(d.inner.iter().copied());
    v
}

/// Mean and spread of `(G + conj F)/2` just inside each boundary circle.
fn boundary_images(data: &HolomorphicData) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let d = data.domain();
    let mut means = Vec::new();
    let mut spreads = Vec::new();
    for (i, c) in image_order(d).iter().enumerate() {
        let inward = if i == 0 { -SINGULARITY_OFFSET } else { SINGULARITY_OFFSET };
        let ring = Circle::new(c.center, c.radius + inward);
        let pts = (0..SINGULARITY_NODES)
            .map(|j| data.values(ring.point(2.0 * PI * j as f64 / SINGULARITY_NODES as f64)).map(|v| v.planar()))
            .collect::<Result<Vec<_>>>()?;
        let mean = pts.iter().sum::<Complex64>() / pts.len() as f64;
        let spread = pts.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max);
        means.push(mean);
        spreads.push(spread);
    }
    Ok((means, spreads))
}
