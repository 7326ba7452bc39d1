//! Once-punctured circular domains and the moduli coordinates that label them.
//!
//! The bounded normal form has the unit circle as exterior boundary and the
//! puncture at the origin. It is obtained from the unbounded configuration
//! (the plane minus `n` closed disks, puncture at infinity) by `w -> 1/w`.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum gap between disks, and between a disk and the puncture.
pub const DISJOINT_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn unit() -> Self {
        Circle::new(Complex64::new(0.0, 0.0), 1.0)
    }

    /// Point on the circle at angle `theta`.
    pub fn point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }

    /// Signed distance from `z` to the circle, positive outside the disk.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }

    /// Reflection of `z` in the circle; `None` at the center.
    pub fn reflect(&self, z: Complex64) -> Option<Complex64> {
        let d = z - self.center;
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.center + self.radius * self.radius / d.conj())
    }

    /// Image under `w -> 1/w`.
    pub fn invert(&self) -> Result<Circle> {
        invert_circle(self)
    }
}

/// Image of a circle under `w -> 1/w`.
///
/// The center goes to `conj(c) / (|c|^2 - r^2)` and the radius to
/// `r / ||c|^2 - r^2|`. Circles through the origin map to lines and are
/// rejected.
pub fn invert_circle(c: &Circle) -> Result<Circle> {
    let pow = c.center.norm_sqr() - c.radius * c.radius;
    if pow.abs() <= f64::EPSILON * c.radius * c.radius.max(c.center.norm()) {
        return Err(Error::PuncturedCircle);
    }
    Ok(Circle {
        center: c.center.conj() / pow,
        radius: c.radius / pow.abs(),
    })
}

/// Coordinates in `R^{3n-4}` of the plane minus `n` disks: the first disk is
/// the unit disk, the second is centered at `c1 > 1` on the real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub n: usize,
    pub c1: f64,
    pub extra_centers: Vec<Complex64>,
    pub radii: Vec<f64>,
}

impl ModuliPoint {
    pub fn new(c1: f64, extra_centers: Vec<Complex64>, radii: Vec<f64>) -> Result<Self> {
        let m = ModuliPoint {
            n: radii.len() + 1,
            c1,
            extra_centers,
            radii,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dimension(&self) -> usize {
        1 + 2 * self.extra_centers.len() + self.radii.len()
    }

    /// The disks `D_1, ..., D_n` of the unbounded normal form.
    pub fn disks(&self) -> Vec<Circle> {
        let mut disks = Vec::with_capacity(self.n);
        disks.push(Circle::unit());
        if let Some(&r) = self.radii.first() {
            disks.push(Circle::new(Complex64::new(self.c1, 0.0), r));
        }
        for (c, &r) in self.extra_centers.iter().zip(self.radii.iter().skip(1)) {
            disks.push(Circle::new(*c, r));
        }
        disks
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidModuli("at least two punctures are required"));
        }
        if self.radii.len() != self.n - 1 {
            return Err(Error::InvalidModuli("expected n-1 radii"));
        }
        if self.extra_centers.len() != self.n - 2 {
            return Err(Error::InvalidModuli("expected n-2 extra centers"));
        }
        if self.dimension() != 3 * self.n - 4 {
            return Err(Error::InvalidModuli("coordinate count differs from 3n-4"));
        }
        if !self.c1.is_finite()
            || self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0))
            || self.extra_centers.iter().any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidModuli("radii must be positive and coordinates finite"));
        }
        if self.c1 - self.radii[0] <= 1.0 + DISJOINT_MARGIN {
            return Err(Error::InvalidModuli("second disk meets the unit disk"));
        }
        let disks = self.disks();
        for i in 0..disks.len() {
            for j in i + 1..disks.len() {
                let gap = (disks[i].center - disks[j].center).norm() - disks[i].radius - disks[j].radius;
                if gap <= DISJOINT_MARGIN {
                    return Err(Error::InvalidModuli("disks overlap"));
                }
            }
        }
        Ok(())
    }
}

/// A bounded domain with `n` circular boundary components and an interior
/// puncture `z0`. Boundary index `k < n - 1` refers to `inner[k]`, index
/// `n - 1` to the exterior circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularDomain {
    pub outer: Circle,
    pub inner: Vec<Circle>,
    pub puncture: Complex64,
}

impl CircularDomain {
    pub fn new(outer: Circle, inner: Vec<Circle>, puncture: Complex64) -> Result<Self> {
        let d = CircularDomain {
            outer,
            inner,
            puncture,
        };
        d.validate()?;
        Ok(d)
    }

    /// Unit disk punctured at `z0`.
    pub fn unit_disk(z0: Complex64) -> Result<Self> {
        CircularDomain::new(Circle::unit(), Vec::new(), z0)
    }

    /// Concentric annulus `r < |z| < 1` punctured at `z0`.
    pub fn annulus(r: f64, z0: Complex64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidDomain("annulus radius must lie in (0, 1)"));
        }
        CircularDomain::new(
            Circle::unit(),
            alloc::vec![Circle::new(Complex64::new(0.0, 0.0), r)],
            z0,
        )
    }

    /// Number of boundary components.
    pub fn n(&self) -> usize {
        self.inner.len() + 1
    }

    pub fn boundary(&self, k: usize) -> Circle {
        if k < self.inner.len() {
            self.inner[k]
        } else {
            self.outer
        }
    }

    /// All boundary circles, exterior last.
    pub fn boundaries(&self) -> Vec<Circle> {
        let mut v = self.inner.clone();
        v.push(self.outer);
        v
    }

    /// Reference node on the exterior circle used for additive-constant gauges
    /// and as default integration base point.
    pub fn reference_node(&self) -> Complex64 {
        self.outer.center + self.outer.radius
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !(self.outer.radius > 0.0) || !finite(self.outer.center) || !finite(self.puncture) {
            return Err(Error::InvalidDomain("exterior circle must have positive radius"));
        }
        for (i, c) in self.inner.iter().enumerate() {
            if !(c.radius > 0.0) || !finite(c.center) {
                return Err(Error::InvalidDomain("inner radii must be positive"));
            }
            if (c.center - self.outer.center).norm() + c.radius >= self.outer.radius - DISJOINT_MARGIN {
                return Err(Error::InvalidDomain("inner disk not strictly inside the exterior circle"));
            }
            for d in &self.inner[i + 1..] {
                if (c.center - d.center).norm() - c.radius - d.radius <= DISJOINT_MARGIN {
                    return Err(Error::InvalidDomain("inner disks overlap"));
                }
            }
        }
        if self.outer.signed_distance(self.puncture) >= -DISJOINT_MARGIN
            || self
                .inner
                .iter()
                .any(|c| c.signed_distance(self.puncture) <= DISJOINT_MARGIN)
        {
            return Err(Error::InvalidDomain("puncture must lie in the open domain"));
        }
        Ok(())
    }

    /// Distance from `z` to the nearest boundary circle, negative outside the
    /// closure of the domain.
    pub fn boundary_clearance(&self, z: Complex64) -> f64 {
        self.inner
            .iter()
            .map(|c| c.signed_distance(z))
            .fold(-self.outer.signed_distance(z), f64::min)
    }

    /// True iff `z` lies in the open punctured domain.
    pub fn contains(&self, z: Complex64) -> bool {
        self.boundary_clearance(z) > 0.0 && z != self.puncture
    }

    /// If the domain is a concentric annulus, returns the radius ratio.
    pub fn concentric_ratio(&self) -> Option<f64> {
        match self.inner.as_slice() {
            [c] if (c.center - self.outer.center).norm() <= 1e-14 * self.outer.radius => {
                Some(c.radius / self.outer.radius)
            }
            _ => None,
        }
    }

    /// True for the canonical annulus `r < |z| < 1` (or the unit disk when
    /// `n = 1`).
    pub fn is_unit_normalized(&self) -> bool {
        self.outer.center == Complex64::new(0.0, 0.0) && self.outer.radius == 1.0
    }
}

/// Bounded normal form of a moduli point: `w -> 1/w` sends the unit circle to
/// itself (now the exterior boundary), the other disks to inner circles and
/// the puncture at infinity to the origin.
pub fn moduli_to_domain(m: &ModuliPoint) -> Result<CircularDomain> {
    m.validate()?;
    let disks = m.disks();
    let outer = invert_circle(&disks[0])?;
    let inner = disks[1..]
        .iter()
        .map(invert_circle)
        .collect::<Result<Vec<_>>>()?;
    CircularDomain::new(outer, inner, Complex64::new(0.0, 0.0))
}

/// Free-function form of [`CircularDomain::contains`].
pub fn contains(d: &CircularDomain, z: Complex64) -> bool {
    d.contains(z)
}
