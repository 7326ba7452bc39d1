//! Boundary-modulus indicator of non-removable singularities.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::Circle;
use crate::error::Result;
use crate::sphere::HolomorphicData;

pub const REMOVABILITY_NODES: usize = 256;
pub const REMOVABILITY_OFFSET: f64 = 1e-6;

/// Anything that can report `|F'/G'|`.
pub trait DerivativeRatio {
    fn derivative_ratio(&self, z: Complex64) -> Result<f64>;
}

impl DerivativeRatio for HolomorphicData {
    fn derivative_ratio(&self, z: Complex64) -> Result<f64> {
        Ok(self.values(z)?.ratio())
    }
}

/// Data given by explicit derivative closures.
pub struct ExplicitData<A, B> {
    pub df: A,
    pub dg: B,
}

impl<A, B> DerivativeRatio for ExplicitData<A, B>
where
    A: Fn(Complex64) -> Complex64,
    B: Fn(Complex64) -> Complex64,
{
    fn derivative_ratio(&self, z: Complex64) -> Result<f64> {
        Ok((self.df)(z).norm() / (self.dg)(z).norm())
    }
}

/// `max |1 - |F'/G'||` over `nodes` equispaced points of `ring`. A failed
/// evaluation counts as infinitely far from 1.
pub fn ring_indicator<D: DerivativeRatio + ?Sized>(data: &D, ring: &Circle, nodes: usize) -> f64 {
    (0..nodes)
        .map(|j| {
            let z = ring.point(2.0 * PI * j as f64 / nodes as f64);
            match data.derivative_ratio(z) {
                Ok(r) if r.is_finite() => (1.0 - r).abs(),
                _ => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

/// [`ring_indicator`] on circle `k` (exterior = 0, then the inner circles)
/// moved `1e-6` into the domain, 256 nodes.
///
/// # Panics
///
/// If `k` is not a circle index of the domain.
pub fn removability_indicator(data: &HolomorphicData, k: usize) -> f64 {
    let d = data.domain();
    let ring = if k == 0 {
        Circle::new(d.outer.center, d.outer.radius - REMOVABILITY_OFFSET)
    } else {
        let c = d.inner[k - 1];
        Circle::new(c.center, c.radius + REMOVABILITY_OFFSET)
    };
    ring_indicator(data, &ring, REMOVABILITY_NODES)
}
