//! Closed-form canonical slit maps on the unit disk and on the annulus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{theta1_logderiv, theta1_logderiv_prime, ThetaParams};

/// Distance to the puncture below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-12;

/// `p`, `q` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitValues {
    pub p: Complex64,
    pub q: Complex64,
    pub dp: Complex64,
    pub dq: Complex64,
}

/// `p(z) = 1/z - z`, `q(z) = 1/z + z` on the unit disk punctured at 0.
pub fn disk_pq(z: Complex64) -> Result<(Complex64, Complex64)> {
    let v = disk_values(z)?;
    Ok((v.p, v.q))
}

pub(crate) fn disk_values(z: Complex64) -> Result<SlitValues> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    Ok(SlitValues {
        p: inv - z,
        q: inv + z,
        dp: -inv2 - 1.0,
        dq: -inv2 + 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusParams {
    pub r: f64,
    pub z0: Complex64,
}

impl AnnulusParams {
    pub fn new(r: f64, z0: Complex64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidDomain("annulus radius must lie in (0, 1)"));
        }
        if !(z0.norm() > r && z0.norm() < 1.0) {
            return Err(Error::InvalidDomain("puncture must satisfy r < |z0| < 1"));
        }
        Ok(AnnulusParams { r, z0 })
    }

    pub fn theta(&self) -> ThetaParams {
        ThetaParams::new(self.r)
    }

    /// `Re p` on the inner circle.
    pub fn inner_real_constant(&self) -> f64 {
        -self.z0.inv().re
    }

    /// `Im q` on the inner circle.
    pub fn inner_imag_constant(&self) -> f64 {
        self.z0.conj().inv().im
    }
}

/// The annulus maps
///
/// `p(z) =  z L(conj(z0) z) - L(z0/z)/z`,
/// `q(z) = -z L(conj(z0) z) - L(z0/z)/z`,
///
/// with `L = theta1'/theta1`. Both have a simple pole of residue 1 at `z0`.
pub fn annulus_pq(params: &AnnulusParams, z: Complex64) -> Result<(Complex64, Complex64)> {
    let m = z.norm();
    let slack = 1e-9;
    if !(m >= params.r * (1.0 - slack) && m <= 1.0 + slack) {
        return Err(Error::OutOfAnnulus(z));
    }
    let v = annulus_values(params, &params.theta(), z)?;
    Ok((v.p, v.q))
}

/// Evaluation without the closure check, valid wherever the theta arguments
/// stay off the zeros.
pub(crate) fn annulus_values(params: &AnnulusParams, theta: &ThetaParams, z: Complex64) -> Result<SlitValues> {
    if (z - params.z0).norm() < POLE_GUARD {
        return Err(Error::PoleHit(z));
    }
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let z0 = params.z0;
    let zb = z0.conj();
    let inv = z.inv();
    let w1 = zb * z;
    let w2 = z0 * inv;
    let l1 = theta1_logderiv(w1, theta)?;
    let l2 = theta1_logderiv(w2, theta)?;
    let dl1 = theta1_logderiv_prime(w1, theta)?;
    let dl2 = theta1_logderiv_prime(w2, theta)?;
    let a = z * l1;
    let b = l2 * inv;
    // d/dz [z L(zb z)] and d/dz [L(z0/z)/z]
    let da = l1 + z * zb * dl1;
    let db = -(dl2 * z0 * inv * inv * inv) - l2 * inv * inv;
    Ok(SlitValues {
        p: a - b,
        q: -a - b,
        dp: da - db,
        dq: -da - db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_substitutions() {
        let (p, q) = disk_pq(c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!((p - c(0.0, -2.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.norm(), 0.0, epsilon = 1e-15);
        let (p, q) = disk_pq(c(0.5, 0.0)).unwrap();
        assert_eq!((p, q), (c(1.5, 0.0), c(2.5, 0.0)));
        for k in 0..16 {
            let (p, _) = disk_pq(Complex64::from_polar(1.0, 0.4 * k as f64)).unwrap();
            assert_abs_diff_eq!(p.re, 0.0, epsilon = 1e-15);
        }
        assert_eq!(disk_pq(c(0.0, 0.0)), Err(Error::ZeroArgument));
    }

    fn params() -> AnnulusParams {
        AnnulusParams::new(0.5, c(0.7, 0.0)).unwrap()
    }

    #[test]
    fn boundary_real_parts() {
        let prm = params();
        for k in 0..32 {
            let t = 2.0 * PI * k as f64 / 32.0;
            let (p, q) = annulus_pq(&prm, Complex64::from_polar(1.0, t)).unwrap();
            assert_abs_diff_eq!(p.re, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(q.im, 0.0, epsilon = 1e-12);
            let (p, q) = annulus_pq(&prm, Complex64::from_polar(0.5, t)).unwrap();
            assert_abs_diff_eq!(p.re, -1.0 / 0.7, epsilon = 1e-12);
            assert_abs_diff_eq!(q.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn complex_puncture_boundary_constants() {
        let prm = AnnulusParams::new(0.4, c(0.5, 0.45)).unwrap();
        for k in 0..16 {
            let t = 2.0 * PI * k as f64 / 16.0;
            let (p, q) = annulus_pq(&prm, Complex64::from_polar(0.4, t)).unwrap();
            assert_abs_diff_eq!(p.re, prm.inner_real_constant(), epsilon = 1e-11);
            assert_abs_diff_eq!(q.im, prm.inner_imag_constant(), epsilon = 1e-11);
        }
    }

    #[test]
    fn residue_is_one() {
        let prm = params();
        for k in 0..8 {
            let z = prm.z0 + Complex64::from_polar(1e-7, k as f64);
            let (p, q) = annulus_pq(&prm, z).unwrap();
            assert_abs_diff_eq!(((z - prm.z0) * p - 1.0).norm(), 0.0, epsilon = 1e-6);
            assert_abs_diff_eq!(((z - prm.z0) * q - 1.0).norm(), 0.0, epsilon = 1e-6);
        }
        assert!(matches!(annulus_pq(&prm, prm.z0), Err(Error::PoleHit(_))));
        assert!(matches!(annulus_pq(&prm, c(0.2, 0.0)), Err(Error::OutOfAnnulus(_))));
    }

    #[test]
    fn real_puncture_reflection() {
        let prm = params();
        let z = c(0.6, 0.55);
        let (p, q) = annulus_pq(&prm, z).unwrap();
        let (pc, qc) = annulus_pq(&prm, z.conj()).unwrap();
        assert_abs_diff_eq!((pc - p.conj()).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!((qc - q.conj()).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let prm = params();
        let th = prm.theta();
        let h = 1e-5;
        for z in [c(0.8, 0.3), c(-0.6, 0.1), c(0.1, -0.55)] {
            let v = annulus_values(&prm, &th, z).unwrap();
            let plus = annulus_values(&prm, &th, z + h).unwrap();
            let minus = annulus_values(&prm, &th, z - h).unwrap();
            let dp = (plus.p - minus.p) / (2.0 * h);
            let dq = (plus.q - minus.q) / (2.0 * h);
            assert!((v.dp - dp).norm() <= 1e-7 * v.dp.norm().max(1.0));
            assert!((v.dq - dq).norm() <= 1e-7 * v.dq.norm().max(1.0));
        }
    }
}
