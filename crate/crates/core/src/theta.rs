//! Annular Jacobi theta function
//!
//! `theta1(z) = C (1 - 1/z) prod_{k>=1} (1 - r^{2k} z)(1 - r^{2k}/z)`,
//! `C = prod_{k>=1} (1 - r^{2k})`,
//!
//! with simple zeros at `z = r^{2m}`, `m` in `Z`. The product is truncated at
//! `K` factors, and `C` is truncated at the same order.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this modulus the log-derivative is refused.
pub const NEAR_ZERO: f64 = 1e-13;

/// Within this distance of a zero the derivative is expanded by the product
/// rule instead of `theta1 * logderiv`.
const PRODUCT_RULE_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub r: f64,
    pub truncation: usize,
    pub normalization: f64,
}

impl ThetaParams {
    /// Smallest truncation with `r^{2K} < 1e-16`.
    pub fn new(r: f64) -> Self {
        assert!(r > 0.0 && r < 1.0, "theta nome parameter must lie in (0, 1), got {r}");
        let q = r * r;
        let mut k = 1;
        let mut qk = q;
        while qk >= 1e-16 {
            qk *= q;
            k += 1;
        }
        Self::with_truncation(r, k)
    }

    pub fn with_truncation(r: f64, truncation: usize) -> Self {
        assert!(r > 0.0 && r < 1.0, "theta nome parameter must lie in (0, 1), got {r}");
        assert!(truncation >= 1);
        let q = r * r;
        let mut a = 1.0;
        let mut c = 1.0;
        for _ in 0..truncation {
            a *= q;
            c *= 1.0 - a;
        }
        ThetaParams {
            r,
            truncation,
            normalization: c,
        }
    }

    /// `r^{2k}` for `k = 1..=K`.
    fn powers(&self) -> impl Iterator<Item = f64> {
        let q = self.r * self.r;
        (0..self.truncation).scan(1.0, move |a, _| {
            *a *= q;
            Some(*a)
        })
    }

    fn near_zero_of(&self, z: Complex64) -> bool {
        let q = self.r * self.r;
        let k = self.truncation as i32;
        // only zeros with comparable modulus can be close
        let m = libm::round(libm::log(z.norm()) / libm::log(q)) as i32;
        (m - 1..=m + 1)
            .filter(|m| m.abs() <= k)
            .any(|m| (z - libm::pow(q, m as f64)).norm() < PRODUCT_RULE_RADIUS)
    }
}

fn check_nonzero(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(Error::ZeroArgument)
    } else {
        Ok(())
    }
}

pub fn theta1(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    check_nonzero(z)?;
    let inv = z.inv();
    let mut acc = Complex64::new(1.0, 0.0) - inv;
    for a in p.powers() {
        acc *= (1.0 - a * z) * (1.0 - a * inv);
    }
    Ok(acc * p.normalization)
}

pub fn theta1_prime(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    check_nonzero(z)?;
    if p.near_zero_of(z) {
        return Ok(product_rule_derivative(z, p));
    }
    let value = theta1(z, p)?;
    Ok(value * logderiv_sum(z, p))
}

/// Sum over factors of `f_i' * prod_{j != i} f_j`, via prefix and suffix
/// products. Stays accurate on top of a zero.
fn product_rule_derivative(z: Complex64, p: &ThetaParams) -> Complex64 {
    let inv = z.inv();
    let mut factors: Vec<(Complex64, Complex64)> = Vec::with_capacity(2 * p.truncation + 1);
    factors.push((1.0 - inv, inv * inv));
    for a in p.powers() {
        factors.push((1.0 - a * z, Complex64::new(-a, 0.0)));
        factors.push((1.0 - a * inv, a * inv * inv));
    }
    let mut suffix = alloc::vec![Complex64::new(1.0, 0.0); factors.len() + 1];
    for i in (0..factors.len()).rev() {
        suffix[i] = suffix[i + 1] * factors[i].0;
    }
    let mut prefix = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, (f, df)) in factors.iter().enumerate() {
        sum += prefix * df * suffix[i + 1];
        prefix *= f;
    }
    sum * p.normalization
}

fn logderiv_sum(z: Complex64, p: &ThetaParams) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut s = inv2 / (1.0 - inv);
    for a in p.powers() {
        s += -a / (1.0 - a * z) + a * inv2 / (1.0 - a * inv);
    }
    s
}

/// `theta1'(z) / theta1(z)` accumulated factor by factor.
pub fn theta1_logderiv(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    let value = theta1(z, p)?;
    if value.norm() <= NEAR_ZERO {
        return Err(Error::NearZero(z));
    }
    Ok(logderiv_sum(z, p))
}

/// Derivative of [`theta1_logderiv`] with respect to `z`.
pub fn theta1_logderiv_prime(z: Complex64, p: &ThetaParams) -> Result<Complex64> {
    let value = theta1(z, p)?;
    if value.norm() <= NEAR_ZERO {
        return Err(Error::NearZero(z));
    }
    let zm1 = z - 1.0;
    let mut s = -(2.0 * z - 1.0) / (z * z * zm1 * zm1);
    for a in p.powers() {
        let u = 1.0 - a * z;
        let w = z - a;
        s += -(a * a) / (u * u) - a * (2.0 * z - a) / (z * z * w * w);
    }
    Ok(s)
}
