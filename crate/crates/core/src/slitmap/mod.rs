//! Canonical slit maps of a once-punctured circular domain.
//!
//! `p` has a simple pole of residue 1 at the puncture and constant real part
//! on every boundary circle (vertical slits); `q` has the same pole and
//! constant imaginary part (horizontal slits). The constants are normalized to
//! vanish on the exterior circle.

pub mod closed;
pub mod harmonic;
pub mod numeric;

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::CircularDomain;
use crate::error::{Error, Result};
use crate::theta::ThetaParams;

pub use closed::{annulus_pq, disk_pq, AnnulusParams, SlitValues};
pub use harmonic::{
    green, harmonic_measure, period_system, uv_fields, FieldKind, GreenFunction, HarmonicFieldHandle,
    HarmonicSeries, PeriodSystem,
};
pub use numeric::solve_pq_numeric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitKind {
    DiskClosedForm,
    AnnulusClosedForm,
    Numeric,
}

/// `residue/(z - z0) + sum_k sum_m inner[k][m-1] (z - c_k)^{-m}
///  + sum_m outer[m] (z - c)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSeries {
    pub residue: f64,
    pub inner: Vec<Vec<Complex64>>,
    pub outer: Vec<Complex64>,
}

impl PoleSeries {
    /// Value and derivative.
    pub fn eval(&self, domain: &CircularDomain, z0: Complex64, z: Complex64) -> (Complex64, Complex64) {
        let d = (z - z0).inv();
        let mut v = d * self.residue;
        let mut dv = -d * d * self.residue;
        for (c, coef) in domain.inner.iter().zip(&self.inner) {
            let w = (z - c.center).inv();
            // Horner for sum a_m w^m and sum m a_m w^{m-1}
            let mut s = Complex64::new(0.0, 0.0);
            let mut ds = Complex64::new(0.0, 0.0);
            for (i, a) in coef.iter().enumerate().rev() {
                s = (s + a) * w;
                ds = ds * w + a * (i + 1) as f64;
            }
            v += s;
            dv -= ds * w * w;
        }
        let t = z - domain.outer.center;
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        for (m, b) in self.outer.iter().enumerate().rev() {
            s = s * t + b;
            if m > 0 {
                ds = ds * t + b * m as f64;
            }
        }
        (v + s, dv + ds)
    }
}

/// The pair `(p, q)` on a domain, by closed form or by fitted series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitPair {
    pub domain: CircularDomain,
    pub kind: SlitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus_params: Option<AnnulusParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_series: Option<PoleSeries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_series: Option<PoleSeries>,
    /// `Re p` on `C_1, ..., C_n` (exterior last, always 0)
    pub lambda: Vec<f64>,
    /// `Im q` on `C_1, ..., C_n` (exterior last, always 0)
    pub mu: Vec<f64>,
    #[serde(default)]
    pub degree: usize,
    #[serde(default)]
    pub residual: f64,
}

impl SlitPair {
    /// `p = 1/z - z`, `q = 1/z + z` on the unit disk punctured at the origin.
    pub fn disk() -> Self {
        SlitPair {
            domain: CircularDomain::unit_disk(Complex64::new(0.0, 0.0)).expect("unit disk is valid"),
            kind: SlitKind::DiskClosedForm,
            annulus_params: None,
            p_series: None,
            q_series: None,
            lambda: alloc::vec![0.0],
            mu: alloc::vec![0.0],
            degree: 0,
            residual: 0.0,
        }
    }

    /// Theta-function maps on `r < |z| < 1` punctured at `z0`.
    pub fn annulus(r: f64, z0: Complex64) -> Result<Self> {
        let params = AnnulusParams::new(r, z0)?;
        Ok(SlitPair {
            domain: CircularDomain::annulus(r, z0)?,
            kind: SlitKind::AnnulusClosedForm,
            annulus_params: Some(params),
            p_series: None,
            q_series: None,
            lambda: alloc::vec![params.inner_real_constant(), 0.0],
            mu: alloc::vec![params.inner_imag_constant(), 0.0],
            degree: 0,
            residual: 0.0,
        })
    }

    pub fn numeric(domain: &CircularDomain, degree: usize, collocation: usize) -> Result<Self> {
        solve_pq_numeric(domain, degree, collocation)
    }

    /// Structural checks after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let n = self.domain.n();
        if self.lambda.len() != n || self.mu.len() != n {
            return Err(Error::InvalidDomain("one boundary constant per circle is required"));
        }
        match self.kind {
            SlitKind::DiskClosedForm => {
                if !(self.domain.n() == 1 && self.domain.is_unit_normalized() && self.domain.puncture.norm() == 0.0) {
                    return Err(Error::InvalidDomain("disk closed form needs the unit disk punctured at 0"));
                }
            }
            SlitKind::AnnulusClosedForm => {
                let prm = self
                    .annulus_params
                    .ok_or(Error::InvalidDomain("annulus closed form without parameters"))?;
                AnnulusParams::new(prm.r, prm.z0)?;
                if self.domain != CircularDomain::annulus(prm.r, prm.z0)? {
                    return Err(Error::InvalidDomain("annulus parameters disagree with the domain"));
                }
            }
            SlitKind::Numeric => {
                let ok = |s: &Option<PoleSeries>| {
                    s.as_ref()
                        .map_or(false, |s| s.inner.len() == self.domain.inner.len() && !s.outer.is_empty())
                };
                if !ok(&self.p_series) || !ok(&self.q_series) {
                    return Err(Error::InvalidDomain("numeric slit pair without matching series"));
                }
            }
        }
        Ok(())
    }

    pub fn evaluator(&self) -> SlitEvaluator<'_> {
        SlitEvaluator {
            pair: self,
            theta: self.annulus_params.map(|p| p.theta()),
        }
    }

    /// `p`, `q` and derivatives at `z`.
    pub fn values(&self, z: Complex64) -> Result<SlitValues> {
        self.evaluator().values(z)
    }
}

/// Borrowing evaluator that caches the theta parameters.
#[derive(Debug, Clone, Copy)]
pub struct SlitEvaluator<'a> {
    pair: &'a SlitPair,
    theta: Option<ThetaParams>,
}

impl SlitEvaluator<'_> {
    pub fn values(&self, z: Complex64) -> Result<SlitValues> {
        eval_with(self.pair, self.theta.as_ref(), z)
    }
}

/// Evaluation with theta parameters prepared by the caller (required for the
/// annulus closed form).
pub(crate) fn eval_with(pair: &SlitPair, theta: Option<&ThetaParams>, z: Complex64) -> Result<SlitValues> {
    let z0 = pair.domain.puncture;
    if (z - z0).norm() < closed::POLE_GUARD {
        return Err(Error::PoleHit(z));
    }
    match pair.kind {
        SlitKind::DiskClosedForm => closed::disk_values(z),
        SlitKind::AnnulusClosedForm => {
            let prm = pair.annulus_params.as_ref().expect("validated annulus pair");
            closed::annulus_values(prm, theta.expect("theta prepared for the annulus"), z)
        }
        SlitKind::Numeric => {
            let ps = pair.p_series.as_ref().expect("validated numeric pair");
            let qs = pair.q_series.as_ref().expect("validated numeric pair");
            let (p, dp) = ps.eval(&pair.domain, z0, z);
            let (q, dq) = qs.eval(&pair.domain, z0, z);
            Ok(SlitValues { p, q, dp, dq })
        }
    }
}
