//! Verification report for a constructed solution.
//!
//! Circles are indexed as in [`AffineSphereSolution::image_circles`]:
//! the exterior circle is 0, the inner circles follow in domain order.

mod fd;
mod removable;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Circle, CircularDomain};
use crate::error::{Error, Result};
use crate::quad::circle_integral;
use crate::slitmap::SlitKind;
use crate::sphere::{AffineSphereSolution, HolomorphicData, SINGULARITY_SPREAD};
use crate::theta::{theta1, theta1_prime};

pub use fd::{fd_point, ma_residual_fd, FdPoint, FdSummary, PlanarGrid};
pub use removable::{removability_indicator, ring_indicator, DerivativeRatio, ExplicitData};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_FD_STEP: f64 = 1e-3;

const CONTRACTION_OFFSET: f64 = 1e-4;
const CONTRACTION_RING: usize = 256;
const PERIOD_OFFSET: f64 = 1e-6;
const PERIOD_NODES: usize = 4096;
const PERIOD_TOL: f64 = 1e-8;
const MA_TOL_CLOSED: f64 = 1e-5;
const MA_TOL_NUMERIC: f64 = 1e-4;
const REMOVABILITY_TOL: f64 = 1e-3;
const CLOSED_FORM_TOL: f64 = 1e-10;
const ANALYTIC_TOL: f64 = 1e-10;
const SLIT_CONSTANT_TOL: f64 = 1e-6;
const INJECTIVITY_PAIRS: usize = 10_000;
const FD_CLEARANCE: f64 = 1.0;
const FD_WIDTH: f64 = 4.0;

const REMOVABILITY_NOTE: &str = "removability[k] is max |1 - |F'/G'|| on 256 points at distance 1e-6 \
inside circle k. Values near 0 place the singularity in the non-removable regime, where the \
conformal type around it is an annulus; values near 1 would mean |F'/G'| stays away from 1 and the \
singularity could be removed. This is a boundary-modulus surrogate, not a classifier of the \
conformal type.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// Where a check attained its worst value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A point of the conformal domain.
    Conformal(Complex64),
    /// A point of the `(x, y)` plane.
    Planar([f64; 2]),
    Circle(usize),
    Pair(Complex64, Complex64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    /// Non-finite values (failed evaluations) serialize as `null`.
    #[serde(deserialize_with = "nullable")]
    pub worst_value: f64,
    pub tolerance: f64,
    pub location: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    /// True iff no check failed.
    pub summary: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// 0 if everything passed, 2 if any check failed, 3 for warnings only.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            2
        } else if self.checks.iter().any(|c| c.status == CheckStatus::Warn) {
            3
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    /// Overrides the Monge-Ampere tolerance (FD residual and Hessian gap).
    pub ma_tol: Option<f64>,
    /// Overrides the boundary-constancy tolerance.
    pub boundary_tol: Option<f64>,
    /// Overrides the period-closure tolerance.
    pub period_tol: Option<f64>,
    pub fd_step: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            ma_tol: None,
            boundary_tol: None,
            period_tol: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

impl VerifyOptions {
    fn ma(&self, kind: SlitKind) -> f64 {
        self.ma_tol.unwrap_or(match kind {
            SlitKind::Numeric => MA_TOL_NUMERIC,
            _ => MA_TOL_CLOSED,
        })
    }

    fn boundary(&self) -> f64 {
        self.boundary_tol.unwrap_or(SINGULARITY_SPREAD)
    }

    fn period(&self) -> f64 {
        self.period_tol.unwrap_or(PERIOD_TOL)
    }
}

/// Runs every check with the default options.
pub fn verify_solution(sol: &AffineSphereSolution) -> VerificationReport {
    verify_with(sol, &VerifyOptions::default())
}

pub fn verify_with(sol: &AffineSphereSolution, opts: &VerifyOptions) -> VerificationReport {
    let data = &sol.data;
    let d = sol.domain();
    let kind = data.slit.kind;
    let circles = sol.image_circles();
    let samples = interior_samples(d, opts.seed, opts.samples);
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    // contraction: interior samples and rings just inside every circle
    let mut probes = samples.clone();
    for (k, c) in circles.iter().enumerate() {
        probes.extend(ring_points(&inset(c, k, CONTRACTION_OFFSET), CONTRACTION_RING));
    }
    checks.push(fold_check("contraction", &probes, 1.0, Extreme::Max, |z| {
        contraction_value(data, z)
    }, |w, t| w < t));

    checks.push(fold_check("metric_positivity", &samples, 0.0, Extreme::Min, |z| {
        data.values(z).map(|v| v.metric())
    }, |w, t| w > t));

    let period_tol = opts.period();
    for k in 0..circles.len() {
        let (value, status) = match period_value(data, &circles, k) {
            Ok(v) => (v, status_of(v <= period_tol)),
            Err(_) => (f64::INFINITY, CheckStatus::Fail),
        };
        checks.push(Check {
            name: format!("period_closure[{k}]"),
            status,
            worst_value: value,
            tolerance: period_tol,
            location: Some(Witness::Circle(k)),
        });
    }

    let boundary_tol = opts.boundary();
    for (k, &spread) in sol.singularity_spreads().iter().enumerate() {
        checks.push(Check {
            name: format!("singularity_constancy[{k}]"),
            status: status_of(spread <= boundary_tol),
            worst_value: spread,
            tolerance: boundary_tol,
            location: Some(Witness::Circle(k)),
        });
    }

    let ma_tol = opts.ma(kind);
    let grid = PlanarGrid::around_singularities(sol.singularity_estimates(), FD_CLEARANCE, FD_WIDTH);
    match ma_residual_fd(sol, &grid, opts.fd_step) {
        Ok(fd) => {
            let usable = fd.evaluated > 0;
            checks.push(Check {
                name: "hessian_fd_agreement".to_string(),
                status: if usable && fd.worst_gap <= ma_tol { CheckStatus::Pass } else { CheckStatus::Warn },
                worst_value: fd.worst_gap,
                tolerance: ma_tol,
                location: fd.worst_gap_at.map(Witness::Planar),
            });
            checks.push(Check {
                name: "ma_residual_fd".to_string(),
                status: status_of(usable && fd.worst <= ma_tol),
                worst_value: if usable { fd.worst } else { f64::INFINITY },
                tolerance: ma_tol,
                location: fd.worst_at.map(Witness::Planar),
            });
            if !fd.skipped.is_empty() {
                notes.push(format!(
                    "ma_residual_fd skipped {} of {} grid points",
                    fd.skipped.len(),
                    grid.points.len()
                ));
            }
        }
        Err(e) => {
            for name in ["hessian_fd_agreement", "ma_residual_fd"] {
                checks.push(Check {
                    name: name.to_string(),
                    status: CheckStatus::Fail,
                    worst_value: f64::INFINITY,
                    tolerance: ma_tol,
                    location: None,
                });
            }
            notes.push(format!("finite differences not evaluated: {e}"));
        }
    }

    for k in 0..circles.len() {
        let value = removability_indicator(data, k);
        checks.push(Check {
            name: format!("removability[{k}]"),
            status: status_of(value <= REMOVABILITY_TOL),
            worst_value: value,
            tolerance: REMOVABILITY_TOL,
            location: Some(Witness::Circle(k)),
        });
    }
    notes.push(REMOVABILITY_NOTE.to_string());

    if kind == SlitKind::Numeric {
        notes.push("closed_form not applicable to numeric slit maps".to_string());
    } else {
        checks.push(fold_check("closed_form", &samples, CLOSED_FORM_TOL, Extreme::Max, |z| {
            closed_form_gap(data, z)
        }, |w, t| w <= t));
    }

    checks.push(fold_check("ma_residual_analytic", &samples, ANALYTIC_TOL, Extreme::Max, |z| {
        sol.local_derivatives(z).map(|s| s.ma_residual.abs())
    }, |w, t| w <= t));

    checks.push(fold_check("convexity", &samples, 0.0, Extreme::Min, |z| {
        sol.local_derivatives(z).map(|s| s.hessian[0])
    }, |w, t| w > t));

    checks.push(injectivity_check(data, &samples, opts.seed));

    for k in 0..circles.len() {
        let (value, status) = match slit_constant_gap(sol, k) {
            Ok(v) => (v, status_of(v <= SLIT_CONSTANT_TOL)),
            Err(_) => (f64::INFINITY, CheckStatus::Fail),
        };
        checks.push(Check {
            name: format!("singularity_slit_constants[{k}]"),
            status,
            worst_value: value,
            tolerance: SLIT_CONSTANT_TOL,
            location: Some(Witness::Circle(k)),
        });
    }

    for (key, v) in [("ma", opts.ma_tol), ("boundary", opts.boundary_tol), ("period", opts.period_tol)] {
        if let Some(t) = v {
            notes.push(format!("tolerance override {key}={t:e}"));
        }
    }

    let summary = !checks.iter().any(|c| c.status == CheckStatus::Fail);
    VerificationReport {
        seed: opts.seed,
        samples: samples.len(),
        checks,
        summary,
        notes,
    }
}

/// Recomputes the value a check recorded at its witness.
pub fn reevaluate(sol: &AffineSphereSolution, check: &Check, opts: &VerifyOptions) -> Result<f64> {
    let data = &sol.data;
    let (base, index) = split_name(&check.name);
    let circles = sol.image_circles();
    let circle_index = || index.filter(|k| *k < circles.len()).ok_or(Error::InvalidDomain("bad circle index"));
    let missing = Error::InvalidDomain("check has no usable witness");
    match (base, check.location) {
        ("contraction", Some(Witness::Conformal(z))) => contraction_value(data, z),
        ("metric_positivity", Some(Witness::Conformal(z))) => data.values(z).map(|v| v.metric()),
        ("closed_form", Some(Witness::Conformal(z))) => closed_form_gap(data, z),
        ("ma_residual_analytic", Some(Witness::Conformal(z))) => sol.local_derivatives(z).map(|s| s.ma_residual.abs()),
        ("convexity", Some(Witness::Conformal(z))) => sol.local_derivatives(z).map(|s| s.hessian[0]),
        ("injectivity", Some(Witness::Pair(a, b))) => pair_ratio(data, a, b),
        ("ma_residual_fd", Some(Witness::Planar(p))) => fd_point(sol, p, opts.fd_step).map(|p| p.residual()),
        ("hessian_fd_agreement", Some(Witness::Planar(p))) => fd_point(sol, p, opts.fd_step).map(|p| p.gap()),
        ("period_closure", _) => period_value(data, &circles, circle_index()?),
        ("singularity_constancy", _) => Ok(sol.singularity_spreads()[circle_index()?]),
        ("removability", _) => Ok(removability_indicator(data, circle_index()?)),
        ("singularity_slit_constants", _) => slit_constant_gap(sol, circle_index()?),
        _ => Err(missing),
    }
}

fn nullable<'de, D: serde::Deserializer<'de>>(d: D) -> core::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn split_name(name: &str) -> (&str, Option<usize>) {
    match name.split_once('[') {
        Some((base, rest)) => (base, rest.trim_end_matches(']').parse().ok()),
        None => (name, None),
    }
}

fn status_of(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

#[derive(Clone, Copy)]
enum Extreme {
    Max,
    Min,
}

/// Worst value of `f` over `points`; an evaluation error is a failure
/// located at the offending point.
fn fold_check<F, A>(name: &str, points: &[Complex64], tolerance: f64, extreme: Extreme, f: F, accept: A) -> Check
where
    F: Fn(Complex64) -> Result<f64>,
    A: Fn(f64, f64) -> bool,
{
    let mut worst: Option<(f64, Complex64)> = None;
    for &z in points {
        let v = match f(z) {
            Ok(v) if !v.is_nan() => v,
            _ => {
                return Check {
                    name: name.to_string(),
                    status: CheckStatus::Fail,
                    worst_value: f64::NAN,
                    tolerance,
                    location: Some(Witness::Conformal(z)),
                }
            }
        };
        let better = match (worst, extreme) {
            (None, _) => true,
            (Some((w, _)), Extreme::Max) => v > w,
            (Some((w, _)), Extreme::Min) => v < w,
        };
        if better {
            worst = Some((v, z));
        }
    }
    let (value, at) = match worst {
        Some((v, z)) => (v, Some(Witness::Conformal(z))),
        None => (f64::NAN, None),
    };
    Check {
        name: name.to_string(),
        status: status_of(at.is_some() && accept(value, tolerance)),
        worst_value: value,
        tolerance,
        location: at,
    }
}

/// Uniform interior points, at least `1e-3 R` from the boundary and the
/// puncture.
pub fn interior_samples(d: &CircularDomain, seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 1e-3 * d.outer.radius;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let z = d.outer.center + u * d.outer.radius;
        if d.boundary_clearance(z) > margin && (z - d.puncture).norm() > margin {
            out.push(z);
        }
    }
    out
}

/// Circle `k` (exterior = 0) moved `offset` into the domain.
fn inset(c: &Circle, k: usize, offset: f64) -> Circle {
    let r = if k == 0 { c.radius - offset } else { c.radius + offset };
    Circle::new(c.center, r)
}

fn ring_points(c: &Circle, nodes: usize) -> impl Iterator<Item = Complex64> + '_ {
    (0..nodes).map(move |j| c.point(2.0 * PI * j as f64 / nodes as f64))
}

fn contraction_value(data: &HolomorphicData, z: Complex64) -> Result<f64> {
    let v = data.values(z)?;
    if v.dg.norm() == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(v.ratio())
}

/// `|Re oint F dG|` on circle `k`, just inside the domain.
fn period_value(data: &HolomorphicData, circles: &[Circle], k: usize) -> Result<f64> {
    let ring = inset(&circles[k], k, PERIOD_OFFSET);
    let mut err = None;
    let v = circle_integral(&ring, PERIOD_NODES, |z| match data.f_dg(z) {
        Ok(w) => w,
        Err(e) => {
            err.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v.re.abs()),
    }
}

/// Relative distance of `G`, `F` to their explicit expressions.
fn closed_form_gap(data: &HolomorphicData, z: Complex64) -> Result<f64> {
    let v = data.values(z)?;
    let (g, f) = match (data.slit.kind, data.slit.annulus_params) {
        (SlitKind::DiskClosedForm, _) => (2.0 / z, -2.0 * z),
        (SlitKind::AnnulusClosedForm, Some(prm)) => {
            let th = prm.theta();
            let w = prm.z0 / z;
            let u = prm.z0.conj() * z;
            let g = -2.0 * theta1_prime(w, &th)? / (z * theta1(w, &th)?);
            let f = 2.0 * z * theta1_prime(u, &th)? / theta1(u, &th)?;
            (g, f)
        }
        _ => return Err(Error::InvalidDomain("no closed form for this slit pair")),
    };
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1.0);
    Ok(rel(v.g, g).max(rel(v.f, f)))
}

/// `|X(a) - X(b)| / |a - b|` for the planar map `X`.
fn pair_ratio(data: &HolomorphicData, a: Complex64, b: Complex64) -> Result<f64> {
    let xa = data.values(a)?.planar();
    let xb = data.values(b)?.planar();
    Ok((xa - xb).norm() / (a - b).norm())
}

fn injectivity_check(data: &HolomorphicData, samples: &[Complex64], seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1_0000_0000);
    let mut worst: Option<(f64, Complex64, Complex64)> = None;
    let mut status = CheckStatus::Pass;
    if samples.len() >= 2 {
        for _ in 0..INJECTIVITY_PAIRS {
            let i = rng.random_range(0..samples.len());
            let j = rng.random_range(0..samples.len());
            let (a, b) = (samples[i], samples[j]);
            if a == b {
                continue;
            }
            match pair_ratio(data, a, b) {
                Ok(v) if worst.is_none_or(|w| v < w.0) => worst = Some((v, a, b)),
                Ok(_) => {}
                Err(_) => {
                    worst = Some((f64::NAN, a, b));
                    status = CheckStatus::Fail;
                    break;
                }
            }
        }
    }
    if let Some((v, _, _)) = worst {
        if !(v > 0.0) {
            status = CheckStatus::Fail;
        }
    }
    Check {
        name: "injectivity".to_string(),
        status,
        worst_value: worst.map_or(f64::NAN, |w| w.0),
        tolerance: 0.0,
        location: worst.map(|w| Witness::Pair(w.1, w.2)),
    }
}

/// Distance from the image of circle `k` to `lambda + i mu` of the slit pair.
fn slit_constant_gap(sol: &AffineSphereSolution, k: usize) -> Result<f64> {
    let slit = &sol.data.slit;
    let n = sol.domain().n();
    // the slit constants are stored in domain order, exterior last
    let j = (k + n - 1) % n;
    let expected = Complex64::new(slit.lambda[j], slit.mu[j]);
    let got = *sol
        .singularity_estimates()
        .get(k)
        .ok_or(Error::IndexOutOfRange { index: k, max: n - 1 })?;
    Ok((got - expected).norm())
}
