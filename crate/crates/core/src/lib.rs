//! Construction and verification of the global solutions of the Hessian one
//! equation `phi_xx * phi_yy - phi_xy^2 = 1` on the plane with finitely many
//! points removed.
//!
//! The pipeline runs from a once-punctured circular domain to the canonical
//! slit maps `p`, `q`, from there to the holomorphic data `G = p + q`,
//! `F = p - q`, and through the conformal representation of parabolic affine
//! spheres to the graph `phi` and its derivatives.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command-line
//! front end live in the `hessone` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod domain;
pub mod error;
mod lstsq;
pub mod quad;
pub mod slitmap;
pub mod sphere;
pub mod theta;
pub mod verify;

pub use num_complex::Complex64;

pub use domain::{Circle, CircularDomain, ModuliPoint};
pub use error::{Error, Result};
pub use slitmap::{SlitKind, SlitPair};
pub use sphere::{AffineSphereSolution, EquiaffineTransform, HolomorphicData, SurfaceSample};
pub use theta::ThetaParams;
pub use verify::{CheckStatus, VerificationReport, VerifyOptions};
