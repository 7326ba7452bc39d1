//! Run configuration.

use std::path::PathBuf;

use hessone_core::domain::moduli_to_domain;
use hessone_core::{CircularDomain, Complex64, ModuliPoint, SlitPair};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_GRID_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Disk,
    Annulus,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub r: f64,
    pub z0: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub radial_steps: usize,
    pub angular_steps: usize,
    pub boundary_offset: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radial_steps: 50,
            angular_steps: 64,
            boundary_offset: 1e-4,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.radial_steps < MIN_GRID_STEPS || self.angular_steps < MIN_GRID_STEPS {
            return Err(CliError::Invalid(format!(
                "grid needs at least {MIN_GRID_STEPS} radial and angular steps, got {} x {}",
                self.radial_steps, self.angular_steps
            )));
        }
        if !(self.boundary_offset > 0.0 && self.boundary_offset < 0.1) {
            return Err(CliError::Invalid(format!(
                "boundary_offset must lie in (0, 0.1), got {}",
                self.boundary_offset
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Outputs {
    pub solution: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub obj: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub moduli: Option<ModuliPoint>,
    #[serde(default)]
    pub annulus: Option<AnnulusSpec>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// 0 picks eight nodes per unknown.
    #[serde(default)]
    pub collocation: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_degree() -> usize {
    24
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            moduli: None,
            annulus: None,
            degree: default_degree(),
            collocation: 0,
            grid: GridSpec::default(),
            outputs: Outputs::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (self.mode, &self.moduli, &self.annulus) {
            (Mode::Disk, None, None) => {}
            (Mode::Disk, _, _) => {
                return Err(CliError::Invalid("mode disk takes neither moduli nor annulus".into()));
            }
            (Mode::Annulus, None, Some(_)) => {}
            (Mode::Annulus, _, _) => {
                return Err(CliError::Invalid("mode annulus needs annulus (r, z0) and no moduli".into()));
            }
            (Mode::Numeric, Some(_), None) | (Mode::Numeric, None, Some(_)) => {}
            (Mode::Numeric, _, _) => {
                return Err(CliError::Invalid("mode numeric needs exactly one of moduli and annulus".into()));
            }
        }
        if let Some(m) = &self.moduli {
            m.validate()?;
        }
        if let Some(a) = &self.annulus {
            annulus_domain(a)?;
        }
        if self.mode == Mode::Numeric && self.degree == 0 {
            return Err(CliError::Invalid("degree must be positive".into()));
        }
        self.grid.validate()
    }

    /// Builds the slit maps described by the configuration.
    pub fn slit_pair(&self) -> Result<SlitPair, CliError> {
        self.validate()?;
        let pair = match self.mode {
            Mode::Disk => SlitPair::disk(),
            Mode::Annulus => {
                let a = self.annulus.expect("validated");
                SlitPair::annulus(a.r, Complex64::new(a.z0[0], a.z0[1]))?
            }
            Mode::Numeric => {
                let d = match (&self.moduli, &self.annulus) {
                    (Some(m), _) => moduli_to_domain(m)?,
                    (None, Some(a)) => annulus_domain(a)?,
                    _ => unreachable!("validated"),
                };
                SlitPair::numeric(&d, self.degree, self.collocation).map_err(CliError::Solver)?
            }
        };
        Ok(pair)
    }
}

fn annulus_domain(a: &AnnulusSpec) -> Result<CircularDomain, CliError> {
    let z0 = Complex64::new(a.z0[0], a.z0[1]);
    if !(a.r > 0.0 && a.r < 1.0) || !(z0.norm() > a.r && z0.norm() < 1.0) {
        return Err(CliError::Invalid(format!(
            "annulus needs 0 < r < |z0| < 1, got r = {}, z0 = {}",
            a.r, z0
        )));
    }
    Ok(CircularDomain::annulus(a.r, z0)?)
}
