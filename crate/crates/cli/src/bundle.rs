//! Solution files.

use std::fs;
use std::path::Path;

use hessone_core::sphere::make_data;
use hessone_core::{AffineSphereSolution, Complex64, HolomorphicData, SlitPair};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBundle {
    pub slit_pair: SlitPair,
    pub base_point: Complex64,
    /// Boundary images, exterior circle first.
    pub singularities: Vec<[f64; 2]>,
    /// Factor applied to `F = p - q`; anything but 1 is deliberately corrupted
    /// data.
    #[serde(default = "unit")]
    pub f_scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl SolutionBundle {
    /// Builds the solution and records its singular points.
    pub fn construct(pair: SlitPair) -> Result<(Self, AffineSphereSolution), CliError> {
        let sol = AffineSphereSolution::new(make_data(pair).map_err(CliError::Solver)?).map_err(CliError::Solver)?;
        let singularities = sol.singularities().map_err(CliError::Solver)?;
        let bundle = SolutionBundle {
            slit_pair: sol.data.slit.clone(),
            base_point: sol.base_point,
            singularities: singularities.iter().map(|p| [p.re, p.im]).collect(),
            f_scale: sol.data.f_scale,
        };
        Ok((bundle, sol))
    }

    /// Rebuilds the solution without the contraction screen, so that
    /// corrupted files still reach verification.
    pub fn solution(&self) -> Result<AffineSphereSolution, CliError> {
        let data = HolomorphicData::unchecked(self.slit_pair.clone(), self.f_scale).map_err(CliError::Input)?;
        AffineSphereSolution::with_base_point(data, self.base_point).map_err(CliError::Input)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("bundle serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}
