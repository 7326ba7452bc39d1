//! The three commands.

use std::fs;
use std::path::{Path, PathBuf};

use hessone_core::verify::{verify_with, CheckStatus, VerificationReport, VerifyOptions};

use crate::bundle::SolutionBundle;
use crate::config::{GridSpec, RunConfig};
use crate::export::{csv, obj, sample_surface};
use crate::CliError;

/// Largest tolerated share of grid points that cannot be sampled.
pub const MAX_SKIPPED_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolKey {
    Ma,
    Boundary,
    Period,
}

/// Parses `key=value` with key one of `ma`, `boundary`, `period`.
pub fn parse_tol(s: &str) -> Result<(TolKey, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let key = match k.trim() {
        "ma" => TolKey::Ma,
        "boundary" => TolKey::Boundary,
        "period" => TolKey::Period,
        other => return Err(format!("unknown tolerance key {other:?} (ma, boundary, period)")),
    };
    let val: f64 = v.trim().parse().map_err(|e| format!("bad tolerance {v:?}: {e}"))?;
    if !(val > 0.0 && val.is_finite()) {
        return Err(format!("tolerance must be positive, got {val}"));
    }
    Ok((key, val))
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let re = a.trim().parse().map_err(|e| format!("bad real part {a:?}: {e}"))?;
    let im = b.trim().parse().map_err(|e| format!("bad imaginary part {b:?}: {e}"))?;
    Ok([re, im])
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn construct(cfg: &RunConfig, out: &Path) -> Result<SolutionBundle, CliError> {
    let pair = cfg.slit_pair()?;
    let (bundle, _) = SolutionBundle::construct(pair)?;
    bundle.save(out)?;
    println!("kind: {:?}", bundle.slit_pair.kind);
    if bundle.slit_pair.degree > 0 {
        println!(
            "degree {} boundary residual {:.3e}",
            bundle.slit_pair.degree, bundle.slit_pair.residual
        );
    }
    for (k, p) in bundle.singularities.iter().enumerate() {
        println!("singularity[{k}] = ({:.15}, {:.15})", p[0] + 0.0, p[1] + 0.0);
    }
    println!("wrote {}", out.display());
    Ok(bundle)
}

#[derive(Debug, Clone, Default)]
pub struct SampleOutputs {
    pub csv: Option<PathBuf>,
    pub obj: Option<PathBuf>,
}

/// Returns the number of rows written.
pub fn sample(bundle: &SolutionBundle, grid: &GridSpec, outputs: &SampleOutputs) -> Result<usize, CliError> {
    grid.validate()?;
    let sol = bundle.solution()?;
    let surface = sample_surface(&sol, grid);
    let total = surface.samples.len();
    let skipped = surface.skipped();
    if let Some(p) = &outputs.csv {
        write(p, &csv(&surface))?;
        println!("wrote {}", p.display());
    }
    if let Some(p) = &outputs.obj {
        write(p, &obj(&surface))?;
        println!("wrote {}", p.display());
    }
    println!("{} rows, {skipped} of {total} grid points skipped", total - skipped);
    if skipped as f64 > MAX_SKIPPED_SHARE * total as f64 {
        return Err(CliError::Failed(format!(
            "{skipped} of {total} grid points could not be evaluated"
        )));
    }
    Ok(total - skipped)
}

pub fn verify(bundle: &SolutionBundle, opts: &VerifyOptions, out: Option<&Path>) -> Result<VerificationReport, CliError> {
    let sol = bundle.solution()?;
    let report = verify_with(&sol, opts);
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    for c in &report.checks {
        if c.status != CheckStatus::Pass {
            eprintln!(
                "{:?} {}: {:.3e} (tolerance {:.1e}) at {:?}",
                c.status, c.name, c.worst_value, c.tolerance, c.location
            );
        }
    }
    let passed = report.checks.iter().filter(|c| c.status == CheckStatus::Pass).count();
    eprintln!("{passed} of {} checks passed", report.checks.len());
    Ok(report)
}
