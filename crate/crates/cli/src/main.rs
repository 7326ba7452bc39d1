use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hessone::config::{AnnulusSpec, Mode, RunConfig};
use hessone::run::{self, parse_complex, parse_tol, SampleOutputs, TolKey};
use hessone::{CliError, SolutionBundle};
use hessone_core::domain::ModuliPoint;
use hessone_core::verify::VerifyOptions;

/// Global solutions of det D^2 phi = 1 on the plane minus finitely many points.
#[derive(Parser)]
#[command(name = "hessone", version)]
struct Cli {
    /// Output file (solution, CSV or report depending on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampling seed for verification.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override, key one of ma, boundary, period. Repeatable.
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Vec<(TolKey, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the slit maps and write a solution file.
    Construct(ConstructArgs),
    /// Evaluate the surface on a polar grid and write CSV and/or OBJ.
    Sample(SampleArgs),
    /// Run the verification checks and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Inner radius of the annulus.
    #[arg(long)]
    r: Option<f64>,
    /// Puncture of the annulus as re,im.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z0: Option<[f64; 2]>,
    /// JSON moduli point.
    #[arg(long)]
    moduli: Option<PathBuf>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    collocation: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    solution: PathBuf,
    /// JSON run configuration supplying grid and outputs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    radial_steps: Option<usize>,
    #[arg(long)]
    angular_steps: Option<usize>,
    #[arg(long)]
    boundary_offset: Option<f64>,
    /// OBJ mesh output.
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    solution: PathBuf,
    /// Number of interior samples.
    #[arg(long)]
    samples: Option<usize>,
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<i32, CliError> {
    let mut cfg = match &a.config {
        Some(p) => run::read_json::<RunConfig>(p)?,
        None => RunConfig::new(a.mode.unwrap_or(Mode::Disk)),
    };
    if let Some(m) = a.mode {
        cfg.mode = m;
    }
    if a.r.is_some() || a.z0.is_some() {
        let r = a.r.or(cfg.annulus.map(|s| s.r));
        let z0 = a.z0.or(cfg.annulus.map(|s| s.z0));
        match (r, z0) {
            (Some(r), Some(z0)) => cfg.annulus = Some(AnnulusSpec { r, z0 }),
            _ => return Err(CliError::Invalid("annulus needs both --r and --z0".into())),
        }
    }
    if let Some(p) = &a.moduli {
        cfg.moduli = Some(run::read_json::<ModuliPoint>(p)?);
    }
    if let Some(n) = a.degree {
        cfg.degree = n;
    }
    if let Some(m) = a.collocation {
        cfg.collocation = m;
    }
    let out = cli
        .out
        .clone()
        .or(cfg.outputs.solution.clone())
        .ok_or_else(|| CliError::Invalid("construct needs --out".into()))?;
    run::construct(&cfg, &out)?;
    Ok(0)
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<i32, CliError> {
    let cfg = a.config.as_deref().map(run::read_json::<RunConfig>).transpose()?;
    let mut grid = cfg.as_ref().map(|c| c.grid).unwrap_or_default();
    if let Some(n) = a.radial_steps {
        grid.radial_steps = n;
    }
    if let Some(n) = a.angular_steps {
        grid.angular_steps = n;
    }
    if let Some(h) = a.boundary_offset {
        grid.boundary_offset = h;
    }
    grid.validate()?;
    let outputs = SampleOutputs {
        csv: cli.out.clone().or(cfg.as_ref().and_then(|c| c.outputs.csv.clone())),
        obj: a.obj.clone().or(cfg.as_ref().and_then(|c| c.outputs.obj.clone())),
    };
    if outputs.csv.is_none() && outputs.obj.is_none() {
        return Err(CliError::Invalid("sample needs --out and/or --obj".into()));
    }
    let bundle = SolutionBundle::load(&a.solution)?;
    run::sample(&bundle, &grid, &outputs)?;
    Ok(0)
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<i32, CliError> {
    let bundle = SolutionBundle::load(&a.solution)?;
    let mut opts = VerifyOptions::default();
    if let Some(s) = cli.seed {
        opts.seed = s;
    }
    if let Some(n) = a.samples {
        opts.samples = n;
    }
    for &(key, v) in &cli.tol {
        match key {
            TolKey::Ma => opts.ma_tol = Some(v),
            TolKey::Boundary => opts.boundary_tol = Some(v),
            TolKey::Period => opts.period_tol = Some(v),
        }
    }
    let report = run::verify(&bundle, &opts, cli.out.as_deref())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Construct(a) => construct(&cli, a),
        Command::Sample(a) => sample(&cli, a),
        Command::Verify(a) => verify(&cli, a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
