//! `verify`, `converge` and `diverge`.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fockbound_core::verifier::{
    convergence_curve, divergence_witness, run_full_suite, CheckResult,
};
use fockbound_core::{build_basis, OrthonormalSystem};

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{
    converge_csv, diverge_csv, report_file, timing_file, to_json, write_atomic, CurveRecord,
    Report, Timing, WitnessRecord, SCHEMA_VERSION,
};

pub const OUT_ENV: &str = "FOCKBOUND_OUT";
pub const DEFAULT_OUT: &str = "fockbound-out";
pub const FINAL_ERROR_TOL: f64 = 1e-12;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const MIN_GROWTH: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(
    name = "fockbound",
    version,
    about = "Numeric checks for quadratic operators on truncated bosonic Fock space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full verification suite.
    Verify(RunArgs),
    /// Tabulate partial-sum errors for each [[converge]] block.
    Converge(RunArgs),
    /// Tabulate divergence witnesses for each [[diverge]] block.
    Diverge(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides FOCKBOUND_OUT and the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress per-check lines.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(#[from] fockbound_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
}

pub fn output_dir(args: &RunArgs, env: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    args.out
        .clone()
        .or(env)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn check_line(c: &CheckResult) -> String {
    format!(
        "{} {} {:.6e} {:.6e}",
        c.name,
        if c.passed { "PASS" } else { "FAIL" },
        c.residual,
        c.tolerance
    )
}

struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    fn create(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Write {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes).map_err(|source| CliError::Write { path, source })
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run_verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let checks = run_full_suite(cfg.d, cfg.n_max, cfg.seed, &cfg.tolerances)?;
    Ok(report("verify", cfg, checks))
}

fn run_converge(
    cfg: &ExperimentConfig,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<Report, CliError> {
    if cfg.converge.is_empty() {
        return Err(ConfigError::Invalid("no [[converge]] blocks".into()).into());
    }
    let mut checks = Vec::new();
    let mut records = Vec::new();
    for block in &cfg.converge {
        let d = block.d(cfg);
        let basis = build_basis(d, block.n_max(cfg))?;
        let coeff = block.profile.build(d, cfg.seed, &block.name)?;
        let phi = block.state.build(&basis, cfg.seed, &block.name)?;
        let curve = convergence_curve(
            block.family,
            &coeff,
            &OrthonormalSystem::canonical(d),
            &phi,
            &block.grid(cfg),
            cfg.seed,
        )?;
        let csv = format!("converge-{}.csv", block.name);
        files.push((csv.clone(), converge_csv(&curve)));
        checks.push(CheckResult::new(
            format!("{}.final", block.name),
            curve.final_error(),
            FINAL_ERROR_TOL,
        ));
        records.push(CurveRecord {
            name: block.name.clone(),
            csv,
            curve,
        });
    }
    let mut r = report("converge", cfg, checks);
    r.convergence = records;
    Ok(r)
}

fn run_diverge(
    cfg: &ExperimentConfig,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<Report, CliError> {
    if cfg.diverge.is_empty() {
        return Err(ConfigError::Invalid("no [[diverge]] blocks".into()).into());
    }
    let mut checks = Vec::new();
    let mut records = Vec::new();
    for block in &cfg.diverge {
        let coeff = block.profile.build(block.d(), cfg.seed, &block.name)?;
        let curve = divergence_witness(block.family, &coeff, &block.m_grid)?;
        let csv = format!("diverge-{}.csv", block.name);
        files.push((csv.clone(), diverge_csv(&curve)));
        let increasing = if curve.strictly_increasing() {
            0.0
        } else {
            1.0
        };
        checks.push(CheckResult::new(
            format!("{}.increasing", block.name),
            increasing,
            0.0,
        ));
        checks.push(CheckResult::new(
            format!("{}.growth", block.name),
            (MIN_GROWTH - curve.growth_factor()).max(0.0),
            0.0,
        ));
        checks.push(CheckResult::new(
            format!("{}.closed_form", block.name),
            curve.max_closed_form_residual(),
            CLOSED_FORM_TOL,
        ));
        records.push(WitnessRecord {
            name: block.name.clone(),
            csv,
            curve,
        });
    }
    let mut r = report("diverge", cfg, checks);
    r.divergence = records;
    Ok(r)
}

fn report(command: &str, cfg: &ExperimentConfig, checks: Vec<CheckResult>) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        config: cfg.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        convergence: Vec::new(),
        divergence: Vec::new(),
    }
}

/// Runs one subcommand and returns the report and the directory it was
/// written to.
pub fn execute(command: &Command, env_out: Option<PathBuf>) -> Result<(Report, PathBuf), CliError> {
    let start = Instant::now();
    let (name, args) = match command {
        Command::Verify(a) => ("verify", a),
        Command::Converge(a) => ("converge", a),
        Command::Diverge(a) => ("diverge", a),
    };
    let cfg = load(args)?;
    let mut files = Vec::new();
    let report = match command {
        Command::Verify(_) => run_verify(&cfg)?,
        Command::Converge(_) => run_converge(&cfg, &mut files)?,
        Command::Diverge(_) => run_diverge(&cfg, &mut files)?,
    };
    let out = Outputs::create(output_dir(args, env_out, &cfg))?;
    for (file, bytes) in &files {
        out.write(file, bytes)?;
    }
    out.write(&report_file(name), &to_json(&report))?;
    let timing = Timing {
        schema_version: SCHEMA_VERSION,
        command: name.to_string(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    out.write(&timing_file(name), &to_json(&timing))?;
    Ok((report, out.dir))
}

/// Runs the parsed command, prints check lines and maps the outcome to an
/// exit code.
pub fn run(cli: &Cli) -> u8 {
    let quiet = match &cli.command {
        Command::Verify(a) | Command::Converge(a) | Command::Diverge(a) => a.quiet,
    };
    match execute(&cli.command, std::env::var_os(OUT_ENV).map(PathBuf::from)) {
        Ok((report, dir)) => {
            if !quiet {
                for c in &report.checks {
                    println!("{}", check_line(c));
                }
                let failed = report.checks.iter().filter(|c| !c.passed).count();
                println!(
                    "{} checks, {} failed; report in {}",
                    report.checks.len(),
                    failed,
                    dir.join(report_file(&report.command)).display()
                );
            }
            if report.passed {
                exit::SUCCESS
            } else {
                exit::CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("fockbound: {e}");
            exit::CONFIG_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(out: Option<&str>) -> RunArgs {
        RunArgs {
            config: PathBuf::from("c.toml"),
            out: out.map(PathBuf::from),
            seed: None,
            quiet: true,
        }
    }

    fn cfg(dir: Option<&str>) -> ExperimentConfig {
        ExperimentConfig {
            d: 2,
            n_max: 2,
            seed: 1,
            output_dir: dir.map(PathBuf::from),
            tolerances: Default::default(),
            converge: vec![],
            diverge: vec![],
        }
    }

    #[test]
    fn output_dir_precedence() {
        let env = Some(PathBuf::from("env"));
        assert_eq!(
            output_dir(&args(Some("flag")), env.clone(), &cfg(Some("file"))),
            PathBuf::from("flag")
        );
        assert_eq!(
            output_dir(&args(None), env, &cfg(Some("file"))),
            PathBuf::from("env")
        );
        assert_eq!(
            output_dir(&args(None), None, &cfg(Some("file"))),
            PathBuf::from("file")
        );
        assert_eq!(
            output_dir(&args(None), None, &cfg(None)),
            PathBuf::from(DEFAULT_OUT)
        );
    }

    #[test]
    fn check_line_format() {
        let c = CheckResult::new("ccr.creators_commute", 0.0, 1e-11);
        assert_eq!(
            check_line(&c),
            "ccr.creators_commute PASS 0.000000e0 1.000000e-11"
        );
        let c = CheckResult::new("x", 2.0, 1.0);
        assert!(check_line(&c).contains(" FAIL "));
    }
}
