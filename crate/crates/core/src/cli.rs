//! Command-line interface. `run` returns the process exit status:
//! 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::body::{sample_theta, BallModel, Envelope, GridSpec, SampleOptions};
use crate::error::{Error, Result};
use crate::export::{write_csv, write_off, write_ply};
use crate::numerics::{solve_focal_embedding, ModelConstants, Tolerances, BODY_A_SQ};
use crate::skeleton::FocalSkeleton;
use crate::slice::{slice_model, Format, SliceSpec};
use crate::verify::{run_verification, Suite, VerifyOptions};

pub const SEED_ENV: &str = "PEABODY4D_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "peabody4d", version, about = "Build and verify a 4-dimensional body of constant width")]
pub struct Cli {
    /// TOML file of defaults; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the model constants.
    Constants(ConstantsArgs),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Write boundary samples as CSV.
    Sample(SampleArgs),
    /// Slice the body by a hyperplane and write a mesh or point cloud.
    Slice(SliceArgs),
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub json: bool,
    /// Ellipse parameter a^2 (> 1); 1.5 gives the constant-width body.
    #[arg(long)]
    pub a2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, focal, skeleton or body.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override `class=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    #[arg(long)]
    pub a2: Option<f64>,
    /// Triangle grid `HXxHT` of the discrete ball model.
    #[arg(long)]
    pub grid: Option<String>,
    /// Report path; the report goes to stdout when absent and `--json` is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the summary table.
    #[arg(long)]
    pub json: bool,
    /// Record wall times (makes the report nondeterministic).
    #[arg(long)]
    pub timings: bool,
    /// Scale the radius laws by 1 + EPS (negative control).
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(short = 'n', long = "samples")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// `nx,ny,nz,nw,offset`: the hyperplane `n . p = offset`.
    #[arg(long, allow_hyphen_values = true)]
    pub hyperplane: String,
    /// Latitude bands of the ray sphere (at least 8).
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<String>,
}

/// Keys accepted in the config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub suite: Option<String>,
    pub grid: Option<String>,
    pub a2: Option<f64>,
    pub format: Option<String>,
    pub resolution: Option<usize>,
    /// Tolerance overrides by class name.
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
    }
}

/// Seed from the flag, then the environment, then the config file, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env.map(str::trim).filter(|v| !v.is_empty()) {
        return v.parse().map_err(|_| Error::InvalidParameter(format!("{SEED_ENV}=`{v}` is not an integer")));
    }
    Ok(file.unwrap_or(0))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match cli.command {
        Command::Constants(a) => constants(&a, &file),
        Command::Verify(a) => verify(&a, &file, env_seed.as_deref()),
        Command::Sample(a) => sample(&a, &file, env_seed.as_deref()),
        Command::Slice(a) => slice(&a, &file),
    }
}

fn grid_of(flag: &Option<String>, file: &FileConfig) -> Result<GridSpec> {
    match flag.as_ref().or(file.grid.as_ref()) {
        Some(g) => g.parse(),
        None => Ok(GridSpec::default()),
    }
}

/// Writer for `path`, or stdout.
fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct ConstantsOut {
    #[serde(flatten)]
    consts: ModelConstants,
    exact_forms: BTreeMap<&'static str, &'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver_residuals: Option<[f64; 4]>,
}

fn constants(a: &ConstantsArgs, file: &FileConfig) -> Result<i32> {
    let a_sq = a.a2.or(file.a2).unwrap_or(BODY_A_SQ);
    let (consts, residuals) = if a_sq == BODY_A_SQ {
        (ModelConstants::body(), None)
    } else {
        (ModelConstants::general(a_sq)?, Some(solve_focal_embedding(a_sq)?.residuals(a_sq)))
    };
    let exact_forms = if consts.is_body() { ModelConstants::exact_forms() } else { BTreeMap::new() };
    let mut out = sink(&None)?;
    if a.json {
        let doc = ConstantsOut { consts, exact_forms, solver_residuals: residuals };
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("constants serialize"))?;
    } else {
        let rows = [
            ("a_sq", consts.a_sq),
            ("x0", consts.x0),
            ("x1", consts.x1),
            ("y0", consts.y0),
            ("z1", consts.z1),
            ("width", consts.width),
            ("focus_e", consts.focus_e),
            ("focus_h", consts.focus_h),
            ("r_splus_e", consts.r_splus_e),
            ("r_splus_h", consts.r_splus_h),
        ];
        for (name, v) in rows {
            match exact_forms.get(name) {
                Some(f) => writeln!(out, "{name:<10} {v:.17}  = {f}")?,
                None => writeln!(out, "{name:<10} {v:.17}")?,
            }
        }
        if let Some(r) = residuals {
            writeln!(out, "solver residuals {:.3e} {:.3e} {:.3e} {:.3e}", r[0], r[1], r[2], r[3])?;
        }
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<i32> {
    let mut tolerances = Tolerances::default();
    for (name, v) in &file.tol {
        tolerances.set(name.parse()?, *v)?;
    }
    for spec in &a.tol {
        tolerances.apply_override(spec)?;
    }
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        suite: a.suite.as_ref().or(file.suite.as_ref()).map(|s| s.parse()).transpose()?.unwrap_or(Suite::All),
        samples: a.samples.or(file.samples).unwrap_or(defaults.samples),
        seed: resolve_seed(a.seed, env_seed, file.seed)?,
        tolerances,
        grid: grid_of(&a.grid, file)?,
        a_sq: a.a2.or(file.a2).unwrap_or(BODY_A_SQ),
        perturb: a.perturb.unwrap_or(0.0),
        timings: a.timings,
    };
    let report = run_verification(&opts)?;
    let json = report.to_json();
    if let Some(p) = &a.out {
        let mut w = sink(&Some(p.clone()))?;
        writeln!(w, "{json}")?;
        w.flush()?;
    }
    let mut out = sink(&None)?;
    if a.json {
        writeln!(out, "{json}")?;
    } else {
        for c in &report.checks {
            let cmp = match c.comparison {
                crate::verify::Comparison::AtMost => "<=",
                crate::verify::Comparison::Exceeds => "> ",
            };
            writeln!(
                out,
                "{} {:<28} {:>11.3e} {cmp} {:<9.1e} n={}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.samples
            )?;
        }
        writeln!(out, "{}", if report.pass { "all checks passed" } else { "verification failed" })?;
    }
    out.flush()?;
    for c in report.failing() {
        eprintln!("failed check: {} ({})", c.name, c.detail.as_deref().unwrap_or(&c.anchor));
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}

fn sample(a: &SampleArgs, file: &FileConfig, env_seed: Option<&str>) -> Result<i32> {
    let format: Format =
        a.format.as_ref().or(file.format.as_ref()).map(|s| s.parse()).transpose()?.unwrap_or(Format::Csv);
    if format != Format::Csv {
        return Err(Error::InvalidParameter("samples are written as csv only".into()));
    }
    let n = a.samples.or(file.samples).unwrap_or(1000);
    let seed = resolve_seed(a.seed, env_seed, file.seed)?;
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let env = Envelope::new(&skel)?;
    let mut opts = SampleOptions::new(n, seed);
    opts.slack = true;
    let samples = sample_theta(&env, &opts)?;
    let mut out = sink(&a.out)?;
    write_csv(&mut out, &samples)?;
    out.flush()?;
    Ok(EXIT_OK)
}

fn slice(a: &SliceArgs, file: &FileConfig) -> Result<i32> {
    let (normal, offset) = SliceSpec::parse_hyperplane(&a.hyperplane)?;
    let format: Format =
        a.format.as_ref().or(file.format.as_ref()).map(|s| s.parse()).transpose()?.unwrap_or(Format::Off);
    let spec = SliceSpec::new(normal, offset, a.resolution.or(file.resolution).unwrap_or(32), format)?;
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let model = BallModel::build(&skel, grid_of(&a.grid, file)?)?;
    let s = slice_model(&model, &spec)?;
    let mut out = sink(&a.out)?;
    match format {
        Format::Off => write_off(&mut out, &s)?,
        Format::Ply => write_ply(&mut out, &s)?,
        Format::Csv => write_csv(&mut out, &s.samples)?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}
