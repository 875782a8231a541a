//! `tmpjump` command line: reads a run config, calls the library, and writes
//! the artifacts plus a `manifest.json` into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{DesignConfig, RunConfig};
use crate::dynamics::{simulate, JumpMetrics};
use crate::error::Error;
use crate::kinematics::TmpDesign;
use crate::optimize::{optimize_linear_design, Algorithm, OptResult, RunSummary};
use crate::output::to_json_string;
use crate::paleo::{read_measurements_csv, reduce_measurements};
use crate::stiffness::{force_curve, CurveMetrics, ForceModel};
use crate::studies::{dynamic_sweep, static_sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_NO_TAKEOFF: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ForceCurve,
    Jump,
    SweepStatic,
    SweepDynamic,
    OptimizeLinear,
    Paleo,
}

#[derive(Debug, Parser)]
#[command(name = "tmpjump", version, about = "Origami bellow jumper models")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Run config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for sweeps and optimization.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Compute(Error::NoTakeoff { .. }) => EXIT_NO_TAKEOFF,
            CliError::Compute(_) | CliError::Io(_) => EXIT_COMPUTE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Compute(Error::NoTakeoff { .. }) => "no_takeoff",
            CliError::Compute(_) => "computation",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Io(m) => m.clone(),
            CliError::Compute(e) => e.to_string(),
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "message": self.message(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    inputs_sha256: String,
    inputs: &'a T,
    outputs: &'a [String],
    jobs: Option<usize>,
    wall_time_s: f64,
}

/// Design in config units, as written to reports.
pub fn design_report(design: &TmpDesign) -> DesignConfig {
    DesignConfig {
        n_cells: design.n_cells,
        alpha_deg: design.alpha.to_degrees(),
        c_mm: design.c * 1e3,
        d_mm: design.d * 1e3,
        l_mm: design.l * 1e3,
        m_mm: design.m * 1e3,
        k_main_hat_n_per_rad: design.k_main_hat,
        k_sub_hat_n_per_rad: design.k_sub_hat,
        theta_m0_deg: Some(design.theta_m0.to_degrees()),
    }
}

#[derive(Serialize)]
struct JumpReport {
    #[serde(flatten)]
    metrics: JumpMetrics,
    force_clamped: bool,
}

#[derive(Serialize)]
struct OptReport<'a> {
    algorithm: Algorithm,
    design: DesignConfig,
    #[serde(rename = "error_N")]
    error: f64,
    #[serde(rename = "residual_N")]
    residual: f64,
    objective: f64,
    iterations: usize,
    evaluations: usize,
    starts: usize,
    converged: bool,
    runs: &'a [RunSummary],
}

impl<'a> From<&'a OptResult> for OptReport<'a> {
    fn from(r: &'a OptResult) -> Self {
        Self {
            algorithm: r.algorithm,
            design: design_report(&r.best_design),
            error: r.error,
            residual: r.constraint_residual,
            objective: r.objective,
            iterations: r.iterations,
            evaluations: r.evaluations,
            starts: r.starts,
            converged: r.converged,
            runs: &r.runs,
        }
    }
}

fn finish<T: Serialize>(
    outputs: &mut Outputs<'_>,
    args: &Args,
    digest: Sha256,
    inputs: &T,
    started: Instant,
) -> Result<(), CliError> {
    let written = outputs.written.clone();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: args.command,
        inputs_sha256: format!("{:x}", digest.finalize()),
        inputs,
        outputs: &written,
        jobs: args.jobs,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    outputs.write("manifest.json", &to_json_string(&manifest))
}

/// Runs one command. Artifacts land in `args.out`.
pub fn run(args: &Args) -> Result<(), CliError> {
    let started = Instant::now();
    let text = std::fs::read(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let text =
        String::from_utf8(text).map_err(|_| CliError::Config("config is not UTF-8".into()))?;
    let config = RunConfig::parse(&text).map_err(config_err)?;
    let mut digest = Sha256::new();
    digest.update(text.as_bytes());

    // Resolve before touching the output directory so a bad config leaves
    // nothing behind.
    enum Resolved {
        ForceCurve(crate::config::ForceCurveInputs),
        Jump(Box<crate::dynamics::JumperConfig>),
        Sweep(crate::studies::SweepSpec, bool),
        Optimize(crate::config::OptimizeInputs),
        Paleo(Vec<crate::paleo::CreaseMeasurement>),
    }
    let resolved = match args.command {
        Command::ForceCurve => {
            Resolved::ForceCurve(config.resolve_force_curve().map_err(config_err)?)
        }
        Command::Jump => Resolved::Jump(Box::new(config.resolve_jump().map_err(config_err)?)),
        Command::SweepStatic => {
            Resolved::Sweep(config.resolve_sweep(false).map_err(config_err)?, false)
        }
        Command::SweepDynamic => {
            Resolved::Sweep(config.resolve_sweep(true).map_err(config_err)?, true)
        }
        Command::OptimizeLinear => {
            Resolved::Optimize(config.resolve_optimize().map_err(config_err)?)
        }
        Command::Paleo => {
            let dir = args.config.parent().unwrap_or(Path::new("."));
            let path = config.resolve_paleo(dir).map_err(config_err)?;
            let bytes = std::fs::read(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            digest.update(&bytes);
            Resolved::Paleo(read_measurements_csv(bytes.as_slice()).map_err(config_err)?)
        }
    };
    if args.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;
    let mut out = Outputs {
        dir: &args.out,
        written: Vec::new(),
    };
    match resolved {
        Resolved::ForceCurve(inputs) => {
            let mut model =
                ForceModel::with_profile(inputs.design, inputs.profile).map_err(config_err)?;
            model.force_cap = inputs.force_cap;
            let curve =
                force_curve(&model, inputs.dy_max, inputs.n_samples).map_err(CliError::Compute)?;
            let metrics = CurveMetrics::of(&curve).map_err(CliError::Compute)?;
            out.write("force_curve.csv", &curve.to_csv())?;
            out.write("metrics.json", &to_json_string(&metrics))?;
            finish(&mut out, args, digest, &inputs, started)
        }
        Resolved::Jump(jumper) => {
            let (trace, metrics) = simulate(&jumper).map_err(CliError::Compute)?;
            out.write("trace.csv", &trace.to_csv())?;
            let report = JumpReport {
                metrics,
                force_clamped: trace.clamped,
            };
            out.write("metrics.json", &to_json_string(&report))?;
            finish(&mut out, args, digest, &*jumper, started)
        }
        Resolved::Sweep(spec, dynamic) => {
            let result = if dynamic {
                dynamic_sweep(&spec, args.jobs)
            } else {
                static_sweep(&spec, args.jobs)
            }
            .map_err(CliError::Compute)?;
            out.write("sweep.csv", &result.to_csv())?;
            out.write("curves.csv", &result.curves_csv())?;
            finish(&mut out, args, digest, &spec, started)?;
            if result.failures() == result.points.len() {
                let first = result.points[0].error.clone().unwrap_or_default();
                return Err(CliError::Compute(Error::InvalidSpec(format!(
                    "every sweep point failed; first: {first}"
                ))));
            }
            Ok(())
        }
        Resolved::Optimize(inputs) => {
            let options = inputs.options();
            let results = inputs
                .algorithms
                .iter()
                .map(|&alg| optimize_linear_design(&inputs.spec, alg, &options, args.jobs))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Compute)?;
            let reports: Vec<OptReport<'_>> = results.iter().map(OptReport::from).collect();
            out.write("optimize.json", &to_json_string(&reports))?;
            finish(&mut out, args, digest, &inputs, started)
        }
        Resolved::Paleo(measurements) => {
            let report = reduce_measurements(&measurements).map_err(CliError::Compute)?;
            out.write("paleo.json", &to_json_string(&report))?;
            finish(&mut out, args, digest, &measurements, started)
        }
    }
}

/// Parses `argv`, runs, reports errors on stderr, and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
