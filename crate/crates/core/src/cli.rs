//! Command-line front end: `synth`, `verify`, `simulate` and `roa`.
//!
//! Exit codes: 0 success, 1 usage/IO/configuration/dimension error,
//! 2 infeasible or counterexample, 3 iteration budget or undecided verifier,
//! 4 simulation divergence, 5 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};

use crate::cegis::{self, CegisOutcome};
use crate::config::{write_file, ControllerFile, ProblemConfig, RoaFile, RunReport, ScenarioConfig};
use crate::error::Error;
use crate::learner::roa_for_fixed_gain;
use crate::model::FaultSet;
use crate::sim::{metrics, simulate, MetricsReport};
use crate::verifier::{verify, VerifierResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Environment variable holding the log filter (e.g. `debug`, `pftc=trace`).
pub const LOG_ENV: &str = "PFTC_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "pftc",
    version,
    about = "Counterexample-guided synthesis of passive fault-tolerant saturated state feedback",
    after_help = "Exit codes: 0 ok, 1 usage/IO error, 2 infeasible or counterexample, 3 budget or undecided, \
                  4 divergence, 5 numerical failure.\nLog level: -v/-vv or the PFTC_LOG environment variable."
)]
pub struct Cli {
    /// Worker threads for the verifier (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a certified controller; writes the controller and `<out>.report.toml`.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a stored controller over the whole domain and fault set.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        controller: PathBuf,
    },
    /// Simulate a controller under a fault scenario; writes a CSV trace and `<out>.metrics.toml`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        controller: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Largest certified invariant ellipsoid of a fixed gain.
    Roa {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        controller: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit code of an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Dimension { .. } | Error::Contract(_) | Error::Io(_) | Error::Parse(_) => EXIT_USAGE,
        Error::Undecided { .. } => EXIT_UNDECIDED,
        Error::Divergence { .. } => EXIT_DIVERGED,
        Error::NumericalFailure(_) | Error::Extraction { .. } | Error::NonFinite { .. } => EXIT_NUMERICAL,
    }
}

/// An error tagged with the stage that produced it.
struct Failure {
    stage: &'static str,
    error: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for crate::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn report(cmd: &str, r: Result<i32, Failure>) -> i32 {
    match r {
        Ok(code) => code,
        Err(f) => {
            eprintln!("pftc {cmd}: {}: {}", f.stage, f.error);
            exit_code(&f.error)
        }
    }
}

/// `<out>` with its extension replaced by `suffix` (`auv2.toml` → `auv2.report.toml`).
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

/// Runs the loop and writes the controller (on convergence) and the run report.
pub fn cmd_synth(config: &Path, out: &Path) -> i32 {
    report("synth", synth(config, out))
}

fn synth(config_path: &Path, out: &Path) -> Result<i32, Failure> {
    let config = ProblemConfig::load(config_path).stage("config")?;
    let problem = config.problem().stage("problem setup")?;
    let outcome = cegis::run(&problem, &config.cegis, config.initial_sample()).stage("synthesis")?;
    let report = RunReport::new(&outcome, &problem, &config);
    write_file(&sibling(out, "report.toml"), &report.to_toml().stage("report")?).stage("report")?;
    println!("{}", outcome.summary());
    match &outcome {
        CegisOutcome::Converged { controller, iterations, .. } => {
            let file = ControllerFile::from_controller(controller, problem.model.name(), *iterations, Some(&config));
            write_file(out, &file.to_toml().stage("controller file")?).stage("controller file")?;
            println!("controller written to {}", out.display());
            Ok(EXIT_OK)
        }
        CegisOutcome::Infeasible { .. } => Ok(EXIT_REFUTED),
        CegisOutcome::Budget { .. } | CegisOutcome::Undecided { .. } => Ok(EXIT_UNDECIDED),
    }
}

/// Re-verifies a stored controller: 0 certificate, 2 counterexample.
pub fn cmd_verify(config: &Path, controller: &Path) -> i32 {
    report("verify", verify_cmd(config, controller))
}

fn verify_cmd(config_path: &Path, controller_path: &Path) -> Result<i32, Failure> {
    let config = ProblemConfig::load(config_path).stage("config")?;
    let problem = config.problem().stage("problem setup")?;
    let file = ControllerFile::load(controller_path).stage("controller file")?;
    file.check_dims(problem.model.n(), problem.model.p()).stage("controller file")?;
    let candidate = file.candidate().stage("controller file")?;
    match verify(&problem, &candidate, &config.cegis).stage("verification")? {
        VerifierResult::Certificate { lambda_star, bound, certified, evaluations } => {
            println!(
                "certificate: lambda* = {lambda_star:e}, certified bound = {bound:e}, {evaluations} evaluations{}",
                if certified { "" } else { " (estimate-based Lipschitz constants)" }
            );
            Ok(EXIT_OK)
        }
        VerifierResult::Counterexample { pair, value, subproblem, sign_index, .. } => {
            println!("counterexample: lambda = {value:e} (subproblem {subproblem}, sign pattern {sign_index})");
            println!("  x = {:?}", pair.x.as_slice());
            println!("  phi = {:?}", pair.phi.as_slice());
            Ok(EXIT_REFUTED)
        }
    }
}

/// Simulates a scenario; writes the trace CSV and a metrics report.
pub fn cmd_simulate(config: &Path, controller: &Path, scenario: &Path, out: &Path) -> i32 {
    report("simulate", simulate_cmd(config, controller, scenario, out))
}

fn simulate_cmd(config_path: &Path, controller_path: &Path, scenario_path: &Path, out: &Path) -> Result<i32, Failure> {
    let config = ProblemConfig::load(config_path).stage("config")?;
    let model = config.model().stage("problem setup")?;
    let file = ControllerFile::load(controller_path).stage("controller file")?;
    file.check_dims(model.n(), model.p()).stage("controller file")?;
    let feedback = file.feedback().stage("controller file")?;
    let scenario = ScenarioConfig::load(scenario_path).stage("scenario")?;
    let faults = FaultSet::new(model.p()).stage("scenario")?;
    let schedule = scenario.schedule(&faults).stage("scenario")?;
    let x0 = scenario.initial_state(model.n()).stage("scenario")?;
    let trace =
        simulate(&model, &feedback, &x0, &schedule, &scenario.reference, scenario.horizon).stage("simulation")?;
    let comments = vec![
        "u = sat(K (x - x_ref)) with the saturation bounds in physical input units".to_string(),
        "[scenario]".to_string(),
        scenario.to_toml().stage("scenario")?,
        "[config]".to_string(),
        config.to_toml().stage("config")?,
    ];
    let mut buf = Vec::new();
    trace.write_csv(&mut buf, &comments).stage("trace")?;
    write_file(out, &String::from_utf8_lossy(&buf)).stage("trace")?;
    let report = metrics(&trace).stage("metrics")?;
    let doc = MetricsFile { metrics: report.clone(), config };
    write_file(&sibling(out, "metrics.toml"), &toml::to_string(&doc).map_err(Error::from).stage("metrics")?)
        .stage("metrics")?;
    for ph in &report.phases {
        println!(
            "phase {}: t in [{:.2}, {:.2}] error initial {:.4e} max {:.4e} final {:.4e} steady {:.4e} saturation {:?}",
            ph.phase,
            ph.t_start,
            ph.t_end,
            ph.initial_error,
            ph.max_error,
            ph.final_error,
            ph.steady_state_error,
            ph.saturation_duty
        );
    }
    println!("{} samples written to {}", trace.len(), out.display());
    Ok(EXIT_OK)
}

#[derive(serde::Serialize)]
struct MetricsFile {
    metrics: MetricsReport,
    config: ProblemConfig,
}

/// Fixed-gain invariant ellipsoid; exit 2 when no ellipsoid exists.
pub fn cmd_roa(config: &Path, controller: &Path, out: &Path) -> i32 {
    report("roa", roa_cmd(config, controller, out))
}

fn roa_cmd(config_path: &Path, controller_path: &Path, out: &Path) -> Result<i32, Failure> {
    let config = ProblemConfig::load(config_path).stage("config")?;
    let problem = config.problem().stage("problem setup")?;
    let file = ControllerFile::load(controller_path).stage("controller file")?;
    file.check_dims(problem.model.n(), problem.model.p()).stage("controller file")?;
    let k = file.gain().stage("controller file")?;
    let outcome = roa_for_fixed_gain(&k, &problem, &config.cegis).stage("region of attraction")?;
    let roa = RoaFile::new(&k, &outcome, problem.model.name(), &config).stage("region of attraction")?;
    write_file(out, &roa.to_toml().stage("roa file")?).stage("roa file")?;
    if roa.feasible {
        println!("invariant ellipsoid: trace(Q) = {:e} after {} iterations", roa.trace_q, roa.iterations);
        Ok(EXIT_OK)
    } else {
        println!("no invariant ellipsoid for this gain (infeasible after {} iterations)", roa.iterations);
        Ok(EXIT_REFUTED)
    }
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let env = env_logger::Env::new().filter_or(LOG_ENV, default);
    let _ = env_logger::Builder::from_env(env).format_timestamp_millis().try_init();
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("pftc: --threads must be at least 1");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match &cli.command {
        Command::Synth { config, out } => cmd_synth(config, out),
        Command::Verify { config, controller } => cmd_verify(config, controller),
        Command::Simulate { config, controller, scenario, out } => cmd_simulate(config, controller, scenario, out),
        Command::Roa { config, controller, out } => cmd_roa(config, controller, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(main_with_args(["pftc", "synth"]), EXIT_USAGE);
        assert_eq!(main_with_args(["pftc", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["pftc", "--help"]), EXIT_OK);
    }

    #[test]
    fn missing_files_exit_with_one() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("missing.toml");
        assert_eq!(cmd_synth(&missing, &dir.path().join("out.toml")), EXIT_USAGE);
    }

    #[test]
    fn exit_codes_follow_error_kinds() {
        assert_eq!(exit_code(&Error::Divergence { step: 3, time: 0.03 }), EXIT_DIVERGED);
        assert_eq!(exit_code(&Error::NumericalFailure("x".into())), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::Undecided { best: 1.0, bound: -1.0, gap: 2.0, evaluations: 1 }), EXIT_UNDECIDED);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("out/auv2.toml"), "report.toml"), PathBuf::from("out/auv2.report.toml"));
        assert_eq!(sibling(Path::new("trace.csv"), "metrics.toml"), PathBuf::from("trace.metrics.toml"));
    }
}
