use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sqkd_cli::config::parse_suites;
use sqkd_cli::{
    cmd_export, cmd_optimize, cmd_run, cmd_sweep, cmd_verify, validate_report_str, AttackSource,
    CliError, CommandOutput, Objective, OptimizeConfig, ParamSpec, PovmSource, RunConfig,
    SweepConfig, VerifyConfig, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION,
};

/// Information-disturbance verifier for one-qubit semiquantum key distribution.
///
/// Exit status: 0 no violation, 1 violation found, 2 input error.
/// SQKD_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "sqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed of every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Fixture (identity, forward-cnot, return-cz, partial-forward-cnot(θ),
    /// partial-return-cz(θ)), `random`, or an attack document.
    #[arg(long, conflicts_with = "family")]
    attack: Option<String>,
    /// Attack family (partial-forward-cnot, partial-return-cz, generator).
    #[arg(long)]
    family: Option<String>,
    /// Family parameter as k=v (k=a:b:n for sweeps).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Ancilla dimension for `random` and `generator`.
    #[arg(long, default_value_t = 2)]
    ancilla_dim: usize,
}

#[derive(Args)]
struct PovmArgs {
    /// z, x, computational, fourier, trivial, optimize, or a POVM document.
    #[arg(long, default_value = "optimize")]
    povm: String,
    /// Restarts of the measurement search.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one attack and measurement; writes a JSON report.
    Run {
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        povm: PovmArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a family parameter; writes a CSV table.
    Sweep {
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        povm: PovmArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Search attacks and measurements jointly; writes a JSON report.
    Optimize {
        /// max-gap or max-info.
        #[arg(long, default_value = "max-gap")]
        objective: String,
        /// Disturbance budget of max-info.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        ancilla_dim: usize,
        /// Restarts of the joint search.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Simplex iterations per restart.
        #[arg(long, default_value_t = 4000)]
        max_iterations: usize,
        /// Restarts of the final measurement search.
        #[arg(long, default_value_t = 32)]
        povm_restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run seeded verification suites; writes a JSON summary.
    Verify {
        /// lemma1, lemma2, theorem, proof-chain, sift-consistency, named, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write an attack document.
    Export {
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Re-validate a report produced by run, optimize or verify.
    Validate {
        /// Report file.
        report: PathBuf,
    },
}

fn parse_params(raw: &[String]) -> Result<Vec<ParamSpec>, CliError> {
    raw.iter().map(|s| s.parse()).collect()
}

fn attack_source(args: &AttackArgs, seed: u64) -> Result<AttackSource, CliError> {
    match (&args.attack, &args.family) {
        (Some(a), None) => {
            if !args.params.is_empty() {
                return Err(CliError::Input("--param requires --family".into()));
            }
            AttackSource::from_flag(a, args.ancilla_dim, seed)
        }
        (None, Some(f)) => {
            let mut params = Vec::new();
            for p in parse_params(&args.params)? {
                if p.is_range() {
                    return Err(CliError::Input(format!(
                        "--param {}: ranges are only allowed in sweep",
                        p.name
                    )));
                }
                params.push((p.name, p.values[0]));
            }
            Ok(AttackSource::Family {
                family: f.clone(),
                ancilla_dim: args.ancilla_dim,
                params,
            })
        }
        _ => Err(CliError::Input(
            "exactly one of --attack or --family is required".into(),
        )),
    }
}

fn execute(cmd: Command) -> Result<(CommandOutput, Option<PathBuf>), CliError> {
    Ok(match cmd {
        Command::Run {
            attack,
            povm,
            common,
        } => {
            let cfg = RunConfig {
                attack: attack_source(&attack, common.seed)?,
                povm: PovmSource::from_flag(&povm.povm)?,
                seed: common.seed,
                restarts: povm.restarts,
            };
            (cmd_run(&cfg)?, common.out)
        }
        Command::Sweep {
            attack,
            povm,
            common,
        } => {
            let family = match (&attack.family, &attack.attack) {
                (Some(f), None) => f.clone(),
                _ => return Err(CliError::Input("sweep requires --family".into())),
            };
            let cfg = SweepConfig {
                family,
                ancilla_dim: attack.ancilla_dim,
                params: parse_params(&attack.params)?,
                povm: PovmSource::from_flag(&povm.povm)?,
                seed: common.seed,
                restarts: povm.restarts,
            };
            (cmd_sweep(&cfg)?, common.out)
        }
        Command::Optimize {
            objective,
            epsilon,
            ancilla_dim,
            restarts,
            max_iterations,
            povm_restarts,
            common,
        } => {
            let cfg = OptimizeConfig {
                ancilla_dim,
                objective: objective.parse::<Objective>()?,
                epsilon,
                seed: common.seed,
                restarts,
                max_iterations,
                povm_restarts,
            };
            (cmd_optimize(&cfg)?, common.out)
        }
        Command::Verify {
            suite,
            trials,
            common,
        } => {
            let cfg = VerifyConfig {
                suites: parse_suites(&suite)?,
                trials,
                seed: common.seed,
            };
            (cmd_verify(&cfg)?, common.out)
        }
        Command::Export { attack, common } => {
            let a = attack_source(&attack, common.seed)?.load()?;
            (cmd_export(&a), common.out)
        }
        Command::Validate { report } => {
            let text = fs::read_to_string(&report)
                .map_err(|e| CliError::Io(format!("{}: {e}", report.display())))?;
            let kind = validate_report_str(&text)?;
            let out = CommandOutput {
                text: format!("{}: valid {kind} report\n", report.display()),
                violation: false,
            };
            (out, None)
        }
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SQKD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Input(format!("SQKD_THREADS=`{raw}` is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("SQKD_THREADS: {e}")))
}

fn emit(out: &CommandOutput, path: Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(&p, &out.text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT as u8
            } else {
                EXIT_OK as u8
            });
        }
    };
    let result = configure_threads()
        .and_then(|()| execute(cli.command))
        .and_then(|(out, path)| emit(&out, path).map(|()| out.violation));
    match result {
        Ok(false) => ExitCode::from(EXIT_OK as u8),
        Ok(true) => {
            eprintln!("sqkd: violation found");
            ExitCode::from(EXIT_VIOLATION as u8)
        }
        Err(e) => {
            eprintln!("sqkd: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
