//! Command-line harness for the semiquantum key distribution trade-off:
//! attack and measurement documents, single runs, parameter sweeps, joint
//! attack searches and seeded verification suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod report;

pub use commands::{cmd_export, cmd_optimize, cmd_run, cmd_sweep, cmd_verify, CommandOutput};
pub use config::{
    AttackSource, Objective, OptimizeConfig, ParamSpec, PovmSource, RunConfig, SweepConfig,
    VerifyConfig,
};
pub use error::CliError;
pub use format::{parse_attack_file, parse_povm_file, AttackDocument, PovmDocument};
pub use report::{validate_report_str, OptimizeReport, RunReport, VerifyReport};

/// Exit status: success and no violation.
pub const EXIT_OK: i32 = 0;
/// Exit status: a bound or proof step was violated.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit status: unusable input.
pub const EXIT_INPUT: i32 = 2;
