//! Command configurations and flag parsing helpers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sqkd_core::attacks::{named_attack, MAX_RANDOM_ANCILLA_DIM};
use sqkd_core::suite::trial_rng;
use sqkd_core::{
    random_attack, AttackFamily, AttackModel, NamedAttack, OptimizerConfig, Povm, Suite,
};

use crate::error::CliError;
use crate::format::{parse_attack_file, parse_povm_file};

/// `k=v` or `k=a:b:n` (n points from a to b inclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub values: Vec<f64>,
}

impl ParamSpec {
    pub fn is_range(&self) -> bool {
        self.values.len() > 1
    }
}

fn parse_number(s: &str, what: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("{what}: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Input(format!("{what}: `{s}` is not finite")));
    }
    Ok(x)
}

impl FromStr for ParamSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (name, rhs) = s
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--param `{s}`: expected k=v or k=a:b:n")))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(CliError::Input(format!("--param `{s}`: empty name")));
        }
        let parts: Vec<&str> = rhs.split(':').collect();
        let values = match parts.as_slice() {
            [v] => vec![parse_number(v, name)?],
            [a, b, n] => {
                let a = parse_number(a, name)?;
                let b = parse_number(b, name)?;
                let n: usize = n.trim().parse().map_err(|_| {
                    CliError::Input(format!(
                        "--param `{s}`: point count `{n}` is not an integer"
                    ))
                })?;
                match n {
                    0 => return Err(CliError::Input(format!("--param `{s}`: zero points"))),
                    1 => vec![a],
                    _ => (0..n)
                        .map(|i| {
                            if i == n - 1 {
                                b
                            } else {
                                a + (b - a) * i as f64 / (n - 1) as f64
                            }
                        })
                        .collect(),
                }
            }
            _ => {
                return Err(CliError::Input(format!(
                    "--param `{s}`: expected k=v or k=a:b:n"
                )))
            }
        };
        Ok(ParamSpec {
            name: name.to_string(),
            values,
        })
    }
}

/// Where the attack comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackSource {
    Named(NamedAttack),
    Random {
        ancilla_dim: usize,
        seed: u64,
    },
    File(PathBuf),
    Family {
        family: String,
        ancilla_dim: usize,
        params: Vec<(String, f64)>,
    },
}

impl AttackSource {
    /// Interprets an `--attack` value: a fixture name, `random`, or a file.
    pub fn from_flag(value: &str, ancilla_dim: usize, seed: u64) -> Result<Self, CliError> {
        if value == "random" {
            return Ok(AttackSource::Random { ancilla_dim, seed });
        }
        match value.parse::<NamedAttack>() {
            Ok(n) => Ok(AttackSource::Named(n)),
            Err(_) if Path::new(value).is_file() => Ok(AttackSource::File(PathBuf::from(value))),
            Err(e) => Err(CliError::Input(format!(
                "--attack `{value}`: {e}; not a fixture, `random`, or an existing file"
            ))),
        }
    }

    pub fn load(&self) -> Result<AttackModel, CliError> {
        match self {
            AttackSource::Named(n) => Ok(named_attack(*n)),
            AttackSource::Random { ancilla_dim, seed } => {
                if !(1..=MAX_RANDOM_ANCILLA_DIM).contains(ancilla_dim) {
                    return Err(CliError::Input(format!(
                        "--ancilla-dim {ancilla_dim} outside 1..={MAX_RANDOM_ANCILLA_DIM}"
                    )));
                }
                Ok(random_attack(*ancilla_dim, &mut trial_rng(*seed, 0))?)
            }
            AttackSource::File(p) => parse_attack_file(p),
            AttackSource::Family {
                family,
                ancilla_dim,
                params,
            } => {
                let fam = AttackFamily::by_name(family, *ancilla_dim)?;
                let values = assign_params(&fam, params)?;
                Ok(fam.build(&values)?)
            }
        }
    }
}

impl fmt::Display for AttackSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSource::Named(n) => write!(f, "{n}"),
            AttackSource::Random { ancilla_dim, seed } => {
                write!(f, "random(ancilla_dim={ancilla_dim}, seed={seed})")
            }
            AttackSource::File(p) => write!(f, "file:{}", p.display()),
            AttackSource::Family { family, params, .. } => {
                let args: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "{family}({})", args.join(", "))
            }
        }
    }
}

/// Orders named values by the family's parameter list; every parameter
/// must be given exactly once.
pub fn assign_params(fam: &AttackFamily, given: &[(String, f64)]) -> Result<Vec<f64>, CliError> {
    for (k, _) in given {
        if !fam.param_names().iter().any(|n| n == k) {
            return Err(CliError::Input(format!(
                "family `{}` has no parameter `{k}` (expected {})",
                fam.name(),
                fam.param_names().join(", ")
            )));
        }
    }
    fam.param_names()
        .iter()
        .map(|name| {
            let mut hits = given.iter().filter(|(k, _)| k == name);
            match (hits.next(), hits.next()) {
                (Some((_, v)), None) => Ok(*v),
                (None, _) => Err(CliError::Input(format!(
                    "family `{}`: parameter `{name}` not given",
                    fam.name()
                ))),
                (Some(_), Some(_)) => Err(CliError::Input(format!(
                    "family `{}`: parameter `{name}` given twice",
                    fam.name()
                ))),
            }
        })
        .collect()
}

/// Where Eve's measurement comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmSource {
    Named(String),
    File(PathBuf),
    Optimize,
}

const POVM_NAMES: [&str; 5] = ["z", "computational", "x", "fourier", "trivial"];

impl PovmSource {
    pub fn from_flag(value: &str) -> Result<Self, CliError> {
        if value == "optimize" {
            Ok(PovmSource::Optimize)
        } else if POVM_NAMES.contains(&value) {
            Ok(PovmSource::Named(value.to_string()))
        } else if Path::new(value).is_file() {
            Ok(PovmSource::File(PathBuf::from(value)))
        } else {
            Err(CliError::Input(format!(
                "--povm `{value}`: expected optimize, {}, or an existing file",
                POVM_NAMES.join(", ")
            )))
        }
    }

    /// Fixed measurement for dimension `d`, or `None` for [`PovmSource::Optimize`].
    pub fn load_fixed(&self, d: usize) -> Result<Option<Povm>, CliError> {
        match self {
            PovmSource::Named(n) => Ok(Some(Povm::named(n, d)?)),
            PovmSource::File(p) => {
                let e = parse_povm_file(p)?;
                if e.dim() != d {
                    return Err(CliError::Input(format!(
                        "{}: POVM acts on dimension {}, attack ancilla has {d}",
                        p.display(),
                        e.dim()
                    )));
                }
                Ok(Some(e))
            }
            PovmSource::Optimize => Ok(None),
        }
    }
}

impl fmt::Display for PovmSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PovmSource::Named(n) => f.write_str(n),
            PovmSource::File(p) => write!(f, "file:{}", p.display()),
            PovmSource::Optimize => f.write_str("optimize"),
        }
    }
}

/// Settings of the POVM search used wherever `--povm optimize` applies.
pub fn optimizer_config(seed: u64, restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        restarts,
        ..OptimizerConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub attack: AttackSource,
    pub povm: PovmSource,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: String,
    pub ancilla_dim: usize,
    pub params: Vec<ParamSpec>,
    pub povm: PovmSource,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Maximize `info − rhs`; a positive optimum would be a counterexample.
    MaxGap,
    /// Maximize `info` subject to `p_ctrl + p_sift ≤ ε` by penalty.
    MaxInfo,
}

impl FromStr for Objective {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "max-gap" => Ok(Objective::MaxGap),
            "max-info" => Ok(Objective::MaxInfo),
            _ => Err(CliError::Input(format!(
                "--objective `{s}`: expected max-gap or max-info"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    pub ancilla_dim: usize,
    pub objective: Objective,
    pub epsilon: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Restarts of the final POVM search on the best attack.
    pub povm_restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub trials: usize,
    pub seed: u64,
}

/// `all` or a single suite name.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, CliError> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    s.parse::<Suite>()
        .map(|x| vec![x])
        .map_err(|e| CliError::Input(format!("--suite: {e}")))
}
