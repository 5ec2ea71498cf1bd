//! Machine-readable report documents and their re-validation.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sqkd_core::eavesdropper::RestartStat;
use sqkd_core::tradeoff::SLACK_TOL;
use sqkd_core::{verify_tradeoff, JointDistribution, StepSlacks, SuiteSummary, TradeoffReport};

use crate::error::CliError;
use crate::format::{matrix_rows, AttackDocument, MatrixRows, PovmDocument};

/// Relative tolerance when a parsed report is recomputed.
pub const REVALIDATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub cli: String,
    pub core: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            cli: env!("CARGO_PKG_VERSION").to_string(),
            core: sqkd_core::VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub c: [MatrixRows; 2],
    pub p0: JointDistribution,
    pub p0_marginal: [f64; 2],
    pub lhs_overlap: f64,
    pub fidelity_sum: f64,
    pub slacks: StepSlacks,
    pub min_slack: f64,
    pub min_slack_step: String,
    pub equality_error: f64,
}

/// Every field of a [`TradeoffReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffDocument {
    pub p_ctrl: f64,
    pub p_sift: f64,
    pub p_a: [f64; 2],
    pub joint: JointDistribution,
    pub info: f64,
    pub holevo: f64,
    pub lemma1: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub trace: TraceDocument,
}

impl From<&TradeoffReport> for TradeoffDocument {
    fn from(r: &TradeoffReport) -> Self {
        let (step, slack) = r.trace.slacks.min_inequality();
        TradeoffDocument {
            p_ctrl: r.p_ctrl,
            p_sift: r.p_sift,
            p_a: r.p_a,
            joint: r.joint.clone(),
            info: r.info,
            holevo: r.holevo,
            lemma1: r.lemma1,
            rhs: r.rhs,
            gap: r.gap,
            holds: r.holds,
            trace: TraceDocument {
                c: [matrix_rows(&r.trace.c[0]), matrix_rows(&r.trace.c[1])],
                p0: r.trace.p0.clone(),
                p0_marginal: r.trace.p0_marginal,
                lhs_overlap: r.trace.lhs_overlap,
                fidelity_sum: r.trace.fidelity_sum,
                slacks: r.trace.slacks,
                min_slack: slack,
                min_slack_step: step.to_string(),
                equality_error: r.trace.slacks.equality_error(),
            },
        }
    }
}

impl TradeoffDocument {
    /// Internal consistency that holds for any honest report.
    fn check_consistency(&self) -> Result<(), CliError> {
        let expect = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Input(format!("report inconsistent: {what}")))
            }
        };
        expect(
            self.holds == (self.gap >= -SLACK_TOL),
            "holds disagrees with gap",
        )?;
        expect(
            (self.gap - (self.rhs - self.info)).abs() <= REVALIDATION_TOL,
            "gap differs from rhs - info",
        )?;
        expect(
            (0.0..=1.0).contains(&self.p_ctrl) && (0.0..=1.0).contains(&self.p_sift),
            "probabilities outside [0, 1]",
        )
    }
}

/// Statistics of a POVM search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmSearchDocument {
    pub seed: u64,
    pub restarts: usize,
    pub converged: bool,
    pub best_restart: usize,
    pub restart_stats: Vec<RestartStat>,
}

/// Output of `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub versions: Versions,
    pub seed: u64,
    pub attack_source: String,
    pub povm_source: String,
    pub attack: AttackDocument,
    pub povm: PovmDocument,
    pub result: TradeoffDocument,
    pub povm_search: Option<PovmSearchDocument>,
}

impl RunReport {
    /// Rebuilds attack and POVM from the document, recomputes the
    /// trade-off and compares it with the stored numbers.
    pub fn validate(&self) -> Result<(), CliError> {
        self.result.check_consistency()?;
        let a = self
            .attack
            .to_attack()
            .map_err(|e| e.context("report attack"))?;
        let e = self.povm.to_povm().map_err(|e| e.context("report POVM"))?;
        let fresh = TradeoffDocument::from(&verify_tradeoff(&a, &e)?);
        compare_values(
            &serde_json::to_value(&self.result).expect("serializable"),
            &serde_json::to_value(&fresh).expect("serializable"),
            "result",
        )
    }
}

/// One restart of the joint attack-and-measurement search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRestart {
    pub index: usize,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Output of `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub command: String,
    pub versions: Versions,
    pub seed: u64,
    pub objective: String,
    pub epsilon: Option<f64>,
    pub penalty_weight: f64,
    pub ancilla_dim: usize,
    pub best_restart: usize,
    pub best_objective: f64,
    pub best_params: Vec<f64>,
    pub restarts: Vec<SearchRestart>,
    pub attack: AttackDocument,
    pub povm: PovmDocument,
    pub result: TradeoffDocument,
    pub povm_search: PovmSearchDocument,
}

impl OptimizeReport {
    pub fn validate(&self) -> Result<(), CliError> {
        let run = RunReport {
            command: self.command.clone(),
            versions: self.versions.clone(),
            seed: self.seed,
            attack_source: String::new(),
            povm_source: String::new(),
            attack: self.attack.clone(),
            povm: self.povm.clone(),
            result: self.result.clone(),
            povm_search: None,
        };
        run.validate()?;
        let best = self.restarts.get(self.best_restart).ok_or_else(|| {
            CliError::Input("report inconsistent: best_restart out of range".into())
        })?;
        if best.objective != self.best_objective
            || self
                .restarts
                .iter()
                .any(|r| r.objective > self.best_objective)
        {
            return Err(CliError::Input(
                "report inconsistent: best_objective is not the best restart".into(),
            ));
        }
        Ok(())
    }
}

/// Output of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub command: String,
    pub versions: Versions,
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteSummary>,
    pub violations: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn validate(&self) -> Result<(), CliError> {
        let total: usize = self.suites.iter().map(|s| s.violations).sum();
        if total != self.violations || self.passed != (total == 0) {
            return Err(CliError::Input(
                "report inconsistent: violation totals disagree".into(),
            ));
        }
        for s in &self.suites {
            if s.violations > s.trials || s.min_slack.is_some() != s.worst_trial.is_some() {
                return Err(CliError::Input(format!(
                    "report inconsistent: suite {}",
                    s.suite
                )));
            }
        }
        Ok(())
    }
}

/// Parses any report produced by this tool and validates it.
pub fn validate_report_str(text: &str) -> Result<String, CliError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("report: {e}")))?;
    let command = v
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Input("report: missing `command`".into()))?
        .to_string();
    let parse_err = |e: serde_json::Error| CliError::Input(format!("{command} report: {e}"));
    match command.as_str() {
        "run" => serde_json::from_value::<RunReport>(v)
            .map_err(parse_err)?
            .validate()?,
        "optimize" => serde_json::from_value::<OptimizeReport>(v)
            .map_err(parse_err)?
            .validate()?,
        "verify" => serde_json::from_value::<VerifyReport>(v)
            .map_err(parse_err)?
            .validate()?,
        other => {
            return Err(CliError::Input(format!(
                "report: unknown command `{other}`"
            )))
        }
    }
    Ok(command)
}

fn numbers_close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REVALIDATION_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Structural equality with numeric tolerance; reports the first mismatch path.
fn compare_values(stored: &Value, fresh: &Value, path: &str) -> Result<(), CliError> {
    let mismatch = || CliError::Input(format!("report does not re-validate at `{path}`"));
    match (stored, fresh) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (
                a.as_f64().ok_or_else(mismatch)?,
                b.as_f64().ok_or_else(mismatch)?,
            );
            numbers_close(a, b).then_some(()).ok_or_else(mismatch)
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(mismatch());
            }
            a.iter()
                .zip(b)
                .enumerate()
                .try_for_each(|(i, (x, y))| compare_values(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(b)) => {
            if a.len() != b.len() {
                return Err(mismatch());
            }
            a.iter().try_for_each(|(k, x)| {
                let y = b.get(k).ok_or_else(mismatch)?;
                compare_values(x, y, &format!("{path}.{k}"))
            })
        }
        (a, b) if a == b => Ok(()),
        _ => Err(mismatch()),
    }
}
