//! Subcommand implementations. Each returns its full output text so that
//! callers decide where it goes; nothing here touches stdout or the clock.

use rand::Rng;
use rayon::prelude::*;
use sqkd_core::attacks::parameterized_len;
use sqkd_core::eavesdropper::{
    computational_factor_params, factors_from_params, information_from_params, Ensemble,
};
use sqkd_core::protocol::disturbance;
use sqkd_core::simplex::{self, SimplexOptions};
use sqkd_core::suite::trial_rng;
use sqkd_core::tradeoff::{EQUALITY_TOL, SLACK_TOL};
use sqkd_core::{
    accessible_information, eve_information, parameterized_attack, povm_from_factors, run_suite,
    theorem_rhs, verify_tradeoff, AttackFamily, AttackModel, Povm,
};

use crate::config::{
    assign_params, optimizer_config, Objective, OptimizeConfig, PovmSource, RunConfig, SweepConfig,
    VerifyConfig,
};
use crate::error::CliError;
use crate::format::{significant, to_json, AttackDocument, PovmDocument};
use crate::report::{
    OptimizeReport, PovmSearchDocument, RunReport, SearchRestart, TradeoffDocument, VerifyReport,
    Versions,
};

/// Penalty weight of the `max-info` objective.
pub const PENALTY_WEIGHT: f64 = 1e3;

/// Header of the sweep table.
pub const SWEEP_HEADER: &str = "family,theta,p_ctrl,p_sift,info_lower,rhs,gap,holds";

/// Significant digits of sweep table numbers.
pub const SWEEP_DIGITS: usize = 12;

/// Text produced by a command and whether it found a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub violation: bool,
}

/// Resolves the measurement for attack `a`, optimizing if requested.
fn resolve_povm(
    a: &AttackModel,
    source: &PovmSource,
    seed: u64,
    restarts: usize,
) -> Result<(Povm, Option<PovmSearchDocument>), CliError> {
    if let Some(e) = source.load_fixed(a.ancilla_dim())? {
        return Ok((e, None));
    }
    let r = accessible_information(a, &optimizer_config(seed, restarts))?;
    let search = PovmSearchDocument {
        seed,
        restarts,
        converged: r.converged,
        best_restart: r.best_restart,
        restart_stats: r.restarts,
    };
    Ok((r.povm, Some(search)))
}

pub fn cmd_run(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = cfg.attack.load()?;
    let (e, povm_search) = resolve_povm(&a, &cfg.povm, cfg.seed, cfg.restarts)?;
    let result = TradeoffDocument::from(&verify_tradeoff(&a, &e)?);
    // a failing intermediate step is reported even when the bound holds
    let violation = !result.holds
        || result.trace.equality_error > EQUALITY_TOL
        || result.trace.min_slack < -SLACK_TOL;
    let report = RunReport {
        command: "run".into(),
        versions: Versions::current(),
        seed: cfg.seed,
        attack_source: cfg.attack.to_string(),
        povm_source: cfg.povm.to_string(),
        attack: AttackDocument::from_attack(&a),
        povm: PovmDocument::from_povm(&e),
        result,
        povm_search,
    };
    Ok(CommandOutput {
        text: to_json(&report),
        violation,
    })
}

/// Full parameter vectors of the sweep grid and the swept value of each.
fn sweep_grid(fam: &AttackFamily, cfg: &SweepConfig) -> Result<Vec<(f64, Vec<f64>)>, CliError> {
    let ranges: Vec<usize> = (0..cfg.params.len())
        .filter(|&i| cfg.params[i].is_range())
        .collect();
    if ranges.len() > 1 {
        return Err(CliError::Input(
            "sweep: at most one --param may be a range".into(),
        ));
    }
    let swept = match ranges.first() {
        Some(&i) => i,
        None => cfg
            .params
            .iter()
            .position(|p| p.name == "theta")
            .or((!cfg.params.is_empty()).then_some(0))
            .ok_or_else(|| CliError::Input("sweep: no --param given".into()))?,
    };
    cfg.params[swept]
        .values
        .iter()
        .map(|&x| {
            let given: Vec<(String, f64)> = cfg
                .params
                .iter()
                .enumerate()
                .map(|(i, p)| (p.name.clone(), if i == swept { x } else { p.values[0] }))
                .collect();
            Ok((x, assign_params(fam, &given)?))
        })
        .collect()
}

pub fn cmd_sweep(cfg: &SweepConfig) -> Result<CommandOutput, CliError> {
    let fam = AttackFamily::by_name(&cfg.family, cfg.ancilla_dim)?;
    let grid = sweep_grid(&fam, cfg)?;
    // reject out-of-bounds grid points before the parallel pass
    for (_, params) in &grid {
        fam.build(params)?;
    }
    let rows: Vec<(String, bool)> = grid
        .par_iter()
        .map(|(x, params)| -> Result<(String, bool), CliError> {
            let a = fam.build(params)?;
            let (e, _) = resolve_povm(&a, &cfg.povm, cfg.seed, cfg.restarts)?;
            let r = verify_tradeoff(&a, &e)?;
            let num = |v: f64| significant(v, SWEEP_DIGITS);
            let row = format!(
                "{},{},{},{},{},{},{},{}",
                fam.name(),
                num(*x),
                num(r.p_ctrl),
                num(r.p_sift),
                num(r.info),
                num(r.rhs),
                num(r.gap),
                r.holds
            );
            Ok((row, r.holds))
        })
        .collect::<Result<_, _>>()?;
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    for (row, _) in &rows {
        text.push_str(row);
        text.push('\n');
    }
    Ok(CommandOutput {
        text,
        violation: rows.iter().any(|(_, holds)| !holds),
    })
}

/// Value maximized by `optimize` at a point of the joint search space.
fn search_objective(x: &[f64], d: usize, m: usize, cfg: &OptimizeConfig) -> f64 {
    let n_attack = parameterized_len(d);
    let Ok(a) = parameterized_attack(&x[..n_attack], d) else {
        return f64::NEG_INFINITY;
    };
    let info = information_from_params(&Ensemble::from_attack(&a), &x[n_attack..], m);
    let dist = disturbance(&a);
    match cfg.objective {
        Objective::MaxGap => match theorem_rhs(dist.p_ctrl, dist.p_sift) {
            Ok(rhs) => info - rhs,
            Err(_) => f64::NEG_INFINITY,
        },
        Objective::MaxInfo => {
            info - PENALTY_WEIGHT * (dist.p_ctrl + dist.p_sift - cfg.epsilon).max(0.0)
        }
    }
}

fn search_start(index: usize, d: usize, m: usize, seed: u64) -> Vec<f64> {
    let n_attack = parameterized_len(d);
    if index == 0 {
        // identity attack, computational-basis measurement
        let mut x = vec![0.0; n_attack];
        x.extend(computational_factor_params(d, m));
        return x;
    }
    let mut rng = trial_rng(seed, index);
    (0..n_attack + 2 * d * d * m)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect()
}

/// Searches attacks and Eve's measurement jointly.
pub fn cmd_optimize(cfg: &OptimizeConfig) -> Result<CommandOutput, CliError> {
    let d = cfg.ancilla_dim;
    if !(1..=sqkd_core::attacks::MAX_RANDOM_ANCILLA_DIM).contains(&d) {
        return Err(CliError::Input(format!("--ancilla-dim {d} out of range")));
    }
    if cfg.restarts == 0 || cfg.povm_restarts == 0 {
        return Err(CliError::Input("--restarts must be at least 1".into()));
    }
    if cfg.objective == Objective::MaxInfo && !(0.0..=1.0).contains(&cfg.epsilon) {
        return Err(CliError::Input("--epsilon must lie in [0, 1]".into()));
    }
    let m = d * d;
    let n_attack = parameterized_len(d);
    let opts = SimplexOptions {
        max_iterations: cfg.max_iterations,
        ..SimplexOptions::default()
    };
    let runs: Vec<(Vec<f64>, SearchRestart)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let x0 = search_start(index, d, m, cfg.seed);
            let r = simplex::minimize(|x| -search_objective(x, d, m, cfg), &x0, &opts);
            let stat = SearchRestart {
                index,
                objective: -r.value,
                iterations: r.iterations,
                converged: r.converged,
            };
            (r.x, stat)
        })
        .collect();
    let mut best = 0;
    for (i, (_, s)) in runs.iter().enumerate() {
        if s.objective > runs[best].1.objective {
            best = i;
        }
    }
    let best_params = runs[best].0.clone();
    let a = parameterized_attack(&best_params[..n_attack], d)?;

    // keep the better of the jointly found measurement and a fresh search
    let joint_povm = factors_from_params(&best_params[n_attack..], d, m)
        .and_then(|f| povm_from_factors(&f))
        .ok();
    let fresh = accessible_information(&a, &optimizer_config(cfg.seed, cfg.povm_restarts))?;
    let povm = match joint_povm {
        Some(e) if eve_information(&a, &e)? > fresh.bits => e,
        _ => fresh.povm.clone(),
    };
    let result = TradeoffDocument::from(&verify_tradeoff(&a, &povm)?);
    let violation = !result.holds;
    let report = OptimizeReport {
        command: "optimize".into(),
        versions: Versions::current(),
        seed: cfg.seed,
        objective: match cfg.objective {
            Objective::MaxGap => "max-gap".into(),
            Objective::MaxInfo => "max-info".into(),
        },
        epsilon: (cfg.objective == Objective::MaxInfo).then_some(cfg.epsilon),
        penalty_weight: PENALTY_WEIGHT,
        ancilla_dim: d,
        best_restart: best,
        best_objective: runs[best].1.objective,
        best_params,
        restarts: runs.into_iter().map(|(_, s)| s).collect(),
        attack: AttackDocument::from_attack(&a),
        povm: PovmDocument::from_povm(&povm),
        result,
        povm_search: PovmSearchDocument {
            seed: cfg.seed,
            restarts: cfg.povm_restarts,
            converged: fresh.converged,
            best_restart: fresh.best_restart,
            restart_stats: fresh.restarts,
        },
    };
    Ok(CommandOutput {
        text: to_json(&report),
        violation,
    })
}

pub fn cmd_verify(cfg: &VerifyConfig) -> Result<CommandOutput, CliError> {
    if cfg.suites.is_empty() {
        return Err(CliError::Input("verify: no suite selected".into()));
    }
    let suites = cfg
        .suites
        .iter()
        .map(|&s| run_suite(s, cfg.trials, cfg.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let violations = suites.iter().map(|s| s.violations).sum();
    let report = VerifyReport {
        command: "verify".into(),
        versions: Versions::current(),
        seed: cfg.seed,
        trials: cfg.trials,
        suites,
        violations,
        passed: violations == 0,
    };
    Ok(CommandOutput {
        text: to_json(&report),
        violation: violations > 0,
    })
}

/// Writes the attack as a document that `--attack <file>` accepts.
pub fn cmd_export(a: &AttackModel) -> CommandOutput {
    CommandOutput {
        text: to_json(&AttackDocument::from_attack(a)),
        violation: false,
    }
}
