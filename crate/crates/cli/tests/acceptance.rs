//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line under plain `cargo test`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sqkd_cli::config::parse_suites;
use sqkd_cli::{
    cmd_run, cmd_sweep, cmd_verify, AttackSource, ParamSpec, PovmSource, RunConfig, RunReport,
    SweepConfig, VerifyConfig, VerifyReport,
};
use sqkd_core::attacks::controlled;
use sqkd_core::eavesdropper::attack_holevo;
use sqkd_core::tradeoff::lemma1_bound;
use sqkd_core::{
    accessible_information, lemma2_check, mutual_information, AttackModel, JointDistribution,
    NamedAttack, OperatorMatrix, OptimizerConfig, Povm, StateVector, Suite, SuiteSummary, Tensor,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_named(attack: NamedAttack, povm: &str) -> Result<RunReport, String> {
    let out = cmd_run(&RunConfig {
        attack: AttackSource::Named(attack),
        povm: PovmSource::from_flag(povm).map_err(|e| e.to_string())?,
        seed: 0,
        restarts: OptimizerConfig::default().restarts,
    })
    .map_err(|e| e.to_string())?;
    serde_json::from_str(&out.text).map_err(|e| e.to_string())
}

fn verify(suite: Suite, trials: usize, seed: u64) -> Result<SuiteSummary, String> {
    let out = cmd_verify(&VerifyConfig {
        suites: vec![suite],
        trials,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let r: VerifyReport = serde_json::from_str(&out.text).map_err(|e| e.to_string())?;
    Ok(r.suites.into_iter().next().expect("one suite"))
}

fn describe(s: &SuiteSummary) -> String {
    format!(
        "{} trials, {} violations, min slack {:?} ({}), max equality error {:.2e}",
        s.trials,
        s.violations,
        s.min_slack,
        s.min_slack_step.as_deref().unwrap_or("-"),
        s.max_equality_error
    ) + &s
        .max_info_rhs_ratio
        .map_or(String::new(), |r| format!(", max info/rhs {r:.4}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run_named(NamedAttack::Identity, "optimize")?.result;
    let elapsed = start.elapsed();
    check(
        r.p_ctrl == 0.0 && r.p_sift == 0.0 && r.info <= 1e-6 && elapsed < Duration::from_secs(5),
        format!(
            "p_ctrl {:e}, p_sift {:e}, optimized info {:e}, {:.2?}",
            r.p_ctrl, r.p_sift, r.info, elapsed
        ),
    )
}

fn fixture(attack: NamedAttack, povm: &str) -> Outcome {
    let r = run_named(attack, povm)?.result;
    check(
        (r.p_ctrl - 0.5).abs() <= 1e-9
            && r.p_sift.abs() <= 1e-12
            && (r.info - 1.0).abs() <= 1e-9
            && (r.rhs - SQRT_2).abs() <= 1e-12
            && (r.gap - (SQRT_2 - 1.0)).abs() <= 1e-9
            && r.holds,
        format!(
            "p_ctrl {}, p_sift {:e}, info {}, rhs {}, gap {:.4}, holds {}",
            r.p_ctrl, r.p_sift, r.info, r.rhs, r.gap, r.holds
        ),
    )
}

fn criterion_4() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let s = pool.install(|| verify(Suite::Theorem, 10_000, 1))?;
    let elapsed = start.elapsed();
    check(
        s.violations == 0 && s.trials == 10_000 && elapsed < Duration::from_secs(600),
        format!("{}, single-threaded {:.2?}", describe(&s), elapsed),
    )
}

fn criterion_5() -> Outcome {
    let s = verify(Suite::Lemma1, 100_000, 7)?;
    let independent = JointDistribution::new(vec![0.25, 0.25], vec![0.25, 0.25]).unwrap();
    let correlated = JointDistribution::new(vec![0.5, 0.0], vec![0.0, 0.5]).unwrap();
    let (i0, b0) = (
        mutual_information(&independent).unwrap(),
        lemma1_bound(&independent),
    );
    let (i1, b1) = (
        mutual_information(&correlated).unwrap(),
        lemma1_bound(&correlated),
    );
    let eq_ok = i0.abs() <= 1e-12
        && b0.abs() <= 1e-12
        && (i1 - 1.0).abs() <= 1e-12
        && (b1 - 1.0).abs() <= 1e-12;
    check(
        s.violations == 0 && s.trials == 100_000 && eq_ok,
        format!(
            "{}; independent I={i0:e} bound={b0:e}; correlated I={i1} bound={b1}",
            describe(&s)
        ),
    )
}

fn criterion_6() -> Outcome {
    let s = verify(Suite::Lemma2, 10_000, 2)?;
    let phi = StateVector::plus().tensor(&StateVector::basis(3, 1));
    let sat = lemma2_check(&phi, &phi, &OperatorMatrix::identity(2), &Povm::trivial(3))
        .map_err(|e| e.to_string())?;
    check(
        s.violations == 0 && s.trials == 10_000 && sat.slack.abs() <= 1e-12,
        format!("{}; saturation slack {:e}", describe(&s), sat.slack),
    )
}

fn criterion_7() -> Outcome {
    let s = verify(Suite::ProofChain, 10_000, 3)?;
    check(
        s.violations == 0
            && s.trials == 10_000
            && s.max_equality_error <= 1e-12
            && s.min_slack.is_some_and(|m| m >= -1e-9),
        describe(&s),
    )
}

fn criterion_8() -> Outcome {
    let s = verify(Suite::SiftConsistency, 10_000, 4)?;
    check(
        s.violations == 0 && s.trials == 10_000 && s.max_equality_error <= 1e-12,
        describe(&s),
    )
}

/// Eve holds `|0⟩` or `|+⟩` with probability 1/2 each after a sifted round.
fn zero_plus_attack() -> AttackModel {
    let h = FRAC_1_SQRT_2;
    let had = OperatorMatrix::from_real_rows(2, &[h, h, h, -h]).unwrap();
    AttackModel::new(
        StateVector::basis(2, 0),
        OperatorMatrix::identity(4),
        controlled(&had),
    )
    .unwrap()
}

/// Best information over real projective qubit measurements on a grid.
fn grid_oracle(points: usize) -> f64 {
    let h = FRAC_1_SQRT_2;
    let states = [[1.0, 0.0], [h, h]];
    (0..points)
        .map(|k| {
            let t = PI * k as f64 / points as f64;
            let basis = [[t.cos(), t.sin()], [-t.sin(), t.cos()]];
            let row = |s: [f64; 2]| -> Vec<f64> {
                basis
                    .iter()
                    .map(|v| 0.5 * (v[0] * s[0] + v[1] * s[1]).powi(2))
                    .collect()
            };
            mutual_information(&JointDistribution::new(row(states[0]), row(states[1])).unwrap())
                .unwrap()
        })
        .fold(0.0, f64::max)
}

fn criterion_9() -> Outcome {
    let a = zero_plus_attack();
    let r = accessible_information(&a, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let oracle = grid_oracle(10_000);
    let chi = attack_holevo(&a).map_err(|e| e.to_string())?;
    check(
        (0.394..=0.600876 + 1e-6).contains(&r.bits) && r.bits >= oracle - 5e-3,
        format!(
            "optimizer {:.6}, grid oracle {oracle:.6}, Holevo {chi:.6}",
            r.bits
        ),
    )
}

fn criterion_10() -> Outcome {
    let out = cmd_sweep(&SweepConfig {
        family: "partial-forward-cnot".into(),
        ancilla_dim: 2,
        params: vec![format!("theta=0:{FRAC_PI_2}:100")
            .parse::<ParamSpec>()
            .map_err(|e| e.to_string())?],
        povm: PovmSource::Optimize,
        seed: 0,
        restarts: 8,
    })
    .map_err(|e| e.to_string())?;
    let rows: Vec<Vec<&str>> = out
        .text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let num = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
    let p_ctrl: Vec<f64> = rows.iter().map(|r| num(r[2])).collect();
    let monotone = p_ctrl.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let ends =
        p_ctrl.first() == Some(&0.0) && p_ctrl.last().is_some_and(|p| (p - 0.5).abs() <= 1e-9);
    let max_sift = rows.iter().map(|r| num(r[3]).abs()).fold(0.0, f64::max);
    let all_hold = rows.iter().all(|r| r[7] == "true");
    let min_gap = rows.iter().map(|r| num(r[6])).fold(f64::INFINITY, f64::min);
    check(
        rows.len() == 100 && monotone && ends && max_sift <= 1e-12 && all_hold && !out.violation,
        format!(
            "{} points, p_ctrl {}..{}, monotone {monotone}, max |p_sift| {max_sift:e}, min gap {min_gap:e}",
            rows.len(),
            p_ctrl[0],
            p_ctrl[p_ctrl.len() - 1]
        ),
    )
}

fn criterion_11() -> Outcome {
    let cfg = VerifyConfig {
        suites: parse_suites("all").map_err(|e| e.to_string())?,
        trials: 300,
        seed: 11,
    };
    let a = cmd_verify(&cfg).map_err(|e| e.to_string())?;
    let b = cmd_verify(&cfg).map_err(|e| e.to_string())?;
    check(
        a.text.as_bytes() == b.text.as_bytes() && !a.violation,
        format!(
            "{} bytes per summary, identical {}",
            a.text.len(),
            a.text == b.text
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("identity attack reveals nothing", criterion_1),
        ("forward-CNOT fixture with Z measurement", || {
            fixture(NamedAttack::ForwardCnot, "z")
        }),
        ("return-CZ fixture with X measurement", || {
            fixture(NamedAttack::ReturnCz, "x")
        }),
        ("theorem suite, 10^4 random attacks and POVMs", criterion_4),
        (
            "information lemma suite, 10^5 joints and equality cases",
            criterion_5,
        ),
        (
            "overlap lemma suite, 10^4 instances and saturation",
            criterion_6,
        ),
        ("proof-chain suite, 10^4 random pairs", criterion_7),
        (
            "SIFT probability, conditional vs operator form",
            criterion_8,
        ),
        ("{|0>,|+>} ensemble vs grid oracle", criterion_9),
        ("partial-forward-cnot sweep, 100 points", criterion_10),
        ("verify summaries are byte-identical", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
