//! Seeded randomized verification suites.
//!
//! Trial `i` of a run with seed `s` draws all of its randomness from stream
//! `i` of a ChaCha8 generator keyed by `s`, so any single trial can be
//! replayed with [`trial_rng`] and results do not depend on scheduling.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{named_attack, random_attack, NamedAttack};
use crate::eavesdropper::Povm;
use crate::entropy::{mutual_information, JointDistribution};
use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, StateVector, C64};
use crate::protocol::{eve_information, sift_branch, AttackModel};
use crate::tradeoff::{
    lemma1_bound, lemma2_check, proof_chain, theorem_rhs, EQUALITY_TOL, SLACK_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `I(X:Y) ≤ √(1 − 4F²)` on random binary-X joints.
    Lemma1,
    /// The overlap inequality on random vectors, qubit operators and POVMs.
    Lemma2,
    /// `I(A:E) ≤ 2√(P_CTRL + 6P_SIFT^{1/4})` on random attacks and POVMs.
    Theorem,
    /// Every step of the argument on random attacks and POVMs.
    ProofChain,
    /// Conditional-table and operator forms of `P_SIFT` agree.
    SiftConsistency,
    /// Proof chain on the fixture attacks with the `z`, `x` and trivial POVMs.
    Named,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Theorem,
        Suite::ProofChain,
        Suite::SiftConsistency,
        Suite::Named,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Theorem => "theorem",
            Suite::ProofChain => "proof-chain",
            Suite::SiftConsistency => "sift-consistency",
            Suite::Named => "named",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parameters(format!("unknown suite `{s}`")))
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Smallest one-sided slack; `f64::INFINITY` if the trial has none.
    pub slack: f64,
    pub step: &'static str,
    /// Largest deviation of an identity; zero if the trial has none.
    pub equality_error: f64,
    /// `I(A:E) / rhs` for theorem trials with a positive right-hand side.
    pub ratio: Option<f64>,
}

impl TrialOutcome {
    fn inequality(step: &'static str, slack: f64) -> Self {
        TrialOutcome {
            slack,
            step,
            equality_error: 0.0,
            ratio: None,
        }
    }

    pub fn violated(&self) -> bool {
        self.slack < -SLACK_TOL || self.equality_error > EQUALITY_TOL || self.slack.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    pub min_slack: Option<f64>,
    pub min_slack_step: Option<String>,
    /// Trial index (= generator stream) of the smallest slack.
    pub worst_trial: Option<usize>,
    pub max_equality_error: f64,
    pub worst_equality_trial: Option<usize>,
    /// Largest `I(A:E) / rhs` seen; theorem suite only. The bound claims at most 1.
    pub max_info_rhs_ratio: Option<f64>,
    pub slack_tolerance: f64,
    pub equality_tolerance: f64,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_joint<R: Rng + ?Sized>(rng: &mut R) -> JointDistribution {
    let m = rng.random_range(1..=8);
    loop {
        let mut w: Vec<f64> = (0..2 * m)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= total);
        let row1 = w.split_off(m);
        return JointDistribution::new(w, row1).expect("normalized weights");
    }
}

fn random_attack_and_povm<R: Rng + ?Sized>(rng: &mut R) -> Result<(AttackModel, Povm)> {
    let d = rng.random_range(2..=4);
    let m = rng.random_range(2..=d * d);
    let a = random_attack(d, rng)?;
    let e = Povm::random(d, m, rng)?;
    Ok((a, e))
}

fn lemma1_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let j = random_joint(rng);
    let info = mutual_information(&j)?;
    Ok(TrialOutcome::inequality("lemma1", lemma1_bound(&j) - info))
}

fn lemma2_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let d = rng.random_range(1..=4);
    let m = rng.random_range(1..=6);
    let scale0 = C64::new(rng.random_range(0.1..3.0), 0.0);
    let scale1 = C64::new(rng.random_range(0.1..3.0), 0.0);
    let phi0 = StateVector::random_gaussian(2 * d, rng).scale(scale0);
    let phi1 = StateVector::random_gaussian(2 * d, rng).scale(scale1);
    let x = OperatorMatrix::random_gaussian(2, rng);
    let e = Povm::random(d, m, rng)?;
    let r = lemma2_check(&phi0, &phi1, &x, &e)?;
    Ok(TrialOutcome::inequality("lemma2", r.slack))
}

fn theorem_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let (a, e) = random_attack_and_povm(rng)?;
    theorem_outcome(&a, &e)
}

fn theorem_outcome(a: &AttackModel, e: &Povm) -> Result<TrialOutcome> {
    let s = sift_branch(a);
    let p_ctrl = crate::protocol::ctrl_error(a);
    let info = eve_information(a, e)?;
    let rhs = theorem_rhs(p_ctrl, s.p_sift)?;
    Ok(TrialOutcome {
        ratio: (rhs > 0.0).then(|| info / rhs),
        ..TrialOutcome::inequality("theorem", rhs - info)
    })
}

fn chain_outcome(a: &AttackModel, e: &Povm) -> Result<TrialOutcome> {
    let t = proof_chain(a, e)?;
    let (step, slack) = t.slacks.min_inequality();
    Ok(TrialOutcome {
        slack,
        step,
        equality_error: t.slacks.equality_error(),
        ratio: None,
    })
}

fn proof_chain_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let (a, e) = random_attack_and_povm(rng)?;
    chain_outcome(&a, &e)
}

fn sift_trial(rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let d = rng.random_range(1..=4);
    let a = random_attack(d, rng)?;
    let s = sift_branch(&a);
    Ok(TrialOutcome {
        slack: f64::INFINITY,
        step: "sift-consistency",
        equality_error: (s.p_sift - s.p_sift_operator).abs(),
        ratio: None,
    })
}

/// Fixture attacks exercised by the `named` suite.
pub fn named_fixtures() -> Vec<NamedAttack> {
    let mut v = vec![
        NamedAttack::Identity,
        NamedAttack::ForwardCnot,
        NamedAttack::ReturnCz,
    ];
    for k in 0..=8 {
        let t = FRAC_PI_2 * k as f64 / 8.0;
        v.push(NamedAttack::PartialForwardCnot(t));
        v.push(NamedAttack::PartialReturnCz(t));
    }
    v
}

fn named_cases() -> Vec<(NamedAttack, &'static str)> {
    named_fixtures()
        .into_iter()
        .flat_map(|a| ["z", "x", "trivial"].into_iter().map(move |p| (a, p)))
        .collect()
}

/// Runs `trials` seeded trials of `suite`. The `named` suite ignores
/// `trials` and `seed` and runs every fixture once.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteSummary> {
    let outcomes: Vec<Result<TrialOutcome>> = match suite {
        Suite::Named => named_cases()
            .into_par_iter()
            .map(|(name, povm)| {
                let a = named_attack(name);
                let e = Povm::named(povm, a.ancilla_dim())?;
                chain_outcome(&a, &e)
            })
            .collect(),
        _ => {
            if trials == 0 {
                return Err(Error::Parameters("trials must be at least 1".into()));
            }
            let f: fn(&mut ChaCha8Rng) -> Result<TrialOutcome> = match suite {
                Suite::Lemma1 => lemma1_trial,
                Suite::Lemma2 => lemma2_trial,
                Suite::Theorem => theorem_trial,
                Suite::ProofChain => proof_chain_trial,
                Suite::SiftConsistency => sift_trial,
                Suite::Named => unreachable!(),
            };
            (0..trials)
                .into_par_iter()
                .map(|i| f(&mut trial_rng(seed, i)))
                .collect()
        }
    };
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    Ok(summarize(suite, seed, &outcomes))
}

fn summarize(suite: Suite, seed: u64, outcomes: &[TrialOutcome]) -> SuiteSummary {
    let mut worst: Option<usize> = None;
    let mut worst_eq: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if o.slack.is_finite() && worst.is_none_or(|w| o.slack < outcomes[w].slack) {
            worst = Some(i);
        }
        if o.equality_error > 0.0
            && worst_eq.is_none_or(|w| o.equality_error > outcomes[w].equality_error)
        {
            worst_eq = Some(i);
        }
    }
    SuiteSummary {
        suite,
        trials: outcomes.len(),
        seed,
        violations: outcomes.iter().filter(|o| o.violated()).count(),
        min_slack: worst.map(|w| outcomes[w].slack),
        min_slack_step: worst.map(|w| outcomes[w].step.to_string()),
        worst_trial: worst,
        max_equality_error: worst_eq.map_or(0.0, |w| outcomes[w].equality_error),
        worst_equality_trial: worst_eq,
        max_info_rhs_ratio: outcomes.iter().filter_map(|o| o.ratio).reduce(f64::max),
        slack_tolerance: -SLACK_TOL,
        equality_tolerance: EQUALITY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma3".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_pass_and_are_reproducible() {
        for s in Suite::ALL {
            let a = run_suite(s, 50, 3).unwrap();
            let b = run_suite(s, 50, 3).unwrap();
            assert!(a.passed(), "{a:?}");
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(run_suite(Suite::Lemma1, 0, 1).is_err());
    }

    #[test]
    fn worst_trial_replays() {
        let s = run_suite(Suite::Theorem, 40, 9).unwrap();
        let w = s.worst_trial.unwrap();
        let replay = theorem_trial(&mut trial_rng(9, w)).unwrap();
        assert_eq!(Some(replay.slack), s.min_slack);
    }
}
