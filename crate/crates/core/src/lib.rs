//! Simulation and numerical verification of the information–disturbance
//! trade-off for the one-qubit semiquantum key distribution protocol in
//! which only Bob is quantum.
//!
//! Eve attacks with a forward unitary `V` and a return unitary `U` on the
//! qubit and her ancilla. [`protocol`] computes the two disturbance
//! observables `P_CTRL` and `P_SIFT` and Eve's information `I(A:E)` exactly;
//! [`tradeoff`] checks the bound `I(A:E) ≤ 2√(P_CTRL + 6·P_SIFT^{1/4})`
//! together with every intermediate inequality of its derivation.

/// Version of this crate, recorded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod attacks;
pub mod eavesdropper;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod simplex;
pub mod suite;
pub mod tradeoff;

pub use attacks::{named_attack, parameterized_attack, random_attack, AttackFamily, NamedAttack};
pub use eavesdropper::{
    accessible_information, holevo_bound, povm_from_factors, AccessibleInfo, OptimizerConfig, Povm,
};
pub use entropy::{mutual_information, shannon_entropy, JointDistribution};
pub use error::{Error, Result};
pub use linalg::{
    haar_unitary, operator_norm, partial_trace_qubit, OperatorMatrix, StateVector, Tensor, C64,
};
pub use protocol::{
    ctrl_error, eve_information, forward_state, joint_distribution, sift_branch, AttackModel,
    SiftOutcome,
};
pub use suite::{run_suite, Suite, SuiteSummary};
pub use tradeoff::{
    lemma1_bound, lemma2_check, proof_chain, theorem_rhs, verify_tradeoff, ProofTrace, StepSlacks,
    TradeoffReport,
};
