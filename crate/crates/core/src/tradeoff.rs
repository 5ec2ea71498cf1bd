//! The information–disturbance bound `I(A:E) ≤ 2√(P_CTRL + 6·P_SIFT^{1/4})`,
//! its two supporting inequalities, and a step-by-step numerical check of
//! the argument that links them.
//!
//! The chain compares Alice–Eve statistics `p_AE(z,e) = ⟨Ψ|Z_zU†E_eUZ_z|Ψ⟩`
//! with the "measure after return" statistics `p₀(z,e) = ⟨Ψ|U†Z_zE_eU|Ψ⟩`.
//! They differ through `C_z = Z_{z⊕1}UZ_z − Z_zUZ_{z⊕1}`, which satisfies
//! `UZ_z = Z_zU + C_z` and `⟨Ψ|C_z†C_z|Ψ⟩ = P_SIFT`.

use serde::{Deserialize, Serialize};

use crate::eavesdropper::{attack_holevo, Povm};
use crate::entropy::{mutual_information, JointDistribution};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, OperatorMatrix, StateVector, Tensor, EIG_CLAMP};
use crate::protocol::{
    ctrl_error, forward_state, joint_distribution, lift_to_joint, sift_branch, z_projector,
    AttackModel,
};

/// One-sided inequalities may be violated by this much from round-off.
pub const SLACK_TOL: f64 = 1e-9;
/// Identities must hold to this absolute accuracy.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Constant in front of `P_SIFT^{1/4}`; it dominates `√6 + 3`.
pub const SIFT_COEFFICIENT: f64 = 6.0;

fn check_probability(name: &str, p: f64) -> Result<f64> {
    if !(-EIG_CLAMP..=1.0 + EIG_CLAMP).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `P_CTRL + 6·P_SIFT^{1/4}`, the quantity under the root.
pub fn disturbance_measure(p_ctrl: f64, p_sift: f64) -> Result<f64> {
    let c = check_probability("p_ctrl", p_ctrl)?;
    let s = check_probability("p_sift", p_sift)?;
    Ok(c + SIFT_COEFFICIENT * s.powf(0.25))
}

/// Upper bound on Eve's information: `2√(P_CTRL + 6·P_SIFT^{1/4})`.
pub fn theorem_rhs(p_ctrl: f64, p_sift: f64) -> Result<f64> {
    Ok(2.0 * disturbance_measure(p_ctrl, p_sift)?.sqrt())
}

/// `√(1 − 4F²)` with `F = Σ_y √(p(0,y)p(1,y))`, an upper bound on `I(X:Y)`
/// for binary `X`.
pub fn lemma1_bound(j: &JointDistribution) -> f64 {
    let f = j.fidelity_sum();
    (1.0 - 4.0 * f * f).max(0.0).sqrt()
}

/// Both sides of `|⟨φ₀|X|φ₁⟩| ≤ ‖X‖ Σ_e ⟨φ₀|E_e|φ₀⟩^{1/2}⟨φ₁|E_e|φ₁⟩^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Check {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Evaluates the overlap inequality for `X` on the qubit (lifted to
/// `X ⊗ 1_K`) and a POVM on the ancilla. Vectors need not be normalized.
pub fn lemma2_check(
    phi0: &StateVector,
    phi1: &StateVector,
    x: &OperatorMatrix,
    e: &Povm,
) -> Result<Lemma2Check> {
    if x.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: x.dim(),
        });
    }
    let n = 2 * e.dim();
    for phi in [phi0, phi1] {
        if phi.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: phi.dim(),
            });
        }
    }
    let lifted_x = x.tensor(&OperatorMatrix::identity(e.dim()));
    let lhs = phi0.inner(&lifted_x.apply(phi1)).norm();
    let overlap: f64 = e
        .elements()
        .iter()
        .map(|el| {
            let l = lift_to_joint(el);
            let a = phi0.expectation(&l).re.max(0.0);
            let b = phi1.expectation(&l).re.max(0.0);
            (a * b).sqrt()
        })
        .sum();
    let rhs = operator_norm(x) * overlap;
    Ok(Lemma2Check {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

/// Slack of every step in the argument; positive means the step holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSlacks {
    /// `⟨Ψ|C_z†C_z|Ψ⟩ − P_SIFT` for `z = 0, 1`; an identity.
    pub s1_perturbation_norm: [f64; 2],
    /// Smallest slack over `(z,e)` of
    /// `|√p_AE − √p₀| ≤ (2√p₀·√c_ze + c_ze)^{1/2}`, `c_ze = ⟨Ψ|C_z†E_eC_z|Ψ⟩`.
    pub s2_sqrt_perturbation: f64,
    /// `|⟨φ₀|X|φ₁⟩| − (1/2 − P_CTRL)`.
    pub s3_ctrl_overlap: f64,
    /// `Σ_e √(p₀(0,e)p₀(1,e)) − |⟨φ₀|X|φ₁⟩|` (overlap inequality applied).
    pub s3b_overlap_inequality: f64,
    /// `F_AE + 6·P_SIFT^{1/4} − Σ_e √(p₀(0,e)p₀(1,e))`.
    pub s4_fidelity_perturbation: f64,
    /// `F_AE − (1/2 − P_CTRL − 6·P_SIFT^{1/4})`.
    pub s5_fidelity_lower_bound: f64,
    /// `lemma1_bound − I(A:E)`.
    pub s6_information_lemma: f64,
    /// `theorem_rhs − lemma1_bound`.
    pub s6_theorem: f64,
}

impl StepSlacks {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("s1_z0", self.s1_perturbation_norm[0]),
            ("s1_z1", self.s1_perturbation_norm[1]),
            ("s2", self.s2_sqrt_perturbation),
            ("s3", self.s3_ctrl_overlap),
            ("s3b", self.s3b_overlap_inequality),
            ("s4", self.s4_fidelity_perturbation),
            ("s5", self.s5_fidelity_lower_bound),
            ("s6_lemma1", self.s6_information_lemma),
            ("s6_theorem", self.s6_theorem),
        ]
    }

    /// Largest deviation of the `s1` identity.
    pub fn equality_error(&self) -> f64 {
        self.s1_perturbation_norm[0]
            .abs()
            .max(self.s1_perturbation_norm[1].abs())
    }

    /// Smallest slack among the one-sided steps, with its name.
    pub fn min_inequality(&self) -> (&'static str, f64) {
        self.entries()
            .into_iter()
            .filter(|(name, _)| !name.starts_with("s1"))
            .fold(
                ("none", f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            )
    }

    pub fn all_hold(&self) -> bool {
        self.equality_error() <= EQUALITY_TOL && self.min_inequality().1 >= -SLACK_TOL
    }
}

/// Intermediate quantities of the argument for one attack and POVM.
#[derive(Debug, Clone)]
pub struct ProofTrace {
    /// `C_z = Z_{z⊕1}UZ_z − Z_zUZ_{z⊕1}`.
    pub c: [OperatorMatrix; 2],
    /// `p₀(z,e) = ⟨Ψ|U†Z_zE_eU|Ψ⟩`.
    pub p0: JointDistribution,
    pub p0_marginal: [f64; 2],
    /// `|⟨φ₀|X|φ₁⟩|` with `φ_z = Z_zU|Ψ⟩`, `X = |0⟩⟨1| ⊗ 1_K`.
    pub lhs_overlap: f64,
    /// `Σ_e √(p_AE(0,e)p_AE(1,e))`.
    pub fidelity_sum: f64,
    pub slacks: StepSlacks,
}

pub fn proof_chain(a: &AttackModel, e: &Povm) -> Result<ProofTrace> {
    let d = a.ancilla_dim();
    if e.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            found: e.dim(),
        });
    }
    let psi = forward_state(a);
    let u = a.back();
    let z = [z_projector(0, d), z_projector(1, d)];
    let p_ctrl = ctrl_error(a);
    let p_sift = sift_branch(a).p_sift;
    let joint = joint_distribution(a, e)?;
    let info = mutual_information(&joint)?;

    let c = [
        &(&(&z[1] * u) * &z[0]) - &(&(&z[0] * u) * &z[1]),
        &(&(&z[0] * u) * &z[1]) - &(&(&z[1] * u) * &z[0]),
    ];
    let c_psi = [c[0].apply(&psi), c[1].apply(&psi)];
    let s1 = [
        c_psi[0].norm_squared() - p_sift,
        c_psi[1].norm_squared() - p_sift,
    ];

    let u_psi = u.apply(&psi);
    let lifted: Vec<OperatorMatrix> = e.elements().iter().map(lift_to_joint).collect();
    let phi = [z[0].apply(&u_psi), z[1].apply(&u_psi)];
    // Z_z commutes with 1 ⊗ Ê_e, so p₀(z,e) = ⟨φ_z|E_e|φ_z⟩
    let p0_row =
        |k: usize| -> Vec<f64> { lifted.iter().map(|el| phi[k].expectation(el).re).collect() };
    let p0 = JointDistribution::new(p0_row(0), p0_row(1))?;
    let p0_marginal = p0.marginal_x();

    let mut s2 = f64::INFINITY;
    for (k, c_k) in c_psi.iter().enumerate() {
        for (idx, el) in lifted.iter().enumerate() {
            let c_ze = c_k.expectation(el).re.max(0.0);
            let p0_ze = p0.get(k, idx);
            let bound = (2.0 * p0_ze.sqrt() * c_ze.sqrt() + c_ze).sqrt();
            let diff = (joint.get(k, idx).sqrt() - p0_ze.sqrt()).abs();
            s2 = s2.min(bound - diff);
        }
    }

    let x = OperatorMatrix::matrix_unit(2, 0, 1).tensor(&OperatorMatrix::identity(d));
    let lhs_overlap = phi[0].inner(&x.apply(&phi[1])).norm();
    let s3 = lhs_overlap - (0.5 - p_ctrl);
    let p0_fidelity = p0.fidelity_sum();
    let s3b = p0_fidelity - lhs_overlap;

    let fidelity_sum = joint.fidelity_sum();
    let sift_term = SIFT_COEFFICIENT * p_sift.powf(0.25);
    let s4 = fidelity_sum + sift_term - p0_fidelity;
    let s5 = fidelity_sum - (0.5 - p_ctrl - sift_term);

    let l1 = lemma1_bound(&joint);
    let rhs = theorem_rhs(p_ctrl, p_sift)?;

    Ok(ProofTrace {
        c,
        p0,
        p0_marginal,
        lhs_overlap,
        fidelity_sum,
        slacks: StepSlacks {
            s1_perturbation_norm: s1,
            s2_sqrt_perturbation: s2,
            s3_ctrl_overlap: s3,
            s3b_overlap_inequality: s3b,
            s4_fidelity_perturbation: s4,
            s5_fidelity_lower_bound: s5,
            s6_information_lemma: l1 - info,
            s6_theorem: rhs - l1,
        },
    })
}

/// Everything needed to judge the bound for one attack and POVM.
#[derive(Debug, Clone)]
pub struct TradeoffReport {
    pub p_ctrl: f64,
    pub p_sift: f64,
    pub p_a: [f64; 2],
    pub joint: JointDistribution,
    /// `I(A:E)` achieved by the POVM.
    pub info: f64,
    /// Holevo quantity of Eve's ensemble; caps every POVM's information.
    pub holevo: f64,
    pub lemma1: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub trace: ProofTrace,
}

pub fn verify_tradeoff(a: &AttackModel, e: &Povm) -> Result<TradeoffReport> {
    let sift = sift_branch(a);
    let p_ctrl = ctrl_error(a);
    let joint = joint_distribution(a, e)?;
    let info = mutual_information(&joint)?;
    let rhs = theorem_rhs(p_ctrl, sift.p_sift)?;
    let gap = rhs - info;
    Ok(TradeoffReport {
        p_ctrl,
        p_sift: sift.p_sift,
        p_a: sift.p_a,
        lemma1: lemma1_bound(&joint),
        joint,
        info,
        holevo: attack_holevo(a)?,
        rhs,
        gap,
        holds: gap >= -SLACK_TOL,
        trace: proof_chain(a, e)?,
    })
}
