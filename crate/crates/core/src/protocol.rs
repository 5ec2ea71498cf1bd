//! Exact evaluation of the one-qubit protocol under a two-interaction attack.
//!
//! Bob sends `|+⟩`; Eve applies `V` to qubit and ancilla on the way to Alice
//! and `U` on the way back. In CTRL Alice reflects the qubit and Bob tests
//! for `|−⟩`. In SIFT Alice measures `Z`, resends, and Bob measures `Z`.

use serde::{Deserialize, Serialize};

use crate::eavesdropper::Povm;
use crate::entropy::{mutual_information, JointDistribution};
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace_qubit, OperatorMatrix, StateVector, Tensor, C64, EIG_CLAMP, TOL_NORM,
};

/// Below this, an outcome of Alice's `Z` measurement is treated as impossible.
pub const DEGENERATE_BRANCH: f64 = 1e-12;

/// Eve's strategy: ancilla dimension, initial ancilla state `Ω`, forward
/// unitary `V` and return unitary `U`, both acting on `C² ⊗ C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackModel {
    ancilla_dim: usize,
    omega: StateVector,
    v: OperatorMatrix,
    u: OperatorMatrix,
}

impl AttackModel {
    pub fn new(omega: StateVector, v: OperatorMatrix, u: OperatorMatrix) -> Result<Self> {
        let d = omega.dim();
        if d == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        let deviation = (omega.norm_squared() - 1.0).abs();
        if deviation > TOL_NORM {
            return Err(Error::Validation {
                what: "omega".into(),
                role: "normalized",
                deviation,
            });
        }
        for (name, m) in [("V", &v), ("U", &u)] {
            if m.dim() != 2 * d {
                return Err(Error::Dimension {
                    expected: 2 * d,
                    found: m.dim(),
                });
            }
            m.check_unitary(name)?;
        }
        Ok(AttackModel {
            ancilla_dim: d,
            omega,
            v,
            u,
        })
    }

    /// `V = U = 1` on a `d`-dimensional ancilla prepared in `|0⟩`.
    pub fn identity(d: usize) -> Self {
        AttackModel {
            ancilla_dim: d,
            omega: StateVector::basis(d, 0),
            v: OperatorMatrix::identity(2 * d),
            u: OperatorMatrix::identity(2 * d),
        }
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn omega(&self) -> &StateVector {
        &self.omega
    }

    pub fn forward(&self) -> &OperatorMatrix {
        &self.v
    }

    pub fn back(&self) -> &OperatorMatrix {
        &self.u
    }
}

/// `Z_z = |z⟩⟨z| ⊗ 1_K`.
pub fn z_projector(z: usize, d: usize) -> OperatorMatrix {
    OperatorMatrix::matrix_unit(2, z, z).tensor(&OperatorMatrix::identity(d))
}

/// `X_− = |−⟩⟨−| ⊗ 1_K`.
pub fn x_minus_projector(d: usize) -> OperatorMatrix {
    StateVector::minus()
        .projector()
        .tensor(&OperatorMatrix::identity(d))
}

/// Lifts an ancilla operator `Ê` to `1_H ⊗ Ê`.
pub fn lift_to_joint(e: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::identity(2).tensor(e)
}

fn clamp_probability(p: f64) -> f64 {
    if (-EIG_CLAMP..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + EIG_CLAMP {
        1.0
    } else {
        p
    }
}

/// `|Ψ⟩ = V (|+⟩ ⊗ |Ω⟩)`.
pub fn forward_state(a: &AttackModel) -> StateVector {
    a.v.apply(&StateVector::plus().tensor(&a.omega))
}

/// `P_CTRL = ⟨Ψ|U† X_− U|Ψ⟩`.
pub fn ctrl_error(a: &AttackModel) -> f64 {
    let returned = a.u.apply(&forward_state(a));
    clamp_probability(returned.expectation(&x_minus_projector(a.ancilla_dim)).re)
}

/// Everything that happens in the SIFT branch.
#[derive(Debug, Clone)]
pub struct SiftOutcome {
    /// Alice's outcome probabilities `p_A(z) = ⟨Ψ|Z_z|Ψ⟩`.
    pub p_a: [f64; 2],
    /// Post-measurement states `σ_z`; the zero operator when `degenerate[z]`.
    pub sigma: [OperatorMatrix; 2],
    pub degenerate: [bool; 2],
    /// Eve's states `ρ_z = tr_H(U σ_z U†)`.
    pub rho_eve: [OperatorMatrix; 2],
    /// `p_b_given_a[z] = Some([p(0|z), p(1|z)])`; `None` for degenerate `z`.
    pub p_b_given_a: [Option<[f64; 2]>; 2],
    /// Error probability from the conditional tables.
    pub p_sift: f64,
    /// `⟨Ψ|Z₀U†Z₁UZ₀|Ψ⟩ + ⟨Ψ|Z₁U†Z₀UZ₁|Ψ⟩`, evaluated as a single operator.
    pub p_sift_operator: f64,
}

pub fn sift_branch(a: &AttackModel) -> SiftOutcome {
    let d = a.ancilla_dim;
    let psi = forward_state(a);
    let z = [z_projector(0, d), z_projector(1, d)];
    let psi_proj = psi.projector();

    let p_a = [
        clamp_probability(psi.expectation(&z[0]).re),
        clamp_probability(psi.expectation(&z[1]).re),
    ];

    let mut sigma = [OperatorMatrix::zeros(2 * d), OperatorMatrix::zeros(2 * d)];
    let mut rho_eve = [OperatorMatrix::zeros(d), OperatorMatrix::zeros(d)];
    let mut degenerate = [false; 2];
    let mut p_b_given_a = [None, None];

    for k in 0..2 {
        if p_a[k] <= DEGENERATE_BRANCH {
            degenerate[k] = true;
            continue;
        }
        let s = (&(&z[k] * &psi_proj) * &z[k]).scale(C64::new(1.0 / p_a[k], 0.0));
        let evolved = s.conjugate_by(&a.u);
        rho_eve[k] = partial_trace_qubit(&evolved).expect("joint dimension is even");
        let cond0 = clamp_probability((&evolved * &z[0]).trace().re);
        let cond1 = clamp_probability((&evolved * &z[1]).trace().re);
        p_b_given_a[k] = Some([cond0, cond1]);
        sigma[k] = s;
    }

    let flip = |k: usize, other: usize| p_b_given_a[k].map_or(0.0, |row| row[other] * p_a[k]);
    let p_sift = clamp_probability(flip(0, 1) + flip(1, 0));

    let u_dag = a.u.adjoint();
    let term = |k: usize, other: usize| &(&(&(&z[k] * &u_dag) * &z[other]) * &a.u) * &z[k];
    let op = &term(0, 1) + &term(1, 0);
    let p_sift_operator = clamp_probability(psi.expectation(&op).re);

    SiftOutcome {
        p_a,
        sigma,
        degenerate,
        rho_eve,
        p_b_given_a,
        p_sift,
        p_sift_operator,
    }
}

fn check_povm_dim(a: &AttackModel, e: &Povm) -> Result<()> {
    if e.dim() != a.ancilla_dim {
        return Err(Error::Dimension {
            expected: a.ancilla_dim,
            found: e.dim(),
        });
    }
    Ok(())
}

/// `p_AE(z, e) = ⟨Ψ|Z_z U† E_e U Z_z|Ψ⟩`.
pub fn joint_distribution(a: &AttackModel, e: &Povm) -> Result<JointDistribution> {
    check_povm_dim(a, e)?;
    let d = a.ancilla_dim;
    let psi = forward_state(a);
    let lifted: Vec<OperatorMatrix> = e.elements().iter().map(lift_to_joint).collect();
    let row = |z: usize| -> Vec<f64> {
        let branch = a.u.apply(&z_projector(z, d).apply(&psi));
        lifted.iter().map(|el| branch.expectation(el).re).collect()
    };
    JointDistribution::new(row(0), row(1))
}

/// Second route to the joint distribution: `p_A(z) · tr(ρ_z Ê_e)`.
pub fn joint_distribution_from_reduced(sift: &SiftOutcome, e: &Povm) -> Result<JointDistribution> {
    let d = sift.rho_eve[0].dim();
    if e.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            found: e.dim(),
        });
    }
    let row = |z: usize| -> Vec<f64> {
        e.elements()
            .iter()
            .map(|el| sift.p_a[z] * (&sift.rho_eve[z] * el).trace().re)
            .collect()
    };
    JointDistribution::new(row(0), row(1))
}

/// `I(A:E)` for a fixed Eve measurement.
pub fn eve_information(a: &AttackModel, e: &Povm) -> Result<f64> {
    mutual_information(&joint_distribution(a, e)?)
}

/// The numbers an observer of the protocol can report for one attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub p_ctrl: f64,
    pub p_sift: f64,
}

pub fn disturbance(a: &AttackModel) -> Disturbance {
    Disturbance {
        p_ctrl: ctrl_error(a),
        p_sift: sift_branch(a).p_sift,
    }
}
