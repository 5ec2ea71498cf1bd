//! Named attacks, smooth attack families and Haar-random attacks.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, OperatorMatrix, StateVector, C64};
use crate::protocol::AttackModel;

pub const MAX_RANDOM_ANCILLA_DIM: usize = 6;

/// Fixture attacks on a qubit ancilla (`d = 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedAttack {
    /// `V = U = 1`, `Ω = |0⟩`.
    Identity,
    /// `V = CNOT` (qubit controls ancilla), `U = 1`, `Ω = |0⟩`.
    ForwardCnot,
    /// `V = 1`, `U = CZ`, `Ω = |+⟩`.
    ReturnCz,
    /// `V = CNOT^(θ/(π/2))`, otherwise as `ForwardCnot`.
    PartialForwardCnot(f64),
    /// `U = CZ^(θ/(π/2))`, otherwise as `ReturnCz`.
    PartialReturnCz(f64),
}

impl fmt::Display for NamedAttack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedAttack::Identity => f.write_str("identity"),
            NamedAttack::ForwardCnot => f.write_str("forward-cnot"),
            NamedAttack::ReturnCz => f.write_str("return-cz"),
            NamedAttack::PartialForwardCnot(t) => write!(f, "partial-forward-cnot({t})"),
            NamedAttack::PartialReturnCz(t) => write!(f, "partial-return-cz({t})"),
        }
    }
}

impl FromStr for NamedAttack {
    type Err = Error;

    /// Accepts `identity`, `forward-cnot`, `return-cz`,
    /// `partial-forward-cnot(θ)` and `partial-return-cz(θ)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" => return Ok(NamedAttack::Identity),
            "forward-cnot" => return Ok(NamedAttack::ForwardCnot),
            "return-cz" => return Ok(NamedAttack::ReturnCz),
            _ => {}
        }
        let (head, arg) = s
            .strip_suffix(')')
            .and_then(|rest| rest.split_once('('))
            .ok_or_else(|| Error::UnknownAttack(s.to_string()))?;
        let theta: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parameters(format!("bad angle `{arg}` in `{s}`")))?;
        check_angle(theta)?;
        match head {
            "partial-forward-cnot" => Ok(NamedAttack::PartialForwardCnot(theta)),
            "partial-return-cz" => Ok(NamedAttack::PartialReturnCz(theta)),
            _ => Err(Error::UnknownAttack(s.to_string())),
        }
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Parameters(format!("angle {theta} outside [0, π/2]")));
    }
    Ok(())
}

/// Two-qubit CNOT, first factor controls.
pub fn cnot() -> OperatorMatrix {
    controlled(&OperatorMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap())
}

/// Two-qubit CZ.
pub fn cz() -> OperatorMatrix {
    controlled(&OperatorMatrix::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap())
}

/// `|0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ gate`.
pub fn controlled(gate: &OperatorMatrix) -> OperatorMatrix {
    let d = gate.dim();
    let mut entries = vec![C64::new(0.0, 0.0); 4 * d * d];
    for k in 0..d {
        entries[k * 2 * d + k] = C64::new(1.0, 0.0);
        for l in 0..d {
            entries[(d + k) * 2 * d + d + l] = gate.entry(k, l);
        }
    }
    OperatorMatrix::from_rows(2 * d, &entries).unwrap()
}

/// Fractional power `G^(θ/(π/2))` of a Hermitian unitary `G` (eigenvalues
/// ±1): `1 + (e^{2iθ} − 1)·P` with `P = (1 − G)/2`. Equals `exp(iθ(1 − G))`.
pub fn fractional_involution(gate: &OperatorMatrix, theta: f64) -> OperatorMatrix {
    let n = gate.dim();
    let id = OperatorMatrix::identity(n);
    let minus_space = (&id - gate).scale(C64::new(0.5, 0.0));
    let phase = C64::from_polar(1.0, 2.0 * theta) - 1.0;
    &id + &minus_space.scale(phase)
}

pub fn named_attack(which: NamedAttack) -> AttackModel {
    let ket0 = StateVector::basis(2, 0);
    let id = OperatorMatrix::identity(4);
    let build = |omega, v, u| AttackModel::new(omega, v, u).expect("fixture attacks are valid");
    match which {
        NamedAttack::Identity => AttackModel::identity(2),
        NamedAttack::ForwardCnot => build(ket0, cnot(), id),
        NamedAttack::ReturnCz => build(StateVector::plus(), id, cz()),
        NamedAttack::PartialForwardCnot(t) => build(ket0, fractional_involution(&cnot(), t), id),
        NamedAttack::PartialReturnCz(t) => {
            build(StateVector::plus(), id, fractional_involution(&cz(), t))
        }
    }
}

/// Parses and builds a named attack.
pub fn named_attack_str(name: &str) -> Result<AttackModel> {
    Ok(named_attack(name.parse()?))
}

/// Independent Haar-random `V` and `U` on a `d`-dimensional ancilla in `|0⟩`.
pub fn random_attack<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<AttackModel> {
    if !(1..=MAX_RANDOM_ANCILLA_DIM).contains(&d) {
        return Err(Error::Parameters(format!(
            "ancilla dimension {d} outside 1..={MAX_RANDOM_ANCILLA_DIM}"
        )));
    }
    let v = haar_unitary(2 * d, rng);
    let u = haar_unitary(2 * d, rng);
    AttackModel::new(StateVector::basis(d, 0), v, u)
}

/// Assembles an `n × n` Hermitian matrix from `n²` reals: the diagonal
/// first, then `(re, im)` for each upper-triangle entry in row-major order.
pub fn hermitian_from_params(params: &[f64], n: usize) -> Result<OperatorMatrix> {
    if params.len() != n * n {
        return Err(Error::Parameters(format!(
            "expected {} generator parameters, got {}",
            n * n,
            params.len()
        )));
    }
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        entries[i * n + i] = C64::new(params[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(params[k], params[k + 1]);
            entries[i * n + j] = z;
            entries[j * n + i] = z.conj();
            k += 2;
        }
    }
    OperatorMatrix::from_rows(n, &entries)
}

/// Number of reals consumed by [`parameterized_attack`].
pub fn parameterized_len(d: usize) -> usize {
    2 * (2 * d) * (2 * d)
}

/// `V = exp(i·H_V)`, `U = exp(i·H_U)` with both generators read from
/// `params` (first `H_V`, then `H_U`); `Ω = |0⟩`.
pub fn parameterized_attack(params: &[f64], d: usize) -> Result<AttackModel> {
    if d == 0 {
        return Err(Error::Parameters(
            "ancilla dimension must be positive".into(),
        ));
    }
    let n = 2 * d;
    if params.len() != parameterized_len(d) {
        return Err(Error::Parameters(format!(
            "expected {} parameters for d = {d}, got {}",
            parameterized_len(d),
            params.len()
        )));
    }
    let (hv, hu) = params.split_at(n * n);
    let v = hermitian_from_params(hv, n)?.exp_i_hermitian();
    let u = hermitian_from_params(hu, n)?.exp_i_hermitian();
    AttackModel::new(StateVector::basis(d, 0), v, u)
}

type Builder = dyn Fn(&[f64]) -> Result<AttackModel> + Send + Sync;

/// A continuous map from a bounded parameter box to attacks.
#[derive(Clone)]
pub struct AttackFamily {
    name: String,
    param_names: Vec<String>,
    bounds: Vec<(f64, f64)>,
    builder: Arc<Builder>,
}

impl fmt::Debug for AttackFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttackFamily")
            .field("name", &self.name)
            .field("param_names", &self.param_names)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl AttackFamily {
    /// Looks up `partial-forward-cnot`, `partial-return-cz` or `generator`
    /// (the latter on an ancilla of dimension `d`).
    pub fn by_name(name: &str, d: usize) -> Result<Self> {
        let angle = |name: &str, f: fn(f64) -> NamedAttack| AttackFamily {
            name: name.to_string(),
            param_names: vec!["theta".into()],
            bounds: vec![(0.0, FRAC_PI_2)],
            builder: Arc::new(move |p: &[f64]| Ok(named_attack(f(p[0])))),
        };
        match name {
            "partial-forward-cnot" => Ok(angle(name, NamedAttack::PartialForwardCnot)),
            "partial-return-cz" => Ok(angle(name, NamedAttack::PartialReturnCz)),
            "generator" => {
                if !(1..=MAX_RANDOM_ANCILLA_DIM).contains(&d) {
                    return Err(Error::Parameters(format!(
                        "ancilla dimension {d} outside 1..={MAX_RANDOM_ANCILLA_DIM}"
                    )));
                }
                let len = parameterized_len(d);
                Ok(AttackFamily {
                    name: name.to_string(),
                    param_names: (0..len).map(|i| format!("g{i}")).collect(),
                    bounds: vec![(-std::f64::consts::PI, std::f64::consts::PI); len],
                    builder: Arc::new(move |p: &[f64]| parameterized_attack(p, d)),
                })
            }
            _ => Err(Error::UnknownAttack(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn param_count(&self) -> usize {
        self.bounds.len()
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn build(&self, params: &[f64]) -> Result<AttackModel> {
        if params.len() != self.param_count() {
            return Err(Error::Parameters(format!(
                "family `{}` takes {} parameters, got {}",
                self.name,
                self.param_count(),
                params.len()
            )));
        }
        for ((p, (lo, hi)), name) in params.iter().zip(&self.bounds).zip(&self.param_names) {
            if !(lo..=hi).contains(&p) {
                return Err(Error::Parameters(format!(
                    "{name} = {p} outside [{lo}, {hi}]"
                )));
            }
        }
        (self.builder)(params)
    }
}
