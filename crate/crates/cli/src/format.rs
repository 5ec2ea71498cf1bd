//! On-disk documents: attacks, POVMs, and number formatting for tables.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are lists of rows.
//! Floats are written in the shortest decimal form that parses back to the
//! identical binary64 value, so documents round-trip bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sqkd_core::linalg::{OperatorMatrix, StateVector, C64};
use sqkd_core::{AttackModel, Povm};

use crate::error::CliError;

pub type ComplexPair = [f64; 2];
pub type MatrixRows = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackDocument {
    pub ancilla_dim: usize,
    pub omega: Vec<ComplexPair>,
    #[serde(rename = "V")]
    pub v: MatrixRows,
    #[serde(rename = "U")]
    pub u: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDocument {
    pub elements: Vec<MatrixRows>,
}

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &OperatorMatrix) -> MatrixRows {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(pair).collect())
        .collect()
}

pub fn operator_from_rows(name: &str, rows: &MatrixRows) -> Result<OperatorMatrix, CliError> {
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Input(format!(
                "{name}: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    Ok(OperatorMatrix::from_rows(n, &entries)?)
}

impl AttackDocument {
    pub fn from_attack(a: &AttackModel) -> Self {
        AttackDocument {
            ancilla_dim: a.ancilla_dim(),
            omega: a.omega().amplitudes().iter().copied().map(pair).collect(),
            v: matrix_rows(a.forward()),
            u: matrix_rows(a.back()),
        }
    }

    pub fn to_attack(&self) -> Result<AttackModel, CliError> {
        if self.omega.len() != self.ancilla_dim {
            return Err(CliError::Input(format!(
                "omega has {} amplitudes but ancilla_dim is {}",
                self.omega.len(),
                self.ancilla_dim
            )));
        }
        let omega = StateVector::from_amplitudes(
            self.omega
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        );
        let v = operator_from_rows("V", &self.v)?;
        let u = operator_from_rows("U", &self.u)?;
        Ok(AttackModel::new(omega, v, u)?)
    }
}

impl PovmDocument {
    pub fn from_povm(e: &Povm) -> Self {
        PovmDocument {
            elements: e.elements().iter().map(matrix_rows).collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm, CliError> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, rows)| operator_from_rows(&format!("element {i}"), rows))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Povm::new(elements)?)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn parse_attack_str(text: &str) -> Result<AttackModel, CliError> {
    let doc: AttackDocument =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("attack document: {e}")))?;
    doc.to_attack()
}

/// Reads and validates an attack document.
pub fn parse_attack_file(path: &Path) -> Result<AttackModel, CliError> {
    parse_attack_str(&read(path)?).map_err(|e| e.context(&path.display().to_string()))
}

pub fn parse_povm_file(path: &Path) -> Result<Povm, CliError> {
    let doc: PovmDocument = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: POVM document: {e}", path.display())))?;
    doc.to_povm()
        .map_err(|e| e.context(&path.display().to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// `x` with `digits` significant digits, like C's `%.{digits}g`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqkd_core::{named_attack, NamedAttack};

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.0, 12), "0");
        assert_eq!(significant(0.5, 12), "0.5");
        assert_eq!(significant(std::f64::consts::SQRT_2, 12), "1.41421356237");
        assert_eq!(significant(-1.0 / 3.0, 12), "-0.333333333333");
        assert_eq!(significant(1.5e-7, 12), "1.5e-07");
        assert_eq!(significant(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(significant(0.00012345, 3), "0.000123");
    }

    #[test]
    fn identity_document_parses() {
        let text = r#"{
            "ancilla_dim": 1,
            "omega": [[1, 0]],
            "V": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            "U": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
        }"#;
        let a = parse_attack_str(text).unwrap();
        assert_eq!(a, AttackModel::identity(1));
    }

    #[test]
    fn non_unitary_document_reports_deviation() {
        let mut doc = AttackDocument::from_attack(&named_attack(NamedAttack::ForwardCnot));
        doc.v[0][0][0] = 1.1;
        let text = to_json(&doc);
        let err = parse_attack_str(&text).unwrap_err().to_string();
        assert!(err.contains("unitary"), "{err}");
        // (1.1)² − 1 = 0.21 on the diagonal of V†V
        assert!(err.contains("2.100e-1"), "{err}");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_attack_str("{"), Err(CliError::Input(_))));
        let mut doc = AttackDocument::from_attack(&AttackModel::identity(2));
        doc.ancilla_dim = 3;
        assert!(doc.to_attack().is_err());
        let mut doc = AttackDocument::from_attack(&AttackModel::identity(2));
        doc.u[1].pop();
        assert!(doc.to_attack().is_err());
    }

    #[test]
    fn povm_document_round_trip() {
        let e = Povm::fourier(3);
        let back = PovmDocument::from_povm(&e).to_povm().unwrap();
        assert_eq!(back, e);
    }
}
