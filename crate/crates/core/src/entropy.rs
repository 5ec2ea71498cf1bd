//! Classical and von Neumann entropies, base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, EIG_CLAMP, TOL_POSITIVE, TOL_PROB_SUM};

/// Entries below this are treated as zero inside `p log p`.
const ENTROPY_FLOOR: f64 = 1e-15;

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(&bad) = p.iter().find(|&&x| x < -EIG_CLAMP || x.is_nan()) {
        return Err(Error::Domain(format!("negative probability {bad:e}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > TOL_PROB_SUM {
        return Err(Error::Domain(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn plogp_sum(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|&x| x > ENTROPY_FLOOR)
        .map(|x| x * x.log2())
        .sum::<f64>()
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(plogp_sum(p.iter().copied()).max(0.0))
}

/// Binary entropy `h(x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    shannon_entropy(&[x, 1.0 - x])
}

/// Joint distribution of a bit `x ∈ {0,1}` and a finite outcome `y`.
///
/// `rows[x][y] = p(x, y)`. Construction clamps entries in `[-1e-12, 0)` to
/// zero and requires the total mass to be 1 within `1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct JointDistribution {
    rows: [Vec<f64>; 2],
}

impl JointDistribution {
    pub fn new(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        if row0.len() != row1.len() {
            return Err(Error::Dimension {
                expected: row0.len(),
                found: row1.len(),
            });
        }
        if row0.is_empty() {
            return Err(Error::Domain("empty outcome alphabet".into()));
        }
        let clamp = |row: Vec<f64>| -> Result<Vec<f64>> {
            row.into_iter()
                .map(|x| {
                    if x.is_nan() || x < -EIG_CLAMP {
                        Err(Error::Domain(format!("negative probability {x:e}")))
                    } else {
                        Ok(x.max(0.0))
                    }
                })
                .collect()
        };
        let rows = [clamp(row0)?, clamp(row1)?];
        let total: f64 = rows.iter().flatten().sum();
        if (total - 1.0).abs() > TOL_PROB_SUM {
            return Err(Error::Domain(format!(
                "joint probabilities sum to {total}, expected 1"
            )));
        }
        Ok(JointDistribution { rows })
    }

    /// Builds from a general table; the first index must be binary.
    pub fn from_table(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() != 2 {
            return Err(Error::Domain(format!(
                "first variable must be binary, got alphabet of size {}",
                table.len()
            )));
        }
        let mut it = table.into_iter();
        let r0 = it.next().unwrap_or_default();
        let r1 = it.next().unwrap_or_default();
        Self::new(r0, r1)
    }

    pub fn outcome_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn marginal_x(&self) -> [f64; 2] {
        [self.rows[0].iter().sum(), self.rows[1].iter().sum()]
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.rows[0]
            .iter()
            .zip(&self.rows[1])
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `Σ_y √(p(0,y) p(1,y))`.
    pub fn fidelity_sum(&self) -> f64 {
        self.rows[0]
            .iter()
            .zip(&self.rows[1])
            .map(|(a, b)| (a * b).sqrt())
            .sum()
    }

    fn joint_entropy(&self) -> f64 {
        plogp_sum(self.rows.iter().flatten().copied()).max(0.0)
    }
}

impl TryFrom<Vec<Vec<f64>>> for JointDistribution {
    type Error = Error;
    fn try_from(table: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_table(table)
    }
}

impl From<JointDistribution> for Vec<Vec<f64>> {
    fn from(j: JointDistribution) -> Self {
        let [a, b] = j.rows;
        vec![a, b]
    }
}

/// `I(X:Y) = H(X) + H(Y) − H(X,Y)`, clamped at zero.
pub fn mutual_information(j: &JointDistribution) -> Result<f64> {
    let hx = shannon_entropy(&j.marginal_x())?;
    let hy = shannon_entropy(&j.marginal_y())?;
    Ok((hx + hy - j.joint_entropy()).max(0.0))
}

/// `S(ρ) = −tr ρ log₂ ρ`; small negative eigenvalues are clamped to zero.
pub fn von_neumann_entropy(rho: &OperatorMatrix) -> Result<f64> {
    let ev = rho.hermitian_eigenvalues();
    if let Some(&bad) = ev.iter().find(|&&l| l < -TOL_POSITIVE) {
        return Err(Error::Domain(format!(
            "density operator has negative eigenvalue {bad:e}"
        )));
    }
    Ok(plogp_sum(ev.into_iter().map(|l| l.max(0.0))).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{StateVector, C64};
    use proptest::prelude::*;

    #[test]
    fn shannon_fixtures() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        // -0.2 log2 0.2 - 0.8 log2 0.8, evaluated with mpmath at 30 digits
        let expected = 0.721_928_094_887_362_3;
        assert!((shannon_entropy(&[0.2, 0.8]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn shannon_rejects_negative_entries() {
        assert!(matches!(
            shannon_entropy(&[1.1, -0.1]),
            Err(Error::Domain(_))
        ));
        // tiny negatives are tolerated
        assert!(shannon_entropy(&[1.0 + 1e-13, -1e-13]).is_ok());
    }

    #[test]
    fn mutual_information_fixtures() {
        let indep = JointDistribution::new(vec![0.25, 0.25], vec![0.25, 0.25]).unwrap();
        assert!(mutual_information(&indep).unwrap().abs() < 1e-15);
        let corr = JointDistribution::new(vec![0.5, 0.0], vec![0.0, 0.5]).unwrap();
        assert!((mutual_information(&corr).unwrap() - 1.0).abs() < 1e-15);
        let noisy = JointDistribution::new(vec![0.4, 0.1], vec![0.1, 0.4]).unwrap();
        // 1 - h(0.2)
        let expected = 1.0 - 0.721_928_094_887_362_3;
        assert!((mutual_information(&noisy).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn joint_construction_errors() {
        assert!(JointDistribution::from_table(vec![vec![1.0]]).is_err());
        assert!(JointDistribution::from_table(vec![vec![0.5], vec![0.2], vec![0.3]]).is_err());
        assert!(JointDistribution::new(vec![0.5, 0.1], vec![0.1]).is_err());
        assert!(JointDistribution::new(vec![0.5], vec![0.6]).is_err());
        let clamped = JointDistribution::new(vec![0.5, -1e-13], vec![0.5, 0.0]).unwrap();
        assert_eq!(clamped.get(0, 1), 0.0);
    }

    #[test]
    fn von_neumann_fixtures() {
        let pure = StateVector::plus().projector();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = OperatorMatrix::identity(4).scale(C64::new(0.25, 0.0));
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
    }

    fn arb_joint() -> impl Strategy<Value = JointDistribution> {
        (1usize..6)
            .prop_flat_map(|m| prop::collection::vec(0.0f64..1.0, 2 * m))
            .prop_filter("nonzero mass", |w| w.iter().sum::<f64>() > 1e-6)
            .prop_map(|w| {
                let total: f64 = w.iter().sum();
                let m = w.len() / 2;
                let p: Vec<f64> = w.iter().map(|x| x / total).collect();
                JointDistribution::new(p[..m].to_vec(), p[m..].to_vec()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn mutual_information_is_bounded_by_marginal_entropies(j in arb_joint()) {
            let i = mutual_information(&j).unwrap();
            let hx = shannon_entropy(&j.marginal_x()).unwrap();
            let hy = shannon_entropy(&j.marginal_y()).unwrap();
            prop_assert!(i >= 0.0);
            prop_assert!(i <= hx.min(hy) + 1e-12);
        }
    }
}
