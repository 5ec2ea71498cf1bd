//! Eve's measurement: POVM construction, accessible-information search and
//! the Holevo reference bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{mutual_information, von_neumann_entropy, JointDistribution};
use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, C64, EIG_CLAMP, TOL_POSITIVE, TOL_PROB_SUM};
use crate::protocol::{eve_information, sift_branch, AttackModel, DEGENERATE_BRANCH};
use crate::simplex::{self, SimplexOptions};

/// A POVM on the ancilla: positive operators `Ê_e` with `Σ_e Ê_e = 1_K`.
/// Each element acts on the joint space as `1_H ⊗ Ê_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<OperatorMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<OperatorMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Domain("a POVM needs at least one element".into()))?;
        let d = first.dim();
        let mut total = OperatorMatrix::zeros(d);
        for (i, el) in elements.iter().enumerate() {
            if el.dim() != d {
                return Err(Error::Dimension {
                    expected: d,
                    found: el.dim(),
                });
            }
            if !el.is_positive() {
                let herm = el.hermiticity_deviation();
                let low = el.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
                return Err(Error::Validation {
                    what: format!("POVM element {i}"),
                    role: "positive",
                    deviation: herm.max(-low),
                });
            }
            total = &total + el;
        }
        let deviation = total.max_abs_diff(&OperatorMatrix::identity(d));
        if deviation > TOL_PROB_SUM {
            return Err(Error::Validation {
                what: "POVM".into(),
                role: "complete (sum to identity)",
                deviation,
            });
        }
        Ok(Povm { elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        Povm {
            elements: (0..d)
                .map(|k| OperatorMatrix::matrix_unit(d, k, k))
                .collect(),
        }
    }

    /// Projective measurement in the discrete Fourier basis; for `d = 2`
    /// this is `{|+⟩⟨+|, |−⟩⟨−|}`.
    pub fn fourier(d: usize) -> Self {
        let norm = 1.0 / (d as f64);
        let elements = (0..d)
            .map(|j| {
                let entries: Vec<C64> = (0..d * d)
                    .map(|idx| {
                        let (r, c) = (idx / d, idx % d);
                        let angle = 2.0 * std::f64::consts::PI * (j as f64) * (r as f64 - c as f64)
                            / d as f64;
                        C64::from_polar(norm, angle)
                    })
                    .collect();
                OperatorMatrix::from_rows(d, &entries).unwrap()
            })
            .collect();
        Povm { elements }
    }

    /// `{1_K}`: Eve learns nothing.
    pub fn trivial(d: usize) -> Self {
        Povm {
            elements: vec![OperatorMatrix::identity(d)],
        }
    }

    /// Looks up `z`/`computational`, `x`/`fourier` or `trivial`.
    pub fn named(name: &str, d: usize) -> Result<Self> {
        match name {
            "z" | "computational" => Ok(Self::computational(d)),
            "x" | "fourier" => Ok(Self::fourier(d)),
            "trivial" => Ok(Self::trivial(d)),
            other => Err(Error::Domain(format!("unknown POVM `{other}`"))),
        }
    }

    /// Random `m`-outcome POVM from Gaussian factors.
    pub fn random<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<Self> {
        let factors: Vec<OperatorMatrix> = (0..m)
            .map(|_| OperatorMatrix::random_gaussian(d, rng))
            .collect();
        povm_from_factors(&factors)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcome_count(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[OperatorMatrix] {
        &self.elements
    }
}

/// `E_e = S^{-1/2} A_e†A_e S^{-1/2}` with `S = Σ_e A_e†A_e`.
pub fn povm_from_factors(factors: &[OperatorMatrix]) -> Result<Povm> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Domain("need at least one factor".into()))?;
    let d = first.dim();
    let mut grams = Vec::with_capacity(factors.len());
    let mut s = OperatorMatrix::zeros(d);
    for a in factors {
        if a.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                found: a.dim(),
            });
        }
        let g = &a.adjoint() * a;
        s = &s + &g;
        grams.push(g);
    }
    let smallest = s.hermitian_eigenvalues()[0];
    if smallest <= EIG_CLAMP {
        return Err(Error::Degenerate(format!(
            "factor Gram sum is singular (smallest eigenvalue {smallest:e})"
        )));
    }
    let inv_sqrt = s.hermitian_function(|l| C64::new(1.0 / l.sqrt(), 0.0));
    let elements = grams
        .iter()
        .map(|g| {
            let e = &(&inv_sqrt * g) * &inv_sqrt;
            // symmetrize away round-off
            (&e + &e.adjoint()).scale(C64::new(0.5, 0.0))
        })
        .collect();
    Povm::new(elements)
}

/// Settings for [`accessible_information`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Number of POVM outcomes; `None` means `d²`.
    pub outcome_count: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub f_tolerance: f64,
    pub x_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            outcome_count: None,
            restarts: 32,
            max_iterations: 4000,
            f_tolerance: 1e-12,
            x_tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Parameters("restarts must be at least 1".into()));
        }
        if matches!(self.outcome_count, Some(m) if m < 2) {
            return Err(Error::Parameters("outcome count must be at least 2".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            max_iterations: self.max_iterations,
            f_tolerance: self.f_tolerance,
            x_tolerance: self.x_tolerance,
            ..SimplexOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartStat {
    pub index: usize,
    pub bits: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Best measurement found by the search.
#[derive(Debug, Clone)]
pub struct AccessibleInfo {
    /// `I(A:E)` of `povm`; a lower bound on the accessible information.
    pub bits: f64,
    pub povm: Povm,
    /// Convergence flag of the winning restart.
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: Vec<RestartStat>,
}

/// Alice's outcome distribution together with Eve's conditional states.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub p: [f64; 2],
    pub states: [OperatorMatrix; 2],
}

impl Ensemble {
    pub fn from_attack(a: &AttackModel) -> Self {
        let s = sift_branch(a);
        Ensemble {
            p: s.p_a,
            states: s.rho_eve,
        }
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `p(z) · tr(ρ_z Ê_e)`.
    pub fn joint(&self, e: &Povm) -> Result<JointDistribution> {
        let row = |z: usize| -> Vec<f64> {
            e.elements()
                .iter()
                .map(|el| self.p[z] * (&self.states[z] * el).trace().re)
                .collect()
        };
        JointDistribution::new(row(0), row(1))
    }

    pub fn information(&self, e: &Povm) -> Result<f64> {
        mutual_information(&self.joint(e)?)
    }
}

/// Unpacks `m` complex `d × d` factors (row-major `(re, im)` pairs).
pub fn factors_from_params(params: &[f64], d: usize, m: usize) -> Result<Vec<OperatorMatrix>> {
    let per = 2 * d * d;
    if params.len() != per * m {
        return Err(Error::Parameters(format!(
            "expected {} factor parameters, got {}",
            per * m,
            params.len()
        )));
    }
    params
        .chunks(per)
        .map(|chunk| {
            let entries: Vec<C64> = chunk.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
            OperatorMatrix::from_rows(d, &entries)
        })
        .collect()
}

/// Parameters whose factors are `|k⟩⟨k|` for `k < d` and zero beyond, so
/// the resulting POVM is the computational basis padded with zero elements.
pub fn computational_factor_params(d: usize, m: usize) -> Vec<f64> {
    let per = 2 * d * d;
    let mut p = vec![0.0; per * m];
    for k in 0..d.min(m) {
        p[k * per + 2 * (k * d + k)] = 1.0;
    }
    p
}

/// Information obtained from factor parameters; zero for degenerate factors.
pub fn information_from_params(ens: &Ensemble, params: &[f64], m: usize) -> f64 {
    factors_from_params(params, ens.dim(), m)
        .and_then(|f| povm_from_factors(&f))
        .and_then(|e| ens.information(&e))
        .unwrap_or(0.0)
}

/// Searches Eve's POVMs for the largest `I(A:E)` on an ensemble.
///
/// Restart 0 starts at the computational-basis measurement; the others at
/// random factors drawn from stream `index` of the configured seed. The
/// winner is the largest result, ties going to the lower restart index.
pub fn optimize_povm(ens: &Ensemble, cfg: &OptimizerConfig) -> Result<(Povm, AccessibleInfoStats)> {
    cfg.validate()?;
    let d = ens.dim();
    let m = cfg.outcome_count.unwrap_or(d * d);
    let opts = cfg.simplex();

    let runs: Vec<(Vec<f64>, RestartStat)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let x0 = if index == 0 {
                computational_factor_params(d, m)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(index as u64);
                (0..2 * d * d * m)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect()
            };
            let r = simplex::minimize(|p| -information_from_params(ens, p, m), &x0, &opts);
            let stat = RestartStat {
                index,
                bits: -r.value,
                iterations: r.iterations,
                converged: r.converged,
            };
            (r.x, stat)
        })
        .collect();

    let mut best = 0;
    for (i, (_, stat)) in runs.iter().enumerate() {
        if stat.bits > runs[best].1.bits {
            best = i;
        }
    }
    let factors = factors_from_params(&runs[best].0, d, m)?;
    let povm = match povm_from_factors(&factors) {
        Ok(p) => p,
        // only reachable if every restart collapsed; fall back to the start point
        Err(_) => Povm::computational(d),
    };
    let stats = AccessibleInfoStats {
        converged: runs[best].1.converged,
        best_restart: best,
        restarts: runs.into_iter().map(|(_, s)| s).collect(),
    };
    Ok((povm, stats))
}

#[derive(Debug, Clone)]
pub struct AccessibleInfoStats {
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: Vec<RestartStat>,
}

/// Lower bound on Eve's accessible information about Alice's SIFT bit.
pub fn accessible_information(a: &AttackModel, cfg: &OptimizerConfig) -> Result<AccessibleInfo> {
    let ens = Ensemble::from_attack(a);
    let (povm, stats) = optimize_povm(&ens, cfg)?;
    let bits = eve_information(a, &povm)?;
    Ok(AccessibleInfo {
        bits,
        povm,
        converged: stats.converged,
        best_restart: stats.best_restart,
        restarts: stats.restarts,
    })
}

/// `χ = S(p₀ρ₀ + p₁ρ₁) − p₀S(ρ₀) − p₁S(ρ₁)`.
pub fn holevo_bound(rho0: &OperatorMatrix, rho1: &OperatorMatrix, p: [f64; 2]) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::Dimension {
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    if p.iter().any(|&x| x < -EIG_CLAMP) || (p[0] + p[1] - 1.0).abs() > TOL_PROB_SUM {
        return Err(Error::Domain(format!("invalid prior {p:?}")));
    }
    for (z, rho) in [rho0, rho1].into_iter().enumerate() {
        if p[z] > DEGENERATE_BRANCH
            && (!rho.is_positive() || (rho.trace().re - 1.0).abs() > TOL_POSITIVE)
        {
            return Err(Error::Validation {
                what: format!("rho_{z}"),
                role: "a density operator",
                deviation: (rho.trace().re - 1.0).abs(),
            });
        }
    }
    let w = |z: usize| C64::new(p[z].max(0.0), 0.0);
    let avg = &rho0.scale(w(0)) + &rho1.scale(w(1));
    let mut chi = von_neumann_entropy(&avg)?;
    for (z, rho) in [rho0, rho1].into_iter().enumerate() {
        if p[z] > DEGENERATE_BRANCH {
            chi -= p[z] * von_neumann_entropy(rho)?;
        }
    }
    Ok(chi.max(0.0))
}

/// Holevo quantity of Eve's SIFT ensemble for an attack.
pub fn attack_holevo(a: &AttackModel) -> Result<f64> {
    let ens = Ensemble::from_attack(a);
    holevo_bound(&ens.states[0], &ens.states[1], ens.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;

    #[test]
    fn named_povms_validate() {
        for d in 1..=5 {
            for e in [Povm::computational(d), Povm::fourier(d), Povm::trivial(d)] {
                Povm::new(e.elements().to_vec()).unwrap();
            }
        }
        let x = Povm::fourier(2);
        assert!(x.elements()[0].max_abs_diff(&StateVector::plus().projector()) < 1e-15);
        assert!(x.elements()[1].max_abs_diff(&StateVector::minus().projector()) < 1e-15);
    }

    #[test]
    fn factor_construction() {
        let single = povm_from_factors(&[OperatorMatrix::identity(3)]).unwrap();
        assert!(single.elements()[0].max_abs_diff(&OperatorMatrix::identity(3)) < 1e-15);

        let z = Povm::computational(2);
        let rebuilt = povm_from_factors(z.elements()).unwrap();
        for (a, b) in rebuilt.elements().iter().zip(z.elements()) {
            assert!(a.max_abs_diff(b) < 1e-14);
        }

        let singular = [OperatorMatrix::matrix_unit(2, 0, 0)];
        assert!(matches!(
            povm_from_factors(&singular),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn random_factors_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 1..=4 {
            for m in 1..=6 {
                let e = Povm::random(d, m, &mut rng).unwrap();
                // oracle: sum the elements directly
                let mut total = OperatorMatrix::zeros(d);
                for el in e.elements() {
                    total = &total + el;
                }
                assert!(total.max_abs_diff(&OperatorMatrix::identity(d)) < 1e-9);
            }
        }
    }

    #[test]
    fn povm_rejects_incomplete_and_indefinite() {
        let half = OperatorMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            Povm::new(vec![half.clone()]),
            Err(Error::Validation { .. })
        ));
        let indefinite = OperatorMatrix::diagonal(&[C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        let rest = OperatorMatrix::diagonal(&[C64::new(-0.5, 0.0), C64::new(1.5, 0.0)]);
        assert!(matches!(
            Povm::new(vec![indefinite, rest]),
            Err(Error::Validation {
                role: "positive",
                ..
            })
        ));
        assert!(Povm::new(vec![]).is_err());
    }

    #[test]
    fn holevo_fixtures() {
        let k0 = StateVector::basis(2, 0).projector();
        let k1 = StateVector::basis(2, 1).projector();
        let plus = StateVector::plus().projector();
        assert!(holevo_bound(&plus, &plus, [0.5, 0.5]).unwrap().abs() < 1e-12);
        assert!((holevo_bound(&k0, &k1, [0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        // average state has eigenvalues (1 ± 1/√2)/2
        let l = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let oracle = -(l * l.log2() + (1.0 - l) * (1.0 - l).log2());
        let chi = holevo_bound(&k0, &plus, [0.5, 0.5]).unwrap();
        assert!((chi - oracle).abs() < 1e-12);
        assert!((chi - 0.600_876).abs() < 1e-6);
    }

    #[test]
    fn computational_start_point_is_the_z_basis() {
        let p = computational_factor_params(2, 4);
        let e = povm_from_factors(&factors_from_params(&p, 2, 4).unwrap()).unwrap();
        assert!(e.elements()[0].max_abs_diff(&OperatorMatrix::matrix_unit(2, 0, 0)) < 1e-15);
        assert!(e.elements()[1].max_abs_diff(&OperatorMatrix::matrix_unit(2, 1, 1)) < 1e-15);
        assert!(e.elements()[3].max_abs_diff(&OperatorMatrix::zeros(2)) < 1e-15);
    }

    #[test]
    fn config_validation() {
        let ens = Ensemble::from_attack(&AttackModel::identity(2));
        let bad = OptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(optimize_povm(&ens, &bad).is_err());
        let bad = OptimizerConfig {
            outcome_count: Some(1),
            ..Default::default()
        };
        assert!(optimize_povm(&ens, &bad).is_err());
    }
}
