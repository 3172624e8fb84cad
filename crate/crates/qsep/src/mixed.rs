//! The mixed-state separability criterion.
//!
//! A density matrix is reduced to its rank-truncated eigendecomposition and
//! each family operator `S_a` is compressed to an `r x r` complex symmetric
//! matrix `A_a = M^{1/2} Phi^T S_a Phi M^{1/2}`. For a weight vector `z` on
//! the unit sphere the matrix `F(z) = normalization * sum_a z_a A_a` has
//! singular values `l_1 >= l_2 >= ...`, and the criterion value is
//!
//! ```text
//! C(rho) = max{ 0, max_z  l_1(z) - sum_{i>1} l_i(z) }
//! ```
//!
//! The inner maximum is searched by multistart Nelder-Mead. By default `z`
//! ranges over the full complex unit sphere; magnitudes-only optimization
//! over the nonnegative sphere is available as an alternative domain, but it
//! underestimates whenever the bilinear forms of the eigenvectors carry
//! incompatible phases (already for rank-1 states), so the complex domain is
//! the default.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::OperatorFamily;
use crate::optim::{self, NelderMeadOptions};
use crate::states::{DensityMatrix, SpectralDecomposition, DEFAULT_TRUNC_TOL};

/// Default verdict tolerance. Looser than the pure-state tolerance because
/// the value is the output of an optimizer.
pub const DEFAULT_EPS_MIXED: f64 = 1e-7;

/// Domain the weight vector is optimized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightDomain {
    /// Full complex unit sphere (per-operator phases).
    Complex,
    /// Nonnegative real unit sphere (magnitudes only).
    NonNegative,
}

impl fmt::Display for WeightDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDomain::Complex => write!(f, "complex"),
            WeightDomain::NonNegative => write!(f, "nonnegative"),
        }
    }
}

/// Multistart search configuration. Every run with the same configuration
/// produces the same result; restart `k` draws its start point from an RNG
/// stream derived from `(seed, k)`, so enlarging the restart budget never
/// changes earlier restarts.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Objective-evaluation budget per restart.
    pub max_evals: usize,
    /// Function-value spread at which a restart counts as converged.
    pub ftol: f64,
    pub seed: u64,
    pub domain: WeightDomain,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_evals: 2000,
            ftol: 1e-10,
            seed: 0,
            domain: WeightDomain::Complex,
        }
    }
}

/// The operator family compressed onto the support of a density matrix.
#[derive(Debug, Clone)]
pub struct AMatrixSet {
    rank: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

impl AMatrixSet {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }
}

/// `A_a = M^{1/2} Phi^T S_a Phi M^{1/2}` for every family operator.
/// Each `A_a` inherits symmetry from `S_a`.
pub fn a_matrices(spec: &SpectralDecomposition, family: &OperatorFamily) -> Result<AMatrixSet> {
    if spec.dims() != family.dims() {
        return Err(Error::DimsMismatch {
            left: spec.dims().as_slice().to_vec(),
            right: family.dims().as_slice().to_vec(),
        });
    }
    let weighted = spec.weighted_vectors(); // Phi M^{1/2}, D x r
    let matrices = family
        .iter()
        .map(|op| weighted.transpose() * op.matrix() * &weighted)
        .collect();
    Ok(AMatrixSet {
        rank: spec.rank(),
        matrices,
    })
}

/// Objective value at one weight vector.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveEval {
    /// `l_1 - sum_{i>1} l_i`.
    pub value: f64,
    /// Singular values of `F(z)`, decreasing.
    pub singular_values: Vec<f64>,
}

/// Builds `F(z) = normalization * sum_a z_a A_a` and returns the
/// singular-value gap objective.
pub fn objective(z: &[Complex64], amats: &AMatrixSet, normalization: f64) -> Result<ObjectiveEval> {
    if z.len() != amats.len() {
        return Err(Error::LengthMismatch {
            expected: amats.len(),
            got: z.len(),
        });
    }
    let r = amats.rank();
    let mut f = DMatrix::<Complex64>::zeros(r, r);
    for (w, a) in z.iter().zip(amats.matrices()) {
        f += a * Complex64::new(w.re * normalization, w.im * normalization);
    }
    let singular_values = linalg::singular_values_desc(&f)?;
    let value = singular_values[0] - singular_values[1..].iter().sum::<f64>();
    Ok(ObjectiveEval {
        value,
        singular_values,
    })
}

/// The weight vector the optimizer settled on.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationPoint {
    /// Complex weights as `[re, im]` pairs; the magnitude vector has unit
    /// Euclidean norm.
    pub z: Vec<[f64; 2]>,
    /// Magnitudes `|z_a|`.
    pub y: Vec<f64>,
    /// `l_1 - sum_{i>1} l_i` at this point.
    pub objective: f64,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerDiagnostics {
    pub restarts: usize,
    pub total_evals: usize,
    pub converged_restarts: usize,
    /// Restart index that produced the best value.
    pub best_restart: usize,
    pub seed: u64,
    pub domain: WeightDomain,
}

/// Evaluation of the criterion on a density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct MixedCriterionReport {
    /// `max{0, raw_objective}`.
    pub value: f64,
    pub epsilon: f64,
    pub separable: bool,
    /// Best objective found, before clamping at zero.
    pub raw_objective: f64,
    pub rank: usize,
    pub family_size: usize,
    pub best_point: OptimizationPoint,
    pub diagnostics: OptimizerDiagnostics,
}

fn embed(x: &[f64], domain: WeightDomain) -> Option<Vec<Complex64>> {
    match domain {
        WeightDomain::Complex => {
            let k = x.len() / 2;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return None;
            }
            Some(
                (0..k)
                    .map(|a| Complex64::new(x[2 * a] / norm, x[2 * a + 1] / norm))
                    .collect(),
            )
        }
        WeightDomain::NonNegative => {
            // Square-then-normalize keeps the iterate on the nonnegative
            // part of the sphere without constraints.
            let y: Vec<f64> = x.iter().map(|v| v * v).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return None;
            }
            Some(y.iter().map(|v| Complex64::new(v / norm, 0.0)).collect())
        }
    }
}

/// Maximizes the singular-value gap objective by multistart Nelder-Mead and
/// reports `max{0, best}`. Non-convergence within the budget is reported in
/// the diagnostics, never silently dropped.
pub fn c_mixed(
    rho: &DensityMatrix,
    family: &OperatorFamily,
    config: &OptimizerConfig,
) -> Result<MixedCriterionReport> {
    c_mixed_with_eps(rho, family, config, DEFAULT_EPS_MIXED)
}

/// [`c_mixed`] with an explicit verdict tolerance.
pub fn c_mixed_with_eps(
    rho: &DensityMatrix,
    family: &OperatorFamily,
    config: &OptimizerConfig,
    epsilon: f64,
) -> Result<MixedCriterionReport> {
    if rho.dims() != family.dims() {
        return Err(Error::DimsMismatch {
            left: rho.dims().as_slice().to_vec(),
            right: family.dims().as_slice().to_vec(),
        });
    }
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty operator family".into()));
    }
    let spec = rho.spectral(DEFAULT_TRUNC_TOL)?;
    let amats = a_matrices(&spec, family)?;
    let normalization = family.normalization();
    let k = amats.len();
    let dim = match config.domain {
        WeightDomain::Complex => 2 * k,
        WeightDomain::NonNegative => k,
    };

    let mut first_error: Option<Error> = None;
    let mut best: Option<(f64, Vec<Complex64>, usize)> = None;
    let mut total_evals = 0usize;
    let mut converged_restarts = 0usize;

    let nm = NelderMeadOptions {
        max_evals: config.max_evals,
        ftol: config.ftol,
        initial_step: 0.5,
    };

    for restart in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64);
        let x0: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();

        let result = optim::minimize(
            |x| match embed(x, config.domain) {
                Some(z) => match objective(&z, &amats, normalization) {
                    Ok(eval) => -eval.value,
                    Err(e) => {
                        if first_error.is_none() {
                            first_error = Some(e);
                        }
                        f64::INFINITY
                    }
                },
                None => f64::INFINITY,
            },
            &x0,
            &nm,
        );
        total_evals += result.evals;
        if result.converged {
            converged_restarts += 1;
        }
        if result.value.is_finite() {
            let found = -result.value;
            if best.as_ref().map_or(true, |(b, _, _)| found > *b) {
                let z = embed(&result.x, config.domain)
                    .expect("finite objective implies a valid embedding");
                best = Some((found, z, restart));
            }
        }
    }

    let (_, best_z, best_restart) = match best {
        Some(b) => b,
        None => {
            return Err(first_error.unwrap_or_else(|| {
                Error::Numerical("optimizer found no finite objective value".into())
            }))
        }
    };
    // Re-evaluate at the best point for the definitive value and spectrum.
    let eval = objective(&best_z, &amats, normalization)?;
    let raw_objective = eval.value;
    let value = raw_objective.max(0.0);

    Ok(MixedCriterionReport {
        value,
        epsilon,
        separable: value <= epsilon,
        raw_objective,
        rank: amats.rank(),
        family_size: k,
        best_point: OptimizationPoint {
            z: best_z.iter().map(|w| [w.re, w.im]).collect(),
            y: best_z.iter().map(|w| w.norm()).collect(),
            objective: eval.value,
            singular_values: eval.singular_values,
        },
        diagnostics: OptimizerDiagnostics {
            restarts: config.restarts.max(1),
            total_evals,
            converged_restarts,
            best_restart,
            seed: config.seed,
            domain: config.domain,
        },
    })
}

/// `true` iff the criterion value is at most `epsilon`.
pub fn verdict_mixed(
    rho: &DensityMatrix,
    family: &OperatorFamily,
    config: &OptimizerConfig,
    epsilon: f64,
) -> Result<bool> {
    Ok(c_mixed_with_eps(rho, family, config, epsilon)?.separable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pure;
    use crate::states::{PureState, SubsystemDims};
    use approx::assert_relative_eq;

    fn dims(v: &[usize]) -> SubsystemDims {
        SubsystemDims::new(v.to_vec()).unwrap()
    }

    fn family(v: &[usize]) -> OperatorFamily {
        OperatorFamily::enumerate(&dims(v)).unwrap()
    }

    fn bell() -> PureState {
        PureState::from_real(dims(&[2, 2]), &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn ghz3() -> PureState {
        PureState::from_real(dims(&[2, 2, 2]), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        let d = dims(&[2, 2]);
        let b = bell();
        let proj = b.amplitudes() * b.amplitudes().adjoint();
        let m = proj * Complex64::new(p, 0.0)
            + DMatrix::<Complex64>::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
        DensityMatrix::new(d, m).unwrap()
    }

    fn quick_config() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 12,
            max_evals: 1500,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn a_matrices_of_pure_state_are_scalars() {
        let fam = family(&[2, 2, 2]);
        let state = ghz3();
        let spec = state.to_density().spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        assert_eq!(amats.rank(), 1);
        for (a, op) in amats.matrices().iter().zip(fam.iter()) {
            assert_eq!(a.nrows(), 1);
            let direct = pure::bilinear_form(&state, op).unwrap();
            assert_relative_eq!(a[(0, 0)].norm(), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn a_matrices_of_maximally_mixed_keep_singular_values() {
        // Phi is unitary, so A_a = Phi^T S_a Phi / D has the singular values
        // of S_a / D. For qubit pairs those are all 1/4.
        let fam = family(&[2, 2]);
        let rho = DensityMatrix::new(
            dims(&[2, 2]),
            DMatrix::identity(4, 4) * Complex64::new(0.25, 0.0),
        )
        .unwrap();
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        let sv = linalg::singular_values_desc(&amats.matrices()[0]).unwrap();
        for v in sv {
            assert_relative_eq!(v, 0.25, epsilon = 1e-10);
        }
    }

    #[test]
    fn a_matrices_symmetric() {
        let fam = family(&[2, 2, 2]);
        let rho = werner_like_three_qubit();
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        for a in amats.matrices() {
            let dev = (a - a.transpose()).norm();
            assert!(dev < 1e-10, "asymmetry {dev}");
        }
    }

    fn werner_like_three_qubit() -> DensityMatrix {
        let g = ghz3();
        let proj = g.amplitudes() * g.amplitudes().adjoint();
        let m = proj * Complex64::new(0.6, 0.0)
            + DMatrix::<Complex64>::identity(8, 8) * Complex64::new(0.05, 0.0);
        DensityMatrix::new(dims(&[2, 2, 2]), m).unwrap()
    }

    #[test]
    fn objective_rank_one_is_single_singular_value() {
        let fam = family(&[2, 2, 2]);
        let spec = ghz3().to_density().spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        let z: Vec<Complex64> = (0..amats.len())
            .map(|_| Complex64::new(1.0 / (amats.len() as f64).sqrt(), 0.0))
            .collect();
        let eval = objective(&z, &amats, fam.normalization()).unwrap();
        assert_eq!(eval.singular_values.len(), 1);
        assert_relative_eq!(eval.value, eval.singular_values[0], epsilon = 1e-15);
    }

    #[test]
    fn objective_zero_matrix_is_zero() {
        let fam = family(&[2, 2]);
        let rho = werner(0.25); // rank 4
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        let z = vec![Complex64::new(0.0, 0.0)];
        // A zero weight vector gives the zero matrix; objective 0.
        let eval = objective(&z, &amats, 0.0).unwrap();
        assert_eq!(eval.value, 0.0);
    }

    #[test]
    fn objective_wrong_length_rejected() {
        let fam = family(&[2, 2]);
        let spec = bell().to_density().spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        let z = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            objective(&z, &amats, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pure_ghz_value_is_one() {
        let fam = family(&[2, 2, 2]);
        let rho = ghz3().to_density();
        let report = c_mixed(&rho, &fam, &quick_config()).unwrap();
        assert_relative_eq!(report.value, 1.0, epsilon = 1e-6);
        assert!(!report.separable);
        assert_eq!(report.rank, 1);
    }

    #[test]
    fn werner_matches_closed_form() {
        let fam = family(&[2, 2]);
        for p in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let rho = werner(p);
            let report = c_mixed(&rho, &fam, &quick_config()).unwrap();
            let expected = (0.0f64).max((3.0 * p - 1.0) / 2.0);
            assert_relative_eq!(report.value, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn verdict_examples() {
        let fam = family(&[2, 2]);
        let cfg = quick_config();
        assert!(verdict_mixed(&werner(0.2), &fam, &cfg, DEFAULT_EPS_MIXED).unwrap());
        let report = c_mixed(&werner(0.8), &fam, &cfg).unwrap();
        assert!(!report.separable);
        assert_relative_eq!(report.value, 0.7, epsilon = 1e-6);
    }

    #[test]
    fn maximally_mixed_three_qubits_separable() {
        let fam = family(&[2, 2, 2]);
        let rho = DensityMatrix::new(
            dims(&[2, 2, 2]),
            DMatrix::identity(8, 8) * Complex64::new(0.125, 0.0),
        )
        .unwrap();
        let report = c_mixed(&rho, &fam, &quick_config()).unwrap();
        assert!(report.separable, "value {}", report.value);
    }

    #[test]
    fn global_phase_on_a_matrices_leaves_objective_unchanged() {
        let fam = family(&[2, 2]);
        let rho = werner(0.7);
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        let amats = a_matrices(&spec, &fam).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = AMatrixSet {
            rank: amats.rank(),
            matrices: amats.matrices().iter().map(|a| a * phase).collect(),
        };
        let z = vec![Complex64::new(1.0, 0.0)];
        let e1 = objective(&z, &amats, 1.0).unwrap();
        let e2 = objective(&z, &rotated, 1.0).unwrap();
        assert_relative_eq!(e1.value, e2.value, epsilon = 1e-12);
    }

    #[test]
    fn restart_budget_is_monotone() {
        let fam = family(&[2, 2, 2]);
        let rho = werner_like_three_qubit();
        let mut few = quick_config();
        few.restarts = 3;
        let mut many = quick_config();
        many.restarts = 10;
        let v_few = c_mixed(&rho, &fam, &few).unwrap().value;
        let v_many = c_mixed(&rho, &fam, &many).unwrap().value;
        assert!(v_many >= v_few);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let fam = family(&[2, 2, 2]);
        let rho = werner_like_three_qubit();
        let cfg = quick_config();
        let a = c_mixed(&rho, &fam, &cfg).unwrap();
        let b = c_mixed(&rho, &fam, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_point.z, b.best_point.z);
        assert_eq!(a.diagnostics.total_evals, b.diagnostics.total_evals);
    }

    #[test]
    fn dims_mismatch_rejected() {
        let fam = family(&[2, 2]);
        let rho = ghz3().to_density();
        assert!(matches!(
            c_mixed(&rho, &fam, &quick_config()),
            Err(Error::DimsMismatch { .. })
        ));
    }
}
