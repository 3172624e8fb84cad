//! The pure-state separability functional.
//!
//! For a normalized amplitude vector `a` and each family operator `S` the
//! building block is the *bilinear* form `|a^T S a|` — transpose, not
//! conjugate-transpose. The bilinear form is what vanishes identically on
//! product states with complex amplitudes (each antisymmetric factor
//! contributes `u^T L u = 0`) and what reduces to the two-qubit concurrence.
//! The aggregate is the Euclidean norm of the per-operator magnitudes scaled
//! by `1/sqrt(N(N-1)/2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{OperatorFamily, SOperator};
use crate::states::PureState;

/// Default absolute tolerance under which the functional counts as zero.
/// The forms are degree-2 polynomials in unit-norm amplitudes, so an
/// absolute threshold is scale-stable.
pub const DEFAULT_EPS_PURE: f64 = 1e-9;

/// One operator's contribution to the functional.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorContribution {
    /// Position of the operator in the family's canonical order.
    pub index: usize,
    /// Factor descriptor, e.g. `L(0,1) x L(0,1) x I`.
    pub tag: String,
    /// `|a^T S a|`.
    pub magnitude: f64,
}

/// Evaluation of the functional on a pure state.
#[derive(Debug, Clone, Serialize)]
pub struct PureCriterionReport {
    /// Aggregate value of the functional.
    pub value: f64,
    /// Tolerance used for the verdict.
    pub epsilon: f64,
    /// `value <= epsilon`.
    pub separable: bool,
    /// `1/sqrt(N(N-1)/2)`.
    pub normalization: f64,
    pub per_operator: Vec<OperatorContribution>,
}

/// `|a^T S a|` for one family operator.
pub fn bilinear_form(state: &PureState, op: &SOperator) -> Result<f64> {
    if state.dims() != op.dims() {
        return Err(Error::DimsMismatch {
            left: state.dims().as_slice().to_vec(),
            right: op.dims().as_slice().to_vec(),
        });
    }
    Ok(linalg::bilinear(op.matrix(), state.amplitudes()).norm())
}

/// Evaluates the functional over the whole family and renders the
/// per-operator breakdown.
pub fn c_pure(state: &PureState, family: &OperatorFamily) -> Result<PureCriterionReport> {
    c_pure_with_eps(state, family, DEFAULT_EPS_PURE)
}

/// [`c_pure`] with an explicit verdict tolerance.
pub fn c_pure_with_eps(
    state: &PureState,
    family: &OperatorFamily,
    epsilon: f64,
) -> Result<PureCriterionReport> {
    if state.dims() != family.dims() {
        return Err(Error::DimsMismatch {
            left: state.dims().as_slice().to_vec(),
            right: family.dims().as_slice().to_vec(),
        });
    }
    let mut per_operator = Vec::with_capacity(family.len());
    let mut sum_sq = 0.0;
    for (index, op) in family.iter().enumerate() {
        let magnitude = bilinear_form(state, op)?;
        sum_sq += magnitude * magnitude;
        per_operator.push(OperatorContribution {
            index,
            tag: op.tag(),
            magnitude,
        });
    }
    let value = family.normalization() * sum_sq.sqrt();
    Ok(PureCriterionReport {
        value,
        epsilon,
        separable: value <= epsilon,
        normalization: family.normalization(),
        per_operator,
    })
}

/// `true` iff the functional is at most `epsilon`.
pub fn verdict_pure(state: &PureState, family: &OperatorFamily, epsilon: f64) -> Result<bool> {
    Ok(c_pure_with_eps(state, family, epsilon)?.separable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::SubsystemDims;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn dims(v: &[usize]) -> SubsystemDims {
        SubsystemDims::new(v.to_vec()).unwrap()
    }

    fn family(v: &[usize]) -> OperatorFamily {
        OperatorFamily::enumerate(&dims(v)).unwrap()
    }

    fn ghz3() -> PureState {
        PureState::from_real(dims(&[2, 2, 2]), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn w3() -> PureState {
        PureState::from_real(dims(&[2, 2, 2]), &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn bell_single_operator_gives_one() {
        let fam = family(&[2, 2]);
        let bell = PureState::from_real(dims(&[2, 2]), &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let form = bilinear_form(&bell, &fam.operators()[0]).unwrap();
        assert_relative_eq!(form, 1.0, epsilon = 1e-14);
        let report = c_pure(&bell, &fam).unwrap();
        assert_relative_eq!(report.value, 1.0, epsilon = 1e-14);
        assert!(!report.separable);
    }

    #[test]
    fn basis_state_kills_every_form() {
        let fam = family(&[2, 2, 2]);
        let zero =
            PureState::from_real(dims(&[2, 2, 2]), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
                .unwrap();
        for op in &fam {
            assert_eq!(bilinear_form(&zero, op).unwrap(), 0.0);
        }
        assert!(verdict_pure(&zero, &fam, DEFAULT_EPS_PURE).unwrap());
    }

    #[test]
    fn ghz_per_operator_breakdown() {
        // Hand evaluation of the six 8x8 forms: the two-generator patterns
        // vanish, each pattern with one absolute factor contributes 1.
        let fam = family(&[2, 2, 2]);
        let report = c_pure(&ghz3(), &fam).unwrap();
        for contrib in &report.per_operator {
            let op = &fam.operators()[contrib.index];
            let expected = if op.abs_count() == 0 { 0.0 } else { 1.0 };
            assert_relative_eq!(contrib.magnitude, expected, epsilon = 1e-14);
        }
        assert_relative_eq!(report.value, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn w_state_value_two_thirds() {
        // Hand evaluation: each two-generator pattern gives 2/3, the
        // absolute-factor patterns vanish; total = 2/3.
        let fam = family(&[2, 2, 2]);
        let report = c_pure(&w3(), &fam).unwrap();
        let mut plain = 0;
        for contrib in &report.per_operator {
            let op = &fam.operators()[contrib.index];
            if op.abs_count() == 0 {
                assert_relative_eq!(contrib.magnitude, 2.0 / 3.0, epsilon = 1e-14);
                plain += 1;
            } else {
                assert_relative_eq!(contrib.magnitude, 0.0, epsilon = 1e-14);
            }
        }
        assert_eq!(plain, 3);
        assert_relative_eq!(report.value, 2.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn bell_times_basis_value() {
        // Bell on subsystems 0,1 tensored with |0>: only the generator pair
        // on (0,1) survives, giving 1; total = 1/sqrt(3).
        let amps = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let state = PureState::from_real(dims(&[2, 2, 2]), &amps).unwrap();
        let fam = family(&[2, 2, 2]);
        let report = c_pure(&state, &fam).unwrap();
        assert_relative_eq!(report.value, 1.0 / 3f64.sqrt(), epsilon = 1e-13);
        assert!(!report.separable);
    }

    #[test]
    fn product_state_with_complex_amplitudes_vanishes() {
        // (u ⊗ v ⊗ w) with complex entries; every bilinear form contains a
        // factor u^T L u = 0.
        let u = [Complex64::new(0.3, 0.4), Complex64::new(-0.8, 0.1)];
        let v = [Complex64::new(0.6, -0.2), Complex64::new(0.5, 0.5)];
        let w = [Complex64::new(0.1, 0.9), Complex64::new(0.2, -0.3)];
        let mut amps = Vec::new();
        for a in &u {
            for b in &v {
                for c in &w {
                    amps.push(a * b * c);
                }
            }
        }
        let state = PureState::new(dims(&[2, 2, 2]), amps).unwrap();
        let fam = family(&[2, 2, 2]);
        let report = c_pure(&state, &fam).unwrap();
        assert!(report.value <= 1e-10, "value {}", report.value);
        assert!(report.separable);
    }

    #[test]
    fn aggregate_is_norm_of_contributions() {
        let fam = family(&[2, 2, 2]);
        let report = c_pure(&w3(), &fam).unwrap();
        let sum_sq: f64 = report.per_operator.iter().map(|c| c.magnitude * c.magnitude).sum();
        assert_relative_eq!(
            report.value,
            report.normalization * sum_sq.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dims_mismatch_rejected() {
        let fam = family(&[2, 2]);
        let err = c_pure(&ghz3(), &fam).unwrap_err();
        assert!(matches!(err, Error::DimsMismatch { .. }));
    }
}
