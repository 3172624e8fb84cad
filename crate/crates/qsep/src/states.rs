//! State representations: subsystem dimensions, pure states, density
//! matrices and their spectral decompositions.
//!
//! Amplitude vectors are stored in row-major multi-index order with the
//! *last* subsystem index varying fastest, i.e. a three-party state is laid
//! out as `(a_000, a_001, ..., a_00(n3-1), a_010, ...)`. Every module in the
//! crate shares this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Default cap on the total Hilbert-space dimension. Everything here is
/// dense, so the cap keeps memory and eigendecompositions tractable.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Max element-wise deviation from Hermiticity accepted by [`DensityMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Trace window accepted by [`DensityMatrix::new`]; the matrix is rescaled
/// to unit trace inside the window and rejected outside it.
pub const TRACE_TOL: f64 = 1e-6;

/// Most negative eigenvalue tolerated before a matrix is rejected as
/// not positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

/// Default relative eigenvalue-truncation threshold for [`DensityMatrix::spectral`].
pub const DEFAULT_TRUNC_TOL: f64 = 1e-12;

/// Ordered list of subsystem dimensions `n_1..n_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
    total: usize,
}

impl SubsystemDims {
    /// Validates `dims` against the default total-dimension cap.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    /// Validates `dims` against an explicit total-dimension cap.
    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::TooFewSubsystems(dims.len()));
        }
        for (position, &dim) in dims.iter().enumerate() {
            if dim < 2 {
                return Err(Error::DimensionTooSmall { position, dim });
            }
        }
        let mut total: usize = 1;
        for &dim in &dims {
            total = total
                .checked_mul(dim)
                .ok_or(Error::TotalDimensionTooLarge { total: usize::MAX, cap })?;
        }
        if total > cap {
            return Err(Error::TotalDimensionTooLarge { total, cap });
        }
        Ok(Self { dims, total })
    }

    /// Number of subsystems `N`.
    pub fn count(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of subsystem `p` (zero-based).
    pub fn dim(&self, p: usize) -> usize {
        self.dims[p]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension `D`.
    pub fn total_dim(&self) -> usize {
        self.total
    }

    /// Row-major strides (last subsystem fastest).
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for p in (0..n.saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * self.dims[p + 1];
        }
        strides
    }

    /// Linear index of a multi-index.
    pub fn ravel(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        self.strides()
            .iter()
            .zip(multi)
            .map(|(s, i)| s * i)
            .sum()
    }

    /// Multi-index of a linear index.
    pub fn unravel(&self, linear: usize) -> Vec<usize> {
        debug_assert!(linear < self.total);
        let mut rest = linear;
        let mut multi = vec![0usize; self.dims.len()];
        for (p, s) in self.strides().iter().enumerate() {
            multi[p] = rest / s;
            rest %= s;
        }
        multi
    }
}

/// Normalized pure state over a set of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: SubsystemDims,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Builds a pure state, normalizing the raw amplitudes. Inputs with zero
    /// norm or the wrong length are rejected.
    pub fn new(dims: SubsystemDims, raw: Vec<Complex64>) -> Result<Self> {
        if raw.len() != dims.total_dim() {
            return Err(Error::LengthMismatch {
                expected: dims.total_dim(),
                got: raw.len(),
            });
        }
        let v = DVector::from_vec(raw);
        let norm = v.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            dims,
            amplitudes: v / Complex64::new(norm, 0.0),
        })
    }

    /// Convenience constructor from real amplitudes.
    pub fn from_real(dims: SubsystemDims, raw: &[f64]) -> Result<Self> {
        Self::new(dims, raw.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Flattens the amplitude tensor into an `n_p x (D / n_p)` matrix whose
    /// row index is the index of subsystem `p` and whose column index is the
    /// row-major flattening of the remaining subsystem indices. The state is
    /// a product across the `p | rest` cut exactly when this matrix has rank 1.
    pub fn matricize(&self, p: usize) -> Result<DMatrix<Complex64>> {
        let n = self.dims.count();
        if p >= n {
            return Err(Error::SubsystemOutOfRange { index: p, count: n });
        }
        let rows = self.dims.dim(p);
        let cols = self.dims.total_dim() / rows;

        // Strides of the remaining subsystems in their original order.
        let rest_dims: Vec<usize> = (0..n).filter(|&q| q != p).map(|q| self.dims.dim(q)).collect();
        let mut rest_strides = vec![1usize; rest_dims.len()];
        for q in (0..rest_dims.len().saturating_sub(1)).rev() {
            rest_strides[q] = rest_strides[q + 1] * rest_dims[q + 1];
        }

        let mut out = DMatrix::zeros(rows, cols);
        for linear in 0..self.dims.total_dim() {
            let multi = self.dims.unravel(linear);
            let row = multi[p];
            let col: usize = multi
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .zip(&rest_strides)
                .map(|((_, &i), s)| i * s)
                .sum();
            out[(row, col)] = self.amplitudes[linear];
        }
        Ok(out)
    }

    /// Reorders subsystems: entry `q` of the result is old subsystem `perm[q]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.dims.count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let new_dims = SubsystemDims::new(perm.iter().map(|&q| self.dims.dim(q)).collect())?;
        let mut amps = vec![Complex64::default(); self.dims.total_dim()];
        let mut old_multi = vec![0usize; n];
        for (new_linear, amp) in amps.iter_mut().enumerate() {
            let new_multi = new_dims.unravel(new_linear);
            for (q, &i) in new_multi.iter().enumerate() {
                old_multi[perm[q]] = i;
            }
            *amp = self.amplitudes[self.dims.ravel(&old_multi)];
        }
        Ok(PureState {
            dims: new_dims,
            amplitudes: DVector::from_vec(amps),
        })
    }

    /// The projector `|psi><psi|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_validated(self.dims.clone(), m)
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: SubsystemDims,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and stores a density matrix. The trace may deviate from 1
    /// by at most [`TRACE_TOL`] (the matrix is rescaled to unit trace);
    /// Hermiticity and positivity violations beyond tolerance are rejected.
    pub fn new(dims: SubsystemDims, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = dims.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: d,
            });
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                trace_im: trace.im,
                tolerance: TRACE_TOL,
            });
        }
        let matrix = matrix / Complex64::new(trace.re, 0.0);
        let (values, _) = linalg::hermitian_eigen_desc(&matrix)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(Self { dims, matrix })
    }

    /// Constructor for matrices that are positive semidefinite with unit
    /// trace by construction (projectors, convex mixtures of projectors).
    pub(crate) fn from_validated(dims: SubsystemDims, matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(linalg::hermitian_deviation(&matrix) < 1e-9);
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-9);
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigendecomposition with eigenvalues sorted decreasing and those at or
    /// below `trunc_tol * trace` dropped. At least one eigenvalue is always
    /// retained.
    pub fn spectral(&self, trunc_tol: f64) -> Result<SpectralDecomposition> {
        let (values, vectors) = linalg::hermitian_eigen_desc(&self.matrix)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        let cutoff = trunc_tol * self.trace();
        let rank = values.iter().take_while(|&&v| v > cutoff).count().max(1);
        let eigenvalues: Vec<f64> = values[..rank].iter().map(|&v| v.max(0.0)).collect();
        let eigenvectors = vectors.columns(0, rank).into_owned();
        Ok(SpectralDecomposition {
            dims: self.dims.clone(),
            eigenvalues,
            eigenvectors,
        })
    }
}

/// Rank-truncated eigendecomposition of a density matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dims: SubsystemDims,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    /// Retained eigenvalues, decreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `D x r` matrix whose columns are the retained eigenvectors.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Phi M^{1/2}`: eigenvectors scaled by sqrt-eigenvalues, `D x r`.
    /// Its columns generate every decomposition of the state via
    /// right-unitary mixing.
    pub fn weighted_vectors(&self) -> DMatrix<Complex64> {
        let mut m = self.eigenvectors.clone();
        for (j, &w) in self.eigenvalues.iter().enumerate() {
            let s = Complex64::new(w.sqrt(), 0.0);
            for i in 0..m.nrows() {
                m[(i, j)] *= s;
            }
        }
        m
    }

    /// Reassembles `Phi M Phi^H`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let w = self.weighted_vectors();
        &w * w.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dims_validation() {
        assert!(SubsystemDims::new(vec![2, 2]).is_ok());
        assert!(matches!(
            SubsystemDims::new(vec![2]),
            Err(Error::TooFewSubsystems(1))
        ));
        assert!(matches!(
            SubsystemDims::new(vec![2, 1]),
            Err(Error::DimensionTooSmall { position: 1, dim: 1 })
        ));
        assert!(matches!(
            SubsystemDims::new(vec![64, 64, 2]),
            Err(Error::TotalDimensionTooLarge { .. })
        ));
    }

    #[test]
    fn index_order_last_fastest() {
        let dims = SubsystemDims::new(vec![2, 3, 2]).unwrap();
        assert_eq!(dims.strides(), vec![6, 2, 1]);
        assert_eq!(dims.ravel(&[1, 2, 1]), 11);
        assert_eq!(dims.unravel(7), vec![1, 0, 1]);
    }

    #[test]
    fn construction_normalizes() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(s.amplitudes()[0].re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn already_normalized_untouched() {
        let dims = SubsystemDims::new(vec![2, 2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        let err = PureState::from_real(dims, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 6, got: 5 }));
    }

    #[test]
    fn zero_vector_rejected() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        assert!(matches!(
            PureState::from_real(dims, &[0.0; 4]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn matricize_basis_state() {
        let dims = SubsystemDims::new(vec![2, 2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let m = s.matricize(0).unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m.ncols(), 4);
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn matricize_bell_is_scaled_identity() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let m = s.matricize(0).unwrap();
        let expected = 1.0 / 2f64.sqrt();
        assert_relative_eq!(m[(0, 0)].re, expected, epsilon = 1e-15);
        assert_relative_eq!(m[(1, 1)].re, expected, epsilon = 1e-15);
        assert_eq!(m[(0, 1)], c(0.0));
        assert_eq!(m[(1, 0)], c(0.0));
    }

    #[test]
    fn matricize_out_of_range() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            s.matricize(2),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn density_validation_rejects_bad_trace() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let m = DMatrix::<Complex64>::identity(4, 4) * c(0.245);
        assert!(matches!(
            DensityMatrix::new(dims, m),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn density_validation_rejects_non_hermitian() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let mut m = DMatrix::<Complex64>::identity(4, 4) * c(0.25);
        m[(0, 1)] = c(0.3);
        assert!(matches!(
            DensityMatrix::new(dims, m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn density_validation_rejects_negative_eigenvalue() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(matches!(
            DensityMatrix::new(dims, m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn spectral_of_projector_has_rank_one() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let s = PureState::from_real(dims, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let rho = s.to_density();
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        assert_eq!(spec.rank(), 1);
        assert_relative_eq!(spec.eigenvalues()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_of_maximally_mixed() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let rho = DensityMatrix::new(dims, DMatrix::identity(4, 4) * c(0.25)).unwrap();
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        assert_eq!(spec.rank(), 4);
        for &v in spec.eigenvalues() {
            assert_relative_eq!(v, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_of_diagonal_mixture() {
        let dims = SubsystemDims::new(vec![2, 2]).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(0, 0)] = c(0.7);
        m[(3, 3)] = c(0.3);
        let rho = DensityMatrix::new(dims, m).unwrap();
        let spec = rho.spectral(DEFAULT_TRUNC_TOL).unwrap();
        assert_eq!(spec.rank(), 2);
        assert_relative_eq!(spec.eigenvalues()[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(spec.eigenvalues()[1], 0.3, epsilon = 1e-12);
        let err = (spec.reconstruct() - rho.matrix()).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn permute_subsystems_roundtrip() {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        let raw: Vec<f64> = (1..=6).map(|x| x as f64).collect();
        let s = PureState::from_real(dims, &raw).unwrap();
        let p = s.permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(p.dims().as_slice(), &[3, 2]);
        // a_{ij} -> a'_{ji}
        assert_eq!(p.amplitudes()[1], s.amplitudes()[3]);
        let back = p.permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(back.amplitudes(), s.amplitudes());
    }
}
