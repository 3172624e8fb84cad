//! Independent ground-truth checks used to validate the criterion modules:
//! an exact product test via matricization ranks, the two-qubit concurrence
//! closed forms, decomposition-average upper bounds from random
//! right-unitary mixing, the 2x2x2 sub-cube functional, and the positive
//! partial transpose test.
//!
//! Everything here is deliberately built on code paths separate from
//! [`crate::pure`] / [`crate::mixed`]: the cube functional uses the complex
//! `sigma_y` / `Iv` matrices directly, and the two-qubit closed forms never
//! touch the operator family.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::OperatorFamily;
use crate::states::{DensityMatrix, PureState, SpectralDecomposition, DEFAULT_TRUNC_TOL};

/// Default threshold on the second singular value of a matricization below
/// which a unit-norm state counts as product across that cut.
pub const PRODUCT_TOL: f64 = 1e-10;

/// Eigenvalue floor for the partial-transpose positivity test.
pub const PPT_TOL: f64 = 1e-10;

fn sigma_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0),
    ])
}

fn iv() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
    ])
}

/// `true` iff every single-subsystem matricization has numerical rank 1,
/// i.e. its second singular value is at most `tol`.
pub fn is_product(state: &PureState, tol: f64) -> Result<bool> {
    for p in 0..state.dims().count() {
        let m = state.matricize(p)?;
        let sv = linalg::singular_values_desc(&m)?;
        if sv.len() > 1 && sv[1] > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two-qubit pure-state concurrence `|psi^T (sigma_y (x) sigma_y) psi|`,
/// built directly from the Pauli matrix.
pub fn wootters_pure(state: &PureState) -> Result<f64> {
    if state.dims().as_slice() != [2, 2] {
        return Err(Error::DimsMismatch {
            left: state.dims().as_slice().to_vec(),
            right: vec![2, 2],
        });
    }
    let syy = sigma_y().kronecker(&sigma_y());
    Ok(linalg::bilinear(&syy, state.amplitudes()).norm())
}

/// Two-qubit mixed-state concurrence `max{0, l1 - l2 - l3 - l4}` where the
/// `l_i` are the decreasing square roots of the eigenvalues of
/// `rho (sy (x) sy) rho* (sy (x) sy)`; computed through the Hermitian
/// similarity `sqrt(rho) rho~ sqrt(rho)`, which has the same spectrum.
pub fn wootters_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::DimsMismatch {
            left: rho.dims().as_slice().to_vec(),
            right: vec![2, 2],
        });
    }
    let syy = sigma_y().kronecker(&sigma_y());
    let tilde = &syy * rho.matrix().conjugate() * &syy;
    let root = linalg::sqrt_psd(rho.matrix())?;
    let h = &root * tilde * &root;
    let (values, _) = linalg::hermitian_eigen_desc(&h)?;
    let lambdas: Vec<f64> = values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let rest: f64 = lambdas[1..].iter().sum();
    Ok((lambdas[0] - rest).max(0.0))
}

/// A pure-state decomposition of a density matrix: unnormalized vectors
/// (columns) whose outer products sum back to the state; weights are the
/// squared column norms.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    /// `D x K` matrix of unnormalized decomposition vectors.
    pub vectors: DMatrix<Complex64>,
}

impl Decomposition {
    /// `sum_k v_k v_k^H`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        &self.vectors * self.vectors.adjoint()
    }
}

/// Draws random decompositions of a density matrix by right-unitary mixing
/// of its weighted eigenvectors. Sample `k` is generated from an RNG stream
/// derived from `(seed, k)`, so samples are reproducible and independent of
/// `count`.
#[derive(Debug, Clone)]
pub struct DecompositionSampler {
    pub seed: u64,
    pub count: usize,
    /// Number of decomposition terms; defaults to `min(2r, r + 4)`.
    pub columns: Option<usize>,
}

impl DecompositionSampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Self { seed, count, columns: None }
    }

    fn column_count(&self, rank: usize) -> usize {
        self.columns
            .unwrap_or_else(|| (2 * rank).min(rank + 4))
            .max(rank)
    }

    /// The `k`-th sampled decomposition (deterministic in `(seed, k)`).
    pub fn decomposition(&self, spec: &SpectralDecomposition, k: usize) -> Result<Decomposition> {
        let r = spec.rank();
        let cols = self.column_count(r);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let t = linalg::haar_right_unitary(r, cols, &mut rng)?;
        Ok(decomposition_from(spec, &t))
    }

    /// All `count` sampled decompositions.
    pub fn decompositions(&self, spec: &SpectralDecomposition) -> Result<Vec<Decomposition>> {
        (0..self.count).map(|k| self.decomposition(spec, k)).collect()
    }
}

/// Builds the decomposition `Phi M^{1/2} T` for an explicit right-unitary `T`.
pub fn decomposition_from(spec: &SpectralDecomposition, t: &DMatrix<Complex64>) -> Decomposition {
    let vectors = spec.weighted_vectors() * t;
    let weights = (0..vectors.ncols())
        .map(|k| vectors.column(k).norm_squared())
        .collect();
    Decomposition { weights, vectors }
}

/// Decomposition-averaged value of the pure-state functional,
/// `sum_k w_k |C(psi_k)|`, evaluated on unnormalized columns (for which the
/// functional is exactly `w_k` times the normalized value).
pub fn decomposition_average(decomp: &Decomposition, family: &OperatorFamily) -> f64 {
    let mut total = 0.0;
    for k in 0..decomp.vectors.ncols() {
        let col: DVector<Complex64> = decomp.vectors.column(k).into();
        let mut sum_sq = 0.0;
        for op in family {
            let form = linalg::bilinear(op.matrix(), &col).norm();
            sum_sq += form * form;
        }
        total += family.normalization() * sum_sq.sqrt();
    }
    total
}

/// Upper bound on the decomposition infimum: the minimum decomposition
/// average over the eigendecomposition itself and `sampler.count` random
/// decompositions. Always at least the true infimum, so it must dominate
/// the mixed-state criterion value.
pub fn roof_upper_bound(
    rho: &DensityMatrix,
    family: &OperatorFamily,
    sampler: &DecompositionSampler,
) -> Result<f64> {
    if rho.dims() != family.dims() {
        return Err(Error::DimsMismatch {
            left: rho.dims().as_slice().to_vec(),
            right: family.dims().as_slice().to_vec(),
        });
    }
    let spec = rho.spectral(DEFAULT_TRUNC_TOL)?;
    // The eigendecomposition is itself a decomposition; start from it.
    let identity = DMatrix::<Complex64>::identity(spec.rank(), spec.rank());
    let mut best = decomposition_average(&decomposition_from(&spec, &identity), family);
    for k in 0..sampler.count {
        let d = sampler.decomposition(&spec, k)?;
        let avg = decomposition_average(&d, family);
        if avg < best {
            best = avg;
        }
    }
    Ok(best)
}

/// The 2x2x2 sub-cube functional: six bilinear forms with
/// `{sigma_y, I, Iv}` factors evaluated on a raw (unnormalized) cube of
/// amplitudes in row-major order, aggregated as `sqrt(sum of squares) / sqrt(3)`.
pub fn cube_function(cube: &[Complex64; 8]) -> f64 {
    let sy = sigma_y();
    let id = DMatrix::<Complex64>::identity(2, 2);
    let ivm = iv();
    let minus = Complex64::new(-1.0, 0.0);
    let ops = [
        sy.kronecker(&sy).kronecker(&id) * minus,
        sy.kronecker(&id).kronecker(&sy) * minus,
        id.kronecker(&sy).kronecker(&sy) * minus,
        ivm.kronecker(&sy).kronecker(&sy) * minus,
        sy.kronecker(&ivm).kronecker(&sy) * minus,
        sy.kronecker(&sy).kronecker(&ivm) * minus,
    ];
    let v = DVector::from_row_slice(cube);
    let sum_sq: f64 = ops
        .iter()
        .map(|s| linalg::bilinear(s, &v).norm().powi(2))
        .sum();
    (sum_sq / 3.0).sqrt()
}

/// Max of [`cube_function`] over every 2x2x2 sub-tensor of a tripartite
/// state (two planes chosen per axis). Vanishes exactly on product states,
/// which makes it a cross-oracle for the criterion value.
pub fn compound_tensor_c2(state: &PureState) -> Result<f64> {
    let dims = state.dims();
    if dims.count() != 3 {
        return Err(Error::InvalidParameter(format!(
            "sub-cube scan needs exactly 3 subsystems, got {}",
            dims.count()
        )));
    }
    let (n1, n2, n3) = (dims.dim(0), dims.dim(1), dims.dim(2));
    let amp = state.amplitudes();
    let at = |i: usize, j: usize, k: usize| amp[(i * n2 + j) * n3 + k];

    let mut max = 0.0f64;
    for a1 in 0..n1 {
        for a2 in (a1 + 1)..n1 {
            for b1 in 0..n2 {
                for b2 in (b1 + 1)..n2 {
                    for c1 in 0..n3 {
                        for c2 in (c1 + 1)..n3 {
                            let cube = [
                                at(a1, b1, c1), at(a1, b1, c2),
                                at(a1, b2, c1), at(a1, b2, c2),
                                at(a2, b1, c1), at(a2, b1, c2),
                                at(a2, b2, c1), at(a2, b2, c2),
                            ];
                            max = max.max(cube_function(&cube));
                        }
                    }
                }
            }
        }
    }
    Ok(max)
}

/// Partial transpose of a density matrix over the given subsystems.
pub fn partial_transpose(
    rho: &DensityMatrix,
    subsystems: &[usize],
) -> Result<DMatrix<Complex64>> {
    let dims = rho.dims();
    let n = dims.count();
    let mut chosen = vec![false; n];
    for &p in subsystems {
        if p >= n {
            return Err(Error::SubsystemOutOfRange { index: p, count: n });
        }
        if std::mem::replace(&mut chosen[p], true) {
            return Err(Error::InvalidParameter(format!(
                "subsystem {p} listed twice in bipartition"
            )));
        }
    }
    if subsystems.is_empty() || subsystems.len() == n {
        return Err(Error::InvalidParameter(
            "bipartition must be a proper nonempty subset of the subsystems".into(),
        ));
    }
    let d = dims.total_dim();
    let m = rho.matrix();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for row in 0..d {
        let ri = dims.unravel(row);
        for col in 0..d {
            let ci = dims.unravel(col);
            let mut tri = ri.clone();
            let mut tci = ci.clone();
            for (p, &swap) in chosen.iter().enumerate() {
                if swap {
                    tri[p] = ci[p];
                    tci[p] = ri[p];
                }
            }
            out[(dims.ravel(&tri), dims.ravel(&tci))] = m[(row, col)];
        }
    }
    Ok(out)
}

/// `true` iff the partial transpose over `subsystems` has minimum
/// eigenvalue at least `-PPT_TOL` (necessary for separability; decisive for
/// 2x2 and 2x3 systems).
pub fn ppt_check(rho: &DensityMatrix, subsystems: &[usize]) -> Result<bool> {
    let pt = partial_transpose(rho, subsystems)?;
    let (values, _) = linalg::hermitian_eigen_desc(&pt)?;
    Ok(values.last().copied().unwrap_or(0.0) >= -PPT_TOL)
}

/// `true` iff the partial transpose is positive for every bipartition of
/// the subsystems (a necessary condition for full separability).
pub fn ppt_all_bipartitions(rho: &DensityMatrix) -> Result<bool> {
    let n = rho.dims().count();
    // Enumerate proper nonempty subsets containing subsystem 0's complement
    // symmetry: transposing a set and its complement give transposed
    // matrices with identical spectra, so fix subsystem n-1 outside the set.
    for mask in 1u32..(1 << (n - 1)) {
        let subset: Vec<usize> = (0..n - 1).filter(|&p| mask & (1 << p) != 0).collect();
        if !ppt_check(rho, &subset)? {
            return Ok(false);
        }
    }
    Ok(true)
}
