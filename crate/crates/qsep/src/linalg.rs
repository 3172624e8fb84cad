//! Dense linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Promote a real matrix to a complex one.
pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Max element-wise deviation from Hermiticity, `max |A - A^H|`.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// decreasing order and eigenvector columns permuted to match.
pub fn hermitian_eigen_desc(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("Hermitian eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Singular values of a complex matrix, sorted in decreasing order.
pub fn singular_values_desc(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    if sv.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("SVD produced non-finite singular values".into()));
    }
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Eigenvalues slightly below zero (roundoff) are clamped.
pub fn sqrt_psd(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (values, vectors) = hermitian_eigen_desc(m)?;
    let roots = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values
            .iter()
            .map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&vectors * roots * vectors.adjoint())
}

/// Bilinear form `v^T M v` (transpose, no conjugation).
pub fn bilinear(m: &DMatrix<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    (v.transpose() * m * v)[(0, 0)]
}

/// Matrix of i.i.d. standard complex Gaussians (variance 1 per entry).
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / 2f64.sqrt()
    })
}

/// Haar-random unit vector in C^n.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let v: DVector<Complex64> = complex_gaussian(n, 1, rng).column(0).into();
        let norm = v.norm();
        if norm > 1e-12 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// Haar-random right-unitary matrix: `rows x cols` with `T T^H = I` (needs
/// `cols >= rows`). Built from the QR factorization of a complex Ginibre
/// matrix with the phase fix that makes the distribution Haar.
pub fn haar_right_unitary<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    if cols < rows {
        return Err(Error::InvalidParameter(format!(
            "right-unitary needs cols >= rows, got {rows}x{cols}"
        )));
    }
    let g = complex_gaussian(cols, rows, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..rows {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..cols {
            q[(i, j)] *= phase.conj();
        }
    }
    Ok(q.adjoint())
}

/// Haar-random real orthogonal matrix from QR of a real Ginibre matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn right_unitary_rows_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (r, k) in [(1, 3), (3, 3), (4, 9)] {
            let t = haar_right_unitary(r, k, &mut rng).unwrap();
            let gram = &t * t.adjoint();
            let err = (gram - DMatrix::<Complex64>::identity(r, r)).norm();
            assert!(err < 1e-12, "TT^H deviation {err} for {r}x{k}");
        }
    }

    #[test]
    fn right_unitary_rejects_wide_request() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(haar_right_unitary(4, 2, &mut rng).is_err());
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_orthogonal(5, &mut rng);
        let err = (&q * q.transpose() - DMatrix::<f64>::identity(5, 5)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = complex_gaussian(4, 4, &mut rng);
        let p = &g * g.adjoint();
        let s = sqrt_psd(&p).unwrap();
        let err = (&s * &s - &p).norm();
        assert!(err < 1e-9, "sqrt reconstruction error {err}");
    }

    // The product test hinges on small singular values of near-rank-1
    // matrices being resolved down to machine epsilon, not sqrt(eps).
    #[test]
    fn rank_one_second_singular_value_at_machine_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = complex_gaussian(3, 1, &mut rng);
        let v = complex_gaussian(8, 1, &mut rng);
        let m = &u * v.transpose();
        let sv = singular_values_desc(&m).unwrap();
        assert!(sv[1] < 1e-13 * sv[0], "sigma_2 = {}", sv[1]);
    }

    #[test]
    fn eigen_sorted_descending() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = complex_gaussian(6, 6, &mut rng);
        let h = &g + g.adjoint();
        let (values, _) = hermitian_eigen_desc(&h).unwrap();
        for w in values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}
