//! SO(n) generator sets and the family of Kronecker-product operators whose
//! bilinear forms make up the separability functional.
//!
//! Each family member carries exactly two antisymmetric generator factors,
//! some number of element-wise-absolute generator factors, and identities on
//! the remaining subsystems. All position patterns and all generator planes
//! are enumerated; identity factors carry no generator index, so the family
//! contains no duplicates.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::SubsystemDims;

/// A plane-rotation generator of SO(n): antisymmetric, `+1` at `(a, b)` and
/// `-1` at `(b, a)` with `a < b`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub dim: usize,
    pub plane: (usize, usize),
    pub matrix: DMatrix<f64>,
}

/// The `n(n-1)/2` generators of SO(n), ordered lexicographically by plane.
pub fn so_generators(n: usize) -> Result<Vec<Generator>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { position: 0, dim: n });
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(a, b)] = 1.0;
            m[(b, a)] = -1.0;
            out.push(Generator { dim: n, plane: (a, b), matrix: m });
        }
    }
    Ok(out)
}

/// Number of generator planes for dimension `n`.
pub fn plane_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// What a single subsystem slot of a family operator holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// An SO(n) generator acting in the given plane.
    Generator { plane: (usize, usize) },
    /// Element-wise absolute value of a generator: symmetric, 0/1 entries.
    AbsGenerator { plane: (usize, usize) },
    /// Identity.
    Identity,
}

impl FactorKind {
    /// Materializes the factor as an `n x n` real matrix.
    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        match *self {
            FactorKind::Generator { plane: (a, b) } => {
                let mut m = DMatrix::zeros(n, n);
                m[(a, b)] = 1.0;
                m[(b, a)] = -1.0;
                m
            }
            FactorKind::AbsGenerator { plane: (a, b) } => {
                let mut m = DMatrix::zeros(n, n);
                m[(a, b)] = 1.0;
                m[(b, a)] = 1.0;
                m
            }
            FactorKind::Identity => DMatrix::identity(n, n),
        }
    }

    fn symbol(&self) -> String {
        match *self {
            FactorKind::Generator { plane: (a, b) } => format!("L({a},{b})"),
            FactorKind::AbsGenerator { plane: (a, b) } => format!("|L({a},{b})|"),
            FactorKind::Identity => "I".to_string(),
        }
    }
}

/// One member of the operator family: factor descriptors plus the
/// materialized Kronecker product.
#[derive(Debug, Clone)]
pub struct SOperator {
    dims: SubsystemDims,
    factors: Vec<FactorKind>,
    /// Number of absolute-value factors (the pattern class `i`).
    abs_count: usize,
    /// Index of the position pattern within its class, in canonical order.
    pattern_rank: usize,
    matrix: DMatrix<Complex64>,
}

impl SOperator {
    /// Assembles the Kronecker product of the factor matrices in subsystem
    /// order. Exactly two factors must be antisymmetric generators.
    pub fn new(
        dims: &SubsystemDims,
        factors: Vec<FactorKind>,
        abs_count: usize,
        pattern_rank: usize,
    ) -> Result<Self> {
        if factors.len() != dims.count() {
            return Err(Error::LengthMismatch {
                expected: dims.count(),
                got: factors.len(),
            });
        }
        let gens = factors
            .iter()
            .filter(|f| matches!(f, FactorKind::Generator { .. }))
            .count();
        if gens != 2 {
            return Err(Error::InvalidParameter(format!(
                "family operators need exactly 2 generator factors, got {gens}"
            )));
        }
        for (p, f) in factors.iter().enumerate() {
            let n = dims.dim(p);
            if let FactorKind::Generator { plane: (a, b) } | FactorKind::AbsGenerator { plane: (a, b) } = *f {
                if a >= b || b >= n {
                    return Err(Error::InvalidParameter(format!(
                        "plane ({a},{b}) invalid for subsystem of dimension {n}"
                    )));
                }
            }
        }
        let mut matrix = DMatrix::<Complex64>::identity(1, 1);
        for (p, f) in factors.iter().enumerate() {
            let factor = f.matrix(dims.dim(p)).map(|x| Complex64::new(x, 0.0));
            matrix = matrix.kronecker(&factor);
        }
        Ok(Self {
            dims: dims.clone(),
            factors,
            abs_count,
            pattern_rank,
            matrix,
        })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn factors(&self) -> &[FactorKind] {
        &self.factors
    }

    /// Number of absolute-value factors.
    pub fn abs_count(&self) -> usize {
        self.abs_count
    }

    /// Position-pattern index within the `abs_count` class.
    pub fn pattern_rank(&self) -> usize {
        self.pattern_rank
    }

    /// The materialized `D x D` matrix (real-valued, stored complex).
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Human-readable descriptor, e.g. `L(0,1) x L(0,1) x I`.
    pub fn tag(&self) -> String {
        self.factors
            .iter()
            .map(FactorKind::symbol)
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// The complete operator family for a set of subsystem dimensions.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    dims: SubsystemDims,
    operators: Vec<SOperator>,
}

impl OperatorFamily {
    /// Enumerates the full family in canonical order: by number of
    /// absolute-value factors, then by position pattern (generator pair
    /// lexicographic, then absolute-value subset lexicographic), then by
    /// plane indices left to right.
    pub fn enumerate(dims: &SubsystemDims) -> Result<Self> {
        let n = dims.count();
        let mut operators = Vec::new();
        for abs_count in 0..=n.saturating_sub(2) {
            let mut pattern_rank = 0;
            // Positions of the two antisymmetric generators.
            for g1 in 0..n {
                for g2 in (g1 + 1)..n {
                    let rest: Vec<usize> = (0..n).filter(|&p| p != g1 && p != g2).collect();
                    for abs_positions in subsets_of_size(&rest, abs_count) {
                        push_plane_choices(
                            dims,
                            g1,
                            g2,
                            &abs_positions,
                            abs_count,
                            pattern_rank,
                            &mut operators,
                        )?;
                        pattern_rank += 1;
                    }
                }
            }
        }
        Ok(Self { dims: dims.clone(), operators })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn operators(&self) -> &[SOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SOperator> {
        self.operators.iter()
    }

    /// `1 / sqrt(N(N-1)/2)`: the normalization in front of the aggregate
    /// functional.
    pub fn normalization(&self) -> f64 {
        let n = self.dims.count();
        1.0 / ((n * (n - 1) / 2) as f64).sqrt()
    }

    /// Closed-form family size: for every pattern, the product of the plane
    /// counts over the non-identity positions.
    pub fn expected_len(dims: &SubsystemDims) -> usize {
        let n = dims.count();
        let mut total = 0;
        for abs_count in 0..=n.saturating_sub(2) {
            for g1 in 0..n {
                for g2 in (g1 + 1)..n {
                    let rest: Vec<usize> = (0..n).filter(|&p| p != g1 && p != g2).collect();
                    for abs_positions in subsets_of_size(&rest, abs_count) {
                        let mut prod = plane_count(dims.dim(g1)) * plane_count(dims.dim(g2));
                        for &p in &abs_positions {
                            prod *= plane_count(dims.dim(p));
                        }
                        total += prod;
                    }
                }
            }
        }
        total
    }
}

impl<'a> IntoIterator for &'a OperatorFamily {
    type Item = &'a SOperator;
    type IntoIter = std::slice::Iter<'a, SOperator>;
    fn into_iter(self) -> Self::IntoIter {
        self.operators.iter()
    }
}

/// All `size`-element subsets of `items`, in lexicographic order.
fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size > items.len() {
        return Vec::new();
    }
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        for mut tail in subsets_of_size(&items[k + 1..], size - 1) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Emits one operator per plane assignment for a fixed position pattern,
/// iterating planes left-to-right with the rightmost slot fastest.
fn push_plane_choices(
    dims: &SubsystemDims,
    g1: usize,
    g2: usize,
    abs_positions: &[usize],
    abs_count: usize,
    pattern_rank: usize,
    out: &mut Vec<SOperator>,
) -> Result<()> {
    let n = dims.count();
    let mut slots: Vec<usize> = vec![g1, g2];
    slots.extend_from_slice(abs_positions);
    slots.sort_unstable();
    let radices: Vec<usize> = slots.iter().map(|&p| plane_count(dims.dim(p))).collect();
    let total: usize = radices.iter().product();

    for mut choice in 0..total {
        let mut plane_index = vec![0usize; slots.len()];
        for k in (0..slots.len()).rev() {
            plane_index[k] = choice % radices[k];
            choice /= radices[k];
        }
        let mut factors = vec![FactorKind::Identity; n];
        for (k, &p) in slots.iter().enumerate() {
            let plane = nth_plane(dims.dim(p), plane_index[k]);
            factors[p] = if p == g1 || p == g2 {
                FactorKind::Generator { plane }
            } else {
                FactorKind::AbsGenerator { plane }
            };
        }
        out.push(SOperator::new(dims, factors, abs_count, pattern_rank)?);
    }
    Ok(())
}

/// The `k`-th plane `(a, b)` of dimension `n` in lexicographic order.
fn nth_plane(n: usize, k: usize) -> (usize, usize) {
    let mut idx = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if idx == k {
                return (a, b);
            }
            idx += 1;
        }
    }
    unreachable!("plane index {k} out of range for dimension {n}");
}
