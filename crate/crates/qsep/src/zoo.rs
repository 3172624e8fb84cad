//! Deterministic generators for the named states used in tests, docs and
//! the CLI. Randomized states are seeded; the same spec and seed always
//! produce bit-identical output.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{DensityMatrix, PureState, SubsystemDims};

/// Either kind of state a generator can produce.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &SubsystemDims {
        match self {
            State::Pure(s) => s.dims(),
            State::Mixed(r) => r.dims(),
        }
    }

    /// Lifts a pure state to its projector; mixed states pass through.
    pub fn into_density(self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(r) => r,
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(s) => Some(s),
            State::Mixed(_) => None,
        }
    }
}

/// Names of the generated state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateName {
    Ghz,
    W,
    Bell,
    Product,
    Werner,
    Isotropic,
    GhzNoise,
    RandomPure,
    RandomMixed,
    MixtureOfProducts,
}

impl StateName {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "ghz" => StateName::Ghz,
            "w" => StateName::W,
            "bell" => StateName::Bell,
            "product" => StateName::Product,
            "werner" => StateName::Werner,
            "isotropic" => StateName::Isotropic,
            "ghz-noise" | "ghz_noise" => StateName::GhzNoise,
            "random-pure" | "random_pure" => StateName::RandomPure,
            "random-mixed" | "random_mixed" => StateName::RandomMixed,
            "mixture" | "mixture_of_products" | "mixture-of-products" => {
                StateName::MixtureOfProducts
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown state name '{other}'"
                )))
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StateName::Ghz => "ghz",
            StateName::W => "w",
            StateName::Bell => "bell",
            StateName::Product => "product",
            StateName::Werner => "werner",
            StateName::Isotropic => "isotropic",
            StateName::GhzNoise => "ghz-noise",
            StateName::RandomPure => "random-pure",
            StateName::RandomMixed => "random-mixed",
            StateName::MixtureOfProducts => "mixture-of-products",
        }
    }
}

/// A named state with its parameters. Parameters are validated per name by
/// [`StateSpec::build`].
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub name: StateName,
    pub dims: Vec<usize>,
    /// Mixing parameter for `werner`, `isotropic` and `ghz-noise`.
    pub p: Option<f64>,
    pub seed: Option<u64>,
    /// Rank for `random-mixed`.
    pub rank: Option<usize>,
    /// Term count for `mixture-of-products`.
    pub terms: Option<usize>,
}

impl StateSpec {
    pub fn named(name: StateName, dims: Vec<usize>) -> Self {
        Self {
            name,
            dims,
            p: None,
            seed: None,
            rank: None,
            terms: None,
        }
    }

    /// Builds the state; deterministic for a fixed spec.
    pub fn build(&self) -> Result<State> {
        let dims = self.dims()?;
        match self.name {
            StateName::Ghz => ghz(&dims).map(State::Pure),
            StateName::W => w(&dims).map(State::Pure),
            StateName::Bell => bell(&dims).map(State::Pure),
            StateName::Product => {
                let mut rng = self.rng();
                Ok(State::Pure(random_product(&dims, &mut rng)?))
            }
            StateName::Werner => werner(&dims, self.param()?).map(State::Mixed),
            StateName::Isotropic => isotropic(&dims, self.param()?).map(State::Mixed),
            StateName::GhzNoise => ghz_noise(&dims, self.param()?).map(State::Mixed),
            StateName::RandomPure => {
                let mut rng = self.rng();
                Ok(State::Pure(random_pure(&dims, &mut rng)?))
            }
            StateName::RandomMixed => {
                let mut rng = self.rng();
                let rank = self.rank.unwrap_or_else(|| dims.total_dim());
                Ok(State::Mixed(random_mixed(&dims, rank, &mut rng)?))
            }
            StateName::MixtureOfProducts => {
                let mut rng = self.rng();
                let terms = self.terms.unwrap_or(4);
                Ok(State::Mixed(mixture_of_products(&dims, terms, &mut rng)?))
            }
        }
    }

    /// Stable display name, e.g. `werner(p=0.30)`.
    pub fn id(&self) -> String {
        let mut parts = Vec::new();
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(t) = self.terms {
            parts.push(format!("terms={t}"));
        }
        if let Some(r) = self.rank {
            parts.push(format!("rank={r}"));
        }
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        if parts.is_empty() {
            self.name.as_str().to_string()
        } else {
            format!("{}({})", self.name.as_str(), parts.join(","))
        }
    }

    fn dims(&self) -> Result<SubsystemDims> {
        let dims = if self.dims.is_empty() {
            // Families that live on two qubits get a default.
            match self.name {
                StateName::Bell | StateName::Werner => vec![2, 2],
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "state '{}' needs explicit dims",
                        self.name.as_str()
                    )))
                }
            }
        } else {
            self.dims.clone()
        };
        SubsystemDims::new(dims)
    }

    fn param(&self) -> Result<f64> {
        let p = self
            .p
            .ok_or_else(|| Error::InvalidParameter(format!("state '{}' needs parameter p", self.name.as_str())))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "parameter p = {p} outside [0, 1]"
            )));
        }
        Ok(p)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0))
    }
}

/// `(1/sqrt(d)) sum_i |i...i>` over equal dimensions `[d, ..., d]`.
pub fn ghz(dims: &SubsystemDims) -> Result<PureState> {
    let d = dims.dim(0);
    if dims.as_slice().iter().any(|&n| n != d) {
        return Err(Error::InvalidParameter(format!(
            "ghz needs equal subsystem dimensions, got {:?}",
            dims.as_slice()
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dims.total_dim()];
    let scale = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        let multi = vec![i; dims.count()];
        amps[dims.ravel(&multi)] = Complex64::new(scale, 0.0);
    }
    PureState::new(dims.clone(), amps)
}

/// Uniform superposition of the weight-1 basis states of N qubits.
pub fn w(dims: &SubsystemDims) -> Result<PureState> {
    if dims.as_slice().iter().any(|&n| n != 2) {
        return Err(Error::InvalidParameter(format!(
            "w is defined on qubits, got {:?}",
            dims.as_slice()
        )));
    }
    let n = dims.count();
    let mut amps = vec![Complex64::new(0.0, 0.0); dims.total_dim()];
    let scale = 1.0 / (n as f64).sqrt();
    for p in 0..n {
        let mut multi = vec![0usize; n];
        multi[p] = 1;
        amps[dims.ravel(&multi)] = Complex64::new(scale, 0.0);
    }
    PureState::new(dims.clone(), amps)
}

/// `(|00> + |11>)/sqrt(2)` on two qubits.
pub fn bell(dims: &SubsystemDims) -> Result<PureState> {
    if dims.as_slice() != [2, 2] {
        return Err(Error::InvalidParameter(format!(
            "bell needs dims [2, 2], got {:?}",
            dims.as_slice()
        )));
    }
    PureState::from_real(dims.clone(), &[1.0, 0.0, 0.0, 1.0])
}

/// Kronecker product of Haar-random unit vectors, one per subsystem.
pub fn random_product<R: Rng + ?Sized>(dims: &SubsystemDims, rng: &mut R) -> Result<PureState> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for p in 0..dims.count() {
        let factor = linalg::random_unit_vector(dims.dim(p), rng);
        let mut next = Vec::with_capacity(amps.len() * factor.len());
        for a in &amps {
            for f in factor.iter() {
                next.push(a * f);
            }
        }
        amps = next;
    }
    PureState::new(dims.clone(), amps)
}

/// Haar-random pure state (complex Gaussian vector, normalized).
pub fn random_pure<R: Rng + ?Sized>(dims: &SubsystemDims, rng: &mut R) -> Result<PureState> {
    let v = linalg::random_unit_vector(dims.total_dim(), rng);
    PureState::new(dims.clone(), v.iter().copied().collect())
}

/// `p |Phi+><Phi+| + (1-p) I/4` on two qubits.
pub fn werner(dims: &SubsystemDims, p: f64) -> Result<DensityMatrix> {
    if dims.as_slice() != [2, 2] {
        return Err(Error::InvalidParameter(format!(
            "werner needs dims [2, 2], got {:?}",
            dims.as_slice()
        )));
    }
    let b = bell(dims)?;
    let proj = b.amplitudes() * b.amplitudes().adjoint();
    let m = proj * Complex64::new(p, 0.0)
        + DMatrix::<Complex64>::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
    Ok(DensityMatrix::from_validated(dims.clone(), m))
}

/// `p |Phi_d><Phi_d| + (1-p) I/d^2` on `[d, d]`.
pub fn isotropic(dims: &SubsystemDims, p: f64) -> Result<DensityMatrix> {
    if dims.count() != 2 || dims.dim(0) != dims.dim(1) {
        return Err(Error::InvalidParameter(format!(
            "isotropic needs dims [d, d], got {:?}",
            dims.as_slice()
        )));
    }
    let phi = ghz(dims)?;
    let proj = phi.amplitudes() * phi.amplitudes().adjoint();
    let d2 = dims.total_dim() as f64;
    let m = proj * Complex64::new(p, 0.0)
        + DMatrix::<Complex64>::identity(dims.total_dim(), dims.total_dim())
            * Complex64::new((1.0 - p) / d2, 0.0);
    Ok(DensityMatrix::from_validated(dims.clone(), m))
}

/// `(1-p) |GHZ><GHZ| + p I/D`: the GHZ state under global depolarizing noise.
pub fn ghz_noise(dims: &SubsystemDims, p: f64) -> Result<DensityMatrix> {
    let g = ghz(dims)?;
    let proj = g.amplitudes() * g.amplitudes().adjoint();
    let d = dims.total_dim();
    let m = proj * Complex64::new(1.0 - p, 0.0)
        + DMatrix::<Complex64>::identity(d, d) * Complex64::new(p / d as f64, 0.0);
    Ok(DensityMatrix::from_validated(dims.clone(), m))
}

/// Ginibre-induced random density matrix `G G^H / tr(G G^H)` with `G` of
/// shape `D x rank`.
pub fn random_mixed<R: Rng + ?Sized>(
    dims: &SubsystemDims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = dims.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} outside 1..={d}"
        )));
    }
    let g = linalg::complex_gaussian(d, rank, rng);
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    Ok(DensityMatrix::from_validated(
        dims.clone(),
        m / Complex64::new(trace, 0.0),
    ))
}

/// Convex mixture of random product projectors with uniform-simplex weights.
pub fn mixture_of_products<R: Rng + ?Sized>(
    dims: &SubsystemDims,
    terms: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::InvalidParameter("mixture needs at least one term".into()));
    }
    // Exponential samples normalized to the simplex = flat Dirichlet.
    let weights: Vec<f64> = (0..terms).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = weights.iter().sum();
    let d = dims.total_dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for weight in &weights {
        let product = random_product(dims, rng)?;
        let v: &DVector<Complex64> = product.amplitudes();
        m += v * v.adjoint() * Complex64::new(weight / total, 0.0);
    }
    Ok(DensityMatrix::from_validated(dims.clone(), m))
}
