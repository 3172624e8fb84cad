//! Separability detection for multipartite quantum states.
//!
//! The crate decides whether a state of `N` subsystems (any finite
//! dimensions) is fully separable or entangled:
//!
//! * for pure states, by the aggregate magnitude of bilinear forms
//!   `|a^T S a|` over a family of Kronecker products of SO(n) generators
//!   ([`pure::c_pure`]);
//! * for mixed states, by maximizing a singular-value gap over weight
//!   vectors on the unit sphere ([`mixed::c_mixed`]), which lower-bounds the
//!   decomposition average of the pure functional and vanishes on separable
//!   states.
//!
//! Independent cross-checks (matricization ranks, the two-qubit concurrence
//! closed forms, sampled decomposition averages, positive partial transpose)
//! live in [`oracles`]; deterministic test states in [`zoo`]; file formats
//! and report rendering in [`io`].
//!
//! ```
//! use qsep::operators::OperatorFamily;
//! use qsep::pure::c_pure;
//! use qsep::states::SubsystemDims;
//! use qsep::zoo::{StateSpec, StateName};
//!
//! let dims = SubsystemDims::new(vec![2, 2, 2])?;
//! let family = OperatorFamily::enumerate(&dims)?;
//! let ghz = StateSpec::named(StateName::Ghz, vec![2, 2, 2]).build()?;
//! let report = c_pure(ghz.as_pure().unwrap(), &family)?;
//! assert!((report.value - 1.0).abs() < 1e-12);
//! assert!(!report.separable);
//! # Ok::<(), qsep::Error>(())
//! ```

pub mod error;
pub mod io;
pub mod linalg;
pub mod mixed;
pub mod operators;
pub mod optim;
pub mod oracles;
pub mod pure;
pub mod states;
pub mod zoo;

pub use error::{Error, Result};
pub use mixed::{c_mixed, verdict_mixed, MixedCriterionReport, OptimizerConfig};
pub use operators::OperatorFamily;
pub use pure::{c_pure, verdict_pure, PureCriterionReport};
pub use states::{DensityMatrix, PureState, SpectralDecomposition, SubsystemDims};

// The guide's code snippets run as doctests so they cannot drift from the
// API; see book/src for the rendered chapters.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(states, "../../../book/src/states.md");
    chapter!(operators, "../../../book/src/operators.md");
    chapter!(pure_criterion, "../../../book/src/pure-criterion.md");
    chapter!(mixed_criterion, "../../../book/src/mixed-criterion.md");
    chapter!(oracles, "../../../book/src/oracles.md");
    chapter!(state_files, "../../../book/src/state-files.md");
    chapter!(cli, "../../../book/src/cli.md");
}
