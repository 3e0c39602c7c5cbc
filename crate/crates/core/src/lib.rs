//! Disc-area spectra of time-dependent noncommutative planes
//! `[x1, x2] = i f(t)`.
//!
//! * [`deformation`]: the six `f(t)` families in hyperbolic and
//!   trigonometric variants, with parity, duality and τ → ∞ structure.
//! * [`spectrum`]: levels `2π f(t) (n + 1/2)`.
//! * [`fock`]: truncated matrix representations that check the ladder
//!   algebra numerically.
//! * [`matching`]: times at which a quantum equals the canonical `2πθ`,
//!   from the closed forms and from an independent root scan.
//! * [`limits`], [`verify`]: convergence reports and invariant suites.

pub mod deformation;
pub mod error;
pub mod exec;
pub mod fock;
pub mod limits;
pub mod matching;
pub mod spectrum;
pub mod verify;

pub use deformation::{DeformationModel, Family, LimitPolynomial, Parity, Variant};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fock::{DefectReport, TruncatedFockRep};
pub use limits::LimitReport;
pub use matching::{MatchQuery, MatchingTimeReport};
pub use spectrum::SpectrumTable;
pub use verify::{Suite, VerificationSummary};
