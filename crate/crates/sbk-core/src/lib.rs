//! Exact-arithmetic toolkit for pure difference binomials: symbolic
//! exponents in `Z[x]`, `Z[x]`-lattices, the truncated sigma-polynomial
//! ring, finite-basis computation with membership certificates, and bounded
//! closure/saturation/decomposition engines.
//!
//! Every bounded engine is a sound under-approximation: additions are
//! justified by replayable certificate steps, non-membership is always
//! "not derivable at bounds", and exceeding a configured budget is an
//! explicit error, never a wrong answer.

pub mod basis;
pub mod binomial;
pub mod cert;
pub mod closure;
pub mod error;
pub mod expvec;
pub mod groebner;
pub mod lattice;
pub mod poly;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod trunc;

pub use basis::{compute_basis, minimal_signatures, reduce_once, BasisConfig, BasisResult};
pub use binomial::{lattice_of_binomials, DiffBinomial};
pub use cert::{check_certificate, membership_certificate, CertCaps, Certificate, RuleToggles};
pub use closure::{
    closure_saturate, colon_m, decompose, is_quasi_normal, t_saturated_closure, ClosureConfig,
    ClosureInput, ClosureResult, DecompNode, TSet, TsatInput,
};
pub use error::{Error, Result};
pub use expvec::{ExpVector, Sign, SignPattern, Signature};
pub use groebner::{ideal_member, Groebner, GroebnerCaps, TruncatedIdeal};
pub use lattice::{
    enumerate_elements, sat_m, truncated_member, EnumBounds, Lattice, OmMap, SatConfig,
};
pub use poly::{term_less, SymPoly, Term};
pub use trunc::{
    expand, expand_binomial, parse_trunc_poly, shift, TruncMonomial, TruncPoly, TruncRing,
};
