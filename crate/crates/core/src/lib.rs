//! Matching fields for Grassmannians and partial flag varieties, the lattice
//! polytopes they define, combinatorial mutations between those polytopes,
//! and an Ehrhart-based test for toric degenerations.
//!
//! All arithmetic is exact.

pub mod degen;
pub mod error;
pub mod matchfield;
pub mod mfpolytope;
pub mod mutation;
pub mod perm;
pub mod polytope;
pub mod rational;
pub mod selfcheck;

pub use degen::{DegenerationReport, FamilyScan, TableId, TableReport};
pub use error::{Error, Result};
pub use matchfield::{MatchingField, PluckerIndex, Provenance, WeightMatrix};
pub use mfpolytope::FlagContext;
pub use mutation::{MutationChain, MutationStep, TropicalMap};
pub use perm::Permutation;
pub use polytope::{EhrhartMethod, EhrhartPolynomial, FaceLattice, Fingerprint, HPolytope, QPoint, SubLattice, VPolytope};
pub use rational::Rational;
