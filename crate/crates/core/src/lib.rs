//! Separating set systems: construction, verification and exhaustive search.
//!
//! A [`Family`] is an ordered list of subsets of a ground set `{0, .., m-1}`
//! with `m <= 64`, each subset stored as one machine word. The same type holds
//! primal systems (members are query sets over the elements) and their duals
//! (members are element signatures over the query sets).
//!
//! - [`verify`] decides every separation property and returns certificates.
//! - [`construct`] builds the extremal systems and runs the case reduction on
//!   nice families.
//! - [`bounds`] evaluates the closed-form extremal values.
//! - [`search`] re-derives the small extremal values by symmetry-reduced
//!   exhaustive search.

pub mod bits;
pub mod bounds;
pub mod construct;
pub mod family;
pub mod search;
pub mod verify;

pub use family::{Family, FamilyError, SymmetryGroup};
pub use verify::{Certificate, Counterexample, Outcome, Property, SeparatorWitness};
