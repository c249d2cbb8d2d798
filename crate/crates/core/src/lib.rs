//! Exact arithmetic for quadratic spaces over the rationals.
//!
//! The crate has two halves that check each other:
//!
//! * formula engines ([`qspace`], [`complement`], [`ideals`]) that compute the
//!   classifying invariants of a quadratic space, the invariants of an
//!   orthogonal complement, discriminant ideals of maximal lattices, and the
//!   index ideal `[M/L∩W] = b(q)·(2φ(h,L))⁻¹`;
//! * a constructive integer-lattice oracle ([`lattice`]) that builds maximal
//!   lattices, duals, hyperplane sections, and short-vector lists from scratch
//!   and recomputes the same ideals by elementary divisors.
//!
//! Everything is exact: big rationals throughout, no floating point.
//!
//! ```
//! use qflat::arith::rat_int;
//! use qflat::{ideals, lattice, qspace::QuadraticSpace};
//!
//! // the sum of six squares: discriminant field ℚ(√−1), ramified at {2, ∞}
//! let space = QuadraticSpace::unit_form(6);
//! let inv = space.invariants();
//! assert_eq!(inv.to_string(), "(6, -1, {2,inf}, 6)");
//!
//! // b(7) = 2ℤ, and a norm-7 vector of a maximal lattice verifies the
//! // index formula constructively
//! let b = ideals::b_of_q(&inv, &rat_int(7)).unwrap();
//! assert_eq!(b.to_string(), "2");
//! let l = lattice::maximal_lattice(&space).unwrap();
//! let h = l.vector(&lattice::enumerate_vectors(&l, &rat_int(7)).unwrap()[0]);
//! let check = lattice::verify_section_formula(&space, &h).unwrap();
//! assert!(check.matches);
//! ```

pub mod arith;
pub mod complement;
pub mod ideals;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod qspace;

pub use arith::{FractionalIdeal, Place, SquareClassSymbol};
pub use complement::{complement_invariants, complement_space, ComplementInvariants};
pub use ideals::{DiscriminantData, LocalCoreData, SectionReport};
pub use lattice::{ElementaryDivisors, SectionVerification, ZLattice};
pub use qspace::{CoreDimension, Invariants, QuadraticSpace};

use std::fmt;

/// Errors shared by every module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A nonzero argument was required.
    ZeroArgument(&'static str),
    /// The Gram matrix (or a restricted form) is singular.
    DegenerateForm,
    /// The Gram matrix is not symmetric or has the wrong shape.
    MalformedGram(String),
    /// An operation got a space or vector of the wrong dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// An ideal square root was requested for an ideal with an odd valuation.
    NonSquareIdeal(String),
    /// The value q is not represented by the space (local obstruction).
    NotRepresented(String),
    /// A vector with nonzero norm was required.
    IsotropicVector,
    /// Two lattices were expected to span the same subspace.
    SpanMismatch,
    /// The lattice must satisfy φ\[L\] ⊆ ℤ.
    NotIntegral,
    /// Short-vector enumeration needs a positive-definite form.
    IndefiniteForm,
    /// A full-rank matrix was required.
    RankDeficient,
    /// Local case data violates the table preconditions.
    InvalidLocalData(String),
    /// Inputs passed individual checks but violate a relation they must
    /// jointly satisfy (e.g. b(q) ⊄ 2φ(h,L)).
    ContractViolation(String),
    /// Malformed textual input (rationals, vectors, JSON documents).
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroArgument(what) => write!(f, "{what} must be nonzero"),
            Error::DegenerateForm => write!(f, "the form is degenerate"),
            Error::MalformedGram(why) => write!(f, "malformed Gram matrix: {why}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonSquareIdeal(gen) => {
                write!(f, "ideal generated by {gen} is not a square ideal")
            }
            Error::NotRepresented(q) => write!(f, "{q} is not represented by the space"),
            Error::IsotropicVector => write!(f, "the vector has norm zero"),
            Error::SpanMismatch => write!(f, "lattices do not span the same subspace"),
            Error::NotIntegral => write!(f, "lattice is not integral"),
            Error::IndefiniteForm => {
                write!(f, "enumeration is only supported for positive-definite forms")
            }
            Error::RankDeficient => write!(f, "matrix is rank deficient"),
            Error::InvalidLocalData(why) => write!(f, "invalid local data: {why}"),
            Error::ContractViolation(why) => write!(f, "contract violation: {why}"),
            Error::Parse(why) => write!(f, "parse error: {why}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
