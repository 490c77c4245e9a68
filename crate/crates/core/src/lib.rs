//! Exact arithmetic for real quadratic irrationals and the number theory
//! around them: periodic continued fractions, GL2(Z) equivalence, orders and
//! conductors, hyperbolic fixed points, congruence subgroups of SL2(Z), and the
//! CM-to-RM endomorphism map.
//!
//! Everything is computed with arbitrary-precision integers. No floating point
//! value ever decides a result.

pub mod cli;
pub mod contfrac;
pub mod error;
pub mod functor;
pub mod lattices;
pub mod modgroup;
pub mod quadnum;

mod serde_int;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use contfrac::{BratteliData, ContinuedFraction, Equivalence};
pub use error::{Error, Result};
pub use functor::{CmElement, FunctorReport};
pub use lattices::{OrderSign, PseudoLattice, QuadraticOrder};
pub use modgroup::{CongruenceKind, CongruenceSpec, Lemma1Report, Matrix2Z};
pub use quadnum::{IntPoly2, Kind, QuadraticIrrational};
