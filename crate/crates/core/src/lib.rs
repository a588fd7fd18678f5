//! Computational toolkit for finite monoids, free acts over them, and the
//! automorphisms of the category those acts span.
//!
//! The centerpiece is a machine check, at small scale, of a rigidity
//! phenomenon: every automorphism of the category of finitely generated free
//! S-acts is semi-inner, i.e. conjugation by unit translations twisted by a
//! monoid automorphism, and the outer automorphism group of the category is
//! isomorphic to Out(S). The crate builds the truncated skeleton of that
//! category explicitly, enumerates its automorphisms by exhaustive search,
//! certifies each one as semi-inner, and compares the resulting quotient
//! group against Out(S) computed directly from the multiplication table.
//!
//! Modules:
//! - [`monoid`]: multiplication tables, automorphisms, Aut/Int.
//! - [`act`]: free S-acts, equivariant maps, semilinear bijections.
//! - [`category`]: the truncated skeleton, functor enumeration, semi-inner
//!   certificates, the categorical outer group.
//! - [`unary`]: unary algebras seen as acts of truncated word monoids, letter
//!   permutation twists, and the rigidity check behind perfectness.
//! - [`catalog`]: exhaustive generation of small monoids up to isomorphism.
//! - [`suite`]: end-to-end theorem reports combining all of the above.

pub mod act;
pub mod budget;
pub mod catalog;
pub mod category;
pub mod error;
pub mod monoid;
pub mod suite;
pub mod truncated;
pub mod unary;

pub use act::{ActElement, ActHom, FreeAct, SemilinearMap};
pub use budget::Budget;
pub use catalog::{classify_catalog, generate_monoids, MonoidCatalog};
pub use category::{
    enumerate_category_automorphisms, outer_group_of_category, semi_inner_certificate,
    verify_certificate, CategoryOuterGroup, SemiInnerCertificate, TruncatedFunctor,
    TruncatedSkeleton,
};
pub use error::{Error, Result};
pub use monoid::{FiniteMonoid, MonoidAutomorphism, OuterGroup};
pub use suite::{run_theorem_suite, verify_report, TheoremReport};
pub use unary::{verify_letter_permutation_rigidity, UnarySignature};
