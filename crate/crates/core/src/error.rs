//! Crate-wide error type.
//!
//! Validation errors always name the witnessing elements, so a failed law
//! can be re-checked by hand against the offending table entries.

use thiserror::Error;

/// Errors produced by validation, enumeration, and certification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The multiplication table is not square.
    #[error("table is not square: row {row} has length {len}, expected {order}")]
    NotSquare {
        row: usize,
        len: usize,
        order: usize,
    },

    /// A table entry (or element index) lies outside `[0, order)`.
    #[error("index out of range: entry at ({row}, {col}) is {value}, order is {order}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },

    /// The claimed identity fails an identity law at `element`.
    #[error("identity law fails at element {element}")]
    BadIdentity { element: usize },

    /// Associativity fails on the witnessing triple.
    #[error("associativity fails: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    /// An image array is not a permutation.
    #[error("image array is not a permutation of [0, {order}): {detail}")]
    NotAPermutation { order: usize, detail: String },

    /// A claimed automorphism does not fix the identity.
    #[error("map sends the identity to {image}, not to itself")]
    IdentityNotFixed { image: usize },

    /// A claimed (iso)morphism is not multiplicative at the witnessing pair.
    #[error("map is not multiplicative at ({a}, {b})")]
    NotMultiplicative { a: usize, b: usize },

    /// A search or construction exceeds the configured budget.
    #[error("{what} of size {size} exceeds the budget of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// The configured deadline expired before the search finished.
    #[error("search timed out after {elapsed_ms} ms")]
    Timeout { elapsed_ms: u128 },

    /// Source/target ranks of homs do not line up.
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    /// An act element references a copy outside the act's rank.
    #[error("copy {copy} out of range for rank {rank}")]
    CopyOutOfRange { copy: usize, rank: usize },

    /// An act element references a monoid element outside the order.
    #[error("element {elem} out of range for monoid of order {order}")]
    ElemOutOfRange { elem: usize, order: usize },

    /// A functor moves rank 1, so its action on End(F_1) is not given by
    /// right translations and no monoid automorphism can be read off.
    #[error("image of the rank-1 endomorphisms is not translation-closed: rank 1 maps to rank {image_rank}")]
    NotTranslationClosed { image_rank: usize },

    /// A hom-set bijection family violates the functor laws.
    #[error("not a functor: {detail}")]
    NotFunctorial { detail: String },

    /// An operation requiring a stable functor received one that moves objects.
    #[error("functor moves objects: rank {rank} maps to rank {image}")]
    NotObjectStable { rank: usize, image: usize },

    /// A semi-inner certificate's defining diagram fails at the witnessing
    /// hom and element.
    #[error("certificate diagram fails at hom {hom} in hom({n},{m}), packed element {element}")]
    CertificateMismatch {
        n: usize,
        m: usize,
        hom: usize,
        element: usize,
    },

    /// Malformed serialized input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
