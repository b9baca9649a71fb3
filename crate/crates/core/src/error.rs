use thiserror::Error;

/// Errors across the library. Hypothesis failures carry the data that
/// violated them so callers can report exactly which assumption broke.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ideals belong to different fields")]
    FieldMismatch,
    #[error("invalid ideal normal form: {0} does not divide norm({1} + omega)")]
    InvalidIdeal(String, String),
    #[error("prime {p} is {kind} in the field, split required")]
    NotSplit { p: u64, kind: &'static str },
    #[error("element is not coprime to the character modulus")]
    NotCoprime,
    #[error("finite type images violate a relation among the generators")]
    RelationViolation,
    #[error("the given residues do not generate the unit group ({got} of {need} reached)")]
    NonGeneratingSet { got: usize, need: usize },
    #[error("no assignments allowed for the trivial modulus")]
    TrivialModulus,
    #[error("image order {order} does not divide the group exponent {exponent}")]
    ImageOrder { order: u64, exponent: u64 },
    #[error("unit compatibility fails: psi^inf(w)·w^u != 1 for a unit w (infinity exponent {u})")]
    UnitIncompatible { u: i64 },
    #[error("anchor twist {d} out of range for order {order}")]
    AnchorRange { d: u64, order: u64 },
    #[error("expected {expected} anchor exponents, got {got}")]
    AnchorCount { expected: usize, got: usize },
    #[error("value leaves the exact coefficient ring; use the residue backend")]
    ExactBackendUnavailable,
    #[error("gcd({n0}, {p}) != 1: no such root of unity in the Galois ring")]
    BadRootOrder { n0: u64, p: u64 },
    #[error("target is not a {c}-th root of unity in the ring")]
    NotRootOfUnity { c: u64 },
    #[error("unit is not a {c}-th power in the ring")]
    NotNthPower { c: u64 },
    #[error("requested order {c} does not divide the ring root order {n0}")]
    OrderNotDividing { c: u64, n0: u64 },
    #[error("companion modulus {0} must be an odd integer >= 3")]
    BadModulus(u64),
    #[error("class number {h} shares a factor with the modulus {m}")]
    ClassNumberNotCoprime { h: u64, m: u64 },
    #[error("level {level} shares a factor with the modulus {m}")]
    LevelNotCoprime { level: u64, m: u64 },
    #[error("discriminant {0} excluded: construction assumes D != -3, -4")]
    DiscriminantExcluded(i64),
    #[error("character has infinity exponent {got}, expected {expected}")]
    InfinityExponent { got: i64, expected: i64 },
    #[error(
        "anchor exponent conflict at representative {rep}: p={p1} needs d={d1}, p={p2} needs d={d2}"
    )]
    AnchorConflict { rep: usize, p1: u64, d1: u64, p2: u64, d2: u64 },
    #[error("coefficient index {n} beyond expansion bound {bound}")]
    BeyondBound { n: u64, bound: u64 },
    #[error("expansions carry incompatible moduli")]
    ModulusMismatch,
    #[error("cannot reduce a non-rational coefficient at {p}: prime not split")]
    IrrationalAtInert { p: u64 },
    #[error("{0}")]
    Message(String),
}

pub type Result<T> = std::result::Result<T, Error>;
