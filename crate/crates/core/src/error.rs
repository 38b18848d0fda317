use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative input {0} has no integer square root")]
    NegativeInput(BigInt),

    /// The operation is only defined on positive integers.
    #[error("expected a positive integer, got {0}")]
    NotPositive(BigInt),

    #[error("factoring gave up on {value} after {iterations} rho iterations")]
    FactoringGaveUp { value: BigInt, iterations: u64 },

    #[error("no prime found in progression {residue} mod {modulus} within {budget} candidates")]
    PrimeSearchExhausted {
        modulus: u64,
        residue: u64,
        budget: u64,
    },

    #[error("gcd({modulus}, {residue}) != 1, progression holds at most one prime")]
    ResidueNotCoprime { modulus: u64, residue: u64 },

    #[error("{0} is a perfect square (or < 2); Pell equation not applicable")]
    PellNotApplicable(BigInt),

    #[error("Pell modulus {0} is a perfect square; family is degenerate")]
    PellDegenerate(BigInt),

    #[error("polynomial has zero discriminant (excluded form a*(x + r)^2)")]
    ExcludedForm,

    #[error("leading coefficient must be positive, got {0}")]
    LeadingCoefficient(i64),

    #[error("discriminant overflows i128")]
    DiscriminantOverflow,

    #[error("sieve limit must be at least 1")]
    EmptySieve,

    #[error("x = {x} is outside the sieve range 1..={limit}")]
    OutOfSieveRange { x: u64, limit: u64 },

    #[error("Dirichlet series exponent must satisfy s > 1, got {0}")]
    ExponentTooSmall(f64),

    #[error("seed does not satisfy f(n0) = l*m0^2: {0}")]
    InvalidSeed(String),

    #[error("family generation produced {found} of {wanted} members within {budget} Pell indices")]
    FamilyBudgetExhausted {
        found: usize,
        wanted: usize,
        budget: usize,
    },

    #[error("monic construction requires a = 1, got a = {0}")]
    NotMonic(i64),

    #[error("leading coefficient {0} is not prime")]
    LeadingNotPrime(i64),

    #[error("discriminant {0} is not a non-zero perfect square")]
    DiscriminantNotSquare(i128),

    #[error("no integral n = (-b +/- qX)/(2p) found within {0} Pell solutions")]
    NoIntegralSolution(usize),

    #[error("internal defect: {0}")]
    Defect(String),

    #[error("malformed certificate: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
