use thiserror::Error;

/// Every failure the library can report. Variants are grouped loosely by module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // exactfield
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("prime field requires a modulus")]
    MissingModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch")]
    FieldMismatch,

    // densemat
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix does not have full row rank")]
    NotFullRowRank,
    #[error("Gram right inverse is only available over Q")]
    GramUnavailable,
    #[error("matrix is not square")]
    NonSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),

    // unipoly
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial not fully factored over Q (remaining factor {0})")]
    NotFullyFactored(String),

    // matdiv
    #[error("F is not a divisor of G")]
    NotDivisible,
    #[error("requested rank {requested} outside [{low}, {high}]")]
    RankOutOfBounds { requested: usize, low: usize, high: usize },
    #[error("bad recipe: {0}")]
    BadRecipe(String),
    #[error("no square-zero quotient exists")]
    NoSqzQuotient,

    // factorize
    #[error("input is a scalar matrix")]
    ScalarInput,
    #[error("input is singular")]
    SingularInput,
    #[error("prescribed diagonals do not multiply to the determinant")]
    DeterminantMismatch,
    #[error("nonzero nilpotent matrix of order 2")]
    Order2NonzeroNilpotent,
    #[error("matrix is nonsingular")]
    NonSingular,
    #[error("nonzero nilpotent matrix of order 2 is not a product of two nilpotents")]
    ExceptionalCase,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("not a product of two square-zero matrices")]
    NotTwoSqzFactorable,
    #[error("rank {rank} exceeds n/2 for order {n}")]
    RankTooHigh { rank: usize, n: usize },
    #[error("need at least three factors")]
    KTooSmall,

    // summation
    #[error("trace is nonzero")]
    NonzeroTrace,
    #[error("not a sum of two square-zero matrices")]
    NotSumOfTwo,
    #[error("matrix is not a companion matrix")]
    NotCompanion,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("trace condition violated")]
    TraceMismatch,
    #[error("degree mismatch")]
    DegreeMismatch,
    #[error("operation requires characteristic 2")]
    WrongCharacteristic,

    // oracle
    #[error("enumeration too large")]
    TooLarge,

    #[error("internal construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
