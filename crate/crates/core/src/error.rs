use crate::rational::{format_rational, Rational, RationalParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{location}: {message}")]
    Malformed { location: String, message: String },

    #[error("{location}: {source}")]
    Rational {
        location: String,
        source: RationalParseError,
    },

    #[error("{location}: duplicate country label `{label}`")]
    DuplicateLabel { location: String, label: String },

    #[error("{location}: unknown country label `{label}`")]
    UnknownLabel { location: String, label: String },

    #[error("{location}: country `{label}` cannot be related to itself")]
    SelfRelation { location: String, label: String },

    #[error("{location}: country `{label}` has negative power {}", format_rational(.power))]
    NegativePower {
        location: String,
        label: String,
        power: Rational,
    },

    #[error("{location}: pair ({a}, {b}) is listed more than once")]
    DuplicatePair {
        location: String,
        a: String,
        b: String,
    },

    #[error("unknown country id {0}")]
    UnknownCountry(usize),

    #[error("a country cannot befriend itself")]
    SameCountry,

    #[error("countries `{a}` and `{b}` are already friends")]
    AlreadyFriends { a: String, b: String },

    #[error("strategy matrix was validated against a different environment")]
    EnvironmentMismatch,

    #[error("utility model has {model} countries but the environment has {environment}")]
    ModelMismatch { model: usize, environment: usize },

    #[error("strategy matrix must be {expected}x{expected}")]
    MatrixShape { expected: usize },

    #[error("negative allocation u[{row}][{col}] = {}", format_rational(.value))]
    NegativeEntry {
        row: String,
        col: String,
        value: Rational,
    },

    #[error("row `{row}` sums to {} but its power is {}", format_rational(.sum), format_rational(.power))]
    RowSum {
        row: String,
        sum: Rational,
        power: Rational,
    },

    #[error("country `{row}` allocates to `{col}`, which is neither a friend nor an adversary")]
    NonNeighbor { row: String, col: String },

    #[error(
        "{location}: favorable value {} is below unfavorable value {} (t(1) >= t(0) is required)",
        format_rational(.favorable),
        format_rational(.unfavorable)
    )]
    UtilityOrder {
        location: String,
        favorable: Rational,
        unfavorable: Rational,
    },

    #[error("grid denominator {denominator} does not make the power of `{label}` integral")]
    GridNotIntegral { label: String, denominator: u64 },

    #[error("grid denominator must be positive")]
    ZeroDenominator,

    #[error("search space of {size} strategy matrices exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("no equilibria found on the grid with denominator {denominator}")]
    NoGridEquilibria { denominator: u64 },

    #[error("country `{label}` has {degree} neighbors; at most 63 are supported")]
    TooManyNeighbors { label: String, degree: usize },

    #[error("exact values do not fit the integer grid kernel")]
    Overflow,

    #[error("environment pair is not a valid friend extension: {0}")]
    EnvironmentPair(String),

    #[error("utility models disagree: {0}")]
    ModelPair(String),

    #[error("power condition violated: {lhs} > {rhs}", lhs = format_rational(.lhs), rhs = format_rational(.rhs))]
    PowerCondition { lhs: Rational, rhs: Rational },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("price-of-anarchy bounds undefined: B = {} is not positive", format_rational(.b))]
    BoundsUndefined { b: Rational },
}

impl Error {
    /// Errors caused by malformed or invalid input files rather than by the
    /// analysis itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Malformed { .. }
                | Error::Rational { .. }
                | Error::DuplicateLabel { .. }
                | Error::UnknownLabel { .. }
                | Error::SelfRelation { .. }
                | Error::NegativePower { .. }
                | Error::DuplicatePair { .. }
                | Error::MatrixShape { .. }
                | Error::NegativeEntry { .. }
                | Error::RowSum { .. }
                | Error::NonNeighbor { .. }
                | Error::UtilityOrder { .. }
        )
    }

    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Malformed { .. } => "malformed",
            Error::Rational { .. } => "rational",
            Error::DuplicateLabel { .. } => "duplicate-label",
            Error::UnknownLabel { .. } => "unknown-label",
            Error::SelfRelation { .. } => "self-relation",
            Error::NegativePower { .. } => "negative-power",
            Error::DuplicatePair { .. } => "duplicate-pair",
            Error::UnknownCountry(_) => "unknown-country",
            Error::SameCountry => "same-country",
            Error::AlreadyFriends { .. } => "already-friends",
            Error::EnvironmentMismatch => "environment-mismatch",
            Error::ModelMismatch { .. } => "model-mismatch",
            Error::MatrixShape { .. } => "matrix-shape",
            Error::NegativeEntry { .. } => "negative-entry",
            Error::RowSum { .. } => "row-sum",
            Error::NonNeighbor { .. } => "non-neighbor",
            Error::UtilityOrder { .. } => "utility-order",
            Error::GridNotIntegral { .. } => "grid-not-integral",
            Error::ZeroDenominator => "zero-denominator",
            Error::SearchSpaceTooLarge { .. } => "search-space-too-large",
            Error::NoGridEquilibria { .. } => "no-grid-equilibria",
            Error::TooManyNeighbors { .. } => "too-many-neighbors",
            Error::Overflow => "overflow",
            Error::EnvironmentPair(_) => "environment-pair",
            Error::ModelPair(_) => "model-pair",
            Error::PowerCondition { .. } => "power-condition",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::BoundsUndefined { .. } => "bounds-undefined",
        }
    }
}
