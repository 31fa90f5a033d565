use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("division by the zero rational function")]
    DivisionByZero,

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("reserved variable name `{0}`")]
    ReservedName(String),
    #[error("invalid document: {0}")]
    Document(String),
    #[error("unsupported format_version {0}")]
    FormatVersion(i64),

    #[error("generator {index} is not invertible")]
    SingularGenerator { index: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("pole: factor {factor} is not defined at {point}")]
    Pole { factor: String, point: String },
    #[error("pole at walk step {step}: {detail}")]
    PoleAtStep { step: usize, detail: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis columns are linearly dependent")]
    DependentColumns,

    #[error("limit entry ({row},{col}) diverges")]
    DivergentEntry { row: usize, col: usize },
    #[error("Poincaré–Perron condition fails (eigenvalue moduli not distinct)")]
    NotPoincarePerron,
    #[error("rank {0} has no second eigenvalue")]
    NoSecondEigenvalue(usize),
    #[error("root finder did not converge; best iterate {best:?}")]
    RootsNotConverged { best: Vec<(f64, f64)> },
    #[error("polynomial has degree zero")]
    ConstantPolynomial,
    #[error("ratio undefined at n = {0}")]
    UndefinedRatio(usize),

    #[error("invalid pFq parameters: {0}")]
    InvalidPfq(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
