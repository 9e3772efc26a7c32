use thiserror::Error;

/// Errors surfaced by the vault pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field width {0} out of supported range 2..=16")]
    UnsupportedWidth(u32),
    #[error("modulus {modulus:#x} does not have degree {width}")]
    BadModulusDegree { modulus: u32, width: u32 },
    #[error("modulus {0:#x} is reducible over GF(2)")]
    ReducibleModulus(u32),
    #[error("elements belong to different field contexts")]
    ContextMismatch,
    #[error("inversion of zero")]
    ZeroInversion,
    #[error("value {value} does not fit in GF(2^{width})")]
    ValueOutOfRange { value: u64, width: u32 },

    #[error("duplicate root in root product")]
    DuplicateRoot,
    #[error("duplicate x-coordinate in interpolation input")]
    DuplicateAbscissa,
    #[error("interpolation requires at least one point")]
    EmptyInterpolation,
    #[error("secret length k must be at least 1")]
    SecretLengthZero,
    #[error("entropy input must be non-empty")]
    EmptyEntropy,
    #[error("polynomial has {coeffs} coefficients, more than k={k}")]
    SecretTooLong { coeffs: usize, k: usize },

    #[error("decoding requires at least k={k} points, got {points}")]
    TooFewPoints { points: usize, k: usize },
    #[error("interpolation parameters infeasible: {monomials} monomials for {constraints} constraints")]
    InfeasibleParams { monomials: u64, constraints: u64 },
    #[error("decode parameters invalid: {0}")]
    BadDecodeParams(String),

    #[error("duplicate index in feature set")]
    DuplicateFeatureIndex,
    #[error("feature vector contains a non-finite value at index {0}")]
    NonFiniteFeature(usize),
    #[error("vector length {n} is not divisible by interval count {m}")]
    LengthNotDivisible { n: usize, m: usize },
    #[error("interval count {0} must be at least 2")]
    BadIntervalCount(usize),
    #[error("equal-probable sign quantization requires m=2, got {0}")]
    SignRequiresTwo(usize),
    #[error("quantized value {value} not below interval count {m}")]
    QuantOutOfRange { value: usize, m: usize },
    #[error("feature vector has length {got}, transform expects {expected}")]
    VectorLengthMismatch { got: usize, expected: usize },

    #[error("permutation domain {domain} exceeds field order {order}")]
    DomainExceedsField { domain: usize, order: usize },
    #[error("feature set element {element} outside domain {domain}")]
    ElementOutOfDomain { element: usize, domain: usize },
    #[error("secret length k={k} exceeds feature set size {set}")]
    SecretExceedsSet { k: usize, set: usize },
    #[error("vault record is malformed: {0}")]
    BadRecord(String),
    #[error("record and probe pipelines disagree: {0}")]
    PipelineMismatch(String),

    #[error("evaluation config invalid: {0}")]
    BadEvalConfig(String),
    #[error("embedding file malformed: {0}")]
    BadEmbeddingFile(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
