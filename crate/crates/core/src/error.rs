use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no quantized action in the window ({lo}, {hi}) for hbar = {hbar}")]
    EmptyWindow { lo: f64, hi: f64, hbar: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: achieved residual {residual:e}")]
    Quadrature { residual: f64, tol: f64 },

    #[error("root finder stagnated: worst backward error {worst:e} above target {target:e}")]
    RootsStagnated { worst: f64, target: f64, roots: Vec<num_complex::Complex64> },

    #[error("trace series has no entry for l = {0}")]
    MissingTrace(usize),

    #[error("determinant is not unimodular: |det| = {0}")]
    NonUnimodular(f64),

    #[error("energy inference is ambiguous: ring phase span {span} exceeds 2*pi")]
    Ambiguous { span: f64 },

    #[error("complex-time evaluation overflows: exponent {exponent} above bound {bound}")]
    Overflow { exponent: f64, bound: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// True for errors caused by the input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::EmptyWindow { .. } => true,
            Error::Context { source, .. } => source.is_config(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => true,
            Error::Context { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
