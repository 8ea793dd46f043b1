use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("conversion to SL2 failed, residual {residual:.3e}")]
    Conversion { residual: f64 },
    #[error("element is not loxodromic (|lambda| = {modulus})")]
    NotLoxodromic { modulus: f64 },
    #[error("point is not on the upper hyperboloid sheet: {0}")]
    NotOnSheet(String),
    #[error("distance argument {0} below arccosh range")]
    DistanceRange(f64),
    #[error("reduction stuck at distance {distance}: no face pairing decreases it")]
    ReductionStuck { distance: f64 },
    #[error("reduction exceeded {0} iterations")]
    ReductionDiverged(usize),
    #[error("word/matrix mismatch after reduction, residual {0:.3e}")]
    ReductionMismatch(f64),
    #[error("relation {index} does not evaluate to +/-identity (residual {residual:.3e})")]
    BadRelation { index: usize, residual: f64 },
    #[error("sign system is inconsistent; input data is corrupt")]
    InconsistentSpinSystem,
    #[error("H1 has positive rank (invariant factor 0); finite character set undefined")]
    PositiveB1,
    #[error("test function not admissible here: {0}")]
    Inadmissible(String),
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("unsupported kind/parity combination: {0}")]
    Unsupported(String),
    #[error("minimum assumption failed for the bump transform on [-{0}, {0}]")]
    AssumptionFailure(f64),
    #[error("parameter out of validity range: {0}")]
    InvalidRange(String),
    #[error("spectral window carries no sign; run disambiguation first")]
    MissingSign,
    #[error("no admissible member in [{0}, {1}]; data too coarse")]
    Inconclusive(f64, f64),
    #[error("{count} admissible members in [{lo}, {hi}]; cannot resolve")]
    Ambiguous { count: usize, lo: f64, hi: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable process exit code for the CLI; one code per error family.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse { .. } | Io(_) => 2,
            Validation(_) | BadRelation { .. } | InconsistentSpinSystem | PositiveB1
            | NotOnSheet(_) => 3,
            Conversion { .. } | NotLoxodromic { .. } | DistanceRange(_) | ReductionStuck { .. }
            | ReductionDiverged(_) | ReductionMismatch(_) => 4,
            Inadmissible(_) | Parity(_) | Unsupported(_) | AssumptionFailure(_)
            | InvalidRange(_) | MissingSign => 5,
            Inconclusive(..) | Ambiguous { .. } => 6,
        }
    }
}
