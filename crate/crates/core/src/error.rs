use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular potential term `{term}` at x = {at}")]
    Singularity { term: String, at: String },

    #[error(
        "requested {kind} solution at arg x = {angle:.6} is outside every admissible wedge; admissible: {admissible}"
    )]
    WedgeViolation {
        kind: &'static str,
        angle: f64,
        admissible: String,
    },

    #[error("integration exhausted {steps} steps at parameter t = {t:.6}")]
    StepExhausted { steps: usize, t: f64 },

    #[error("step size underflow at parameter t = {t:.6}")]
    StepUnderflow { t: f64 },

    #[error("node crossing at parameter t = {t:.6}: |psi'/psi| = {magnitude:e}")]
    NodeCrossing { t: f64, magnitude: f64 },

    #[error("states live at different points ({left} vs {right})")]
    PositionMismatch { left: String, right: String },

    #[error("gamma function pole at z = {0}")]
    GammaPole(String),

    #[error("series did not converge after {terms} terms (partial sum {partial})")]
    PrecisionLoss { terms: usize, partial: String },

    #[error("degenerate integer alpha = {0} (logarithmic solutions are not supported)")]
    DegenerateAlpha(f64),

    #[error("inadmissible tau = {tau}: exponents {failing:?} do not map to even powers")]
    InadmissibleTau { tau: String, failing: Vec<String> },

    #[error("resonance: coefficient 1/Gamma({argument}) vanishes")]
    Resonance { argument: String },

    #[error("expression is not decomposable into a power-law potential: {0}")]
    NotDecomposable(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("singular linear system: {0}")]
    SingularSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
