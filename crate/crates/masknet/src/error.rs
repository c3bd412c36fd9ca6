use thiserror::Error;

/// Errors from degree-distribution construction and evaluation.
#[derive(Debug, Error)]
pub enum DegreeError {
    #[error("pgf argument {0} outside [0, 1]")]
    ArgumentOutOfRange(f64),
    #[error("mean degree is zero; excess distribution undefined")]
    ZeroMeanDegree,
    #[error("pmf entry for degree {degree} is negative ({value})")]
    NegativePmf { degree: usize, value: f64 },
    #[error("pmf sums to {0}, expected 1 (tolerance 1e-6)")]
    NotNormalized(f64),
    #[error("empty pmf")]
    EmptyPmf,
    #[error("power-law exponent {0} must be positive")]
    BadExponent(f64),
    #[error("power-law support [{kmin}, {kmax}] is empty")]
    EmptySupport { kmin: usize, kmax: usize },
    #[error("malformed pmf file line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors from model-parameter construction.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("mask fraction m = {0} outside [0, 1]")]
    MaskFractionOutOfRange(f64),
    #[error("transmissibility T{row}{col} = {value} outside [0, 1]")]
    TransmissibilityOutOfRange { row: u8, col: u8, value: f64 },
}

/// Errors from network construction and serialization.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("degree sequence has odd sum {0}")]
    OddStubSum(u64),
    #[error("edge endpoint {0} out of range for {1} nodes")]
    EndpointOutOfRange(usize, usize),
    #[error("malformed network file line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors from the simulation engine.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("patient zero index {0} out of range for {1} nodes")]
    PatientZeroOutOfRange(usize, usize),
    #[error("no node of the requested patient-zero type exists")]
    NoNodeOfRequestedType,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Fixed-point solver failure, carrying the last residual for diagnostics.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: u64, residual: f64 },
    #[error("literal f-sum only supported for z <= {max}, got {z}")]
    LiteralSumTooLarge { z: u32, max: u32 },
    #[error(transparent)]
    Degree(#[from] DegreeError),
}
