use thiserror::Error;

use crate::grid::FieldKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level-set gradient vanishes at ({0}, {1})")]
    DegenerateGradient(f64, f64),

    #[error("patch around node ({i}, {j}) does not intersect the interface")]
    NoInterfaceInPatch { i: isize, j: isize },

    #[error("patch {patch} is singular: {reason}")]
    SingularPatch { patch: usize, reason: String },

    #[error("dense solve failed: {0}")]
    SolverBreakdown(String),

    #[error("evaluation at ({x}, {y}, t = {t}) lies outside the patch")]
    OutOfPatch { x: f64, y: f64, t: f64 },

    #[error("index ({i}, {j}) out of range for {field:?}")]
    OutOfRange { field: FieldKind, i: isize, j: isize },

    #[error("no jump value for correction target {0}")]
    MissingCorrection(usize),

    #[error("unsupported polynomial degree {0} (expected 1..=4)")]
    UnsupportedDegree(usize),

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("non-finite field value at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
