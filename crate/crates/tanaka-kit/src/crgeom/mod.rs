//! CR geometry of tube hypersurfaces over curves in R⁴: Wronskian
//! nondegeneracy, Freeman filtrations, normalized sections and symmetries.

pub mod catalog;
pub mod curve;
pub mod field;
pub mod func;
pub mod parse;
pub mod report;
pub mod symmetry;
pub mod tube;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrError {
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
