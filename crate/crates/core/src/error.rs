//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("derivative of order {requested} requested, but only {available} are available")]
    Smoothness { requested: usize, available: usize },
    #[error("coefficient is not real-valued: {0}")]
    NonReal(String),
    #[error("beam is not normalized: t(1) = {0}")]
    NotNormalized(f64),
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("root search failed: {0}")]
    RootSearch(String),
    #[error("located {located} zeros but the contour count is {expected}")]
    CountMismatch { located: usize, expected: usize },
    #[error("winding number {0} is not close to an integer (contour too close to a zero)")]
    ContourTooClose(f64),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
