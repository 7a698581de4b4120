use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{algorithm} did not converge after {iterations} iterations")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
    },

    #[error("matrix is numerically singular (pivot {pivot:e}){}", at.map(|z| format!(" at z = {z}")).unwrap_or_default())]
    Singular { pivot: f64, at: Option<Complex64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("norm enclosure unavailable: {0}")]
    EnclosureUnavailable(String),

    #[error("no oracle available: {0}")]
    OracleUnavailable(String),

    #[error("winding mesh still too coarse at {samples} samples (largest increment {max_increment:.3} rad)")]
    MeshTooCoarse { samples: usize, max_increment: f64 },

    #[error("contour touches the spectrum at z = {z} (margin {margin:e})")]
    ContourTouchesSpectrum { z: Complex64, margin: f64 },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("index undefined at n = {n}: lambda = {lambda} lies on the essential spectrum")]
    UndefinedIndex { n: usize, lambda: Complex64 },

    #[error("failed at n = {n}: {source}")]
    AtIndex { n: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn at_index(n: usize, err: Error) -> Self {
        Error::AtIndex {
            n,
            source: Box::new(err),
        }
    }

    /// Strips `AtIndex` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIndex { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors that mean "the theorem's hypotheses could not be
    /// certified" rather than a numerical breakdown.
    pub fn is_hypothesis_like(&self) -> bool {
        matches!(
            self.root(),
            Error::OracleUnavailable(_)
                | Error::Hypothesis(_)
                | Error::UndefinedIndex { .. }
                | Error::ContourTouchesSpectrum { .. }
                | Error::EnclosureUnavailable(_)
                | Error::Contract(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
