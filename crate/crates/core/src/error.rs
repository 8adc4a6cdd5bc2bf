use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised anywhere in the pipeline.
///
/// The variants fall into three classes that the command line maps onto exit
/// codes: caller mistakes ([`Error::Usage`]), requests that are well formed but
/// mathematically inadmissible ([`Error::Domain`] and friends), and requests
/// that exceed a configured budget ([`Error::Resource`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("mismatched primes: {0} vs {1}")]
    PrimeMismatch(u128, u128),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {0}")]
    Resource(String),

    /// `p^N` does not fit the residue word with room for one addition.
    #[error("precision {precision} for p = {prime} overflows the residue word")]
    PrecisionOverflow { prime: u128, precision: u32 },

    #[error("no certified zero in disc: {0}")]
    NoCertifiedZero(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    /// A divisor saturated the working precision; the caller should retry with
    /// a larger `N`.
    #[error("precision saturated at N = {precision}; retry with higher precision")]
    PrecisionSaturated { precision: u32 },

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("uniqueness scan failed: {0}")]
    UniquenessScan(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors caused by the request itself rather than by a
    /// mathematical finding.
    pub fn is_usage_or_resource(&self) -> bool {
        matches!(
            self,
            Error::Usage(_)
                | Error::PrimeMismatch(..)
                | Error::Resource(_)
                | Error::PrecisionOverflow { .. }
                | Error::PrecisionSaturated { .. }
        )
    }
}
