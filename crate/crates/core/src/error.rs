use thiserror::Error;

use crate::sites::Site;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid site: {0}")]
    InvalidSite(String),

    #[error("operator acts on {site}, which is not part of the target site space")]
    SiteNotInSpace { site: Site },

    #[error("series product needs equal channel counts: {left} has {left_channels}, {right} has {right_channels}")]
    ChannelMismatch { left: String, left_channels: usize, right: String, right_channels: usize },

    #[error("invalid channel permutation: {0}")]
    InvalidPermutation(String),

    #[error("operator is not diagonal in the relay basis: {0}")]
    NotRelayDiagonal(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("collapse operator count mismatch: {0} vs {1}")]
    CollapseCountMismatch(usize, usize),

    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
