use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set size {0} outside supported range 1..={1}")]
    GroundSetSize(usize, usize),
    #[error("families live on different ground sets: n={0} vs n={1}")]
    GroundSetMismatch(usize, usize),
    #[error("element {elem} out of range 1..={n}")]
    ElementOutOfRange { elem: usize, n: usize },
    #[error("mask {mask:#x} has bits outside the {n}-element ground set")]
    MaskOutOfRange { mask: u32, n: usize },
    #[error("matching size must be at least 2, got {0}")]
    MatchingSizeTooSmall(usize),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("family already contains {0} pairwise disjoint sets")]
    AlreadyHasMatching(usize),
    #[error("family is not {0}-saturated")]
    NotSaturated(usize),
    #[error("family is not increasing: {0} is a member but {1} is not")]
    NotIncreasing(crate::Mask, crate::Mask),
    #[error("family density exceeds 1/2 ({size} of {total} masks)")]
    DensityTooHigh { size: u64, total: u64 },
    #[error("instance too large: {0}")]
    GuardExceeded(String),
    #[error("invalid family file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
