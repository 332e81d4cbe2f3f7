use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("graph generation failed: {0}")]
    Generation(String),
    #[error("no data: {0}")]
    NoData(String),
    #[error("walker stuck on node {node} with no usable edge")]
    StuckWalker { node: u32 },
}
