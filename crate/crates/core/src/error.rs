use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The wave function reached the lattice boundary. The lattice must be
    /// sized so the light cone of the walk stays inside it.
    #[error("edge contact at step {time}: support [{lo}, {hi}] within 2 sites of a lattice of {len} sites")]
    EdgeContact {
        time: usize,
        lo: usize,
        hi: usize,
        len: usize,
    },

    #[error("corrupted state: norm {norm} deviates from 1")]
    CorruptedState { norm: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
