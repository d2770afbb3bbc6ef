pub mod channel;
pub mod cli;
pub mod error;
pub mod hard_fairness;
pub mod numerics;
pub mod partial_reuse;
pub mod pfs;
pub mod simplified;

pub use error::{Error, Result};
