pub mod error;
pub mod harness;
pub mod hermgeo;
pub mod ladder;
pub mod linalg;
pub mod lse;
pub mod mabuchi;
pub mod moment;
pub mod quantmaps;
pub mod toric;

pub use error::{Error, Result};
