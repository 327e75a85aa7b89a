pub mod counting;
pub mod diagram;
pub mod error;
pub mod linalg;
pub mod orbits;
pub mod rootsys;
pub mod twist;

pub use error::{Error, Result};
