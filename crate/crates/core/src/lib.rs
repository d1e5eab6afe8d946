pub mod analysis;
pub mod bench;
pub mod error;
pub mod exec;
pub mod numerics;
pub mod problems;
pub mod solver;
pub mod stepsize;

pub use error::{Error, Result};
