pub mod cli;
pub mod error;
pub mod maxent;
pub mod par;
pub mod ratpoly;
pub mod toric;

pub use error::{Error, Result};
