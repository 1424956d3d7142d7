pub mod asymptotics;
pub mod catalog;
pub mod cli;
pub mod discriminance;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod spectral;

pub use error::{Error, Result};
