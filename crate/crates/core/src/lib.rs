pub mod algebra;
pub mod cli;
pub mod cohomology;
pub mod config;
pub mod corpus;
pub mod derivations;
pub mod dynamics;
pub mod error;
pub mod factor_system;
pub mod geometry;
pub mod report;

pub use error::{Error, Result};
