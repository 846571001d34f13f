pub mod abelian;
pub mod arith;
pub mod cli;
pub mod colimit;
pub mod error;
pub mod groupoid;
pub mod odometer;
pub mod report;
pub mod selftest;
mod serde_big;

pub use error::{Error, Result};
