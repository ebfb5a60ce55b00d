pub mod asymptotics;
pub mod config;
pub mod error;
pub mod phases;
pub mod series;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
