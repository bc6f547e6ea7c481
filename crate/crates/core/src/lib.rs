pub mod bounds;
pub mod checks;
pub mod equilibrium;
pub mod error;
pub mod heights;
pub mod metric;
pub mod padic;
pub mod poly;

pub use error::{Error, Result};
