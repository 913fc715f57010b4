pub mod config;
pub mod cover;
pub mod error;
pub mod extract;
pub mod factor;
pub mod families;
pub mod gamma2;
pub mod io;
pub mod matrix;
pub mod report;
pub mod structure;
pub mod suite;

pub use error::{Error, Result};
