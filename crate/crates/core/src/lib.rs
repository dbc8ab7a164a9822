pub mod actions;
pub mod averaging;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod groups;
pub mod martingale;
pub mod measures;
pub mod quadrature;

pub use error::{OrbintError, Result};
