//! Command-line tool and JSON service for the spin prediction game.

pub mod api;
pub mod error;
pub mod report;
pub mod session;
pub mod spec;
pub mod sweep;

pub use error::{Error, Result, SpecError};
