//! Point counts, Frobenius traces and monodromy data for a catalog of K3 surfaces.

pub mod counting;
pub mod error;
pub mod ffield;
pub mod models;
pub mod monodromy;
pub mod numfield;
pub mod stats;
pub mod traces;

pub use error::{Error, Result};
