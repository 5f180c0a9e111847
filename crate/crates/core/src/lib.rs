//! Numerical laboratory for the Bohr radius `K_d`, the Bohr-Agler radius
//! `K(A_d)` and the Schur-Agler radius `SA_d` of the unit polydisk.

pub mod binom;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod mq;
pub mod operator;
pub mod poly;
pub mod radii;
pub mod report;
pub mod rng;
pub mod series;
pub mod steiner;
pub mod transfer;

pub use error::{LabError, Result};
pub use poly::{MultiIndex, SparsePoly};
