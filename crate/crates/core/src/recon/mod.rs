//! Time-reversal pseudo-inverse, error operator and the Neumann-series
//! reconstruction, with contraction and energy-decay diagnostics.

mod config;
mod operator;
mod scenario;
mod series;

pub use config::{ReconConfig, DEFAULT_M_MAX, DEFAULT_TOL_REL};
pub use operator::{Reconstructor, TimeReversal};
pub use scenario::{KShape, Scenario, Setup};
pub use series::{ReconReport, TermRecord};
