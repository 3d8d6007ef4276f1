//! Numerical laboratory for thermoacoustic tomography in 2-D media whose
//! sound speed jumps across nested circular interfaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid_field`]: uniform grids, scalar fields, discrete energies, harmonic
//!   extension and the Dirichlet projection.
//! - [`medium`]: piecewise-constant speed maps with circular interfaces.
//! - [`wave`]: leapfrog time stepping, the boundary measurement operator,
//!   the backward mixed problem and the exterior Neumann operator.
//! - [`recon`]: time-reversal pseudo-inverse, error operator and the
//!   Neumann-series reconstruction with its diagnostics.
//! - [`rays`]: geometric optics at interfaces, branch graphs and the
//!   visibility checker.
//! - [`io`]: binary grid/trace formats, PGM output, run configuration and
//!   the command-line driver.

pub mod error;
pub mod grid_field;
pub mod io;
pub mod medium;
pub mod par;
pub mod rays;
pub mod recon;
pub mod wave;

pub use error::{Error, Result};
pub use grid_field::{Grid, Region, RegionShape, ScalarField, WaveState};
pub use medium::{InterfaceDescriptor, Layer, Medium};
