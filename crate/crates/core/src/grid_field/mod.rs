//! Uniform grids, scalar fields and the discrete operators built on them.

mod grid;
mod harmonic;
mod ops;
mod phantom;
mod region;

pub use grid::{Grid, ScalarField, WaveState};
pub use harmonic::{
    harmonic_extension, project_hd, stencil_residual_max, LaplaceSystem, DEFAULT_HARMONIC_TOL,
};
pub use ops::{
    apply_wave_operator, dirichlet_energy, energy, energy_density, l2_norm_on, laplacian_into,
};
pub use phantom::{make_phantom, random_bumps, Bump, PhantomKind};
pub use region::{Region, RegionShape, NodeClass};
