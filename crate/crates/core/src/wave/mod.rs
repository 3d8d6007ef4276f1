//! Leapfrog time stepping, the boundary measurement operator, the backward
//! mixed problem on Omega and the exterior Neumann operator.

mod backward;
mod config;
mod exterior;
mod forward;
mod stepper;
mod trace;

pub use backward::solve_backward;
pub use config::{box_clearance, cfl_dt, default_box_margin, SolverConfig, DEFAULT_CFL};
pub use exterior::{exterior_neumann, exterior_run, outward_neighbours, ExteriorRun};
pub use forward::{forward, forward_run, ForwardOptions, ForwardRun};
pub use stepper::{step, Propagator};
pub use trace::BoundaryTrace;
