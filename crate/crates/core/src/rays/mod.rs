//! Geometric optics over concentric piecewise-constant media: reflection and
//! refraction at the circles, energy-weighted branch trees and the
//! visibility checker.

mod branches;
mod optics;
mod visibility;

pub use branches::{trace_branches, BranchCaps, Event, EventKind, RayBranchGraph};
pub use optics::{
    amplitude_coeffs, energy_split, incidence_angle, normal_slownesses, reflect, snell_transmit, Transmission, Vec2,
    CRITICAL_TOL, TANGENCY_TOL,
};
pub use visibility::{check_visibility, sample_points, RaySample, Sampling, VisibilityReport};
