use super::config::SolverConfig;
use super::stepper::{ActiveSet, Propagator};
use super::trace::BoundaryTrace;
use crate::error::{Error, Result};
use crate::grid_field::{NodeClass, Region, ScalarField, WaveState};
use crate::medium::Medium;

/// Mixed problem on `omega` solved from `t = T` down to `t = 0`.
///
/// The two-level scheme starts from `v(T) = cauchy.u` and
/// `v(T - dt) = v(T) - dt*cauchy.ut + dt^2/2 c^2 Δ_h v(T)`; boundary nodes are
/// pinned to the trace at every level. Returns `[v(0), v_t(0)]` on the
/// closure of omega, zero elsewhere.
pub fn solve_backward(
    boundary: &BoundaryTrace,
    cauchy_at_t: &WaveState,
    m: &Medium,
    omega: &Region,
    cfg: &SolverConfig,
) -> Result<WaveState> {
    boundary.ensure_on(omega)?;
    if omega.grid() != m.grid() {
        return Err(Error::config("omega and medium live on different grids"));
    }
    cauchy_at_t.u.ensure_same_grid(m.grid())?;
    cauchy_at_t.ut.ensure_same_grid(m.grid())?;
    if boundary.n_times() != cfg.n_times() {
        return Err(Error::config(format!(
            "trace has {} time levels, solver expects {}",
            boundary.n_times(),
            cfg.n_times()
        )));
    }
    if (boundary.dt() - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(Error::config("trace time step differs from the solver's"));
    }

    let nodes = omega.boundary();
    let last = cfg.n_steps;
    let h_t = boundary.row(last);
    let u_t = omega.trace(&cauchy_at_t.u)?;
    let scale = h_t.iter().chain(&u_t).fold(1.0f64, |a, v| a.max(v.abs()));
    let mismatch = h_t.iter().zip(&u_t).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let tolerance = 1e-9 * scale;
    if mismatch > tolerance {
        return Err(Error::Compatibility { mismatch, tolerance });
    }

    let g = *m.grid();
    let restricted_u = omega.restrict(&cauchy_at_t.u)?;
    let restricted_ut = omega.restrict(&cauchy_at_t.ut)?;
    if last == 0 {
        return WaveState::new(restricted_u, restricted_ut);
    }

    let active = ActiveSet::from_class(omega, |c| c == NodeClass::Interior);
    let mut prop = Propagator::new(g, m.c_field(), cfg.dt, active, false);
    // Reversed time: seeding with -u_t produces the level at T - dt.
    let neg_ut: Vec<f64> = restricted_ut.data().iter().map(|v| -v).collect();
    prop.seed(restricted_u.data(), &neg_ut);
    prop.pin(nodes, h_t);
    for n in 1..=last {
        prop.step();
        prop.pin(nodes, boundary.row(last - n));
        if (n % 64 == 0 || n == last) && !prop.is_finite() {
            return Err(Error::Instability { step: n });
        }
    }

    // Velocity at t = 0 of the forward-time trajectory.
    let mut vt = prop.reversed_velocity();
    for (p, &k) in nodes.iter().enumerate() {
        vt[k] = boundary_velocity(boundary, p, cfg.dt);
    }
    for (k, v) in vt.iter_mut().enumerate() {
        if !omega.in_closure(k) {
            *v = 0.0;
        }
    }
    let mut u = prop.current().to_vec();
    for (k, v) in u.iter_mut().enumerate() {
        if !omega.in_closure(k) {
            *v = 0.0;
        }
    }
    WaveState::new(ScalarField::from_vec(g, u)?, ScalarField::from_vec(g, vt)?)
}

/// One-sided second-order time derivative of the trace at `t = 0`.
fn boundary_velocity(b: &BoundaryTrace, det: usize, dt: f64) -> f64 {
    let v = |n: usize| b.row(n)[det];
    match b.n_times() {
        0 | 1 => 0.0,
        2 => (v(1) - v(0)) / dt,
        _ => (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * dt),
    }
}
