use super::config::{box_clearance, SolverConfig};
use super::stepper::{ActiveSet, Propagator};
use super::trace::BoundaryTrace;
use crate::error::{Error, Result};
use crate::grid_field::{NodeClass, Region, RegionShape};

pub struct ExteriorRun {
    /// Outward normal difference quotient on the boundary of omega.
    pub neumann: BoundaryTrace,
    /// Time-major samples of the exterior field at the requested nodes.
    pub probes: Vec<f64>,
}

/// Outward neighbours of each boundary node of a rectangle; corners have two.
pub fn outward_neighbours(omega: &Region) -> Result<Vec<Vec<usize>>> {
    let RegionShape::Rectangle { i0, i1, j0, j1 } = *omega.shape() else {
        return Err(Error::config("exterior problem needs a rectangular omega"));
    };
    let g = omega.grid();
    Ok(omega
        .boundary()
        .iter()
        .map(|&k| {
            let (i, j) = g.ij(k);
            let mut v = Vec::with_capacity(2);
            if i == i0 {
                v.push(g.idx(i - 1, j));
            }
            if i == i1 {
                v.push(g.idx(i + 1, j));
            }
            if j == j0 {
                v.push(g.idx(i, j - 1));
            }
            if j == j1 {
                v.push(g.idx(i, j + 1));
            }
            v
        })
        .collect())
}

/// Normal derivative on the boundary of omega of the exterior solution with
/// unit speed, zero initial data and Dirichlet data `boundary`.
pub fn exterior_neumann(boundary: &BoundaryTrace, omega: &Region, cfg: &SolverConfig) -> Result<BoundaryTrace> {
    Ok(exterior_run(boundary, omega, cfg, &[])?.neumann)
}

pub fn exterior_run(
    boundary: &BoundaryTrace,
    omega: &Region,
    cfg: &SolverConfig,
    probes: &[usize],
) -> Result<ExteriorRun> {
    boundary.ensure_on(omega)?;
    if boundary.n_times() != cfg.n_times() {
        return Err(Error::config("trace length does not match the solver configuration"));
    }
    if (boundary.dt() - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(Error::config("trace time step differs from the solver's"));
    }
    let g = *omega.grid();
    if !cfg.sponge && box_clearance(omega) < 0.5 * cfg.t_final() {
        return Err(Error::config("box margin is below T/2; enlarge the box or enable the sponge"));
    }
    if cfg.dt > cfg.cfl * g.h / std::f64::consts::SQRT_2 * (1.0 + 1e-12) {
        return Err(Error::config("time step exceeds the CFL limit for unit speed"));
    }
    if probes.iter().any(|&k| k >= g.len() || omega.class_of(k) == NodeClass::Interior) {
        return Err(Error::config("exterior probes must lie outside the interior of omega"));
    }
    let out = outward_neighbours(omega)?;
    let nodes = omega.boundary();
    let inv_h = 1.0 / g.h;

    let speeds = vec![1.0; g.len()];
    let active = ActiveSet::from_class(omega, |c| c == NodeClass::Outside);
    let mut prop = Propagator::new(g, &speeds, cfg.dt, active, cfg.sponge);
    let mut w0 = vec![0.0; g.len()];
    for (&k, &v) in nodes.iter().zip(boundary.row(0)) {
        w0[k] = v;
    }
    prop.seed(&w0, &vec![0.0; g.len()]);

    let mut values = Vec::with_capacity(nodes.len() * cfg.n_times());
    let mut samples = Vec::with_capacity(probes.len() * cfg.n_times());
    let mut record = |w: &[f64]| {
        values.extend(nodes.iter().zip(&out).map(|(&k, nb)| {
            nb.iter().map(|&q| (w[q] - w[k]) * inv_h).sum::<f64>() / nb.len() as f64
        }));
        samples.extend(probes.iter().map(|&k| w[k]));
    };
    record(prop.current());
    for n in 1..=cfg.n_steps {
        prop.step();
        prop.pin(nodes, boundary.row(n));
        if (n % 64 == 0 || n == cfg.n_steps) && !prop.is_finite() {
            return Err(Error::Instability { step: n });
        }
        record(prop.current());
    }
    let neumann = BoundaryTrace::new(cfg.dt, boundary.points().to_vec(), nodes.to_vec(), values)?;
    Ok(ExteriorRun { neumann, probes: samples })
}
