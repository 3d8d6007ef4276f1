use crate::error::{Error, Result};
use crate::grid_field::{Region, DEFAULT_HARMONIC_TOL};
use crate::medium::Medium;
use crate::wave::SolverConfig;

pub const DEFAULT_TOL_REL: f64 = 1e-4;
pub const DEFAULT_M_MAX: usize = 8;

#[derive(Debug, Clone)]
pub struct ReconConfig {
    pub omega: Region,
    pub kset: Region,
    pub t_final: f64,
    pub m_max: usize,
    pub tol_rel: f64,
    pub harmonic_tol: f64,
    pub solver: SolverConfig,
}

impl ReconConfig {
    pub fn new(omega: Region, kset: Region, m: &Medium, t_final: f64, cfl: f64) -> Result<Self> {
        let solver = SolverConfig::new(m, t_final, cfl)?;
        Ok(ReconConfig {
            omega,
            kset,
            t_final,
            m_max: DEFAULT_M_MAX,
            tol_rel: DEFAULT_TOL_REL,
            harmonic_tol: DEFAULT_HARMONIC_TOL,
            solver,
        })
    }

    pub fn validate(&self, m: &Medium) -> Result<()> {
        if !(self.t_final > 0.0) {
            return Err(Error::config("T must be positive"));
        }
        if self.m_max < 1 {
            return Err(Error::config("m_max must be at least 1"));
        }
        if !(self.tol_rel >= 0.0 && self.harmonic_tol > 0.0) {
            return Err(Error::config("tolerances must be positive"));
        }
        if !self.kset.strictly_inside(&self.omega) {
            return Err(Error::config("K must lie strictly inside omega"));
        }
        let h = m.grid().h;
        for f in m.interfaces() {
            let d = self.kset.distance_to_circle(f.cx, f.cy, f.radius);
            if d < 2.0 * h {
                return Err(Error::config(format!(
                    "K comes within {d} of the interface of radius {}; at least 2h is required",
                    f.radius
                )));
            }
        }
        self.solver.validate(m, &self.omega)
    }
}
