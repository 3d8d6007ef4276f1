use crate::error::{Error, Result};
use crate::grid_field::Region;
use crate::medium::Medium;

pub const DEFAULT_CFL: f64 = 0.4;

/// Largest stable leapfrog step `cfl * h / (c_max * sqrt 2)`.
pub fn cfl_dt(m: &Medium, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::config(format!("cfl must lie in (0, 1), got {cfl}")));
    }
    Ok(cfl * m.grid().h / (m.c_max() * std::f64::consts::SQRT_2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub cfl: f64,
    /// Padding between Omega and the edge of the computational box used when
    /// a box is built for a run.
    pub box_margin: f64,
    /// Cosine-ramp damping layer along the box edge.
    pub sponge: bool,
}

impl SolverConfig {
    /// Uniform steps covering `[0, t_final]` exactly, no larger than the CFL
    /// step.
    pub fn new(m: &Medium, t_final: f64, cfl: f64) -> Result<Self> {
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::config("final time must be >= 0"));
        }
        let dt_max = cfl_dt(m, cfl)?;
        let n_steps = (t_final / dt_max - 1e-9).ceil().max(0.0) as usize;
        let dt = if n_steps > 0 { t_final / n_steps as f64 } else { dt_max };
        Ok(SolverConfig {
            dt,
            n_steps,
            cfl,
            box_margin: default_box_margin(t_final, m.grid().h),
            sponge: false,
        })
    }

    pub fn with_sponge(mut self, on: bool) -> Self {
        self.sponge = on;
        self
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn n_times(&self) -> usize {
        self.n_steps + 1
    }

    /// Matching configuration on a grid refined by `r`: every `r`-th fine
    /// step lands on a coarse time level.
    pub fn refined(&self, r: usize) -> Self {
        SolverConfig {
            dt: self.dt / r as f64,
            n_steps: self.n_steps * r,
            ..*self
        }
    }

    /// Checks stability and that reflections from the box edge cannot reach
    /// Omega before the final time.
    pub fn validate(&self, m: &Medium, omega: &Region) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::config("time step must be positive"));
        }
        let limit = self.cfl.min(0.999_999) * m.grid().h / (m.c_max() * std::f64::consts::SQRT_2);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "time step {} exceeds the CFL limit {}",
                self.dt, limit
            )));
        }
        if omega.grid() != m.grid() {
            return Err(Error::config("omega and medium live on different grids"));
        }
        let margin = box_clearance(omega);
        if !self.sponge && margin < 0.5 * self.t_final() {
            return Err(Error::config(format!(
                "box margin {margin} is below T/2 = {}; enlarge the box or enable the sponge",
                0.5 * self.t_final()
            )));
        }
        Ok(())
    }
}

/// Echo-free padding: exterior speed is 1, so an echo from the box edge
/// needs `2 * margin` to return to Omega. Ten extra cells absorb the
/// numerical precursor of the discrete stencil.
pub fn default_box_margin(t_final: f64, h: f64) -> f64 {
    0.5 * t_final + 10.0 * h
}

/// Smallest physical distance from a closure node of `omega` to the
/// outer ring of its grid.
pub fn box_clearance(omega: &Region) -> f64 {
    let g = omega.grid();
    omega
        .interior()
        .iter()
        .chain(omega.boundary())
        .map(|&k| {
            let (i, j) = g.ij(k);
            i.min(j).min(g.nx - 1 - i).min(g.ny - 1 - j)
        })
        .min()
        .unwrap_or(0) as f64
        * g.h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::Grid;
    use crate::medium::Layer;

    #[test]
    fn cfl_formula() {
        let g = Grid::new(11, 11, 0.01, 0.0, 0.0).unwrap();
        let m = Medium::new(g, &[]).unwrap();
        let dt = cfl_dt(&m, 0.4).unwrap();
        // 0.004 / sqrt(2), evaluated independently.
        assert!((dt - 0.002_828_427_124_746_19).abs() < 1e-15);
        let g = Grid::new(21, 21, 0.01, -0.1, -0.1).unwrap();
        let fast = Medium::new(g, &[Layer { radius: 0.05, speed: 2.0 }]).unwrap();
        assert!((cfl_dt(&fast, 0.4).unwrap() - dt / 2.0).abs() < 1e-16);
        assert!(cfl_dt(&m, 0.0).is_err());
        assert!(cfl_dt(&m, 1.0).is_err());
    }

    #[test]
    fn steps_cover_final_time() {
        let g = Grid::new(11, 11, 0.01, 0.0, 0.0).unwrap();
        let m = Medium::new(g, &[]).unwrap();
        let c = SolverConfig::new(&m, 0.1, 0.4).unwrap();
        assert!((c.t_final() - 0.1).abs() < 1e-14);
        assert!(c.dt <= cfl_dt(&m, 0.4).unwrap());
        let f = c.refined(2);
        assert_eq!(f.n_steps, 2 * c.n_steps);
        assert_eq!(SolverConfig::new(&m, 0.0, 0.4).unwrap().n_steps, 0);
    }

    #[test]
    fn small_box_is_rejected_without_sponge() {
        let g = Grid::new(41, 41, 0.05, -1.0, -1.0).unwrap();
        let m = Medium::new(g, &[]).unwrap();
        let omega = Region::rectangle(g, 10, 30, 10, 30).unwrap();
        let c = SolverConfig::new(&m, 2.0, 0.4).unwrap();
        assert!(c.validate(&m, &omega).is_err());
        assert!(c.with_sponge(true).validate(&m, &omega).is_ok());
        let short = SolverConfig::new(&m, 0.9, 0.4).unwrap();
        assert!(short.validate(&m, &omega).is_ok());
    }
}
