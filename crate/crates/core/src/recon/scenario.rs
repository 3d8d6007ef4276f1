use super::config::{ReconConfig, DEFAULT_M_MAX, DEFAULT_TOL_REL};
use super::operator::Reconstructor;
use crate::error::{Error, Result};
use crate::grid_field::{make_phantom, Grid, PhantomKind, Region, ScalarField, WaveState, DEFAULT_HARMONIC_TOL};
use crate::medium::{Layer, Medium};
use crate::wave::{default_box_margin, forward, forward_run, BoundaryTrace, ForwardOptions, DEFAULT_CFL};

/// Physical description of K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KShape {
    Disk { cx: f64, cy: f64, radius: f64 },
    Annulus { cx: f64, cy: f64, inner: f64, outer: f64 },
    Rectangle { xmin: f64, xmax: f64, ymin: f64, ymax: f64 },
}

impl KShape {
    pub fn rasterize(&self, g: Grid) -> Result<Region> {
        match *self {
            KShape::Disk { cx, cy, radius } => Region::disk(g, cx, cy, radius),
            KShape::Annulus { cx, cy, inner, outer } => Region::annulus(g, cx, cy, inner, outer),
            KShape::Rectangle { xmin, xmax, ymin, ymax } => Region::rectangle_physical(g, xmin, xmax, ymin, ymax),
        }
    }
}

/// Everything needed to run a reconstruction experiment, in physical units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub h: f64,
    /// Omega as `(xmin, xmax, ymin, ymax)`.
    pub omega: (f64, f64, f64, f64),
    /// Explicit computational box; derived from Omega and the margin when
    /// absent.
    pub grid: Option<Grid>,
    pub layers: Vec<Layer>,
    pub mollify_width: f64,
    pub kset: KShape,
    pub t_final: f64,
    pub cfl: f64,
    pub sponge: bool,
    pub box_margin: Option<f64>,
    pub m_max: usize,
    pub tol_rel: f64,
    pub harmonic_tol: f64,
}

impl Scenario {
    /// Example 1: Omega = [-1, 1]^2, one slow disk of radius `r0` and speed
    /// `c0`, K = B(0, rho), `cells` cells across Omega.
    pub fn example1(cells: usize, r0: f64, c0: f64, rho: f64, t_final: f64) -> Self {
        Scenario {
            h: 2.0 / cells as f64,
            omega: (-1.0, 1.0, -1.0, 1.0),
            grid: None,
            layers: vec![Layer { radius: r0, speed: c0 }],
            mollify_width: 0.0,
            kset: KShape::Disk { cx: 0.0, cy: 0.0, radius: rho },
            t_final,
            cfl: DEFAULT_CFL,
            sponge: false,
            box_margin: None,
            m_max: DEFAULT_M_MAX,
            tol_rel: DEFAULT_TOL_REL,
            harmonic_tol: DEFAULT_HARMONIC_TOL,
        }
    }

    /// Same physical set-up with `r` times more cells across Omega.
    pub fn refined(&self, r: usize) -> Result<Self> {
        Ok(Scenario {
            h: self.h / r as f64,
            grid: self.grid.map(|g| g.refined(r)).transpose()?,
            ..self.clone()
        })
    }

    fn box_and_omega(&self) -> Result<(Grid, Region)> {
        let (xmin, xmax, ymin, ymax) = self.omega;
        if let Some(g) = self.grid {
            let omega = Region::rectangle_physical(g, xmin, xmax, ymin, ymax)?;
            return Ok((g, omega));
        }
        let h = self.h;
        let cells = |a: f64, b: f64| -> Result<usize> {
            let n = (b - a) / h;
            if !(n >= 2.0) || (n - n.round()).abs() > 1e-6 {
                return Err(Error::config(format!(
                    "omega side {} is not a whole number (>= 2) of cells of size {h}",
                    b - a
                )));
            }
            Ok(n.round() as usize)
        };
        let (cx, cy) = (cells(xmin, xmax)?, cells(ymin, ymax)?);
        let margin = self.box_margin.unwrap_or_else(|| default_box_margin(self.t_final, h));
        if !(margin > 0.0) {
            return Err(Error::config("box margin must be positive"));
        }
        let pad = (margin / h - 1e-9).ceil().max(1.0) as usize;
        let g = Grid::new(cx + 2 * pad + 1, cy + 2 * pad + 1, h, xmin - pad as f64 * h, ymin - pad as f64 * h)?;
        let omega = Region::rectangle(g, pad, pad + cx, pad, pad + cy)?;
        Ok((g, omega))
    }

    pub fn build(&self) -> Result<Setup> {
        let (grid, omega) = self.box_and_omega()?;
        let medium = Medium::with_mollification(grid, &self.layers, self.mollify_width)?;
        let kset = self.kset.rasterize(grid)?;
        let mut cfg = ReconConfig::new(omega, kset, &medium, self.t_final, self.cfl)?;
        cfg.m_max = self.m_max;
        cfg.tol_rel = self.tol_rel;
        cfg.harmonic_tol = self.harmonic_tol;
        cfg.solver = cfg.solver.with_sponge(self.sponge);
        cfg.solver.box_margin = self.box_margin.unwrap_or(cfg.solver.box_margin);
        cfg.validate(&medium)?;
        Ok(Setup { medium, cfg })
    }
}

/// A scenario rasterised on its grid.
pub struct Setup {
    pub medium: Medium,
    pub cfg: ReconConfig,
}

impl Setup {
    pub fn grid(&self) -> Grid {
        *self.medium.grid()
    }

    pub fn reconstructor(&self) -> Result<Reconstructor> {
        Reconstructor::new(self.medium.clone(), self.cfg.clone())
    }

    pub fn into_reconstructor(self) -> Result<Reconstructor> {
        Reconstructor::new(self.medium, self.cfg)
    }

    /// The phantom sampled on this grid, supported in K.
    pub fn phantom(&self, kind: &PhantomKind) -> Result<ScalarField> {
        make_phantom(kind, self.grid(), &self.cfg.kset)
    }

    /// Measured data `Λ₁ f` for an analytic phantom.
    ///
    /// With `refine > 1` the wave equation is solved on a grid `refine` times
    /// finer and sampled at the coarse detector nodes and time levels, so
    /// the data carry no trace of the coarse discretisation.
    pub fn simulate_trace(&self, kind: &PhantomKind, refine: usize) -> Result<BoundaryTrace> {
        let omega = &self.cfg.omega;
        if refine <= 1 {
            let f = self.phantom(kind)?;
            return forward(&WaveState::displacement(f), &self.medium, omega, &self.cfg.solver);
        }
        let r = refine;
        let fine_grid = self.grid().refined(r)?;
        let fine_medium = self.medium.on_grid(fine_grid)?;
        let fine_omega = omega.refined(r)?;
        let fine_k = self.cfg.kset.refined(r)?;
        let f = make_phantom(kind, fine_grid, &fine_k)?;
        let fine_cfg = self.cfg.solver.refined(r);
        let g = self.grid();
        let probes: Vec<usize> = omega
            .boundary()
            .iter()
            .map(|&k| {
                let (i, j) = g.ij(k);
                fine_grid.idx(r * i, r * j)
            })
            .collect();
        let opts = ForwardOptions {
            probes: &probes,
            probe_stride: r,
            record_trace: false,
            keep_final: false,
            progress: None,
        };
        let run = forward_run(&WaveState::displacement(f), &fine_medium, &fine_omega, &fine_cfg, &opts)?;
        let points = omega.boundary().iter().map(|&k| g.coord_of(k)).collect();
        BoundaryTrace::new(self.cfg.solver.dt, points, omega.boundary().to_vec(), run.probes)
    }
}
