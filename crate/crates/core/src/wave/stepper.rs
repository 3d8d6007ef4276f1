use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_field::{apply_wave_operator, Grid, NodeClass, Region, ScalarField, WaveState};
use crate::medium::Medium;

pub(crate) const SPONGE_NODES: usize = 20;

/// One leapfrog step `2*curr - prev + dt^2 c^2 Δ_h curr`, with the outer
/// ring of the grid held at zero.
pub fn step(prev: &ScalarField, curr: &ScalarField, m: &Medium, dt: f64) -> Result<ScalarField> {
    prev.ensure_same_grid(m.grid())?;
    let lap = apply_wave_operator(curr, m)?;
    let g = *m.grid();
    let mut next = ScalarField::zeros(g);
    let dt2 = dt * dt;
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let k = g.idx(i, j);
            next.data_mut()[k] = 2.0 * curr.data()[k] - prev.data()[k] + dt2 * lap.data()[k];
        }
    }
    if !next.is_finite() {
        return Err(Error::Instability { step: 1 });
    }
    Ok(next)
}

/// Which nodes a propagator updates; everything else keeps its value.
#[derive(Debug, Clone)]
pub(crate) struct ActiveSet {
    /// Half-open `i` ranges per row.
    rows: Vec<Vec<(usize, usize)>>,
}

impl ActiveSet {
    /// Every node off the grid's outer ring.
    pub(crate) fn whole(g: &Grid) -> Self {
        let mut rows = vec![Vec::new(); g.ny];
        for row in rows.iter_mut().take(g.ny - 1).skip(1) {
            row.push((1, g.nx - 1));
        }
        ActiveSet { rows }
    }

    /// Nodes off the outer ring whose class in `r` satisfies `keep`.
    pub(crate) fn from_class(r: &Region, keep: impl Fn(NodeClass) -> bool) -> Self {
        let g = r.grid();
        let mut rows = vec![Vec::new(); g.ny];
        for (j, row) in rows.iter_mut().enumerate().take(g.ny - 1).skip(1) {
            let mut start = None;
            for i in 1..g.nx {
                let on = i < g.nx - 1 && keep(r.class_of(g.idx(i, j)));
                match (on, start) {
                    (true, None) => start = Some(i),
                    (false, Some(s)) => {
                        row.push((s, i));
                        start = None;
                    }
                    _ => {}
                }
            }
        }
        ActiveSet { rows }
    }

    fn for_each(&self, nx: usize, mut f: impl FnMut(usize)) {
        for (j, segs) in self.rows.iter().enumerate() {
            for &(a, b) in segs {
                for i in a..b {
                    f(j * nx + i);
                }
            }
        }
    }
}

/// Two-level leapfrog state with optional pinned nodes and damping.
///
/// Buffers are reused in place: the new level overwrites the oldest one.
pub struct Propagator {
    grid: Grid,
    dt: f64,
    /// `c^2 dt^2 / h^2` per node.
    scale: Vec<f64>,
    /// `sigma dt / 2` per node when a sponge is active.
    damp: Option<Vec<f64>>,
    active: ActiveSet,
    prev: Vec<f64>,
    curr: Vec<f64>,
    level: usize,
}

impl Propagator {
    pub(crate) fn new(grid: Grid, speeds: &[f64], dt: f64, active: ActiveSet, sponge: bool) -> Self {
        let f = dt * dt / (grid.h * grid.h);
        let scale = speeds.iter().map(|c| c * c * f).collect();
        let damp = sponge.then(|| sponge_profile(&grid, speeds, dt));
        Propagator {
            grid,
            dt,
            scale,
            damp,
            active,
            prev: vec![0.0; grid.len()],
            curr: vec![0.0; grid.len()],
            level: 0,
        }
    }

    /// Full-box propagator for the medium.
    pub fn for_medium(m: &Medium, dt: f64, sponge: bool) -> Self {
        Propagator::new(*m.grid(), m.c_field(), dt, ActiveSet::whole(m.grid()), sponge)
    }

    /// Starts from `[u0, ut0]` using the Taylor seed: a virtual level
    /// `u^{-1} = u0 - dt*ut0 + dt^2/2 L u0` on active nodes makes the first
    /// regular step produce `u0 + dt*ut0 + dt^2/2 L u0`.
    pub fn seed(&mut self, u0: &[f64], ut0: &[f64]) {
        self.curr.copy_from_slice(u0);
        self.prev.copy_from_slice(u0);
        let mut lu = vec![0.0; u0.len()];
        self.apply_l(u0, &mut lu);
        let dt = self.dt;
        let prev = &mut self.prev;
        self.active.for_each(self.grid.nx, |k| {
            prev[k] = u0[k] - dt * ut0[k] + 0.5 * lu[k];
        });
        self.level = 0;
    }

    /// Starts from two explicit levels `u^{n-1}`, `u^n`.
    pub fn seed_levels(&mut self, prev: &[f64], curr: &[f64]) {
        self.prev.copy_from_slice(prev);
        self.curr.copy_from_slice(curr);
        self.level = 0;
    }

    /// `dt^2 c^2 Δ_h u` on active nodes, zero elsewhere.
    fn apply_l(&self, u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let nx = self.grid.nx;
        self.active.for_each(nx, |k| {
            out[k] = self.scale[k] * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k]);
        });
    }

    /// Advances one level; non-active nodes keep the values of the level
    /// two steps back until pinned.
    pub fn step(&mut self) {
        let nx = self.grid.nx;
        let curr = &self.curr;
        let scale = &self.scale;
        let damp = self.damp.as_deref();
        let rows = &self.active.rows;
        self.prev
            .par_chunks_mut(nx)
            .with_min_len(8)
            .enumerate()
            .for_each(|(j, next)| {
                let segs = &rows[j];
                if segs.is_empty() {
                    return;
                }
                let base = j * nx;
                let c = &curr[base..base + nx];
                let up = &curr[base + nx..base + 2 * nx];
                let dn = &curr[base - nx..base];
                let s = &scale[base..base + nx];
                for &(a, b) in segs {
                    match damp {
                        None => {
                            for i in a..b {
                                let lap = c[i - 1] + c[i + 1] + up[i] + dn[i] - 4.0 * c[i];
                                next[i] = 2.0 * c[i] - next[i] + s[i] * lap;
                            }
                        }
                        Some(d) => {
                            let d = &d[base..base + nx];
                            for i in a..b {
                                let lap = c[i - 1] + c[i + 1] + up[i] + dn[i] - 4.0 * c[i];
                                next[i] = (2.0 * c[i] - (1.0 - d[i]) * next[i] + s[i] * lap) / (1.0 + d[i]);
                            }
                        }
                    }
                }
            });
        std::mem::swap(&mut self.prev, &mut self.curr);
        self.level += 1;
    }

    /// Overwrites nodes of the newest level.
    pub fn pin(&mut self, nodes: &[usize], values: &[f64]) {
        for (&k, &v) in nodes.iter().zip(values) {
            self.curr[k] = v;
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn current(&self) -> &[f64] {
        &self.curr
    }

    pub fn previous(&self) -> &[f64] {
        &self.prev
    }

    pub fn is_finite(&self) -> bool {
        self.curr.iter().all(|v| v.is_finite())
    }

    /// `[u^n, u_t^n]` with `u_t^n = (u^n - u^{n-1})/dt + dt/2 L u^n`, which
    /// equals the centred difference of the discrete trajectory.
    pub fn state(&self) -> WaveState {
        let mut lu = vec![0.0; self.curr.len()];
        self.apply_l(&self.curr, &mut lu);
        let dt = self.dt;
        let ut: Vec<f64> = (0..self.curr.len())
            .map(|k| (self.curr[k] - self.prev[k]) / dt + 0.5 * lu[k] / dt)
            .collect();
        WaveState {
            u: ScalarField::from_vec(self.grid, self.curr.clone()).expect("finite field"),
            ut: ScalarField::from_vec(self.grid, ut).expect("finite field"),
        }
    }

    /// Velocity at the newest level for a reversed-time trajectory.
    pub(crate) fn reversed_velocity(&self) -> Vec<f64> {
        let mut lu = vec![0.0; self.curr.len()];
        self.apply_l(&self.curr, &mut lu);
        let dt = self.dt;
        (0..self.curr.len())
            .map(|k| (self.prev[k] - self.curr[k]) / dt - 0.5 * lu[k] / dt)
            .collect()
    }
}

/// Damping `sigma dt/2` ramping as a raised cosine from zero at
/// `SPONGE_NODES` cells from the box edge to its maximum at the edge.
fn sponge_profile(g: &Grid, speeds: &[f64], dt: f64) -> Vec<f64> {
    let c_max = speeds.iter().copied().fold(0.0, f64::max);
    let sigma_max = 0.7 * c_max / g.h;
    (0..g.len())
        .map(|k| {
            let (i, j) = g.ij(k);
            let d = i.min(j).min(g.nx - 1 - i).min(g.ny - 1 - j);
            if d >= SPONGE_NODES {
                0.0
            } else {
                let x = (SPONGE_NODES - d) as f64 / SPONGE_NODES as f64;
                0.5 * sigma_max * (1.0 - (std::f64::consts::PI * x).cos()) * 0.5 * dt
            }
        })
        .collect()
}
