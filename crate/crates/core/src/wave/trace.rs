use crate::error::{Error, Result};
use crate::grid_field::Region;

/// Time series of `u` at detector nodes, sampled at `n * dt`.
///
/// `values` is time-major: row `n` holds every detector at time `n * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    dt: f64,
    points: Vec<(f64, f64)>,
    nodes: Vec<usize>,
    values: Vec<f64>,
}

impl BoundaryTrace {
    /// `nodes` may be empty for a trace not yet bound to a grid.
    pub fn new(dt: f64, points: Vec<(f64, f64)>, nodes: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config("trace time step must be positive"));
        }
        if points.is_empty() {
            return Err(Error::config("trace needs at least one detector"));
        }
        if !nodes.is_empty() && nodes.len() != points.len() {
            return Err(Error::config("detector nodes and points differ in number"));
        }
        if values.is_empty() || values.len() % points.len() != 0 {
            return Err(Error::config(format!(
                "trace payload of {} values is not a whole number of rows of {}",
                values.len(),
                points.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("trace values must be finite"));
        }
        Ok(BoundaryTrace { dt, points, nodes, values })
    }

    /// All-zero trace on the boundary of `omega`.
    pub fn zeros(omega: &Region, dt: f64, n_times: usize) -> Self {
        let g = omega.grid();
        let nodes = omega.boundary().to_vec();
        let points = nodes.iter().map(|&k| g.coord_of(k)).collect();
        BoundaryTrace {
            dt,
            points,
            values: vec![0.0; nodes.len() * n_times.max(1)],
            nodes,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_times(&self) -> usize {
        self.values.len() / self.points.len()
    }

    pub fn n_det(&self) -> usize {
        self.points.len()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_times()).map(|n| n as f64 * self.dt).collect()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let d = self.n_det();
        &self.values[n * d..(n + 1) * d]
    }

    /// Values of one detector over time.
    pub fn series(&self, det: usize) -> Vec<f64> {
        self.values.iter().skip(det).step_by(self.n_det()).copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn same_layout(&self, other: &BoundaryTrace) -> Result<()> {
        if self.n_det() != other.n_det() || self.n_times() != other.n_times() {
            return Err(Error::config("traces have different shapes"));
        }
        Ok(())
    }

    /// `alpha*self + beta*other`, keeping `self`'s geometry.
    pub fn lin_comb(&self, alpha: f64, other: &BoundaryTrace, beta: f64) -> Result<Self> {
        self.same_layout(other)?;
        Ok(BoundaryTrace {
            values: self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &BoundaryTrace) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Relative l2 distance `|self - other| / |other|`.
    pub fn rel_l2_diff(&self, other: &BoundaryTrace) -> Result<f64> {
        let d = self.sub(other)?.l2();
        let n = other.l2();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// Attaches grid nodes by matching each detector point to a boundary node
    /// of `omega`, requiring the region's boundary order.
    pub fn bind(mut self, omega: &Region) -> Result<Self> {
        let g = omega.grid();
        if self.points.len() != omega.boundary().len() {
            return Err(Error::config(format!(
                "trace has {} detectors but the region boundary has {} nodes",
                self.points.len(),
                omega.boundary().len()
            )));
        }
        for (&(x, y), &k) in self.points.iter().zip(omega.boundary()) {
            let (bx, by) = g.coord_of(k);
            if (x - bx).abs() > 1e-6 * g.h || (y - by).abs() > 1e-6 * g.h {
                return Err(Error::config(format!(
                    "detector ({x}, {y}) does not match boundary node ({bx}, {by})"
                )));
            }
        }
        self.nodes = omega.boundary().to_vec();
        Ok(self)
    }

    /// Checks that the trace sits on exactly the boundary nodes of `omega`.
    pub fn ensure_on(&self, omega: &Region) -> Result<()> {
        if self.nodes != omega.boundary() {
            return Err(Error::config("trace detectors are not the boundary nodes of omega"));
        }
        Ok(())
    }
}
