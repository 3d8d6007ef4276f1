use crate::error::{Error, Result};

/// Uniform isotropic 2-D grid. Node `(i, j)` sits at `(ox + i*h, oy + j*h)`
/// and is stored at flat index `j*nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub ox: f64,
    pub oy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, h: f64, ox: f64, oy: f64) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::config(format!("grid must be at least 3x3, got {nx}x{ny}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config(format!("grid spacing must be positive, got {h}")));
        }
        if !(ox.is_finite() && oy.is_finite()) {
            return Err(Error::config("grid origin must be finite"));
        }
        Ok(Grid { nx, ny, h, ox, oy })
    }

    /// Square box centred on the physical origin covering `[-half, half]^2`
    /// with `cells_across` cells across that span, padded by `margin`.
    ///
    /// The padding is rounded up to a whole number of cells, so the nodes of
    /// the inner square are grid nodes.
    pub fn centered_box(half: f64, cells_across: usize, margin: f64) -> Result<Self> {
        if cells_across < 2 || !(half > 0.0) || margin < 0.0 {
            return Err(Error::config("invalid centred box parameters"));
        }
        let h = 2.0 * half / cells_across as f64;
        let pad = (margin / h - 1e-9).ceil().max(1.0) as usize;
        let n = cells_across + 2 * pad + 1;
        let o = -half - pad as f64 * h;
        Grid::new(n, n, h, o, o)
    }

    /// The grid refined by an integer factor; node `(i, j)` of `self`
    /// coincides with node `(r*i, r*j)` of the result.
    pub fn refined(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::config("refinement factor must be >= 1"));
        }
        Grid::new(
            (self.nx - 1) * r + 1,
            (self.ny - 1) * r + 1,
            self.h / r as f64,
            self.ox,
            self.oy,
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        (self.ox + i as f64 * self.h, self.oy + j as f64 * self.h)
    }

    #[inline]
    pub fn coord_of(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.ij(idx);
        self.coord(i, j)
    }

    pub fn x_max(&self) -> f64 {
        self.ox + (self.nx - 1) as f64 * self.h
    }

    pub fn y_max(&self) -> f64 {
        self.oy + (self.ny - 1) as f64 * self.h
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let eps = 1e-12 * self.h;
        x >= self.ox - eps && x <= self.x_max() + eps && y >= self.oy - eps && y <= self.y_max() + eps
    }

    /// Nearest node to a physical point, clamped to the grid.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let fi = ((x - self.ox) / self.h).round().clamp(0.0, (self.nx - 1) as f64);
        let fj = ((y - self.oy) / self.h).round().clamp(0.0, (self.ny - 1) as f64);
        (fi as usize, fj as usize)
    }

    #[inline]
    pub fn on_outer_ring(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }
}

/// Real-valued function sampled on every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::config(format!(
                "field has {} values but grid has {} nodes",
                data.len(),
                grid.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at node {k}")));
        }
        Ok(ScalarField { grid, data })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.coord(i, j);
                data.push(f(x, y));
            }
        }
        ScalarField { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.idx(i, j)]
    }

    pub fn ensure_same_grid(&self, other: &Grid) -> Result<()> {
        if self.grid != *other {
            return Err(Error::config("field and operand live on different grids"));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `alpha*self + beta*other`.
    pub fn lin_comb(&self, alpha: f64, other: &ScalarField, beta: f64) -> Result<Self> {
        other.ensure_same_grid(&self.grid)?;
        Ok(ScalarField {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn add_assign(&mut self, other: &ScalarField) -> Result<()> {
        other.ensure_same_grid(&self.grid)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Displacement and velocity at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub u: ScalarField,
    pub ut: ScalarField,
}

impl WaveState {
    pub fn new(u: ScalarField, ut: ScalarField) -> Result<Self> {
        ut.ensure_same_grid(u.grid())?;
        Ok(WaveState { u, ut })
    }

    /// Thermoacoustic data `[f, 0]`.
    pub fn displacement(u: ScalarField) -> Self {
        let ut = ScalarField::zeros(*u.grid());
        WaveState { u, ut }
    }

    pub fn zeros(grid: Grid) -> Self {
        WaveState {
            u: ScalarField::zeros(grid),
            ut: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}
