use super::grid::{Grid, ScalarField};
use crate::error::{Error, Result};

/// Geometric description of a region, independent of any grid.
///
/// Disks and annuli are rasterised by distance: boundary nodes lie within
/// `h/2` of a circle, interior nodes are strictly inside. Every neighbour of
/// an interior node is then either interior or boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionShape {
    /// Inclusive node-index range; the outer ring of the range is the boundary.
    Rectangle {
        i0: usize,
        i1: usize,
        j0: usize,
        j1: usize,
    },
    Disk {
        cx: f64,
        cy: f64,
        radius: f64,
    },
    Annulus {
        cx: f64,
        cy: f64,
        inner: f64,
        outer: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeClass {
    Outside = 0,
    Interior = 1,
    Boundary = 2,
}

/// A shape rasterised on a particular grid.
#[derive(Debug, Clone)]
pub struct Region {
    shape: RegionShape,
    grid: Grid,
    class: Vec<NodeClass>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl Region {
    pub fn new(grid: Grid, shape: RegionShape) -> Result<Self> {
        let mut class = vec![NodeClass::Outside; grid.len()];
        let half = 0.5 * grid.h;
        match shape {
            RegionShape::Rectangle { i0, i1, j0, j1 } => {
                if i1 < i0 + 2 || j1 < j0 + 2 {
                    return Err(Error::config("rectangle must span at least 3x3 nodes"));
                }
                if i1 >= grid.nx || j1 >= grid.ny {
                    return Err(Error::config("rectangle exceeds the grid"));
                }
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        let edge = i == i0 || i == i1 || j == j0 || j == j1;
                        class[grid.idx(i, j)] =
                            if edge { NodeClass::Boundary } else { NodeClass::Interior };
                    }
                }
            }
            RegionShape::Disk { cx, cy, radius } => {
                if !(radius > 0.0) {
                    return Err(Error::config("disk radius must be positive"));
                }
                for (k, c) in class.iter_mut().enumerate() {
                    let (x, y) = grid.coord_of(k);
                    let r = (x - cx).hypot(y - cy);
                    if (r - radius).abs() <= half {
                        *c = NodeClass::Boundary;
                    } else if r < radius - half {
                        *c = NodeClass::Interior;
                    }
                }
            }
            RegionShape::Annulus {
                cx,
                cy,
                inner,
                outer,
            } => {
                if !(inner > 0.0 && outer > inner) {
                    return Err(Error::config("annulus needs 0 < inner < outer"));
                }
                for (k, c) in class.iter_mut().enumerate() {
                    let (x, y) = grid.coord_of(k);
                    let r = (x - cx).hypot(y - cy);
                    if (r - inner).abs() <= half || (r - outer).abs() <= half {
                        *c = NodeClass::Boundary;
                    } else if r > inner + half && r < outer - half {
                        *c = NodeClass::Interior;
                    }
                }
            }
        }
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for (k, c) in class.iter().enumerate() {
            match c {
                NodeClass::Interior => interior.push(k),
                NodeClass::Boundary => boundary.push(k),
                NodeClass::Outside => {}
            }
        }
        if boundary.is_empty() {
            return Err(Error::config("region has no boundary nodes"));
        }
        if interior.is_empty() {
            return Err(Error::config("region has no interior nodes"));
        }
        for &k in interior.iter().chain(&boundary) {
            let (i, j) = grid.ij(k);
            if grid.on_outer_ring(i, j) {
                return Err(Error::config("region must lie strictly inside the grid"));
            }
        }
        Ok(Region {
            shape,
            grid,
            class,
            interior,
            boundary,
        })
    }

    pub fn rectangle(grid: Grid, i0: usize, i1: usize, j0: usize, j1: usize) -> Result<Self> {
        Region::new(grid, RegionShape::Rectangle { i0, i1, j0, j1 })
    }

    /// Rectangle snapped to the nodes nearest to the given physical bounds.
    pub fn rectangle_physical(grid: Grid, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        if !(xmax > xmin && ymax > ymin) {
            return Err(Error::config("rectangle bounds are inverted"));
        }
        if !grid.contains_point(xmin, ymin) || !grid.contains_point(xmax, ymax) {
            return Err(Error::config("rectangle exceeds the grid"));
        }
        let (i0, j0) = grid.nearest(xmin, ymin);
        let (i1, j1) = grid.nearest(xmax, ymax);
        Region::rectangle(grid, i0, i1, j0, j1)
    }

    pub fn disk(grid: Grid, cx: f64, cy: f64, radius: f64) -> Result<Self> {
        Region::new(grid, RegionShape::Disk { cx, cy, radius })
    }

    pub fn annulus(grid: Grid, cx: f64, cy: f64, inner: f64, outer: f64) -> Result<Self> {
        Region::new(grid, RegionShape::Annulus { cx, cy, inner, outer })
    }

    /// The same physical shape on a grid refined by `r`.
    pub fn refined(&self, r: usize) -> Result<Self> {
        let grid = self.grid.refined(r)?;
        let shape = match self.shape {
            RegionShape::Rectangle { i0, i1, j0, j1 } => RegionShape::Rectangle {
                i0: i0 * r,
                i1: i1 * r,
                j0: j0 * r,
                j1: j1 * r,
            },
            other => other,
        };
        Region::new(grid, shape)
    }

    pub fn shape(&self) -> &RegionShape {
        &self.shape
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    #[inline]
    pub fn class_of(&self, idx: usize) -> NodeClass {
        self.class[idx]
    }

    #[inline]
    pub fn in_closure(&self, idx: usize) -> bool {
        self.class[idx] != NodeClass::Outside
    }

    /// Physical bounds `(xmin, xmax, ymin, ymax)` of a rectangle region.
    pub fn rect_bounds(&self) -> Option<(f64, f64, f64, f64)> {
        match self.shape {
            RegionShape::Rectangle { i0, i1, j0, j1 } => {
                let (x0, y0) = self.grid.coord(i0, j0);
                let (x1, y1) = self.grid.coord(i1, j1);
                Some((x0, x1, y0, y1))
            }
            _ => None,
        }
    }

    /// Values of `s` at the boundary nodes, in boundary order.
    pub fn trace(&self, s: &ScalarField) -> Result<Vec<f64>> {
        s.ensure_same_grid(&self.grid)?;
        Ok(self.boundary.iter().map(|&k| s.data()[k]).collect())
    }

    /// `s` on the closure of the region, zero elsewhere.
    pub fn restrict(&self, s: &ScalarField) -> Result<ScalarField> {
        s.ensure_same_grid(&self.grid)?;
        let mut out = ScalarField::zeros(self.grid);
        let d = out.data_mut();
        for &k in self.interior.iter().chain(&self.boundary) {
            d[k] = s.data()[k];
        }
        Ok(out)
    }

    /// Smallest physical distance from any closure node to a circle of the
    /// given radius centred at `(cx, cy)`.
    pub fn distance_to_circle(&self, cx: f64, cy: f64, radius: f64) -> f64 {
        self.interior
            .iter()
            .chain(&self.boundary)
            .map(|&k| {
                let (x, y) = self.grid.coord_of(k);
                ((x - cx).hypot(y - cy) - radius).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every closure node of `self` is an interior node of `outer`.
    pub fn strictly_inside(&self, outer: &Region) -> bool {
        self.grid == outer.grid
            && self
                .interior
                .iter()
                .chain(&self.boundary)
                .all(|&k| outer.class_of(k) == NodeClass::Interior)
    }
}
