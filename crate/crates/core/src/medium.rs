//! Piecewise-constant sound speed with nested circular interfaces centred
//! at the physical origin; the speed is 1 outside the outermost circle.

use crate::error::{Error, Result};
use crate::grid_field::Grid;

/// One disk of the layered medium; `speed` applies inside `radius` up to
/// the next inner disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub radius: f64,
    pub speed: f64,
}

/// A circle of the speed map together with its one-sided speed limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceDescriptor {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub c_int: f64,
    pub c_ext: f64,
}

impl InterfaceDescriptor {
    pub fn new(cx: f64, cy: f64, radius: f64, c_int: f64, c_ext: f64) -> Result<Self> {
        if !(radius > 0.0 && c_int > 0.0 && c_ext > 0.0) {
            return Err(Error::config("interface radius and speeds must be positive"));
        }
        if c_int == c_ext {
            return Err(Error::config("interface speeds must differ"));
        }
        Ok(InterfaceDescriptor { cx, cy, radius, c_int, c_ext })
    }

    /// `arcsin(c_int / c_ext)` when the interior is slower, else `None`.
    pub fn critical_angle(&self) -> Option<f64> {
        critical_angle(self)
    }

    pub fn gamma(&self) -> f64 {
        interface_gamma(self)
    }
}

/// Incidence angle beyond which an interior-incident ray is totally
/// reflected; `None` when a transmitted ray always exists.
pub fn critical_angle(iface: &InterfaceDescriptor) -> Option<f64> {
    (iface.c_int < iface.c_ext).then(|| (iface.c_int / iface.c_ext).asin())
}

pub fn interface_gamma(iface: &InterfaceDescriptor) -> f64 {
    iface.c_int / iface.c_ext
}

#[derive(Debug, Clone)]
pub struct Medium {
    grid: Grid,
    layers: Vec<Layer>,
    interfaces: Vec<InterfaceDescriptor>,
    mollify_width: f64,
    c: Vec<f64>,
    c_max: f64,
}

impl Medium {
    /// Layers are listed outermost first.
    pub fn new(grid: Grid, layers: &[Layer]) -> Result<Self> {
        Medium::with_mollification(grid, layers, 0.0)
    }

    /// As [`Medium::new`], with every jump replaced by a smoothstep of
    /// total width `width * h` centred on its circle.
    pub fn with_mollification(grid: Grid, layers: &[Layer], width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::config("mollification width must be >= 0"));
        }
        let mut outer_speed = 1.0;
        let mut outer_radius = f64::INFINITY;
        let mut interfaces = Vec::with_capacity(layers.len());
        for (n, l) in layers.iter().enumerate() {
            if !(l.speed > 0.0 && l.speed.is_finite()) {
                return Err(Error::config(format!("layer {} speed must be positive", n + 1)));
            }
            if !(l.radius > 0.0 && l.radius < outer_radius) {
                return Err(Error::config(format!(
                    "layer {} radius {} is not strictly inside the previous disk",
                    n + 1,
                    l.radius
                )));
            }
            interfaces.push(InterfaceDescriptor::new(0.0, 0.0, l.radius, l.speed, outer_speed).map_err(|_| {
                Error::config(format!("layer {} has the same speed as the layer outside it", n + 1))
            })?);
            outer_speed = l.speed;
            outer_radius = l.radius;
        }
        let half_w = 0.5 * width * grid.h;
        let c: Vec<f64> = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coord_of(k);
                let r = x.hypot(y);
                let mut v = 1.0;
                for f in &interfaces {
                    let inside = if half_w > 0.0 {
                        let t = ((f.radius + half_w - r) / (2.0 * half_w)).clamp(0.0, 1.0);
                        t * t * (3.0 - 2.0 * t)
                    } else if r <= f.radius {
                        1.0
                    } else {
                        0.0
                    };
                    // Exact at weights 0 and 1, so the sharp cache equals speed_at.
                    v = (1.0 - inside) * v + inside * f.c_int;
                }
                v
            })
            .collect();
        let c_max = c.iter().copied().fold(1.0, f64::max);
        Ok(Medium {
            grid,
            layers: layers.to_vec(),
            interfaces,
            mollify_width: width,
            c,
            c_max,
        })
    }

    /// The same layers sampled on another grid.
    pub fn on_grid(&self, grid: Grid) -> Result<Self> {
        Medium::with_mollification(grid, &self.layers, self.mollify_width)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn interfaces(&self) -> &[InterfaceDescriptor] {
        &self.interfaces
    }

    pub fn mollify_width(&self) -> f64 {
        self.mollify_width
    }

    /// Cached per-node speeds.
    pub fn c_field(&self) -> &[f64] {
        &self.c
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    /// Exact piecewise value by disk membership.
    pub fn speed_at(&self, x: f64, y: f64) -> Result<f64> {
        if !self.grid.contains_point(x, y) {
            return Err(Error::Domain(format!("point ({x}, {y}) lies outside the grid")));
        }
        Ok(self.speed_unchecked(x, y))
    }

    /// [`Medium::speed_at`] without the bounds check.
    pub fn speed_unchecked(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        self.layers
            .iter()
            .rev()
            .find(|l| r <= l.radius)
            .map_or(1.0, |l| l.speed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(101, 101, 0.02, -1.0, -1.0).unwrap()
    }

    #[test]
    fn empty_spec_is_unit_speed() {
        let m = Medium::new(grid(), &[]).unwrap();
        assert!(m.c_field().iter().all(|&c| c == 1.0));
        assert_eq!(m.c_max(), 1.0);
        assert!(m.interfaces().is_empty());
    }

    #[test]
    fn example_one_profile() {
        let m = Medium::new(grid(), &[Layer { radius: 0.5, speed: 0.5 }]).unwrap();
        assert_eq!(m.speed_at(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(m.speed_at(0.6, 0.1).unwrap(), 1.0);
        let f = m.interfaces()[0];
        assert_eq!((f.c_int, f.c_ext), (0.5, 1.0));
    }

    #[test]
    fn example_two_profile() {
        let layers = [Layer { radius: 0.8, speed: 2.0 }, Layer { radius: 0.5, speed: 1.0 }];
        let m = Medium::new(grid(), &layers).unwrap();
        assert_eq!(m.speed_at(0.0, 0.2).unwrap(), 1.0);
        assert_eq!(m.speed_at(0.0, 0.65).unwrap(), 2.0);
        assert_eq!(m.speed_at(0.7, 0.7).unwrap(), 1.0);
        assert_eq!(m.c_max(), 2.0);
        assert_eq!(m.interfaces()[1].gamma(), 0.5);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let g = grid();
        for layers in [
            vec![Layer { radius: 0.5, speed: 2.0 }, Layer { radius: 0.6, speed: 1.5 }],
            vec![Layer { radius: 0.5, speed: -1.0 }],
            vec![Layer { radius: 0.5, speed: 1.0 }],
            vec![Layer { radius: 0.5, speed: 2.0 }, Layer { radius: 0.3, speed: 2.0 }],
        ] {
            assert!(matches!(Medium::new(g, &layers), Err(Error::Config(_))));
        }
        let m = Medium::new(g, &[]).unwrap();
        assert!(matches!(m.speed_at(3.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_angle_values() {
        let f = InterfaceDescriptor::new(0.0, 0.0, 1.0, 0.5, 1.0).unwrap();
        assert!((f.critical_angle().unwrap() - PI / 6.0).abs() < 1e-15);
        let near = InterfaceDescriptor::new(0.0, 0.0, 1.0, 1.0 - 1e-12, 1.0).unwrap();
        assert!((near.critical_angle().unwrap() - PI / 2.0).abs() < 1e-5);
        let fast = InterfaceDescriptor::new(0.0, 0.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(fast.critical_angle(), None);
        assert!(InterfaceDescriptor::new(0.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cache_matches_exact_speed_away_from_interfaces() {
        let g = grid();
        let layers = [Layer { radius: 0.8, speed: 2.0 }, Layer { radius: 0.33, speed: 0.7 }];
        let m = Medium::new(g, &layers).unwrap();
        for k in 0..g.len() {
            let (x, y) = g.coord_of(k);
            let r = x.hypot(y);
            if layers.iter().all(|l| (r - l.radius).abs() > g.h) {
                assert_eq!(m.c_field()[k], m.speed_at(x, y).unwrap());
            }
        }
    }

    #[test]
    fn mollified_speed_is_monotone_across_a_jump() {
        let g = grid();
        let m = Medium::with_mollification(g, &[Layer { radius: 0.5, speed: 0.5 }], 4.0).unwrap();
        let j = 50;
        let row: Vec<f64> = (50..101).map(|i| m.c_field()[g.idx(i, j)]).collect();
        assert!(row.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(row[0], 0.5);
        assert_eq!(*row.last().unwrap(), 1.0);
    }
}
