use rand::Rng;

use super::grid::{Grid, ScalarField};
use super::region::{Region, RegionShape};
use crate::error::{Error, Result};

/// Compactly supported bump of unit peak, effectively zero beyond `3*sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

impl Bump {
    pub fn support_radius(&self) -> f64 {
        3.0 * self.sigma
    }

    /// A Gaussian profile multiplied by a smooth cutoff, so the bump is
    /// `C^inf` and vanishes identically outside radius `3*sigma`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let r2 = (x - self.x).powi(2) + (y - self.y).powi(2);
        let s2 = r2 / (self.support_radius() * self.support_radius());
        if s2 >= 1.0 {
            return 0.0;
        }
        (-r2 / (2.0 * self.sigma * self.sigma) + 1.0 - 1.0 / (1.0 - s2)).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhantomKind {
    GaussianBump(Bump),
    SumOfBumps(Vec<Bump>),
}

impl PhantomKind {
    pub fn bumps(&self) -> &[Bump] {
        match self {
            PhantomKind::GaussianBump(b) => std::slice::from_ref(b),
            PhantomKind::SumOfBumps(v) => v,
        }
    }
}

/// True when the bump disk stays clear of the support's boundary nodes.
fn fits(b: &Bump, support: &Region) -> bool {
    let g = support.grid();
    let rad = b.support_radius();
    let half = 0.5 * g.h;
    match *support.shape() {
        RegionShape::Rectangle { .. } => {
            let (x0, x1, y0, y1) = support.rect_bounds().unwrap();
            b.x - rad >= x0 + half && b.x + rad <= x1 - half && b.y - rad >= y0 + half && b.y + rad <= y1 - half
        }
        RegionShape::Disk { cx, cy, radius } => (b.x - cx).hypot(b.y - cy) + rad <= radius - half,
        RegionShape::Annulus {
            cx,
            cy,
            inner,
            outer,
        } => {
            let d = (b.x - cx).hypot(b.y - cy);
            d - rad >= inner + half && d + rad <= outer - half
        }
    }
}

/// Superposition of the requested bumps on `g`, supported strictly inside
/// `support`.
pub fn make_phantom(kind: &PhantomKind, g: Grid, support: &Region) -> Result<ScalarField> {
    if *support.grid() != g {
        return Err(Error::config("phantom support lives on a different grid"));
    }
    for b in kind.bumps() {
        if !(b.sigma > 0.0 && b.sigma.is_finite()) {
            return Err(Error::config("bump sigma must be positive"));
        }
        if !fits(b, support) {
            return Err(Error::config(format!(
                "bump at ({}, {}) with radius {} escapes the support",
                b.x,
                b.y,
                b.support_radius()
            )));
        }
    }
    let mut out = ScalarField::zeros(g);
    let d = out.data_mut();
    for &k in support.interior() {
        let (x, y) = g.coord_of(k);
        d[k] = kind.bumps().iter().map(|b| b.value(x, y)).sum();
    }
    Ok(out)
}

/// `count` bumps of width `sigma` at uniformly random admissible centres.
pub fn random_bumps<R: Rng>(support: &Region, count: usize, sigma: f64, rng: &mut R) -> Result<Vec<Bump>> {
    let g = support.grid();
    let (lo_x, hi_x, lo_y, hi_y) = support
        .interior()
        .iter()
        .map(|&k| g.coord_of(k))
        .fold((f64::MAX, f64::MIN, f64::MAX, f64::MIN), |a, (x, y)| {
            (a.0.min(x), a.1.max(x), a.2.min(y), a.3.max(y))
        });
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut placed = false;
        for _ in 0..10_000 {
            let b = Bump {
                x: rng.gen_range(lo_x..=hi_x),
                y: rng.gen_range(lo_y..=hi_y),
                sigma,
            };
            if fits(&b, support) {
                out.push(b);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::config(format!("no room for a bump of sigma {sigma} in the support")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn setup() -> (Grid, Region) {
        let g = Grid::new(41, 41, 0.05, -1.0, -1.0).unwrap();
        let r = Region::disk(g, 0.0, 0.0, 0.8).unwrap();
        (g, r)
    }

    #[test]
    fn empty_list_is_zero() {
        let (g, r) = setup();
        let f = make_phantom(&PhantomKind::SumOfBumps(vec![]), g, &r).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn single_bump_peaks_at_nearest_node() {
        let (g, r) = setup();
        let b = Bump { x: 0.12, y: -0.07, sigma: 0.1 };
        let f = make_phantom(&PhantomKind::GaussianBump(b), g, &r).unwrap();
        let (imax, _) = f
            .data()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |a, (k, &v)| if v > a.1 { (k, v) } else { a });
        let (i, j) = g.nearest(0.12, -0.07);
        assert_eq!(imax, g.idx(i, j));
        assert!(f.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn superposition_of_disjoint_bumps() {
        let (g, r) = setup();
        let a = Bump { x: -0.3, y: 0.0, sigma: 0.08 };
        let b = Bump { x: 0.3, y: 0.1, sigma: 0.08 };
        let fa = make_phantom(&PhantomKind::GaussianBump(a), g, &r).unwrap();
        let fb = make_phantom(&PhantomKind::GaussianBump(b), g, &r).unwrap();
        let fab = make_phantom(&PhantomKind::SumOfBumps(vec![a, b]), g, &r).unwrap();
        assert_eq!(fab.data(), fa.add(&fb).unwrap().data());
    }

    #[test]
    fn escaping_bump_is_rejected() {
        let (g, r) = setup();
        let b = Bump { x: 0.6, y: 0.0, sigma: 0.1 };
        assert!(matches!(
            make_phantom(&PhantomKind::GaussianBump(b), g, &r),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn random_bumps_fit_and_are_reproducible() {
        let (g, _) = setup();
        let ann = Region::annulus(g, 0.0, 0.0, 0.3, 0.8).unwrap();
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = random_bumps(&ann, 4, 0.05, &mut r1).unwrap();
        let b = random_bumps(&ann, 4, 0.05, &mut r2).unwrap();
        assert_eq!(a, b);
        make_phantom(&PhantomKind::SumOfBumps(a), g, &ann).unwrap();
    }
}
