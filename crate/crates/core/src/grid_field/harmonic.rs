use super::grid::ScalarField;
use super::region::{NodeClass, Region};
use crate::error::{Error, Result};
use crate::par;

pub const DEFAULT_HARMONIC_TOL: f64 = 1e-10;

const NONE: u32 = u32::MAX;

/// The 5-point Dirichlet problem on the interior nodes of a region.
///
/// Unknowns are the interior nodes in region order; boundary nodes enter the
/// right-hand side. The matrix is `4I - adjacency`, which is symmetric
/// positive definite, so plain conjugate gradients apply.
#[derive(Debug, Clone)]
pub struct LaplaceSystem {
    region: Region,
    /// Interior-neighbour slots per unknown, `NONE` where the neighbour is a
    /// boundary node.
    nbr: Vec<[u32; 4]>,
    /// Position of each boundary node in the region's boundary list, indexed
    /// by grid node.
    boundary_slot: Vec<u32>,
    max_iter: usize,
}

impl LaplaceSystem {
    pub fn new(region: &Region) -> Self {
        let g = region.grid();
        let mut slot = vec![NONE; g.len()];
        for (p, &k) in region.interior().iter().enumerate() {
            slot[k] = p as u32;
        }
        let mut boundary_slot = vec![NONE; g.len()];
        for (p, &k) in region.boundary().iter().enumerate() {
            boundary_slot[k] = p as u32;
        }
        let nx = g.nx;
        let nbr = region
            .interior()
            .iter()
            .map(|&k| [k - 1, k + 1, k - nx, k + nx].map(|n| slot[n]))
            .collect();
        LaplaceSystem {
            region: region.clone(),
            nbr,
            boundary_slot,
            max_iter: 50 * g.nx.max(g.ny),
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iter
    }

    /// `y = (4I - adjacency) x` on the unknowns.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yp, nb), &xp) in y.iter_mut().zip(&self.nbr).zip(x) {
            let mut s = 4.0 * xp;
            for &q in nb {
                if q != NONE {
                    s -= x[q as usize];
                }
            }
            *yp = s;
        }
    }

    /// Sum of boundary values adjacent to each unknown.
    fn rhs(&self, bv: &[f64]) -> Vec<f64> {
        let nx = self.region.grid().nx;
        self.region
            .interior()
            .iter()
            .map(|&k| {
                [k - 1, k + 1, k - nx, k + nx]
                    .iter()
                    .filter(|&&n| self.region.class_of(n) == NodeClass::Boundary)
                    .map(|&n| bv[self.boundary_slot[n] as usize])
                    .sum()
            })
            .collect()
    }

    /// Solves for the discretely harmonic field with the given boundary
    /// values; the stopping test is on the max-norm stencil residual.
    pub fn solve(&self, bv: &[f64], tol: f64) -> Result<ScalarField> {
        if bv.len() != self.region.boundary().len() {
            return Err(Error::config(format!(
                "expected {} boundary values, got {}",
                self.region.boundary().len(),
                bv.len()
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::config("harmonic tolerance must be positive"));
        }
        if bv.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("boundary values must be finite"));
        }
        let scale = bv.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let target = tol * scale;
        let b = self.rhs(bv);
        let n = b.len();
        let mut x = vec![0.0; n];
        let mut r = b.clone();
        let mut ap = vec![0.0; n];
        let mut iters = 0;
        let max_abs = |v: &[f64]| par::max_chunks(v.len(), |rg| v[rg].iter().fold(0.0, |m, a| m.max(a.abs())));

        // Outer loop restarts from the true residual if the recursive one
        // drifted below target while the true one did not.
        loop {
            let mut p = r.clone();
            let mut rr = par::dot(&r, &r);
            while max_abs(&r) > target && iters < self.max_iter {
                self.apply(&p, &mut ap);
                let pap = par::dot(&p, &ap);
                if pap <= 0.0 {
                    break;
                }
                let alpha = rr / pap;
                for i in 0..n {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
                let rr_new = par::dot(&r, &r);
                let beta = rr_new / rr;
                rr = rr_new;
                for i in 0..n {
                    p[i] = r[i] + beta * p[i];
                }
                iters += 1;
            }
            self.apply(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            let res = max_abs(&r);
            if res <= target {
                break;
            }
            if iters >= self.max_iter {
                return Err(Error::Convergence {
                    iterations: iters,
                    residual: res,
                });
            }
        }

        let mut out = ScalarField::zeros(*self.region.grid());
        let d = out.data_mut();
        for (&k, &v) in self.region.interior().iter().zip(&x) {
            d[k] = v;
        }
        for (&k, &v) in self.region.boundary().iter().zip(bv) {
            d[k] = v;
        }
        Ok(out)
    }
}

/// Discretely harmonic field on `r` matching `boundary_values` on the
/// boundary nodes (in region boundary order), zero outside.
pub fn harmonic_extension(boundary_values: &[f64], r: &Region, tol: f64) -> Result<ScalarField> {
    LaplaceSystem::new(r).solve(boundary_values, tol)
}

/// `s - harmonic_extension(trace of s)` on `r`, zero elsewhere.
pub fn project_hd(s: &ScalarField, r: &Region, tol: f64) -> Result<ScalarField> {
    project_with(&LaplaceSystem::new(r), s, tol)
}

pub(crate) fn project_with(sys: &LaplaceSystem, s: &ScalarField, tol: f64) -> Result<ScalarField> {
    let r = sys.region();
    let phi = sys.solve(&r.trace(s)?, tol)?;
    let mut out = ScalarField::zeros(*r.grid());
    let d = out.data_mut();
    for &k in r.interior() {
        d[k] = s.data()[k] - phi.data()[k];
    }
    Ok(out)
}

impl LaplaceSystem {
    /// Dirichlet projection reusing this system.
    pub fn project(&self, s: &ScalarField, tol: f64) -> Result<ScalarField> {
        project_with(self, s, tol)
    }
}

/// Max over interior nodes of `|sum of neighbours - 4*centre|`.
pub fn stencil_residual_max(s: &ScalarField, r: &Region) -> Result<f64> {
    s.ensure_same_grid(r.grid())?;
    let nx = r.grid().nx;
    let d = s.data();
    Ok(r
        .interior()
        .iter()
        .map(|&k| (d[k - 1] + d[k + 1] + d[k - nx] + d[k + nx] - 4.0 * d[k]).abs())
        .fold(0.0, f64::max))
}
