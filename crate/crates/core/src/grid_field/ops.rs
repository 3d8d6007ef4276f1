use rayon::prelude::*;

use super::grid::{ScalarField, WaveState};
use super::region::{NodeClass, Region};
use crate::error::Result;
use crate::medium::Medium;
use crate::par;

/// Writes `scale[k] * (5-point sum)` into `out` at every node off the outer
/// ring; the ring is set to zero. `scale` may be `None` for unit weights.
pub fn laplacian_into(src: &[f64], nx: usize, ny: usize, scale: Option<&[f64]>, out: &mut [f64]) {
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        if j == 0 || j == ny - 1 {
            row.fill(0.0);
            return;
        }
        let c = &src[j * nx..(j + 1) * nx];
        let up = &src[(j + 1) * nx..(j + 2) * nx];
        let dn = &src[(j - 1) * nx..j * nx];
        row[0] = 0.0;
        row[nx - 1] = 0.0;
        for i in 1..nx - 1 {
            let lap = c[i - 1] + c[i + 1] + up[i] + dn[i] - 4.0 * c[i];
            row[i] = match scale {
                Some(s) => s[j * nx + i] * lap,
                None => lap,
            };
        }
    });
}

/// `c(x)^2` times the 5-point Laplacian of `s`; zero on the outer ring.
pub fn apply_wave_operator(s: &ScalarField, m: &Medium) -> Result<ScalarField> {
    s.ensure_same_grid(m.grid())?;
    let g = *s.grid();
    let inv_h2 = 1.0 / (g.h * g.h);
    let scale: Vec<f64> = m.c_field().iter().map(|c| c * c * inv_h2).collect();
    let mut out = ScalarField::zeros(g);
    laplacian_into(s.data(), g.nx, g.ny, Some(&scale), out.data_mut());
    Ok(out)
}

/// Squared forward differences owned by node `k`: every edge with at least
/// one interior endpoint is owned by exactly one node, its lower endpoint.
#[inline]
fn gradient_sq_owned(d: &[f64], r: &Region, k: usize, nx: usize) -> f64 {
    let mut acc = 0.0;
    let own = r.class_of(k);
    for n in [k + 1, k + nx] {
        let nc = r.class_of(n);
        let counted = match own {
            NodeClass::Interior => true,
            NodeClass::Boundary => nc == NodeClass::Interior,
            NodeClass::Outside => false,
        };
        if counted {
            let diff = d[n] - d[k];
            acc += diff * diff;
        }
    }
    acc
}

/// Discrete Dirichlet energy `∫_r |∇s|^2`.
///
/// Edges joining two boundary nodes are excluded, so the value only sees
/// differences that touch the interior. In 2-D the `h^2` volume element
/// cancels the `1/h^2` of the difference quotients.
pub fn dirichlet_energy(s: &ScalarField, r: &Region) -> Result<f64> {
    s.ensure_same_grid(r.grid())?;
    let nx = r.grid().nx;
    let d = s.data();
    let owners: Vec<usize> = r.interior().iter().chain(r.boundary()).copied().collect();
    Ok(par::sum_chunks(owners.len(), |range| {
        owners[range].iter().map(|&k| gradient_sq_owned(d, r, k, nx)).sum()
    }))
}

/// Per-node energy contributions over `r`; summing any partition of the
/// region's nodes gives the energy of the parts.
pub fn energy_density(w: &WaveState, r: &Region, m: &Medium) -> Result<ScalarField> {
    w.u.ensure_same_grid(r.grid())?;
    w.ut.ensure_same_grid(r.grid())?;
    w.u.ensure_same_grid(m.grid())?;
    let g = *r.grid();
    let h2 = g.h * g.h;
    let u = w.u.data();
    let ut = w.ut.data();
    let c = m.c_field();
    let mut out = ScalarField::zeros(g);
    let dens = out.data_mut();
    for &k in r.interior() {
        dens[k] = gradient_sq_owned(u, r, k, g.nx) + ut[k] * ut[k] * h2 / (c[k] * c[k]);
    }
    for &k in r.boundary() {
        dens[k] = gradient_sq_owned(u, r, k, g.nx);
    }
    Ok(out)
}

/// Energy `∫_r |∇u|^2 + c^{-2} u_t^2`; the kinetic term is summed over
/// interior nodes.
pub fn energy(w: &WaveState, r: &Region, m: &Medium) -> Result<f64> {
    w.ut.ensure_same_grid(r.grid())?;
    w.u.ensure_same_grid(m.grid())?;
    let pot = dirichlet_energy(&w.u, r)?;
    let h2 = r.grid().h * r.grid().h;
    let ut = w.ut.data();
    let c = m.c_field();
    let interior = r.interior();
    let kin = par::sum_chunks(interior.len(), |range| {
        interior[range]
            .iter()
            .map(|&k| ut[k] * ut[k] / (c[k] * c[k]))
            .sum()
    });
    Ok(pot + kin * h2)
}

/// `(∫_r s^2)^{1/2}` over the closure of `r`.
pub fn l2_norm_on(s: &ScalarField, r: &Region) -> Result<f64> {
    s.ensure_same_grid(r.grid())?;
    let d = s.data();
    let sum: f64 = r.interior().iter().chain(r.boundary()).map(|&k| d[k] * d[k]).sum();
    Ok((sum * r.grid().h * r.grid().h).sqrt())
}
