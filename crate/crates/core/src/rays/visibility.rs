use std::fmt::Write;

use rayon::prelude::*;

use super::branches::{trace_branches, BranchCaps, EventKind};
use super::optics::Vec2;
use crate::error::{Error, Result};
use crate::grid_field::{Region, RegionShape};
use crate::medium::Medium;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub n_pos: usize,
    pub n_dir: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { n_pos: 64, n_dir: 128 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    pub x: Vec2,
    pub d: Vec2,
    pub covered: bool,
    /// Total weight of exit leaves over both launch signs.
    pub exit_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityReport {
    pub visible: bool,
    pub samples: Vec<RaySample>,
    /// Smallest transmitted energy fraction seen at any transmission.
    pub min_transmitted_fraction: Option<f64>,
}

impl VisibilityReport {
    pub fn uncovered(&self) -> Vec<RaySample> {
        self.samples.iter().filter(|s| !s.covered).copied().collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,dx,dy,covered,exit_weight\n");
        for r in &self.samples {
            let _ = writeln!(
                s,
                "{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e}",
                r.x.x, r.x.y, r.d.x, r.d.y, r.covered as u8, r.exit_weight
            );
        }
        s
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Points of K concentrated towards its boundary, where the worst cases of
/// the ray geometry sit.
pub fn sample_points(kset: &Region, n: usize) -> Vec<Vec2> {
    let lobatto = |i: usize, n: usize| {
        if n < 2 {
            0.5
        } else {
            0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        }
    };
    match *kset.shape() {
        RegionShape::Disk { cx, cy, radius } => (0..n)
            .map(|i| {
                let u = i as f64 / n as f64;
                let r = radius * (1.0 - u * u);
                Vec2::new(cx, cy) + Vec2::from_angle(i as f64 * GOLDEN_ANGLE) * r
            })
            .collect(),
        RegionShape::Annulus { cx, cy, inner, outer } => (0..n)
            .map(|i| {
                let r = inner + (outer - inner) * lobatto(i, n);
                Vec2::new(cx, cy) + Vec2::from_angle(i as f64 * GOLDEN_ANGLE) * r
            })
            .collect(),
        RegionShape::Rectangle { .. } => {
            let (x0, x1, y0, y1) = kset.rect_bounds().expect("rectangle");
            let m = (n as f64).sqrt().ceil() as usize;
            (0..m * m)
                .take(n)
                .map(|q| {
                    let (i, j) = (q % m, q / m);
                    Vec2::new(x0 + (x1 - x0) * lobatto(i, m), y0 + (y1 - y0) * lobatto(j, m))
                })
                .collect()
        }
    }
}

/// Samples `n_pos` points of K times `n_dir` directions and asks for an exit
/// branch from either launch sign before `t_final`.
pub fn check_visibility(
    kset: &Region,
    m: &Medium,
    omega: &Region,
    t_final: f64,
    sampling: Sampling,
    caps: BranchCaps,
) -> Result<VisibilityReport> {
    if sampling.n_pos == 0 || sampling.n_dir == 0 {
        return Err(Error::config("sampling counts must be at least 1"));
    }
    let points = sample_points(kset, sampling.n_pos);
    let dirs: Vec<Vec2> = (0..sampling.n_dir)
        .map(|j| Vec2::from_angle(2.0 * std::f64::consts::PI * j as f64 / sampling.n_dir as f64))
        .collect();
    let jobs: Vec<(Vec2, Vec2)> = points.iter().flat_map(|&p| dirs.iter().map(move |&d| (p, d))).collect();
    let results: Vec<Result<(RaySample, Option<f64>)>> = jobs
        .par_iter()
        .map(|&(p, d)| {
            let g = trace_branches(p, d, m, omega, t_final, caps)?;
            let exit_weight = g.leaf_weight(EventKind::Exit);
            let min_t = g
                .events
                .iter()
                .filter(|e| e.kind == EventKind::Transmit)
                .map(|e| e.weight / g.events[e.parent.expect("transmit has a parent")].weight)
                .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))));
            Ok((
                RaySample {
                    x: p,
                    d,
                    covered: g.has_exit(),
                    exit_weight,
                },
                min_t,
            ))
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut min_t: Option<f64> = None;
    for r in results {
        let (s, m) = r?;
        samples.push(s);
        if let Some(v) = m {
            min_t = Some(min_t.map_or(v, |a| a.min(v)));
        }
    }
    Ok(VisibilityReport {
        visible: samples.iter().all(|s| s.covered),
        samples,
        min_transmitted_fraction: min_t,
    })
}
