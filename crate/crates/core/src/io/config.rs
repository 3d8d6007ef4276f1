//! Line-oriented `key = value` run configuration with dotted keys.
//!
//! ```text
//! # Example 1
//! grid.h = 0.015625
//! layer.1.radius = 0.5
//! layer.1.speed = 0.5
//! kset.kind = disk
//! kset.radius = 0.2
//! T = 4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::atomic::read_file;
use crate::error::{Error, Result};
use crate::grid_field::{random_bumps, Bump, Grid, PhantomKind};
use crate::medium::Layer;
use crate::rays::{BranchCaps, Sampling, Vec2};
use crate::recon::{KShape, Scenario, Setup, DEFAULT_M_MAX, DEFAULT_TOL_REL};
use crate::wave::DEFAULT_CFL;

const FIXED_KEYS: &[&str] = &[
    "grid.h",
    "grid.nx",
    "grid.ny",
    "grid.ox",
    "grid.oy",
    "omega.xmin",
    "omega.xmax",
    "omega.ymin",
    "omega.ymax",
    "kset.kind",
    "kset.cx",
    "kset.cy",
    "kset.radius",
    "kset.inner_radius",
    "kset.xmin",
    "kset.xmax",
    "kset.ymin",
    "kset.ymax",
    "T",
    "solver.cfl",
    "solver.box_margin",
    "solver.sponge",
    "medium.mollify_width",
    "recon.m_max",
    "recon.tol_rel",
    "recon.harmonic_tol",
    "roundtrip.reference_refine",
    "seed",
    "output.dir",
    "phantom.kind",
    "phantom.random.count",
    "phantom.random.sigma",
    "knorm.iters",
    "ray.n_pos",
    "ray.n_dir",
    "ray.max_depth",
    "ray.min_weight",
    "ray.x",
    "ray.y",
    "ray.dx",
    "ray.dy",
];

/// Source phantom requested by the configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum PhantomSpec {
    Bumps(Vec<Bump>),
    Random { count: usize, sigma: f64 },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub phantom: PhantomSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub reference_refine: usize,
    pub knorm_iters: usize,
    pub sampling: Sampling,
    pub caps: BranchCaps,
    pub ray_origin: Option<Vec2>,
    pub ray_direction: Vec2,
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::config(format!("line {line_no}: expected `key = value`")));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(Error::config(format!("line {line_no}: empty key or value")));
            }
            if !known_key(k) {
                return Err(Error::config(format!("line {line_no}: unknown key `{k}`")));
            }
            if map.insert(k.to_string(), (line_no, v.to_string())).is_some() {
                return Err(Error::config(format!("line {line_no}: duplicate key `{k}`")));
            }
        }
        Ok(Entries { map })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("line {line}: invalid value `{v}` for `{key}`"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::config(format!("missing required key `{key}`")))
    }

    fn bool(&self, key: &str) -> Result<bool> {
        match self.map.get(key).map(|(l, v)| (l, v.as_str())) {
            None => Ok(false),
            Some((_, "true" | "on" | "1" | "yes")) => Ok(true),
            Some((_, "false" | "off" | "0" | "no")) => Ok(false),
            Some((l, v)) => Err(Error::config(format!("line {l}: invalid boolean `{v}` for `{key}`"))),
        }
    }

    /// Indices `1..=n` of an indexed family such as `layer.N.radius`,
    /// required to be contiguous.
    fn indices(&self, prefix: &str) -> Result<usize> {
        let mut idx: Vec<usize> = self
            .map
            .keys()
            .filter_map(|k| k.strip_prefix(prefix))
            .filter_map(|rest| rest.split('.').next())
            .filter_map(|n| n.parse().ok())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        for (want, &got) in (1..).zip(&idx) {
            if got != want {
                return Err(Error::config(format!("`{prefix}N` entries must be numbered 1, 2, ... without gaps")));
            }
        }
        Ok(idx.len())
    }
}

fn known_key(k: &str) -> bool {
    if FIXED_KEYS.contains(&k) {
        return true;
    }
    let indexed = |prefix: &str, fields: &[&str]| {
        k.strip_prefix(prefix)
            .and_then(|rest| rest.split_once('.'))
            .is_some_and(|(n, f)| n.parse::<usize>().is_ok_and(|n| n >= 1) && fields.contains(&f))
    };
    indexed("layer.", &["radius", "speed"]) || indexed("phantom.bump.", &["x", "y", "sigma"])
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text)?;
        let h: f64 = e.require("grid.h")?;
        let explicit: [Option<f64>; 4] = [e.get("grid.nx")?, e.get("grid.ny")?, e.get("grid.ox")?, e.get("grid.oy")?];
        let grid = match explicit {
            [None, None, None, None] => None,
            [Some(nx), Some(ny), Some(ox), Some(oy)] => {
                if nx.fract() != 0.0 || ny.fract() != 0.0 || nx < 0.0 || ny < 0.0 {
                    return Err(Error::config("grid.nx and grid.ny must be whole numbers"));
                }
                Some(Grid::new(nx as usize, ny as usize, h, ox, oy)?)
            }
            _ => return Err(Error::config("grid.nx, grid.ny, grid.ox and grid.oy go together")),
        };

        let mut layers = Vec::new();
        for n in 1..=e.indices("layer.")? {
            layers.push(Layer {
                radius: e.require(&format!("layer.{n}.radius"))?,
                speed: e.require(&format!("layer.{n}.speed"))?,
            });
        }

        let omega = (
            e.or("omega.xmin", -1.0)?,
            e.or("omega.xmax", 1.0)?,
            e.or("omega.ymin", -1.0)?,
            e.or("omega.ymax", 1.0)?,
        );
        let kind: String = e.or("kset.kind", "disk".to_string())?;
        let (cx, cy) = (e.or("kset.cx", 0.0)?, e.or("kset.cy", 0.0)?);
        let kset = match kind.as_str() {
            "disk" => KShape::Disk {
                cx,
                cy,
                radius: e.require("kset.radius")?,
            },
            "annulus" => KShape::Annulus {
                cx,
                cy,
                inner: e.require("kset.inner_radius")?,
                outer: e.require("kset.radius")?,
            },
            "rectangle" => KShape::Rectangle {
                xmin: e.require("kset.xmin")?,
                xmax: e.require("kset.xmax")?,
                ymin: e.require("kset.ymin")?,
                ymax: e.require("kset.ymax")?,
            },
            other => return Err(Error::config(format!("unknown kset.kind `{other}`"))),
        };

        let scenario = Scenario {
            h,
            omega,
            grid,
            layers,
            mollify_width: e.or("medium.mollify_width", 0.0)?,
            kset,
            t_final: e.require("T")?,
            cfl: e.or("solver.cfl", DEFAULT_CFL)?,
            sponge: e.bool("solver.sponge")?,
            box_margin: e.get("solver.box_margin")?,
            m_max: e.or("recon.m_max", DEFAULT_M_MAX)?,
            tol_rel: e.or("recon.tol_rel", DEFAULT_TOL_REL)?,
            harmonic_tol: e.or("recon.harmonic_tol", crate::grid_field::DEFAULT_HARMONIC_TOL)?,
        };

        let phantom_kind: String = e.or("phantom.kind", "bumps".to_string())?;
        let phantom = match phantom_kind.as_str() {
            "bump" | "bumps" => {
                let n = e.indices("phantom.bump.")?;
                if n == 0 {
                    return Err(Error::config("phantom.kind = bumps needs phantom.bump.1.*"));
                }
                let mut v = Vec::with_capacity(n);
                for i in 1..=n {
                    v.push(Bump {
                        x: e.require(&format!("phantom.bump.{i}.x"))?,
                        y: e.require(&format!("phantom.bump.{i}.y"))?,
                        sigma: e.require(&format!("phantom.bump.{i}.sigma"))?,
                    });
                }
                if phantom_kind == "bump" && n != 1 {
                    return Err(Error::config("phantom.kind = bump takes exactly one bump"));
                }
                PhantomSpec::Bumps(v)
            }
            "random" => PhantomSpec::Random {
                count: e.require("phantom.random.count")?,
                sigma: e.require("phantom.random.sigma")?,
            },
            other => return Err(Error::config(format!("unknown phantom.kind `{other}`"))),
        };

        let ray_origin = match (e.get::<f64>("ray.x")?, e.get::<f64>("ray.y")?) {
            (Some(x), Some(y)) => Some(Vec2::new(x, y)),
            (None, None) => None,
            _ => return Err(Error::config("ray.x and ray.y go together")),
        };
        let defaults = BranchCaps::default();
        let cfg = RunConfig {
            scenario,
            phantom,
            seed: e.or("seed", 0)?,
            output_dir: PathBuf::from(e.or("output.dir", "out".to_string())?),
            reference_refine: e.or("roundtrip.reference_refine", 2)?,
            knorm_iters: e.or("knorm.iters", 8)?,
            sampling: Sampling {
                n_pos: e.or("ray.n_pos", 64)?,
                n_dir: e.or("ray.n_dir", 128)?,
            },
            caps: BranchCaps {
                max_depth: e.or("ray.max_depth", defaults.max_depth)?,
                min_weight: e.or("ray.min_weight", defaults.min_weight)?,
            },
            ray_origin,
            ray_direction: Vec2::new(e.or("ray.dx", 1.0)?, e.or("ray.dy", 0.0)?),
        };
        if cfg.reference_refine == 0 {
            return Err(Error::config("roundtrip.reference_refine must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Error::config(format!("{}: not UTF-8 text", path.display())))?;
        RunConfig::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The phantom on the setup's grid and K; random phantoms draw from the
    /// configured seed.
    pub fn phantom_kind(&self, setup: &Setup) -> Result<PhantomKind> {
        match &self.phantom {
            PhantomSpec::Bumps(v) if v.len() == 1 => Ok(PhantomKind::GaussianBump(v[0])),
            PhantomSpec::Bumps(v) => Ok(PhantomKind::SumOfBumps(v.clone())),
            PhantomSpec::Random { count, sigma } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                Ok(PhantomKind::SumOfBumps(random_bumps(&setup.cfg.kset, *count, *sigma, &mut rng)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "grid.h = 0.0625\nlayer.1.radius = 0.5\nlayer.1.speed = 0.5\nkset.radius = 0.2\nT = 1.5\nphantom.bump.1.x = 0\nphantom.bump.1.y = 0\nphantom.bump.1.sigma = 0.05\n";

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.scenario.layers, vec![Layer { radius: 0.5, speed: 0.5 }]);
        assert_eq!(c.scenario.t_final, 1.5);
        assert_eq!(c.sampling, Sampling { n_pos: 64, n_dir: 128 });
        assert!(matches!(c.phantom, PhantomSpec::Bumps(ref v) if v.len() == 1));
        c.scenario.build().unwrap();
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        for extra in ["layer.1.colour = red\n", "grid.h = 0.1\n", "foo = 1\n", "layer.0.radius = 1\n", "nonsense\n"] {
            let text = format!("{BASE}{extra}");
            assert!(matches!(RunConfig::parse(&text), Err(Error::Config(_))), "{extra}");
        }
    }

    #[test]
    fn comments_and_gaps() {
        let ok = format!("# header\n{BASE}  seed = 7   # trailing\n");
        assert_eq!(RunConfig::parse(&ok).unwrap().seed, 7);
        let gap = format!("{BASE}layer.3.radius = 0.1\nlayer.3.speed = 2\n");
        assert!(RunConfig::parse(&gap).is_err());
        assert!(RunConfig::parse("T = 1\n").is_err());
    }
}
