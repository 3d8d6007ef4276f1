use std::fmt::Write;

use super::optics::{
    amplitude_coeffs, energy_split, incidence_angle, normal_slownesses, reflect, snell_transmit, Transmission, Vec2,
    TANGENCY_TOL,
};
use crate::error::{Error, Result};
use crate::grid_field::Region;
use crate::medium::Medium;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Launch,
    Reflect,
    Transmit,
    Exit,
    Expiry,
    Truncation,
    TangentUndetermined,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Launch => "launch",
            EventKind::Reflect => "reflect",
            EventKind::Transmit => "transmit",
            EventKind::Exit => "exit",
            EventKind::Expiry => "expiry",
            EventKind::Truncation => "truncation",
            EventKind::TangentUndetermined => "tangent-undetermined",
        }
    }

    pub fn is_leaf(self) -> bool {
        matches!(
            self,
            EventKind::Exit | EventKind::Expiry | EventKind::Truncation | EventKind::TangentUndetermined
        )
    }
}

/// One node of the branch tree. Launch, reflect and transmit events start a
/// straight segment; the other kinds end one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub point: Vec2,
    pub t: f64,
    /// Incidence angle from the normal at interface events, zero otherwise.
    pub angle: f64,
    pub weight: f64,
    pub parent: Option<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCaps {
    pub max_depth: usize,
    pub min_weight: f64,
}

impl Default for BranchCaps {
    fn default() -> Self {
        BranchCaps {
            max_depth: 32,
            min_weight: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RayBranchGraph {
    pub events: Vec<Event>,
}

impl RayBranchGraph {
    pub fn children(&self, id: usize) -> impl Iterator<Item = (usize, &Event)> {
        self.events
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.parent == Some(id))
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.kind.is_leaf())
    }

    pub fn has_exit(&self) -> bool {
        self.leaves().any(|e| e.kind == EventKind::Exit)
    }

    /// Total weight of the leaves of a given kind.
    pub fn leaf_weight(&self, kind: EventKind) -> f64 {
        self.leaves().filter(|e| e.kind == kind).map(|e| e.weight).sum()
    }

    /// One line per event: `kind x y t angle weight parent` with parent
    /// `-1` for launches.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# kind x y t angle weight parent\n");
        for e in &self.events {
            let parent = e.parent.map_or(-1, |p| p as i64);
            let _ = writeln!(
                s,
                "{} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {}",
                e.kind.as_str(),
                e.point.x,
                e.point.y,
                e.t,
                e.angle,
                e.weight,
                parent
            );
        }
        s
    }
}

/// The speed layout seen by rays: circles about the origin, outermost first.
struct Geometry {
    radii: Vec<f64>,
    /// `speeds[l]` is the speed in layer `l`; layer 0 is outside every
    /// circle.
    speeds: Vec<f64>,
    bounds: (f64, f64, f64, f64),
}

impl Geometry {
    fn new(m: &Medium, omega: &Region) -> Result<Self> {
        let bounds = omega
            .rect_bounds()
            .ok_or_else(|| Error::config("ray tracing needs a rectangular omega"))?;
        let radii: Vec<f64> = m.layers().iter().map(|l| l.radius).collect();
        let mut speeds = vec![1.0];
        speeds.extend(m.layers().iter().map(|l| l.speed));
        let (x0, x1, y0, y1) = bounds;
        if let Some(&r) = radii.first() {
            if r >= -x0 || r >= x1 || r >= -y0 || r >= y1 {
                return Err(Error::config("interfaces must lie strictly inside omega"));
            }
        }
        Ok(Geometry { radii, speeds, bounds })
    }

    fn layer_of(&self, p: Vec2) -> usize {
        let r = p.norm();
        self.radii.iter().take_while(|&&rad| r < rad).count()
    }

    fn inside_omega(&self, p: Vec2) -> bool {
        let (x0, x1, y0, y1) = self.bounds;
        p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1
    }

    /// Distance along `d` to the rectangle boundary from an inside point.
    fn exit_distance(&self, p: Vec2, d: Vec2) -> f64 {
        let (x0, x1, y0, y1) = self.bounds;
        let mut s = f64::INFINITY;
        if d.x > 0.0 {
            s = s.min((x1 - p.x) / d.x);
        } else if d.x < 0.0 {
            s = s.min((x0 - p.x) / d.x);
        }
        if d.y > 0.0 {
            s = s.min((y1 - p.y) / d.y);
        } else if d.y < 0.0 {
            s = s.min((y0 - p.y) / d.y);
        }
        s
    }
}

enum Hit {
    /// Interface index (into `radii`) and path length.
    Circle(usize, f64),
    Glancing(f64),
    Boundary(f64),
}

/// Next event for a ray in layer `l`: its outer circle is `l - 1`, its inner
/// circle `l`.
fn next_hit(geo: &Geometry, l: usize, p: Vec2, d: Vec2) -> Hit {
    let pd = p.dot(d);
    let pp = p.dot(p);
    let mut best: Option<Hit> = None;
    let mut best_s = f64::INFINITY;
    if l < geo.radii.len() {
        let r = geo.radii[l];
        let disc = pd * pd - (pp - r * r);
        if disc >= 0.0 {
            let s = -pd - disc.sqrt();
            if s > 1e-12 {
                best_s = s;
                // Angle between d and the normal at the hit point.
                let n = (p + d * s) * (1.0 / r);
                let glancing = (std::f64::consts::FRAC_PI_2 - incidence_angle(d, n)) < TANGENCY_TOL;
                best = Some(if glancing { Hit::Glancing(s) } else { Hit::Circle(l, s) });
            }
        }
    }
    if l >= 1 {
        let r = geo.radii[l - 1];
        let disc = (pd * pd - (pp - r * r)).max(0.0);
        let s = -pd + disc.sqrt();
        if s > 1e-12 && s < best_s {
            let n = (p + d * s) * (1.0 / r);
            let glancing = (std::f64::consts::FRAC_PI_2 - incidence_angle(d, n)) < TANGENCY_TOL;
            best = Some(if glancing { Hit::Glancing(s) } else { Hit::Circle(l - 1, s) });
        }
    } else {
        let s = geo.exit_distance(p, d);
        if s < best_s {
            best = Some(Hit::Boundary(s));
        }
    }
    best.unwrap_or(Hit::Boundary(geo.exit_distance(p, d)))
}

struct Pending {
    p: Vec2,
    d: Vec2,
    layer: usize,
    event: usize,
}

/// Grows the reflect/transmit tree for both launch directions `±d0`; each
/// sign starts with weight 1/2.
pub fn trace_branches(
    x0: Vec2,
    d0: Vec2,
    m: &Medium,
    omega: &Region,
    t_final: f64,
    caps: BranchCaps,
) -> Result<RayBranchGraph> {
    let geo = Geometry::new(m, omega)?;
    if !(caps.min_weight > 0.0) || caps.max_depth == 0 {
        return Err(Error::config("branch caps must be positive"));
    }
    if !geo.inside_omega(x0) {
        return Err(Error::config("launch point must lie inside omega"));
    }
    if geo.radii.iter().any(|&r| (x0.norm() - r).abs() < 1e-12) {
        return Err(Error::config("launch point lies on an interface"));
    }
    if !(d0.norm() > 0.0) {
        return Err(Error::config("launch direction must be nonzero"));
    }
    let d0 = d0.normalized();
    let layer0 = geo.layer_of(x0);
    let mut g = RayBranchGraph::default();
    let mut stack = Vec::new();
    for d in [d0, -d0] {
        g.events.push(Event {
            kind: EventKind::Launch,
            point: x0,
            t: 0.0,
            angle: 0.0,
            weight: 0.5,
            parent: None,
            depth: 0,
        });
        stack.push(Pending {
            p: x0,
            d,
            layer: layer0,
            event: g.events.len() - 1,
        });
    }

    while let Some(ray) = stack.pop() {
        let parent = g.events[ray.event];
        let c = geo.speeds[ray.layer];
        let hit = next_hit(&geo, ray.layer, ray.p, ray.d);
        let s = match hit {
            Hit::Circle(_, s) | Hit::Glancing(s) | Hit::Boundary(s) => s,
        };
        let leaf = |kind, point, t| Event {
            kind,
            point,
            t,
            angle: 0.0,
            weight: parent.weight,
            parent: Some(ray.event),
            depth: parent.depth,
        };
        let t_hit = parent.t + s / c;
        if t_hit >= t_final {
            let point = ray.p + ray.d * ((t_final - parent.t) * c);
            g.events.push(leaf(EventKind::Expiry, point, t_final));
            continue;
        }
        let point = ray.p + ray.d * s;
        let idx = match hit {
            Hit::Boundary(_) => {
                g.events.push(leaf(EventKind::Exit, point, t_hit));
                continue;
            }
            Hit::Glancing(_) => {
                g.events.push(leaf(EventKind::TangentUndetermined, point, t_hit));
                continue;
            }
            Hit::Circle(idx, _) => idx,
        };
        let n = point * (1.0 / geo.radii[idx]);
        let alpha = incidence_angle(ray.d, n);
        // Crossing circle idx moves between layers idx and idx + 1.
        let other = if ray.layer == idx { idx + 1 } else { idx };
        let c_out = geo.speeds[other];
        if c < c_out {
            let alpha0 = (c / c_out).asin();
            if (alpha - alpha0).abs() < TANGENCY_TOL {
                let mut e = leaf(EventKind::TangentUndetermined, point, t_hit);
                e.angle = alpha;
                g.events.push(e);
                continue;
            }
        }
        let (a, b) = normal_slownesses(alpha, c, c_out);
        let (b_r, _) = amplitude_coeffs(a, b)?;
        let w_t = parent.weight * energy_split(a, b)?;
        let w_r = parent.weight - w_t;
        let depth = parent.depth + 1;
        let mut children = vec![(EventKind::Reflect, reflect(ray.d, n)?, ray.layer, w_r)];
        match snell_transmit(ray.d, n, c, c_out) {
            Ok(Transmission::Transmitted(dt)) => children.push((EventKind::Transmit, dt, other, w_t)),
            Ok(Transmission::TotalInternalReflection) => {}
            Err(Error::CriticalAngle | Error::Tangency) => {
                let mut e = leaf(EventKind::TangentUndetermined, point, t_hit);
                e.angle = alpha;
                g.events.push(e);
                continue;
            }
            Err(e) => return Err(e),
        }
        debug_assert!((b_r * b_r + w_t / parent.weight - 1.0).abs() < 1e-12);
        for (kind, dir, layer, w) in children {
            let pruned = depth > caps.max_depth || w < caps.min_weight;
            g.events.push(Event {
                kind: if pruned { EventKind::Truncation } else { kind },
                point,
                t: t_hit,
                angle: alpha,
                weight: w,
                parent: Some(ray.event),
                depth,
            });
            if !pruned {
                stack.push(Pending {
                    p: point,
                    d: dir,
                    layer,
                    event: g.events.len() - 1,
                });
            }
        }
    }
    Ok(g)
}
