use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Angular distance from tangency below which a hit is treated as glancing.
pub const TANGENCY_TOL: f64 = 1e-9;
/// Angular distance from the critical angle at which Snell's law is
/// declined.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Angle between `d` and the normal line through `n`, in `[0, π/2]`.
pub fn incidence_angle(d: Vec2, n: Vec2) -> f64 {
    let dn = d.dot(n);
    (d - n * dn).norm().atan2(dn.abs())
}

/// Mirror image `d - 2(d·n)n`.
pub fn reflect(d: Vec2, n: Vec2) -> Result<Vec2> {
    if d.dot(n).abs() <= TANGENCY_TOL {
        return Err(Error::Tangency);
    }
    Ok(d - n * (2.0 * d.dot(n)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transmission {
    Transmitted(Vec2),
    TotalInternalReflection,
}

/// Refracted direction on the far side of the interface with normal `n`
/// (either orientation), keeping the tangential slowness `sin α / c`.
pub fn snell_transmit(d: Vec2, n: Vec2, c_in: f64, c_out: f64) -> Result<Transmission> {
    if !(c_in > 0.0 && c_out > 0.0) {
        return Err(Error::config("speeds must be positive"));
    }
    let dn = d.dot(n);
    if dn.abs() <= TANGENCY_TOL {
        return Err(Error::Tangency);
    }
    let alpha = incidence_angle(d, n);
    if c_in < c_out {
        let alpha0 = (c_in / c_out).asin();
        if (alpha - alpha0).abs() < CRITICAL_TOL {
            return Err(Error::CriticalAngle);
        }
        if alpha > alpha0 {
            return Ok(Transmission::TotalInternalReflection);
        }
    }
    let ratio = c_out / c_in;
    let tangential = (d - n * dn) * ratio;
    let sin_b = tangential.norm();
    let cos_b = (1.0 - sin_b * sin_b).max(0.0).sqrt();
    let dt = tangential + n * (dn.signum() * cos_b);
    Ok(Transmission::Transmitted(dt))
}

/// Normal phase derivatives `a = √(c_in⁻² − s²)`, `b = √(c_out⁻² − s²)` for
/// tangential slowness `s = sin α / c_in`; `b = 0` past the critical angle.
pub fn normal_slownesses(alpha: f64, c_in: f64, c_out: f64) -> (f64, f64) {
    let s = alpha.sin() / c_in;
    let a = alpha.cos() / c_in;
    let b = (1.0 / (c_out * c_out) - s * s).max(0.0).sqrt();
    (a, b)
}

/// Principal reflection and transmission amplitudes `(b_R, b_T)`.
pub fn amplitude_coeffs(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a >= 0.0 && b >= 0.0) || a + b <= 0.0 || !(a + b).is_finite() {
        return Err(Error::Degenerate(format!("amplitude system is singular for a = {a}, b = {b}")));
    }
    Ok(((a - b) / (a + b), 2.0 * a / (a + b)))
}

/// Transmitted energy fraction `4ab/(a+b)²`.
pub fn energy_split(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Degenerate(format!("energy split needs a > 0 and b >= 0, got a = {a}, b = {b}")));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(4.0 * a * b / ((a + b) * (a + b)))
}
