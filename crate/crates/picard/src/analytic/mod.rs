//! Double-precision numerics: real-analytic Eisenstein series through theta integrals,
//! Siegel functions and the discriminant, Kronecker limit formulae, the Whittaker function
//! W_{0,0}, a Mellin identity, the complex Gamma factor and the archimedean factor.
//!
//! All routines are deterministic: lattice points are visited in a fixed order.

pub mod archimedean;
pub mod eisenstein;
pub mod siegel;
pub mod special;

use serde::Serialize;
use thiserror::Error;

pub use archimedean::*;
pub use eisenstein::*;
pub use siegel::*;

/// Requested digits above this are clamped; f64 cannot carry more.
pub const MAX_DIGITS: u32 = 15;
pub const DEFAULT_DIGITS: u32 = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("point must lie in the upper half plane (y = {0})")]
    NotUpperHalfPlane(f64),
    #[error("level must be at least 1")]
    BadLevel,
    #[error("s = {re}+{im}i is within 1e-6 of a pole; use pole-subtracted mode")]
    NearPole { re: f64, im: f64 },
    #[error("tail bound {achieved:e} cannot reach the target {target:e} within {points} lattice points")]
    PrecisionUnreachable { achieved: f64, target: f64, points: usize },
    #[error("(alpha, beta) = ({alpha}, {beta}) lies outside the region where the product converges")]
    Divergent { alpha: f64, beta: f64 },
    #[error("(alpha, beta) must not be integral")]
    IntegralSiegelIndex,
    #[error("quadrature did not converge (error estimate {0:e})")]
    Quadrature(f64),
    #[error("argument must be positive")]
    NonPositive,
    #[error("{0}")]
    Case(String),
}

/// A point x + iy of the upper half plane together with a working-precision tag in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UHPoint {
    pub x: f64,
    pub y: f64,
    pub digits: u32,
}

impl UHPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, AnalyticError> {
        Self::with_digits(x, y, DEFAULT_DIGITS)
    }

    pub fn with_digits(x: f64, y: f64, digits: u32) -> Result<Self, AnalyticError> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(AnalyticError::NotUpperHalfPlane(y));
        }
        Ok(UHPoint { x, y, digits })
    }

    pub fn i() -> Self {
        UHPoint { x: 0.0, y: 1.0, digits: DEFAULT_DIGITS }
    }

    pub fn z(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.x, self.y)
    }

    /// Digits actually targeted after clamping to double precision.
    pub fn effective_digits(&self) -> u32 {
        self.digits.clamp(1, MAX_DIGITS)
    }

    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.effective_digits() as i32))
    }

    pub fn map(&self, f: impl Fn(num_complex::Complex64) -> num_complex::Complex64) -> Result<Self, AnalyticError> {
        let w = f(self.z());
        Self::with_digits(w.re, w.im, self.digits)
    }

    pub fn translate(&self, t: f64) -> Self {
        UHPoint { x: self.x + t, ..*self }
    }

    pub fn scale(&self, c: f64) -> Self {
        UHPoint { x: self.x * c, y: self.y * c, digits: self.digits }
    }
}

/// A residue class w = (w1, w2) in (Z/N)^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueVector {
    pub level: u64,
    pub w: (u64, u64),
}

impl ResidueVector {
    pub fn new(level: u64, w1: i64, w2: i64) -> Result<Self, AnalyticError> {
        if level == 0 {
            return Err(AnalyticError::BadLevel);
        }
        let n = level as i64;
        Ok(ResidueVector { level, w: (w1.rem_euclid(n) as u64, w2.rem_euclid(n) as u64) })
    }

    pub fn is_zero(&self) -> bool {
        self.w == (0, 0)
    }

    pub fn neg(&self) -> Self {
        let n = self.level;
        ResidueVector { level: n, w: ((n - self.w.0) % n, (n - self.w.1) % n) }
    }

    /// w0 = w / N in [0,1)^2.
    pub fn w0(&self) -> (f64, f64) {
        let n = self.level as f64;
        (self.w.0 as f64 / n, self.w.1 as f64 / n)
    }

    pub fn all_nonzero(level: u64) -> Vec<ResidueVector> {
        let mut out = Vec::new();
        for a in 0..level {
            for b in 0..level {
                if (a, b) != (0, 0) {
                    out.push(ResidueVector { level, w: (a, b) });
                }
            }
        }
        out
    }
}

impl std::fmt::Display for ResidueVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{}) mod {}", self.w.0, self.w.1, self.level)
    }
}
