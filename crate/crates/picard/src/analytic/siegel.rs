//! Siegel functions, Ramanujan's discriminant, the Kronecker limit formulae at levels Gamma(N)
//! and Gamma_0(N), and the finite-level coefficient c(Phi, eta, (m,n)).

use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::eisenstein::{eisenstein, eisenstein_phi_at_zero, level_one_constant};
use super::special::{bernoulli2, log_abs_one_minus, EULER_GAMMA};
use super::{AnalyticError, ResidueVector, UHPoint};
use crate::ntheory::{divisors, gcd_u64, is_prime, mobius};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SiegelConvention {
    /// q^{B2(alpha)/2} prod_{n>=1} (1 - q^n q_z)(1 - q^n / q_z) with q_z = e^{2 pi i (alpha - beta z)}.
    Printed,
    /// Kubert-Lang: q^{B2(a1)/2} (1 - q_z) prod_{n>=1} (1 - q^n q_z)(1 - q^n / q_z), q_z = e^{2 pi i (a1 z + a2)}.
    Standard,
}

const PRODUCT_CUTOFF: f64 = 1e-18;

fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// log|g_{(alpha, beta)}(z)|.
///
/// Printed convention: alpha is reduced into [0,1); the product converges for |beta| < 1.
/// Standard convention: (a1, a2) = (alpha, beta) reduced into [0,1)^2, which leaves |g| unchanged.
pub fn siegel_logabs(z: &UHPoint, alpha: f64, beta: f64, convention: SiegelConvention) -> Result<f64, AnalyticError> {
    let ai = alpha.fract() == 0.0;
    let bi = beta.fract() == 0.0;
    if ai && bi {
        return Err(AnalyticError::IntegralSiegelIndex);
    }
    let q = Complex64::new(0.0, 2.0 * PI * z.x).exp() * (-2.0 * PI * z.y).exp();
    match convention {
        SiegelConvention::Printed => {
            let a = reduce_unit(alpha);
            if beta.abs() >= 1.0 {
                return Err(AnalyticError::Divergent { alpha, beta });
            }
            let arg = Complex64::new(a, 0.0) - beta * z.z();
            let qz = (Complex64::new(0.0, 2.0 * PI) * arg).exp();
            Ok(-PI * z.y * bernoulli2(a) + twin_product(q, qz))
        }
        SiegelConvention::Standard => {
            let a1 = reduce_unit(alpha);
            let a2 = reduce_unit(beta);
            let arg = a1 * z.z() + a2;
            let qz = (Complex64::new(0.0, 2.0 * PI) * arg).exp();
            Ok(-PI * z.y * bernoulli2(a1) + log_abs_one_minus(qz) + twin_product(q, qz))
        }
    }
}

fn twin_product(q: Complex64, qz: Complex64) -> f64 {
    let inv = 1.0 / qz;
    let mut qn = q;
    let mut total = 0.0;
    for _ in 0..100_000 {
        let a = qn * qz;
        let b = qn * inv;
        total += log_abs_one_minus(a) + log_abs_one_minus(b);
        if a.norm() < PRODUCT_CUTOFF && b.norm() < PRODUCT_CUTOFF {
            break;
        }
        qn *= q;
    }
    total
}

/// The value the Kronecker limit formula predicts for E_{w,N}(z, 0): -2 log|g_{w0}(z)| in the
/// standard convention.
pub fn klf_prediction(z: &UHPoint, rv: &ResidueVector) -> Result<f64, AnalyticError> {
    let (u0, v0) = rv.w0();
    Ok(-2.0 * siegel_logabs(z, u0, v0, SiegelConvention::Standard)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlfRow {
    pub rv: ResidueVector,
    pub z: (f64, f64),
    pub eisenstein: f64,
    /// |E(z,0) - log|g_{w0}(z)|| with the printed product and (alpha, beta) = w0.
    pub printed_residual: f64,
    /// |E(z,0) + 2 log|g_{w0}(z)|| with the Kubert-Lang function.
    pub standard_residual: f64,
}

pub fn klf_row(z: &UHPoint, rv: &ResidueVector) -> Result<KlfRow, AnalyticError> {
    let e = eisenstein(z, Complex64::new(0.0, 0.0), rv)?;
    let (u0, v0) = rv.w0();
    let printed = siegel_logabs(z, u0, v0, SiegelConvention::Printed)?;
    let predicted = klf_prediction(z, rv)?;
    Ok(KlfRow {
        rv: *rv,
        z: (z.x, z.y),
        eisenstein: e.re,
        printed_residual: (e.re - printed).abs().max(e.im.abs()),
        standard_residual: (e.re - predicted).abs().max(e.im.abs()),
    })
}

/// log|Delta(z)| = log|q| + 24 sum log|1 - q^n|.
pub fn delta_logabs(z: &UHPoint) -> f64 {
    let q = Complex64::new(0.0, 2.0 * PI * z.x).exp() * (-2.0 * PI * z.y).exp();
    let mut qn = q;
    let mut total = 0.0;
    for _ in 0..1_000_000 {
        total += log_abs_one_minus(qn);
        if qn.norm() < PRODUCT_CUTOFF {
            break;
        }
        qn *= q;
    }
    -2.0 * PI * z.y + 24.0 * total
}

/// log|Delta_N(z)| with Delta_N(z) = prod_{d | N} Delta(Nz/d)^{mu(d)}.
pub fn delta_level_logabs(z: &UHPoint, level: u64) -> f64 {
    divisors(level)
        .into_iter()
        .map(|d| {
            let mu = mobius(d);
            if mu == 0 {
                0.0
            } else {
                mu as f64 * delta_logabs(&z.scale(level as f64 / d as f64))
            }
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Gamma0Mode {
    /// Compare the differences between z and a second point; constants cancel.
    Difference { x2: f64, y2: f64 },
    /// Compare against the closed form including the constant of the relevant case.
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gamma0Case {
    LevelOne,
    PrimePower { p: u64 },
    TwoPrimes,
}

pub fn gamma0_case(level: u64) -> Result<Gamma0Case, AnalyticError> {
    if level == 0 {
        return Err(AnalyticError::BadLevel);
    }
    if level == 1 {
        return Ok(Gamma0Case::LevelOne);
    }
    let p = (2..=level).find(|d| level % d == 0 && is_prime(*d)).unwrap_or(level);
    let mut n = level;
    while n % p == 0 {
        n /= p;
    }
    Ok(if n == 1 { Gamma0Case::PrimePower { p } } else { Gamma0Case::TwoPrimes })
}

/// Constant term of the closed form: gamma - log(4 pi), -2 log p or 0.
pub fn gamma0_printed_constant(case: Gamma0Case) -> f64 {
    match case {
        Gamma0Case::LevelOne => EULER_GAMMA - (4.0 * PI).ln(),
        Gamma0Case::PrimePower { p } => -2.0 * (p as f64).ln(),
        Gamma0Case::TwoPrimes => 0.0,
    }
}

/// Regular part at s = 0 of E(g, Phi_N, s).
pub fn gamma0_eisenstein_at_zero(z: &UHPoint, level: u64) -> Result<f64, AnalyticError> {
    Ok(eisenstein_phi_at_zero(z, level)?.0)
}

/// The closed form of the level-N limit formula, minus its constant.
fn gamma0_variable_part(z: &UHPoint, level: u64) -> f64 {
    if level == 1 {
        -(6.0 * z.y.ln() + delta_logabs(z)) / 6.0
    } else {
        -delta_level_logabs(z, level) / 6.0
    }
}

pub fn gamma0_klf_residual(z: &UHPoint, level: u64, mode: Gamma0Mode) -> Result<f64, AnalyticError> {
    let case = gamma0_case(level)?;
    let e = gamma0_eisenstein_at_zero(z, level)?;
    match mode {
        Gamma0Mode::Absolute => Ok((e - gamma0_printed_constant(case) - gamma0_variable_part(z, level)).abs()),
        Gamma0Mode::Difference { x2, y2 } => {
            let w = UHPoint::with_digits(x2, y2, z.digits)?;
            let e2 = gamma0_eisenstein_at_zero(&w, level)?;
            Ok(((e - e2) - (gamma0_variable_part(z, level) - gamma0_variable_part(&w, level))).abs())
        }
    }
}

/// Constant actually observed in the level-one formula: E_reg(z, 0) + (1/6) log(y^6 |Delta(z)|).
pub fn gamma0_measured_constant(z: &UHPoint) -> Result<f64, AnalyticError> {
    Ok(level_one_constant(z)? - gamma0_variable_part(z, 1))
}

/// A Schwartz-Bruhat function on the finite adeles supported in Zhat^2 and invariant under
/// N Zhat^2, recorded by its values on (Z/N)^2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchwartzFiniteLevel {
    pub level: u64,
    values: BTreeMap<(u64, u64), f64>,
}

impl SchwartzFiniteLevel {
    pub fn new(level: u64) -> Result<Self, AnalyticError> {
        if level == 0 {
            return Err(AnalyticError::BadLevel);
        }
        Ok(SchwartzFiniteLevel { level, values: BTreeMap::new() })
    }

    /// Characteristic function of Zhat^2.
    pub fn full(level: u64) -> Result<Self, AnalyticError> {
        let mut phi = Self::new(level)?;
        for a in 0..level {
            for b in 0..level {
                phi.set(a as i64, b as i64, 1.0);
            }
        }
        Ok(phi)
    }

    /// Sum over units m of the characteristic functions of (0, m) + N Zhat^2; for N = 1 the
    /// characteristic function of Zhat^2.
    pub fn gamma0(level: u64) -> Result<Self, AnalyticError> {
        if level == 1 {
            return Self::full(1);
        }
        let mut phi = Self::new(level)?;
        for m in 1..level {
            if gcd_u64(m, level) == 1 {
                phi.set(0, m as i64, 1.0);
            }
        }
        Ok(phi)
    }

    pub fn set(&mut self, a: i64, b: i64, value: f64) {
        let n = self.level as i64;
        let key = (a.rem_euclid(n) as u64, b.rem_euclid(n) as u64);
        if value == 0.0 {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
    }

    pub fn get(&self, a: i64, b: i64) -> f64 {
        let n = self.level as i64;
        *self.values.get(&(a.rem_euclid(n) as u64, b.rem_euclid(n) as u64)).unwrap_or(&0.0)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.get(0, 0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&(u64, u64), &f64)> {
        self.values.iter()
    }
}

/// c(Phi, eta, (m,n)) = (1/phi(N)) sum over units r mod N of eta(r) Phi(r m, r n), the Haar integral
/// over GL_1(Zhat) with total mass 1. `eta` is evaluated on units mod N.
pub fn c_coefficient(
    phi: &SchwartzFiniteLevel,
    eta: &dyn Fn(u64) -> Complex64,
    m: i64,
    n: i64,
) -> Complex64 {
    let level = phi.level;
    let mut total = Complex64::new(0.0, 0.0);
    let mut units = 0u64;
    for r in 0..level.max(1) {
        if gcd_u64(r, level) != 1 && level != 1 {
            continue;
        }
        units += 1;
        let r = r as i64;
        total += eta(r as u64) * phi.get(r * m, r * n);
    }
    total / units as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klf_standard_convention() {
        let z = UHPoint::new(0.3, 0.8).unwrap();
        for rv in ResidueVector::all_nonzero(5) {
            let row = klf_row(&z, &rv).unwrap();
            assert!(row.standard_residual < 1e-10, "{rv}: {}", row.standard_residual);
        }
        // the reference values from mpmath
        let rv = ResidueVector::new(5, 1, 2).unwrap();
        let row = klf_row(&z, &rv).unwrap();
        assert!((row.eisenstein - (-0.558_214_231_015_617_1)).abs() < 1e-12);
    }

    #[test]
    fn printed_product_special_cases() {
        let z = UHPoint::new(0.3, 0.8).unwrap();
        let a = siegel_logabs(&z, 0.4, 0.2, SiegelConvention::Printed).unwrap();
        let b = siegel_logabs(&z, -0.4, -0.2, SiegelConvention::Printed).unwrap();
        assert!((a - b).abs() < 1e-13);
        // beta = 0, alpha = 1/2: a pure q-product, checked against 10^4 factors
        let q = Complex64::new(0.0, 2.0 * PI * 0.3).exp() * (-2.0 * PI * 0.8f64).exp();
        let mut direct = -PI * 0.8 * bernoulli2(0.5);
        let mut qn = q;
        for _ in 0..10_000 {
            direct += (Complex64::new(1.0, 0.0) + qn).norm().ln() * 2.0;
            qn *= q;
        }
        let v = siegel_logabs(&z, 0.5, 0.0, SiegelConvention::Printed).unwrap();
        assert!((v - direct).abs() < 1e-12);
        assert!(siegel_logabs(&z, 0.5, 1.5, SiegelConvention::Printed).is_err());
        assert!(siegel_logabs(&z, 1.0, 2.0, SiegelConvention::Standard).is_err());
    }

    #[test]
    fn discriminant_modularity() {
        let z = UHPoint::new(0.3, 0.8).unwrap();
        let a = delta_logabs(&z);
        assert!((delta_logabs(&z.translate(1.0)) - a).abs() < 1e-12);
        let w = z.map(|t| -1.0 / t).unwrap();
        let lhs = delta_logabs(&w);
        let rhs = 12.0 * z.z().norm().ln() + a;
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");
        assert_eq!(delta_level_logabs(&z, 1), a);
    }

    #[test]
    fn gamma0_cases() {
        assert_eq!(gamma0_case(9).unwrap(), Gamma0Case::PrimePower { p: 3 });
        assert_eq!(gamma0_case(6).unwrap(), Gamma0Case::TwoPrimes);
        assert_eq!(gamma0_case(1).unwrap(), Gamma0Case::LevelOne);
        let z = UHPoint::new(0.3, 0.8).unwrap();
        for level in [1, 5, 9, 6, 12] {
            let r = gamma0_klf_residual(&z, level, Gamma0Mode::Absolute).unwrap();
            assert!(r < 1e-10, "{level}: {r}");
            let d = gamma0_klf_residual(&z, level, Gamma0Mode::Difference { x2: -0.1, y2: 1.3 }).unwrap();
            assert!(d < 1e-10, "{level}: {d}");
        }
        let measured = gamma0_measured_constant(&z).unwrap();
        assert!((measured - (EULER_GAMMA - (4.0 * PI).ln())).abs() < 1e-12);
    }

    #[test]
    fn c_coefficients() {
        let trivial = |_: u64| Complex64::new(1.0, 0.0);
        let full = SchwartzFiniteLevel::full(5).unwrap();
        for (m, n) in [(0, 0), (1, 3), (2, 0)] {
            assert!((c_coefficient(&full, &trivial, m, n) - 1.0).norm() < 1e-15);
        }
        let phi = SchwartzFiniteLevel::gamma0(6).unwrap();
        assert_eq!(phi.value_at_zero(), 0.0);
        for m in 0..6 {
            for n in 0..6 {
                let expect = if m == 0 && gcd_u64(n as u64, 6) == 1 { 1.0 } else { 0.0 };
                assert!((c_coefficient(&phi, &trivial, m, n).re - expect).abs() < 1e-15);
            }
        }
        // a nontrivial character mod 5 kills the full function
        let chi = |r: u64| Complex64::new(0.0, PI / 2.0 * [0.0, 0.0, 1.0, 3.0, 2.0][r as usize]).exp();
        assert!(c_coefficient(&full, &chi, 1, 2).norm() < 1e-15);
    }
}
