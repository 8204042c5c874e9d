//! The real-analytic Eisenstein series
//!
//!   E_{w,N}(z,s) = Gamma_R(2s) sum_{(m,n) = w mod N, (m,n) != 0} y^s / |mz+n|^{2s}
//!
//! and its character-twisted partner Ê, continued to all s through the split theta integral.
//! Each half of the split integral is a sum over lattice points of (pi Q)^{-s} Gamma(s, pi Q t0),
//! truncated where a closed Gaussian tail bound drops below the working tolerance.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::special::{expm1_over, upper_gamma};
use super::{AnalyticError, ResidueVector, UHPoint};
use crate::ntheory::{divisors, gcd_u64, mobius};

/// Split point used by the primary expansion of E.
pub const PRIMARY_SPLIT: f64 = 1.0;
/// Split point used for Ê, deliberately different so that the functional equation is a real test.
pub const DUAL_SPLIT: f64 = 1.25;

const POLE_RADIUS: f64 = 1e-6;
const MAX_POINTS: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EisensteinMode {
    Full,
    /// Drop the principal part -1/s at s = 0 (present only for w = 0).
    WithoutPoleAtZero,
    /// Drop the principal part N^{-2}/(s-1) at s = 1.
    WithoutPoleAtOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FeForm {
    /// N^{2s} E(s) = Ê(1-s), which is what the theta-integral derivation yields.
    Normalized,
    /// E(s) = Ê(1-s) with Ê normalized by the same N^{2s} factor as E, as displayed.
    Printed,
}

/// Quadratic form Q(a, b) = |a z + b|^2 / y.
fn q_form(z: &UHPoint, a: f64, b: f64) -> f64 {
    let re = a * z.x + b;
    let im = a * z.y;
    (re * re + im * im) / z.y
}

/// Tail bound for sum over lattice points with Q > r of |(pi Q)^{-s} Gamma(s, pi Q t)|.
fn tail_bound(z: &UHPoint, sigma: f64, t: f64, r: f64) -> f64 {
    let x = PI * r * t;
    let kappa = if sigma > 1.0 {
        if x <= 2.0 * (sigma - 1.0) {
            return f64::INFINITY;
        }
        1.0 / (1.0 - (sigma - 1.0) / x)
    } else {
        1.0
    };
    // points with Q in a unit shell: pi plus a perimeter term
    let a11 = (z.x * z.x + z.y * z.y) / z.y;
    let a22 = 1.0 / z.y;
    let shell = PI + 16.0 * a11.max(a22).sqrt();
    shell * t.powf(sigma) * kappa * (-x).exp()
        / (x * (1.0 - (-PI * t).exp()))
}

fn radius_for(z: &UHPoint, sigma: f64, t: f64, target: f64) -> Result<f64, AnalyticError> {
    let mut r = 1.0;
    loop {
        let b = tail_bound(z, sigma, t, r);
        let points = (PI * r + 16.0 * r.sqrt() * ((z.x * z.x + z.y * z.y + 1.0) / z.y).sqrt()) as usize;
        if b <= target {
            return Ok(r);
        }
        if points > MAX_POINTS {
            return Err(AnalyticError::PrecisionUnreachable { achieved: b, target, points });
        }
        r += 0.25;
    }
}

/// Sum over the shifted lattice (Z + u0) x (Z + v0) minus the origin of (pi Q)^{-s} Gamma(s, pi Q t).
pub fn primal_sum(z: &UHPoint, w0: (f64, f64), s: Complex64, t: f64) -> Result<(Complex64, usize), AnalyticError> {
    lattice_sum(z, w0, s, t, false)
}

/// Sum over Z^2 minus the origin of e^{2 pi i (m v0 - n u0)} (pi Q)^{-s} Gamma(s, pi Q t).
pub fn dual_sum(z: &UHPoint, w0: (f64, f64), s: Complex64, t: f64) -> Result<(Complex64, usize), AnalyticError> {
    lattice_sum(z, w0, s, t, true)
}

fn lattice_sum(
    z: &UHPoint,
    w0: (f64, f64),
    s: Complex64,
    t: f64,
    dual: bool,
) -> Result<(Complex64, usize), AnalyticError> {
    let target = z.tolerance() * 1e-3;
    let r = radius_for(z, s.re, t, target)?;
    let (du, dv) = if dual { (0.0, 0.0) } else { w0 };
    let amax = (r / z.y).sqrt();
    let m_lo = (-amax - du).ceil() as i64;
    let m_hi = (amax - du).floor() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for m in m_lo..=m_hi {
        let a = m as f64 + du;
        let room = z.y * r - a * a * z.y * z.y;
        if room < 0.0 {
            continue;
        }
        let half = room.sqrt();
        let centre = -a * z.x;
        let n_lo = (centre - half - dv).ceil() as i64;
        let n_hi = (centre + half - dv).floor() as i64;
        for n in n_lo..=n_hi {
            let b = n as f64 + dv;
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let q = PI * q_form(z, a, b);
            let term = (-s * q.ln()).exp() * upper_gamma(s, q * t);
            let term = if dual {
                let phase = 2.0 * PI * (m as f64 * w0.1 - n as f64 * w0.0);
                term * Complex64::from_polar(1.0, phase)
            } else {
                term
            };
            total += term;
            count += 1;
        }
    }
    Ok((total, count))
}

fn level_power(n: u64, s: Complex64) -> Complex64 {
    (-2.0 * s * (n as f64).ln()).exp()
}

fn check_pole(s: Complex64, rv: &ResidueVector) -> Result<(), AnalyticError> {
    let near_one = (s - 1.0).norm() < POLE_RADIUS;
    let near_zero = rv.is_zero() && s.norm() < POLE_RADIUS;
    if near_one || near_zero {
        return Err(AnalyticError::NearPole { re: s.re, im: s.im });
    }
    Ok(())
}

/// E_{w,N}(z, s) from the displayed continuation with split point 1.
pub fn eisenstein(z: &UHPoint, s: Complex64, rv: &ResidueVector) -> Result<Complex64, AnalyticError> {
    eisenstein_with(z, s, rv, PRIMARY_SPLIT, EisensteinMode::Full)
}

/// E_{w,N}(z, s) with an arbitrary split point t0 > 0.
///
/// N^{2s} E = -t0^{s-1}/(1-s) - [w=0] t0^s/s + sum Theta-part + sum dual part.
pub fn eisenstein_with(
    z: &UHPoint,
    s: Complex64,
    rv: &ResidueVector,
    t0: f64,
    mode: EisensteinMode,
) -> Result<Complex64, AnalyticError> {
    match mode {
        EisensteinMode::Full => check_pole(s, rv)?,
        EisensteinMode::WithoutPoleAtZero if (s - 1.0).norm() < POLE_RADIUS => {
            return Err(AnalyticError::NearPole { re: s.re, im: s.im })
        }
        EisensteinMode::WithoutPoleAtOne if rv.is_zero() && s.norm() < POLE_RADIUS => {
            return Err(AnalyticError::NearPole { re: s.re, im: s.im })
        }
        _ => {}
    }
    let w0 = rv.w0();
    let one = Complex64::new(1.0, 0.0);
    let (a, _) = primal_sum(z, w0, s, t0)?;
    let (b, _) = dual_sum(z, w0, one - s, 1.0 / t0)?;
    let nl = rv.level;
    let c = t0.ln() - 2.0 * (nl as f64).ln();
    let scale_n2 = 1.0 / (nl * nl) as f64;
    // regular parts of the two elementary terms
    let mut value = level_power(nl, s) * (a + b) + scale_n2 * expm1_over(Complex64::new(c, 0.0), s - 1.0);
    if rv.is_zero() {
        value -= expm1_over(Complex64::new(c, 0.0), s);
    }
    if mode != EisensteinMode::WithoutPoleAtOne {
        value += scale_n2 / (s - 1.0);
    }
    if mode != EisensteinMode::WithoutPoleAtZero && rv.is_zero() {
        value -= one / s;
    }
    Ok(value)
}

/// Ê_{w,N}(z, s), the Eisenstein series twisted by e^{2 pi i <(m,n), w0>}, from its own expansion.
pub fn eisenstein_dual(z: &UHPoint, s: Complex64, rv: &ResidueVector) -> Result<Complex64, AnalyticError> {
    eisenstein_dual_with(z, s, rv, DUAL_SPLIT, EisensteinMode::Full)
}

/// Ê(s) = -T^s/s - [w=0] T^{s-1}/(1-s) + dual part from T + Theta part from 1/T.
pub fn eisenstein_dual_with(
    z: &UHPoint,
    s: Complex64,
    rv: &ResidueVector,
    t: f64,
    mode: EisensteinMode,
) -> Result<Complex64, AnalyticError> {
    let one = Complex64::new(1.0, 0.0);
    let near_zero = s.norm() < POLE_RADIUS && mode != EisensteinMode::WithoutPoleAtZero;
    let near_one = rv.is_zero() && (s - 1.0).norm() < POLE_RADIUS && mode != EisensteinMode::WithoutPoleAtOne;
    if near_zero || near_one {
        return Err(AnalyticError::NearPole { re: s.re, im: s.im });
    }
    let w0 = rv.w0();
    let (b, _) = dual_sum(z, w0, s, t)?;
    let (a, _) = primal_sum(z, w0, one - s, 1.0 / t)?;
    let lt = Complex64::new(t.ln(), 0.0);
    let mut value = a + b - expm1_over(lt, s);
    if rv.is_zero() {
        value += expm1_over(lt, s - 1.0);
    }
    if mode != EisensteinMode::WithoutPoleAtZero {
        value -= one / s;
    }
    if mode != EisensteinMode::WithoutPoleAtOne && rv.is_zero() {
        value += one / (s - 1.0);
    }
    Ok(value)
}

/// |LHS - RHS| of the functional equation between E(s) and Ê(1-s).
pub fn functional_equation_residual(
    z: &UHPoint,
    s: Complex64,
    rv: &ResidueVector,
    form: FeForm,
) -> Result<f64, AnalyticError> {
    let one = Complex64::new(1.0, 0.0);
    let e = eisenstein(z, s, rv)?;
    let dual = eisenstein_dual(z, one - s, rv)?;
    let n = rv.level;
    Ok(match form {
        FeForm::Normalized => (e / level_power(n, s) - dual).norm(),
        FeForm::Printed => (e - dual * level_power(n, one - s)).norm(),
    })
}

/// Constant term at s = 0 of the level-one series: lim (E(z,s) + 1/s).
pub fn level_one_constant(z: &UHPoint) -> Result<f64, AnalyticError> {
    let rv = ResidueVector::new(1, 0, 0)?;
    Ok(eisenstein_with(z, Complex64::new(0.0, 0.0), &rv, PRIMARY_SPLIT, EisensteinMode::WithoutPoleAtZero)?.re)
}

/// Level-one series E(z, s) = E_{0,1}(z, s).
pub fn eisenstein_level_one(z: &UHPoint, s: Complex64) -> Result<Complex64, AnalyticError> {
    eisenstein(z, s, &ResidueVector::new(1, 0, 0)?)
}

/// E(g, Phi_N, s) through N^{-s} sum_{d | N} mu(d) d^{-s} E(Nz/d, s).
pub fn eisenstein_phi_level(z: &UHPoint, s: Complex64, level: u64) -> Result<Complex64, AnalyticError> {
    if level == 0 {
        return Err(AnalyticError::BadLevel);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for d in divisors(level) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let w = z.scale(level as f64 / d as f64);
        let factor = (-s * ((level * d) as f64).ln()).exp();
        total += mu as f64 * factor * eisenstein_level_one(&w, s)?;
    }
    Ok(total)
}

/// E(g, Phi_N, s) as the sum of E_{(0,n),N} over units n mod N.
pub fn eisenstein_phi_classes(z: &UHPoint, s: Complex64, level: u64) -> Result<Complex64, AnalyticError> {
    if level == 0 {
        return Err(AnalyticError::BadLevel);
    }
    if level == 1 {
        return eisenstein_level_one(z, s);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for n in 1..level {
        if gcd_u64(n, level) == 1 {
            total += eisenstein(z, s, &ResidueVector::new(level, 0, n as i64)?)?;
        }
    }
    Ok(total)
}

/// Regular part at s = 0 of E(g, Phi_N, s), together with the coefficient of 1/s.
pub fn eisenstein_phi_at_zero(z: &UHPoint, level: u64) -> Result<(f64, f64), AnalyticError> {
    if level == 0 {
        return Err(AnalyticError::BadLevel);
    }
    let mut regular = 0.0;
    let mut polar = 0.0;
    for d in divisors(level) {
        let mu = mobius(d) as f64;
        if mu == 0.0 {
            continue;
        }
        let w = z.scale(level as f64 / d as f64);
        // (Nd)^{-s}(-1/s + C) = -1/s + log(Nd) + C + O(s)
        regular += mu * (((level * d) as f64).ln() + level_one_constant(&w)?);
        polar -= mu;
    }
    Ok((regular, polar))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn matches_mpmath_reference() {
        // mpmath theta-split evaluation, 30 digits
        let z = UHPoint::new(0.3, 0.8).unwrap();
        let rv = ResidueVector::new(3, 1, 0).unwrap();
        let v = eisenstein(&z, c(2.0), &rv).unwrap();
        assert!((v.re - 0.134_410_713_456_786_6).abs() < 1e-13, "{v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn split_point_independence() {
        let z = UHPoint::new(-0.25, 2.0).unwrap();
        for rv in [ResidueVector::new(5, 2, 3).unwrap(), ResidueVector::new(1, 0, 0).unwrap()] {
            for s in [Complex64::new(0.3, 0.0), Complex64::new(0.7, 0.2), Complex64::new(1.6, -0.4)] {
                let a = eisenstein_with(&z, s, &rv, 1.0, EisensteinMode::Full).unwrap();
                let b = eisenstein_with(&z, s, &rv, 0.6, EisensteinMode::Full).unwrap();
                assert!((a - b).norm() < 1e-12, "{rv} {s}: {a} {b}");
            }
        }
    }

    #[test]
    fn symmetries() {
        let z = UHPoint::new(0.3, 0.8).unwrap();
        let s = Complex64::new(0.4, 0.3);
        for rv in ResidueVector::all_nonzero(5) {
            let a = eisenstein(&z, s, &rv).unwrap();
            let b = eisenstein(&z, s, &rv.neg()).unwrap();
            let t = eisenstein(&z.translate(5.0), s, &rv).unwrap();
            assert!((a - b).norm() < 1e-12);
            assert!((a - t).norm() < 1e-12);
        }
    }

    #[test]
    fn pole_handling() {
        let z = UHPoint::i();
        let rv = ResidueVector::new(3, 1, 1).unwrap();
        assert!(matches!(eisenstein(&z, c(1.0 + 1e-8), &rv), Err(AnalyticError::NearPole { .. })));
        let zero = ResidueVector::new(1, 0, 0).unwrap();
        assert!(eisenstein(&z, c(1e-9), &zero).is_err());
        // subtracted value is continuous across the pole
        let at = eisenstein_with(&z, c(1.0), &rv, 1.0, EisensteinMode::WithoutPoleAtOne).unwrap();
        let near = eisenstein_with(&z, c(1.0 + 1e-4), &rv, 1.0, EisensteinMode::WithoutPoleAtOne).unwrap();
        assert!((at - near).norm() < 1e-3);
    }

    #[test]
    fn level_one_constant_matches_reference() {
        // mpmath value of lim (E + 1/s) at z = 0.3 + 0.8i
        let z = UHPoint::new(0.3, 0.8).unwrap();
        assert!((level_one_constant(&z).unwrap() - (-0.901_225_107_988_367_9)).abs() < 1e-13);
    }

    #[test]
    fn level_change_identity_at_convergent_s() {
        let z = UHPoint::new(0.1, 0.9).unwrap();
        for level in [3, 4, 6] {
            let a = eisenstein_phi_level(&z, c(1.3), level).unwrap();
            let b = eisenstein_phi_classes(&z, c(1.3), level).unwrap();
            assert!((a - b).norm() < 1e-10, "{level}: {a} {b}");
        }
    }
}
