//! The classical Whittaker function W_{0,0}, the Mellin identity behind the archimedean integral,
//! the complex Gamma factor and the archimedean factor of the fine regulator formula.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::special::{bessel_k0, bessel_k0_scaled, gamma};
use super::AnalyticError;

/// W_{0,0}(y) together with an underflow flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WhittakerValue {
    pub value: f64,
    pub underflow: bool,
}

/// W_{0,0}(y) = sqrt(y/pi) K_0(y/2).
pub fn whittaker_w00(y: f64) -> Result<WhittakerValue, AnalyticError> {
    if !(y > 0.0) {
        return Err(AnalyticError::NonPositive);
    }
    let scaled = whittaker_w00_scaled(y)?;
    let log = scaled.ln() - y / 2.0;
    if log < -745.0 {
        return Ok(WhittakerValue { value: 0.0, underflow: true });
    }
    let value = if y <= 4.0 { (y / PI).sqrt() * bessel_k0(y / 2.0) } else { scaled * (-y / 2.0).exp() };
    Ok(WhittakerValue { value, underflow: false })
}

/// W_{0,0}(y) e^{y/2}, which tends to 1 as y grows.
pub fn whittaker_w00_scaled(y: f64) -> Result<f64, AnalyticError> {
    if !(y > 0.0) {
        return Err(AnalyticError::NonPositive);
    }
    Ok((y / PI).sqrt() * bessel_k0_scaled(y / 2.0))
}

/// Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
pub fn gamma_c(s: Complex64) -> Complex64 {
    2.0 * (-s * (2.0 * PI).ln()).exp() * gamma(s)
}

/// b = 32 pi^2 D^{-3/2}.
pub fn default_b(disc: u64) -> f64 {
    32.0 * PI * PI * (disc as f64).powf(-1.5)
}

/// The point 8 sqrt(2) pi D^{-3/4} at which W_{0,0} is normalised.
pub fn whittaker_point(disc: u64) -> f64 {
    8.0 * 2f64.sqrt() * PI * (disc as f64).powf(-0.75)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MellinKernel {
    /// t^{7/2} W_{0,0}(sqrt(b) t).
    SqrtB,
    /// t^{7/2} W_{0,0}(2 sqrt(b) t) = t^{7/2} W_{0,0}(8 sqrt(2) pi D^{-3/4} t).
    TwoSqrtB,
    /// (b^2/4) t^4 K_0(sqrt(b) t), the normalisation for which the closed form holds exactly.
    Normalized,
}

impl MellinKernel {
    fn eval(&self, t: f64, b: f64) -> f64 {
        let rb = b.sqrt();
        match self {
            MellinKernel::SqrtB => t.powf(3.5) * w00_unchecked(rb * t),
            MellinKernel::TwoSqrtB => t.powf(3.5) * w00_unchecked(2.0 * rb * t),
            MellinKernel::Normalized => b * b / 4.0 * t.powi(4) * bessel_k0(rb * t),
        }
    }

    fn decay_rate(&self, b: f64) -> f64 {
        match self {
            MellinKernel::SqrtB => b.sqrt() / 2.0,
            MellinKernel::TwoSqrtB | MellinKernel::Normalized => b.sqrt(),
        }
    }
}

fn w00_unchecked(y: f64) -> f64 {
    whittaker_w00(y).map(|w| w.value).unwrap_or(0.0)
}

/// (sqrt(b)/2)^{-s} Gamma(s/2 + 2)^2.
pub fn ko_closed_form(s: Complex64, b: f64) -> Complex64 {
    let g = gamma(s / 2.0 + 2.0);
    (-s * (b.sqrt() / 2.0).ln()).exp() * g * g
}

/// int_0^inf kernel(t) t^s dt/t by double-exponential quadrature.
pub fn ko_mellin_integral(s: Complex64, b: f64, kernel: MellinKernel) -> Result<Complex64, AnalyticError> {
    if s.re <= -4.0 {
        return Err(AnalyticError::Case("the Mellin integral needs Re(s) > -4".into()));
    }
    if !(b > 0.0) {
        return Err(AnalyticError::NonPositive);
    }
    let rate = kernel.decay_rate(b);
    let end = (120.0 + 4.0 * (s.re + 4.0).max(1.0) * (1.0 + (s.re + 4.0).max(1.0).ln())) / rate;
    let pieces = [0.0, 1.0 / rate, 4.0 / rate, 16.0 / rate, end];
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pieces.windows(2) {
        let re = quadrature::double_exponential::integrate(
            |t| kernel.eval(t, b) * (s.re - 1.0).mul_add(t.ln(), 0.0).exp() * (s.im * t.ln()).cos(),
            w[0],
            w[1],
            1e-15,
        );
        let im = quadrature::double_exponential::integrate(
            |t| kernel.eval(t, b) * (s.re - 1.0).mul_add(t.ln(), 0.0).exp() * (s.im * t.ln()).sin(),
            w[0],
            w[1],
            1e-15,
        );
        total += Complex64::new(re.integral, im.integral);
        err += re.error_estimate + im.error_estimate;
    }
    if !total.re.is_finite() || err > 1e-6 * total.norm().max(1e-300) {
        return Err(AnalyticError::Quadrature(err));
    }
    Ok(total)
}

/// Relative error |integral - closed form| / |closed form|.
pub fn ko_mellin_residual(s: Complex64, b: f64, kernel: MellinKernel) -> Result<f64, AnalyticError> {
    let closed = ko_closed_form(s, b);
    Ok((ko_mellin_integral(s, b, kernel)? - closed).norm() / closed.norm())
}

/// Ratio integral / closed form, constant in s exactly when the kernel is a multiple of the
/// normalised one.
pub fn ko_mellin_ratio(s: Complex64, b: f64, kernel: MellinKernel) -> Result<Complex64, AnalyticError> {
    Ok(ko_mellin_integral(s, b, kernel)? / ko_closed_form(s, b))
}

/// 8 i W_{0,0}(8 sqrt(2) pi D^{-3/4})^{-1} pi^4 D^{(3s-3)/2} Gamma_C(s) Gamma_C(s+1)^2.
pub fn arch_factor(s: Complex64, disc: u64) -> Result<Complex64, AnalyticError> {
    for k in 0..64 {
        if (s + k as f64).norm() < 1e-12 {
            return Err(AnalyticError::NearPole { re: s.re, im: s.im });
        }
    }
    let w = whittaker_w00(whittaker_point(disc))?.value;
    let d = disc as f64;
    let gc1 = gamma_c(s + 1.0);
    Ok(Complex64::new(0.0, 8.0) / w
        * PI.powi(4)
        * ((3.0 * s - 3.0) / 2.0 * d.ln()).exp()
        * gamma_c(s)
        * gc1
        * gc1)
}

/// The right-hand side of the fine regulator formula as displayed:
/// W * 8 i W_{0,0}(8 sqrt(2) pi D^{-3/4})^{-1} pi^4 D^{-3/2} prod (1 - alpha_p) L'(0).
pub fn assemble_rhs(disc: u64, alpha_ps: &[Complex64], lprime0: f64, w_period: Complex64) -> Result<Complex64, AnalyticError> {
    let w = whittaker_w00(whittaker_point(disc))?.value;
    let product: Complex64 = alpha_ps.iter().map(|a| 1.0 - a).product();
    Ok(w_period * Complex64::new(0.0, 8.0) / w * PI.powi(4) * (disc as f64).powf(-1.5) * product * lprime0)
}

/// Residue of Gamma_C at s = 0, namely 2.
pub const GAMMA_C_RESIDUE: f64 = 2.0;

/// lim_{s -> 0} s * arch_factor(s), the archimedean contribution at s = 0 when L vanishes
/// to first order: 8 i W^{-1} pi^4 D^{-3/2} Res Gamma_C Gamma_C(1)^2.
pub fn arch_factor_limit(disc: u64) -> Result<Complex64, AnalyticError> {
    let w = whittaker_w00(whittaker_point(disc))?.value;
    let gc1 = gamma_c(Complex64::new(1.0, 0.0));
    Ok(Complex64::new(0.0, 8.0) / w * PI.powi(4) * (disc as f64).powf(-1.5) * GAMMA_C_RESIDUE * gc1 * gc1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn whittaker_reference_values() {
        // mpmath whitw(0, 0, y)
        for (y, expect) in [(1.0, 0.521_547_610_819_54), (0.2, 0.612_381_678_941_341), (10.0, 0.006_585_377_552_856_71)] {
            let got = whittaker_w00(y).unwrap().value;
            assert!(((got - expect) / expect).abs() < 1e-12, "{y}: {got}");
        }
        assert!(whittaker_w00(5000.0).unwrap().underflow);
        assert!(whittaker_w00(0.0).is_err());
        let far = whittaker_w00_scaled(1e6).unwrap();
        assert!((far - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gamma_c_values() {
        assert!((gamma_c(c(1.0)) - c(1.0 / PI)).norm() < 1e-15);
        let mut last = f64::INFINITY;
        for k in 1..=6 {
            let s = 10f64.powi(-k);
            let r = (s * gamma_c(c(s)) - GAMMA_C_RESIDUE).norm();
            assert!(r < last);
            last = r;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn mellin_normalizations() {
        let b = default_b(3);
        for s in [1.0, 2.0, 3.5] {
            assert!(ko_mellin_residual(c(s), b, MellinKernel::Normalized).unwrap() < 1e-10);
        }
        let r1 = ko_mellin_ratio(c(1.0), b, MellinKernel::TwoSqrtB).unwrap();
        let r2 = ko_mellin_ratio(c(3.5), b, MellinKernel::TwoSqrtB).unwrap();
        assert!((r1 - r2).norm() < 1e-10 * r1.norm());
        let q1 = ko_mellin_ratio(c(1.0), b, MellinKernel::SqrtB).unwrap();
        let q2 = ko_mellin_ratio(c(2.0), b, MellinKernel::SqrtB).unwrap();
        assert!((q2 / q1 - 2.0).norm() < 1e-10);
        // closed form at s = 2 is 16 / b
        assert!((ko_closed_form(c(2.0), b) - c(16.0 / b)).norm() < 1e-13);
    }

    #[test]
    fn assemble_matches_printed_constant() {
        let v = assemble_rhs(3, &[], 1.0, c(1.0)).unwrap();
        let w = whittaker_w00(8.0 * 2f64.sqrt() * PI * 3f64.powf(-0.75)).unwrap().value;
        let expect = Complex64::new(0.0, 8.0) / w * PI.powi(4) * 3f64.powf(-1.5);
        assert!((v - expect).norm() < 1e-12 * expect.norm());
        let lim = arch_factor_limit(3).unwrap();
        let s = 1e-7;
        let near = arch_factor(c(s), 3).unwrap() * s;
        assert!((near - lim).norm() < 1e-5 * lim.norm());
        assert!((lim * PI * PI / GAMMA_C_RESIDUE - v).norm() < 1e-12 * v.norm());
    }
}
