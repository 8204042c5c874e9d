//! Independent reference computations used to cross-check the analytic kernels. None of them
//! shares code with the theta-integral machinery they are compared against.

use std::f64::consts::PI;

use crate::analytic::special::{bernoulli2, gamma_real};
use crate::analytic::{AnalyticError, ResidueVector, UHPoint};

const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta sum_{k>=0} (k + a)^{-s} for real s > 1 and a > 0, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0);
    let n = 24;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + n as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        if j > 1 {
            rising *= (s + (2 * j - 3) as f64) * (s + (2 * j - 2) as f64);
            fact *= ((2 * j - 1) * (2 * j)) as f64;
            pow /= x * x;
        }
        sum += b / fact * rising * pow;
    }
    sum
}

/// sum over u = c + N k > bound (k integer) of u^{-sigma}.
fn residue_tail(sigma: f64, c: f64, level: f64, bound: f64) -> f64 {
    // smallest k with c + N k > bound
    let k0 = ((bound - c) / level).floor() + 1.0;
    level.powf(-sigma) * hurwitz_zeta(sigma, k0 + c / level)
}

/// sum over n = w2 mod N of ((n + shift)^2 + h^2)^{-s}, h > 0: direct terms for |n + shift| <= L and
/// binomial tails beyond.
fn row_sum(s: f64, shift: f64, h: f64, w2: f64, level: f64) -> f64 {
    let l = 8.0 * h + 60.0 * level;
    let c = w2 + shift;
    let mut total = 0.0;
    let k_lo = ((-l - c) / level).ceil() as i64;
    let k_hi = ((l - c) / level).floor() as i64;
    for k in k_lo..=k_hi {
        let u = c + level * k as f64;
        total += (u * u + h * h).powf(-s);
    }
    // both tails: u > L along c + N k, and |u| > L along -c + N k
    let mut binom = 1.0;
    let mut h2j = 1.0;
    for j in 0..40 {
        if j > 0 {
            binom *= (-s - (j - 1) as f64) / j as f64;
            h2j *= h * h;
        }
        let sigma = 2.0 * s + 2.0 * j as f64;
        let term = binom * h2j * (residue_tail(sigma, c, level, l) + residue_tail(sigma, -c, level, l));
        total += term;
        if term.abs() < 1e-20 * total.abs() {
            break;
        }
    }
    total
}

/// Gamma_R(2s) sum y^s |mz+n|^{-2s} over (m,n) = w mod N, (m,n) != 0, for real s > 1.
///
/// Rows |m| <= M are summed directly (with binomial tails in n); rows beyond M are replaced by
/// their leading Poisson term, the remainder being below e^{-2 pi M y / N}.
pub fn lattice_sum_eisenstein(z: &UHPoint, s: f64, rv: &ResidueVector) -> Result<f64, AnalyticError> {
    if s <= 1.0 {
        return Err(AnalyticError::Case("the lattice sum converges only for s > 1".into()));
    }
    let level = rv.level as f64;
    let (w1, w2) = (rv.w.0 as f64, rv.w.1 as f64);
    let m_max = (46.0 * level / (2.0 * PI * z.y)).ceil().max(2.0) as i64;
    let mut total = 0.0;
    // row m = 0
    if rv.w.0 == 0 {
        if rv.w.1 == 0 {
            total += 2.0 * level.powf(-2.0 * s) * hurwitz_zeta(2.0 * s, 1.0);
        } else {
            total += level.powf(-2.0 * s) * (hurwitz_zeta(2.0 * s, w2 / level) + hurwitz_zeta(2.0 * s, 1.0 - w2 / level));
        }
    }
    let n = rv.level as i64;
    for m in -m_max..=m_max {
        if m == 0 || (m - rv.w.0 as i64).rem_euclid(n) != 0 {
            continue;
        }
        let mf = m as f64;
        total += row_sum(s, mf * z.x, mf.abs() * z.y, w2, level);
    }
    // rows |m| > M: (1/N) sqrt(pi) Gamma(s - 1/2)/Gamma(s) (|m| y)^{1-2s}
    let lead = PI.sqrt() * gamma_real(s - 0.5) / gamma_real(s) / level * z.y.powf(1.0 - 2.0 * s);
    let sigma = 2.0 * s - 1.0;
    let bound = m_max as f64;
    total += lead * (residue_tail(sigma, w1, level, bound) + residue_tail(sigma, -w1, level, bound));
    Ok(PI.powf(-s) * gamma_real(s) * z.y.powf(s) * total)
}

/// W_{0,0}(y) from the integral representation
/// W_{0,0}(y) = sqrt(y/pi) e^{-y/2} int_0^inf e^{-y t} t^{-1/2} (1+t)^{-1/2} dt, with t = u^2.
pub fn whittaker_w00_integral(y: f64) -> Result<f64, AnalyticError> {
    if !(y > 0.0) {
        return Err(AnalyticError::NonPositive);
    }
    let end = (60.0 / y).sqrt();
    let f = |u: f64| 2.0 * (-y * u * u).exp() / (1.0 + u * u).sqrt();
    let mut total = 0.0;
    let mut err = 0.0;
    let cuts = [0.0, end / 8.0, end / 2.0, end];
    for w in cuts.windows(2) {
        let out = quadrature::double_exponential::integrate(f, w[0], w[1], 1e-16);
        total += out.integral;
        err += out.error_estimate;
    }
    if err > 1e-12 * total {
        return Err(AnalyticError::Quadrature(err));
    }
    Ok((y / PI).sqrt() * (-y / 2.0).exp() * total)
}

/// log|q^{B2(alpha)/2} prod_{n=1}^{terms} (1 - q^n q_z)(1 - q^n/q_z)| with q_z = e^{2 pi i (alpha - beta z)},
/// multiplied out factor by factor.
pub fn siegel_direct_product(z: &UHPoint, alpha: f64, beta: f64, terms: usize) -> f64 {
    use num_complex::Complex64;
    let zc = z.z();
    let q = (Complex64::new(0.0, 2.0 * PI) * zc).exp();
    let qz = (Complex64::new(0.0, 2.0 * PI) * (Complex64::new(alpha, 0.0) - beta * zc)).exp();
    let mut log = -PI * z.y * bernoulli2(alpha);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..terms {
        qn *= q;
        log += (1.0 - qn * qz).norm().ln() + (1.0 - qn / qz).norm().ln();
    }
    log
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_values() {
        // zeta(2) and zeta(2.4, 1/3) from mpmath
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((hurwitz_zeta(2.4, 1.0 / 3.0) - 14.762_294_909_672_344).abs() < 1e-12);
    }

    #[test]
    fn lattice_sum_reference() {
        // mpmath brute force with tail, z = 0.3 + 0.8i, N = 3, w = (1, 0), s = 2
        let z = UHPoint::new(0.3, 0.8).unwrap();
        let rv = ResidueVector::new(3, 1, 0).unwrap();
        let v = lattice_sum_eisenstein(&z, 2.0, &rv).unwrap();
        assert!((v - 0.134_410_713_456_786_6).abs() < 1e-13, "{v}");
    }

    #[test]
    fn whittaker_integral_reference() {
        let v = whittaker_w00_integral(1.0).unwrap();
        assert!((v - 0.521_547_610_819_54).abs() < 1e-13);
    }
}
