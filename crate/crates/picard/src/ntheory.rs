//! Small elementary number theory helpers shared by the exact modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp_rational(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        None
    } else {
        Some(vp_int(q.numer(), p) - vp_int(q.denom(), p))
    }
}

/// Distinct prime divisors of |n| by trial division.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut d = 2u64;
    loop {
        let db = BigInt::from(d);
        if &db * &db > m {
            break;
        }
        if (&m % &db).is_zero() {
            out.push(d);
            while (&m % &db).is_zero() {
                m /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        out.push(m.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

/// Legendre symbol (a/p) for odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (d/p) for a discriminant d and prime p.
pub fn kronecker_prime(d: &BigInt, p: u64) -> i8 {
    if p == 2 {
        if d.is_even() {
            return 0;
        }
        let r = d.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        if r == 1 || r == 7 {
            1
        } else {
            -1
        }
    } else {
        legendre(d, p)
    }
}

/// A square root of `n` modulo the odd prime `p` (Tonelli-Shanks); `n` must be a nonzero square.
pub fn sqrt_mod_prime(n: &BigInt, p: u64) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let n = n.mod_floor(&pb);
    if n.is_zero() {
        return Some(BigInt::zero());
    }
    if legendre(&n, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while legendre(&BigInt::from(z), p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = BigInt::from(z).modpow(&BigInt::from(q), &pb);
    let mut t = n.modpow(&BigInt::from(q), &pb);
    let mut r = n.modpow(&BigInt::from((q + 1) / 2), &pb);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % &pb;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % &pb;
        }
        m = i;
        c = (&b * &b) % &pb;
        t = (&t * &c) % &pb;
        r = (&r * &b) % &pb;
    }
    Some(r)
}

/// A root of x^2 = n modulo p^k, for p an odd prime with n a unit square, or p = 2 with
/// n = 1 (mod 8).
pub fn hensel_sqrt(n: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let modulus = pb.pow(k);
    if p == 2 {
        if n.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return None;
        }
        let mut r = BigInt::one();
        // r^2 = n mod 2^j holds for j = 3 at the start
        for j in 3..k {
            let m = BigInt::from(2).pow(j + 1);
            if (&r * &r - n).mod_floor(&m) != BigInt::zero() {
                r += BigInt::from(2).pow(j - 1);
            }
        }
        return Some(r.mod_floor(&modulus));
    }
    let mut r = sqrt_mod_prime(n, p)?;
    if r.is_zero() {
        return None;
    }
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = pb.pow(prec);
        let two_r = (BigInt::from(2) * &r).mod_floor(&m);
        let inv = mod_inverse(&two_r, &m)?;
        let f = (&r * &r - n).mod_floor(&m);
        r = (&r - f * inv).mod_floor(&m);
    }
    Some(r.mod_floor(&modulus))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Hilbert symbol (a, b)_p for nonzero integers.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, p: u64) -> i8 {
    assert!(!a.is_zero() && !b.is_zero());
    let alpha = vp_int(a, p);
    let beta = vp_int(b, p);
    let pb = BigInt::from(p);
    let u = a / pb.pow(alpha as u32);
    let v = b / pb.pow(beta as u32);
    if p != 2 {
        let eps = ((p - 1) / 2) % 2;
        let mut sign: i64 = if (alpha * beta) as u64 % 2 == 1 && eps == 1 { -1 } else { 1 };
        if beta % 2 != 0 {
            sign *= legendre(&u, p) as i64;
        }
        if alpha % 2 != 0 {
            sign *= legendre(&v, p) as i64;
        }
        sign as i8
    } else {
        let eps = |x: &BigInt| -> i64 { ((x.mod_floor(&BigInt::from(4)).to_i64().unwrap() - 1) / 2) % 2 };
        let omega = |x: &BigInt| -> i64 {
            let r = x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
            ((r * r - 1) / 8) % 2
        };
        let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

pub fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut k = 0;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hensel_roots_square_to_target() {
        for (n, p) in [(-3i64, 7u64), (-7, 2), (-3, 13), (-4, 5), (-15, 2)] {
            let nb = BigInt::from(n);
            if let Some(r) = hensel_sqrt(&nb, p, 20) {
                let m = BigInt::from(p).pow(20);
                assert_eq!((&r * &r - &nb).mod_floor(&m), BigInt::zero(), "n={n} p={p}");
            } else {
                assert!(p == 2 && nb.mod_floor(&BigInt::from(8)) != BigInt::one());
            }
        }
    }

    #[test]
    fn hilbert_symbol_matches_conic_search() {
        // (a,b)_p = 1 for all p iff a x^2 + b y^2 = z^2 has a nontrivial rational solution
        let cases = [(2i64, 3i64), (-1, -1), (3, 5), (-1, 2), (5, -1), (7, -3)];
        for (a, b) in cases {
            let (ab, bb) = (BigInt::from(a), BigInt::from(b));
            let mut primes = prime_divisors(&(BigInt::from(2) * &ab * &bb));
            primes.sort();
            let local = primes.iter().all(|&p| hilbert_symbol(&ab, &bb, p) == 1) && (a > 0 || b > 0);
            let mut found = false;
            'outer: for x in 0i64..40 {
                for y in 0i64..40 {
                    if x == 0 && y == 0 {
                        continue;
                    }
                    let t = a * x * x + b * y * y;
                    if t >= 0 {
                        let z = (t as f64).sqrt().round() as i64;
                        if z * z == t {
                            found = true;
                            break 'outer;
                        }
                    }
                }
            }
            assert_eq!(local, found, "({a},{b})");
        }
    }

    #[test]
    fn mobius_values() {
        assert_eq!(
            (1..=10).map(mobius).collect::<Vec<_>>(),
            vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
        );
    }
}
