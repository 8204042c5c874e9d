//! Exact multivariate Laurent polynomials over Q, rational functions, and truncated power
//! series in one distinguished variable (X by default).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::quadfield::Rational;

pub const MAX_VARS: usize = 16;

const STANDARD_VARS: [&str; 12] = ["X", "a", "b", "a1", "a2", "a3", "am", "n1", "n2", "p", "h", "c"];

fn interner() -> &'static RwLock<Vec<String>> {
    static NAMES: OnceLock<RwLock<Vec<String>>> = OnceLock::new();
    NAMES.get_or_init(|| RwLock::new(STANDARD_VARS.iter().map(|s| s.to_string()).collect()))
}

/// An interned variable name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

impl Var {
    pub fn new(name: &str) -> Var {
        {
            let names = interner().read().unwrap();
            if let Some(i) = names.iter().position(|n| n == name) {
                return Var(i as u8);
            }
        }
        let mut names = interner().write().unwrap();
        if let Some(i) = names.iter().position(|n| n == name) {
            return Var(i as u8);
        }
        assert!(names.len() < MAX_VARS, "too many distinct variables");
        names.push(name.to_string());
        Var((names.len() - 1) as u8)
    }

    pub fn name(&self) -> String {
        interner().read().unwrap()[self.0 as usize].clone()
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

/// The default series variable X = p^{-s}.
pub fn x_var() -> Var {
    Var::new("X")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("denominator constant term in {0} is not a unit")]
    NonInvertible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative power of {0} cannot be expanded as a power series")]
    NegativePower(String),
    #[error("no rational function with numerator degree <= {num} and denominator degree <= {den} fits the series")]
    NoSolution { num: usize, den: usize },
    #[error("series order {order} too small for degree bounds ({num}, {den})")]
    OrderTooSmall { order: usize, num: usize, den: usize },
    #[error("substitution for {0} must be a unit to invert it")]
    NonUnitSubstitution(String),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Exponent vector over the interned variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial([i16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(v: Var, e: i32) -> Self {
        let mut m = Monomial::one();
        m.0[v.index()] = e as i16;
        m
    }

    pub fn from_pairs(pairs: &[(Var, i32)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            m.0[v.index()] += e as i16;
        }
        m
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.0[v.index()] as i32
    }

    pub fn with_exp(&self, v: Var, e: i32) -> Self {
        let mut m = *self;
        m.0[v.index()] = e as i16;
        m
    }

    pub fn mul(&self, o: &Monomial) -> Self {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.0[i] += o.0[i];
        }
        m
    }

    pub fn div(&self, o: &Monomial) -> Self {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.0[i] -= o.0[i];
        }
        m
    }

    pub fn inv(&self) -> Self {
        Monomial::one().div(self)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (Var(i as u8), e as i32))
    }

    fn render(&self) -> String {
        let x = x_var();
        let mut parts: Vec<(bool, String, i32)> = self.vars().map(|(v, e)| (v == x, v.name(), e)).collect();
        parts.sort();
        parts
            .into_iter()
            .map(|(_, n, e)| if e == 1 { n } else { format!("{n}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Sparse Laurent polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        LaurentPoly::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        LaurentPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn var(name: &str) -> Self {
        LaurentPoly::term(Rational::one(), Monomial::var(Var::new(name), 1))
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        LaurentPoly::term(Rational::one(), Monomial::var(v, e))
    }

    /// Product of named variables raised to powers, e.g. `monomial(&[("a", 1), ("b", -2)])`.
    pub fn monomial(pairs: &[(&str, i32)]) -> Self {
        let pairs: Vec<(Var, i32)> = pairs.iter().map(|&(n, e)| (Var::new(n), e)).collect();
        LaurentPoly::term(Rational::one(), Monomial::from_pairs(&pairs))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_monomial().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.as_monomial() {
            Some((m, c)) if m.is_one() => Some(c.clone()),
            None if self.is_zero() => Some(Rational::zero()),
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(Monomial, &Rational)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c))
        } else {
            None
        }
    }

    /// A nonzero constant times a monomial: exactly the invertible elements.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn inv_unit(&self) -> Option<Self> {
        let (m, c) = self.as_monomial()?;
        Some(LaurentPoly::term(c.recip(), m.inv()))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x.clone())).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = LaurentPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Integer power, negative exponents allowed for units only.
    pub fn powi(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            Some(self.inv_unit()?.pow((-e) as u32))
        }
    }

    pub fn min_exp(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exp(v)).min()
    }

    pub fn max_exp(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exp(v)).max()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out.sort();
        out
    }

    /// Split by powers of `v`: self = sum_k coeffs[k] * v^k with coeffs free of v.
    pub fn coefficients_in(&self, v: Var) -> BTreeMap<i32, LaurentPoly> {
        let mut out: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.exp(v);
            out.entry(k).or_default().add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn exponent_box(&self) -> ([i32; MAX_VARS], [i32; MAX_VARS]) {
        let mut lo = [i32::MAX; MAX_VARS];
        let mut hi = [i32::MIN; MAX_VARS];
        for m in self.terms.keys() {
            for i in 0..MAX_VARS {
                lo[i] = lo[i].min(m.0[i] as i32);
                hi[i] = hi[i].max(m.0[i] as i32);
            }
        }
        (lo, hi)
    }

    /// Exact quotient self / d, or `None` when d does not divide self.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        if let Some(inv) = d.inv_unit() {
            return Some(self * &inv);
        }
        let (slo, shi) = self.exponent_box();
        let (dlo, dhi) = d.exponent_box();
        let mut qlo = [0; MAX_VARS];
        let mut qhi = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            qlo[i] = slo[i] - dlo[i];
            qhi[i] = shi[i] - dhi[i];
            if qlo[i] > qhi[i] {
                return None;
            }
        }
        let (dlm, dlc) = d.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let mut r = self.clone();
        let mut q = LaurentPoly::zero();
        while let Some((rlm, rlc)) = r.leading().map(|(m, c)| (*m, c.clone())) {
            let qm = rlm.div(&dlm);
            if (0..MAX_VARS).any(|i| (qm.0[i] as i32) < qlo[i] || (qm.0[i] as i32) > qhi[i]) {
                return None;
            }
            let qc = rlc / &dlc;
            r = &r - &d.mul_term(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Substitute variables by Laurent polynomials; negative powers need unit images.
    pub fn substitute(&self, assignments: &HashMap<Var, LaurentPoly>) -> Result<LaurentPoly, SymError> {
        let mut cache: HashMap<(Var, i32), LaurentPoly> = HashMap::new();
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = LaurentPoly::constant(c.clone());
            for (v, e) in m.vars() {
                match assignments.get(&v) {
                    None => kept = kept.mul(&Monomial::var(v, e)),
                    Some(img) => {
                        if !cache.contains_key(&(v, e)) {
                            let p = img.powi(e).ok_or_else(|| SymError::NonUnitSubstitution(v.name()))?;
                            cache.insert((v, e), p);
                        }
                        acc = &acc * &cache[&(v, e)];
                    }
                }
            }
            out = &out + &acc.mul_monomial(&kept);
        }
        Ok(out)
    }

    /// Numeric evaluation at complex points for all variables present.
    pub fn eval_complex(&self, values: &HashMap<Var, num_complex::Complex64>) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = num_complex::Complex64::new(c.to_f64().unwrap(), 0.0);
            for (v, e) in m.vars() {
                let x = values.get(&v).unwrap_or_else(|| panic!("no value for {}", v.name()));
                t *= x.powi(e);
            }
            acc += t;
        }
        acc
    }

    /// Parse the rendering produced by `Display`, e.g. "1 - a*b*X + 1/2*a^-1*X^2".
    pub fn parse(s: &str) -> Result<Self, SymError> {
        let err = || SymError::Parse(s.to_string());
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        let mut out = LaurentPoly::zero();
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let chars: Vec<char> = cleaned.chars().collect();
        for (i, &ch) in chars.iter().enumerate() {
            let prev_caret = i > 0 && chars[i - 1] == '^';
            if (ch == '+' || ch == '-') && !prev_caret {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(err());
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err());
        }
        pieces.push((neg, cur));
        for (neg, piece) in pieces {
            let mut coeff = Rational::one();
            let mut mono = Monomial::one();
            for factor in piece.split('*') {
                if factor.is_empty() {
                    return Err(err());
                }
                if factor.chars().next().unwrap().is_ascii_digit() {
                    coeff *= crate::quadfield::parse_rational(factor).map_err(|_| err())?;
                } else {
                    let (name, e) = match factor.split_once('^') {
                        Some((n, e)) => (n, e.parse::<i32>().map_err(|_| err())?),
                        None => (factor, 1),
                    };
                    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(err());
                    }
                    mono = mono.mul(&Monomial::var(Var::new(name), e));
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }

    fn render_key(m: &Monomial) -> (i32, Vec<(String, i32)>) {
        let x = x_var();
        let mut parts: Vec<(String, i32)> =
            m.vars().filter(|(v, _)| *v != x).map(|(v, e)| (v.name(), -e)).collect();
        parts.sort();
        (m.exp(x), parts)
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical order: ascending power of X, then lexicographic in the remaining variables
    /// sorted by name, higher exponents first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by_cached_key(|(m, _)| LaurentPoly::render_key(m));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = m.render();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let (mut big, small) = if self.len() >= rhs.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(*m, c.clone());
        }
        big
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * rhs.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        LaurentPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(LaurentPoly);

/// num / den with den nonzero. Equality is cross-multiplication.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(RatFunc { num, den }.normalized())
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RatFunc { num: p, den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(LaurentPoly::one())
    }

    /// 1 / prod (1 - f_i)
    pub fn inverse_product(factors: &[LaurentPoly]) -> Self {
        let mut den = LaurentPoly::one();
        for f in factors {
            den = &den * &(&LaurentPoly::one() - f);
        }
        RatFunc::new(LaurentPoly::one(), den).unwrap()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    /// Scale so that the X-constant term of the denominator is 1 when that term is a unit.
    pub fn normalized(self) -> Self {
        let x = x_var();
        let d0 = self.den.coefficients_in(x).remove(&0);
        if let Some(d0) = d0 {
            if let Some(inv) = d0.inv_unit() {
                if !d0.is_one() {
                    return RatFunc { num: &self.num * &inv, den: &self.den * &inv };
                }
            }
        }
        self
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&RatFunc { num: -&o.num, den: o.den.clone() })
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, SymError> {
        if o.num.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        RatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale_poly(&self, p: &LaurentPoly) -> RatFunc {
        RatFunc::new(&self.num * p, self.den.clone()).unwrap()
    }

    /// Degree of the denominator in X after clearing negative powers.
    pub fn den_degree(&self, v: Var) -> i32 {
        match (self.den.min_exp(v), self.den.max_exp(v)) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn num_degree(&self, v: Var) -> i32 {
        match (self.num.min_exp(v), self.num.max_exp(v)) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    /// Substitute variables by Laurent polynomials. Negative powers of a substituted variable
    /// are cleared from numerator and denominator first, so any image is allowed.
    pub fn substitute(&self, assignments: &HashMap<Var, LaurentPoly>) -> Result<RatFunc, SymError> {
        let mut clear = Monomial::one();
        for &v in assignments.keys() {
            let lo = self.num.min_exp(v).unwrap_or(0).min(self.den.min_exp(v).unwrap_or(0));
            if lo < 0 {
                clear = clear.mul(&Monomial::var(v, -lo));
            }
        }
        let num = self.num.mul_monomial(&clear).substitute(assignments)?;
        let den = self.den.mul_monomial(&clear).substitute(assignments)?;
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        RatFunc::new(num, den)
    }

    pub fn substitute_named(&self, assignments: &[(&str, LaurentPoly)]) -> Result<RatFunc, SymError> {
        let map: HashMap<Var, LaurentPoly> = assignments.iter().map(|(n, p)| (Var::new(n), p.clone())).collect();
        self.substitute(&map)
    }

    pub fn eval_complex(&self, values: &HashMap<Var, num_complex::Complex64>) -> num_complex::Complex64 {
        self.num.eval_complex(values) / self.den.eval_complex(values)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Truncated power series sum_{k=0}^{order} c_k v^k with coefficients free of v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    var: Var,
    coeffs: Vec<LaurentPoly>,
}

impl PowerSeries {
    pub fn zero(var: Var, order: usize) -> Self {
        PowerSeries { var, coeffs: vec![LaurentPoly::zero(); order + 1] }
    }

    pub fn from_coeffs(var: Var, coeffs: Vec<LaurentPoly>) -> Self {
        assert!(!coeffs.is_empty());
        assert!(coeffs.iter().all(|c| !c.contains_var(var)));
        PowerSeries { var, coeffs }
    }

    /// Truncate a polynomial in `var` (no negative powers) to the given order.
    pub fn from_poly(p: &LaurentPoly, var: Var, order: usize) -> Result<Self, SymError> {
        let mut s = PowerSeries::zero(var, order);
        for (k, c) in p.coefficients_in(var) {
            if k < 0 {
                return Err(SymError::NegativePower(var.name()));
            }
            if (k as usize) <= order {
                s.coeffs[k as usize] = c;
            }
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeff(&self, k: usize) -> &LaurentPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        PowerSeries { var: self.var, coeffs: self.coeffs[..=n].to_vec() }
    }

    pub fn to_poly(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            out = &out + &c.mul_monomial(&Monomial::var(self.var, k as i32));
        }
        out
    }

    pub fn add(&self, o: &PowerSeries) -> PowerSeries {
        assert_eq!(self.var, o.var);
        let n = self.order().min(o.order());
        PowerSeries { var: self.var, coeffs: (0..=n).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }

    pub fn sub(&self, o: &PowerSeries) -> PowerSeries {
        assert_eq!(self.var, o.var);
        let n = self.order().min(o.order());
        PowerSeries { var: self.var, coeffs: (0..=n).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    pub fn mul(&self, o: &PowerSeries) -> PowerSeries {
        assert_eq!(self.var, o.var);
        let n = self.order().min(o.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = LaurentPoly::zero();
                for i in 0..=k {
                    if self.coeffs[i].is_zero() || o.coeffs[k - i].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&self.coeffs[i] * &o.coeffs[k - i]);
                }
                acc
            })
            .collect();
        PowerSeries { var: self.var, coeffs }
    }

    pub fn scale_poly(&self, p: &LaurentPoly) -> PowerSeries {
        PowerSeries { var: self.var, coeffs: self.coeffs.iter().map(|c| c * p).collect() }
    }

    /// Multiplicative inverse when the constant coefficient is a unit.
    pub fn inverse(&self) -> Result<PowerSeries, SymError> {
        let c0inv = self.coeffs[0].inv_unit().ok_or_else(|| SymError::NonInvertible(self.var.name()))?;
        let n = self.order();
        let mut out: Vec<LaurentPoly> = Vec::with_capacity(n + 1);
        out.push(c0inv.clone());
        for k in 1..=n {
            let mut acc = LaurentPoly::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() || out[k - j].is_zero() {
                    continue;
                }
                acc = &acc + &(&self.coeffs[j] * &out[k - j]);
            }
            out.push(&(-&acc) * &c0inv);
        }
        Ok(PowerSeries { var: self.var, coeffs: out })
    }

    pub fn substitute_coeffs(&self, assignments: &HashMap<Var, LaurentPoly>) -> Result<PowerSeries, SymError> {
        let coeffs = self.coeffs.iter().map(|c| c.substitute(assignments)).collect::<Result<Vec<_>, _>>()?;
        Ok(PowerSeries { var: self.var, coeffs })
    }

    /// Index of the first differing coefficient against another series, if any.
    pub fn first_difference(&self, o: &PowerSeries) -> Option<usize> {
        let n = self.order().min(o.order());
        (0..=n).find(|&k| self.coeffs[k] != o.coeffs[k])
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var.name();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{v}")?,
                _ => write!(f, "({c})*{v}^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({v}^{})", self.order() + 1)
    }
}

/// Bring numerator and denominator to nonnegative powers of `var` by a common shift.
fn shift_nonnegative(rf: &RatFunc, var: Var) -> (LaurentPoly, LaurentPoly) {
    let lo = rf.num.min_exp(var).unwrap_or(0).min(rf.den.min_exp(var).unwrap_or(0));
    if lo < 0 {
        let m = Monomial::var(var, -lo);
        (rf.num.mul_monomial(&m), rf.den.mul_monomial(&m))
    } else {
        (rf.num.clone(), rf.den.clone())
    }
}

/// Power series of a rational function in X up to the given order.
pub fn expand(rf: &RatFunc, order: usize) -> Result<PowerSeries, SymError> {
    expand_in(rf, x_var(), order)
}

pub fn expand_in(rf: &RatFunc, var: Var, order: usize) -> Result<PowerSeries, SymError> {
    let (num, den) = shift_nonnegative(rf, var);
    let den_s = PowerSeries::from_poly(&den, var, order)?;
    let num_s = PowerSeries::from_poly(&num, var, order)?;
    Ok(num_s.mul(&den_s.inverse()?))
}

/// Fraction-free elimination on rows of [A | b]; returns (det, y) with A x = b solved by x = y/det.
fn bareiss_solve(mut rows: Vec<Vec<LaurentPoly>>, unknowns: usize) -> Option<(LaurentPoly, Vec<LaurentPoly>)> {
    let nrows = rows.len();
    if nrows < unknowns {
        return None;
    }
    let mut prev = LaurentPoly::one();
    for k in 0..unknowns {
        let pivot = (k..nrows)
            .filter(|&i| !rows[i][k].is_zero())
            .min_by_key(|&i| rows[i][k].len())?;
        rows.swap(k, pivot);
        let (head, tail) = rows.split_at_mut(k + 1);
        let prow = &head[k];
        for row in tail.iter_mut() {
            let f = row[k].clone();
            for j in k..=unknowns {
                let v = &(&prow[k] * &row[j]) - &(&f * &prow[j]);
                row[j] = if prev.is_one() { v } else { v.div_exact(&prev).expect("fraction-free step is exact") };
            }
        }
        prev = rows[k][k].clone();
    }
    if rows[unknowns..].iter().any(|r| !r[unknowns].is_zero()) {
        return None;
    }
    let det = rows[unknowns - 1][unknowns - 1].clone();
    let mut y = vec![LaurentPoly::zero(); unknowns];
    for i in (0..unknowns).rev() {
        let mut acc = &det * &rows[i][unknowns];
        for j in (i + 1)..unknowns {
            acc = &acc - &(&rows[i][j] * &y[j]);
        }
        y[i] = acc.div_exact(&rows[i][i]).expect("back substitution is exact");
    }
    Some((det, y))
}

/// Find num/den with deg num <= max_num_deg, deg den <= max_den_deg matching the series,
/// preferring the smallest denominator degree.
pub fn reconstruct(series: &PowerSeries, max_num_deg: usize, max_den_deg: usize) -> Result<RatFunc, SymError> {
    let order = series.order();
    if order < max_num_deg + max_den_deg + 1 {
        return Err(SymError::OrderTooSmall { order, num: max_num_deg, den: max_den_deg });
    }
    let var = series.var();
    let s = |k: i64| -> LaurentPoly {
        if k < 0 {
            LaurentPoly::zero()
        } else {
            series.coeff(k as usize).clone()
        }
    };
    for m in 0..=max_den_deg {
        // sum_{j=0}^{m} q_j S_{k-j} = 0 for k > max_num_deg, with q_0 = 1
        let den_coeffs: Vec<LaurentPoly> = if m == 0 {
            if ((max_num_deg + 1)..=order).all(|k| series.coeff(k).is_zero()) {
                vec![LaurentPoly::one()]
            } else {
                continue;
            }
        } else {
            let rows: Vec<Vec<LaurentPoly>> = ((max_num_deg + 1)..=order)
                .map(|k| {
                    let mut row: Vec<LaurentPoly> = (1..=m).map(|j| s(k as i64 - j as i64)).collect();
                    row.push(-&s(k as i64));
                    row
                })
                .collect();
            let Some((det, y)) = bareiss_solve(rows, m) else { continue };
            let mut q = vec![det.clone()];
            q.extend(y);
            if let Some(reduced) = q.iter().map(|c| c.div_exact(&det)).collect::<Option<Vec<_>>>() {
                reduced
            } else {
                q
            }
        };
        let den_series = PowerSeries::from_coeffs(var, {
            let mut v = den_coeffs.clone();
            v.resize(order + 1, LaurentPoly::zero());
            v
        });
        let prod = series.mul(&den_series);
        if ((max_num_deg + 1)..=order).any(|k| !prod.coeff(k).is_zero()) {
            continue;
        }
        let num = prod.truncate(max_num_deg).to_poly();
        let den = PowerSeries::from_coeffs(var, den_coeffs).to_poly();
        return RatFunc::new(num, den);
    }
    Err(SymError::NoSolution { num: max_num_deg, den: max_den_deg })
}

/// Number of equations beyond the unknown count in a reconstruction with these bounds.
pub fn surplus_equations(order: usize, max_num_deg: usize, max_den_deg: usize) -> i64 {
    order as i64 - max_num_deg as i64 - max_den_deg as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    #[test]
    fn geometric_series() {
        let rf = RatFunc::new(LaurentPoly::one(), p("1 - X")).unwrap();
        let s = expand(&rf, 3).unwrap();
        assert_eq!(s.to_poly(), p("1 + X + X^2 + X^3"));
    }

    #[test]
    fn two_factor_expansion() {
        let rf = RatFunc::new(LaurentPoly::one(), &p("1 - a*X") * &p("1 - a^-1*X")).unwrap();
        let s = expand(&rf, 2).unwrap();
        assert_eq!(s.coeff(1), &p("a + a^-1"));
        assert_eq!(s.coeff(2), &p("a^2 + 1 + a^-2"));
    }

    #[test]
    fn render_and_parse_round_trip() {
        let q = p("1/2*a^-1*X^2 - a*b*X + 1 - 3*n1^2*b");
        assert_eq!(q.to_string(), "1 - 3*b*n1^2 - a*b*X + 1/2*a^-1*X^2");
        assert_eq!(p(&q.to_string()), q);
    }

    #[test]
    fn exact_division() {
        let num = &p("a^3 - a^-3");
        let den = &p("a - a^-1");
        assert_eq!(num.div_exact(den).unwrap(), p("a^2 + 1 + a^-2"));
        assert!(p("a + 1").div_exact(&p("a - 1")).is_none());
        let f = &p("1 - a*b*X") * &p("2 + b^-1 - X^2");
        assert_eq!(f.div_exact(&p("1 - a*b*X")).unwrap(), p("2 + b^-1 - X^2"));
    }

    #[test]
    fn substitution_examples() {
        let rf = RatFunc::new(
            p("1 - b^2*X^2"),
            &(&p("1 - a*b*X") * &p("1 - b*X")) * &p("1 - a^-1*b*X"),
        )
        .unwrap();
        let one = LaurentPoly::one();
        let sub = rf.substitute_named(&[("a", one.clone()), ("b", one)]).unwrap();
        assert_eq!(sub, RatFunc::new(p("1 + X"), p("1 - 2*X + X^2")).unwrap());
        let same = rf.substitute_named(&[("X", p("X"))]).unwrap();
        assert_eq!(same, rf);
        // a -> a + 1 is not a unit but is fine after clearing a^-1
        let shifted = rf.substitute_named(&[("a", p("a + 1"))]).unwrap();
        assert_eq!(
            shifted.den(),
            &(&(&p("1 - a*b*X - b*X") * &p("1 - b*X")) * &p("a + 1 - b*X"))
        );
    }

    #[test]
    fn reconstruct_small_cases() {
        let rf = RatFunc::new(LaurentPoly::one(), p("1 - X")).unwrap();
        let back = reconstruct(&expand(&rf, 6).unwrap(), 0, 2).unwrap();
        assert_eq!(back.num(), &LaurentPoly::one());
        assert_eq!(back.den(), &p("1 - X"));
        let poly = RatFunc::from_poly(p("1 + 2*a*X + X^2"));
        let back = reconstruct(&expand(&poly, 8).unwrap(), 2, 2).unwrap();
        assert_eq!(back.den(), &LaurentPoly::one());
        assert_eq!(back.num(), &p("1 + 2*a*X + X^2"));
        let ram = RatFunc::new(
            p("1 - b^2*X^2"),
            &(&p("1 - a*b*X") * &p("1 - b*X")) * &p("1 - a^-1*b*X"),
        )
        .unwrap();
        let back = reconstruct(&expand(&ram, 20).unwrap(), 2, 3).unwrap();
        assert_eq!(back, ram);
        // the (1 + bX)/((1 - abX)(1 - a^-1 bX)) form has the smaller denominator
        assert_eq!(back.den_degree(x_var()), 2);
        assert!(matches!(reconstruct(&expand(&ram, 20).unwrap(), 0, 1), Err(SymError::NoSolution { .. })));
    }
}
