//! Exact arithmetic in E = Q(sqrt(-D)), 3x3 matrices over E, the Hermitian form J,
//! local valuations and the norm-group decision procedure.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ntheory;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("form is singular")]
    SingularForm,
    #[error("form is not Hermitian")]
    NotHermitian,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("prime choice {choice:?} does not apply to a {kind} place")]
    BadPrimeChoice { choice: PrimeChoice, kind: &'static str },
    #[error("vector has non-positive norm {0}")]
    NonPositive(Rational),
    #[error("zero vector")]
    ZeroVector,
    #[error("zero is not allowed here")]
    Zero,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// D > 0 with -D a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant {
    d: u64,
    even: bool,
}

impl Discriminant {
    pub fn new(d: u64) -> Result<Self, QuadError> {
        if d == 0 {
            return Err(QuadError::NotFundamental(d));
        }
        // -D = 1 mod 4  <=>  D = 3 mod 4
        if d % 4 == 3 && ntheory::is_squarefree(d) {
            return Ok(Discriminant { d, even: false });
        }
        if d % 4 == 0 {
            // -D = 4 D' with D' = -d/4 = 2 or 3 mod 4
            let q = d / 4;
            let dprime_mod4 = (4 - q % 4) % 4;
            if (dprime_mod4 == 2 || dprime_mod4 == 3) && ntheory::is_squarefree(q) {
                return Ok(Discriminant { d, even: true });
            }
        }
        Err(QuadError::NotFundamental(d))
    }

    pub fn value(&self) -> u64 {
        self.d
    }

    /// True when -D = 4D' rather than -D = 1 mod 4.
    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn as_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.d))
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// a + b*delta with delta = sqrt(-D).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldElemJson", into = "FieldElemJson")]
pub struct FieldElem {
    a: Rational,
    b: Rational,
    disc: Discriminant,
}

impl FieldElem {
    pub fn new(a: Rational, b: Rational, disc: Discriminant) -> Self {
        FieldElem { a, b, disc }
    }

    pub fn from_rational(a: Rational, disc: Discriminant) -> Self {
        FieldElem::new(a, Rational::zero(), disc)
    }

    pub fn from_int(n: i64, disc: Discriminant) -> Self {
        FieldElem::from_rational(rat_int(n), disc)
    }

    pub fn zero(disc: Discriminant) -> Self {
        FieldElem::from_int(0, disc)
    }

    pub fn one(disc: Discriminant) -> Self {
        FieldElem::from_int(1, disc)
    }

    pub fn delta(disc: Discriminant) -> Self {
        FieldElem::new(Rational::zero(), Rational::one(), disc)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn disc(&self) -> Discriminant {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElem::new(self.a.clone(), -self.b.clone(), self.disc)
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a + self.disc.as_rational() * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(FieldElem::new(&self.a / &n, -(&self.b / &n), self.disc))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        FieldElem::new(&self.a * q, &self.b * q, self.disc)
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = FieldElem::one(self.disc);
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Some(out)
    }

    fn check(&self, other: &FieldElem) {
        assert_eq!(self.disc, other.disc, "mixing elements of different fields");
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*d", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*d", self.a, -self.b.clone())
        } else {
            write!(f, "{} + {}*d", self.a, self.b)
        }
    }
}

macro_rules! field_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &'a FieldElem) -> FieldElem {
                self.check(rhs);
                let f: fn(&FieldElem, &FieldElem) -> FieldElem = $body;
                f(self, rhs)
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &'a FieldElem) -> FieldElem {
                (&self).$method(rhs)
            }
        }
    };
}

field_binop!(Add, add, |x, y| FieldElem::new(&x.a + &y.a, &x.b + &y.b, x.disc));
field_binop!(Sub, sub, |x, y| FieldElem::new(&x.a - &y.a, &x.b - &y.b, x.disc));
field_binop!(Mul, mul, |x, y| {
    let d = x.disc.as_rational();
    FieldElem::new(
        &x.a * &y.a - d * &x.b * &y.b,
        &x.a * &y.b + &x.b * &y.a,
        x.disc,
    )
});
field_binop!(Div, div, |x, y| x * &y.inv().expect("division by zero in E"));

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(-self.a, -self.b, self.disc)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -self.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct FieldElemJson {
    a: String,
    b: String,
    #[serde(rename = "D")]
    d: u64,
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, QuadError> {
    let s = s.trim();
    let bad = || QuadError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl From<FieldElem> for FieldElemJson {
    fn from(x: FieldElem) -> Self {
        FieldElemJson { a: format_rational(&x.a), b: format_rational(&x.b), d: x.disc.d }
    }
}

impl TryFrom<FieldElemJson> for FieldElem {
    type Error = QuadError;
    fn try_from(j: FieldElemJson) -> Result<Self, QuadError> {
        Ok(FieldElem::new(parse_rational(&j.a)?, parse_rational(&j.b)?, Discriminant::new(j.d)?))
    }
}

pub type Vec3 = [FieldElem; 3];

pub fn vec3(disc: Discriminant, entries: [(Rational, Rational); 3]) -> Vec3 {
    entries.map(|(a, b)| FieldElem::new(a, b, disc))
}

pub fn unit_vector(i: usize, disc: Discriminant) -> Vec3 {
    std::array::from_fn(|k| FieldElem::from_int((k == i) as i64, disc))
}

/// Dense 3x3 matrix over E.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix3E {
    rows: [[FieldElem; 3]; 3],
}

impl Matrix3E {
    pub fn from_rows(rows: [[FieldElem; 3]; 3]) -> Self {
        let d = rows[0][0].disc;
        assert!(rows.iter().flatten().all(|x| x.disc == d), "mixed fields in matrix");
        Matrix3E { rows }
    }

    pub fn from_fn(disc: Discriminant, f: impl Fn(usize, usize) -> FieldElem) -> Self {
        Matrix3E::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| {
            let x = f(i, j);
            assert_eq!(x.disc, disc);
            x
        })))
    }

    pub fn identity(disc: Discriminant) -> Self {
        Matrix3E::from_fn(disc, |i, j| FieldElem::from_int((i == j) as i64, disc))
    }

    pub fn diag(d0: FieldElem, d1: FieldElem, d2: FieldElem) -> Self {
        let disc = d0.disc;
        let d = [d0, d1, d2];
        Matrix3E::from_fn(disc, |i, j| if i == j { d[i].clone() } else { FieldElem::zero(disc) })
    }

    /// The Hermitian form with J13 = 1/delta, J22 = 1, J31 = -1/delta.
    pub fn hermitian_form(disc: Discriminant) -> Self {
        let dinv = FieldElem::delta(disc).inv().unwrap();
        Matrix3E::from_fn(disc, |i, j| match (i, j) {
            (0, 2) => dinv.clone(),
            (1, 1) => FieldElem::one(disc),
            (2, 0) => -dinv.clone(),
            _ => FieldElem::zero(disc),
        })
    }

    pub fn disc(&self) -> Discriminant {
        self.rows[0][0].disc
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[[FieldElem; 3]; 3] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec3 {
        std::array::from_fn(|i| self.rows[i][j].clone())
    }

    pub fn from_columns(cols: &[Vec3; 3]) -> Self {
        let disc = cols[0][0].disc;
        Matrix3E::from_fn(disc, |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> Self {
        Matrix3E::from_fn(self.disc(), |i, j| self.rows[j][i].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Matrix3E::from_fn(self.disc(), |i, j| self.rows[j][i].conj())
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Matrix3E::from_fn(self.disc(), |i, j| &self.rows[i][j] * c)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        std::array::from_fn(|i| {
            let mut acc = FieldElem::zero(self.disc());
            for j in 0..3 {
                acc = acc + &self.rows[i][j] * &v[j];
            }
            acc
        })
    }

    pub fn det(&self) -> FieldElem {
        let m = &self.rows;
        let t0 = &m[0][0] * &(&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
        let t1 = &m[0][1] * &(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
        let t2 = &m[0][2] * &(&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        t0 - t1 + t2
    }

    fn cofactor(&self, i: usize, j: usize) -> FieldElem {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let m = &self.rows;
        let minor = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det().inv()?;
        Some(Matrix3E::from_fn(self.disc(), |i, j| &self.cofactor(j, i) * &d))
    }

    pub fn is_hermitian(&self) -> bool {
        self.conj_transpose() == *self
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows[1][0].is_zero() && self.rows[2][0].is_zero() && self.rows[2][1].is_zero()
    }

    /// 2x2 minors, used for elementary divisors.
    pub fn minors2(&self) -> Vec<FieldElem> {
        let mut out = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                out.push(self.cofactor(i, j));
            }
        }
        out
    }
}

impl<'a> Mul<&'a Matrix3E> for &'a Matrix3E {
    type Output = Matrix3E;
    fn mul(self, rhs: &'a Matrix3E) -> Matrix3E {
        Matrix3E::from_fn(self.disc(), |i, j| {
            let mut acc = FieldElem::zero(self.disc());
            for k in 0..3 {
                acc = acc + &self.rows[i][k] * &rhs.rows[k][j];
            }
            acc
        })
    }
}

impl Mul for Matrix3E {
    type Output = Matrix3E;
    fn mul(self, rhs: Matrix3E) -> Matrix3E {
        &self * &rhs
    }
}

impl fmt::Display for Matrix3E {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
            if i < 2 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// <v, w> = conj(v)^t J w.
pub fn pairing(v: &Vec3, w: &Vec3, j: &Matrix3E) -> FieldElem {
    let jw = j.apply(w);
    let mut acc = FieldElem::zero(j.disc());
    for i in 0..3 {
        acc = acc + v[i].conj() * &jw[i];
    }
    acc
}

/// The similitude factor mu with g* J g = mu J, if g is a similitude of J.
pub fn similitude(g: &Matrix3E, j: &Matrix3E) -> Result<Option<Rational>, QuadError> {
    if !j.is_hermitian() {
        return Err(QuadError::NotHermitian);
    }
    if j.det().is_zero() {
        return Err(QuadError::SingularForm);
    }
    let p = &(&g.conj_transpose() * j) * g;
    let (i0, j0) = (0..3)
        .flat_map(|i| (0..3).map(move |k| (i, k)))
        .find(|&(i, k)| !j.get(i, k).is_zero())
        .unwrap();
    let mu = p.get(i0, j0) / j.get(i0, j0);
    if !mu.is_rational() || mu.is_zero() {
        return Ok(None);
    }
    if p == j.scale(&mu) {
        Ok(Some(mu.a))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeChoice {
    First,
    Second,
    Only,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    /// r^2 = -D mod p^precision; the first prime above p is the kernel of delta -> r.
    Split { root: BigInt, precision: u32 },
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPlace {
    p: u64,
    disc: Discriminant,
    kind: PlaceKind,
}

const INITIAL_HENSEL_PRECISION: u32 = 16;

impl LocalPlace {
    pub fn new(p: u64, disc: Discriminant) -> Result<Self, QuadError> {
        if !ntheory::is_prime(p) {
            return Err(QuadError::NotPrime(p));
        }
        let minus_d = -BigInt::from(disc.value());
        let kind = match ntheory::kronecker_prime(&minus_d, p) {
            0 => PlaceKind::Ramified,
            -1 => PlaceKind::Inert,
            _ => PlaceKind::Split {
                root: ntheory::hensel_sqrt(&minus_d, p, INITIAL_HENSEL_PRECISION).unwrap(),
                precision: INITIAL_HENSEL_PRECISION,
            },
        };
        Ok(LocalPlace { p, disc, kind })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn disc(&self) -> Discriminant {
        self.disc
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PlaceKind::Split { .. } => "split",
            PlaceKind::Inert => "inert",
            PlaceKind::Ramified => "ramified",
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self.kind, PlaceKind::Split { .. })
    }

    pub fn is_ramified(&self) -> bool {
        matches!(self.kind, PlaceKind::Ramified)
    }

    /// Valuation of a nonzero element; `None` encodes +infinity for zero.
    ///
    /// Split and inert places are normalized by v(p) = 1; ramified places by v(uniformizer) = 1,
    /// so v(p) = 2 there.
    pub fn valuation(&self, x: &FieldElem, choice: PrimeChoice) -> Result<Option<i64>, QuadError> {
        let bad = |choice| QuadError::BadPrimeChoice { choice, kind: self.kind_name() };
        match (&self.kind, choice) {
            (PlaceKind::Split { .. }, PrimeChoice::Only) => return Err(bad(choice)),
            (PlaceKind::Inert | PlaceKind::Ramified, PrimeChoice::First | PrimeChoice::Second) => {
                return Err(bad(choice))
            }
            _ => {}
        }
        if x.is_zero() {
            return Ok(None);
        }
        let nv = ntheory::vp_rational(&x.norm(), self.p).unwrap();
        match &self.kind {
            PlaceKind::Inert => Ok(Some(nv / 2)),
            PlaceKind::Ramified => Ok(Some(nv)),
            PlaceKind::Split { root, precision } => {
                let sign = if choice == PrimeChoice::First { 1 } else { -1 };
                Ok(Some(self.split_valuation(x, root.clone(), *precision, sign)))
            }
        }
    }

    fn split_valuation(&self, x: &FieldElem, mut root: BigInt, mut prec: u32, sign: i32) -> i64 {
        let den = x.a.denom().lcm(x.b.denom());
        let a_num = x.a.numer() * (&den / x.a.denom());
        let b_num = x.b.numer() * (&den / x.b.denom());
        let den_v = ntheory::vp_int(&den, self.p);
        let pb = BigInt::from(self.p);
        let minus_d = -BigInt::from(self.disc.value());
        loop {
            let modulus = pb.pow(prec);
            let y = (&a_num + &b_num * &root * BigInt::from(sign)).mod_floor(&modulus);
            if !y.is_zero() {
                return ntheory::vp_int(&y, self.p) - den_v;
            }
            prec *= 2;
            root = ntheory::hensel_sqrt(&minus_d, self.p, prec).unwrap();
        }
    }

    /// The Hensel root currently attached to a split place.
    pub fn split_root(&self) -> Option<(&BigInt, u32)> {
        match &self.kind {
            PlaceKind::Split { root, precision } => Some((root, *precision)),
            _ => None,
        }
    }

    /// Valuation choices meaningful for this place.
    pub fn choices(&self) -> &'static [PrimeChoice] {
        if self.is_split() {
            &[PrimeChoice::First, PrimeChoice::Second]
        } else {
            &[PrimeChoice::Only]
        }
    }

    /// Normalized valuation of p itself at any prime above p.
    pub fn e(&self) -> i64 {
        if self.is_ramified() {
            2
        } else {
            1
        }
    }
}

pub fn local_valuation(x: &FieldElem, place: &LocalPlace, choice: PrimeChoice) -> Result<Option<i64>, QuadError> {
    place.valuation(x, choice)
}

/// Whether q is a norm from E, via positivity and Hilbert symbols (q, -D)_p.
pub fn is_norm(q: &Rational, disc: Discriminant) -> Result<bool, QuadError> {
    if q.is_zero() {
        return Err(QuadError::Zero);
    }
    if q.is_negative() {
        return Ok(false);
    }
    // q ~ num * den modulo squares
    let t = q.numer() * q.denom();
    let minus_d = -BigInt::from(disc.value());
    let mut primes = ntheory::prime_divisors(&(BigInt::from(2) * &minus_d * &t));
    primes.sort_unstable();
    Ok(primes.into_iter().all(|p| ntheory::hilbert_symbol(&t, &minus_d, p) == 1))
}

/// Whether the positive line spanned by w is in the set Xi, i.e. <w,w> is a norm.
pub fn xi_membership(w: &Vec3, j: &Matrix3E) -> Result<bool, QuadError> {
    let n = pairing(w, w, j);
    debug_assert!(n.is_rational());
    if !n.a.is_positive() {
        return Err(QuadError::NonPositive(n.a));
    }
    is_norm(&n.a, j.disc())
}

/// Bounded search for an isotropic vector in the orthogonal complement of E w.
///
/// The complement is spanned by v1, v2; candidates are v2 and v1 + y v2 with y = a + b delta,
/// a and b rationals of height at most `bound`. Finding one certifies that E w lies in Xi; not
/// finding one proves nothing.
pub fn isotropic_in_complement(w: &Vec3, j: &Matrix3E, bound: i64) -> Result<Option<Vec3>, QuadError> {
    let disc = j.disc();
    let r: Vec<FieldElem> = (0..3).map(|k| pairing(w, &unit_vector(k, disc), j)).collect();
    let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
        return Err(QuadError::ZeroVector);
    };
    let inv = r[pivot].inv().expect("pivot is nonzero");
    let basis: Vec<Vec3> = (0..3)
        .filter(|&k| k != pivot)
        .map(|k| {
            let mut v = unit_vector(k, disc);
            v[pivot] = -&(&r[k] * &inv);
            v
        })
        .collect();
    let (v1, v2) = (&basis[0], &basis[1]);
    if pairing(v2, v2, j).is_zero() {
        return Ok(Some(v2.clone()));
    }
    let mut heights = vec![Rational::zero()];
    for den in 1..=bound {
        for num in 1..=bound {
            let q = rat(num, den);
            if q.denom() == &BigInt::from(den) {
                heights.push(q.clone());
                heights.push(-q);
            }
        }
    }
    for a in &heights {
        for b in &heights {
            let y = FieldElem::new(a.clone(), b.clone(), disc);
            let v: Vec3 = std::array::from_fn(|i| &v1[i] + &(&y * &v2[i]));
            if pairing(&v, &v, j).is_zero() {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// ord_p of (<w,L>)(<w,L>bar)/<w,w> intersected with Q_p, for the standard lattice L.
pub fn invariant_ideal_valuation(w: &Vec3, place: &LocalPlace) -> Result<i64, QuadError> {
    let disc = place.disc();
    if w.iter().all(|x| x.is_zero()) {
        return Err(QuadError::ZeroVector);
    }
    let j = Matrix3E::hermitian_form(disc);
    let ww = pairing(w, w, &j);
    if ww.is_zero() {
        return Err(QuadError::NonPositive(Rational::zero()));
    }
    let pairings: Vec<FieldElem> = (0..3).map(|i| pairing(w, &unit_vector(i, disc), &j)).collect();
    let mut total = 0i64;
    for &choice in place.choices() {
        let m = pairings
            .iter()
            .filter_map(|x| place.valuation(x, choice).unwrap())
            .min()
            .expect("some pairing is nonzero");
        total += m;
    }
    // inert: one prime, I*Ibar = p^(2m); ramified: I*Ibar = uniformizer^(2m) ~ p^m;
    // split: I*Ibar = p^(m1+m2)
    let ideal = match place.kind() {
        PlaceKind::Inert => 2 * total,
        _ => total,
    };
    Ok(ideal - ntheory::vp_rational(&ww.a, place.p()).unwrap())
}

/// Bounded search for x with Nm(x) = q, with numerator/denominator heights up to `bound`.
pub fn norm_witness_search(q: &Rational, disc: Discriminant, bound: i64) -> Option<FieldElem> {
    let d = disc.value() as i64;
    for den in 1..=bound {
        let target = q * Rational::from_integer(BigInt::from(den * den));
        if !target.is_integer() {
            continue;
        }
        let t = target.to_integer();
        let Some(t) = t.to_i64() else { continue };
        if t <= 0 {
            continue;
        }
        let mut b = 0i64;
        while d * b * b <= t {
            let rem = t - d * b * b;
            let a = (rem as f64).sqrt().round() as i64;
            for a in [a - 1, a, a + 1] {
                if a >= 0 && a * a == rem {
                    return Some(FieldElem::new(rat(a, den), rat(b, den), disc));
                }
            }
            b += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u64) -> Discriminant {
        Discriminant::new(n).unwrap()
    }

    #[test]
    fn fundamental_discriminants() {
        let good: Vec<u64> = (1..60).filter(|&n| Discriminant::new(n).is_ok()).collect();
        assert_eq!(good, vec![3, 4, 7, 8, 11, 15, 19, 20, 23, 24, 31, 35, 39, 40, 43, 47, 51, 52, 55, 56, 59]);
    }

    #[test]
    fn basic_field_identities() {
        let disc = d(7);
        let x = FieldElem::new(rat(3, 2), rat(-5, 3), disc);
        assert_eq!(x.conj().conj(), x);
        assert_eq!(x.norm(), rat(9, 4) + rat(7 * 25, 9));
        assert_eq!(x.trace(), rat(3, 1));
        assert_eq!(&x * &x.inv().unwrap(), FieldElem::one(disc));
        let delta = FieldElem::delta(disc);
        assert_eq!(&delta * &delta, FieldElem::from_int(-7, disc));
    }

    #[test]
    fn field_elem_json_shape() {
        let x = FieldElem::new(rat(1, 2), rat(-3, 1), d(3));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"1/2","b":"-3/1","D":3}"#);
        let back: FieldElem = serde_json::from_str(r#"{"a":"1/2","b":"-3","D":3}"#).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn similitude_examples() {
        let disc = d(3);
        let j = Matrix3E::hermitian_form(disc);
        assert_eq!(similitude(&Matrix3E::identity(disc), &j).unwrap(), Some(rat_int(1)));
        let two = FieldElem::from_int(2, disc);
        let g = Matrix3E::diag(two.clone(), two.clone(), two);
        assert_eq!(similitude(&g, &j).unwrap(), Some(rat_int(4)));
        let a = FieldElem::one(disc) + FieldElem::delta(disc);
        let g = Matrix3E::diag(&a * &a.conj(), a, FieldElem::one(disc));
        assert_eq!(similitude(&g, &j).unwrap(), Some(rat_int(4)));
        let g = Matrix3E::diag(FieldElem::from_int(2, disc), FieldElem::one(disc), FieldElem::one(disc));
        assert_eq!(similitude(&g, &j).unwrap(), None);
        let singular = Matrix3E::diag(FieldElem::one(disc), FieldElem::zero(disc), FieldElem::one(disc));
        assert_eq!(similitude(&g, &singular), Err(QuadError::SingularForm));
    }

    #[test]
    fn valuation_examples() {
        let disc = d(3);
        let five = LocalPlace::new(5, disc).unwrap();
        // -3 mod 5 = 2 is not a square: 5 is inert in Q(sqrt(-3))
        assert_eq!(five.kind(), &PlaceKind::Inert);
        assert_eq!(five.valuation(&FieldElem::from_int(5, disc), PrimeChoice::Only).unwrap(), Some(1));
        let seven = LocalPlace::new(7, disc).unwrap();
        assert!(seven.is_split());
        assert_eq!(seven.valuation(&FieldElem::from_int(7, disc), PrimeChoice::First).unwrap(), Some(1));
        let three = LocalPlace::new(3, disc).unwrap();
        assert_eq!(three.valuation(&FieldElem::delta(disc), PrimeChoice::Only).unwrap(), Some(1));
        let two = LocalPlace::new(2, disc).unwrap();
        assert_eq!(two.kind(), &PlaceKind::Inert);
        // Nm(1 + delta) = 4 = 2^2, inert so v = 1
        let x = FieldElem::one(disc) + FieldElem::delta(disc);
        assert_eq!(two.valuation(&x, PrimeChoice::Only).unwrap(), Some(1));
        assert!(two.valuation(&x, PrimeChoice::First).is_err());
    }

    #[test]
    fn split_valuation_needs_relift() {
        // x = a + b*delta with x divisible by a high power of the first prime above 7
        let disc = d(3);
        let place = LocalPlace::new(7, disc).unwrap();
        let (root, prec) = place.split_root().unwrap();
        assert_eq!(prec, 16);
        // a = -root mod 7^16 gives v_first(a + delta) >= 16 before relifting
        let a = Rational::from_integer(-root.clone());
        let x = FieldElem::new(a, rat_int(1), disc);
        let v1 = place.valuation(&x, PrimeChoice::First).unwrap().unwrap();
        let v2 = place.valuation(&x, PrimeChoice::Second).unwrap().unwrap();
        let nv = ntheory::vp_rational(&x.norm(), 7).unwrap();
        assert!(v1 >= 16);
        assert_eq!(v1 + v2, nv);
    }

    #[test]
    fn norm_examples() {
        assert!(is_norm(&rat_int(1), d(3)).unwrap());
        assert!(is_norm(&rat_int(2), d(4)).unwrap());
        assert!(!is_norm(&rat_int(3), d(4)).unwrap());
        assert!(!is_norm(&rat_int(-1), d(4)).unwrap());
        assert!(is_norm(&rat(7, 1), d(3)).unwrap());
        assert_eq!(is_norm(&rat_int(0), d(3)), Err(QuadError::Zero));
        let w = norm_witness_search(&rat_int(2), d(4), 4).unwrap();
        assert_eq!(w.norm(), rat_int(2));
    }

    #[test]
    fn xi_examples() {
        let disc = d(3);
        let j = Matrix3E::hermitian_form(disc);
        assert!(xi_membership(&unit_vector(1, disc), &j).unwrap());
        let bad = [FieldElem::zero(disc), FieldElem::zero(disc), FieldElem::zero(disc)];
        assert!(matches!(xi_membership(&bad, &j), Err(QuadError::NonPositive(_))));
        for k in 0..4 {
            let pk = 5i64.pow(k);
            let w = [
                FieldElem::delta(disc).scale(&rat(-1, pk)),
                FieldElem::zero(disc),
                FieldElem::from_rational(rat(pk, 2), disc),
            ];
            assert_eq!(pairing(&w, &w, &j), FieldElem::one(disc));
            assert!(xi_membership(&w, &j).unwrap());
        }
    }

    #[test]
    fn isotropic_complement_certifies_xi() {
        let mut total = 0;
        for dd in [3u64, 4, 7] {
            let disc = d(dd);
            let j = Matrix3E::hermitian_form(disc);
            let found = isotropic_in_complement(&unit_vector(1, disc), &j, 2).unwrap().unwrap();
            assert!(pairing(&found, &found, &j).is_zero());
            assert!(pairing(&unit_vector(1, disc), &found, &j).is_zero());
            let mut hits = 0;
            for a in -3i64..=3 {
                for b in 1i64..=3 {
                    let w = [
                        FieldElem::new(rat(a, 1), rat(b, 2), disc),
                        FieldElem::from_rational(rat(b, 1), disc),
                        FieldElem::one(disc),
                    ];
                    let n = pairing(&w, &w, &j);
                    if !n.a.is_positive() {
                        continue;
                    }
                    if let Some(v) = isotropic_in_complement(&w, &j, 4).unwrap() {
                        assert!(pairing(&v, &v, &j).is_zero());
                        assert!(pairing(&w, &v, &j).is_zero());
                        assert!(xi_membership(&w, &j).unwrap());
                        hits += 1;
                    }
                }
            }
            total += hits;
        }
        assert!(total > 0);
    }

    #[test]
    fn invariant_ideal_examples() {
        let disc = d(3);
        for p in [5u64, 7, 11, 13] {
            let place = LocalPlace::new(p, disc).unwrap();
            assert_eq!(invariant_ideal_valuation(&unit_vector(1, disc), &place).unwrap(), 0);
            for k in 0..4i64 {
                let pk = (p as i64).pow(k as u32);
                let w = [
                    FieldElem::delta(disc).scale(&rat(-1, pk)),
                    FieldElem::zero(disc),
                    FieldElem::from_rational(rat(pk, 2), disc),
                ];
                // both pairings of valuation -k contribute, so the product ideal is p^(-2k)
                assert_eq!(invariant_ideal_valuation(&w, &place).unwrap(), -2 * k, "p={p} k={k}");
            }
        }
    }
}
