//! Boundary geometry: unipotent parameters of cusp stabilizers, period lattices in E, cusp
//! images, torsion orders, coordinate changes, and the divisor ledger conditions.

use std::collections::BTreeMap;
use std::io::BufRead;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadfield::{pairing, Discriminant, FieldElem, Matrix3E, Rational, Vec3};

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("basis is not J-orthonormal: its Gram matrix differs from J")]
    BadBasis,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("matrix is not of the unipotent cusp-stabilizer shape: {0}")]
    Shape(String),
    #[error("degenerate pairing <w, v2> = 0")]
    DegeneratePairing,
    #[error("lattice has rank {0}, need 2")]
    Rank(usize),
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("ledger line {line}: {msg}")]
    Ledger { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A basis v1, v2, v3 of E^3 in which the Hermitian form is again J.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordBasis {
    v: [Vec3; 3],
}

impl CoordBasis {
    pub fn new(v1: Vec3, v2: Vec3, v3: Vec3) -> Result<Self, BoundaryError> {
        let disc = v1[0].disc();
        let j = Matrix3E::hermitian_form(disc);
        let v = [v1, v2, v3];
        let m = Matrix3E::from_columns(&v);
        if m.det().is_zero() {
            return Err(BoundaryError::DependentBasis);
        }
        if &(&m.conj_transpose() * &j) * &m != j {
            return Err(BoundaryError::BadBasis);
        }
        Ok(CoordBasis { v })
    }

    pub fn standard(disc: Discriminant) -> Self {
        let e = |i| crate::quadfield::unit_vector(i, disc);
        CoordBasis { v: [e(0), e(1), e(2)] }
    }

    pub fn vectors(&self) -> &[Vec3; 3] {
        &self.v
    }

    pub fn matrix(&self) -> Matrix3E {
        Matrix3E::from_columns(&self.v)
    }

    pub fn disc(&self) -> Discriminant {
        self.v[0][0].disc()
    }
}

/// (r, s) with r rational and s in E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentParam {
    #[serde(with = "rational_str")]
    pub r: Rational,
    pub s: FieldElem,
}

impl UnipotentParam {
    /// The matrix [[1, conj(s) delta, r + s conj(s) delta / 2], [0, 1, s], [0, 0, 1]].
    pub fn matrix(&self) -> Matrix3E {
        let disc = self.s.disc();
        let delta = FieldElem::delta(disc);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let corner = FieldElem::from_rational(self.r.clone(), disc) + (&(&self.s * &self.s.conj()) * &delta).scale(&half);
        let z = || FieldElem::zero(disc);
        let o = || FieldElem::one(disc);
        Matrix3E::from_rows([[o(), &self.s.conj() * &delta, corner], [z(), o(), self.s.clone()], [z(), z(), o()]])
    }

    /// r(g1 g2) - r(g1) - r(g2) = delta (conj(s1) s2 - s1 conj(s2)) / 2.
    pub fn cocycle(a: &UnipotentParam, b: &UnipotentParam) -> Rational {
        let delta = FieldElem::delta(a.s.disc());
        let x = &(&(&a.s.conj() * &b.s) - &(&a.s * &b.s.conj())) * &delta;
        debug_assert!(x.is_rational());
        x.a() / Rational::from_integer(BigInt::from(2))
    }
}

mod rational_str {
    use crate::quadfield::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Read off (r, s) from gamma written in the basis.
pub fn gamma_params(gamma: &Matrix3E, basis: &CoordBasis) -> Result<UnipotentParam, BoundaryError> {
    let v = basis.matrix();
    let vinv = v.inverse().ok_or(BoundaryError::DependentBasis)?;
    let g = &(&vinv * gamma) * &v;
    let disc = basis.disc();
    for i in 0..3 {
        if *g.get(i, i) != FieldElem::one(disc) {
            return Err(BoundaryError::Shape(format!("diagonal entry {} is not 1", i + 1)));
        }
    }
    if !g.is_upper_triangular() {
        return Err(BoundaryError::Shape("not upper triangular".into()));
    }
    let s = g.get(1, 2).clone();
    let delta = FieldElem::delta(disc);
    if *g.get(0, 1) != &s.conj() * &delta {
        return Err(BoundaryError::Shape("(1,2) entry is not conj(s) delta".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let r = g.get(0, 2) - &(&(&s * &s.conj()) * &delta).scale(&half);
    if !r.is_rational() {
        return Err(BoundaryError::Shape("r is not rational".into()));
    }
    Ok(UnipotentParam { r: r.a().clone(), s })
}

/// Z-lattice in E, stored as an integer Hermite normal form over the (1, delta) coordinates
/// divided by the least common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeE {
    disc: Discriminant,
    den: BigInt,
    rows: Vec<[BigInt; 2]>,
}

fn lcm_all<'a>(xs: impl Iterator<Item = &'a BigInt>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x))
}

/// Row Hermite normal form of an integer matrix with two columns.
fn hnf2(mut rows: Vec<[BigInt; 2]>) -> Vec<[BigInt; 2]> {
    rows.retain(|r| !(r[0].is_zero() && r[1].is_zero()));
    let mut out: Vec<[BigInt; 2]> = Vec::new();
    // combine first column into one pivot row
    let mut pivot: Option<[BigInt; 2]> = None;
    let mut rest: Vec<BigInt> = Vec::new();
    for r in rows {
        if r[0].is_zero() {
            rest.push(r[1].clone());
            continue;
        }
        match pivot.take() {
            None => pivot = Some(r),
            Some(p) => {
                let eg = p[0].extended_gcd(&r[0]);
                let new = [eg.gcd.clone(), &eg.x * &p[1] + &eg.y * &r[1]];
                // the remaining combination kills the first column
                let kp = &r[0] / &eg.gcd;
                let kr = &p[0] / &eg.gcd;
                rest.push(&kp * &p[1] - &kr * &r[1]);
                pivot = Some(new);
            }
        }
    }
    let g2 = rest.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if let Some(mut p) = pivot {
        if p[0].is_negative() {
            p = [-p[0].clone(), -p[1].clone()];
        }
        if !g2.is_zero() {
            p[1] = p[1].mod_floor(&g2);
        }
        out.push(p);
    }
    if !g2.is_zero() {
        out.push([BigInt::zero(), g2]);
    }
    out
}

impl LatticeE {
    pub fn from_generators(gens: &[FieldElem], disc: Discriminant) -> Self {
        let den = lcm_all(gens.iter().flat_map(|g| [g.a().denom(), g.b().denom()]));
        let scale = |q: &Rational| (q * Rational::from_integer(den.clone())).to_integer();
        let rows = hnf2(gens.iter().map(|g| [scale(g.a()), scale(g.b())]).collect());
        LatticeE::normalized(disc, den, rows)
    }

    fn normalized(disc: Discriminant, den: BigInt, rows: Vec<[BigInt; 2]>) -> Self {
        if rows.is_empty() {
            return LatticeE { disc, den: BigInt::one(), rows };
        }
        let g = rows.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        LatticeE { disc, den: &den / &g, rows: rows.iter().map(|r| [&r[0] / &g, &r[1] / &g]).collect() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "D": self.disc.value(), "basis": self.basis() })
    }

    pub fn disc(&self) -> Discriminant {
        self.disc
    }

    pub fn basis(&self) -> Vec<FieldElem> {
        self.rows
            .iter()
            .map(|r| {
                FieldElem::new(Rational::new(r[0].clone(), self.den.clone()), Rational::new(r[1].clone(), self.den.clone()), self.disc)
            })
            .collect()
    }

    /// Multiply every lattice vector by c.
    pub fn scale(&self, c: &FieldElem) -> LatticeE {
        let gens: Vec<FieldElem> = self.basis().iter().map(|b| b * c).collect();
        LatticeE::from_generators(&gens, self.disc)
    }

    /// Coordinates of x in the basis, for rank-2 lattices.
    pub fn coordinates(&self, x: &FieldElem) -> Result<[Rational; 2], BoundaryError> {
        if self.rank() != 2 {
            return Err(BoundaryError::Rank(self.rank()));
        }
        let b = self.basis();
        let (a1, b1, a2, b2) = (b[0].a(), b[0].b(), b[1].a(), b[1].b());
        let det = a1 * b2 - a2 * b1;
        let c1 = (x.a() * b2 - a2 * x.b()) / &det;
        let c2 = (a1 * x.b() - x.a() * b1) / &det;
        Ok([c1, c2])
    }

    pub fn contains(&self, x: &FieldElem) -> Result<bool, BoundaryError> {
        Ok(self.coordinates(x)?.iter().all(|c| c.is_integer()))
    }
}

pub fn lattice_from_generators(params: &[UnipotentParam], disc: Discriminant) -> LatticeE {
    let gens: Vec<FieldElem> = params.iter().map(|p| p.s.clone()).collect();
    LatticeE::from_generators(&gens, disc)
}

/// -<w, v3> / <w, v2>
pub fn cusp_image(w: &Vec3, basis: &CoordBasis) -> Result<FieldElem, BoundaryError> {
    let j = Matrix3E::hermitian_form(basis.disc());
    let [_, v2, v3] = basis.vectors();
    let den = pairing(w, v2, &j);
    let inv = den.inv().ok_or(BoundaryError::DegeneratePairing)?;
    Ok(-&pairing(w, v3, &j) * &inv)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordChange {
    Rescale(FieldElem),
    Translate(FieldElem),
}

pub fn coordinate_change(u: &FieldElem, l: &LatticeE, case: &CoordChange) -> Result<(FieldElem, LatticeE), BoundaryError> {
    match case {
        CoordChange::Rescale(a) => {
            let abar_inv = a.conj().inv().ok_or(BoundaryError::ZeroScale)?;
            let c = &(a * &abar_inv) * &abar_inv;
            Ok((u * &c, l.scale(&c)))
        }
        CoordChange::Translate(s) => Ok((u + s, l.clone())),
    }
}

/// Least n >= 1 with n u in L.
pub fn torsion_order(u: &FieldElem, l: &LatticeE) -> Result<BigInt, BoundaryError> {
    let c = l.coordinates(u)?;
    Ok(c[0].denom().lcm(c[1].denom()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub curve: String,
    pub cusp: String,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardEntry {
    pub curve: String,
    pub cusp: String,
    pub global: String,
}

/// Formal sum of cusp divisors on boundary curves with the map to global cusps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorLedger {
    pub entries: BTreeMap<(String, String), i64>,
    pub pushforward: BTreeMap<(String, String), String>,
}

impl DivisorLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_entry(&mut self, curve: &str, cusp: &str, mult: i64) {
        *self.entries.entry((curve.to_string(), cusp.to_string())).or_insert(0) += mult;
    }

    pub fn map_cusp(&mut self, curve: &str, cusp: &str, global: &str) {
        self.pushforward.insert((curve.to_string(), cusp.to_string()), global.to_string());
    }

    pub fn add(&self, other: &DivisorLedger) -> DivisorLedger {
        let mut out = self.clone();
        for ((c, p), m) in &other.entries {
            out.add_entry(c, p, *m);
        }
        for (k, g) in &other.pushforward {
            out.pushforward.insert(k.clone(), g.clone());
        }
        out
    }

    /// Read JSON lines of {"curve", "cusp", "mult"}.
    pub fn read_entries(&mut self, reader: impl BufRead) -> Result<(), BoundaryError> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: LedgerEntry =
                serde_json::from_str(&line).map_err(|e| BoundaryError::Ledger { line: i + 1, msg: e.to_string() })?;
            self.add_entry(&e.curve, &e.cusp, e.mult);
        }
        Ok(())
    }

    /// Read JSON lines of {"curve", "cusp", "global"}.
    pub fn read_pushforward(&mut self, reader: impl BufRead) -> Result<(), BoundaryError> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: PushforwardEntry =
                serde_json::from_str(&line).map_err(|e| BoundaryError::Ledger { line: i + 1, msg: e.to_string() })?;
            self.map_cusp(&e.curve, &e.cusp, &e.global);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerReport {
    pub deg_per_curve: BTreeMap<String, i64>,
    pub pushforward: BTreeMap<String, i64>,
    pub unmapped: Vec<(String, String)>,
    pub ok_2a: bool,
    pub ok_2b: bool,
}

pub fn ledger_check(ledger: &DivisorLedger) -> LedgerReport {
    let mut deg: BTreeMap<String, i64> = BTreeMap::new();
    let mut push: BTreeMap<String, i64> = BTreeMap::new();
    let mut unmapped = Vec::new();
    for ((curve, cusp), m) in &ledger.entries {
        *deg.entry(curve.clone()).or_insert(0) += m;
        match ledger.pushforward.get(&(curve.clone(), cusp.clone())) {
            Some(g) => *push.entry(g.clone()).or_insert(0) += m,
            None if *m != 0 => unmapped.push((curve.clone(), cusp.clone())),
            None => {}
        }
    }
    let ok_2a = deg.values().all(|&d| d == 0);
    let ok_2b = unmapped.is_empty() && push.values().all(|&d| d == 0);
    LedgerReport { deg_per_curve: deg, pushforward: push, unmapped, ok_2a, ok_2b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{rat, unit_vector};

    fn d3() -> Discriminant {
        Discriminant::new(3).unwrap()
    }

    fn fe(a: i64, b: i64) -> FieldElem {
        FieldElem::new(rat(a, 1), rat(b, 1), d3())
    }

    #[test]
    fn gamma_params_examples() {
        let basis = CoordBasis::standard(d3());
        let id = gamma_params(&Matrix3E::identity(d3()), &basis).unwrap();
        assert_eq!(id, UnipotentParam { r: rat(0, 1), s: fe(0, 0) });
        let m = crate::hecke::unipotent(&fe(2, 0), &fe(1, 0));
        assert_eq!(gamma_params(&m, &basis).unwrap(), UnipotentParam { r: rat(2, 1), s: fe(1, 0) });
        let g1 = UnipotentParam { r: rat(1, 3), s: fe(1, 2) };
        let g2 = UnipotentParam { r: rat(-2, 1), s: FieldElem::new(rat(1, 2), rat(-1, 1), d3()) };
        let prod = gamma_params(&(&g1.matrix() * &g2.matrix()), &basis).unwrap();
        assert_eq!(prod.s, &g1.s + &g2.s);
        assert_eq!(prod.r, &g1.r + &g2.r + UnipotentParam::cocycle(&g1, &g2));
        let bad = Matrix3E::diag(fe(2, 0), fe(1, 0), fe(1, 0));
        assert!(gamma_params(&bad, &basis).is_err());
    }

    #[test]
    fn lattices() {
        let full = LatticeE::from_generators(&[fe(1, 0), fe(0, 1)], d3());
        assert_eq!(full.rank(), 2);
        assert_eq!(full.basis(), vec![fe(1, 0), fe(0, 1)]);
        let sub = LatticeE::from_generators(&[fe(2, 0), fe(0, 2), fe(1, 1)], d3());
        assert_eq!(sub, LatticeE::from_generators(&[fe(1, 1), fe(2, 0)], d3()));
        assert_eq!(sub.basis(), vec![fe(1, 1), fe(0, 2)]);
        assert_eq!(LatticeE::from_generators(&[], d3()).rank(), 0);
        let half = LatticeE::from_generators(&[FieldElem::new(rat(1, 2), rat(0, 1), d3()), fe(1, 0)], d3());
        assert_eq!(half, LatticeE::from_generators(&[FieldElem::new(rat(1, 2), rat(0, 1), d3())], d3()));
    }

    #[test]
    fn cusp_images() {
        let basis = CoordBasis::standard(d3());
        assert!(cusp_image(&unit_vector(1, d3()), &basis).unwrap().is_zero());
        let (a, b) = (fe(2, 1), fe(1, -3));
        let w = [a.clone(), b.clone(), fe(0, 0)];
        let expected = -&(&FieldElem::delta(d3()).inv().unwrap() * &(&a.conj() * &b.conj().inv().unwrap()));
        assert_eq!(cusp_image(&w, &basis).unwrap(), expected);
        let c = fe(3, -1);
        let scaled = [&w[0] * &c, &w[1] * &c, &w[2] * &c];
        assert_eq!(cusp_image(&scaled, &basis).unwrap(), expected);
        assert!(cusp_image(&unit_vector(0, d3()), &basis).is_err());
    }

    #[test]
    fn torsion_examples() {
        let full = LatticeE::from_generators(&[fe(1, 0), fe(0, 1)], d3());
        assert_eq!(torsion_order(&fe(0, 0), &full).unwrap(), BigInt::from(1));
        assert_eq!(torsion_order(&FieldElem::new(rat(1, 3), rat(0, 1), d3()), &full).unwrap(), BigInt::from(3));
        let sub = LatticeE::from_generators(&[fe(1, 1), fe(2, 0)], d3());
        let u = FieldElem::new(rat(1, 6), rat(1, 6), d3());
        assert_eq!(torsion_order(&u, &sub).unwrap(), BigInt::from(6));
        let line = LatticeE::from_generators(&[fe(1, 0)], d3());
        assert!(torsion_order(&u, &line).is_err());
    }

    #[test]
    fn coordinate_changes() {
        let l = LatticeE::from_generators(&[fe(1, 1), fe(2, 0)], d3());
        let u = FieldElem::new(rat(1, 6), rat(1, 6), d3());
        let (u1, l1) = coordinate_change(&u, &l, &CoordChange::Rescale(fe(1, 0))).unwrap();
        assert_eq!((u1, l1), (u.clone(), l.clone()));
        let (u2, l2) = coordinate_change(&u, &l, &CoordChange::Rescale(fe(1, 2))).unwrap();
        assert_eq!(torsion_order(&u2, &l2).unwrap(), torsion_order(&u, &l).unwrap());
        let s = fe(3, -2);
        let (u3, _) = coordinate_change(&u, &l, &CoordChange::Translate(s.clone())).unwrap();
        let (u4, _) = coordinate_change(&u3, &l, &CoordChange::Translate(-&s)).unwrap();
        assert_eq!(u4, u);
    }

    #[test]
    fn ledger_examples() {
        let empty = ledger_check(&DivisorLedger::new());
        assert!(empty.ok_2a && empty.ok_2b);
        let mut single = DivisorLedger::new();
        single.add_entry("C", "P", 1);
        single.map_cusp("C", "P", "g");
        assert!(!ledger_check(&single).ok_2a);
        let mut pair = DivisorLedger::new();
        pair.add_entry("C1", "P", 1);
        pair.add_entry("C1", "Q", -1);
        pair.add_entry("C2", "P", -1);
        pair.add_entry("C2", "Q", 1);
        pair.map_cusp("C1", "P", "g");
        pair.map_cusp("C2", "P", "g");
        pair.map_cusp("C1", "Q", "h");
        pair.map_cusp("C2", "Q", "h");
        let r = ledger_check(&pair);
        assert!(r.ok_2a && r.ok_2b);
        let mut text = DivisorLedger::new();
        text.read_entries("{\"curve\":\"C\",\"cusp\":\"P\",\"mult\":2}\n\n".as_bytes()).unwrap();
        assert_eq!(text.entries[&("C".to_string(), "P".to_string())], 2);
        assert!(!ledger_check(&text).ok_2b);
        assert_eq!(ledger_check(&text).unmapped.len(), 1);
    }
}
