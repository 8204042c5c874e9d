//! Left-coset representatives of the basic Hecke double coset at a ramified odd prime,
//! coset bookkeeping, eigenvalues on unramified principal series and the vanishing chain
//! behind the spherical test-vector argument.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::localzeta::ramified_discriminant;
use crate::quadfield::{similitude, Discriminant, FieldElem, LocalPlace, Matrix3E, PrimeChoice, QuadError, Rational};
use crate::symlaurent::{LaurentPoly, Monomial, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("{p} is not an odd prime ramified in Q(sqrt(-{d}))")]
    NotRamified { p: u64, d: u64 },
    #[error("singular matrix")]
    Singular,
    #[error("representative {0} is not upper triangular, so it has no u*t*K form")]
    NotIwasawa(usize),
    #[error("character value must be invertible")]
    NonUnitCharacter,
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CosetLabel {
    Mxy { x: u64, y: u64 },
    AntiDiag,
    Identity,
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetRep {
    pub g: Matrix3E,
    pub label: CosetLabel,
}

fn int(n: i64, disc: Discriminant) -> FieldElem {
    FieldElem::from_int(n, disc)
}

/// The unipotent M_{x,y} with rows (1, conj(y) delta, x + y conj(y) delta / 2), (0, 1, y), (0, 0, 1).
pub fn unipotent(x: &FieldElem, y: &FieldElem) -> Matrix3E {
    let disc = x.disc();
    let delta = FieldElem::delta(disc);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let corner = x + &(&(y * &y.conj()) * &delta).scale(&half);
    Matrix3E::from_rows([
        [int(1, disc), &y.conj() * &delta, corner],
        [int(0, disc), int(1, disc), y.clone()],
        [int(0, disc), int(0, disc), int(1, disc)],
    ])
}

/// diag(delta^k, 1, (-delta)^-k): the k-th power of the torus element defining the double coset.
///
/// This is the unitary choice: t1 * conj(t3) must equal |t2|^2 = 1 for the form used here, which
/// forces the third entry to be conj(delta)^-k rather than delta^-k.
pub fn torus_power(k: i64, disc: Discriminant) -> Matrix3E {
    let delta = FieldElem::delta(disc);
    Matrix3E::diag(
        delta.pow(k).unwrap(),
        int(1, disc),
        (-delta).pow(-k).unwrap(),
    )
}

pub fn ramified_place(p: u64, disc: Discriminant) -> Result<LocalPlace, HeckeError> {
    let err = HeckeError::NotRamified { p, d: disc.value() };
    if p == 2 {
        return Err(err);
    }
    let place = LocalPlace::new(p, disc)?;
    if !place.is_ramified() {
        return Err(err);
    }
    Ok(place)
}

/// Default ramified place for an odd prime: D = p or 4p.
pub fn default_place(p: u64) -> Result<LocalPlace, HeckeError> {
    let disc = ramified_discriminant(p).map_err(|_| HeckeError::NotRamified { p, d: 0 })?;
    ramified_place(p, disc)
}

/// The p^2 matrices M_{x,y} t for x, y in 0..p, then t^-1.
pub fn mab_representatives(p: u64, disc: Discriminant) -> Result<Vec<CosetRep>, HeckeError> {
    ramified_place(p, disc)?;
    let tau = torus_power(1, disc);
    let mut out = Vec::with_capacity((p * p + 1) as usize);
    for x in 0..p {
        for y in 0..p {
            let m = unipotent(&int(x as i64, disc), &int(y as i64, disc));
            out.push(CosetRep { g: &m * &tau, label: CosetLabel::Mxy { x, y } });
        }
    }
    out.push(CosetRep { g: torus_power(-1, disc), label: CosetLabel::AntiDiag });
    Ok(out)
}

fn integral(place: &LocalPlace, x: &FieldElem) -> bool {
    place.valuation(x, PrimeChoice::Only).unwrap().is_none_or(|v| v >= 0)
}

/// Membership in the maximal compact GU(J)(O): integral with integral inverse and unit similitude.
pub fn in_k(g: &Matrix3E, place: &LocalPlace) -> Result<bool, HeckeError> {
    let ginv = g.inverse().ok_or(HeckeError::Singular)?;
    if !g.rows().iter().flatten().chain(ginv.rows().iter().flatten()).all(|x| integral(place, x)) {
        return Ok(false);
    }
    let j = Matrix3E::hermitian_form(place.disc());
    Ok(match similitude(g, &j)? {
        Some(mu) => crate::ntheory::vp_rational(&mu, place.p()) == Some(0),
        None => false,
    })
}

/// True iff no two representatives lie in the same left K-coset.
pub fn pairwise_distinct(reps: &[CosetRep], place: &LocalPlace) -> Result<bool, HeckeError> {
    let invs: Vec<Matrix3E> =
        reps.iter().map(|r| r.g.inverse().ok_or(HeckeError::Singular)).collect::<Result<_, _>>()?;
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            if in_k(&(&invs[i] * &reps[j].g), place)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Elementary divisor valuations (d1 <= d2 <= d3) over the local ring, from minimal valuations of
/// entries, 2x2 minors and the determinant.
pub fn smith_valuations(g: &Matrix3E, place: &LocalPlace) -> Result<[i64; 3], HeckeError> {
    let minval = |xs: &[FieldElem]| -> i64 {
        xs.iter().filter_map(|x| place.valuation(x, PrimeChoice::Only).unwrap()).min().unwrap()
    };
    let det = g.det();
    if det.is_zero() {
        return Err(HeckeError::Singular);
    }
    let entries: Vec<FieldElem> = g.rows().iter().flatten().cloned().collect();
    let e1 = minval(&entries);
    let e2 = minval(&g.minors2());
    let e3 = place.valuation(&det, PrimeChoice::Only)?.unwrap();
    Ok([e1, e2 - e1, e3 - e2])
}

/// Unramified character of the diagonal torus: t -> c1^ord(t1) * c2^ord(t2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusCharacter {
    pub c1: LaurentPoly,
    pub c2: LaurentPoly,
}

impl TorusCharacter {
    pub fn trivial() -> Self {
        TorusCharacter { c1: LaurentPoly::one(), c2: LaurentPoly::one() }
    }

    /// c1 = c as a formal variable, c2 = 1.
    pub fn symbolic() -> Self {
        TorusCharacter { c1: LaurentPoly::var("c"), c2: LaurentPoly::one() }
    }

    fn eval(&self, t: &[i64; 3]) -> Result<LaurentPoly, HeckeError> {
        let c1 = self.c1.powi(t[0] as i32).ok_or(HeckeError::NonUnitCharacter)?;
        let c2 = self.c2.powi(t[1] as i32).ok_or(HeckeError::NonUnitCharacter)?;
        Ok(&c1 * &c2)
    }
}

/// Weighted list of left cosets g K at one ramified place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    pub place: LocalPlace,
    pub cosets: Vec<(CosetRep, i64)>,
}

impl HeckeElement {
    pub fn zero(place: LocalPlace) -> Self {
        HeckeElement { place, cosets: Vec::new() }
    }

    pub fn identity(place: LocalPlace) -> Self {
        let g = Matrix3E::identity(place.disc());
        HeckeElement { place, cosets: vec![(CosetRep { g, label: CosetLabel::Identity }, 1)] }
    }

    /// The characteristic function of K t K with its p^2 + 1 left cosets.
    pub fn basic(place: LocalPlace) -> Result<Self, HeckeError> {
        let reps = mab_representatives(place.p(), place.disc())?;
        Ok(HeckeElement { place, cosets: reps.into_iter().map(|r| (r, 1)).collect() })
    }

    /// mu(xi): the weighted number of left cosets.
    pub fn mass(&self) -> i64 {
        self.cosets.iter().map(|(_, w)| w).sum()
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        let mut cosets = self.cosets.clone();
        cosets.extend(other.cosets.iter().cloned());
        HeckeElement { place: self.place.clone(), cosets }
    }

    pub fn scale(&self, k: i64) -> HeckeElement {
        HeckeElement { place: self.place.clone(), cosets: self.cosets.iter().map(|(r, w)| (r.clone(), w * k)).collect() }
    }

    /// xi - mu(xi) * 1
    pub fn minus_mass(&self) -> HeckeElement {
        self.add(&HeckeElement::identity(self.place.clone()).scale(-self.mass()))
    }

    /// Convolution on left-coset lists: (g_i K)(h_j K) -> g_i h_j K.
    pub fn convolve(&self, other: &HeckeElement) -> HeckeElement {
        let mut cosets = Vec::with_capacity(self.cosets.len() * other.cosets.len());
        for (a, wa) in &self.cosets {
            for (b, wb) in &other.cosets {
                cosets.push((CosetRep { g: &a.g * &b.g, label: CosetLabel::Product }, wa * wb));
            }
        }
        HeckeElement { place: self.place.clone(), cosets }
    }
}

/// Valuations of the diagonal of an upper-triangular representative.
fn torus_part(g: &Matrix3E, idx: usize, place: &LocalPlace) -> Result<[i64; 3], HeckeError> {
    if !g.is_upper_triangular() {
        return Err(HeckeError::NotIwasawa(idx));
    }
    let mut out = [0i64; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = place.valuation(g.get(i, i), PrimeChoice::Only)?.ok_or(HeckeError::Singular)?;
    }
    Ok(out)
}

/// sum over cosets of weight * chi(t) where each representative is u t with u unipotent.
pub fn eigenvalue_on_unramified_character(h: &HeckeElement, chi: &TorusCharacter) -> Result<LaurentPoly, HeckeError> {
    let mut acc = LaurentPoly::zero();
    for (idx, (rep, w)) in h.cosets.iter().enumerate() {
        let t = torus_part(&rep.g, idx, &h.place)?;
        acc = &acc + &chi.eval(&t)?.scale(&Rational::from_integer(BigInt::from(*w)));
    }
    Ok(acc)
}

/// Whether the left-coset list is consistent with the double coset of t: every representative
/// has the Smith valuations of t and a unit similitude.
pub fn double_coset_consistent(reps: &[CosetRep], place: &LocalPlace) -> Result<bool, HeckeError> {
    let target = smith_valuations(&torus_power(1, place.disc()), place)?;
    let j = Matrix3E::hermitian_form(place.disc());
    for r in reps {
        if smith_valuations(&r.g, place)? != target {
            return Ok(false);
        }
        match similitude(&r.g, &j)? {
            Some(mu) if crate::ntheory::vp_rational(&mu, place.p()) == Some(0) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// One step of the vanishing chain for Lambda(t^k v), t = diag(delta, 1, conj(delta)^-1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingStep {
    pub k: i64,
    /// How the vanishing is forced.
    pub reason: String,
    /// For k < 0: valuation of the (2,3) entry of t^k M t^-k, negative so the character is
    /// nontrivial on it. For k > 0: the coefficient of Lambda(t^k v) in the T^k relation.
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestVectorReport {
    pub steps: Vec<VanishingStep>,
    /// All torus directions up to k_max vanish, contradicting genericity via Iwasawa.
    pub contradiction: bool,
}

/// Propagate Lambda(v) = 0 through the Hecke relations as in the spherical test-vector argument.
pub fn testvector_support_check(h: &HeckeElement, k_max: i64) -> Result<TestVectorReport, HeckeError> {
    if h.cosets.is_empty() || k_max <= 0 {
        return Ok(TestVectorReport { steps: Vec::new(), contradiction: false });
    }
    let place = &h.place;
    let disc = place.disc();
    let c = Var::new("c");
    let relation = eigenvalue_on_unramified_character(h, &TorusCharacter::symbolic())?;
    let mut steps = Vec::new();
    for k in 1..=k_max {
        // t^-k M_{0, delta^(k-1)} t^k has (2,3) entry of valuation -1
        let y = FieldElem::delta(disc).pow(k - 1).unwrap();
        let m = unipotent(&int(0, disc), &y);
        let conj = &(&torus_power(-k, disc) * &m) * &torus_power(k, disc);
        let v = place.valuation(conj.get(1, 2), PrimeChoice::Only)?.unwrap();
        let ok = v < 0 && in_k(&m, place)?;
        steps.push(VanishingStep {
            k: -k,
            reason: if ok { "conjugated unipotent is nonintegral".into() } else { "no witness".into() },
            witness: format!("ord = {v}"),
        });
        if !ok {
            return Ok(TestVectorReport { steps, contradiction: false });
        }
    }
    let mut known: Vec<i64> = (-k_max..=0).collect();
    let mut power = LaurentPoly::one();
    for k in 1..=k_max {
        power = &power * &relation;
        let lead = power.coeff(&Monomial::var(c, k as i32));
        let higher = power.terms().any(|(m, _)| m.exp(c) > k as i32);
        let lower_known = power.terms().all(|(m, _)| {
            let e = m.exp(c) as i64;
            e == k || known.contains(&e)
        });
        let ok = !lead.is_zero() && !higher && lower_known;
        steps.push(VanishingStep {
            k,
            reason: if ok { "T^k relation with lower terms already zero".into() } else { "relation does not isolate this term".into() },
            witness: format!("coefficient {lead}"),
        });
        if !ok {
            return Ok(TestVectorReport { steps, contradiction: false });
        }
        known.push(k);
    }
    Ok(TestVectorReport { steps, contradiction: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_list_shape() {
        let place = default_place(3).unwrap();
        let reps = mab_representatives(3, place.disc()).unwrap();
        assert_eq!(reps.len(), 10);
        assert_eq!(reps[0].g, torus_power(1, place.disc()));
        let j = Matrix3E::hermitian_form(place.disc());
        for r in &reps {
            assert_eq!(similitude(&r.g, &j).unwrap(), Some(Rational::one()));
        }
        assert!(mab_representatives(5, Discriminant::new(3).unwrap()).is_err());
    }

    #[test]
    fn membership_in_k() {
        let place = default_place(3).unwrap();
        let disc = place.disc();
        assert!(in_k(&Matrix3E::identity(disc), &place).unwrap());
        assert!(!in_k(&torus_power(1, disc), &place).unwrap());
        for (x, y) in [(0, 1), (2, 1), (1, 2)] {
            assert!(in_k(&unipotent(&int(x, disc), &int(y, disc)), &place).unwrap());
        }
    }

    #[test]
    fn distinctness() {
        let place = default_place(3).unwrap();
        let reps = mab_representatives(3, place.disc()).unwrap();
        assert!(pairwise_distinct(&reps, &place).unwrap());
        let mut dup = reps.clone();
        dup.push(reps[4].clone());
        assert!(!pairwise_distinct(&dup, &place).unwrap());
        let m10 = unipotent(&int(1, place.disc()), &int(0, place.disc()));
        let moved = CosetRep { g: &reps[4].g * &m10, label: CosetLabel::Product };
        assert!(!pairwise_distinct(&[reps[4].clone(), moved], &place).unwrap());
        assert!(double_coset_consistent(&reps, &place).unwrap());
    }

    #[test]
    fn eigenvalues() {
        let place = default_place(3).unwrap();
        let t = HeckeElement::basic(place).unwrap();
        assert_eq!(eigenvalue_on_unramified_character(&t, &TorusCharacter::trivial()).unwrap(), LaurentPoly::from_int(10));
        let sym = eigenvalue_on_unramified_character(&t, &TorusCharacter::symbolic()).unwrap();
        assert_eq!(sym, LaurentPoly::parse("9*c + c^-1").unwrap());
        let diff = eigenvalue_on_unramified_character(&t.minus_mass(), &TorusCharacter::trivial()).unwrap();
        assert!(diff.is_zero());
        let sq = t.convolve(&t);
        assert_eq!(sq.mass(), 100);
        assert_eq!(eigenvalue_on_unramified_character(&sq, &TorusCharacter::symbolic()).unwrap(), sym.pow(2));
    }

    #[test]
    fn test_vector_chain() {
        let place = default_place(3).unwrap();
        let t = HeckeElement::basic(place.clone()).unwrap();
        let r1 = testvector_support_check(&t, 1).unwrap();
        assert!(r1.contradiction);
        assert_eq!(r1.steps.last().unwrap().witness, "coefficient 9");
        let r3 = testvector_support_check(&t, 3).unwrap();
        assert!(r3.contradiction);
        assert_eq!(r3.steps.iter().filter(|s| s.k > 0).count(), 3);
        let empty = testvector_support_check(&HeckeElement::zero(place), 3).unwrap();
        assert!(empty.steps.is_empty());
    }
}
