//! Square classes of abelian number fields.
//!
//! A square class is a nonzero field element up to multiplication by squares.
//! This module decides squareness with certificates in both directions,
//! transports classes along norms, computes the dyadic data needed for the
//! odd-class predicate, and locates the abelian field generated by a square
//! root of a class representative.

pub mod dyadic;
mod recognize;

pub use dyadic::{dyadic_places, dyadic_valuation, is_odd_class, DyadicPlace};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, squarefree_part, Primes};
use crate::cyclo::embed::{certified_real_sign, DEFAULT_PRECISION};
use crate::cyclo::{AbelianField, CycElt};
use crate::error::{invariant, Error, Result};
use recognize::{legendre_rational, nonresidue_certificate, padic_sqrt, PadicOutcome};

/// Number of candidate primes tried before squareness is declared undecided.
pub const CERTIFICATE_PRIME_CAP: usize = 200;

/// A square class: `rep · (field^×)²`.
///
/// Representatives are algebraic integers (cleared by a rational square); over
/// Q the representative is the unique squarefree integer of the class.
#[derive(Clone, Debug, Serialize)]
pub struct SquareClass {
    pub field: AbelianField,
    pub rep: CycElt,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd: Option<bool>,
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            field: AbelianField,
            rep: CycElt,
            #[serde(default)]
            odd: Option<bool>,
        }
        let w = Wire::deserialize(d)?;
        if w.rep.is_zero() {
            return Err(serde::de::Error::custom("square class of zero"));
        }
        if !w.field.contains(&w.rep) {
            return Err(serde::de::Error::custom(
                "representative lies outside the field",
            ));
        }
        Ok(SquareClass {
            field: w.field,
            rep: w.rep,
            odd: w.odd,
        })
    }
}

/// Witness for non-squareness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonSquareCertificate {
    /// A real embedding (Galois index k) where the element is negative.
    NegativeEmbedding { embedding: u64 },
    /// An odd unramified prime whose residue field exposes a nonresidue.
    NonresiduePrime { prime: u64 },
}

/// Outcome of a squareness decision.
#[derive(Clone, Debug)]
pub enum SquareTest {
    /// Verified by exact squaring: root² equals the element.
    Square { root: CycElt },
    NotSquare { certificate: NonSquareCertificate },
}

impl SquareTest {
    pub fn as_bool(&self) -> bool {
        matches!(self, SquareTest::Square { .. })
    }
}

/// Explicit square root of a squarefree integer inside a cyclotomic field,
/// assembled from quadratic Gauss sums.
pub fn explicit_rational_sqrt(s: &BigInt) -> CycElt {
    assert!(!s.is_zero(), "square root of zero class");
    let mut y = CycElt::one(1);
    let s_u: u64 = s.abs().try_into().expect("squarefree representative fits u64");
    for (p, k) in factor_u64(s_u) {
        assert_eq!(k, 1, "representative must be squarefree");
        if p == 2 {
            // sqrt(2) = zeta_8 + zeta_8^-1
            y = &y * &(&CycElt::root_of_unity(8, 1) + &CycElt::root_of_unity(8, -1));
        } else {
            // Gauss sum: (sum over k of (k|p) zeta_p^k)^2 = (-1)^((p-1)/2) p
            let mut g = CycElt::zero(p);
            for k in 1..p {
                let leg = legendre_rational(&BigRational::from_integer(k.into()), p);
                let term = CycElt::root_of_unity(p, k as i64);
                g = if leg == 1 { &g + &term } else { &g - &term };
            }
            y = &y * &g;
        }
    }
    let target = CycElt::from_rational(BigRational::from_integer(s.clone()));
    let sq = &y * &y;
    if sq != target {
        // off by the factor -1: rotate by i
        y = &y * &CycElt::root_of_unity(4, 1);
        debug_assert_eq!(&y * &y, target);
    }
    y.minimal_cyclotomic()
}

/// The quadratic field Q(√s) for squarefree s ≠ 0, 1.
pub fn quadratic_field(s: &BigInt) -> AbelianField {
    AbelianField::generated_by(&[explicit_rational_sqrt(s)])
}

fn rational_square_test(field: &AbelianField, r: &BigRational) -> Result<SquareTest> {
    let s = squarefree_part(&(r.numer() * r.denom()));
    if s.is_one() {
        // r = (t/den)² with t² = num·den
        let t = crate::arith::exact_sqrt(&(r.numer() * r.denom())).unwrap();
        let root = CycElt::from_rational(BigRational::new(t, r.denom().clone()));
        return Ok(SquareTest::Square { root });
    }
    let y = explicit_rational_sqrt(&s);
    if field.contains(&y) {
        // r = s·(t/den)² with t² = num·den/s
        let t = crate::arith::exact_sqrt(&((r.numer() * r.denom()) / &s)).unwrap();
        let root = y.scale(&BigRational::new(t, r.denom().clone()));
        return Ok(SquareTest::Square { root });
    }
    if s.is_negative() && field.is_real() {
        return Ok(SquareTest::NotSquare {
            certificate: NonSquareCertificate::NegativeEmbedding { embedding: 1 },
        });
    }
    // scalar nonresidue scan at primes splitting completely in the field
    let n = field.conductor();
    let mut tried = 0usize;
    for q in Primes::new() {
        if tried >= CERTIFICATE_PRIME_CAP {
            break;
        }
        if q == 2 || (n > 0 && n % q == 0) || (&s % BigInt::from(q)).is_zero() {
            continue;
        }
        if n > 1 && !field.stabilizer().contains(&(q % n)) {
            continue;
        }
        tried += 1;
        if legendre_rational(&BigRational::from_integer(s.clone()), q) == -1 {
            return Ok(SquareTest::NotSquare {
                certificate: NonSquareCertificate::NonresiduePrime { prime: q },
            });
        }
    }
    Err(Error::Undecided {
        modulus: field.conductor(),
        primes_tried: tried,
        max_precision: 0,
    })
}

/// Decides whether x is a square in the field, with a certificate either way.
pub fn is_square(x: &CycElt, field: &AbelianField) -> Result<SquareTest> {
    if x.is_zero() {
        return Err(Error::InvalidInput("squareness of zero is undefined".into()));
    }
    if !field.contains(x) {
        return Err(Error::NotInField(field.conductor()));
    }
    let xm = x.minimal_cyclotomic();
    if let Some(r) = xm.as_rational() {
        return rational_square_test(field, &r);
    }
    // real fields: a certified negative embedding refutes squareness
    if field.is_real() {
        let n = field.conductor();
        let xl = xm.lift(n)?;
        for k in field.embedding_representatives() {
            if certified_real_sign(&xl, k, DEFAULT_PRECISION)? < 0 {
                return Ok(SquareTest::NotSquare {
                    certificate: NonSquareCertificate::NegativeEmbedding { embedding: k },
                });
            }
        }
    }
    let mut max_precision = 0;
    match padic_sqrt(field, &xm)? {
        PadicOutcome::Root(root) => return Ok(SquareTest::Square { root }),
        PadicOutcome::Nonresidue(prime) => {
            return Ok(SquareTest::NotSquare {
                certificate: NonSquareCertificate::NonresiduePrime { prime },
            })
        }
        PadicOutcome::Inconclusive { max_precision: m } => max_precision = m,
    }
    let (tried, cert) = nonresidue_certificate(field, &xm, CERTIFICATE_PRIME_CAP)?;
    if let Some(prime) = cert {
        return Ok(SquareTest::NotSquare {
            certificate: NonSquareCertificate::NonresiduePrime { prime },
        });
    }
    Err(Error::Undecided {
        modulus: field.conductor(),
        primes_tried: tried,
        max_precision,
    })
}

/// Canonical square class of x in K.
pub fn class_of(x: &CycElt, field: &AbelianField) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::InvalidInput("square class of zero".into()));
    }
    if !field.contains(x) {
        return Err(Error::NotInField(field.conductor()));
    }
    let xm = x.minimal_cyclotomic();
    if let Some(r) = xm.as_rational() {
        let s = squarefree_part(&(r.numer() * r.denom()));
        return Ok(SquareClass {
            field: field.clone(),
            rep: CycElt::from_rational(BigRational::from_integer(s)),
            odd: None,
        });
    }
    // clear denominators by a square, then remove the square part of the
    // integer content
    let den = xm.denominator_lcm();
    let cleared = xm.scale(&BigRational::from_integer(&den * &den));
    let content = cleared
        .coeffs()
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
    let mut square_part = BigInt::one();
    if content > BigInt::one() {
        let free = squarefree_part(&content);
        square_part = crate::arith::exact_sqrt(&(&content / &free)).expect("square part exact");
    }
    let rep = cleared.scale(&BigRational::new(
        BigInt::one(),
        &square_part * &square_part,
    ));
    Ok(SquareClass {
        field: field.clone(),
        rep,
        odd: None,
    })
}

/// Class equality: the product of representatives is a square.
pub fn classes_equal(a: &SquareClass, b: &SquareClass) -> Result<bool> {
    if a.field != b.field {
        return Err(Error::InvalidInput(
            "square classes live in different fields".into(),
        ));
    }
    Ok(is_square(&(&a.rep * &b.rep), &a.field)?.as_bool())
}

/// Norm of a square class down to a subfield K ⊆ L.
pub fn class_norm(c: &SquareClass, lower: &AbelianField) -> Result<SquareClass> {
    if !lower.is_subfield_of(&c.field) {
        return Err(Error::NotSubfield(
            format!("{lower}"),
            format!("{}", c.field),
        ));
    }
    let n = lower.relative_norm_from(&c.field, &c.rep)?;
    class_of(&n, lower)
}

/// Three-way split of x against a fixed nonsquare class δ:
/// squares of K, the δ-coset, or outside both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Square,
    DeltaBranch,
    Neither,
}

pub fn squares_branch(x: &CycElt, field: &AbelianField, delta: &SquareClass) -> Result<Branch> {
    if delta.field != *field {
        return Err(Error::InvalidInput("δ lives in a different field".into()));
    }
    if is_square(x, field)?.as_bool() {
        return Ok(Branch::Square);
    }
    if is_square(&(x * &delta.rep), field)?.as_bool() {
        return Ok(Branch::DeltaBranch);
    }
    Ok(Branch::Neither)
}

/// The discriminant field K[√δ]: degree 1 or 2 over the base, together with
/// the abelian field realizing it when the search succeeds.
#[derive(Clone, Debug, Serialize)]
pub struct DiscField {
    pub base: AbelianField,
    pub class: SquareClass,
    pub degree: u8,
    /// The abelian field K(√rep) when found within the conductor search
    /// bound; None means "non-abelian or not found", which is reported but
    /// not fatal.
    pub field: Option<AbelianField>,
}

pub fn disc_field(c: &SquareClass) -> Result<DiscField> {
    if let SquareTest::Square { .. } = is_square(&c.rep, &c.field)? {
        return Ok(DiscField {
            base: c.field.clone(),
            class: c.clone(),
            degree: 1,
            field: Some(c.field.clone()),
        });
    }
    let rep_min = c.rep.minimal_cyclotomic();
    if let Some(r) = rep_min.as_rational() {
        let s = squarefree_part(&(r.numer() * r.denom()));
        let f = quadratic_field(&s);
        return Ok(DiscField {
            base: c.field.clone(),
            class: c.clone(),
            degree: 2,
            field: Some(c.field.compositum(&f)),
        });
    }
    // Non-rational representative: search cyclotomic conductors that are
    // multiples of the base conductor, seeded by the primes of the norm.
    let norm = AbelianField::rationals()
        .relative_norm_from(&c.field, &c.rep)?
        .as_rational()
        .ok_or_else(|| invariant("absolute norm is not rational"))?;
    let mut radical = BigInt::one();
    let mut m = (norm.numer() * norm.denom()).abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            radical *= &p;
            while (&m % &p).is_zero() {
                m /= &p;
            }
        }
        p += 1;
        if p > BigInt::from(1_000_000) {
            break;
        }
    }
    if m > BigInt::one() {
        radical *= &m;
    }
    let radical_u: u64 = match radical.clamp(BigInt::one(), BigInt::from(u64::MAX)).try_into() {
        Ok(v) => v,
        Err(_) => 1,
    };
    let base_n = c.field.conductor().max(1);
    let mut candidates: Vec<u64> = crate::arith::divisors_u64(8 * radical_u)
        .into_iter()
        .map(|d| {
            let mut cnd = base_n * d;
            if cnd % 4 == 2 {
                cnd /= 2;
            }
            cnd
        })
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut realization = None;
    for cand in candidates {
        if cand > 512 {
            break;
        }
        let cyc = AbelianField::cyclotomic(cand);
        match padic_sqrt(&cyc, &c.rep)? {
            PadicOutcome::Root(y) => {
                let mut gens: Vec<CycElt> = c.field.basis().to_vec();
                gens.push(y);
                realization = Some(AbelianField::generated_by(&gens));
                break;
            }
            PadicOutcome::Nonresidue(_) | PadicOutcome::Inconclusive { .. } => continue,
        }
    }
    Ok(DiscField {
        base: c.field.clone(),
        class: c.clone(),
        degree: 2,
        field: realization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::delta_p;

    fn q() -> AbelianField {
        AbelianField::rationals()
    }

    fn int(v: i64) -> CycElt {
        CycElt::from_int(v)
    }

    #[test]
    fn class_of_examples() {
        let c = class_of(&int(18), &q()).unwrap();
        assert_eq!(c.rep.as_rational(), Some(BigRational::from_integer(2.into())));
        let c = class_of(&int(-27), &q()).unwrap();
        assert_eq!(
            c.rep.as_rational(),
            Some(BigRational::from_integer(BigInt::from(-3)))
        );
        // 4·delta_5 over Q(sqrt 5) is the class of delta_5
        let k = AbelianField::fixed_field(5, &[4]);
        let c1 = class_of(&delta_p(5).scale(&BigRational::from_integer(4.into())), &k).unwrap();
        let c2 = class_of(&delta_p(5), &k).unwrap();
        assert!(classes_equal(&c1, &c2).unwrap());
    }

    #[test]
    fn explicit_square_roots() {
        for s in [-1i64, 2, -2, 3, -3, 5, 6, -7, 10, 15, -30] {
            let y = explicit_rational_sqrt(&BigInt::from(s));
            assert_eq!(
                (&y * &y).as_rational(),
                Some(BigRational::from_integer(s.into())),
                "sqrt of {s}"
            );
        }
    }

    #[test]
    fn quadratic_field_conductors() {
        assert_eq!(quadratic_field(&BigInt::from(-3)).conductor(), 3);
        assert_eq!(quadratic_field(&BigInt::from(5)).conductor(), 5);
        assert_eq!(quadratic_field(&BigInt::from(-1)).conductor(), 4);
        assert_eq!(quadratic_field(&BigInt::from(2)).conductor(), 8);
        assert_eq!(quadratic_field(&BigInt::from(-2)).conductor(), 8);
        assert_eq!(quadratic_field(&BigInt::from(3)).conductor(), 12);
        assert_eq!(quadratic_field(&BigInt::from(-5)).conductor(), 20);
    }

    #[test]
    fn squareness_with_certificates() {
        // 5 is a square in Q(sqrt 5)
        let k = AbelianField::fixed_field(5, &[4]);
        match is_square(&int(5), &k).unwrap() {
            SquareTest::Square { root } => assert_eq!((&root * &root), int(5)),
            other => panic!("expected square, got {other:?}"),
        }
        // -1 in Q: negative at the real place
        match is_square(&int(-1), &q()).unwrap() {
            SquareTest::NotSquare {
                certificate: NonSquareCertificate::NegativeEmbedding { .. },
            } => {}
            other => panic!("unexpected {other:?}"),
        }
        // (5+sqrt5)/2 = -delta_5/1 … delta_5 itself is totally negative
        match is_square(&delta_p(5), &k).unwrap() {
            SquareTest::NotSquare { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
        // but delta_5 is a square one level up
        assert!(is_square(&delta_p(5), &AbelianField::cyclotomic(5))
            .unwrap()
            .as_bool());
        // -1 in Q(zeta_8): square (i = zeta_4)
        assert!(is_square(&int(-1), &AbelianField::cyclotomic(8))
            .unwrap()
            .as_bool());
        // -1 in Q(sqrt -2): not a square; needs an inert-prime certificate
        let k8 = AbelianField::generated_by(&[explicit_rational_sqrt(&BigInt::from(-2))]);
        match is_square(&int(-1), &k8).unwrap() {
            SquareTest::NotSquare {
                certificate: NonSquareCertificate::NonresiduePrime { prime },
            } => assert_eq!(prime % 8, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn norm_examples() {
        let k = AbelianField::fixed_field(5, &[4]);
        let c = class_of(&delta_p(5), &k).unwrap();
        let n = class_norm(&c, &q()).unwrap();
        assert_eq!(n.rep.as_rational(), Some(BigRational::from_integer(5.into())));
        // class of -3 = class of (1-zeta_3)²·(-1) over Q(zeta_3) norms to 1
        let l = AbelianField::cyclotomic(3);
        let c = class_of(&int(-3), &l).unwrap();
        let n = class_norm(&c, &q()).unwrap();
        assert_eq!(n.rep.as_rational(), Some(BigRational::from_integer(1.into())));
        // norming the unit class is the unit class
        let c1 = class_of(&int(1), &l).unwrap();
        assert!(class_norm(&c1, &q()).unwrap().rep.is_one());
    }

    #[test]
    fn branch_classification() {
        let delta = class_of(&int(5), &q()).unwrap();
        assert_eq!(squares_branch(&int(20), &q(), &delta).unwrap(), Branch::DeltaBranch);
        assert_eq!(squares_branch(&int(9), &q(), &delta).unwrap(), Branch::Square);
        assert_eq!(squares_branch(&int(3), &q(), &delta).unwrap(), Branch::Neither);
    }

    #[test]
    fn disc_fields() {
        let c = class_of(&int(1), &q()).unwrap();
        let df = disc_field(&c).unwrap();
        assert_eq!(df.degree, 1);
        assert!(df.field.unwrap().is_rationals());

        let c = class_of(&int(-3), &q()).unwrap();
        let df = disc_field(&c).unwrap();
        assert_eq!(df.degree, 2);
        assert_eq!(df.field.unwrap().conductor(), 3);

        let k = AbelianField::fixed_field(5, &[4]);
        let c = class_of(&delta_p(5), &k).unwrap();
        let df = disc_field(&c).unwrap();
        assert_eq!(df.degree, 2);
        let f = df.field.unwrap();
        assert_eq!(f.conductor(), 5);
        assert_eq!(f.degree(), 4);
    }

    #[test]
    fn square_class_serde() {
        let k = AbelianField::fixed_field(5, &[4]);
        let c = class_of(&delta_p(5), &k).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: SquareClass = serde_json::from_str(&json).unwrap();
        assert!(classes_equal(&c, &back).unwrap());
        assert!(json.contains("\"field\"") && json.contains("\"rep\""));
        // odd flag serializes only when present
        assert!(!json.contains("odd"));
        // zero representative rejected
        let bad = r#"{"field":{"n":1,"stab_gens":[1]},"rep":{"n":1,"coeffs":[[0,1]]}}"#;
        assert!(serde_json::from_str::<SquareClass>(bad).is_err());
    }
}
