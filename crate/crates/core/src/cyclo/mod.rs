//! Elements of cyclotomic fields `Q(zeta_n)` in the power basis
//! `1, zeta, ..., zeta^(phi(n)-1)`, with exact rational coefficients.
//!
//! All arithmetic reduces modulo the n-th cyclotomic polynomial. Mixed moduli
//! are handled by lifting both operands to `Q(zeta_lcm)`; nothing is ever
//! rounded. `minimal_cyclotomic` rewrites an element at its conductor.

mod elt_serde;
pub mod embed;
pub mod field;

pub use field::AbelianField;

use crate::arith::{divisors_u64, gcd_u64, lcm_u64, phi_u64, units_mod};
use crate::error::{invariant, Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficients of the n-th cyclotomic polynomial (index = degree; monic).
///
/// Computed by exact division of `x^n - 1` by the cyclotomic polynomials of
/// the proper divisors of n, and cached. Degrees here stay tiny.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let value: Vec<BigInt> = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // x^n - 1
        let mut num = vec![BigInt::zero(); (n + 1) as usize];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        let mut rem = num;
        for d in divisors_u64(n) {
            if d < n {
                let phid = cyclotomic_polynomial(d);
                rem = int_poly_exact_div(&rem, &phid);
            }
        }
        rem
    };
    debug_assert_eq!(value.len() as u64 - 1, phi_u64(n));
    let arc = Arc::new(value);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Exact division of integer polynomials (b monic divides a).
fn int_poly_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    assert!(b.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db {
        let lead = rem.last().unwrap().clone();
        let shift = rem.len() - 1 - db;
        if !lead.is_zero() {
            quot[shift] = lead.clone();
            for (i, bc) in b.iter().enumerate() {
                let idx = shift + i;
                let t = &lead * bc;
                rem[idx] -= t;
            }
        }
        debug_assert!(rem.last().unwrap().is_zero());
        rem.pop();
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "int_poly_exact_div: division not exact"
    );
    quot
}

/// Remainder of a rational polynomial modulo a monic integer polynomial.
fn poly_rem_monic(mut a: Vec<BigRational>, modp: &[BigInt]) -> Vec<BigRational> {
    let dm = modp.len() - 1;
    while a.len() > dm {
        let lead = a.last().unwrap().clone();
        let shift = a.len() - 1 - dm;
        if !lead.is_zero() {
            for (i, mc) in modp.iter().enumerate().take(dm) {
                let t = &lead * BigRational::from(mc.clone());
                a[shift + i] -= t;
            }
        }
        a.pop();
    }
    a.resize(dm, BigRational::zero());
    a
}

/// An element of `Q(zeta_n)`, stored in the power basis of length phi(n).
///
/// The modulus is part of the value; equality lifts both sides to a common
/// cyclotomic field first, so `zeta_6` at modulus 6 equals `-zeta_3^2` at
/// modulus 3.
#[derive(Debug, Clone)]
pub struct CycElt {
    n: u64,
    coeffs: Vec<BigRational>,
}

impl CycElt {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn zero(n: u64) -> Self {
        CycElt {
            n,
            coeffs: vec![BigRational::zero(); phi_u64(n) as usize],
        }
    }

    pub fn one(n: u64) -> Self {
        Self::from_rational_at(BigRational::one(), n)
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_rational_at(q, 1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(v)))
    }

    pub fn from_rational_at(q: BigRational, n: u64) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[0] = q;
        e
    }

    /// zeta_n^k (k arbitrary, taken mod n).
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        let kk = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![BigRational::zero(); kk + 1];
        poly[kk] = BigRational::one();
        Self::from_poly(n, poly)
    }

    /// Build from a polynomial in zeta_n of arbitrary degree (reduces).
    pub fn from_poly(n: u64, poly: Vec<BigRational>) -> Self {
        let modp = cyclotomic_polynomial(n);
        let coeffs = poly_rem_monic(poly, &modp);
        CycElt { n, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Some(q) iff the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|q| q.is_one()).unwrap_or(false)
    }

    /// Lift into Q(zeta_m); n must divide m.
    pub fn lift(&self, m: u64) -> Result<CycElt> {
        if m == self.n {
            return Ok(self.clone());
        }
        if m % self.n != 0 {
            return Err(Error::NotInField(m));
        }
        let s = (m / self.n) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * s + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[j * s] = c.clone();
            }
        }
        Ok(CycElt::from_poly(m, poly))
    }

    /// Lift a pair to their smallest common cyclotomic field.
    pub fn common(a: &CycElt, b: &CycElt) -> (CycElt, CycElt) {
        let m = lcm_u64(a.n, b.n);
        (a.lift(m).unwrap(), b.lift(m).unwrap())
    }

    /// Apply the Galois automorphism zeta -> zeta^k; requires gcd(k, n) = 1.
    pub fn galois(&self, k: u64) -> CycElt {
        if self.n <= 2 {
            return self.clone();
        }
        let k = k % self.n;
        assert_eq!(
            gcd_u64(k, self.n),
            1,
            "galois: {k} is not a unit mod {}",
            self.n
        );
        let mut poly = vec![BigRational::zero(); self.n as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let idx = ((j as u64 * k) % self.n) as usize;
                poly[idx] += c;
            }
        }
        CycElt::from_poly(self.n, poly)
    }

    /// Complex conjugation (zeta -> zeta^{-1}).
    pub fn conj(&self) -> CycElt {
        if self.n <= 2 {
            return self.clone();
        }
        self.galois(self.n - 1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn pow(&self, e: i64) -> Result<CycElt> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = CycElt::one(self.n);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the
    /// (irreducible) cyclotomic polynomial.
    pub fn inv(&self) -> Result<CycElt> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.n));
        }
        if let Some(q) = self.as_rational() {
            return Ok(CycElt::from_rational_at(q.recip(), self.n));
        }
        let modp: Vec<BigRational> = cyclotomic_polynomial(self.n)
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let (g, u) = poly_half_xgcd(&self.coeffs, &modp);
        // cyclotomic polynomials are irreducible over Q, so g is a nonzero constant
        if g.len() != 1 || g[0].is_zero() {
            return Err(invariant(format!(
                "gcd with cyclotomic polynomial of index {} not constant",
                self.n
            )));
        }
        let scale = g[0].recip();
        let coeffs = u.into_iter().map(|c| c * &scale).collect::<Vec<_>>();
        let out = CycElt::from_poly(self.n, coeffs);
        debug_assert!((&out * self).is_one());
        Ok(out)
    }

    /// The least d | n with the element in Q(zeta_d), rewritten at modulus d.
    pub fn minimal_cyclotomic(&self) -> CycElt {
        for d in divisors_u64(self.n) {
            if d == self.n {
                break;
            }
            if self.is_in_subcyclotomic(d) {
                return self.express_at(d);
            }
        }
        self.clone()
    }

    /// Does the element lie in Q(zeta_d) (d | n)?
    fn is_in_subcyclotomic(&self, d: u64) -> bool {
        assert_eq!(self.n % d, 0);
        for k in units_mod(self.n) {
            if d == 1 || k % d == 1 {
                if self.galois(k.max(1)) != *self {
                    return false;
                }
            }
        }
        true
    }

    /// Rewrite at modulus d | n assuming membership (solves a linear system
    /// against the lifted power basis of Q(zeta_d)).
    fn express_at(&self, d: u64) -> CycElt {
        if d == self.n {
            return self.clone();
        }
        let phid = phi_u64(d) as usize;
        let phin = self.coeffs.len();
        // columns: lift of zeta_d^i, i < phi(d)
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(phid);
        for i in 0..phid {
            let b = CycElt::root_of_unity(d, i as i64).lift(self.n).unwrap();
            cols.push(b.coeffs);
        }
        let rhs = self.coeffs.clone();
        let sol = solve_exact(&cols, &rhs, phin)
            .expect("express_at: membership was checked, system must be consistent");
        CycElt { n: d, coeffs: sol }
    }

    /// Scale by a rational.
    pub fn scale(&self, q: &BigRational) -> CycElt {
        CycElt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Least common denominator of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut d = BigInt::one();
        for c in &self.coeffs {
            let cd = c.denom();
            d = &d / num::Integer::gcd(&d, cd) * cd;
        }
        d.abs()
    }
}

/// Solve sum_i x_i * cols[i] = rhs exactly (cols of length dim); returns the
/// unique solution if the system is consistent and the columns independent.
pub(crate) fn solve_exact(
    cols: &[Vec<BigRational>],
    rhs: &[BigRational],
    dim: usize,
) -> Option<Vec<BigRational>> {
    let ncols = cols.len();
    // augmented matrix: dim rows, ncols + 1 columns
    let mut m: Vec<Vec<BigRational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut r0 = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r0..dim).find(|&r| !m[r][c].is_zero()) else {
            return None; // dependent columns: refuse (callers use bases)
        };
        m.swap(r0, pr);
        let inv = m[r0][c].recip();
        for x in m[r0].iter_mut() {
            *x *= &inv;
        }
        for r in 0..dim {
            if r != r0 && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for c2 in c..=ncols {
                    let t = &f * &m[r0][c2];
                    m[r][c2] -= t;
                }
            }
        }
        pivot_rows.push(r0);
        r0 += 1;
    }
    // consistency: remaining rows must have zero rhs
    for r in r0..dim {
        if !m[r][ncols].is_zero() {
            return None;
        }
    }
    Some((0..ncols).map(|c| m[pivot_rows[c]][ncols].clone()).collect())
}

/// Extended Euclid returning (gcd, u) with u*a = gcd (mod b).
fn poly_half_xgcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let trim = |mut v: Vec<BigRational>| -> Vec<BigRational> {
        while v.len() > 1 && v.last().unwrap().is_zero() {
            v.pop();
        }
        if v.is_empty() {
            v.push(BigRational::zero());
        }
        v
    };
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut u0 = vec![BigRational::one()];
    let mut u1 = vec![BigRational::zero()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, rem) = poly_divmod(&r0, &r1);
        let new_u = poly_sub(&u0, &poly_mul(&q, &u1));
        r0 = r1;
        r1 = trim(rem);
        u0 = u1;
        u1 = trim(new_u);
    }
    (r0, u0)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                let t = x * y;
                out[i + j] += t;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = b.len() - 1;
    let lead = b[db].clone();
    assert!(!lead.is_zero());
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() > db {
        let top = rem.last().unwrap().clone();
        let shift = rem.len() - 1 - db;
        if !top.is_zero() {
            let q = &top / &lead;
            quot[shift] = q.clone();
            for (i, bc) in b.iter().enumerate() {
                let t = &q * bc;
                rem[shift + i] -= t;
            }
        }
        rem.pop();
    }
    while rem.len() > 1 && rem.last().unwrap().is_zero() {
        rem.pop();
    }
    if rem.is_empty() {
        rem.push(BigRational::zero());
    }
    (quot, rem)
}

impl PartialEq for CycElt {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycElt::common(self, other);
        a.coeffs == b.coeffs
    }
}
impl Eq for CycElt {}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &CycElt {
            type Output = CycElt;
            fn $method(self, rhs: &CycElt) -> CycElt {
                let (a, b) = CycElt::common(self, rhs);
                binop_same_modulus(&a, &b, stringify!($op))
            }
        }
        impl std::ops::$trait for CycElt {
            type Output = CycElt;
            fn $method(self, rhs: CycElt) -> CycElt {
                (&self).$method(&rhs)
            }
        }
    };
}

fn binop_same_modulus(a: &CycElt, b: &CycElt, op: &str) -> CycElt {
    debug_assert_eq!(a.n, b.n);
    match op {
        "+" => CycElt {
            n: a.n,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        },
        "-" => CycElt {
            n: a.n,
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        },
        "*" => CycElt::from_poly(a.n, poly_mul(&a.coeffs, &b.coeffs)),
        _ => unreachable!(),
    }
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl std::ops::Neg for &CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        CycElt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
impl std::ops::Neg for CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        -&self
    }
}

impl std::fmt::Display for CycElt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let t = match j {
                0 => cs,
                1 => format!("{cs}*z{}", self.n),
                _ => format!("{cs}*z{}^{j}", self.n),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// delta_p = (zeta_p - zeta_p^{-1})^2 = zeta_p^2 + zeta_p^{-2} - 2, a totally
/// negative generator of the real subfield's prime over p (p an odd prime).
pub fn delta_p(p: u64) -> CycElt {
    assert!(p > 2 && crate::arith::is_prime_u64(p), "delta_p needs an odd prime");
    let a = CycElt::root_of_unity(p, 2);
    let b = CycElt::root_of_unity(p, -2);
    &(&a + &b) - &CycElt::from_int(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polynomials() {
        // Phi_1 = x - 1, Phi_4 = x^2 + 1, Phi_6 = x^2 - x + 1, Phi_12 = x^4 - x^2 + 1
        let p4: Vec<i64> = vec![1, 0, 1];
        assert_eq!(
            cyclotomic_polynomial(4).as_slice(),
            &p4.iter().map(|v| BigInt::from(*v)).collect::<Vec<_>>()[..]
        );
        let p6: Vec<i64> = vec![1, -1, 1];
        assert_eq!(
            cyclotomic_polynomial(6).as_slice(),
            &p6.iter().map(|v| BigInt::from(*v)).collect::<Vec<_>>()[..]
        );
        let p12: Vec<i64> = vec![1, 0, -1, 0, 1];
        assert_eq!(
            cyclotomic_polynomial(12).as_slice(),
            &p12.iter().map(|v| BigInt::from(*v)).collect::<Vec<_>>()[..]
        );
        // Phi_105 famously has a coefficient -2
        let p105 = cyclotomic_polynomial(105);
        assert!(p105.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn root_sums_vanish() {
        // 1 + zeta_3 + zeta_3^2 = 0
        let s = (0..3)
            .map(|k| CycElt::root_of_unity(3, k))
            .fold(CycElt::zero(3), |a, b| &a + &b);
        assert!(s.is_zero());
        // 1 + zeta_5 + ... + zeta_5^4 = 0
        let s = (0..5)
            .map(|k| CycElt::root_of_unity(5, k))
            .fold(CycElt::zero(5), |a, b| &a + &b);
        assert!(s.is_zero());
    }

    #[test]
    fn gauss_period_product() {
        // (zeta_5 + zeta_5^4)(zeta_5^2 + zeta_5^3) = -1
        let a = &CycElt::root_of_unity(5, 1) + &CycElt::root_of_unity(5, 4);
        let b = &CycElt::root_of_unity(5, 2) + &CycElt::root_of_unity(5, 3);
        assert_eq!(&a * &b, CycElt::from_int(-1));
        // and a + b = -1, so a, b are roots of x^2 + x - 1
        assert_eq!(&a + &b, CycElt::from_int(-1));
    }

    #[test]
    fn mixed_modulus_equality() {
        // zeta_6 = -zeta_3^2
        let z6 = CycElt::root_of_unity(6, 1);
        let m = -CycElt::root_of_unity(3, 2);
        assert_eq!(z6, m);
        // minimal modulus of zeta_6 is 3
        assert_eq!(z6.minimal_cyclotomic().modulus(), 3);
        // zeta_8 + zeta_8^{-1} stays at 8
        let c = &CycElt::root_of_unity(8, 1) + &CycElt::root_of_unity(8, -1);
        assert_eq!(c.minimal_cyclotomic().modulus(), 8);
        // zeta_4^2 = -1 lives at modulus 1
        let z4sq = CycElt::root_of_unity(4, 1).pow(2).unwrap();
        assert_eq!(z4sq, CycElt::from_int(-1));
        assert_eq!(z4sq.minimal_cyclotomic().modulus(), 1);
    }

    #[test]
    fn inverses() {
        let x = &CycElt::root_of_unity(7, 3) + &CycElt::from_int(2);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let z = CycElt::root_of_unity(12, 5);
        assert_eq!(z.inv().unwrap(), CycElt::root_of_unity(12, -5));
        assert!(CycElt::zero(5).inv().is_err());
    }

    #[test]
    fn galois_action() {
        let x = &CycElt::root_of_unity(5, 1) + &CycElt::from_rational_at(rat(1, 2), 5);
        let y = x.galois(2);
        assert_eq!(
            y,
            &CycElt::root_of_unity(5, 2) + &CycElt::from_rational_at(rat(1, 2), 5)
        );
        // composition: galois(2) twice = galois(4)
        assert_eq!(x.galois(2).galois(2), x.galois(4));
        // conjugation is galois(-1)
        assert_eq!(x.conj(), x.galois(4).galois(4).galois(4).galois(4).conj().conj().conj().conj().conj());
    }

    #[test]
    fn delta_values() {
        // delta_3 = -3 (rational)
        assert_eq!(delta_p(3), CycElt::from_int(-3));
        // delta_5 = zeta^2 + zeta^3 - 2 and its Galois orbit multiplies to 5
        let d = delta_p(5);
        assert_eq!(
            d,
            &(&CycElt::root_of_unity(5, 2) + &CycElt::root_of_unity(5, 3)) - &CycElt::from_int(2)
        );
        let norm = &d * &d.galois(2);
        assert_eq!(norm, CycElt::from_int(5));
        // delta_5 is real
        assert!(d.is_real());
        // delta_7 has norm -7 over Q (three real embeddings)
        let d7 = delta_p(7);
        let n7 = &(&d7 * &d7.galois(2)) * &d7.galois(3);
        assert_eq!(n7, CycElt::from_int(-7));
    }

    #[test]
    fn real_detection() {
        assert!(CycElt::from_int(5).is_real());
        assert!((&CycElt::root_of_unity(8, 1) + &CycElt::root_of_unity(8, -1)).is_real());
        assert!(!CycElt::root_of_unity(8, 1).is_real());
    }
}
