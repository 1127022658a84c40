//! Certified numeric embeddings of cyclotomic elements.
//!
//! Intervals are dyadic fixed-point: a value is enclosed by
//! `[lo, hi] * 2^-prec` with `BigInt` endpoints. All rounding is outward, so
//! any sign decision read off an interval is a proof. Precision escalates by
//! doubling; callers state a starting precision (default 128 bits).

use super::CycElt;
use crate::error::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 1 << 14;

/// A real interval `[lo, hi] * 2^-prec`.
#[derive(Debug, Clone)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

impl Interval {
    pub fn point(v: BigInt, prec: u32) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(BigInt::zero(), prec)
    }

    /// Outward enclosure of an exact rational.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled_num = q.numer() << prec;
        let (fl, rem) = scaled_num.div_mod_floor(q.denom());
        let hi = if rem.is_zero() { fl.clone() } else { &fl + 1 };
        Interval { lo: fl, hi, prec }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.prec, o.prec);
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.prec, o.prec);
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.prec, o.prec);
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().unwrap();
        let hi = products.iter().max().unwrap();
        Interval {
            lo: shr_floor(lo, self.prec),
            hi: shr_ceil(hi, self.prec),
            prec: self.prec,
        }
    }

    /// Divide by a positive integer, outward.
    pub fn div_uint(&self, d: &BigInt) -> Interval {
        assert!(d.is_positive());
        Interval {
            lo: self.lo.div_floor(d),
            hi: self.hi.div_ceil(d),
            prec: self.prec,
        }
    }

    pub fn scale_int(&self, s: i64) -> Interval {
        let s = BigInt::from(s);
        let a = &self.lo * &s;
        let b = &self.hi * &s;
        if s.is_negative() {
            Interval {
                lo: b,
                hi: a,
                prec: self.prec,
            }
        } else {
            Interval {
                lo: a,
                hi: b,
                prec: self.prec,
            }
        }
    }

    /// Widen symmetrically by `ulps` units in the last place.
    pub fn widen(&self, ulps: u64) -> Interval {
        Interval {
            lo: &self.lo - ulps,
            hi: &self.hi + ulps,
            prec: self.prec,
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Magnitude bound in ulps.
    pub fn mag(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }
}

fn shr_floor(v: &BigInt, k: u32) -> BigInt {
    v.div_floor(&(BigInt::one() << k))
}

fn shr_ceil(v: &BigInt, k: u32) -> BigInt {
    v.div_ceil(&(BigInt::one() << k))
}

/// Enclosure of arctan(1/x) for integer x >= 2, by the alternating series.
fn arctan_inv(x: u64, prec: u32) -> Interval {
    let one = BigInt::one() << prec;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut denom_pow = x.clone(); // x^(2j+1)
    let mut j = 0u64;
    let mut acc = Interval::zero(prec);
    loop {
        let d = &denom_pow * BigInt::from(2 * j + 1);
        let q = (&one).div_floor(&d);
        let term = Interval {
            lo: q.clone(),
            hi: &q + 1,
            prec,
        };
        if q.is_zero() {
            // tail bounded by this term's magnitude: widen by 1 ulp and stop
            acc = acc.widen(1);
            break;
        }
        if j % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
        denom_pow *= &x2;
        j += 1;
    }
    acc
}

/// Enclosure of pi (Machin's formula).
pub fn pi(prec: u32) -> Interval {
    let a = arctan_inv(5, prec).scale_int(16);
    let b = arctan_inv(239, prec).scale_int(4);
    a.sub(&b)
}

/// cos and sin of an interval argument (|theta| <= 7), by Taylor series with
/// an explicit tail bound.
fn cos_sin(theta: &Interval, prec: u32) -> (Interval, Interval) {
    let theta2 = theta.mul(theta);
    let mut cos = Interval::point(BigInt::one() << prec, prec);
    let mut sin = theta.clone();
    // running terms: cos term t_c = (-1)^j theta^{2j}/(2j)!, updated by
    // multiplying with theta^2/((2j+1)(2j+2)); similarly for sin.
    let mut tc = Interval::point(BigInt::one() << prec, prec);
    let mut ts = theta.clone();
    let mut j = 0u64;
    loop {
        // next cos term
        let d1 = BigInt::from((2 * j + 1) * (2 * j + 2));
        tc = tc.mul(&theta2).div_uint(&d1);
        let d2 = BigInt::from((2 * j + 2) * (2 * j + 3));
        ts = ts.mul(&theta2).div_uint(&d2);
        if j % 2 == 0 {
            cos = cos.sub(&tc);
            sin = sin.sub(&ts);
        } else {
            cos = cos.add(&tc);
            sin = sin.add(&ts);
        }
        j += 1;
        // once the ratio theta^2/((2j+1)(2j+2)) < 1/2, the tail is bounded by
        // the magnitude of the next term; stop when terms shrink to noise
        let small = tc.mag().max(ts.mag());
        if 2 * j + 1 > 14 && small <= BigInt::from(2) {
            cos = cos.widen(8);
            sin = sin.widen(8);
            break;
        }
    }
    (cos, sin)
}

/// A rectangle enclosure of a complex number.
#[derive(Debug, Clone)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn zero(prec: u32) -> Self {
        ComplexInterval {
            re: Interval::zero(prec),
            im: Interval::zero(prec),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale_rational(&self, q: &BigRational, prec: u32) -> Self {
        let qi = Interval::from_rational(q, prec);
        ComplexInterval {
            re: self.re.mul(&qi),
            im: self.im.mul(&qi),
        }
    }
}

/// Enclosure of e^{2 pi i k/n}.
pub fn root_of_unity_interval(n: u64, k: u64, prec: u32) -> ComplexInterval {
    // work at elevated internal precision so that the final rectangle is tight
    let wp = prec + 16;
    let theta = pi(wp)
        .scale_int(2 * (k % n) as i64)
        .div_uint(&BigInt::from(n));
    let (c, s) = cos_sin(&theta, wp);
    ComplexInterval {
        re: reduce_prec(&c, prec),
        im: reduce_prec(&s, prec),
    }
}

fn reduce_prec(iv: &Interval, prec: u32) -> Interval {
    assert!(iv.prec >= prec);
    let k = iv.prec - prec;
    Interval {
        lo: shr_floor(&iv.lo, k),
        hi: shr_ceil(&iv.hi, k),
        prec,
    }
}

/// Evaluate the embedding of x that sends zeta_n to e^{2 pi i k/n}.
pub fn eval_embedding(x: &CycElt, k: u64, prec: u32) -> ComplexInterval {
    let n = x.modulus();
    let mut powers: Vec<Option<ComplexInterval>> = vec![None; n as usize];
    let mut acc = ComplexInterval::zero(prec);
    for (j, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (j as u64 * k) % n;
        if powers[e as usize].is_none() {
            powers[e as usize] = Some(root_of_unity_interval(n, e, prec));
        }
        let term = powers[e as usize]
            .as_ref()
            .unwrap()
            .scale_rational(c, prec);
        acc = acc.add(&term);
    }
    acc
}

/// One numeric value per embedding of the field generated by x:
/// pairs (k, enclosure) with k the Galois coset representative.
pub fn embeddings_numeric(x: &CycElt, prec: u32) -> Vec<(u64, ComplexInterval)> {
    let xm = x.minimal_cyclotomic();
    let field = super::AbelianField::generated_by(std::slice::from_ref(&xm));
    let lifted = xm.lift(field.conductor()).unwrap_or_else(|_| xm.clone());
    field
        .embedding_representatives()
        .into_iter()
        .map(|k| (k, eval_embedding(&lifted, k.max(1), prec)))
        .collect()
}

/// Certified sign of the real number sigma_k(x) (x must be fixed by
/// conjugation, i.e. real). Returns -1 or 1; exact zero must be excluded by
/// the caller (x != 0 and x real means every embedding is a nonzero real).
pub fn certified_real_sign(x: &CycElt, k: u64, start_prec: u32) -> Result<i8> {
    debug_assert!(x.is_real(), "certified_real_sign needs a real element");
    if x.is_zero() {
        return Err(Error::InvalidInput("sign of zero requested".into()));
    }
    let mut prec = start_prec.max(32);
    while prec <= MAX_PRECISION {
        let v = eval_embedding(x, k, prec);
        if v.re.is_positive() {
            return Ok(1);
        }
        if v.re.is_negative() {
            return Ok(-1);
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted(MAX_PRECISION))
}

/// Is x totally positive in the real field it generates? (Every embedding
/// positive.) x must be real and nonzero.
pub fn totally_positive(x: &CycElt, start_prec: u32) -> Result<bool> {
    let xm = x.minimal_cyclotomic();
    let field = super::AbelianField::generated_by(std::slice::from_ref(&xm));
    debug_assert!(field.is_real());
    let lifted = xm.lift(field.conductor()).unwrap_or_else(|_| xm.clone());
    for k in field.embedding_representatives() {
        if certified_real_sign(&lifted, k.max(1), start_prec)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::delta_p;

    fn approx(iv: &Interval) -> f64 {
        let mid: BigInt = (&iv.lo + &iv.hi) / 2;
        let denom = 2f64.powi(iv.prec as i32);
        // good enough for test assertions at moderate precision
        mid.to_string().parse::<f64>().unwrap() / denom
    }

    #[test]
    fn pi_enclosure() {
        let p = pi(128);
        let v = approx(&p);
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
        assert!(p.lo < p.hi);
    }

    #[test]
    fn roots_of_unity() {
        // zeta_4 = i
        let z = root_of_unity_interval(4, 1, 96);
        assert!(z.re.contains_zero());
        assert!(z.im.is_positive());
        assert!((approx(&z.im) - 1.0).abs() < 1e-12);
        // zeta_3 has negative real part
        let z3 = root_of_unity_interval(3, 1, 96);
        assert!(z3.re.is_negative());
        assert!((approx(&z3.re) + 0.5).abs() < 1e-12);
        // zeta_8: re = im = sqrt(2)/2
        let z8 = root_of_unity_interval(8, 1, 96);
        assert!((approx(&z8.re) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn delta_embeddings_are_negative() {
        let d5 = delta_p(5);
        for (k, v) in embeddings_numeric(&d5, 128) {
            assert!(v.re.is_negative(), "embedding {k} of delta_5 not negative");
            assert!(v.im.contains_zero());
        }
        assert_eq!(embeddings_numeric(&d5, 64).len(), 2);
        // values are -(5 +/- sqrt5)/2
        let vals: Vec<f64> = embeddings_numeric(&d5, 128)
            .iter()
            .map(|(_, v)| approx(&v.re))
            .collect();
        let expect = [-(5.0 + 5f64.sqrt()) / 2.0, -(5.0 - 5f64.sqrt()) / 2.0];
        for e in expect {
            assert!(vals.iter().any(|v| (v - e).abs() < 1e-10));
        }
    }

    #[test]
    fn certified_signs() {
        let c = &CycElt::root_of_unity(8, 1) + &CycElt::root_of_unity(8, -1); // sqrt2
        assert_eq!(certified_real_sign(&c, 1, 64).unwrap(), 1);
        assert_eq!(certified_real_sign(&c, 3, 64).unwrap(), -1); // -sqrt2
        assert!(totally_positive(&(&c + &CycElt::from_int(2)), 64).unwrap());
        assert!(!totally_positive(&c, 64).unwrap());
        assert!(totally_positive(&CycElt::from_int(1), 64).unwrap());
        assert!(!totally_positive(&delta_p(7), 64).unwrap());
    }
}
