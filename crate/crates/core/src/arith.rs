//! Small-integer number theory helpers used throughout the crate.
//!
//! Everything here works on `u64`/`i64`; the moduli that appear (conductors,
//! group exponents, certificate primes) are tiny, so trial division is fine.

use num::BigInt;
use num::Integer;

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Prime factorization by trial division, as (prime, multiplicity) pairs in
/// ascending order.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    factor_u64(n).len() == 1 && factor_u64(n)[0].1 == 1
}

/// Euler phi.
pub fn phi_u64(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factor_u64(n) {
        out = out / p * (p - 1);
    }
    out
}

/// All divisors of n in ascending order.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let f = factor_u64(n);
    let mut out = vec![1u64];
    for (p, e) in f {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            for d in &prev {
                out.push(d * pe);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Units of Z/n in ascending order. For n = 1 this is [0] standing for the
/// trivial group (we use 1..=1 representative 0 never; callers treat n=1
/// specially), so return [1 mod 1] = [0]; in practice n >= 1 and the group
/// for n = 1 is trivial.
pub fn units_mod(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|k| gcd_u64(*k, n) == 1).collect()
}

/// a^e mod m with u128 intermediates.
pub fn pow_mod(a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = (a % m) as u128;
    let mut acc = 1u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Multiplicative order of a mod n (requires gcd(a, n) = 1).
pub fn order_mod(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    assert_eq!(gcd_u64(a, n), 1, "order_mod: {a} not a unit mod {n}");
    let mut x = a % n;
    let mut k = 1u64;
    while x != 1 {
        x = (x as u128 * a as u128 % n as u128) as u64;
        k += 1;
    }
    k
}

/// Modular inverse of a mod n (requires gcd(a, n) = 1).
pub fn inv_mod(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (n as i128, (a % n) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "inv_mod: {a} not a unit mod {n}");
    (t.rem_euclid(n as i128)) as u64
}

/// Iterator over primes by trial division, starting at 2.
pub struct Primes {
    next: u64,
}

impl Primes {
    pub fn new() -> Self {
        Primes { next: 2 }
    }
}

impl Default for Primes {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        let mut c = self.next;
        loop {
            if is_prime_u64(c) {
                self.next = c + 1;
                return Some(c);
            }
            c += 1;
        }
    }
}

/// Squarefree part of a nonzero integer, sign preserved:
/// n = s * m^2 with s squarefree.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    use num::{One, Signed, Zero};
    assert!(!n.is_zero());
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2u32);
    // trial division; class representatives in this crate stay small
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m = &m / &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1u32;
    }
    // leftover m is prime (or 1)
    out *= m;
    BigInt::from(sign) * out
}

/// Exact integer square root test: returns Some(r) with r*r = n for n >= 0.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    use num::Signed;
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_and_factor() {
        assert_eq!(phi_u64(1), 1);
        assert_eq!(phi_u64(8), 4);
        assert_eq!(phi_u64(27), 18);
        assert_eq!(phi_u64(60), 16);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors_u64(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn orders_and_inverses() {
        assert_eq!(order_mod(2, 5), 4);
        assert_eq!(order_mod(2, 7), 3);
        assert_eq!(order_mod(7, 16), 2);
        assert_eq!(inv_mod(3, 7), 5);
        assert_eq!(pow_mod(5, 117, 19), pow_mod(5, 117 % 18, 19));
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&BigInt::from(18)), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(-27)), BigInt::from(-3));
        assert_eq!(squarefree_part(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(exact_sqrt(&BigInt::from(49)), Some(BigInt::from(7)));
        assert_eq!(exact_sqrt(&BigInt::from(48)), None);
    }
}
