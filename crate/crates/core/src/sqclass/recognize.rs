//! Square-root recognition and quadratic-nonresidue certificates.
//!
//! The YES side finds an explicit root: embeddings of the field are realized
//! in Z/q^M for a prime q splitting completely in the ambient cyclotomic
//! field, lifted square roots are matched against the field basis by solving
//! a linear system per sign pattern, and candidates are confirmed by exact
//! squaring, so no wrong positive can escape.  The NO side produces an odd
//! unramified prime whose residue field makes the element a nonresidue.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::arith::{factor_u64, inv_mod, order_mod, pow_mod, Primes};
use crate::cyclo::{AbelianField, CycElt};
use crate::error::{invariant, Result};

/// Legendre symbol of a rational with odd denominator at an odd prime.
pub(crate) fn legendre_rational(a: &BigRational, q: u64) -> i8 {
    let qb = BigInt::from(q);
    let num = a.numer().mod_floor(&qb);
    let den = a.denom().mod_floor(&qb);
    let num: u64 = num.try_into().unwrap();
    let den: u64 = den.try_into().unwrap();
    assert!(den != 0, "denominator divisible by the certificate prime");
    let val = (num as u128 * inv_mod(den, q) as u128 % q as u128) as u64;
    match pow_mod(val, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

// ---------------------------------------------------------------------------
// Small extension fields F_{q^r}, just enough for residue evaluation.
// ---------------------------------------------------------------------------

pub(crate) struct ResidueField {
    q: u64,
    r: usize,
    /// Monic modulus polynomial, length r+1.
    modpoly: Vec<u64>,
}

impl ResidueField {
    pub(crate) fn new(q: u64, r: usize) -> ResidueField {
        let modpoly = irreducible_poly(q, r);
        ResidueField { q, r, modpoly }
    }

    pub(crate) fn zero(&self) -> Vec<u64> {
        vec![0; self.r]
    }

    pub(crate) fn scalar(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.q;
        v
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.q).collect()
    }

    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let q = self.q;
        let mut prod = vec![0u64; 2 * self.r - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + (x as u128 * y as u128 % q as u128) as u64) % q;
            }
        }
        // reduce by the monic modulus
        for i in (self.r..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..self.r {
                let t = (c as u128 * self.modpoly[j] as u128 % q as u128) as u64;
                prod[i - self.r + j] = (prod[i - self.r + j] + q - t) % q;
            }
        }
        prod.truncate(self.r);
        prod
    }

    pub(crate) fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.scalar(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn is_one(&self, a: &[u64]) -> bool {
        a[0] == 1 && a[1..].iter().all(|&x| x == 0)
    }

    /// A deterministic element of exact multiplicative order n.
    pub(crate) fn element_of_order(&self, n: u64) -> Vec<u64> {
        let total: u128 = (0..self.r).fold(1u128, |acc, _| acc * self.q as u128) - 1;
        assert_eq!(total % n as u128, 0);
        let nfac = factor_u64(n);
        let mut gamma = self.zero();
        loop {
            // advance gamma through a deterministic enumeration
            let mut i = 0;
            loop {
                gamma[i] += 1;
                if gamma[i] < self.q {
                    break;
                }
                gamma[i] = 0;
                i += 1;
            }
            let omega = self.pow(&gamma, total / n as u128);
            if self.is_one(&omega) && n > 1 {
                continue;
            }
            if nfac
                .iter()
                .all(|&(p, _)| !self.is_one(&self.pow(&omega, (n / p) as u128)))
            {
                return omega;
            }
        }
    }
}

fn poly_mod_fq(mut a: Vec<u64>, m: &[u64], q: u64) -> Vec<u64> {
    let d = m.len() - 1;
    while a.len() > d {
        let c = *a.last().unwrap();
        let k = a.len() - 1 - d;
        if c != 0 {
            for j in 0..d {
                let t = (c as u128 * m[j] as u128 % q as u128) as u64;
                a[k + j] = (a[k + j] + q - t) % q;
            }
        }
        a.pop();
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        if a.len() <= d {
            break;
        }
    }
    a
}

fn poly_mulmod_fq(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + (x as u128 * y as u128 % q as u128) as u64) % q;
        }
    }
    poly_mod_fq(prod, m, q)
}

fn poly_powmod_fq(a: &[u64], mut e: u64, m: &[u64], q: u64) -> Vec<u64> {
    let mut base = poly_mod_fq(a.to_vec(), m, q);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod_fq(&acc, &base, m, q);
        }
        base = poly_mulmod_fq(&base, &base, m, q);
        e >>= 1;
    }
    acc
}

fn poly_gcd_fq(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        if v.is_empty() {
            v.push(0);
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b with b made monic
        let lead_inv = inv_mod(*b.last().unwrap(), q);
        let monic: Vec<u64> = b
            .iter()
            .map(|&c| (c as u128 * lead_inv as u128 % q as u128) as u64)
            .collect();
        let mut r = poly_mod_fq(a.clone(), &monic, q);
        trim(&mut r);
        a = b;
        b = r;
    }
    a
}

/// Smallest (in a fixed enumeration) monic irreducible of degree r over F_q.
fn irreducible_poly(q: u64, r: usize) -> Vec<u64> {
    if r == 1 {
        return vec![0, 1]; // x
    }
    let rfac = factor_u64(r as u64);
    let mut counter = 0u64;
    loop {
        let mut f = Vec::with_capacity(r + 1);
        let mut c = counter;
        for _ in 0..r {
            f.push(c % q);
            c /= q;
        }
        counter += 1;
        if c > 0 {
            panic!("no irreducible polynomial found (degree {r}, q={q})");
        }
        f.push(1);
        // f irreducible iff x^{q^r} = x mod f and gcd(x^{q^{r/p}} - x, f) = 1
        let mut xq = vec![0, 1];
        let mut powers = Vec::new();
        for _ in 0..r {
            xq = poly_powmod_fq(&xq, q, &f, q);
            powers.push(xq.clone());
        }
        let mut final_ok = powers[r - 1].clone();
        // x^{q^r} - x must be 0 mod f
        if final_ok.len() < 2 {
            final_ok.resize(2, 0);
        }
        final_ok[1] = (final_ok[1] + q - 1) % q;
        let is_zero = final_ok.iter().all(|&x| x == 0);
        if !is_zero {
            continue;
        }
        let mut ok = true;
        for &(p, _) in &rfac {
            let mut diff = powers[r / p as usize - 1].clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = (diff[1] + q - 1) % q;
            let g = poly_gcd_fq(diff, f.clone(), q);
            if !(g.len() == 1 && g[0] != 0) {
                ok = false;
                break;
            }
        }
        if ok {
            return f;
        }
    }
}

// ---------------------------------------------------------------------------
// Nonresidue certificates.
// ---------------------------------------------------------------------------

/// Scans odd primes q whose Frobenius fixes the field (q mod n in the
/// stabilizer), evaluates x in the residue field, and reports the first q
/// where x reduces to a quadratic nonresidue.  Returns the number of primes
/// actually tested alongside the optional certificate.
pub(crate) fn nonresidue_certificate(
    field: &AbelianField,
    x: &CycElt,
    cap: usize,
) -> Result<(usize, Option<u64>)> {
    let n = field.conductor();
    let xl = x.lift(n.max(x.modulus()))?;
    let xn = if xl.modulus() == n { xl } else { x.lift(n)? };
    let den = xn.denominator_lcm();
    let mut tried = 0usize;
    for q in Primes::new() {
        if tried >= cap {
            return Ok((tried, None));
        }
        if q == 2 || n % q == 0 || (&den % BigInt::from(q)).is_zero() {
            continue;
        }
        if n > 1 && !field.stabilizer().contains(&(q % n)) {
            continue;
        }
        tried += 1;
        let r = if n <= 1 { 1 } else { order_mod(q % n, n) as usize };
        let rf = ResidueField::new(q, r);
        let omega = if n <= 1 {
            rf.scalar(1)
        } else {
            rf.element_of_order(n)
        };
        // evaluate sum c_i omega^i
        let mut acc = rf.zero();
        let mut omega_pow = rf.scalar(1);
        for c in xn.coeffs() {
            let cval = {
                let qb = BigInt::from(q);
                let num: u64 = c.numer().mod_floor(&qb).try_into().unwrap();
                let dnm: u64 = c.denom().mod_floor(&qb).try_into().unwrap();
                (num as u128 * inv_mod(dnm, q) as u128 % q as u128) as u64
            };
            if cval != 0 {
                let term: Vec<u64> = omega_pow
                    .iter()
                    .map(|&w| (w as u128 * cval as u128 % q as u128) as u64)
                    .collect();
                acc = rf.add(&acc, &term);
            }
            omega_pow = rf.mul(&omega_pow, &omega);
        }
        if acc.iter().all(|&c| c == 0) {
            continue; // q divides the norm; not a unit certificate
        }
        // Frobenius fixes elements of the field, so acc must be a scalar.
        let frob = rf.pow(&acc, q as u128);
        if frob != acc || acc[1..].iter().any(|&c| c != 0) {
            return Err(invariant(
                "residue of a field element is not Frobenius-stable",
            ));
        }
        if pow_mod(acc[0], (q - 1) / 2, q) == q - 1 {
            return Ok((tried, Some(q)));
        }
    }
    unreachable!("prime stream is infinite")
}

// ---------------------------------------------------------------------------
// p-adic square root recognition.
// ---------------------------------------------------------------------------

pub(crate) enum PadicOutcome {
    Root(CycElt),
    Nonresidue(u64),
    Inconclusive { max_precision: u32 },
}

fn tonelli_shanks(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    if q % 4 == 3 {
        return Some(pow_mod(a, (q + 1) / 4, q));
    }
    let mut s = 0u64;
    let mut d = q - 1;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let z = (2..q)
        .find(|&z| pow_mod(z, (q - 1) / 2, q) == q - 1)
        .expect("nonresidue exists");
    let mut m = s;
    let mut c = pow_mod(z, d, q);
    let mut t = pow_mod(a, d, q);
    let mut r = pow_mod(a, (d + 1) / 2, q);
    while t != 1 {
        let mut i = 0u64;
        let mut tt = t;
        while tt != 1 {
            tt = (tt as u128 * tt as u128 % q as u128) as u64;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = (b as u128 * b as u128 % q as u128) as u64;
        t = (t as u128 * c as u128 % q as u128) as u64;
        r = (r as u128 * b as u128 % q as u128) as u64;
    }
    Some(r)
}

fn mod_q(v: &BigInt, modulus: &BigInt) -> BigInt {
    v.mod_floor(modulus)
}

fn inv_mod_big(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(modulus);
    if !e.gcd.is_one() {
        return None;
    }
    Some(mod_q(&e.x, modulus))
}

/// Rational reconstruction with the symmetric bound sqrt(m/2).
fn rational_reconstruct(v: &BigInt, modulus: &BigInt) -> Option<BigRational> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let mut r0 = modulus.clone();
    let mut r1 = mod_q(v, modulus);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.sign() == Sign::Minus {
        r1 = -r1;
        t1 = -t1;
    }
    Some(BigRational::new(r1, t1))
}

/// Evaluates a cyclotomic element at a lifted root of unity mod q^M.
fn eval_at(x: &CycElt, omega_pows: &[BigInt], k: u64, modulus: &BigInt) -> Option<BigInt> {
    let n = x.modulus();
    let mut acc = BigInt::zero();
    for (i, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let den_inv = inv_mod_big(&mod_q(c.denom(), modulus), modulus)?;
        let num = mod_q(c.numer(), modulus);
        let w = &omega_pows[((i as u64 * k) % n.max(1)) as usize];
        acc = mod_q(&(acc + num * den_inv * w), modulus);
    }
    Some(acc)
}

/// Tries to write x as a square in the field; exact verification on success.
pub(crate) fn padic_sqrt(field: &AbelianField, x: &CycElt) -> Result<PadicOutcome> {
    let n = field.conductor().max(1);
    let xn = x.lift(n)?;
    let basis = field.basis();
    let d = basis.len();
    if d > 16 {
        return Ok(PadicOutcome::Inconclusive { max_precision: 0 });
    }
    let ks = field.embedding_representatives();

    // Candidate split primes: q = 1 mod n, avoiding denominators.
    let mut dens = xn.denominator_lcm();
    for b in basis {
        dens *= b.denominator_lcm();
    }
    let mut precision_seen = 0u32;
    let mut primes_used = 0;
    for q in Primes::new() {
        if primes_used >= 3 {
            break;
        }
        if q < 20 || q % n != 1 % n || (&dens % BigInt::from(q)).is_zero() {
            continue;
        }
        // order-n root of unity mod q
        let nfac = factor_u64(n);
        let omega0 = {
            let mut found = 0u64;
            for g in 2..q {
                let w = pow_mod(g, (q - 1) / n, q);
                if n == 1 || nfac.iter().all(|&(p, _)| pow_mod(w, n / p, q) != 1) {
                    found = w;
                    break;
                }
            }
            found
        };
        if omega0 == 0 && n > 1 {
            continue;
        }
        primes_used += 1;

        for mexp in [16u32, 48, 144] {
            precision_seen = precision_seen.max(mexp);
            let modulus = BigInt::from(q).pow(mexp);
            // Newton-lift omega: t^n = 1
            let mut omega = BigInt::from(omega0.max(1));
            if n > 1 {
                let nb = BigInt::from(n);
                for _ in 0..mexp.ilog2() + 2 {
                    let f = mod_q(&(omega.modpow(&BigInt::from(n), &modulus) - 1), &modulus);
                    let fp = mod_q(
                        &(&nb * omega.modpow(&BigInt::from(n - 1), &modulus)),
                        &modulus,
                    );
                    let Some(fp_inv) = inv_mod_big(&fp, &modulus) else {
                        break;
                    };
                    omega = mod_q(&(&omega - f * fp_inv), &modulus);
                }
                if !mod_q(&(omega.modpow(&BigInt::from(n), &modulus) - 1), &modulus).is_zero() {
                    continue;
                }
            }
            let omega_pows: Vec<BigInt> = {
                let mut v = Vec::with_capacity(n as usize);
                let mut cur = BigInt::one();
                for _ in 0..n {
                    v.push(cur.clone());
                    cur = mod_q(&(cur * &omega), &modulus);
                }
                v
            };

            // Embedding matrix A[i][j] = sigma_{k_i}(b_j)
            let mut a_mat = vec![vec![BigInt::zero(); d]; d];
            let mut ok = true;
            for (i, &k) in ks.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let bl = match b.lift(n) {
                        Ok(v) => v,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    };
                    match eval_at(&bl, &omega_pows, k, &modulus) {
                        Some(v) => a_mat[i][j] = v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                break; // bad prime (denominator collision); next prime
            }

            // Targets and their lifted square roots.
            let mut roots = Vec::with_capacity(d);
            let mut skip_prime = false;
            for &k in &ks {
                let Some(tv) = eval_at(&xn, &omega_pows, k, &modulus) else {
                    skip_prime = true;
                    break;
                };
                let t0: u64 = mod_q(&tv, &BigInt::from(q)).try_into().unwrap();
                if t0 == 0 {
                    skip_prime = true; // x not a unit at this prime
                    break;
                }
                match tonelli_shanks(t0, q) {
                    None => return Ok(PadicOutcome::Nonresidue(q)),
                    Some(s0) => {
                        // Newton-lift the square root to q^M
                        let mut s = BigInt::from(s0);
                        let inv2 = inv_mod_big(&BigInt::from(2), &modulus).unwrap();
                        for _ in 0..mexp.ilog2() + 2 {
                            let Some(s_inv) = inv_mod_big(&s, &modulus) else {
                                break;
                            };
                            s = mod_q(&((&s + &tv * s_inv) * &inv2), &modulus);
                        }
                        if !mod_q(&(&s * &s - &tv), &modulus).is_zero() {
                            skip_prime = true;
                            break;
                        }
                        roots.push(s);
                    }
                }
            }
            if skip_prime {
                break; // try next prime
            }

            // Invert A mod q^M (needs det invertible mod q).
            let Some(a_inv) = invert_matrix(&a_mat, &modulus) else {
                break;
            };

            // Sign patterns: first root fixed positive.
            'patterns: for mask in 0..(1u64 << (d - 1)) {
                let rhs: Vec<BigInt> = roots
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                            mod_q(&(-s), &modulus)
                        } else {
                            s.clone()
                        }
                    })
                    .collect();
                let mut coords = Vec::with_capacity(d);
                for arow in &a_inv {
                    let v = arow
                        .iter()
                        .zip(&rhs)
                        .fold(BigInt::zero(), |acc, (aij, r)| mod_q(&(acc + aij * r), &modulus));
                    match rational_reconstruct(&v, &modulus) {
                        Some(c) => coords.push(c),
                        None => continue 'patterns,
                    }
                }
                let mut y = CycElt::zero(1);
                for (c, b) in coords.iter().zip(basis) {
                    y = &y + &b.scale(c);
                }
                if &y * &y == xn {
                    return Ok(PadicOutcome::Root(y.minimal_cyclotomic()));
                }
            }
        }
    }
    Ok(PadicOutcome::Inconclusive {
        max_precision: precision_seen,
    })
}

fn invert_matrix(a: &[Vec<BigInt>], modulus: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let d = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|v| mod_q(v, modulus)).collect())
        .collect();
    let mut inv: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    for col in 0..d {
        // pick a row whose pivot is invertible (a unit mod the prime)
        let pr = (col..d).find(|&r| inv_mod_big(&m[r][col], modulus).is_some())?;
        m.swap(col, pr);
        inv.swap(col, pr);
        let piv_inv = inv_mod_big(&m[col][col], modulus)?;
        for j in 0..d {
            m[col][j] = mod_q(&(&m[col][j] * &piv_inv), modulus);
            inv[col][j] = mod_q(&(&inv[col][j] * &piv_inv), modulus);
        }
        for r in 0..d {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let c = m[r][col].clone();
            for j in 0..d {
                let mv = mod_q(&(&m[r][j] - &c * &m[col][j]), modulus);
                m[r][j] = mv;
                let iv = mod_q(&(&inv[r][j] - &c * &inv[col][j]), modulus);
                inv[r][j] = iv;
            }
        }
    }
    Some(inv)
}
