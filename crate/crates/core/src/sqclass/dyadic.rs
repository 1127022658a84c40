//! Dyadic places of abelian fields and exact 2-adic valuations.
//!
//! For an abelian field `K` of conductor `n = 2^a * m` (m odd) the primes
//! above 2 are described in two independent ways and the implementation
//! insists that they agree:
//!
//! * **Group side.** Inside `(Z/n)^x` the inertia subgroup of 2 is
//!   `I = {k : k = 1 mod m}` and the decomposition subgroup is
//!   `D = <I, k0>` with `k0 = 2 mod m, k0 = 1 mod 2^a`.  With `H` the
//!   stabilizer of `K` this gives `e = |IH|/|H|`, `f = |DH|/|IH|` and
//!   `g = phi(n)/|DH|` places, one per `DH`-orbit of embeddings.
//! * **Local side.** A fixed prime of `Q(zeta_n)` above 2 is realised as a
//!   finite model `(Z/2^N)[u,z] / (h(u), z^{phi(2^a)} + 1)` where `h` is a
//!   Hensel lift of a Berlekamp factor of the m-th cyclotomic polynomial
//!   modulo 2.  Each place stores the corresponding monic 2-adic factor of
//!   the minimal polynomial of a primitive element of `K`; the factors
//!   multiply back to the minimal polynomial and, when 2 is unramified,
//!   match a Berlekamp factorization modulo 2 degree for degree.
//!
//! Valuations are computed primarily as `v_2(local norm) / f`, where the
//! local norm is the product of the `e*f` conjugates attached to the place,
//! and are cross-checked against the expansion in powers of the uniformizer
//! `w = z - 1`.  Precision is escalated until both computations certify.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::cyclo::field::{group_units, subgroup_closure};
use crate::cyclo::{cyclotomic_polynomial, AbelianField, CycElt};
use crate::error::{invariant, Error, Result};
use crate::sqclass::SquareClass;

/// Working precision (bits of 2) used when building place handles.
const PLACE_BITS: u32 = 64;

/// Precision ladder for valuations; each step doubles until certification.
const BITS_SCHEDULE: [u32; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

// ---------------------------------------------------------------------------
// Polynomials over F_2 (little-endian bit vectors, trimmed, zero = empty).
// ---------------------------------------------------------------------------

fn f2_trim(mut v: Vec<u8>) -> Vec<u8> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn f2_deg(v: &[u8]) -> usize {
    debug_assert!(!v.is_empty());
    v.len() - 1
}

fn f2_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 1 {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] ^= bj;
            }
        }
    }
    f2_trim(out)
}

fn f2_rem(a: &[u8], b: &[u8]) -> Vec<u8> {
    let db = f2_deg(b);
    let mut r = f2_trim(a.to_vec());
    while r.len() > db {
        let shift = r.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] ^= bj;
        }
        r = f2_trim(r);
    }
    r
}

fn f2_divmod(a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let db = f2_deg(b);
    let mut r = f2_trim(a.to_vec());
    let mut q = vec![0u8; r.len().saturating_sub(db)];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        q[shift] = 1;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] ^= bj;
        }
        r = f2_trim(r);
    }
    (f2_trim(q), r)
}

fn f2_div_exact(a: &[u8], b: &[u8]) -> Vec<u8> {
    let (q, r) = f2_divmod(a, b);
    assert!(r.is_empty(), "inexact F_2 division");
    q
}

fn f2_gcd(a: &[u8], b: &[u8]) -> Vec<u8> {
    let (mut x, mut y) = (f2_trim(a.to_vec()), f2_trim(b.to_vec()));
    while !y.is_empty() {
        let r = f2_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn f2_xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut v = vec![0u8; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        v[i] ^= x;
    }
    for (i, &x) in b.iter().enumerate() {
        v[i] ^= x;
    }
    f2_trim(v)
}

/// Extended gcd over F_2: returns `(g, s, t)` with `s*a + t*b = g`.
fn f2_xgcd(a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let (mut r0, mut r1) = (f2_trim(a.to_vec()), f2_trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![1u8], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u8]);
    while !r1.is_empty() {
        let (q, r) = f2_divmod(&r0, &r1);
        let s2 = f2_xor(&s0, &f2_mul(&q, &s1));
        let t2 = f2_xor(&t0, &f2_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    (r0, s0, t0)
}

fn f2_derivative(a: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push(if i % 2 == 1 { c } else { 0 });
    }
    f2_trim(out)
}

fn bits_value(p: &[u8]) -> u128 {
    p.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i))
}

/// Berlekamp factorization of a squarefree monic polynomial over F_2.
/// Returns the irreducible factors sorted by (degree, bit pattern).
fn f2_berlekamp(f: &[u8]) -> Vec<Vec<u8>> {
    let n = f2_deg(f);
    assert!((1..=128).contains(&n), "Berlekamp degree out of range");
    if n == 1 {
        return vec![f.to_vec()];
    }
    // Rows of the Frobenius matrix: x^{2j} mod f for j = 0..n.
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(n);
    let mut cur = vec![1u8];
    let xsq = f2_rem(&[0, 0, 1], f);
    for _ in 0..n {
        let mut padded = cur.clone();
        padded.resize(n, 0);
        rows.push(padded);
        cur = f2_rem(&f2_mul(&cur, &xsq), f);
    }
    // Kernel of the map v -> v^2 - v: equations sum_j (rows[j][i] - d_ij) v_j = 0.
    let mut mat = vec![0u128; n];
    for (i, eq) in mat.iter_mut().enumerate() {
        for (j, row) in rows.iter().enumerate() {
            let mut bit = row[i];
            if i == j {
                bit ^= 1;
            }
            if bit == 1 {
                *eq |= 1u128 << j;
            }
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; n];
    for col in 0..n {
        let piv = (0..n).find(|&r| !used[r] && (mat[r] >> col) & 1 == 1);
        let Some(p) = piv else { continue };
        used[p] = true;
        pivots.push((p, col));
        let prow = mat[p];
        for r in 0..n {
            if r != p && (mat[r] >> col) & 1 == 1 {
                mat[r] ^= prow;
            }
        }
    }
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel: Vec<Vec<u8>> = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0u8; n];
        v[free] = 1;
        for &(r, c) in &pivots {
            if (mat[r] >> free) & 1 == 1 {
                v[c] = 1;
            }
        }
        kernel.push(v);
    }
    let target = kernel.len();
    let mut factors: Vec<Vec<u8>> = vec![f.to_vec()];
    for v in &kernel {
        if factors.len() == target {
            break;
        }
        let vp = f2_trim(v.clone());
        if vp.len() <= 1 {
            continue; // constant idempotents split nothing
        }
        let mut next: Vec<Vec<u8>> = Vec::new();
        for u in factors {
            if f2_deg(&u) == 1 {
                next.push(u);
                continue;
            }
            let g = f2_gcd(&u, &f2_rem(&vp, &u));
            if g.len() <= 1 || f2_deg(&g) == f2_deg(&u) {
                next.push(u);
            } else {
                let q = f2_div_exact(&u, &g);
                next.push(g);
                next.push(q);
            }
        }
        factors = next;
    }
    assert_eq!(factors.len(), target, "Berlekamp split incomplete");
    factors.sort_by_key(|p| (p.len(), bits_value(p)));
    factors
}

// ---------------------------------------------------------------------------
// Polynomials over Z/2^N (little-endian BigInt vectors).
// ---------------------------------------------------------------------------

fn zp_trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().map(|c| c.is_zero()) == Some(true) {
        v.pop();
    }
    v
}

fn zp_red(v: &[BigInt], md: &BigInt) -> Vec<BigInt> {
    zp_trim(v.iter().map(|c| c.mod_floor(md)).collect())
}

fn zp_mul(a: &[BigInt], b: &[BigInt], md: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    zp_red(&out, md)
}

fn zp_add(a: &[BigInt], b: &[BigInt], md: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    zp_red(&out, md)
}

fn zp_sub(a: &[BigInt], b: &[BigInt], md: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    zp_red(&out, md)
}

/// Division with remainder by a monic divisor, coefficients mod 2^N.
fn zp_divmod(a: &[BigInt], b: &[BigInt], md: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    assert!(b.last().map(|c| c.is_one()) == Some(true), "divisor must be monic");
    let db = b.len() - 1;
    let mut r: Vec<BigInt> = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), zp_red(&r, md));
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let coef = r[k].mod_floor(md);
        if !coef.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                let delta = &coef * bj;
                r[k - db + j] -= delta;
            }
            q[k - db] = coef;
        }
        r[k] = BigInt::zero();
    }
    (zp_red(&q, md), zp_red(&r, md))
}

/// Quadratic Hensel lift: returns the monic `h = h0 mod 2` with
/// `h | f mod 2^bits`.  `f` must be monic integral and squarefree mod 2.
fn hensel_factor(f: &[BigInt], h0: &[u8], bits: u32) -> Vec<BigInt> {
    let two = BigInt::from(2);
    let f2: Vec<u8> = f2_trim(
        f.iter()
            .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
            .collect(),
    );
    let g0 = f2_div_exact(&f2, h0);
    let (gg, s0, t0) = f2_xgcd(&g0, h0);
    assert_eq!(gg, vec![1u8], "factor not coprime mod 2");
    let to_big = |p: &[u8]| -> Vec<BigInt> { p.iter().map(|&b| BigInt::from(b)).collect() };
    let mut h = to_big(h0);
    let mut g = to_big(&g0);
    let mut s = to_big(&s0);
    let mut t = to_big(&t0);
    let mut cur: u32 = 1;
    while cur < bits {
        let md = BigInt::one() << (2 * cur) as usize;
        let e = zp_sub(f, &zp_mul(&g, &h, &md), &md);
        let (q, r) = zp_divmod(&zp_mul(&s, &e, &md), &h, &md);
        g = zp_add(&g, &zp_add(&zp_mul(&t, &e, &md), &zp_mul(&q, &g, &md), &md), &md);
        h = zp_add(&h, &r, &md);
        let b = zp_sub(
            &zp_add(&zp_mul(&s, &g, &md), &zp_mul(&t, &h, &md), &md),
            &[BigInt::one()],
            &md,
        );
        let (c, d) = zp_divmod(&zp_mul(&s, &b, &md), &h, &md);
        s = zp_sub(&s, &d, &md);
        t = zp_sub(&t, &zp_add(&zp_mul(&t, &b, &md), &zp_mul(&c, &g, &md), &md), &md);
        cur *= 2;
    }
    let md = BigInt::one() << bits as usize;
    let mut h = zp_red(&h, &md);
    assert_eq!(h.len(), h0.len(), "lift changed the degree");
    assert!(h.last().map(|c| c.is_one()) == Some(true), "lift lost monicity");
    let (_, rem) = zp_divmod(f, &h, &md);
    assert!(rem.is_empty(), "Hensel lift does not divide");
    h.truncate(h0.len());
    h
}

// ---------------------------------------------------------------------------
// The local model (Z/2^N)[u, z] / (h(u), z^{phi(2^a)} + 1).
// ---------------------------------------------------------------------------

/// Residue coefficient: an element of (Z/2^N)[u]/(h(u)), length `f_n`.
type Coef = Vec<BigInt>;
/// Model element: coefficients of z^0 .. z^{e_n - 1}.
type Elt = Vec<Coef>;

struct LocalModel {
    n: u64,
    e_n: usize,
    f_n: usize,
    modulus: BigInt,
    /// Monic Hensel-lifted factor of the m-th cyclotomic polynomial.
    h: Vec<BigInt>,
    /// Cached powers of the image of zeta_n, indices 0..phi(n).
    zeta_pows: Vec<Elt>,
    /// Pascal triangle up to e_n for the w = z - 1 change of variable.
    binomials: Vec<Vec<BigInt>>,
}

static MODELS: OnceLock<Mutex<HashMap<(u64, u32), Arc<LocalModel>>>> = OnceLock::new();

fn model(n: u64, bits: u32) -> Arc<LocalModel> {
    let cache = MODELS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, bits))
        .or_insert_with(|| Arc::new(LocalModel::new(n, bits)))
        .clone()
}

impl LocalModel {
    fn new(n: u64, bits: u32) -> Self {
        assert!(n >= 1);
        let a = n.trailing_zeros();
        let m = n >> a;
        let e_n = if a == 0 { 1 } else { 1usize << (a - 1) };
        let modulus = BigInt::one() << bits as usize;
        let h = if m == 1 {
            vec![&modulus - BigInt::one(), BigInt::one()]
        } else {
            let phi = cyclotomic_polynomial(m);
            let two = BigInt::from(2);
            let phi2: Vec<u8> = f2_trim(
                phi.iter()
                    .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
                    .collect(),
            );
            let factors = f2_berlekamp(&phi2);
            let expected = arith::order_mod(2, m) as usize;
            assert!(factors.iter().all(|p| f2_deg(p) == expected));
            hensel_factor(phi.as_slice(), &factors[0], bits)
        };
        let f_n = h.len() - 1;
        assert_eq!(f_n as u64, if m == 1 { 1 } else { arith::order_mod(2, m) });
        let mut mdl = LocalModel {
            n,
            e_n,
            f_n,
            modulus,
            h,
            zeta_pows: Vec::new(),
            binomials: pascal(e_n),
        };
        let zeta = if n == 1 {
            mdl.one()
        } else {
            let pow2 = 1u64 << a;
            let c_m = if m == 1 { 0 } else { arith::inv_mod(pow2 % m, m) };
            let c_2 = if a == 0 { 0 } else { arith::inv_mod(m % pow2, pow2) };
            let ucoef = mdl.u_pow(c_m);
            mdl.z_shift(&mdl.from_coef(ucoef), c_2 as usize)
        };
        let deg = arith::phi_u64(n) as usize;
        let mut pows = Vec::with_capacity(deg);
        let mut cur = mdl.one();
        for _ in 0..deg {
            pows.push(cur.clone());
            cur = mdl.mul(&cur, &zeta);
        }
        mdl.zeta_pows = pows;
        mdl
    }

    fn czero(&self) -> Coef {
        vec![BigInt::zero(); self.f_n]
    }

    fn zero(&self) -> Elt {
        vec![self.czero(); self.e_n]
    }

    fn one(&self) -> Elt {
        let mut e = self.zero();
        e[0][0] = BigInt::one();
        e
    }

    fn from_coef(&self, c: Coef) -> Elt {
        let mut e = self.zero();
        e[0] = c;
        e
    }

    fn red(&self, x: &BigInt) -> BigInt {
        x.mod_floor(&self.modulus)
    }

    fn coef_mul(&self, a: &Coef, b: &Coef) -> Coef {
        let f = self.f_n;
        let mut out = vec![BigInt::zero(); 2 * f - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        for k in (f..out.len()).rev() {
            let top = std::mem::replace(&mut out[k], BigInt::zero());
            if top.is_zero() {
                continue;
            }
            for j in 0..f {
                let delta = &top * &self.h[j];
                out[k - f + j] -= delta;
            }
        }
        out.truncate(f);
        out.iter().map(|c| self.red(c)).collect()
    }

    fn coef_add(&self, a: &Coef, b: &Coef) -> Coef {
        a.iter().zip(b).map(|(x, y)| self.red(&(x + y))).collect()
    }

    fn coef_sub(&self, a: &Coef, b: &Coef) -> Coef {
        a.iter().zip(b).map(|(x, y)| self.red(&(x - y))).collect()
    }

    fn coef_scale(&self, a: &Coef, s: &BigInt) -> Coef {
        a.iter().map(|x| self.red(&(x * s))).collect()
    }

    fn coef_is_zero(&self, a: &Coef) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    /// u^k reduced mod h.
    fn u_pow(&self, k: u64) -> Coef {
        let mut acc = self.czero();
        acc[0] = BigInt::one();
        if self.f_n == 1 {
            return acc; // h = X - 1, so u = 1
        }
        let mut base = self.czero();
        base[1] = BigInt::one();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.coef_mul(&acc, &base);
            }
            base = self.coef_mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Multiply by z^k, using z^{e_n} = -1.
    fn z_shift(&self, x: &Elt, k: usize) -> Elt {
        let e = self.e_n;
        let mut out = self.zero();
        for (i, c) in x.iter().enumerate() {
            if self.coef_is_zero(c) {
                continue;
            }
            let mut idx = i + (k % (2 * e));
            let mut neg = false;
            while idx >= e {
                idx -= e;
                neg = !neg;
            }
            let term = if neg { self.coef_sub(&self.czero(), c) } else { c.clone() };
            out[idx] = self.coef_add(&out[idx], &term);
        }
        out
    }

    fn add(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter().zip(b).map(|(x, y)| self.coef_add(x, y)).collect()
    }

    fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        let e = self.e_n;
        let mut conv: Vec<Coef> = vec![self.czero(); 2 * e - 1];
        for (i, ai) in a.iter().enumerate() {
            if self.coef_is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if self.coef_is_zero(bj) {
                    continue;
                }
                let p = self.coef_mul(ai, bj);
                conv[i + j] = self.coef_add(&conv[i + j], &p);
            }
        }
        let mut out: Vec<Coef> = conv[..e].to_vec();
        for (idx, c) in conv.iter().enumerate().skip(e) {
            out[idx - e] = self.coef_sub(&out[idx - e], c);
        }
        out
    }

    /// Image of a cyclotomic element; denominators must be odd.
    fn embed(&self, x: &CycElt) -> Result<Elt> {
        let xl = x.lift(self.n)?;
        let den = xl.denominator_lcm();
        if den.is_even() {
            return Err(invariant("dyadic embedding requires an odd denominator"));
        }
        let dinv = inv_odd(&den, &self.modulus);
        let mut acc = self.zero();
        for (i, q) in xl.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let scaled = self.red(&(q.numer() * (&den / q.denom()) * &dinv));
            let term: Elt = self.zeta_pows[i]
                .iter()
                .map(|c| self.coef_scale(c, &scaled))
                .collect();
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Valuation with respect to the fixed prime above 2, normalized so that
    /// v(2) = e_n.  None when all components vanish at this precision.
    fn valuation_w(&self, x: &Elt) -> Option<u64> {
        let e = self.e_n;
        let mut best: Option<u64> = None;
        for k in 0..e {
            // Coefficient of w^k after substituting z = 1 + w.
            let mut cw = self.czero();
            for i in k..e {
                cw = self.coef_add(&cw, &self.coef_scale(&x[i], &self.binomials[i][k]));
            }
            let mut min_v: Option<u64> = None;
            for c in &cw {
                if !c.is_zero() {
                    let v = c.trailing_zeros().unwrap();
                    min_v = Some(min_v.map_or(v, |mv| mv.min(v)));
                }
            }
            if let Some(v) = min_v {
                // Exact: a nonzero residue mod 2^N pins its 2-valuation, and
                // vanished coefficients sit at valuation >= e_n * N, above
                // every known candidate.
                let cand = (e as u64) * v + k as u64;
                best = Some(best.map_or(cand, |b| b.min(cand)));
            }
        }
        best
    }
}

fn pascal(rows: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = vec![BigInt::one(); i + 1];
        for k in 1..i {
            row[k] = &t[i - 1][k - 1] + &t[i - 1][k];
        }
        t.push(row);
    }
    t
}

fn inv_odd(d: &BigInt, modulus: &BigInt) -> BigInt {
    let e = d.extended_gcd(modulus);
    assert!(e.gcd.is_one(), "inverse of even number mod 2^N");
    e.x.mod_floor(modulus)
}

fn mul_unit(n: u64, x: u64, y: u64) -> u64 {
    if n <= 1 {
        1
    } else {
        (x as u128 * y as u128 % n as u128) as u64
    }
}

// ---------------------------------------------------------------------------
// Places.
// ---------------------------------------------------------------------------

/// A place of an abelian field above 2: ramification data plus a handle on
/// the matching 2-adic factor of a primitive element's minimal polynomial.
#[derive(Debug, Clone)]
pub struct DyadicPlace {
    /// The field the place lives on.
    pub field: AbelianField,
    /// Position in the canonical (ascending representative) ordering.
    pub index: usize,
    /// Smallest Galois index mapping into this place.
    pub rep: u64,
    /// Ramification index over 2.
    pub e: u64,
    /// Residue degree over 2.
    pub f: u64,
    /// Representatives of the e*f embeddings attached to this place.
    conj_reps: Vec<u64>,
    /// Monic degree-(e*f) factor over the 2-adics, coefficients mod
    /// 2^precision, lowest degree first.
    local_factor: Vec<BigInt>,
    /// Bit precision of `local_factor`.
    pub precision: u32,
}

impl Serialize for DyadicPlace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DyadicPlace", 7)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("rep", &self.rep)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("f", &self.f)?;
        let coeffs: Vec<String> = self.local_factor.iter().map(|c| c.to_string()).collect();
        st.serialize_field("local_factor", &coeffs)?;
        st.serialize_field("precision", &self.precision)?;
        st.end()
    }
}

/// All places of `field` above 2, in canonical order.  The group-theoretic
/// splitting data and the 2-adic factorization are computed independently
/// and must agree.
pub fn dyadic_places(field: &AbelianField) -> Result<Vec<DyadicPlace>> {
    let n = field.conductor();
    let units = group_units(n);
    let h_sub: Vec<u64> = field.stabilizer().to_vec();
    let a = n.trailing_zeros();
    let m = n >> a;
    let pow2 = 1u64 << a;

    let inertia: Vec<u64> = units.iter().copied().filter(|k| k % m == 1 % m).collect();
    let decomp: Vec<u64> = if m == 1 {
        inertia.clone()
    } else {
        let k0 = units
            .iter()
            .copied()
            .find(|k| k % m == 2 % m && (a == 0 || k % pow2 == 1))
            .ok_or_else(|| invariant("missing Frobenius representative"))?;
        let mut gens = inertia.clone();
        gens.push(k0);
        subgroup_closure(n, &gens)
    };
    let ih = subgroup_closure(n, &[inertia.as_slice(), h_sub.as_slice()].concat());
    let dh = subgroup_closure(n, &[decomp.as_slice(), h_sub.as_slice()].concat());
    let e = (ih.len() / h_sub.len()) as u64;
    let f = (dh.len() / ih.len()) as u64;
    let g = (units.len() / dh.len()) as u64;
    if e * f * g != field.degree() {
        return Err(invariant("splitting law does not partition the degree"));
    }

    // Orbits of embeddings under the decomposition group.
    let mut covered: BTreeSet<u64> = BTreeSet::new();
    let mut orbit_data: Vec<Vec<u64>> = Vec::new();
    for &k in &units {
        if covered.contains(&k) {
            continue;
        }
        let orbit: BTreeSet<u64> = dh.iter().map(|&d| mul_unit(n, d, k)).collect();
        covered.extend(orbit.iter().copied());
        let mut coset_reps: BTreeSet<u64> = BTreeSet::new();
        for &kk in &orbit {
            let key = h_sub.iter().map(|&h| mul_unit(n, h, kk)).min().unwrap();
            coset_reps.insert(key);
        }
        let reps: Vec<u64> = coset_reps.into_iter().collect();
        if reps.len() as u64 != e * f {
            return Err(invariant("orbit size does not match e*f"));
        }
        orbit_data.push(reps);
    }
    if orbit_data.len() as u64 != g {
        return Err(invariant("place count does not match g"));
    }
    let mut all_reps: Vec<u64> = orbit_data.iter().flatten().copied().collect();
    all_reps.sort_unstable();
    let mut expected = field.embedding_representatives();
    expected.sort_unstable();
    if all_reps != expected {
        return Err(invariant("place orbits do not partition the embeddings"));
    }

    // Primitive element, its conjugates, and its minimal polynomial.
    let emb = field.embedding_representatives();
    let (_, conjugates) = primitive_element(field, &emb)?;
    let mut minpoly: Vec<CycElt> = vec![CycElt::one(1)];
    for c in &conjugates {
        minpoly = poly_mul_linear(&minpoly, c);
    }
    let mut minpoly_int: Vec<BigInt> = Vec::with_capacity(minpoly.len());
    for c in &minpoly {
        let q = c
            .as_rational()
            .ok_or_else(|| invariant("minimal polynomial has irrational coefficient"))?;
        if !q.is_integer() {
            return Err(invariant("primitive element is not integral"));
        }
        minpoly_int.push(q.to_integer());
    }

    let mdl = model(n, PLACE_BITS);
    let mut conj_by_rep: HashMap<u64, Elt> = HashMap::new();
    for (k, c) in emb.iter().zip(&conjugates) {
        conj_by_rep.insert(*k, mdl.embed(c)?);
    }

    let mut places = Vec::with_capacity(orbit_data.len());
    let mut product: Vec<Elt> = vec![mdl.one()];
    for (index, reps) in orbit_data.iter().enumerate() {
        // G_P = prod over the orbit of (X - iota(sigma_k(t))).
        let mut gp: Vec<Elt> = vec![mdl.one()];
        for k in reps {
            gp = model_poly_mul_linear(&mdl, &gp, &conj_by_rep[k]);
        }
        product = model_poly_mul(&mdl, &product, &gp);
        let mut coeffs = Vec::with_capacity(gp.len());
        for c in &gp {
            coeffs.push(constant_component(&mdl, c)?);
        }
        if coeffs.len() as u64 != e * f + 1 {
            return Err(invariant("local factor degree mismatch"));
        }
        places.push(DyadicPlace {
            field: field.clone(),
            index,
            rep: reps[0],
            e,
            f,
            conj_reps: reps.clone(),
            local_factor: coeffs,
            precision: PLACE_BITS,
        });
    }

    // Cross-check: the local factors multiply back to the minimal polynomial.
    if product.len() != minpoly_int.len() {
        return Err(invariant("local factor product has wrong degree"));
    }
    for (pc, mc) in product.iter().zip(&minpoly_int) {
        let c = constant_component(&mdl, pc)?;
        if c != mc.mod_floor(&mdl.modulus) {
            return Err(invariant("local factors do not multiply to the minimal polynomial"));
        }
    }

    // Cross-check: Berlekamp mod 2 in the squarefree (hence unramified) case.
    let two = BigInt::from(2);
    let mbar: Vec<u8> = f2_trim(
        minpoly_int
            .iter()
            .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
            .collect(),
    );
    if !mbar.is_empty() && f2_deg(&mbar) == field.degree() as usize {
        let sep = f2_gcd(&mbar, &f2_derivative(&mbar));
        if sep == vec![1u8] {
            if e != 1 {
                return Err(invariant("squarefree reduction with ramification"));
            }
            let factors = f2_berlekamp(&mbar);
            if factors.len() as u64 != g || factors.iter().any(|p| f2_deg(p) as u64 != f) {
                return Err(invariant("Berlekamp degrees disagree with the splitting law"));
            }
            let mut mine: Vec<Vec<u8>> = places
                .iter()
                .map(|p| {
                    f2_trim(
                        p.local_factor
                            .iter()
                            .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
                            .collect(),
                    )
                })
                .collect();
            mine.sort_by_key(|p| (p.len(), bits_value(p)));
            if mine != factors {
                return Err(invariant("local factors disagree with Berlekamp mod 2"));
            }
        }
    }

    Ok(places)
}

/// A primitive element of the field together with its conjugates under the
/// given embedding representatives.  Always an algebraic integer.
fn primitive_element(field: &AbelianField, emb: &[u64]) -> Result<(CycElt, Vec<CycElt>)> {
    let n = field.conductor();
    if field.degree() == 1 {
        let one = CycElt::one(1);
        return Ok((one.clone(), vec![one]));
    }
    let orbit_sum = |c: u64| -> CycElt {
        let mut acc = CycElt::zero(n);
        for &h in field.stabilizer() {
            acc = &acc + &CycElt::root_of_unity(n, h as i64 * c as i64);
        }
        acc
    };
    let distinct = |t: &CycElt| -> Option<Vec<CycElt>> {
        let conj: Vec<CycElt> = emb.iter().map(|&k| t.galois(k)).collect();
        for i in 0..conj.len() {
            for j in (i + 1)..conj.len() {
                if conj[i] == conj[j] {
                    return None;
                }
            }
        }
        Some(conj)
    };
    for c in 1..n {
        let t = orbit_sum(c);
        if let Some(conj) = distinct(&t) {
            return Ok((t, conj));
        }
    }
    for c1 in 1..n {
        for c2 in (c1 + 1)..n {
            let t = &orbit_sum(c1) + &orbit_sum(c2);
            if let Some(conj) = distinct(&t) {
                return Ok((t, conj));
            }
        }
    }
    Err(invariant("no primitive element found"))
}

/// Multiply a polynomial with cyclotomic coefficients by (X - root).
fn poly_mul_linear(p: &[CycElt], root: &CycElt) -> Vec<CycElt> {
    let mut out = vec![CycElt::zero(1); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        let up = &out[i + 1] + c;
        out[i + 1] = up;
        let low = &out[i] - &(c * root);
        out[i] = low;
    }
    out
}

/// Same, with model-element coefficients.
fn model_poly_mul_linear(mdl: &LocalModel, p: &[Elt], root: &Elt) -> Vec<Elt> {
    let neg_root: Elt = root.iter().map(|c| mdl.coef_sub(&mdl.czero(), c)).collect();
    let mut out = vec![mdl.zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        let up = mdl.add(&out[i + 1], c);
        out[i + 1] = up;
        let low = mdl.add(&out[i], &mdl.mul(c, &neg_root));
        out[i] = low;
    }
    out
}

/// Product of two polynomials with model-element coefficients.
fn model_poly_mul(mdl: &LocalModel, a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    let mut out = vec![mdl.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let p = mdl.mul(ai, bj);
            out[i + j] = mdl.add(&out[i + j], &p);
        }
    }
    out
}

/// The constant (rational) component of a model element; errors when the
/// element does not lie in Z_2.
fn constant_component(mdl: &LocalModel, x: &Elt) -> Result<BigInt> {
    for (i, c) in x.iter().enumerate() {
        for (j, v) in c.iter().enumerate() {
            if (i, j) != (0, 0) && !v.is_zero() {
                return Err(invariant("expected a rational 2-adic element"));
            }
        }
    }
    let _ = mdl;
    Ok(x[0][0].clone())
}

/// Exact valuation of `x` at `place`, normalized so a uniformizer has
/// valuation 1.  Denominators are cleared first and their (rational)
/// valuation subtracted afterwards.
pub fn dyadic_valuation(x: &CycElt, place: &DyadicPlace) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::InvalidInput("valuation of zero is undefined".into()));
    }
    let field = &place.field;
    if !field.contains(x) {
        return Err(Error::NotInField(field.conductor()));
    }
    let n = field.conductor();
    let xl = x.minimal_cyclotomic().lift(n)?;
    let den = xl.denominator_lcm();
    let den_v2 = den.trailing_zeros().unwrap_or(0);
    let y = xl.scale(&BigRational::from(den));
    debug_assert!(y.denominator_lcm().is_one());
    let correction = place.e as i64 * den_v2 as i64;

    for &bits in &BITS_SCHEDULE {
        let mdl = model(n, bits);
        // Primary path: 2-adic valuation of the local norm, divided by f.
        let mut norm = mdl.one();
        for &k in &place.conj_reps {
            let img = mdl.embed(&y.galois(k))?;
            norm = mdl.mul(&norm, &img);
        }
        let c = constant_component(&mdl, &norm)?;
        let norm_val = if c.is_zero() { None } else { c.trailing_zeros() };
        // Cross-check: w-adic expansion of the embedded conjugate.
        let img = mdl.embed(&y.galois(place.rep))?;
        let w_val = mdl.valuation_w(&img);
        if let (Some(nv), Some(wv)) = (norm_val, w_val) {
            if nv % place.f != 0 {
                return Err(invariant("local norm valuation not divisible by f"));
            }
            let v_norm = (nv / place.f) as i64;
            let e_n = mdl.e_n as u64;
            if (wv * place.e) % e_n != 0 {
                return Err(invariant("w-adic valuation incompatible with ramification"));
            }
            let v_w = (wv * place.e / e_n) as i64;
            if v_norm != v_w {
                return Err(invariant("norm and w-adic valuations disagree"));
            }
            return Ok(v_norm - correction);
        }
    }
    Err(Error::PrecisionExhausted(*BITS_SCHEDULE.last().unwrap()))
}

/// A square class is odd when its representative has even valuation at
/// every place above 2.
pub fn is_odd_class(class: &SquareClass) -> Result<bool> {
    for p in &dyadic_places(&class.field)? {
        if dyadic_valuation(&class.rep, p)?.rem_euclid(2) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqclass::{class_of, explicit_rational_sqrt};

    fn rational(v: i64) -> CycElt {
        CycElt::from_rational(BigRational::from(BigInt::from(v)))
    }

    #[test]
    fn berlekamp_on_cyclotomics() {
        let two = BigInt::from(2);
        let reduce = |m: u64| -> Vec<u8> {
            f2_trim(
                cyclotomic_polynomial(m)
                    .iter()
                    .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
                    .collect(),
            )
        };
        let f7 = f2_berlekamp(&reduce(7));
        assert_eq!(f7.len(), 2);
        assert!(f7.iter().all(|p| f2_deg(p) == 3));
        assert_eq!(f2_mul(&f7[0], &f7[1]), reduce(7));
        let f5 = f2_berlekamp(&reduce(5));
        assert_eq!(f5.len(), 1);
        assert_eq!(f2_deg(&f5[0]), 4);
        let f15 = f2_berlekamp(&reduce(15));
        assert_eq!(f15.len(), 2);
        assert!(f15.iter().all(|p| f2_deg(p) == 4));
        assert_eq!(f2_mul(&f15[0], &f15[1]), reduce(15));
    }

    #[test]
    fn hensel_lift_divides() {
        let phi = cyclotomic_polynomial(7);
        let two = BigInt::from(2);
        let phi2: Vec<u8> = f2_trim(
            phi.iter()
                .map(|c| (c.mod_floor(&two) == BigInt::one()) as u8)
                .collect(),
        );
        let h0 = &f2_berlekamp(&phi2)[0];
        let h = hensel_factor(phi.as_slice(), h0, 64);
        assert_eq!(h.len(), 4);
        assert!(h.last().unwrap().is_one());
        let md = BigInt::one() << 64usize;
        let (_, r) = zp_divmod(phi.as_slice(), &h, &md);
        assert!(r.is_empty());
        for (i, &b) in h0.iter().enumerate() {
            assert_eq!(h[i].mod_floor(&two), BigInt::from(b));
        }
    }

    #[test]
    fn splitting_law_examples() {
        let cases: Vec<(AbelianField, u64, u64, u64)> = vec![
            (AbelianField::rationals(), 1, 1, 1),
            (AbelianField::cyclotomic(3), 1, 2, 1),
            (AbelianField::cyclotomic(4), 2, 1, 1),
            (AbelianField::cyclotomic(5), 1, 4, 1),
            (AbelianField::cyclotomic(8), 4, 1, 1),
            (AbelianField::fixed_field(5, &[4]), 1, 2, 1),
            (AbelianField::fixed_field(8, &[7]), 2, 1, 1),
            (AbelianField::fixed_field(8, &[3]), 2, 1, 1),
            (AbelianField::cyclotomic(12), 2, 2, 1),
            (AbelianField::fixed_field(17, &[2]), 1, 1, 2),
        ];
        for (field, e, f, g) in cases {
            let places = dyadic_places(&field).unwrap();
            assert_eq!(places.len() as u64, g, "g for conductor {}", field.conductor());
            for p in &places {
                assert_eq!((p.e, p.f), (e, f), "e,f for conductor {}", field.conductor());
                assert_eq!(p.local_factor.len() as u64, e * f + 1);
            }
        }
    }

    #[test]
    fn rational_valuations() {
        let q = AbelianField::rationals();
        let places = dyadic_places(&q).unwrap();
        assert_eq!(places.len(), 1);
        let p = &places[0];
        assert_eq!(dyadic_valuation(&rational(2), p).unwrap(), 1);
        assert_eq!(dyadic_valuation(&rational(-3), p).unwrap(), 0);
        assert_eq!(dyadic_valuation(&rational(12), p).unwrap(), 2);
        let half = CycElt::from_rational(BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(dyadic_valuation(&half, p).unwrap(), -1);
        assert!(dyadic_valuation(&rational(0), p).is_err());
    }

    #[test]
    fn gaussian_and_eisenstein_valuations() {
        let qi = AbelianField::cyclotomic(4);
        let p = &dyadic_places(&qi).unwrap()[0];
        let i = CycElt::root_of_unity(4, 1);
        let one_plus_i = &rational(1) + &i;
        assert_eq!(dyadic_valuation(&one_plus_i, p).unwrap(), 1);
        assert_eq!(dyadic_valuation(&rational(2), p).unwrap(), 2);
        assert_eq!(dyadic_valuation(&i, p).unwrap(), 0);

        let q3 = AbelianField::cyclotomic(3);
        let p3 = &dyadic_places(&q3).unwrap()[0];
        assert_eq!(dyadic_valuation(&rational(2), p3).unwrap(), 1);
        let omega = CycElt::root_of_unity(3, 1);
        let one_minus_omega = &rational(1) - &omega;
        assert_eq!(dyadic_valuation(&one_minus_omega, p3).unwrap(), 0);
    }

    #[test]
    fn ramified_eighth_roots() {
        let q8 = AbelianField::cyclotomic(8);
        let p = &dyadic_places(&q8).unwrap()[0];
        let z = CycElt::root_of_unity(8, 1);
        let pi = &rational(1) - &z;
        assert_eq!(dyadic_valuation(&pi, p).unwrap(), 1);
        assert_eq!(dyadic_valuation(&rational(2), p).unwrap(), 4);
        let sqrt2 = &z + &CycElt::root_of_unity(8, -1);
        assert_eq!(dyadic_valuation(&sqrt2, p).unwrap(), 2);

        let qr2 = AbelianField::fixed_field(8, &[7]);
        let pr = &dyadic_places(&qr2).unwrap()[0];
        assert_eq!(dyadic_valuation(&sqrt2, pr).unwrap(), 1);
        assert_eq!(dyadic_valuation(&rational(2), pr).unwrap(), 2);
    }

    #[test]
    fn split_field_valuations() {
        // 2 splits in Q(sqrt 17); (1 + sqrt 17)/2 has valuation 2 at one
        // place and 0 at the other, while 2 itself has valuation 1 at both.
        let k = AbelianField::fixed_field(17, &[2]);
        let places = dyadic_places(&k).unwrap();
        assert_eq!(places.len(), 2);
        let sqrt17 = explicit_rational_sqrt(&BigInt::from(17));
        assert_eq!(
            (&sqrt17 * &sqrt17).as_rational().unwrap(),
            BigRational::from(BigInt::from(17))
        );
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let x = (&rational(1) + &sqrt17).scale(&half);
        let mut vs = [
            dyadic_valuation(&x, &places[0]).unwrap(),
            dyadic_valuation(&x, &places[1]).unwrap(),
        ];
        vs.sort_unstable();
        assert_eq!(vs, [0, 2]);
        assert_eq!(dyadic_valuation(&rational(2), &places[0]).unwrap(), 1);
        assert_eq!(dyadic_valuation(&rational(2), &places[1]).unwrap(), 1);
    }

    #[test]
    fn inert_golden_ratio_field() {
        // 2 is inert in Q(sqrt 5); delta_5 = -(5 + sqrt 5)/2 has norm 5 and
        // hence valuation 0.
        let k = AbelianField::fixed_field(5, &[4]);
        let places = dyadic_places(&k).unwrap();
        assert_eq!(places.len(), 1);
        let d5 = crate::cyclo::delta_p(5);
        assert_eq!(dyadic_valuation(&d5, &places[0]).unwrap(), 0);
        assert_eq!(dyadic_valuation(&rational(2), &places[0]).unwrap(), 1);
    }

    #[test]
    fn valuation_is_additive() {
        let qi = AbelianField::cyclotomic(4);
        let p = &dyadic_places(&qi).unwrap()[0];
        let i = CycElt::root_of_unity(4, 1);
        let x = &rational(3) + &i; // norm 10
        let y = &rational(1) + &i; // norm 2
        let xy = &x * &y;
        assert_eq!(
            dyadic_valuation(&xy, p).unwrap(),
            dyadic_valuation(&x, p).unwrap() + dyadic_valuation(&y, p).unwrap()
        );
    }

    #[test]
    fn precision_escalates_for_large_powers() {
        let q = AbelianField::rationals();
        let p = &dyadic_places(&q).unwrap()[0];
        let big = CycElt::from_rational(BigRational::from(BigInt::one() << 70usize));
        assert_eq!(dyadic_valuation(&big, p).unwrap(), 70);
    }

    #[test]
    fn odd_classes() {
        let q = AbelianField::rationals();
        assert!(is_odd_class(&class_of(&rational(-1), &q).unwrap()).unwrap());
        assert!(is_odd_class(&class_of(&rational(-3), &q).unwrap()).unwrap());
        assert!(!is_odd_class(&class_of(&rational(2), &q).unwrap()).unwrap());
        assert!(!is_odd_class(&class_of(&rational(6), &q).unwrap()).unwrap());

        let k5 = AbelianField::fixed_field(5, &[4]);
        let d5 = crate::cyclo::delta_p(5);
        assert!(is_odd_class(&class_of(&d5, &k5).unwrap()).unwrap());

        let qi = AbelianField::cyclotomic(4);
        let i = CycElt::root_of_unity(4, 1);
        let one_plus_i = &rational(1) + &i;
        assert!(!is_odd_class(&class_of(&one_plus_i, &qi).unwrap()).unwrap());
    }

    #[test]
    fn membership_errors() {
        let q3 = AbelianField::cyclotomic(3);
        let p = &dyadic_places(&q3).unwrap()[0];
        let z5 = CycElt::root_of_unity(5, 1);
        assert!(matches!(dyadic_valuation(&z5, p), Err(Error::NotInField(_))));
    }

    #[test]
    fn place_serialization_mentions_factor() {
        let p = &dyadic_places(&AbelianField::cyclotomic(3)).unwrap()[0];
        let js = serde_json::to_value(p).unwrap();
        assert_eq!(js["e"], 1);
        assert_eq!(js["f"], 2);
        assert_eq!(js["local_factor"].as_array().unwrap().len(), 3);
        assert_eq!(js["precision"], 64);
    }
}
