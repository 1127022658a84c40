//! Exact irreducible characters of a finite group.
//!
//! Works over a prime field F_q with q = 1 mod exp(G) and q > 2|G|: the class
//! algebra matrices are simultaneously diagonalized there, degrees and values
//! are read off modulo q, and the values are lifted exactly to Q(zeta_e) via
//! the eigenvalue-multiplicity averaging formula.  Everything downstream is
//! verified with exact cyclotomic arithmetic, so q-side bugs cannot survive.

use num::{BigRational, FromPrimitive};

use crate::arith::{factor_u64, inv_mod, is_prime_u64, pow_mod};
use crate::cyclo::CycElt;
use crate::error::{Error, Result};
use crate::groups::{Classes, Group};

fn mod_mul(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn mod_add(a: u64, b: u64, q: u64) -> u64 {
    (a + b) % q
}

fn mod_sub(a: u64, b: u64, q: u64) -> u64 {
    (a + q - b % q) % q
}

fn mod_inv(a: u64, q: u64) -> u64 {
    debug_assert!(a % q != 0);
    inv_mod(a % q, q)
}

/// Least prime q with q = 1 (mod e) and q > bound.
fn working_prime(e: u64, bound: u64) -> u64 {
    let mut q = e + 1;
    loop {
        if q > bound && is_prime_u64(q) {
            return q;
        }
        q += e;
    }
}

fn primitive_root(q: u64) -> u64 {
    let fac = factor_u64(q - 1);
    'outer: for g in 2..q {
        for &(p, _) in &fac {
            if pow_mod(g, (q - 1) / p, q) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("prime field has a primitive root")
}

/// A subspace of F_q^r in column-reduced form: `basis[j][pivots[j]] == 1`
/// and every other basis vector vanishes at `pivots[j]`.
#[derive(Default, Clone)]
struct Space {
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Space {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn full(r: usize) -> Space {
        let mut s = Space::default();
        for i in 0..r {
            let mut v = vec![0u64; r];
            v[i] = 1;
            s.basis.push(v);
            s.pivots.push(i);
        }
        s
    }

    /// Inserts `v` if it enlarges the span; keeps the reduced form.
    fn insert(&mut self, mut v: Vec<u64>, q: u64) -> bool {
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = mod_sub(*x, mod_mul(c, *y, q), q);
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(v[p], q);
        for x in v.iter_mut() {
            *x = mod_mul(*x, inv, q);
        }
        for b in self.basis.iter_mut() {
            let c = b[p];
            if c != 0 {
                for (x, y) in b.iter_mut().zip(&v) {
                    *x = mod_sub(*x, mod_mul(c, *y, q), q);
                }
            }
        }
        self.basis.push(v);
        self.pivots.push(p);
        true
    }

    /// Coordinates of `v` in this basis; errors if `v` is outside the span.
    fn coords(&self, v: &[u64], q: u64) -> Result<Vec<u64>> {
        let mut x = v.to_vec();
        let mut c = vec![0u64; self.dim()];
        for (j, (b, &p)) in self.basis.iter().zip(&self.pivots).enumerate() {
            c[j] = x[p];
            if c[j] != 0 {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi = mod_sub(*xi, mod_mul(c[j], *bi, q), q);
                }
            }
        }
        if x.iter().any(|&t| t != 0) {
            return Err(Error::TableConstruction(
                "vector left an invariant subspace".into(),
            ));
        }
        Ok(c)
    }
}

fn mat_vec(m: &[Vec<u64>], v: &[u64], q: u64) -> Vec<u64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(0u64, |acc, (&a, &b)| mod_add(acc, mod_mul(a, b, q), q))
        })
        .collect()
}

/// Kernel basis of a square matrix over F_q.
fn nullspace_fq(mut m: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..n).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let inv = mod_inv(m[row][col], q);
        for x in m[row].iter_mut() {
            *x = mod_mul(*x, inv, q);
        }
        for r in 0..n {
            if r != row && m[r][col] != 0 {
                let c = m[r][col];
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = mod_sub(*x, mod_mul(c, *y, q), q);
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    let mut kernel = Vec::new();
    for col in 0..n {
        if pivot_of_col[col].is_some() {
            continue;
        }
        let mut v = vec![0u64; n];
        v[col] = 1;
        for c2 in 0..n {
            if let Some(r) = pivot_of_col[c2] {
                v[c2] = mod_sub(0, m[r][col], q);
            }
        }
        kernel.push(v);
    }
    kernel
}

/// Splits F_q^r into the common eigenspaces of the class matrices; returns
/// one normalized eigenvector (central character mod q) per irreducible.
fn common_eigenvectors(mats: &[Vec<Vec<u64>>], r: usize, q: u64) -> Result<Vec<Vec<u64>>> {
    let mut spaces = vec![Space::full(r)];
    for m in mats {
        if spaces.iter().all(|s| s.dim() == 1) {
            break;
        }
        let mut next = Vec::new();
        for sp in spaces {
            let d = sp.dim();
            if d == 1 {
                next.push(sp);
                continue;
            }
            let mut a = vec![vec![0u64; d]; d];
            for j in 0..d {
                let mv = mat_vec(m, &sp.basis[j], q);
                let c = sp.coords(&mv, q)?;
                for (row, item) in c.into_iter().enumerate() {
                    a[row][j] = item;
                }
            }
            let mut found = 0usize;
            for lam in 0..q {
                let mut shifted = a.clone();
                for (i, srow) in shifted.iter_mut().enumerate() {
                    srow[i] = mod_sub(srow[i], lam, q);
                }
                let ker = nullspace_fq(shifted, q);
                if ker.is_empty() {
                    continue;
                }
                found += ker.len();
                let mut newsp = Space::default();
                for kv in ker {
                    let mut ambient = vec![0u64; r];
                    for (j, &cj) in kv.iter().enumerate() {
                        if cj != 0 {
                            for (x, y) in ambient.iter_mut().zip(&sp.basis[j]) {
                                *x = mod_add(*x, mod_mul(cj, *y, q), q);
                            }
                        }
                    }
                    newsp.insert(ambient, q);
                }
                next.push(newsp);
                if found == d {
                    break;
                }
            }
            if found != d {
                return Err(Error::TableConstruction(
                    "class matrix is not diagonalizable over the working field".into(),
                ));
            }
        }
        spaces = next;
    }
    if !spaces.iter().all(|s| s.dim() == 1) {
        return Err(Error::TableConstruction(
            "class matrices failed to separate all eigenvectors".into(),
        ));
    }
    Ok(spaces.into_iter().map(|s| s.basis.into_iter().next().unwrap()).collect())
}

fn isqrt_exact(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for c in r.saturating_sub(2)..=r + 2 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}

/// Computes all irreducible character rows, canonically ordered by
/// (degree, lexicographic value coefficients).  Values are returned in their
/// minimal cyclotomic fields.
pub(crate) fn irreducible_characters(g: &Group, classes: &Classes) -> Result<Vec<Vec<CycElt>>> {
    let r = classes.len();
    let e = g.exponent();
    let order = g.order();
    let q = working_prime(e, 2 * order);

    // Members of each class.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (i, &c) in classes.class_of.iter().enumerate() {
        members[c].push(i);
    }

    // Class algebra matrices: mats[i][j][k] counts x in C_i, y in C_j with
    // x*y = rep_k.
    let mut mats = vec![vec![vec![0u64; r]; r]; r];
    for i in 0..r {
        for &x in &members[i] {
            let xinv = g.inv(x);
            for k in 0..r {
                let y = g.mul(xinv, classes.reps[k]);
                mats[i][classes.class_of[y]][k] += 1;
            }
        }
    }

    let eigen = common_eigenvectors(&mats, r, q)?;
    if eigen.len() != r {
        return Err(Error::TableConstruction(format!(
            "found {} eigenvectors for {} classes",
            eigen.len(),
            r
        )));
    }

    // Normalize so the identity-class component is 1 (its exact value).
    let id_class = classes.class_of[g.identity_index()];
    let mut omegas = Vec::with_capacity(r);
    for v in eigen {
        let c = v[id_class];
        if c == 0 {
            return Err(Error::TableConstruction(
                "eigenvector vanishes at the identity class".into(),
            ));
        }
        let inv = mod_inv(c, q);
        omegas.push(v.into_iter().map(|x| mod_mul(x, inv, q)).collect::<Vec<_>>());
    }

    // Degrees from the norm sum, lifted exactly (d^2 < q/2 makes it unique).
    let jinv = g.power_map(classes, -1);
    let class_size_inv: Vec<u64> = classes
        .sizes
        .iter()
        .map(|&s| mod_inv(s as u64 % q, q))
        .collect();
    let mut degrees = Vec::with_capacity(r);
    for om in &omegas {
        let mut t = 0u64;
        for j in 0..r {
            t = mod_add(t, mod_mul(mod_mul(om[j], om[jinv[j]], q), class_size_inv[j], q), q);
        }
        if t == 0 {
            return Err(Error::TableConstruction("degree norm sum vanished".into()));
        }
        let d2 = mod_mul(order % q, mod_inv(t, q), q);
        let d = isqrt_exact(d2).ok_or_else(|| {
            Error::TableConstruction(format!("degree square {d2} is not a perfect square"))
        })?;
        if d == 0 || d * d > order {
            return Err(Error::TableConstruction(format!("implausible degree {d}")));
        }
        degrees.push(d);
    }
    if degrees.iter().map(|d| d * d).sum::<u64>() != order {
        return Err(Error::TableConstruction(
            "degree squares do not sum to the group order".into(),
        ));
    }

    // Character values mod q.
    let chi_mod: Vec<Vec<u64>> = omegas
        .iter()
        .zip(&degrees)
        .map(|(om, &d)| {
            (0..r)
                .map(|j| mod_mul(mod_mul(d % q, om[j], q), class_size_inv[j], q))
                .collect()
        })
        .collect();

    // Power-class map: pm[s][j] = class of rep_j^s, for all s mod e.
    let mut pm = vec![vec![0usize; r]; e as usize];
    for j in 0..r {
        let mut x = g.identity_index();
        for s in 0..e as usize {
            pm[s][j] = classes.class_of[x];
            x = g.mul(x, classes.reps[j]);
        }
    }

    // Exact lift: the coefficient of zeta_e^l in chi(g_j) is the multiplicity
    // of the eigenvalue zeta^l, recovered by averaging over powers of g_j.
    let z = pow_mod(primitive_root(q), (q - 1) / e, q);
    let mut z_pows = vec![1u64; e as usize];
    for s in 1..e as usize {
        z_pows[s] = mod_mul(z_pows[s - 1], z, q);
    }
    let e_inv = mod_inv(e % q, q);
    let mut rows: Vec<(u64, Vec<CycElt>)> = Vec::with_capacity(r);
    for t in 0..r {
        let mut vals = Vec::with_capacity(r);
        for j in 0..r {
            let mut poly = vec![BigRational::from_integer(0.into()); e as usize];
            let mut coeff_sum = 0u64;
            for (l, pc) in poly.iter_mut().enumerate() {
                let mut acc = 0u64;
                for s in 0..e as usize {
                    let zexp = (e as usize - (l * s) % e as usize) % e as usize;
                    acc = mod_add(acc, mod_mul(chi_mod[t][pm[s][j]], z_pows[zexp], q), q);
                }
                let c = mod_mul(acc, e_inv, q);
                if c > degrees[t] {
                    return Err(Error::TableConstruction(format!(
                        "eigenvalue multiplicity {c} exceeds degree {}",
                        degrees[t]
                    )));
                }
                coeff_sum += c;
                *pc = BigRational::from_u64(c).unwrap();
            }
            if coeff_sum != degrees[t] {
                return Err(Error::TableConstruction(
                    "eigenvalue multiplicities do not sum to the degree".into(),
                ));
            }
            vals.push(CycElt::from_poly(e, poly).minimal_cyclotomic());
        }
        rows.push((degrees[t], vals));
    }

    // Canonical row order: degree ascending, then coefficient tuples of the
    // values (lifted to the common modulus) descending, so the trivial
    // character leads and conjugate pairs sit adjacently.
    rows.sort_by_cached_key(|(d, vals)| {
        let key: Vec<Vec<BigRational>> = vals
            .iter()
            .map(|v| v.lift(e).expect("value lifts to exponent field").coeffs().to_vec())
            .collect();
        (*d, std::cmp::Reverse(key))
    });
    Ok(rows.into_iter().map(|(_, vals)| vals).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn working_primes() {
        assert_eq!(working_prime(12, 48), 61);
        assert_eq!(working_prime(5, 250), 251);
        assert_eq!(working_prime(1, 2), 3);
    }

    #[test]
    fn nullspace_small() {
        // x + 2y = 0 over F_5 twice
        let m = vec![vec![1, 2], vec![2, 4]];
        let ker = nullspace_fq(m, 5);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert_eq!((v[0] + 2 * v[1]) % 5, 0);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(61), 2);
        let q = 251;
        let g = primitive_root(q);
        let mut seen = std::collections::HashSet::new();
        let mut x = 1u64;
        for _ in 0..q - 1 {
            x = mod_mul(x, g, q);
            seen.insert(x);
        }
        assert_eq!(seen.len(), (q - 1) as usize);
    }
}
