//! Abelian number fields as fixed fields inside cyclotomics.
//!
//! A field is the subgroup `H` of `(Z/n)^x` whose automorphisms fix it; we
//! never pick primitive elements for field *identity* (only transiently for
//! dyadic computations elsewhere). Fields are always stored at their
//! conductor, which makes equality and serialization canonical.

use super::{solve_exact, CycElt};
use crate::arith::{divisors_u64, gcd_u64, lcm_u64, phi_u64, units_mod};
use crate::error::{invariant, Error, Result};
use num::{BigRational, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::sync::OnceLock;

/// Units of Z/n with the convention that n = 1 has unit group {1}.
pub(crate) fn group_units(n: u64) -> Vec<u64> {
    if n == 1 {
        vec![1]
    } else {
        units_mod(n)
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        1
    } else {
        (a as u128 * b as u128 % n as u128) as u64
    }
}

/// Closure of a generating set inside (Z/n)^x, sorted ascending.
/// The identity is represented by 1 for every n (including n = 1).
pub(crate) fn subgroup_closure(n: u64, gens: &[u64]) -> Vec<u64> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(1u64);
    let mut frontier: Vec<u64> = vec![1];
    let gens: Vec<u64> = gens
        .iter()
        .map(|g| if n == 1 { 1 } else { g % n })
        .collect();
    for g in &gens {
        assert!(
            n == 1 || gcd_u64(*g, n) == 1,
            "subgroup generator {g} is not a unit mod {n}"
        );
    }
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = mul_mod(x, *g, n);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// An abelian number field `K`, as the fixed field of `stab <= (Z/n)^x`
/// acting on `Q(zeta_n)`; `n` is the conductor of `K`.
#[derive(Debug, Clone)]
pub struct AbelianField {
    n: u64,
    stab: Vec<u64>, // full sorted subgroup
    basis: OnceLock<Vec<CycElt>>,
}

impl PartialEq for AbelianField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.stab == other.stab
    }
}
impl Eq for AbelianField {}

impl AbelianField {
    /// The rationals.
    pub fn rationals() -> Self {
        AbelianField {
            n: 1,
            stab: vec![1],
            basis: OnceLock::new(),
        }
    }

    /// The full cyclotomic field Q(zeta_n).
    pub fn cyclotomic(n: u64) -> Self {
        Self::fixed_field(n, &[])
    }

    /// The fixed field of the subgroup generated by `gens` inside (Z/n)^x.
    pub fn fixed_field(n: u64, gens: &[u64]) -> Self {
        assert!(n >= 1);
        let stab = subgroup_closure(n, gens);
        Self::reduce_to_conductor(n, stab)
    }

    /// Conductor reduction: find the least d | n whose unit-group kernel is
    /// contained in the stabilizer, and push the subgroup down to d.
    fn reduce_to_conductor(n: u64, stab: Vec<u64>) -> Self {
        for d in divisors_u64(n) {
            // kernel of (Z/n)^x -> (Z/d)^x must lie inside stab
            let kernel_inside = group_units(n)
                .iter()
                .all(|k| !(d == 1 || k % d == 1) || stab.binary_search(k).is_ok());
            if kernel_inside {
                // image of stab in (Z/d)^x
                let mut img: Vec<u64> = stab
                    .iter()
                    .map(|k| if d == 1 { 1 } else { k % d })
                    .collect();
                img.sort_unstable();
                img.dedup();
                debug_assert_eq!(
                    phi_u64(n) / stab.len() as u64,
                    phi_u64(d) / img.len() as u64,
                    "conductor reduction must preserve the degree"
                );
                return AbelianField {
                    n: d,
                    stab: img,
                    basis: OnceLock::new(),
                };
            }
        }
        unreachable!("d = n always works");
    }

    /// The smallest field containing all the given elements.
    pub fn generated_by(elts: &[CycElt]) -> Self {
        let mut m = 1u64;
        let reduced: Vec<CycElt> = elts.iter().map(|e| e.minimal_cyclotomic()).collect();
        for e in &reduced {
            m = lcm_u64(m, e.modulus());
        }
        let lifted: Vec<CycElt> = reduced.iter().map(|e| e.lift(m).unwrap()).collect();
        let stab: Vec<u64> = group_units(m)
            .into_iter()
            .filter(|k| lifted.iter().all(|e| e.galois((*k).max(1)) == *e))
            .collect();
        Self::reduce_to_conductor(m, stab)
    }

    /// Conductor of the field.
    pub fn conductor(&self) -> u64 {
        self.n
    }

    /// The full stabilizer subgroup (sorted).
    pub fn stabilizer(&self) -> &[u64] {
        &self.stab
    }

    pub fn degree(&self) -> u64 {
        phi_u64(self.n) / self.stab.len() as u64
    }

    pub fn is_rationals(&self) -> bool {
        self.n == 1
    }

    /// Real iff complex conjugation (-1 mod n) fixes the field.
    pub fn is_real(&self) -> bool {
        self.n <= 2 || self.stab.binary_search(&(self.n - 1)).is_ok()
    }

    /// The maximal real subfield.
    pub fn real_subfield(&self) -> Self {
        if self.is_real() {
            return self.clone();
        }
        let mut gens = self.stab.clone();
        gens.push(self.n - 1);
        Self::fixed_field(self.n, &gens)
    }

    /// Stabilizer lifted to (Z/m)^x (n must divide m): the preimage under
    /// reduction mod n.
    pub fn stabilizer_at(&self, m: u64) -> Vec<u64> {
        assert_eq!(m % self.n, 0, "stabilizer_at: {} does not divide {m}", self.n);
        group_units(m)
            .into_iter()
            .filter(|k| self.n == 1 || self.stab.binary_search(&(k % self.n)).is_ok())
            .collect()
    }

    /// Membership test.
    pub fn contains(&self, x: &CycElt) -> bool {
        let xm = x.minimal_cyclotomic();
        let m = lcm_u64(self.n, xm.modulus());
        let lifted = xm.lift(m).unwrap();
        self.stabilizer_at(m)
            .into_iter()
            .all(|k| lifted.galois(k.max(1)) == lifted)
    }

    /// Subfield test: self ⊆ other.
    pub fn is_subfield_of(&self, other: &AbelianField) -> bool {
        let m = lcm_u64(self.n, other.n);
        let hs = self.stabilizer_at(m);
        let ho = other.stabilizer_at(m);
        // self ⊆ other  ⟺  stab(other) ⊆ stab(self)
        ho.iter().all(|k| hs.binary_search(k).is_ok())
    }

    /// Compositum of two fields.
    pub fn compositum(&self, other: &AbelianField) -> AbelianField {
        let m = lcm_u64(self.n, other.n);
        let hs = self.stabilizer_at(m);
        let ho = other.stabilizer_at(m);
        let inter: Vec<u64> = hs
            .iter()
            .copied()
            .filter(|k| ho.binary_search(k).is_ok())
            .collect();
        Self::reduce_to_conductor(m, inter)
    }

    /// Intersection of two fields.
    pub fn intersection(&self, other: &AbelianField) -> AbelianField {
        let m = lcm_u64(self.n, other.n);
        let mut gens = self.stabilizer_at(m);
        gens.extend(other.stabilizer_at(m));
        Self::fixed_field(m, &gens)
    }

    /// Deterministic coset representatives of the stabilizer in (Z/n)^x:
    /// one per embedding of the field, ascending by smallest member.
    pub fn embedding_representatives(&self) -> Vec<u64> {
        let units = group_units(self.n);
        let mut seen: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
        let mut reps = Vec::new();
        for u in units {
            if seen.contains(&u) {
                continue;
            }
            reps.push(u);
            for h in &self.stab {
                seen.insert(mul_mod(u, *h, self.n));
            }
        }
        reps
    }

    /// Canonical Q-basis of the field: reduced echelon basis of the subspace
    /// of Q(zeta_n) fixed by the stabilizer. The first basis vector is always
    /// rational (the fixed space contains 1).
    pub fn basis(&self) -> &[CycElt] {
        self.basis.get_or_init(|| {
            let phi = phi_u64(self.n) as usize;
            if self.stab.len() == 1 {
                return (0..phi)
                    .map(|j| CycElt::root_of_unity(self.n, j as i64))
                    .collect();
            }
            // stack (M_h - I) for the subgroup elements; kernel = fixed space
            let mut rows: Vec<Vec<BigRational>> = Vec::new();
            for h in &self.stab {
                if *h == 1 {
                    continue;
                }
                // matrix of sigma_h: column j = coords of zeta^{j h}
                let mut cols = Vec::with_capacity(phi);
                for j in 0..phi {
                    let img = CycElt::root_of_unity(self.n, (j as u64 * h) as i64);
                    cols.push(img.coeffs);
                }
                for r in 0..phi {
                    let mut row: Vec<BigRational> = (0..phi).map(|c| cols[c][r].clone()).collect();
                    row[r] -= BigRational::from_integer(1.into());
                    // subtracting identity: row r of (M_h - I)
                    rows.push(row);
                }
            }
            let kernel = nullspace(&rows, phi);
            debug_assert_eq!(kernel.len() as u64, self.degree());
            kernel
                .into_iter()
                .map(|v| CycElt {
                    n: self.n,
                    coeffs: v,
                })
                .collect()
        })
    }

    /// Express x in the canonical basis (error if x is not in the field).
    pub fn coordinates(&self, x: &CycElt) -> Result<Vec<BigRational>> {
        let lifted = x
            .minimal_cyclotomic()
            .lift(self.n)
            .map_err(|_| Error::NotInField(self.n))?;
        let basis = self.basis();
        let cols: Vec<Vec<BigRational>> = basis.iter().map(|b| b.coeffs.clone()).collect();
        solve_exact(&cols, &lifted.coeffs, phi_u64(self.n) as usize)
            .ok_or(Error::NotInField(self.n))
    }

    /// Relative norm N_{L/K}(x) for K = self ⊆ L: the product of the images
    /// of x under coset representatives of Gal(M/L) in Gal(M/K).
    pub fn relative_norm_from(&self, upper: &AbelianField, x: &CycElt) -> Result<CycElt> {
        if !self.is_subfield_of(upper) {
            return Err(Error::NotSubfield(
                format!("{self:?}"),
                format!("{upper:?}"),
            ));
        }
        if !upper.contains(x) {
            return Err(Error::NotInField(upper.n));
        }
        let m = lcm_u64(self.n, upper.n);
        let hk = self.stabilizer_at(m);
        let hl = upper.stabilizer_at(m);
        let hlset: std::collections::BTreeSet<u64> = hl.iter().copied().collect();
        // coset reps of H_L in H_K
        let mut reps = Vec::new();
        let mut covered: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
        for k in &hk {
            if covered.contains(k) {
                continue;
            }
            reps.push(*k);
            for h in &hlset {
                covered.insert(mul_mod(*k, *h, m));
            }
        }
        let xl = x.lift(m).unwrap_or_else(|_| {
            x.minimal_cyclotomic()
                .lift(m)
                .expect("x in L implies modulus divides m")
        });
        let mut acc = CycElt::one(m);
        for k in reps {
            acc = &acc * &xl.galois(k.max(1));
        }
        if !self.contains(&acc) {
            return Err(invariant("relative norm landed outside the base field"));
        }
        Ok(acc.minimal_cyclotomic())
    }

    /// For K = self ⊆ L with [L:K] = 2, produce (delta, sqrt_delta) with
    /// delta in K, sqrt_delta in L \ K, sqrt_delta^2 = delta, so L = K(√delta).
    /// sqrt_delta = beta - tau(beta) for the first basis element beta of L
    /// moved by the nontrivial K-automorphism tau of L.
    pub fn quadratic_generator(&self, upper: &AbelianField) -> Result<(CycElt, CycElt)> {
        if !self.is_subfield_of(upper) || upper.degree() != 2 * self.degree() {
            return Err(Error::NotSubfield(
                format!("{self:?}"),
                format!("{upper:?}"),
            ));
        }
        let m = lcm_u64(self.n, upper.n);
        let hk = self.stabilizer_at(m);
        let hl = upper.stabilizer_at(m);
        let tau = *hk
            .iter()
            .find(|k| hl.binary_search(k).is_err())
            .ok_or_else(|| invariant("no nontrivial relative automorphism"))?;
        for beta in upper.basis() {
            let b = beta.lift(m).unwrap_or_else(|_| beta.clone().lift(m).unwrap());
            let moved = b.galois(tau.max(1));
            if moved != b {
                let sqrt = &b - &moved;
                let delta = &sqrt * &sqrt;
                if !self.contains(&delta) {
                    return Err(invariant("(beta - tau beta)^2 should be tau-fixed"));
                }
                return Ok((delta.minimal_cyclotomic(), sqrt.minimal_cyclotomic()));
            }
        }
        Err(invariant("quadratic extension with no moved basis element"))
    }
}

/// Nullspace of a rational matrix given by rows (each of length `dim`),
/// as canonical reduced-echelon kernel vectors.
pub(crate) fn nullspace(rows: &[Vec<BigRational>], dim: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; nrows];
    let mut pivot_cols = Vec::new();
    let mut r0 = 0usize;
    for c in 0..dim {
        let Some(pr) = (r0..nrows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(r0, pr);
        let inv = m[r0][c].recip();
        for x in m[r0].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nrows {
            if r != r0 && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for c2 in 0..dim {
                    let t = &f * &m[r0][c2];
                    m[r][c2] -= t;
                }
            }
        }
        pivot_col_of_row[r0] = Some(c);
        pivot_cols.push(c);
        r0 += 1;
        if r0 == nrows {
            break;
        }
    }
    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
    let mut out = Vec::new();
    for free in 0..dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); dim];
        v[free] = BigRational::from_integer(1.into());
        for (r, pc) in pivot_col_of_row.iter().enumerate() {
            if let Some(pc) = pc {
                v[*pc] = -m[r][free].clone();
            }
        }
        out.push(v);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FieldWire {
    n: u64,
    stab_gens: Vec<u64>,
}

impl Serialize for AbelianField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FieldWire {
            n: self.n,
            stab_gens: self.stab.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbelianField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = FieldWire::deserialize(deserializer)?;
        if w.n == 0 {
            return Err(D::Error::custom("modulus must be positive"));
        }
        for g in &w.stab_gens {
            if w.n > 1 && gcd_u64(*g % w.n, w.n) != 1 {
                return Err(D::Error::custom(format!("{g} is not a unit mod {}", w.n)));
            }
        }
        Ok(AbelianField::fixed_field(w.n, &w.stab_gens))
    }
}

impl std::fmt::Display for AbelianField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_rationals() {
            write!(f, "Q")
        } else if self.stab.len() == 1 {
            write!(f, "Q(z{})", self.n)
        } else {
            write!(
                f,
                "Q(z{})^{{{}}}",
                self.n,
                self.stab
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::delta_p;

    #[test]
    fn degrees_and_conductors() {
        let q = AbelianField::rationals();
        assert_eq!(q.degree(), 1);
        assert!(q.is_real());

        // real quadratic inside Q(zeta_5)
        let k = AbelianField::fixed_field(5, &[4]);
        assert_eq!(k.degree(), 2);
        assert_eq!(k.conductor(), 5);
        assert!(k.is_real());

        // the whole of Q(zeta_8)
        let l = AbelianField::cyclotomic(8);
        assert_eq!(l.degree(), 4);
        assert!(!l.is_real());

        // fixed field of everything is Q
        let t = AbelianField::fixed_field(12, &[5, 7]);
        assert_eq!(t.degree(), 1);
        assert_eq!(t.conductor(), 1);

        // Q(zeta_6) reduces to conductor 3
        let s = AbelianField::cyclotomic(6);
        assert_eq!(s.conductor(), 3);
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn generated_fields() {
        let c = &CycElt::root_of_unity(5, 1) + &CycElt::root_of_unity(5, 4);
        let k = AbelianField::generated_by(&[c.clone()]);
        assert_eq!(k.degree(), 2);
        assert_eq!(k.conductor(), 5);
        assert!(k.contains(&c));
        assert!(!k.contains(&CycElt::root_of_unity(5, 1)));
        assert!(k.contains(&CycElt::from_int(7)));

        // rationals generated by a rational
        let q = AbelianField::generated_by(&[CycElt::from_int(3)]);
        assert!(q.is_rationals());
    }

    #[test]
    fn subfields_and_lattice() {
        let q5 = AbelianField::cyclotomic(5);
        let k = AbelianField::fixed_field(5, &[4]);
        let q = AbelianField::rationals();
        assert!(k.is_subfield_of(&q5));
        assert!(q.is_subfield_of(&k));
        assert!(!q5.is_subfield_of(&k));
        assert_eq!(k.compositum(&q5), q5);
        assert_eq!(k.intersection(&q5), k);
        // Q(zeta_3) ∩ Q(zeta_4) = Q; compositum = Q(zeta_12)
        let a = AbelianField::cyclotomic(3);
        let b = AbelianField::cyclotomic(4);
        assert!(a.intersection(&b).is_rationals());
        assert_eq!(a.compositum(&b), AbelianField::cyclotomic(12));
    }

    #[test]
    fn bases() {
        let k = AbelianField::fixed_field(5, &[4]);
        let basis = k.basis();
        assert_eq!(basis.len(), 2);
        for b in basis {
            assert!(k.contains(b));
            assert!(b.is_real());
        }
        // coordinates round-trip
        let x = &basis[0].scale(&BigRational::new(3.into(), 2.into()))
            + &basis[1].scale(&BigRational::new((-1).into(), 5.into()));
        let coords = k.coordinates(&x).unwrap();
        assert_eq!(coords[0], BigRational::new(3.into(), 2.into()));
        assert_eq!(coords[1], BigRational::new((-1).into(), 5.into()));
        assert!(k.coordinates(&CycElt::root_of_unity(5, 1)).is_err());
    }

    #[test]
    fn norms() {
        // N_{Q(zeta_3)/Q}(1 - zeta_3) = 3
        let q = AbelianField::rationals();
        let l = AbelianField::cyclotomic(3);
        let x = &CycElt::from_int(1) - &CycElt::root_of_unity(3, 1);
        assert_eq!(q.relative_norm_from(&l, &x).unwrap(), CycElt::from_int(3));

        // N down the real ladder: delta_5 from Q(sqrt5) to Q is 5
        let k = AbelianField::fixed_field(5, &[4]);
        let d5 = delta_p(5);
        assert_eq!(q.relative_norm_from(&k, &d5).unwrap(), CycElt::from_int(5));
        // identity norm
        assert_eq!(k.relative_norm_from(&k, &d5).unwrap(), d5);

        // norm transitivity: Q ⊆ Q(sqrt5) ⊆ Q(zeta_5)
        let z = &CycElt::root_of_unity(5, 1) + &CycElt::from_int(3);
        let via = {
            let mid = k.relative_norm_from(&AbelianField::cyclotomic(5), &z).unwrap();
            q.relative_norm_from(&k, &mid).unwrap()
        };
        let direct = q
            .relative_norm_from(&AbelianField::cyclotomic(5), &z)
            .unwrap();
        assert_eq!(via, direct);
    }

    #[test]
    fn quadratic_generators() {
        // Q(zeta_4)/Q: delta ~ -4
        let q = AbelianField::rationals();
        let l = AbelianField::cyclotomic(4);
        let (delta, sqrt) = q.quadratic_generator(&l).unwrap();
        assert_eq!(&sqrt * &sqrt, delta);
        assert_eq!(delta, CycElt::from_int(-4));

        // Q(zeta_5)/Q(sqrt5)
        let k = AbelianField::fixed_field(5, &[4]);
        let z5 = AbelianField::cyclotomic(5);
        let (delta, sqrt) = k.quadratic_generator(&z5).unwrap();
        assert!(k.contains(&delta));
        assert!(!k.contains(&sqrt));
        assert_eq!(&sqrt * &sqrt, delta);
    }

    #[test]
    fn embedding_reps() {
        let k = AbelianField::fixed_field(5, &[4]);
        assert_eq!(k.embedding_representatives(), vec![1, 2]);
        let q8 = AbelianField::cyclotomic(8);
        assert_eq!(q8.embedding_representatives(), vec![1, 3, 5, 7]);
        assert_eq!(AbelianField::rationals().embedding_representatives(), vec![1]);
    }

    #[test]
    fn serde_round_trip() {
        let k = AbelianField::fixed_field(40, &[39, 11]);
        let s = serde_json::to_string(&k).unwrap();
        let k2: AbelianField = serde_json::from_str(&s).unwrap();
        assert_eq!(k, k2);
    }

    #[test]
    fn real_subfields() {
        let z8 = AbelianField::cyclotomic(8);
        let r = z8.real_subfield();
        assert_eq!(r.degree(), 2);
        assert!(r.is_real());
        assert!(r.contains(&(&CycElt::root_of_unity(8, 1) + &CycElt::root_of_unity(8, -1))));
    }
}
