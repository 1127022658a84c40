//! Finite permutation groups: element enumeration, conjugacy data, and the
//! named families used by the corpus.
//!
//! Groups are given by generators acting on `{0, .., degree-1}` and expanded
//! into an explicit, lexicographically sorted element list.  Everything
//! downstream (conjugacy classes, power maps, subgroup lattices, character
//! tables) works with indices into that list, which makes all derived data
//! canonical: two runs over the same generators produce identical orderings.

mod named;
mod subgroups;

pub use named::named_group;
pub use subgroups::{
    derived_subgroup, maximal_subgroups_p_group, normal_subgroups_of_prime_index, subgroup_list_key,
};

use std::collections::HashMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{factor_u64, lcm_u64};
use crate::error::{invariant, Error, Result};

/// Hard ceiling on element enumeration; the corpus tops out well below this.
pub const ENUMERATION_CAP: usize = 20_000;

/// A permutation of `{0, .., n-1}` stored as its image vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Perm(pub Vec<u16>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u16).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Builds a permutation from 1-based images, validating bijectivity.
    pub fn from_one_based(images: &[u64], degree: usize) -> Result<Self> {
        if images.len() != degree {
            return Err(Error::InvalidInput(format!(
                "permutation has {} images, expected {}",
                images.len(),
                degree
            )));
        }
        let mut seen = vec![false; degree];
        let mut v = Vec::with_capacity(degree);
        for &im in images {
            if im == 0 || im as usize > degree {
                return Err(Error::InvalidInput(format!(
                    "image {im} out of range 1..={degree}"
                )));
            }
            let z = (im - 1) as usize;
            if seen[z] {
                return Err(Error::InvalidInput(format!("repeated image {im}")));
            }
            seen[z] = true;
            v.push(z as u16);
        }
        Ok(Perm(v))
    }

    pub fn to_one_based(&self) -> Vec<u64> {
        self.0.iter().map(|&x| x as u64 + 1).collect()
    }

    pub fn apply(&self, point: u16) -> u16 {
        self.0[point as usize]
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u16; self.degree()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u16;
        }
        Perm(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn pow(&self, k: i64) -> Perm {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = base.compose(&acc);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut ord = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start as u16;
            loop {
                seen[x as usize] = true;
                len += 1;
                x = self.0[x as usize];
                if x as usize == start {
                    break;
                }
            }
            ord = lcm_u64(ord, len);
        }
        ord
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Cycle notation on 1-based points.
        let mut seen = vec![false; self.degree()];
        let mut wrote = false;
        for start in 0..self.degree() {
            if seen[start] || self.0[start] as usize == start {
                seen[start] = true;
                continue;
            }
            write!(f, "(")?;
            let mut x = start as u16;
            let mut first = true;
            loop {
                seen[x as usize] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.0[x as usize];
                if x as usize == start {
                    break;
                }
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Conjugacy data of a group: a partition of the element list into classes,
/// sorted by (element order, class size, smallest member).
#[derive(Clone, Debug)]
pub struct Classes {
    /// Element index -> class index.
    pub class_of: Vec<usize>,
    /// Class index -> representative element index (smallest member).
    pub reps: Vec<usize>,
    /// Class index -> class size.
    pub sizes: Vec<usize>,
    /// Class index -> common element order.
    pub orders: Vec<u64>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// A finite permutation group with its fully enumerated element list.
#[derive(Clone, Debug)]
pub struct Group {
    pub name: Option<String>,
    degree: usize,
    /// All elements, sorted lexicographically by image vector.
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    /// Indices of the defining generators.
    gen_indices: Vec<usize>,
    id_index: usize,
}

impl Group {
    /// Enumerates the group generated by `gens` via breadth-first closure.
    pub fn from_generators(degree: usize, gens: Vec<Perm>, name: Option<String>) -> Result<Group> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "generator degree {} does not match group degree {degree}",
                    g.degree()
                )));
            }
        }
        let mut index: HashMap<Perm, usize> = HashMap::new();
        let mut elements: Vec<Perm> = Vec::new();
        let id = Perm::identity(degree);
        index.insert(id.clone(), 0);
        elements.push(id);
        let mut frontier = vec![0usize];
        while let Some(i) = frontier.pop() {
            let cur = elements[i].clone();
            for g in &gens {
                let next = cur.compose(g);
                if !index.contains_key(&next) {
                    if elements.len() >= ENUMERATION_CAP {
                        return Err(Error::EnumerationCap(ENUMERATION_CAP));
                    }
                    index.insert(next.clone(), elements.len());
                    frontier.push(elements.len());
                    elements.push(next);
                }
            }
        }
        elements.sort();
        let index: HashMap<Perm, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let gen_indices = gens.iter().map(|g| index[g]).collect();
        let id_index = index[&Perm::identity(degree)];
        Ok(Group {
            name,
            degree,
            elements,
            index,
            gen_indices,
            id_index,
        })
    }

    /// Builds a group from an explicit element list (must be closed).
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>, name: Option<String>) -> Result<Group> {
        elements.sort();
        elements.dedup();
        let index: HashMap<Perm, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let id = Perm::identity(degree);
        let id_index = *index
            .get(&id)
            .ok_or_else(|| Error::InvalidInput("element list lacks the identity".into()))?;
        for a in &elements {
            for b in &elements {
                if !index.contains_key(&a.compose(b)) {
                    return Err(Error::InvalidInput(
                        "element list is not closed under composition".into(),
                    ));
                }
            }
        }
        let gen_indices = (0..elements.len()).collect();
        Ok(Group {
            name,
            degree,
            elements,
            index,
            gen_indices,
            id_index,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn identity_index(&self) -> usize {
        self.id_index
    }

    pub fn generators(&self) -> Vec<&Perm> {
        self.gen_indices.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.gen_indices
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].compose(&self.elements[j])]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.index[&self.elements[i].inverse()]
    }

    pub fn pow(&self, i: usize, k: i64) -> usize {
        self.index[&self.elements[i].pow(k)]
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.elements[i].order()
    }

    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .fold(1u64, |e, p| lcm_u64(e, p.order()))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.gen_indices;
        gens.iter()
            .all(|&i| gens.iter().all(|&j| self.mul(i, j) == self.mul(j, i)))
    }

    /// If |G| is a prime power p^k with k >= 1, returns p.
    pub fn p_group_prime(&self) -> Option<u64> {
        let f = factor_u64(self.order());
        match f.as_slice() {
            [(p, k)] if *k >= 1 => Some(*p),
            _ => None,
        }
    }

    /// Conjugacy classes in canonical order.
    pub fn conjugacy_classes(&self) -> Classes {
        let n = self.elements.len();
        let gen_invs: Vec<(usize, usize)> = self
            .gen_indices
            .iter()
            .map(|&g| (g, self.inv(g)))
            .collect();
        let mut class_id = vec![usize::MAX; n];
        let mut raw: Vec<(u64, usize, usize, Vec<usize>)> = Vec::new();
        for start in 0..n {
            if class_id[start] != usize::MAX {
                continue;
            }
            let cid = raw.len();
            let mut members = vec![start];
            class_id[start] = cid;
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                for &(g, gi) in &gen_invs {
                    let y = self.mul(self.mul(g, x), gi);
                    if class_id[y] == usize::MAX {
                        class_id[y] = cid;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
            members.sort_unstable();
            let rep = members[0];
            raw.push((self.element_order(rep), members.len(), rep, members));
        }
        // Canonical order: element order, then class size, then smallest member.
        let mut order_keys: Vec<usize> = (0..raw.len()).collect();
        order_keys.sort_by_key(|&c| (raw[c].0, raw[c].1, raw[c].2));
        let mut class_of = vec![0usize; n];
        let mut reps = Vec::with_capacity(raw.len());
        let mut sizes = Vec::with_capacity(raw.len());
        let mut orders = Vec::with_capacity(raw.len());
        for (new_id, &old_id) in order_keys.iter().enumerate() {
            let (ord, size, rep, ref members) = raw[old_id];
            for &m in members {
                class_of[m] = new_id;
            }
            reps.push(rep);
            sizes.push(size);
            orders.push(ord);
        }
        Classes {
            class_of,
            reps,
            sizes,
            orders,
        }
    }

    /// For each class c, the class containing the k-th powers of its members.
    pub fn power_map(&self, classes: &Classes, k: i64) -> Vec<usize> {
        classes
            .reps
            .iter()
            .map(|&r| classes.class_of[self.pow(r, k)])
            .collect()
    }

    /// The subgroup generated by the listed element indices.
    pub fn subgroup(&self, gens: &[usize]) -> Result<Group> {
        let perms = gens.iter().map(|&i| self.elements[i].clone()).collect();
        Group::from_generators(self.degree, perms, None)
    }

    /// Whether the subgroup `h` (same degree, element subset) is normal in `self`.
    pub fn is_normal(&self, h: &Group) -> bool {
        h.elements.iter().all(|x| {
            self.gen_indices.iter().all(|&g| {
                let gp = &self.elements[g];
                h.contains(&gp.compose(x).compose(&gp.inverse()))
            })
        })
    }

    /// Whether `self` is solvable (derived series reaches the trivial group).
    pub fn is_solvable(&self) -> bool {
        let mut cur = self.clone();
        loop {
            if cur.order() == 1 {
                return true;
            }
            let next = match derived_subgroup(&cur) {
                Ok(d) => d,
                Err(_) => return false,
            };
            if next.order() == cur.order() {
                return false;
            }
            cur = next;
        }
    }

    /// Left coset representatives of a subgroup, smallest element of each coset.
    pub fn coset_reps(&self, h: &Group) -> Result<Vec<usize>> {
        if self.order() % h.order() != 0 {
            return Err(invariant("subgroup order does not divide group order"));
        }
        let mut assigned = vec![false; self.elements.len()];
        let mut reps = Vec::new();
        for i in 0..self.elements.len() {
            if assigned[i] {
                continue;
            }
            reps.push(i);
            for x in h.elements() {
                let y = self.index[&self.elements[i].compose(x)];
                if assigned[y] && y != i {
                    return Err(invariant("coset decomposition overlap"));
                }
                assigned[y] = true;
            }
        }
        if reps.len() as u64 != self.order() / h.order() {
            return Err(invariant("coset count mismatch"));
        }
        Ok(reps)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    degree: u64,
    generators: Vec<Vec<u64>>,
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = GroupWire {
            name: self.name.clone(),
            degree: self.degree as u64,
            generators: self
                .generators()
                .iter()
                .map(|p| p.to_one_based())
                .collect(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = GroupWire::deserialize(d)?;
        let degree = wire.degree as usize;
        let gens = wire
            .generators
            .iter()
            .map(|im| Perm::from_one_based(im, degree))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Group::from_generators(degree, gens, wire.name).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[u64], degree: usize) -> Perm {
        Perm::from_one_based(images, degree).unwrap()
    }

    #[test]
    fn perm_basics() {
        let p = perm(&[2, 3, 1, 4], 4);
        let q = perm(&[1, 3, 2, 4], 4);
        assert_eq!(p.order(), 3);
        assert_eq!(q.order(), 2);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(4));
        // compose applies the right factor first
        let pq = p.compose(&q);
        assert_eq!(pq.apply(1), 0); // q: 1->2, p: 2->0 (0-based)
        assert_eq!(p.pow(3), Perm::identity(4));
        assert_eq!(p.pow(-1), p.inverse());
        assert_eq!(format!("{}", p), "(1 2 3)");
    }

    #[test]
    fn s4_enumeration_and_classes() {
        let g = Group::from_generators(
            4,
            vec![perm(&[2, 3, 4, 1], 4), perm(&[2, 1, 3, 4], 4)],
            Some("s4".into()),
        )
        .unwrap();
        assert_eq!(g.order(), 24);
        assert_eq!(g.exponent(), 12);
        assert!(!g.is_abelian());
        assert!(g.is_solvable());
        let cl = g.conjugacy_classes();
        assert_eq!(cl.len(), 5);
        // canonical order: element order first, then class size
        assert_eq!(cl.sizes, vec![1, 3, 6, 8, 6]);
        assert_eq!(cl.orders, vec![1, 2, 2, 3, 4]);
        // identity class leads
        assert_eq!(cl.class_of[g.identity_index()], 0);
        // class equation
        assert_eq!(cl.sizes.iter().sum::<usize>() as u64, g.order());
        // squaring folds the 4-cycles onto the double transpositions
        let pm2 = g.power_map(&cl, 2);
        assert_eq!(pm2[4], 1);
        assert_eq!(pm2[1], 0);
        let pm_inv = g.power_map(&cl, -1);
        assert_eq!(pm_inv, vec![0, 1, 2, 3, 4]); // all classes real in S4
    }

    #[test]
    fn coset_reps_partition() {
        let g = Group::from_generators(
            4,
            vec![perm(&[2, 3, 4, 1], 4), perm(&[2, 1, 3, 4], 4)],
            None,
        )
        .unwrap();
        let h = {
            let i = g
                .elements()
                .iter()
                .position(|p| *p == perm(&[2, 3, 4, 1], 4))
                .unwrap();
            g.subgroup(&[i]).unwrap()
        };
        assert_eq!(h.order(), 4);
        let reps = g.coset_reps(&h).unwrap();
        assert_eq!(reps.len(), 6);
        assert_eq!(reps[0], g.identity_index());
    }

    #[test]
    fn enumeration_cap_enforced() {
        // Symmetric group on 9 points has order 362880 > cap.
        let gens = vec![
            perm(&[2, 3, 4, 5, 6, 7, 8, 9, 1], 9),
            perm(&[2, 1, 3, 4, 5, 6, 7, 8, 9], 9),
        ];
        match Group::from_generators(9, gens, None) {
            Err(Error::EnumerationCap(c)) => assert_eq!(c, ENUMERATION_CAP),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn group_serde_round_trip() {
        let g = named_group("quaternion:8").unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: Group = serde_json::from_str(&json).unwrap();
        assert_eq!(back.order(), 8);
        assert_eq!(back.degree(), g.degree());
        assert_eq!(back.elements(), g.elements());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v.get("degree").is_some());
        assert!(v.get("generators").unwrap().is_array());
    }

    #[test]
    fn from_elements_requires_closure() {
        let p = perm(&[2, 3, 1], 3);
        assert!(Group::from_elements(3, vec![Perm::identity(3), p.clone()], None).is_err());
        let c3 = Group::from_elements(3, vec![Perm::identity(3), p.clone(), p.pow(2)], None).unwrap();
        assert_eq!(c3.order(), 3);
    }
}
