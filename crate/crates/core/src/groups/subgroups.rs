//! Subgroup machinery: derived subgroups, and index-p subgroups obtained by
//! pulling back hyperplanes of an elementary abelian quotient.

use std::collections::{HashMap, HashSet};

use super::{Group, Perm};
use crate::error::{invariant, Error, Result};

/// The derived (commutator) subgroup, as the normal closure of the
/// generator commutators.
pub fn derived_subgroup(g: &Group) -> Result<Group> {
    let gens = g.generator_indices();
    let mut seed: HashSet<usize> = HashSet::new();
    for &a in gens {
        for &b in gens {
            let c = g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
            seed.insert(c);
        }
    }
    // Normal closure: close the commutator set under conjugation, then span.
    let mut closure: HashSet<usize> = seed.clone();
    let mut frontier: Vec<usize> = seed.into_iter().collect();
    while let Some(x) = frontier.pop() {
        for &gidx in gens {
            let y = g.mul(g.mul(gidx, x), g.inv(gidx));
            if closure.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut list: Vec<usize> = closure.into_iter().collect();
    list.sort_unstable();
    let sub = g.subgroup(&list)?;
    if !g.is_normal(&sub) {
        return Err(invariant("derived subgroup is not normal"));
    }
    Ok(sub)
}

/// A canonical key for a subgroup of a fixed parent: its sorted element list
/// as permutation image vectors.
pub fn subgroup_list_key(h: &Group) -> Vec<Vec<u16>> {
    h.elements().iter().map(|p| p.0.clone()).collect()
}

/// Quotient of `g` by a normal subgroup, presented as a multiplication table
/// on coset ids together with the coset id of every group element.
struct Quotient {
    /// Element index -> coset id.
    coset_of: Vec<usize>,
    /// Coset id -> representative element index.
    reps: Vec<usize>,
}

impl Quotient {
    fn build(g: &Group, n: &Group) -> Result<Quotient> {
        if !g.is_normal(n) {
            return Err(invariant("quotient requires a normal subgroup"));
        }
        let order = g.order() as usize;
        let mut coset_of = vec![usize::MAX; order];
        let mut reps = Vec::new();
        for i in 0..order {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let cid = reps.len();
            reps.push(i);
            for x in n.elements() {
                let y = g.index_of(&g.element(i).compose(x)).unwrap();
                coset_of[y] = cid;
            }
        }
        Ok(Quotient { coset_of, reps })
    }

    fn len(&self) -> usize {
        self.reps.len()
    }

    fn mul(&self, g: &Group, a: usize, b: usize) -> usize {
        self.coset_of[g.mul(self.reps[a], self.reps[b])]
    }
}

/// Coordinates of every coset of an elementary abelian p-quotient with
/// respect to a greedily chosen basis.
fn elementary_coordinates(g: &Group, q: &Quotient, p: u64) -> Result<Vec<Vec<u64>>> {
    let m = q.len();
    let mut coords: Vec<Option<Vec<u64>>> = vec![None; m];
    let id = q.coset_of[g.identity_index()];
    coords[id] = Some(Vec::new());
    let mut basis: Vec<usize> = Vec::new();
    loop {
        let next = (0..m).find(|&c| coords[c].is_none());
        let Some(pivot) = next else { break };
        basis.push(pivot);
        let d = basis.len();
        // Extend every known coset by powers of the new basis vector.
        let known: Vec<usize> = (0..m).filter(|&c| coords[c].is_some()).collect();
        for c in known {
            let mut base = coords[c].clone().unwrap();
            base.resize(d, 0);
            let mut cur = c;
            for e in 1..p {
                cur = q.mul(g, cur, pivot);
                if coords[cur].is_some() {
                    return Err(invariant("quotient is not elementary abelian"));
                }
                let mut v = base.clone();
                v[d - 1] = e;
                coords[cur] = Some(v);
            }
        }
    }
    let d = basis.len();
    let mut out = Vec::with_capacity(m);
    for c in coords {
        let mut v = c.unwrap();
        v.resize(d, 0);
        out.push(v);
    }
    if m as u64 != p.pow(d as u32) {
        return Err(invariant("elementary quotient has wrong order"));
    }
    Ok(out)
}

/// Pulls back all hyperplanes of the elementary abelian quotient `g/n`
/// (elementary abelian of exponent p) to index-p subgroups of `g`.
fn hyperplane_pullbacks(g: &Group, n: &Group, p: u64) -> Result<Vec<Group>> {
    let q = Quotient::build(g, n)?;
    let coords = elementary_coordinates(g, &q, p)?;
    let d = coords[q.coset_of[g.identity_index()]].len();
    if d == 0 {
        return Ok(Vec::new());
    }
    // One functional per hyperplane: first nonzero coefficient normalized to 1.
    let mut functionals: Vec<Vec<u64>> = Vec::new();
    let mut stack = vec![vec![]];
    while let Some(v) = stack.pop() {
        if v.len() == d {
            if v.iter().any(|&x| x != 0) {
                functionals.push(v);
            }
            continue;
        }
        let leading_seen = v.iter().any(|&x| x != 0);
        let choices: Vec<u64> = if leading_seen {
            (0..p).collect()
        } else {
            vec![0, 1]
        };
        for c in choices.into_iter().rev() {
            let mut w = v.clone();
            w.push(c);
            stack.push(w);
        }
    }
    let mut subs = Vec::new();
    for lam in functionals {
        let members: Vec<usize> = (0..g.order() as usize)
            .filter(|&i| {
                let v = &coords[q.coset_of[i]];
                v.iter().zip(&lam).map(|(a, b)| a * b).sum::<u64>() % p == 0
            })
            .collect();
        let elems: Vec<Perm> = members.iter().map(|&i| g.element(i).clone()).collect();
        let h = Group::from_elements(g.degree(), elems, None)?;
        if h.order() * p != g.order() {
            return Err(invariant("hyperplane pullback has wrong index"));
        }
        subs.push(h);
    }
    subs.sort_by_key(subgroup_list_key);
    subs.dedup_by_key(|h| subgroup_list_key(h));
    Ok(subs)
}

/// All normal subgroups of index p in `g`, via hyperplanes of the largest
/// elementary abelian p-quotient g/(g' g^p).
pub fn normal_subgroups_of_prime_index(g: &Group, p: u64) -> Result<Vec<Group>> {
    let derived = derived_subgroup(g)?;
    // Generate g' together with all p-th powers: the kernel of the largest
    // elementary abelian p-quotient.
    let mut gen_idx: Vec<usize> = derived
        .elements()
        .iter()
        .map(|x| g.index_of(x).unwrap())
        .collect();
    for i in 0..g.order() as usize {
        gen_idx.push(g.pow(i, p as i64));
    }
    gen_idx.sort_unstable();
    gen_idx.dedup();
    let kernel = g.subgroup(&gen_idx)?;
    if kernel.order() == g.order() {
        return Ok(Vec::new());
    }
    let subs = hyperplane_pullbacks(g, &kernel, p)?;
    for h in &subs {
        if !g.is_normal(h) {
            return Err(invariant("index-p pullback is not normal"));
        }
    }
    Ok(subs)
}

/// All maximal subgroups of a p-group: the index-p subgroups containing the
/// Frattini subgroup.  Errors if `g` is not a p-group.
pub fn maximal_subgroups_p_group(g: &Group) -> Result<Vec<Group>> {
    let p = g
        .p_group_prime()
        .ok_or(Error::NotPGroup(g.order()))?;
    if g.order() == 1 {
        return Ok(Vec::new());
    }
    let subs = normal_subgroups_of_prime_index(g, p)?;
    // In a p-group of rank d there are exactly (p^d - 1)/(p - 1) of them.
    let d = {
        let derived = derived_subgroup(g)?;
        let mut gen_idx: Vec<usize> = derived
            .elements()
            .iter()
            .map(|x| g.index_of(x).unwrap())
            .collect();
        for i in 0..g.order() as usize {
            gen_idx.push(g.pow(i, p as i64));
        }
        gen_idx.sort_unstable();
        gen_idx.dedup();
        let frattini = g.subgroup(&gen_idx)?;
        let quot = g.order() / frattini.order();
        let mut d = 0u32;
        let mut q = quot;
        while q > 1 {
            q /= p;
            d += 1;
        }
        d
    };
    let expected = (p.pow(d) - 1) / (p - 1);
    if subs.len() as u64 != expected {
        return Err(invariant(format!(
            "p-group maximal subgroup count {} != expected {}",
            subs.len(),
            expected
        )));
    }
    Ok(subs)
}

/// Conjugation closure of a subgroup list: returns one representative per
/// conjugacy class of subgroups, keeping the canonically smallest.
pub fn up_to_conjugacy(g: &Group, subs: Vec<Group>) -> Vec<Group> {
    let mut seen: HashMap<Vec<Vec<u16>>, usize> = HashMap::new();
    let mut reps: Vec<Group> = Vec::new();
    for h in subs {
        let mut orbit_keys = Vec::new();
        for c in 0..g.order() as usize {
            let conj: Vec<Perm> = h
                .elements()
                .iter()
                .map(|x| {
                    g.element(c)
                        .compose(x)
                        .compose(&g.element(c).inverse())
                })
                .collect();
            let mut key: Vec<Vec<u16>> = conj.into_iter().map(|p| p.0).collect();
            key.sort();
            orbit_keys.push(key);
        }
        orbit_keys.sort();
        let canon = orbit_keys[0].clone();
        if !seen.contains_key(&canon) {
            seen.insert(canon, reps.len());
            reps.push(h);
        }
    }
    reps
}
