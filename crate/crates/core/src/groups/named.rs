//! The named group corpus.
//!
//! Families are addressed as `family:parameter` (`cyclic:9`, `quaternion:16`,
//! `heisenberg:5`, ...) with a handful of fixed names (`s4`, `sl23`, `f20`,
//! `c7:c3`, ...).  Each constructor picks a small faithful permutation action
//! so that enumeration stays cheap: affine actions on Z/n where possible, the
//! regular action only where necessary (generalized quaternion groups).

use super::{Group, Perm};
use crate::arith::{factor_u64, gcd_u64};
use crate::error::{Error, Result};

fn cycle_plus_one(n: usize) -> Perm {
    Perm((0..n).map(|x| ((x + 1) % n) as u16).collect())
}

/// x -> r*x + t on Z/n as a permutation (requires gcd(r, n) = 1).
fn affine(n: usize, r: u64, t: u64) -> Perm {
    Perm(
        (0..n as u64)
            .map(|x| ((r * x + t) % n as u64) as u16)
            .collect(),
    )
}

/// Metacyclic 2-generator presentation a^n = carrier, b a b^-1 = a^r,
/// b^ord = a^s, realized by the left regular action on pairs (i, j) with
/// point index i + n*j.
fn two_gen_regular(n: u64, r: u64, s: u64, ord_b: u64) -> (Perm, Perm) {
    let degree = (n * ord_b) as usize;
    let idx = |i: u64, j: u64| (i % n + n * (j % ord_b)) as u16;
    let mut a = vec![0u16; degree];
    let mut b = vec![0u16; degree];
    for j in 0..ord_b {
        for i in 0..n {
            // a * (i, j) = (i + 1, j)
            a[idx(i, j) as usize] = idx(i + 1, j);
            // b * (i, j) = (i*r + s*carry, j + 1)
            let carry = u64::from(1 + j >= ord_b);
            b[idx(i, j) as usize] = idx(i * r + s * carry, j + 1);
        }
    }
    (Perm(a), Perm(b))
}

fn build(degree: usize, gens: Vec<Perm>, name: &str) -> Result<Group> {
    Group::from_generators(degree, gens, Some(name.to_string()))
}

fn bad(name: &str, why: &str) -> Error {
    Error::InvalidInput(format!("group '{name}': {why}"))
}

/// Constructs a group from its corpus name.
pub fn named_group(name: &str) -> Result<Group> {
    match name {
        "s3" => {
            return build(
                3,
                vec![cycle_plus_one(3), Perm(vec![1, 0, 2])],
                name,
            )
        }
        "a4" => {
            return build(
                4,
                vec![Perm(vec![1, 2, 0, 3]), Perm(vec![1, 0, 3, 2])],
                name,
            )
        }
        "s4" => {
            return build(
                4,
                vec![cycle_plus_one(4), Perm(vec![1, 0, 2, 3])],
                name,
            )
        }
        "d10" => return dihedral(10, name),
        "f20" => {
            return build(5, vec![affine(5, 1, 1), affine(5, 2, 0)], name);
        }
        "c7:c3" => {
            return build(7, vec![affine(7, 1, 1), affine(7, 2, 0)], name);
        }
        "sl23" => {
            // Action on the eight nonzero vectors of F_3^2, ordered
            // lexicographically: index 3x + y - 1 for (x, y) != (0, 0).
            let pts: Vec<(u64, u64)> = (0..3u64)
                .flat_map(|x| (0..3u64).map(move |y| (x, y)))
                .filter(|&v| v != (0, 0))
                .collect();
            let find = |v: (u64, u64)| pts.iter().position(|&w| w == v).unwrap() as u16;
            let t = Perm(pts.iter().map(|&(x, y)| find(((x + y) % 3, y))).collect());
            let s = Perm(pts.iter().map(|&(x, y)| find(((3 - y) % 3, x))).collect());
            return build(8, vec![t, s], name);
        }
        "c4xc2" => {
            let a = Perm(vec![1, 2, 3, 0, 4, 5]);
            let b = Perm(vec![0, 1, 2, 3, 5, 4]);
            return build(6, vec![a, b], name);
        }
        _ => {}
    }
    let (family, param) = name
        .split_once(':')
        .ok_or_else(|| bad(name, "unknown name"))?;
    let m: u64 = param
        .parse()
        .map_err(|_| bad(name, "parameter must be a positive integer"))?;
    match family {
        "cyclic" => {
            if m == 0 {
                return Err(bad(name, "order must be positive"));
            }
            let n = m as usize;
            build(n, vec![cycle_plus_one(n)], name)
        }
        "dihedral" => dihedral(m, name),
        "quaternion" => {
            if m < 8 || m % 4 != 0 {
                return Err(bad(name, "order must be a multiple of 4, at least 8"));
            }
            let n = m / 2;
            let (a, b) = two_gen_regular(n, n - 1, n / 2, 2);
            build(m as usize, vec![a, b], name)
        }
        "semidihedral" => {
            if m < 16 || !m.is_power_of_two() {
                return Err(bad(name, "order must be a power of two, at least 16"));
            }
            let n = m / 2;
            let r = n / 2 - 1;
            debug_assert_eq!(gcd_u64(r, n), 1);
            build(n as usize, vec![affine(n as usize, 1, 1), affine(n as usize, r, 0)], name)
        }
        "modular" => {
            // Extraspecial-exponent-p^2 group of order p^3 for odd p:
            // a of order p^2, b of order p, b a b^-1 = a^(p+1).
            let f = factor_u64(m);
            let p = match f.as_slice() {
                [(p, 3)] if *p % 2 == 1 => *p,
                _ => return Err(bad(name, "order must be p^3 for an odd prime p")),
            };
            let n = (p * p) as usize;
            build(n, vec![affine(n, 1, 1), affine(n, p + 1, 0)], name)
        }
        "heisenberg" => {
            let p = m;
            if p < 3 || !crate::arith::is_prime_u64(p) {
                return Err(bad(name, "parameter must be an odd prime"));
            }
            let deg = (p * p) as usize;
            let idx = |a: u64, b: u64| ((a % p) * p + b % p) as u16;
            let x = Perm(
                (0..p)
                    .flat_map(|a| (0..p).map(move |b| (a, b)))
                    .map(|(a, b)| idx(a + 1, b))
                    .collect(),
            );
            let y = Perm(
                (0..p)
                    .flat_map(|a| (0..p).map(move |b| (a, b)))
                    .map(|(a, b)| idx(a, b + a))
                    .collect(),
            );
            build(deg, vec![x, y], name)
        }
        "elemab" => {
            let f = factor_u64(m);
            let p = match f.as_slice() {
                [(p, 2)] => *p,
                _ => return Err(bad(name, "order must be p^2")),
            };
            let n = p as usize;
            let mut g1: Vec<u16> = (0..2 * n as u16).collect();
            let mut g2 = g1.clone();
            for x in 0..n {
                g1[x] = ((x + 1) % n) as u16;
                g2[n + x] = (n + (x + 1) % n) as u16;
            }
            build(2 * n, vec![Perm(g1), Perm(g2)], name)
        }
        _ => Err(bad(name, "unknown family")),
    }
}

fn dihedral(m: u64, name: &str) -> Result<Group> {
    if m < 6 || m % 2 != 0 {
        return Err(bad(name, "order must be even, at least 6"));
    }
    let n = (m / 2) as usize;
    let rot = cycle_plus_one(n);
    // Reflection x -> 2 - x, so dihedral:8 gets generators (1 2 3 4), (1 3).
    let refl = Perm(
        (0..n as u64)
            .map(|x| ((2 * n as u64 + 2 - x) % n as u64) as u16)
            .collect(),
    );
    build(n, vec![rot, refl], name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_census(g: &Group) -> Vec<(u64, usize)> {
        let mut counts: std::collections::BTreeMap<u64, usize> = Default::default();
        for i in 0..g.order() as usize {
            *counts.entry(g.element_order(i)).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    #[test]
    fn corpus_orders() {
        for (name, order, exponent) in [
            ("cyclic:1", 1, 1),
            ("cyclic:12", 12, 12),
            ("cyclic:27", 27, 27),
            ("dihedral:8", 8, 4),
            ("dihedral:32", 32, 16),
            ("quaternion:8", 8, 4),
            ("quaternion:32", 32, 16),
            ("semidihedral:16", 16, 8),
            ("semidihedral:32", 32, 16),
            ("modular:27", 27, 9),
            ("heisenberg:3", 27, 3),
            ("heisenberg:5", 125, 5),
            ("elemab:9", 9, 3),
            ("elemab:25", 25, 5),
            ("c4xc2", 8, 4),
            ("s3", 6, 6),
            ("d10", 10, 10),
            ("a4", 12, 6),
            ("s4", 24, 12),
            ("sl23", 24, 12),
            ("f20", 20, 20),
            ("c7:c3", 21, 21),
        ] {
            let g = named_group(name).unwrap();
            assert_eq!(g.order(), order, "{name} order");
            assert_eq!(g.exponent(), exponent, "{name} exponent");
            assert!(g.is_solvable(), "{name} solvable");
        }
    }

    #[test]
    fn dihedral_generators_are_standard() {
        let d8 = named_group("dihedral:8").unwrap();
        let gens = d8.generators();
        assert_eq!(gens[0].to_one_based(), vec![2, 3, 4, 1]);
        assert_eq!(gens[1].to_one_based(), vec![3, 2, 1, 4]);
    }

    #[test]
    fn quaternion_structure() {
        let q8 = named_group("quaternion:8").unwrap();
        // unique involution
        assert_eq!(order_census(&q8), vec![(1, 1), (2, 1), (4, 6)]);
        let q16 = named_group("quaternion:16").unwrap();
        assert_eq!(order_census(&q16), vec![(1, 1), (2, 1), (4, 10), (8, 4)]);
        let cl = q8.conjugacy_classes();
        assert_eq!(cl.sizes, vec![1, 1, 2, 2, 2]);
        assert_eq!(cl.orders, vec![1, 2, 4, 4, 4]);
    }

    #[test]
    fn semidihedral_structure() {
        let sd = named_group("semidihedral:16").unwrap();
        assert_eq!(order_census(&sd), vec![(1, 1), (2, 5), (4, 6), (8, 4)]);
        let cl = sd.conjugacy_classes();
        assert_eq!(cl.sizes, vec![1, 1, 4, 2, 4, 2, 2]);
    }

    #[test]
    fn modular_and_heisenberg() {
        let m27 = named_group("modular:27").unwrap();
        assert_eq!(order_census(&m27), vec![(1, 1), (3, 8), (9, 18)]);
        assert!(!m27.is_abelian());
        let h3 = named_group("heisenberg:3").unwrap();
        assert_eq!(order_census(&h3), vec![(1, 1), (3, 26)]);
        assert!(!h3.is_abelian());
        let cl = h3.conjugacy_classes();
        assert_eq!(cl.len(), 11);
        assert_eq!(cl.sizes.iter().filter(|&&s| s == 1).count(), 3);
    }

    #[test]
    fn frobenius_groups() {
        let f20 = named_group("f20").unwrap();
        let cl = f20.conjugacy_classes();
        assert_eq!(cl.orders, vec![1, 2, 4, 4, 5]);
        assert_eq!(cl.sizes, vec![1, 5, 5, 5, 4]);
        let c7c3 = named_group("c7:c3").unwrap();
        let cl = c7c3.conjugacy_classes();
        assert_eq!(cl.orders, vec![1, 3, 3, 7, 7]);
        assert_eq!(cl.sizes, vec![1, 7, 7, 3, 3]);
    }

    #[test]
    fn sl23_structure() {
        let g = named_group("sl23").unwrap();
        assert_eq!(g.order(), 24);
        // unique involution (-identity)
        assert_eq!(order_census(&g), vec![(1, 1), (2, 1), (3, 8), (4, 6), (6, 8)]);
        let cl = g.conjugacy_classes();
        assert_eq!(cl.len(), 7);
        assert!(!g.is_abelian());
    }

    #[test]
    fn rejects_bad_names() {
        assert!(named_group("nope").is_err());
        assert!(named_group("cyclic:x").is_err());
        assert!(named_group("quaternion:6").is_err());
        assert!(named_group("modular:8").is_err());
        assert!(named_group("heisenberg:4").is_err());
    }
}
