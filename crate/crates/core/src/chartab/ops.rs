//! Restriction, induction, and decomposition of characters.

use num::{BigRational, FromPrimitive, ToPrimitive};

use super::CharTable;
use crate::cyclo::CycElt;
use crate::error::{invariant, Error, Result};
use crate::groups::{Classes, Group};

/// For each class of `sub`, the class of the parent group containing it.
/// `sub` must act on the same points as `parent`.
pub fn fusion_map(
    parent: &Group,
    parent_classes: &Classes,
    sub: &Group,
    sub_classes: &Classes,
) -> Result<Vec<usize>> {
    sub_classes
        .reps
        .iter()
        .map(|&r| {
            let p = parent
                .index_of(sub.element(r))
                .ok_or_else(|| invariant("subgroup element missing from parent group"))?;
            Ok(parent_classes.class_of[p])
        })
        .collect()
}

/// Values of parent row `t` restricted to the subgroup classes.
pub fn restricted_values(table: &CharTable, t: usize, fusion: &[usize]) -> Vec<CycElt> {
    fusion.iter().map(|&pc| table.value(t, pc).clone()).collect()
}

/// Hermitian inner product of two class functions given by values per class.
pub fn inner_product(order: u64, classes: &Classes, a: &[CycElt], b: &[CycElt]) -> CycElt {
    let mut acc = CycElt::zero(1);
    for j in 0..classes.len() {
        let term =
            (&a[j] * &b[j].conj()).scale(&BigRational::from_usize(classes.sizes[j]).unwrap());
        acc = &acc + &term;
    }
    acc.scale(&BigRational::new(1.into(), order.into()))
        .minimal_cyclotomic()
}

/// Decomposes a character (values per class) into irreducibles of `table`,
/// returning `(row, multiplicity)` pairs and verifying the sum exactly.
pub fn decompose(table: &CharTable, values: &[CycElt]) -> Result<Vec<(usize, u64)>> {
    let mut parts = Vec::new();
    let mut remainder: Vec<CycElt> = values.to_vec();
    for t in 0..table.n_classes() {
        let m = inner_product(table.group.order(), &table.classes, values, table.row(t));
        let m = m
            .as_rational()
            .filter(|q| q.is_integer())
            .and_then(|q| q.to_integer().to_u64())
            .ok_or_else(|| {
                invariant("multiplicity of an irreducible constituent is not a non-negative integer")
            })?;
        if m > 0 {
            parts.push((t, m));
            let mq = BigRational::from_u64(m).unwrap();
            for (rv, tv) in remainder.iter_mut().zip(table.row(t)) {
                *rv = &*rv - &tv.scale(&mq);
            }
        }
    }
    if remainder.iter().any(|v| !v.is_zero()) {
        return Err(Error::InvalidTable(
            "class function is not a sum of the table's irreducibles".into(),
        ));
    }
    Ok(parts)
}

/// Induces a character of `sub` (values per sub class) up to the parent.
pub fn induced_values(
    parent: &Group,
    parent_classes: &Classes,
    sub: &Group,
    sub_classes: &Classes,
    psi: &[CycElt],
) -> Result<Vec<CycElt>> {
    if psi.len() != sub_classes.len() {
        return Err(invariant("value list does not match subgroup class count"));
    }
    let scale = BigRational::new(1.into(), sub.order().into());
    let mut out = Vec::with_capacity(parent_classes.len());
    for &gk in &parent_classes.reps {
        let mut acc = CycElt::zero(1);
        for x in 0..parent.order() as usize {
            let y = parent.mul(parent.mul(parent.inv(x), gk), x);
            if let Some(yi) = sub.index_of(parent.element(y)) {
                acc = &acc + &psi[sub_classes.class_of[yi]];
            }
        }
        out.push(acc.scale(&scale).minimal_cyclotomic());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{derived_subgroup, named_group};

    #[test]
    fn restriction_s4_to_a4() {
        let s4 = named_group("s4").unwrap();
        let ts4 = CharTable::build(s4).unwrap();
        let a4 = derived_subgroup(&ts4.group).unwrap();
        let ta4 = CharTable::build(a4).unwrap();
        let fus = fusion_map(&ts4.group, &ts4.classes, &ta4.group, &ta4.classes).unwrap();
        // the 2-dimensional character of S4 restricts to the two nontrivial
        // linear characters of A4
        let two = (0..5).find(|&t| ts4.degree(t) == 2).unwrap();
        let res = restricted_values(&ts4, two, &fus);
        let parts = decompose(&ta4, &res).unwrap();
        assert_eq!(parts.len(), 2);
        for &(t, m) in &parts {
            assert_eq!(m, 1);
            assert_eq!(ta4.degree(t), 1);
            assert!(!ta4.char_field(t).is_rationals());
        }
    }

    #[test]
    fn induction_c4_to_d8_gives_two_dim() {
        let d8 = named_group("dihedral:8").unwrap();
        let td8 = CharTable::build(d8).unwrap();
        let rot = td8
            .group
            .index_of(&crate::groups::Perm::from_one_based(&[2, 3, 4, 1], 4).unwrap())
            .unwrap();
        let c4 = td8.group.subgroup(&[rot]).unwrap();
        let tc4 = CharTable::build(c4).unwrap();
        // a faithful linear character of C4
        let faithful = (0..4).find(|&t| !tc4.is_real(t)).unwrap();
        let ind = induced_values(
            &td8.group,
            &td8.classes,
            &tc4.group,
            &tc4.classes,
            tc4.row(faithful),
        )
        .unwrap();
        let idx = td8.row_index_of(&ind).expect("induced character is irreducible");
        assert_eq!(td8.degree(idx), 2);
    }

    #[test]
    fn frobenius_reciprocity() {
        let s4 = named_group("s4").unwrap();
        let ts4 = CharTable::build(s4).unwrap();
        let rot = ts4
            .group
            .index_of(&crate::groups::Perm::from_one_based(&[2, 3, 4, 1], 4).unwrap())
            .unwrap();
        let c4 = ts4.group.subgroup(&[rot]).unwrap();
        let tc4 = CharTable::build(c4).unwrap();
        let fus = fusion_map(&ts4.group, &ts4.classes, &tc4.group, &tc4.classes).unwrap();
        for psi in 0..tc4.n_classes() {
            let ind = induced_values(&ts4.group, &ts4.classes, &tc4.group, &tc4.classes, tc4.row(psi))
                .unwrap();
            for chi in 0..ts4.n_classes() {
                let lhs = inner_product(ts4.group.order(), &ts4.classes, &ind, ts4.row(chi));
                let res = restricted_values(&ts4, chi, &fus);
                let rhs = inner_product(tc4.group.order(), &tc4.classes, tc4.row(psi), &res);
                assert_eq!(lhs, rhs, "psi={psi} chi={chi}");
            }
        }
    }

    #[test]
    fn induction_degree_scales_by_index() {
        let q8 = named_group("quaternion:8").unwrap();
        let tq8 = CharTable::build(q8).unwrap();
        let z = (0..8)
            .find(|&i| tq8.group.element_order(i) == 2)
            .unwrap();
        let c2 = tq8.group.subgroup(&[z]).unwrap();
        let tc2 = CharTable::build(c2).unwrap();
        let sgn = (0..2).find(|&t| {
            tc2.row(t)
                .iter()
                .any(|v| v.as_rational() == Some(BigRational::from_i64(-1).unwrap()))
        })
        .unwrap();
        let ind = induced_values(&tq8.group, &tq8.classes, &tc2.group, &tc2.classes, tc2.row(sgn))
            .unwrap();
        // degree |G:H| * 1 = 4, decomposes as twice the 2-dim irreducible
        let parts = decompose(&tq8, &ind).unwrap();
        assert_eq!(parts.len(), 1);
        let (t, m) = parts[0];
        assert_eq!((tq8.degree(t), m), (2, 2));
    }
}
