//! Ordinary character tables with exact cyclotomic values.

mod dixon;
mod ops;

pub use ops::{decompose, fusion_map, induced_values, inner_product, restricted_values};

use num::{BigRational, FromPrimitive, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo::CycElt;
use crate::error::{Error, Result};
use crate::groups::{Classes, Group};

/// The ordinary character table of a finite group.
///
/// Rows are sorted by (degree, lexicographic value coefficients); columns
/// follow the canonical conjugacy class order of [`Group::conjugacy_classes`].
/// Every value is an exact cyclotomic number in its minimal field.
#[derive(Clone, Debug)]
pub struct CharTable {
    pub group: Group,
    pub classes: Classes,
    pub exponent: u64,
    rows: Vec<Vec<CycElt>>,
}

impl CharTable {
    /// Computes the table from scratch and verifies it.
    pub fn build(group: Group) -> Result<CharTable> {
        let classes = group.conjugacy_classes();
        let rows = dixon::irreducible_characters(&group, &classes)?;
        let table = CharTable {
            exponent: group.exponent(),
            group,
            classes,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    /// Wraps externally supplied rows (ingest path), verifying everything.
    pub fn from_rows(group: Group, rows: Vec<Vec<CycElt>>) -> Result<CharTable> {
        let classes = group.conjugacy_classes();
        let table = CharTable {
            exponent: group.exponent(),
            group,
            classes,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn rows(&self) -> &[Vec<CycElt>] {
        &self.rows
    }

    pub fn row(&self, t: usize) -> &[CycElt] {
        &self.rows[t]
    }

    pub fn value(&self, t: usize, j: usize) -> &CycElt {
        &self.rows[t][j]
    }

    pub fn degree(&self, t: usize) -> u64 {
        let id = self.classes.class_of[self.group.identity_index()];
        self.rows[t][id]
            .as_rational()
            .and_then(|q| q.to_integer().to_u64())
            .expect("identity value is a positive integer")
    }

    pub fn is_real(&self, t: usize) -> bool {
        self.rows[t].iter().all(|v| v.is_real())
    }

    /// Frobenius–Schur indicator of row `t`: 1, -1, or 0.
    pub fn indicator(&self, t: usize) -> Result<i8> {
        let pm2 = self.group.power_map(&self.classes, 2);
        let mut acc = CycElt::zero(1);
        for j in 0..self.n_classes() {
            let term = self.rows[t][pm2[j]]
                .scale(&BigRational::from_usize(self.classes.sizes[j]).unwrap());
            acc = &acc + &term;
        }
        let v = acc
            .scale(&BigRational::new(1.into(), self.group.order().into()))
            .as_rational()
            .ok_or_else(|| Error::InvalidTable("indicator is not rational".into()))?;
        match v.to_integer().to_i8() {
            Some(s @ (-1 | 0 | 1)) if v.is_integer() => Ok(s),
            _ => Err(Error::InvalidTable(format!("indicator value {v} out of range"))),
        }
    }

    /// The field generated by the values of row `t`.
    pub fn char_field(&self, t: usize) -> crate::cyclo::AbelianField {
        crate::cyclo::AbelianField::generated_by(&self.rows[t])
    }

    /// Index of the complex-conjugate row.
    pub fn conjugate_row(&self, t: usize) -> usize {
        let conj: Vec<CycElt> = self.rows[t].iter().map(|v| v.conj()).collect();
        self.row_index_of(&conj).expect("table is closed under conjugation")
    }

    /// Index of the row obtained by applying the Galois map zeta -> zeta^k.
    pub fn galois_row(&self, t: usize, k: u64) -> Result<usize> {
        let img: Vec<CycElt> = self
            .rows[t]
            .iter()
            .map(|v| v.lift(self.exponent).map(|w| w.galois(k)))
            .collect::<Result<_>>()?;
        self.row_index_of(&img)
            .ok_or_else(|| Error::InvalidTable("table not closed under Galois action".into()))
    }

    pub fn row_index_of(&self, values: &[CycElt]) -> Option<usize> {
        self.rows
            .iter()
            .position(|row| row.iter().zip(values).all(|(a, b)| a == b))
    }

    /// Orbit of row `t` under the Galois group fixing `field`, sorted.
    pub fn galois_orbit_over(
        &self,
        t: usize,
        field: &crate::cyclo::AbelianField,
    ) -> Result<Vec<usize>> {
        if self.exponent == 1 {
            return Ok(vec![t]);
        }
        let m = crate::arith::lcm_u64(self.exponent, field.conductor());
        let mut orbit: Vec<usize> = field
            .stabilizer_at(m)
            .iter()
            .map(|&k| self.galois_row(t, k % self.exponent))
            .collect::<Result<_>>()?;
        orbit.sort_unstable();
        orbit.dedup();
        Ok(orbit)
    }

    /// Number of solutions of g^2 = 1, computed from the element list.
    pub fn involution_count(&self) -> u64 {
        (0..self.group.order() as usize)
            .filter(|&i| self.group.mul(i, i) == self.group.identity_index())
            .count() as u64
    }

    /// Full consistency check: degrees, orthogonality, indicators.
    pub fn validate(&self) -> Result<()> {
        let r = self.n_classes();
        if self.rows.len() != r {
            return Err(Error::InvalidTable(format!(
                "{} rows for {} classes",
                self.rows.len(),
                r
            )));
        }
        for row in &self.rows {
            if row.len() != r {
                return Err(Error::InvalidTable("row length mismatch".into()));
            }
        }
        let order = self.group.order();
        let degsum: u64 = (0..r).map(|t| self.degree(t) * self.degree(t)).sum();
        if degsum != order {
            return Err(Error::InvalidTable(format!(
                "degree squares sum to {degsum}, group order is {order}"
            )));
        }
        for s in 0..r {
            for t in s..r {
                let mut acc = CycElt::zero(1);
                for j in 0..r {
                    let term = (&self.rows[s][j] * &self.rows[t][j].conj())
                        .scale(&BigRational::from_usize(self.classes.sizes[j]).unwrap());
                    acc = &acc + &term;
                }
                let expected = if s == t {
                    CycElt::from_rational(BigRational::from_u64(order).unwrap())
                } else {
                    CycElt::zero(1)
                };
                if acc != expected {
                    return Err(Error::InvalidTable(format!(
                        "rows {s} and {t} are not orthonormal"
                    )));
                }
            }
        }
        for t in 0..r {
            self.indicator(t)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ClassWire {
    size: u64,
    order: u64,
}

#[derive(Serialize, Deserialize)]
struct PowerMapsWire {
    #[serde(rename = "-1")]
    minus_one: Vec<u64>,
    #[serde(rename = "2")]
    two: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    group: Group,
    exponent: u64,
    classes: Vec<ClassWire>,
    powermaps: PowerMapsWire,
    irreducibles: Vec<Vec<CycElt>>,
}

impl Serialize for CharTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = TableWire {
            group: self.group.clone(),
            exponent: self.exponent,
            classes: self
                .classes
                .sizes
                .iter()
                .zip(&self.classes.orders)
                .map(|(&size, &order)| ClassWire {
                    size: size as u64,
                    order,
                })
                .collect(),
            powermaps: PowerMapsWire {
                minus_one: self
                    .group
                    .power_map(&self.classes, -1)
                    .into_iter()
                    .map(|c| c as u64)
                    .collect(),
                two: self
                    .group
                    .power_map(&self.classes, 2)
                    .into_iter()
                    .map(|c| c as u64)
                    .collect(),
            },
            irreducibles: self.rows.clone(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = TableWire::deserialize(d)?;
        let table = CharTable::from_rows(wire.group, wire.irreducibles).map_err(D::Error::custom)?;
        if wire.exponent != table.exponent {
            return Err(D::Error::custom("exponent mismatch"));
        }
        let sizes: Vec<u64> = wire.classes.iter().map(|c| c.size).collect();
        let orders: Vec<u64> = wire.classes.iter().map(|c| c.order).collect();
        let have_sizes: Vec<u64> = table.classes.sizes.iter().map(|&s| s as u64).collect();
        if sizes != have_sizes || orders != table.classes.orders {
            return Err(D::Error::custom("class data does not match the group"));
        }
        let pm1: Vec<u64> = table
            .group
            .power_map(&table.classes, -1)
            .into_iter()
            .map(|c| c as u64)
            .collect();
        let pm2: Vec<u64> = table
            .group
            .power_map(&table.classes, 2)
            .into_iter()
            .map(|c| c as u64)
            .collect();
        if wire.powermaps.minus_one != pm1 || wire.powermaps.two != pm2 {
            return Err(D::Error::custom("power maps do not match the group"));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::named_group;
    use num::BigInt;

    fn table(name: &str) -> CharTable {
        CharTable::build(named_group(name).unwrap()).unwrap()
    }

    fn rational(v: &CycElt) -> BigRational {
        v.as_rational().expect("rational value")
    }

    #[test]
    fn cyclic_tables() {
        let t = table("cyclic:3");
        assert_eq!(t.n_classes(), 3);
        assert!(t.rows().iter().all(|r| r.len() == 3));
        assert_eq!(t.degree(0), 1);
        // nontrivial rows take a primitive cube root somewhere
        let nontrivial: Vec<_> = (0..3).filter(|&i| !t.is_real(i)).collect();
        assert_eq!(nontrivial.len(), 2);
        assert_eq!(t.conjugate_row(nontrivial[0]), nontrivial[1]);
        assert_eq!(t.indicator(nontrivial[0]).unwrap(), 0);
        assert_eq!(t.indicator(0).unwrap(), 1);
    }

    #[test]
    fn s3_table_values() {
        let t = table("s3");
        assert_eq!(t.n_classes(), 3);
        let degrees: Vec<u64> = (0..3).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![1, 1, 2]);
        // the 2-dimensional row: value -1 on 3-cycles, 0 on transpositions
        let two = 2usize;
        // class order: identity (order 1), transpositions (order 2), 3-cycles
        assert_eq!(t.classes.orders, vec![1, 2, 3]);
        assert_eq!(rational(t.value(two, 1)), BigRational::from_integer(0.into()));
        assert_eq!(
            rational(t.value(two, 2)),
            BigRational::from_integer(BigInt::from(-1))
        );
        assert_eq!(t.indicator(two).unwrap(), 1);
    }

    #[test]
    fn q8_has_symplectic_row() {
        let t = table("quaternion:8");
        let degrees: Vec<u64> = (0..5).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
        assert_eq!(t.indicator(4).unwrap(), -1);
        assert!(t.is_real(4));
        // the central involution sees chi(z) = -2
        assert_eq!(
            rational(t.value(4, 1)),
            BigRational::from_integer(BigInt::from(-2))
        );
    }

    #[test]
    fn s4_table() {
        let t = table("s4");
        let degrees: Vec<u64> = (0..5).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![1, 1, 2, 3, 3]);
        for i in 0..5 {
            assert_eq!(t.indicator(i).unwrap(), 1, "row {i}");
            assert!(t.is_real(i));
            assert!(t.char_field(i).is_rationals());
        }
    }

    #[test]
    fn sl23_table() {
        let t = table("sl23");
        let mut degrees: Vec<u64> = (0..7).map(|i| t.degree(i)).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 2, 2, 2, 3]);
        // exactly one quaternionic row (the rational 2-dimensional one)
        let quaternionic: Vec<_> = (0..7)
            .filter(|&i| t.indicator(i).unwrap() == -1)
            .collect();
        assert_eq!(quaternionic.len(), 1);
        assert_eq!(t.degree(quaternionic[0]), 2);
        assert!(t.char_field(quaternionic[0]).is_rationals());
        // the two complex 2-dim rows generate Q(zeta_3)
        let complex2: Vec<_> = (0..7)
            .filter(|&i| t.degree(i) == 2 && !t.is_real(i))
            .collect();
        assert_eq!(complex2.len(), 2);
        assert_eq!(t.char_field(complex2[0]).conductor(), 3);
        assert_eq!(t.conjugate_row(complex2[0]), complex2[1]);
    }

    #[test]
    fn heisenberg_table() {
        let t = table("heisenberg:3");
        assert_eq!(t.n_classes(), 11);
        let mut degrees: Vec<u64> = (0..11).map(|i| t.degree(i)).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3]);
        let big: Vec<_> = (0..11).filter(|&i| t.degree(i) == 3).collect();
        for &i in &big {
            assert_eq!(t.indicator(i).unwrap(), 0);
            assert_eq!(t.char_field(i).conductor(), 3);
        }
    }

    #[test]
    fn involution_identity_on_corpus() {
        for name in ["s3", "s4", "quaternion:8", "dihedral:8", "sl23", "f20"] {
            let t = table(name);
            // sum of indicator * degree counts the solutions of g^2 = 1
            let lhs: i64 = (0..t.n_classes())
                .map(|i| t.indicator(i).unwrap() as i64 * t.degree(i) as i64)
                .sum();
            assert_eq!(lhs, t.involution_count() as i64, "{name}");
        }
    }

    #[test]
    fn galois_orbits() {
        let t = table("cyclic:5");
        let nontrivial = (0..5).find(|&i| !t.char_field(i).is_rationals()).unwrap();
        let orbit = t
            .galois_orbit_over(nontrivial, &crate::cyclo::AbelianField::rationals())
            .unwrap();
        assert_eq!(orbit.len(), 4);
        let field = t.char_field(nontrivial);
        let self_orbit = t.galois_orbit_over(nontrivial, &field).unwrap();
        assert_eq!(self_orbit, vec![nontrivial]);
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let t = table("dihedral:8");
        let json = serde_json::to_string(&t).unwrap();
        let back: CharTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rows(), t.rows());
        // corrupting a value breaks deserialization
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["irreducibles"][0][1]["coeffs"][0][0] = serde_json::json!(7);
        assert!(serde_json::from_value::<CharTable>(v).is_err());
    }

    #[test]
    fn determinism_across_builds() {
        let a = serde_json::to_string(&table("sl23")).unwrap();
        let b = serde_json::to_string(&table("sl23")).unwrap();
        assert_eq!(a, b);
    }
}
