//! JSON wire format for [`CycElt`]:
//! `{"n": 5, "coeffs": [[num, den], ...]}` with phi(n) entries, each an exact
//! integer pair. Numerators/denominators are emitted as JSON numbers of
//! arbitrary size (serde_json's arbitrary-precision representation), so the
//! round trip is exact and byte-stable.

use super::CycElt;
use crate::arith::phi_u64;
use num::{BigInt, BigRational, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

#[derive(Serialize, Deserialize)]
struct Wire {
    n: u64,
    coeffs: Vec<(serde_json::Number, serde_json::Number)>,
}

fn bigint_to_number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("integer literal is a valid JSON number")
}

fn number_to_bigint(v: &serde_json::Number) -> Result<BigInt, String> {
    BigInt::from_str(&v.to_string()).map_err(|_| format!("not an integer: {v}"))
}

impl Serialize for CycElt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| (bigint_to_number(c.numer()), bigint_to_number(c.denom())))
            .collect();
        Wire {
            n: self.n,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycElt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = Wire::deserialize(deserializer)?;
        if wire.n == 0 {
            return Err(D::Error::custom("modulus must be positive"));
        }
        let want = phi_u64(wire.n) as usize;
        if wire.coeffs.len() != want {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for modulus {}, got {}",
                want,
                wire.n,
                wire.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(want);
        for (num, den) in &wire.coeffs {
            let n = number_to_bigint(num).map_err(D::Error::custom)?;
            let d = number_to_bigint(den).map_err(D::Error::custom)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, d));
        }
        Ok(CycElt {
            n: wire.n,
            coeffs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x = &CycElt::root_of_unity(5, 2).scale(&BigRational::new(
            BigInt::from(-7),
            BigInt::from(3),
        )) + &CycElt::from_int(4);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycElt = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        // schema shape
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["n"], serde_json::json!(5));
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn rejects_bad_length() {
        let s = r#"{"n": 5, "coeffs": [[1,1],[0,1]]}"#;
        assert!(serde_json::from_str::<CycElt>(s).is_err());
    }

    #[test]
    fn big_values_survive() {
        let big = BigRational::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from(1),
        );
        let x = CycElt::from_rational_at(big, 3);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycElt = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
