//! JSON encodings shared by the library and the command-line tool.
//!
//! Field elements are lower-case hexadecimal strings of their coordinate bits
//! in the polynomial basis of the field's canonical defining polynomial.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{gf, Fe, FieldTower, GaloisField};
use crate::poly::{Exp, MultiPoly};
use crate::uni::UniPoly;

pub fn ser_fe<S: Serializer>(x: &Fe, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_hex())
}

pub fn ser_fe_vec<S: Serializer>(xs: &[Fe], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_hex()))
}

pub fn ser_opt_fe<S: Serializer>(x: &Option<Fe>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_hex()),
        None => s.serialize_none(),
    }
}

pub fn parse_fe(field: &'static GaloisField, hex: &str) -> Result<Fe> {
    let hex = hex.trim_start_matches("0x");
    let v = u128::from_str_radix(hex, 16)
        .map_err(|e| Error::Json(format!("bad field element {hex:?}: {e}")))?;
    Ok(field.from_bits(v)?)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub m: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coef: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: usize,
    pub deg: Option<usize>,
    pub field: FieldSpec,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn from_poly(p: &MultiPoly) -> Self {
        PolyJson {
            vars: p.nvars(),
            deg: p.homogeneous_degree(),
            field: FieldSpec {
                m: p.field().bits(),
            },
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.to_vec(),
                    coef: c.to_hex(),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<MultiPoly> {
        let tower = FieldTower::new(self.field.m)?;
        let field = tower.base();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.len() != self.vars {
                return Err(Error::Json(format!(
                    "exponent {:?} does not have {} entries",
                    t.exp, self.vars
                )));
            }
            terms.push((Exp::from_slice(&t.exp), parse_fe(field, &t.coef)?));
        }
        let p = MultiPoly::from_terms(field, self.vars, terms)?;
        if let Some(d) = self.deg {
            if !p.is_zero() && p.homogeneous_degree() != Some(d) {
                return Err(Error::Json(format!(
                    "terms are not homogeneous of degree {d}"
                )));
            }
        }
        Ok(p)
    }
}

pub fn poly_to_json(p: &MultiPoly) -> String {
    serde_json::to_string(&PolyJson::from_poly(p)).expect("serializable")
}

pub fn poly_from_json(s: &str) -> Result<MultiPoly> {
    let pj: PolyJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    pj.to_poly()
}

/// Dense univariate coefficient list, lowest degree first.
pub fn uni_to_hex(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_hex()).collect()
}

pub fn uni_from_hex(field: &'static GaloisField, coeffs: &[String]) -> Result<UniPoly> {
    let cs = coeffs
        .iter()
        .map(|h| parse_fe(field, h))
        .collect::<Result<Vec<_>>>()?;
    Ok(UniPoly::new(field, cs))
}

pub fn field_of_m(m: u32) -> Result<&'static GaloisField> {
    Ok(gf(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    #[test]
    fn polynomial_roundtrip() {
        let k = gf(3).unwrap();
        let p = MultiPoly::from_terms(
            k,
            4,
            [
                (smallvec![4, 0, 0, 0], k.one()),
                (smallvec![1, 1, 1, 1], k.generator()),
            ],
        )
        .unwrap();
        let s = poly_to_json(&p);
        assert_eq!(
            s,
            r#"{"vars":4,"deg":4,"field":{"m":3},"terms":[{"exp":[1,1,1,1],"coef":"2"},{"exp":[4,0,0,0],"coef":"1"}]}"#
        );
        assert_eq!(poly_from_json(&s).unwrap(), p);
    }

    #[test]
    fn malformed_inputs() {
        assert!(poly_from_json("{").is_err());
        let bad = r#"{"vars":2,"deg":2,"field":{"m":2},"terms":[{"exp":[1,0],"coef":"1"}]}"#;
        assert!(poly_from_json(bad).is_err());
        let big = r#"{"vars":1,"deg":1,"field":{"m":2},"terms":[{"exp":[1],"coef":"ff"}]}"#;
        assert!(poly_from_json(big).is_err());
    }
}
