//! Roots of univariate polynomials in the extensions of a tower, by
//! distinct-degree splitting: `gcd(p, t^(Q^k) - t)` collects the roots whose
//! field has relative degree dividing `k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::uni::UniPoly;

/// One Galois orbit of roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootOrbit {
    /// Smallest element of the orbit, stored in the field of `level`.
    #[serde(serialize_with = "crate::json::ser_fe")]
    pub root: Fe,
    pub multiplicity: u32,
    /// Tower level of the field where `root` is stored.
    pub level: u32,
    /// Orbit size over the coefficient field of the polynomial.
    pub ext_degree: u32,
}

impl RootOrbit {
    /// All conjugates over the coefficient field of the original polynomial.
    pub fn conjugates(&self, coeff_bits: u32) -> Vec<Fe> {
        let mut out = vec![self.root];
        let mut r = self.root.frobenius(coeff_bits);
        while r != self.root {
            out.push(r);
            r = r.frobenius(coeff_bits);
        }
        out
    }
}

/// Roots of `p` (whose coefficients lie in some level `L` of `tower`) in the
/// levels `L·k` for `k <= max_ext`, one representative per orbit under the
/// Frobenius of level `L`.
pub fn uni_roots(p: &UniPoly, tower: &FieldTower, max_ext: u32) -> Result<Vec<RootOrbit>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let base_level = tower.level_of(p.field()).ok_or(Error::Incompatible)?;
    let q_bits = p.field().bits();
    let deg = p.degree().unwrap();
    let t = UniPoly::t(p.field());
    let mut found = 0usize;
    let mut out = Vec::new();
    for k in 1..=max_ext {
        if found == deg {
            break;
        }
        let level = base_level * k;
        if level > tower.max_level() {
            break;
        }
        let split = t.frobenius_mod(q_bits * k, p).add(&t);
        let g = p.gcd(&split);
        if g.degree().unwrap_or(0) == 0 {
            continue;
        }
        let emb = tower.embedding(base_level, level)?;
        let pe = p.embed(&emb);
        let mut roots = g.embed(&emb).roots_in_field();
        roots.retain(|r| orbit_len(*r, q_bits) == k);
        let mut seen = std::collections::BTreeSet::new();
        for r in roots {
            if seen.contains(&r) {
                continue;
            }
            let orbit = RootOrbit {
                root: r,
                multiplicity: 0,
                level,
                ext_degree: k,
            }
            .conjugates(q_bits);
            let rep = *orbit.iter().min().unwrap();
            seen.extend(orbit);
            let mult = pe.multiplicity(rep);
            found += mult as usize * k as usize;
            out.push(RootOrbit {
                root: rep,
                multiplicity: mult,
                level,
                ext_degree: k,
            });
        }
    }
    Ok(out)
}

fn orbit_len(r: Fe, q_bits: u32) -> u32 {
    let mut k = 1;
    let mut s = r.frobenius(q_bits);
    while s != r {
        s = s.frobenius(q_bits);
        k += 1;
    }
    k
}

/// Total number of roots with multiplicity represented by the orbits.
pub fn root_count(orbits: &[RootOrbit]) -> usize {
    orbits
        .iter()
        .map(|o| o.multiplicity as usize * o.ext_degree as usize)
        .sum()
}
