//! Points of zero-dimensional projective schemes.
//!
//! For `D` past the regularity, `(S/I)_D` is the space of sections of the
//! scheme, and multiplication by `x_j / h` (for a linear form `h` vanishing at
//! no point) acts on it with joint generalized eigenspaces equal to the local
//! rings of the points. Splitting those commuting operators one at a time
//! yields each point together with its local length.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::ideal::{hilbert_sequence, IdealPresentation, MacaulayDegree};
use crate::linalg::Matrix;
use crate::poly::MultiPoly;
use crate::roots::{root_count, uni_roots};

/// A Galois orbit of points, represented by its smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolvedPoint {
    /// Normalized so the first nonzero coordinate is one.
    #[serde(serialize_with = "crate::json::ser_fe_vec")]
    pub coords: Vec<Fe>,
    /// Smallest tower level containing the coordinates; equals the orbit size.
    pub level: u32,
    /// Length of the local ring of the scheme at the point.
    pub multiplicity: usize,
}

impl SolvedPoint {
    pub fn orbit_size(&self) -> u32 {
        self.level
    }

    /// Coordinates mapped into a level divisible by `self.level`.
    pub fn embed_to(&self, tower: &FieldTower, level: u32) -> Result<Vec<Fe>> {
        let emb = tower.embedding(self.level, level)?;
        Ok(self.coords.iter().map(|&c| emb.apply(c)).collect())
    }

    /// All conjugates, at the point's own level.
    pub fn conjugates(&self, tower: &FieldTower) -> Vec<Vec<Fe>> {
        let mut out = vec![self.coords.clone()];
        loop {
            let next: Vec<Fe> = out
                .last()
                .unwrap()
                .iter()
                .map(|c| tower.base_frobenius(*c))
                .collect();
            if next == self.coords {
                return out;
            }
            out.push(next);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroDimSolution {
    pub points: Vec<SolvedPoint>,
    /// Length of the scheme from the Hilbert function.
    pub length: usize,
    /// Degree used for the quotient space.
    pub degree: usize,
}

impl ZeroDimSolution {
    /// Whether the points account for the whole length.
    pub fn complete(&self) -> bool {
        self.points
            .iter()
            .map(|p| p.multiplicity * p.level as usize)
            .sum::<usize>()
            == self.length
    }

    pub fn geometric_count(&self) -> usize {
        self.points.iter().map(|p| p.level as usize).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Largest tower level in which points are looked for.
    pub max_ext: u32,
    /// Largest degree for Hilbert function computations.
    pub d_max: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_ext: 12,
            d_max: 16,
            seed: 0,
        }
    }
}

/// Finds all points of the zero-dimensional scheme `V(I) ⊂ P^{n-1}`, with
/// coefficients of `I` in the base field of `tower`.
pub fn solve_zero_dim(
    ideal: &IdealPresentation,
    tower: &FieldTower,
    opts: &SolveOptions,
) -> Result<ZeroDimSolution> {
    if tower.level_of(ideal.field()) != Some(1) {
        return Err(Error::Incompatible);
    }
    let hist = hilbert_sequence(ideal, opts.d_max)?;
    let n = hist.len();
    let d0 = ideal
        .gens()
        .iter()
        .filter_map(|g| g.homogeneous_degree())
        .max()
        .unwrap_or(0);
    let stable =
        n >= 3 && hist[n - 1] == hist[n - 2] && hist[n - 2] == hist[n - 3] && n - 1 >= d0 + 2;
    if !stable {
        return Err(if n >= 2 && hist[n - 1] > hist[n - 2] {
            Error::NotZeroDimensional
        } else {
            Error::DegreeTooSmall(opts.d_max)
        });
    }
    let length = hist[n - 1];
    let mut start = n - 3;
    while start > d0 && hist[start - 1] == length {
        start -= 1;
    }
    if length == 0 {
        return Ok(ZeroDimSolution {
            points: Vec::new(),
            length,
            degree: start,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut last_err = Error::Certification("no admissible linear form found".into());
    for degree in start..start + 3 {
        let lo = MacaulayDegree::build(ideal, degree);
        let hi = MacaulayDegree::build(ideal, degree + 1);
        if lo.hilbert() != length || hi.hilbert() != length {
            continue;
        }
        let basis = lo.standard_monomials();
        let nv = ideal.nvars();
        let mult: Vec<Matrix> = (0..nv)
            .map(|j| {
                let cols: Vec<Vec<Fe>> = basis
                    .iter()
                    .map(|b| {
                        let mut e = b.clone();
                        e[j] += 1;
                        hi.normal_form(&MultiPoly::monomial(ideal.field().one(), e))
                    })
                    .collect();
                Matrix::from_columns(ideal.field(), &cols)
            })
            .collect();
        for attempt in 0..10u32 {
            let w = [1, 1, 1, 1, 2, 2, 3, 3, 4, 5][attempt as usize];
            if w > tower.max_level() || w > opts.max_ext {
                continue;
            }
            match solve_with_form(ideal, tower, opts, &mult, w, &mut rng, length) {
                Ok(points) => {
                    return Ok(ZeroDimSolution {
                        points,
                        length,
                        degree,
                    })
                }
                Err(e) => last_err = e,
            }
        }
    }
    Err(last_err)
}

fn solve_with_form(
    ideal: &IdealPresentation,
    tower: &FieldTower,
    opts: &SolveOptions,
    mult: &[Matrix],
    w: u32,
    rng: &mut ChaCha8Rng,
    length: usize,
) -> Result<Vec<SolvedPoint>> {
    let field = tower.level(w)?;
    let emb = tower.embedding(1, w)?;
    let lifted: Vec<Matrix> = mult.iter().map(|m| m.embed(&emb)).collect();
    let mut m0 = Matrix::zeros(field, length, length);
    for m in &lifted {
        let c = field.random(rng);
        for i in 0..length {
            for j in 0..length {
                let v = m0.get(i, j) + c * m.get(i, j);
                m0.set(i, j, v);
            }
        }
    }
    let inv = m0
        .inverse()
        .ok_or_else(|| Error::Certification("linear form vanishes at a point".into()))?;
    let ops: Vec<Matrix> = lifted.iter().map(|m| inv.mul(m)).collect();
    let mut leaves = Vec::new();
    split(tower, opts.max_ext, &ops, 0, Vec::new(), w, &mut leaves)?;

    let mut points: BTreeMap<(u32, Vec<u128>), SolvedPoint> = BTreeMap::new();
    for (vals, level, dim) in leaves {
        let p = canonical_point(tower, &vals, level)?;
        let key = (p.level, p.coords.iter().map(|c| c.bits()).collect());
        points.entry(key).or_insert(SolvedPoint {
            multiplicity: dim,
            ..p
        });
    }
    let points: Vec<SolvedPoint> = points.into_values().collect();
    for p in &points {
        let emb = tower.embedding(1, p.level)?;
        for g in ideal.gens() {
            if !g.embed(&emb).eval(&p.coords).is_zero() {
                return Err(Error::Certification(
                    "recovered point does not satisfy the equations".into(),
                ));
            }
        }
    }
    let total: usize = points
        .iter()
        .map(|p| p.multiplicity * p.level as usize)
        .sum();
    if total != length {
        return Err(Error::Certification(format!(
            "points account for length {total} of {length}"
        )));
    }
    Ok(points)
}

type Leaf = (Vec<Fe>, u32, usize);

fn split(
    tower: &FieldTower,
    max_ext: u32,
    ops: &[Matrix],
    j: usize,
    vals: Vec<Fe>,
    level: u32,
    out: &mut Vec<Leaf>,
) -> Result<()> {
    if j == ops.len() {
        out.push((vals, level, ops[0].nrows()));
        return Ok(());
    }
    let cp = ops[j].charpoly();
    let deg = cp.degree().unwrap_or(0);
    let max_rel = (max_ext / level).min(tower.max_level() / level);
    let orbits = uni_roots(&cp, tower, max_rel)?;
    if root_count(&orbits) != deg {
        return Err(Error::Certification(format!(
            "eigenvalues beyond tower level {max_ext}"
        )));
    }
    for o in orbits {
        let new_level = o.level;
        let emb = tower.embedding(level, new_level)?;
        let lifted: Vec<Matrix> = ops.iter().map(|m| m.embed(&emb)).collect();
        let e = o.multiplicity as usize;
        let sub = if e == deg {
            lifted
        } else {
            let a = lifted[j].add_scalar_identity(o.root);
            let mut p = a.clone();
            for _ in 1..e {
                p = p.mul(&a);
            }
            let ker = p.kernel();
            if ker.len() != e {
                return Err(Error::Certification("eigenspace dimension mismatch".into()));
            }
            restrict(&lifted, &ker)
        };
        let mut v: Vec<Fe> = vals.iter().map(|&x| emb.apply(x)).collect();
        v.push(o.root);
        split(tower, max_ext, &sub, j + 1, v, new_level, out)?;
    }
    Ok(())
}

/// Matrices of the operators restricted to the invariant span of `basis`.
fn restrict(ops: &[Matrix], basis: &[Vec<Fe>]) -> Vec<Matrix> {
    let field = ops[0].field();
    let v = Matrix::from_columns(field, basis);
    let e = basis.len();
    let mut vt = v.transpose();
    let rows = vt.rref();
    let mut s = Matrix::zeros(field, e, e);
    for (r, &i) in rows.iter().enumerate() {
        for c in 0..e {
            s.set(r, c, v.get(i, c));
        }
    }
    let s_inv = s.inverse().expect("independent rows");
    ops.iter()
        .map(|t| {
            let tv = t.mul(&v);
            let mut sel = Matrix::zeros(field, e, e);
            for (r, &i) in rows.iter().enumerate() {
                for c in 0..e {
                    sel.set(r, c, tv.get(i, c));
                }
            }
            s_inv.mul(&sel)
        })
        .collect()
}

/// Normalizes, moves to the smallest level, and picks the smallest conjugate.
fn canonical_point(tower: &FieldTower, vals: &[Fe], level: u32) -> Result<SolvedPoint> {
    let lead = vals
        .iter()
        .find(|v| !v.is_zero())
        .copied()
        .ok_or_else(|| Error::Certification("zero joint eigenvalue vector".into()))?;
    let inv = lead.inv();
    let coords: Vec<Fe> = vals.iter().map(|&v| v * inv).collect();
    let k = coords.iter().map(|&c| tower.orbit_size(c)).fold(1, lcm);
    let down = tower.embedding(k, level)?;
    let coords: Vec<Fe> = coords
        .iter()
        .map(|&c| down.preimage(c).expect("coordinate lies in the subfield"))
        .collect();
    let p = SolvedPoint {
        coords,
        level: k,
        multiplicity: 0,
    };
    let best = p
        .conjugates(tower)
        .into_iter()
        .min_by(|a, b| {
            let ka: Vec<u128> = a.iter().map(|c| c.bits()).collect();
            let kb: Vec<u128> = b.iter().map(|c| c.bits()).collect();
            ka.cmp(&kb)
        })
        .unwrap();
    Ok(SolvedPoint { coords: best, ..p })
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
