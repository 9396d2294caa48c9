//! Ideals given by generators, and the three dimension counts everything
//! else is built on: graded Hilbert functions of homogeneous ideals, lengths
//! of zero-dimensional projective schemes, and colengths of ideals in the
//! local ring at the origin.

use std::collections::{BTreeMap, HashMap};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, GaloisField};
use crate::linalg::{Echelon, Matrix};
use crate::poly::{exp_degree, monomials_of_degree, Exp, MultiPoly};

/// Default bound on the truncation order for local colengths.
pub const DEFAULT_COLENGTH_CAP: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Projective,
    AffineAtOrigin,
}

#[derive(Clone, Debug)]
pub struct IdealPresentation {
    field: &'static GaloisField,
    nvars: usize,
    chart: Chart,
    gens: Vec<MultiPoly>,
}

impl IdealPresentation {
    /// A homogeneous ideal of `K[x_0..x_{n-1}]`, i.e. a subscheme of `P^{n-1}`.
    pub fn homogeneous(
        field: &'static GaloisField,
        nvars: usize,
        gens: Vec<MultiPoly>,
    ) -> Result<Self> {
        let gens = Self::check(field, nvars, gens)?;
        if gens.iter().any(|g| g.homogeneous_degree().is_none()) {
            return Err(Error::NotHomogeneous);
        }
        Ok(IdealPresentation {
            field,
            nvars,
            chart: Chart::Projective,
            gens,
        })
    }

    /// An ideal of the local ring of affine space at the origin.
    pub fn affine_at_origin(
        field: &'static GaloisField,
        nvars: usize,
        gens: Vec<MultiPoly>,
    ) -> Result<Self> {
        let gens = Self::check(field, nvars, gens)?;
        if gens.iter().any(|g| g.order() == Some(0)) {
            return Err(Error::NotAtOrigin);
        }
        Ok(IdealPresentation {
            field,
            nvars,
            chart: Chart::AffineAtOrigin,
            gens,
        })
    }

    fn check(
        field: &'static GaloisField,
        nvars: usize,
        gens: Vec<MultiPoly>,
    ) -> Result<Vec<MultiPoly>> {
        for g in &gens {
            if g.nvars() != nvars || g.field() != field {
                return Err(Error::Incompatible);
            }
        }
        Ok(gens.into_iter().filter(|g| !g.is_zero()).collect())
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    /// The same ideal with an extra generator.
    pub fn with(&self, g: MultiPoly) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.push(g);
        match self.chart {
            Chart::Projective => Self::homogeneous(self.field, self.nvars, gens),
            Chart::AffineAtOrigin => Self::affine_at_origin(self.field, self.nvars, gens),
        }
    }

    pub fn embed(&self, emb: &Embedding) -> Self {
        IdealPresentation {
            field: emb.target(),
            nvars: self.nvars,
            chart: self.chart,
            gens: self.gens.iter().map(|g| g.embed(emb)).collect(),
        }
    }
}

/// Row-reduced Macaulay matrix of a homogeneous ideal in one degree.
/// Columns are the monomials of that degree in decreasing grevlex order, so
/// the non-pivot columns are the smallest monomials.
pub struct MacaulayDegree {
    degree: usize,
    monomials: Vec<Exp>,
    index: HashMap<Exp, usize>,
    echelon: Echelon,
}

impl MacaulayDegree {
    pub fn build(ideal: &IdealPresentation, degree: usize) -> Self {
        assert_eq!(ideal.chart, Chart::Projective);
        let monomials = monomials_of_degree(ideal.nvars, degree);
        let index: HashMap<Exp, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let ncols = monomials.len();
        let mut echelon = Echelon::new(ideal.field, ncols);
        'gens: for g in &ideal.gens {
            let dg = g.homogeneous_degree().expect("checked homogeneous");
            if dg > degree {
                continue;
            }
            for mono in monomials_of_degree(ideal.nvars, degree - dg) {
                if echelon.rank() == ncols {
                    break 'gens;
                }
                let mut row = vec![0u128; ncols];
                for (e, c) in g.terms() {
                    let prod: Exp = e.iter().zip(mono.iter()).map(|(a, b)| a + b).collect();
                    row[index[&prod]] ^= c.bits();
                }
                echelon.insert(row);
            }
        }
        MacaulayDegree {
            degree,
            monomials,
            index,
            echelon,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `dim (S/I)_d`.
    pub fn hilbert(&self) -> usize {
        self.monomials.len() - self.echelon.rank()
    }

    /// Monomials whose classes form a basis of `(S/I)_d`.
    pub fn standard_monomials(&self) -> Vec<Exp> {
        self.monomials
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.echelon.is_pivot(*i))
            .map(|(_, e)| e.clone())
            .collect()
    }

    /// Coordinates of the class of a degree-`d` form on the standard monomials.
    pub fn normal_form(&self, p: &MultiPoly) -> Vec<Fe> {
        let field = self.echelon_field(p);
        let mut v = vec![0u128; self.monomials.len()];
        for (e, c) in p.terms() {
            debug_assert_eq!(exp_degree(e), self.degree);
            v[self.index[e]] ^= c.bits();
        }
        self.echelon.reduce(&mut v);
        v.iter()
            .enumerate()
            .filter(|(i, _)| !self.echelon.is_pivot(*i))
            .map(|(_, &b)| field.elem(b))
            .collect()
    }

    fn echelon_field(&self, p: &MultiPoly) -> &'static GaloisField {
        p.field()
    }
}

/// `dim_K (S/I)_d` for a homogeneous ideal.
pub fn graded_hilbert(ideal: &IdealPresentation, d: usize) -> Result<usize> {
    if ideal.chart != Chart::Projective {
        return Err(Error::NotHomogeneous);
    }
    Ok(MacaulayDegree::build(ideal, d).hilbert())
}

/// Hilbert function values `HF(0..=d_max)`, stopping early after three
/// consecutive equal values at or above the largest generator degree.
pub fn hilbert_sequence(ideal: &IdealPresentation, d_max: usize) -> Result<Vec<usize>> {
    if ideal.chart != Chart::Projective {
        return Err(Error::NotHomogeneous);
    }
    let d0 = ideal
        .gens
        .iter()
        .filter_map(|g| g.homogeneous_degree())
        .max()
        .unwrap_or(0);
    let mut hist = Vec::new();
    for d in 0..=d_max {
        hist.push(MacaulayDegree::build(ideal, d).hilbert());
        if d >= d0 + 2 && stable_tail(&hist) {
            break;
        }
    }
    Ok(hist)
}

fn stable_tail(hist: &[usize]) -> bool {
    let n = hist.len();
    n >= 3 && hist[n - 1] == hist[n - 2] && hist[n - 2] == hist[n - 3]
}

/// Length of the zero-dimensional scheme cut out by a homogeneous ideal:
/// the Hilbert function's value once it has been constant for three
/// consecutive degrees.
pub fn scheme_length(ideal: &IdealPresentation, d_max: usize) -> Result<usize> {
    let hist = hilbert_sequence(ideal, d_max)?;
    let n = hist.len();
    if n >= 3 && stable_tail(&hist) {
        let d0 = ideal
            .gens
            .iter()
            .filter_map(|g| g.homogeneous_degree())
            .max()
            .unwrap_or(0);
        if n - 1 >= d0 + 2 {
            return Ok(hist[n - 1]);
        }
    }
    if n >= 2 && hist[n - 1] > hist[n - 2] {
        Err(Error::NotZeroDimensional)
    } else {
        Err(Error::DegreeTooSmall(d_max))
    }
}

/// Result of a local colength computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Colength {
    Finite(usize),
    Infinite,
}

impl Colength {
    pub fn finite(self) -> Option<usize> {
        match self {
            Colength::Finite(n) => Some(n),
            Colength::Infinite => None,
        }
    }
}

impl Serialize for Colength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Colength::Finite(n) => s.serialize_u64(*n as u64),
            Colength::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

/// `dim_K K[x]_(x) / I`, found as the first `c_N = dim K[x]/(I + m^N)` with
/// `c_{N+1} = c_N`; `Infinite` if this does not happen for `N <= cap`.
pub fn local_colength(ideal: &IdealPresentation, cap: usize) -> Result<Colength> {
    let seq = colength_sequence(ideal, cap + 1)?;
    for n in 1..seq.len() {
        if seq[n] == seq[n - 1] {
            return Ok(Colength::Finite(seq[n - 1]));
        }
    }
    Ok(Colength::Infinite)
}

/// `c_1, c_2, ..., c_len` with `c_N = dim K[x]/(I + m^N)`; stops early once
/// two consecutive values agree (all later values are equal).
pub fn colength_sequence(ideal: &IdealPresentation, len: usize) -> Result<Vec<usize>> {
    if ideal.chart != Chart::AffineAtOrigin {
        return Err(Error::InvalidInput(
            "local colength needs an affine ideal at the origin".into(),
        ));
    }
    let mut dual = DualSpace::new(ideal);
    let mut seq = vec![1usize];
    while seq.len() < len {
        let dim = dual.extend();
        let stable = dim == *seq.last().unwrap();
        seq.push(dim);
        if stable {
            break;
        }
    }
    Ok(seq)
}

type Functional = BTreeMap<Exp, Fe>;

/// The orthogonal `(I + m^{k+1})^⊥` inside the dual of `K[x]/m^{k+1}`,
/// grown one order at a time by integrating the previous basis.
struct DualSpace<'a> {
    ideal: &'a IdealPresentation,
    basis: Vec<Functional>,
}

impl<'a> DualSpace<'a> {
    fn new(ideal: &'a IdealPresentation) -> Self {
        let mut unit = Functional::new();
        unit.insert(Exp::from_elem(0, ideal.nvars), ideal.field.one());
        DualSpace {
            ideal,
            basis: vec![unit],
        }
    }

    fn contract(l: &Functional, var: usize) -> Functional {
        l.iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, &c)| {
                let mut e = e.clone();
                e[var] -= 1;
                (e, c)
            })
            .collect()
    }

    fn integrate(l: &Functional, var: usize) -> Functional {
        l.iter()
            .filter(|(e, _)| e[..var].iter().all(|&x| x == 0))
            .map(|(e, &c)| {
                let mut e = e.clone();
                e[var] += 1;
                (e, c)
            })
            .collect()
    }

    fn pair(l: &Functional, p: &MultiPoly) -> Fe {
        let mut acc = p.field().zero();
        for (e, c) in p.terms() {
            if let Some(&v) = l.get(e) {
                acc += v * *c;
            }
        }
        acc
    }

    /// Adds one order; returns the new dimension.
    fn extend(&mut self) -> usize {
        let n = self.ideal.nvars;
        let s = self.basis.len();
        let field = self.ideal.field;
        let unknowns = n * s;
        let contractions: Vec<Vec<Functional>> = (0..n)
            .map(|v| self.basis.iter().map(|b| Self::contract(b, v)).collect())
            .collect();
        let integrals: Vec<Functional> = (0..n)
            .flat_map(|v| self.basis.iter().map(move |b| Self::integrate(b, v)))
            .collect();

        let mut rows: Vec<Vec<Fe>> = Vec::new();
        // x_a ⌟ (Σ_j μ_{b,j} B_j) = x_b ⌟ (Σ_j μ_{a,j} B_j)
        for a in 0..n {
            for b in (a + 1)..n {
                let mut eqs: BTreeMap<Exp, Vec<Fe>> = BTreeMap::new();
                for j in 0..s {
                    for (e, &c) in &contractions[a][j] {
                        eqs.entry(e.clone())
                            .or_insert_with(|| vec![field.zero(); unknowns])[b * s + j] += c;
                    }
                    for (e, &c) in &contractions[b][j] {
                        eqs.entry(e.clone())
                            .or_insert_with(|| vec![field.zero(); unknowns])[a * s + j] += c;
                    }
                }
                rows.extend(eqs.into_values().filter(|r| r.iter().any(|c| !c.is_zero())));
            }
        }
        for g in &self.ideal.gens {
            let row: Vec<Fe> = integrals.iter().map(|l| Self::pair(l, g)).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
        let solutions = if rows.is_empty() {
            (0..unknowns)
                .map(|i| {
                    let mut v = vec![field.zero(); unknowns];
                    v[i] = field.one();
                    v
                })
                .collect()
        } else {
            Matrix::from_rows(field, &rows).kernel()
        };

        let mut candidates = self.basis.clone();
        for mu in solutions {
            let mut l = Functional::new();
            for (idx, c) in mu.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (e, &v) in &integrals[idx] {
                    let entry = l.entry(e.clone()).or_insert(field.zero());
                    *entry += v * *c;
                }
            }
            l.retain(|_, v| !v.is_zero());
            if !l.is_empty() {
                candidates.push(l);
            }
        }
        self.basis = independent_subset(field, candidates);
        self.basis.len()
    }
}

/// Row-reduced basis of the span of sparse functionals.
fn independent_subset(field: &'static GaloisField, vs: Vec<Functional>) -> Vec<Functional> {
    let mut support: Vec<Exp> = vs.iter().flat_map(|v| v.keys().cloned()).collect();
    support.sort();
    support.dedup();
    let index: HashMap<&Exp, usize> = support.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut ech = Echelon::new(field, support.len());
    let mut out = Vec::new();
    for v in vs {
        let mut row = vec![0u128; support.len()];
        for (e, c) in &v {
            row[index[e]] = c.bits();
        }
        if ech.insert(row) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gf, FieldTower};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use smallvec::smallvec;

    fn var(k: &'static GaloisField, n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(k, n, i)
    }

    fn mono(k: &'static GaloisField, e: &[u16]) -> MultiPoly {
        MultiPoly::monomial(k.one(), Exp::from_slice(e))
    }

    /// Truncated Macaulay oracle: `dim K[x]/(I + m^N)` by brute force.
    fn truncated_colength(ideal: &IdealPresentation, big_n: usize) -> usize {
        let n = ideal.nvars();
        let mut cols: Vec<Exp> = Vec::new();
        for d in 0..big_n {
            cols.extend(monomials_of_degree(n, d));
        }
        let index: HashMap<Exp, usize> = cols
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut ech = Echelon::new(ideal.field(), cols.len());
        for g in ideal.gens() {
            for m in &cols {
                let mut row = vec![0u128; cols.len()];
                for (e, c) in g.terms() {
                    let p: Exp = e.iter().zip(m.iter()).map(|(a, b)| a + b).collect();
                    if exp_degree(&p) < big_n {
                        row[index[&p]] ^= c.bits();
                    }
                }
                ech.insert(row);
            }
        }
        cols.len() - ech.rank()
    }

    #[test]
    fn hilbert_examples() {
        let k = gf(1).unwrap();
        let i =
            IdealPresentation::homogeneous(k, 3, vec![var(k, 3, 0), var(k, 3, 1), var(k, 3, 2)])
                .unwrap();
        assert_eq!(graded_hilbert(&i, 1).unwrap(), 0);
        let zero = IdealPresentation::homogeneous(k, 3, vec![]).unwrap();
        assert_eq!(graded_hilbert(&zero, 2).unwrap(), 6);
        let sq = IdealPresentation::homogeneous(k, 3, vec![mono(k, &[2, 0, 0])]).unwrap();
        assert_eq!(graded_hilbert(&sq, 2).unwrap(), 5);
    }

    #[test]
    fn scheme_length_examples() {
        let k = gf(1).unwrap();
        let pt = IdealPresentation::homogeneous(k, 3, vec![var(k, 3, 1), var(k, 3, 2)]).unwrap();
        assert_eq!(scheme_length(&pt, 10).unwrap(), 1);
        let dbl =
            IdealPresentation::homogeneous(k, 3, vec![mono(k, &[0, 2, 0]), var(k, 3, 2)]).unwrap();
        assert_eq!(scheme_length(&dbl, 10).unwrap(), 2);
        let line = IdealPresentation::homogeneous(k, 3, vec![var(k, 3, 2)]).unwrap();
        assert_eq!(scheme_length(&line, 8), Err(Error::NotZeroDimensional));
    }

    #[test]
    fn generic_cubics_meet_in_nine_points() {
        let k = FieldTower::new(4).unwrap().base();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cubic = |rng: &mut ChaCha8Rng| {
            MultiPoly::from_terms(
                k,
                3,
                monomials_of_degree(3, 3)
                    .into_iter()
                    .map(|e| (e, k.random(rng))),
            )
            .unwrap()
        };
        let i =
            IdealPresentation::homogeneous(k, 3, vec![cubic(&mut rng), cubic(&mut rng)]).unwrap();
        assert_eq!(scheme_length(&i, 12).unwrap(), 9);
    }

    #[test]
    fn colength_examples() {
        let k = gf(1).unwrap();
        let x = |i| var(k, 3, i);
        let reduced = IdealPresentation::affine_at_origin(k, 3, vec![x(0), x(1), x(2)]).unwrap();
        assert_eq!(local_colength(&reduced, 40).unwrap(), Colength::Finite(1));
        let fat = IdealPresentation::affine_at_origin(k, 3, vec![x(0), x(1), mono(k, &[0, 0, 2])])
            .unwrap();
        assert_eq!(local_colength(&fat, 40).unwrap(), Colength::Finite(2));
        let cube = IdealPresentation::affine_at_origin(
            k,
            3,
            vec![
                mono(k, &[2, 0, 0]),
                mono(k, &[0, 2, 0]),
                mono(k, &[0, 0, 2]),
            ],
        )
        .unwrap();
        assert_eq!(local_colength(&cube, 40).unwrap(), Colength::Finite(8));
        let curve = IdealPresentation::affine_at_origin(k, 3, vec![x(0), x(1)]).unwrap();
        assert_eq!(local_colength(&curve, 12).unwrap(), Colength::Infinite);
        let unit = MultiPoly::one(k, 3);
        assert_eq!(
            IdealPresentation::affine_at_origin(k, 3, vec![unit]).unwrap_err(),
            Error::NotAtOrigin
        );
    }

    #[test]
    fn dual_space_matches_truncated_oracle() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..12 {
            // random polynomials of order >= 1 with a few low-degree terms
            let gens: Vec<MultiPoly> = (0..3)
                .map(|g| {
                    let mut p = MultiPoly::zero(k, 3);
                    for d in 1..=4usize {
                        for e in monomials_of_degree(3, d) {
                            let keep =
                                (trial + g + d) % 3 == 0 || rand::Rng::gen_bool(&mut rng, 0.15);
                            if keep {
                                p.add_term(e, k.random(&mut rng));
                            }
                        }
                    }
                    p
                })
                .collect();
            let ideal = IdealPresentation::affine_at_origin(k, 3, gens).unwrap();
            let seq = colength_sequence(&ideal, 7).unwrap();
            for (i, &c) in seq.iter().enumerate() {
                assert_eq!(
                    c,
                    truncated_colength(&ideal, i + 1),
                    "trial {trial}, N={}",
                    i + 1
                );
            }
        }
    }

    #[test]
    fn a_n_colengths() {
        let k = gf(3).unwrap();
        // (y, x, z^n) is the Jacobian-type ideal of x y + z^{n+1}
        for n in 1..12u16 {
            let g = vec![
                var(k, 3, 0),
                var(k, 3, 1),
                MultiPoly::monomial(k.one(), smallvec![0, 0, n]),
            ];
            let ideal = IdealPresentation::affine_at_origin(k, 3, g).unwrap();
            assert_eq!(
                local_colength(&ideal, 40).unwrap(),
                Colength::Finite(n as usize)
            );
        }
    }
}
