//! Sparse multivariate polynomials over `GF(2^n)`.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Embedding, Fe, GaloisField};

pub type Exp = SmallVec<[u16; 4]>;

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: &'static GaloisField,
    nvars: usize,
    terms: BTreeMap<Exp, Fe>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| match p {
                    1 => format!("x{}", i),
                    _ => format!("x{}^{}", i, p),
                })
                .collect();
            match (c.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", mono.join("*"))?,
                (false, true) => write!(f, "{}", c)?,
                (false, false) => write!(f, "{}*{}", c, mono.join("*"))?,
            }
        }
        Ok(())
    }
}

pub fn exp_degree(e: &[u16]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

impl MultiPoly {
    pub fn zero(field: &'static GaloisField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Fe, nvars: usize) -> Self {
        let mut p = Self::zero(c.field(), nvars);
        p.add_term(Exp::from_elem(0, nvars), c);
        p
    }

    pub fn one(field: &'static GaloisField, nvars: usize) -> Self {
        Self::constant(field.one(), nvars)
    }

    pub fn var(field: &'static GaloisField, nvars: usize, i: usize) -> Self {
        let mut e = Exp::from_elem(0, nvars);
        e[i] = 1;
        Self::monomial(field.one(), e)
    }

    pub fn monomial(c: Fe, exp: impl Into<Exp>) -> Self {
        let exp = exp.into();
        let mut p = Self::zero(c.field(), exp.len());
        p.add_term(exp, c);
        p
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(field: &'static GaloisField, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exp, Fe)>,
    {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Incompatible);
            }
            if c.field().bits() != field.bits() {
                return Err(Error::Incompatible);
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Fe)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u16]) -> Fe {
        self.terms.get(exp).copied().unwrap_or(self.field.zero())
    }

    pub fn add_term(&mut self, exp: Exp, c: Fe) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| exp_degree(e)).max()
    }

    /// Lowest degree of a term.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|e| exp_degree(e)).min()
    }

    /// Common degree of all terms, if the polynomial is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|e| exp_degree(e));
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn homogeneous_part(&self, d: usize) -> MultiPoly {
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| exp_degree(e) == d)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: Fe) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.field, self.nvars);
        }
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &a)| (e.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.field, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exp = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }

    pub fn square(&self) -> MultiPoly {
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|x| 2 * x).collect(), c.square()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Square root, if every exponent is even.
    pub fn sqrt(&self) -> Option<MultiPoly> {
        if self.terms.keys().any(|e| e.iter().any(|x| x % 2 == 1)) {
            return None;
        }
        Some(MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|x| x / 2).collect(), c.sqrt()))
                .collect(),
        })
    }

    pub fn partial(&self, var: usize) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(self.field, self.nvars);
        for (e, c) in &self.terms {
            if e[var] % 2 == 1 {
                let mut d = e.clone();
                d[var] -= 1;
                out.add_term(d, *c);
            }
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.nvars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Whether `Σ x_i ∂_i F` vanishes identically.
    pub fn euler_check(&self) -> bool {
        let mut acc = Self::zero(self.field, self.nvars);
        for (i, p) in self.gradient().iter().enumerate() {
            acc = acc.add(&Self::var(self.field, self.nvars, i).mul(p));
        }
        acc.is_zero()
    }

    pub fn eval(&self, point: &[Fe]) -> Fe {
        debug_assert_eq!(point.len(), self.nvars);
        let mut powers: Vec<Vec<Fe>> = Vec::with_capacity(self.nvars);
        for (i, &x) in point.iter().enumerate() {
            let maxe = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
            let mut row = Vec::with_capacity(maxe + 1);
            let mut p = self.field.one();
            for _ in 0..=maxe {
                row.push(p);
                p *= x;
            }
            powers.push(row);
        }
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                t *= powers[i][k as usize];
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `x_i -> subs[i]`.
    pub fn compose(&self, subs: &[MultiPoly]) -> MultiPoly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|s| vec![Self::one(self.field, nv), s.clone()])
            .collect();
        let mut out = Self::zero(self.field, nv);
        for (e, c) in &self.terms {
            let mut t = Self::constant(*c, nv);
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&cache[i][k]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Coefficients mapped through a field embedding.
    pub fn embed(&self, emb: &Embedding) -> MultiPoly {
        MultiPoly {
            field: emb.target(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.clone(), emb.apply(c)))
                .collect(),
        }
    }

    /// Inserts `extra` new variables at position `at`.
    pub fn insert_vars(&self, at: usize, extra: usize) -> MultiPoly {
        MultiPoly {
            field: self.field,
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut n: Exp = e[..at].iter().copied().collect();
                    n.extend(std::iter::repeat(0).take(extra));
                    n.extend(e[at..].iter().copied());
                    (n, c)
                })
                .collect(),
        }
    }

    /// Sets variable `var` to 1 and removes it.
    pub fn dehomogenize(&self, var: usize) -> MultiPoly {
        let mut out = Self::zero(self.field, self.nvars - 1);
        for (e, &c) in &self.terms {
            let n: Exp = e
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != var)
                .map(|(_, &x)| x)
                .collect();
            out.add_term(n, c);
        }
        out
    }
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// decreasing graded-reverse-lexicographic order.
pub fn monomials_of_degree(n: usize, d: usize) -> Vec<Exp> {
    let mut out = Vec::new();
    let mut cur = Exp::from_elem(0, n);
    fn rec(i: usize, left: usize, cur: &mut Exp, out: &mut Vec<Exp>) {
        let n = cur.len();
        if i == n - 1 {
            cur[i] = left as u16;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k as u16;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Exp::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out
}

/// Graded reverse lexicographic comparison.
pub fn grevlex_cmp(a: &[u16], b: &[u16]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match exp_degree(a).cmp(&exp_degree(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
