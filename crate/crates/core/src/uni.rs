//! Dense univariate polynomials over a single `GF(2^n)`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Embedding, Fe, GaloisField};

/// Coefficients are stored low degree first with no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: &'static GaloisField,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.is_one()) {
                (0, _) => write!(f, "{}", c)?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{}*t", c)?,
                (_, true) => write!(f, "t^{}", i)?,
                (_, false) => write!(f, "{}*t^{}", c, i)?,
            }
        }
        Ok(())
    }
}

impl UniPoly {
    pub fn new(field: &'static GaloisField, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_bits(field: &'static GaloisField, bits: &[u128]) -> Self {
        Self::new(field, bits.iter().map(|&b| field.elem(b)).collect())
    }

    pub fn zero(field: &'static GaloisField) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &'static GaloisField) -> Self {
        Self::constant(field.one())
    }

    pub fn t(field: &'static GaloisField) -> Self {
        Self::monomial(field.one(), 1)
    }

    pub fn constant(c: Fe) -> Self {
        Self::new(c.field(), vec![c])
    }

    pub fn monomial(c: Fe, deg: usize) -> Self {
        let mut coeffs = vec![c.field().zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(c.field(), coeffs)
    }

    /// `∏ (t - r)` over the given roots.
    pub fn from_roots(field: &'static GaloisField, roots: &[Fe]) -> Self {
        roots.iter().fold(Self::one(field), |acc, &r| {
            acc.mul(&Self::new(field, vec![r, field.one()]))
        })
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.last().copied()
    }

    /// Largest `k` with `t^k | self`; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::new(self.field, coeffs)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let mut raw = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let src: Vec<u128> = other.coeffs.iter().map(|c| c.bits()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            self.field
                .axpy_raw(&mut raw[i..i + src.len()], a.bits(), &src);
        }
        Self::from_bits(self.field, &raw)
    }

    pub fn scale(&self, c: Fe) -> UniPoly {
        Self::new(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        (0..e).fold(Self::one(self.field), |acc, _| acc.mul(self))
    }

    pub fn square(&self) -> UniPoly {
        let mut coeffs = vec![self.field.zero(); (2 * self.coeffs.len()).saturating_sub(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.square();
        }
        Self::new(self.field, coeffs)
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(self.field, coeffs)
    }

    /// Exact division by `t^k`, dropping lower terms.
    pub fn shift_down(&self, k: usize) -> UniPoly {
        Self::new(self.field, self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => self.scale(l.inv()),
            None => self.clone(),
        }
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().unwrap().inv().bits();
        let mut r: Vec<u128> = self.coeffs.iter().map(|c| c.bits()).collect();
        if r.len() <= dd {
            return (Self::zero(self.field), self.clone());
        }
        let dv: Vec<u128> = d.coeffs.iter().map(|c| c.bits()).collect();
        let mut q = vec![0u128; r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i] == 0 {
                continue;
            }
            let c = self.field.mul_raw(r[i], lead_inv);
            q[i - dd] = c;
            self.field.axpy_raw(&mut r[i - dd..=i], c, &dv);
        }
        r.truncate(dd);
        (
            Self::from_bits(self.field, &q),
            Self::from_bits(self.field, &r),
        )
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { self.field.zero() })
            .collect();
        Self::new(self.field, coeffs)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, &c| acc * x + c)
    }

    /// `self(t + theta)`.
    pub fn translate(&self, theta: Fe) -> UniPoly {
        let lin = Self::new(self.field, vec![theta, self.field.one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(self.field), |acc, &c| {
                acc.mul(&lin).add(&Self::constant(c))
            })
    }

    /// `t^d · self(1/t)`.
    pub fn reverse(&self, d: usize) -> UniPoly {
        assert!(self.degree().map_or(true, |k| k <= d));
        let mut coeffs = vec![self.field.zero(); d + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c;
        }
        Self::new(self.field, coeffs)
    }

    pub fn embed(&self, emb: &Embedding) -> UniPoly {
        Self::new(
            emb.target(),
            self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        )
    }

    /// True iff every odd-degree coefficient vanishes.
    pub fn is_square(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i % 2 == 0 || c.is_zero())
    }

    /// Square root of a square polynomial.
    pub fn sqrt(&self) -> Option<UniPoly> {
        if !self.is_square() {
            return None;
        }
        let coeffs = self.coeffs.iter().step_by(2).map(|c| c.sqrt()).collect();
        Some(Self::new(self.field, coeffs))
    }

    /// `self^(2^k) mod modulus`.
    pub fn frobenius_mod(&self, k: u32, modulus: &UniPoly) -> UniPoly {
        let mut a = self.rem(modulus);
        for _ in 0..k {
            a = a.square().rem(modulus);
        }
        a
    }

    /// Number of times `t - r` divides `self` (zero polynomial: `u32::MAX`).
    pub fn multiplicity(&self, r: Fe) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Self::new(self.field, vec![r, self.field.one()]);
        let mut p = self.clone();
        let mut e = 0;
        loop {
            let (q, rem) = p.divrem(&lin);
            if !rem.is_zero() {
                return e;
            }
            p = q;
            e += 1;
        }
    }

    /// Distinct roots lying in the coefficient field, sorted.
    pub fn roots_in_field(&self) -> Vec<Fe> {
        if self.is_zero() {
            return Vec::new();
        }
        let field = self.field;
        let mut roots = if field.bits() <= 8 {
            field
                .elements()
                .filter(|&x| self.eval(x).is_zero())
                .collect()
        } else {
            let t = Self::t(field);
            let split = t.frobenius_mod(field.bits(), self).add(&t);
            let g = self.gcd(&split);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_2007);
            let mut out = Vec::new();
            split_linear(&g, &mut rng, &mut out);
            out
        };
        roots.sort();
        roots
    }
}

/// Splits a monic product of distinct linear factors by random trace maps.
fn split_linear(g: &UniPoly, rng: &mut ChaCha8Rng, out: &mut Vec<Fe>) {
    let field = g.field;
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            out.push(g.coeff(0) / g.coeff(1));
            return;
        }
        _ => {}
    }
    loop {
        let a = field.random_nonzero(rng);
        let at = UniPoly::monomial(a, 1).rem(g);
        let mut term = at.clone();
        let mut tr = at;
        for _ in 1..field.bits() {
            term = term.square().rem(g);
            tr = tr.add(&term);
        }
        let h = g.gcd(&tr);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < g.degree().unwrap() {
            let (other, _) = g.divrem(&h);
            split_linear(&h, rng, out);
            split_linear(&other.monic(), rng, out);
            return;
        }
    }
}
