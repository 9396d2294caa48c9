//! Binary extension fields `GF(2^n)` for `n <= 128` and the tower
//! `GF(2^m) ⊂ GF(2^(m·d))` used to approximate an algebraically closed field
//! of characteristic 2.
//!
//! Every field `GF(2^n)` is represented in the polynomial basis of the
//! smallest irreducible polynomial of degree `n` over `GF(2)` with nonzero
//! constant term (smallest when read as a binary integer). Fields are built on
//! first use and live for the rest of the process, so elements can carry a
//! `&'static` reference to their field and implement the arithmetic operators
//! directly.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Largest supported extension degree over `GF(2)`.
pub const MAX_FIELD_BITS: u32 = 128;

/// Fields up to this size use log/antilog tables.
const TABLE_BITS: u32 = 16;

/// `GF(2^n)`.
pub struct GaloisField {
    bits: u32,
    modulus: u128,
    mask: u128,
    tables: Option<LogTables>,
}

struct LogTables {
    log: Vec<u32>,
    exp: Vec<u16>,
    order: u32,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.bits)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for GaloisField {}

const EMPTY_SLOT: OnceLock<GaloisField> = OnceLock::new();
static REGISTRY: [OnceLock<GaloisField>; MAX_FIELD_BITS as usize + 1] =
    [EMPTY_SLOT; MAX_FIELD_BITS as usize + 1];

/// Returns the canonical field `GF(2^bits)`.
pub fn gf(bits: u32) -> Result<&'static GaloisField, FieldError> {
    if bits == 0 || bits > MAX_FIELD_BITS {
        return Err(FieldError::UnsupportedDegree(bits));
    }
    Ok(REGISTRY[bits as usize].get_or_init(|| GaloisField::build(bits)))
}

impl GaloisField {
    fn build(bits: u32) -> Self {
        let modulus = smallest_irreducible(bits);
        let mut field = GaloisField {
            bits,
            modulus,
            mask: mask_for(bits),
            tables: None,
        };
        if bits <= TABLE_BITS {
            field.tables = Some(LogTables::build(&field));
        }
        field
    }

    /// Extension degree over `GF(2)`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of elements, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        if self.bits == 128 {
            u128::MAX
        } else {
            1u128 << self.bits
        }
    }

    /// Defining polynomial as a bit pattern including the leading term, split
    /// as `(degree, lower coefficients)`.
    pub fn defining_polynomial(&self) -> (u32, u128) {
        (self.bits, self.modulus)
    }

    pub fn zero(&'static self) -> Fe {
        Fe {
            bits: 0,
            field: self,
        }
    }

    pub fn one(&'static self) -> Fe {
        Fe {
            bits: 1,
            field: self,
        }
    }

    /// The class of `x` in `GF(2)[x]/(f)`.
    pub fn generator(&'static self) -> Fe {
        Fe {
            bits: self.reduce_small(2),
            field: self,
        }
    }

    pub fn from_bits(&'static self, bits: u128) -> Result<Fe, FieldError> {
        if bits & !self.mask != 0 {
            return Err(FieldError::OutOfRange {
                bits: self.bits,
                value: bits,
            });
        }
        Ok(Fe { bits, field: self })
    }

    pub(crate) fn elem(&'static self, bits: u128) -> Fe {
        debug_assert_eq!(bits & !self.mask, 0);
        Fe { bits, field: self }
    }

    pub fn random<R: Rng + ?Sized>(&'static self, rng: &mut R) -> Fe {
        Fe {
            bits: rng.gen::<u128>() & self.mask,
            field: self,
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&'static self, rng: &mut R) -> Fe {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// All elements in increasing bit order. Only sensible for small fields.
    pub fn elements(&'static self) -> impl Iterator<Item = Fe> {
        assert!(self.bits <= 24, "refusing to enumerate GF(2^{})", self.bits);
        (0..(1u128 << self.bits)).map(move |b| self.elem(b))
    }

    fn reduce_small(&self, v: u128) -> u128 {
        if self.bits == 1 {
            // x ≡ 1 mod x + 1
            return (v.count_ones() & 1) as u128;
        }
        v & self.mask
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u128, b: u128) -> u128 {
        if a == 0 || b == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u128;
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: u128, b: u128) -> u128 {
        if self.bits <= 64 {
            self.reduce128(clmul64(a as u64, b as u64))
        } else {
            let (hi, lo) = clmul128(a, b);
            self.reduce256(hi, lo)
        }
    }

    fn reduce128(&self, mut p: u128) -> u128 {
        let n = self.bits;
        loop {
            let top = p >> n;
            if top == 0 {
                return p;
            }
            p = (p & self.mask) ^ clmul64(top as u64, self.modulus as u64);
        }
    }

    fn reduce256(&self, mut hi: u128, mut lo: u128) -> u128 {
        let n = self.bits;
        loop {
            let top = if n == 128 {
                hi
            } else {
                (hi << (128 - n)) | (lo >> n)
            };
            if top == 0 {
                return lo;
            }
            let (ph, pl) = clmul128(top, self.modulus);
            hi = ph;
            lo = (lo & self.mask) ^ pl;
        }
    }

    #[inline]
    pub(crate) fn square_raw(&self, a: u128) -> u128 {
        self.mul_raw(a, a)
    }

    pub(crate) fn pow_raw(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.square_raw(base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv_raw(&self, a: u128) -> Option<u128> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.tables {
            let l = t.log[a as usize];
            return Some(t.exp[((t.order - l) % t.order) as usize] as u128);
        }
        // a^(2^n - 2) = prod_{i=1}^{n-1} a^(2^i)
        let mut s = a;
        let mut acc = 1u128;
        for _ in 1..self.bits {
            s = self.square_raw(s);
            acc = self.mul_raw(acc, s);
        }
        Some(acc)
    }

    /// Inverse Frobenius: the unique square root.
    pub(crate) fn sqrt_raw(&self, a: u128) -> u128 {
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            // log(a) * 2^(n-1) mod (2^n - 1)
            let half = (1u64 << (self.bits - 1)) % t.order as u64;
            let l = (t.log[a as usize] as u64 * half) % t.order as u64;
            return t.exp[l as usize] as u128;
        }
        let mut s = a;
        for _ in 1..self.bits {
            s = self.square_raw(s);
        }
        s
    }

    /// `dst[i] += c * src[i]` on raw coefficient slices.
    #[inline]
    pub(crate) fn axpy_raw(&self, dst: &mut [u128], c: u128, src: &[u128]) {
        if c == 0 {
            return;
        }
        if let Some(t) = &self.tables {
            let lc = t.log[c as usize];
            for (d, &s) in dst.iter_mut().zip(src) {
                if s != 0 {
                    *d ^= t.exp[(lc + t.log[s as usize]) as usize] as u128;
                }
            }
        } else {
            for (d, &s) in dst.iter_mut().zip(src) {
                if s != 0 {
                    *d ^= self.mul_slow(c, s);
                }
            }
        }
    }

    /// `row[i] *= c` on a raw slice.
    pub(crate) fn scale_raw(&self, row: &mut [u128], c: u128) {
        if c == 1 {
            return;
        }
        for v in row.iter_mut() {
            *v = self.mul_raw(*v, c);
        }
    }
}

impl LogTables {
    fn build(field: &GaloisField) -> Self {
        let order = ((1u64 << field.bits) - 1) as u32;
        let g = primitive_element(field);
        let mut exp = vec![0u16; 2 * order as usize + 1];
        let mut log = vec![0u32; order as usize + 1];
        let mut x = 1u128;
        for i in 0..order {
            exp[i as usize] = x as u16;
            log[x as usize] = i;
            x = field.mul_slow(x, g);
        }
        for i in order..(2 * order + 1) {
            exp[i as usize] = exp[(i - order) as usize];
        }
        LogTables { log, exp, order }
    }
}

fn mask_for(bits: u32) -> u128 {
    if bits == 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

fn primitive_element(field: &GaloisField) -> u128 {
    let order = (1u64 << field.bits) - 1;
    if order == 1 {
        return 1;
    }
    let primes = prime_factors(order);
    (2u128..)
        .find(|&g| {
            primes
                .iter()
                .all(|&p| pow_slow(field, g, (order / p) as u128) != 1)
        })
        .expect("multiplicative group is cyclic")
}

fn pow_slow(field: &GaloisField, a: u128, mut e: u128) -> u128 {
    let mut base = a;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = field.mul_slow(acc, base);
        }
        base = field.mul_slow(base, base);
        e >>= 1;
    }
    acc
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest `x^n + r` (as an integer) that is irreducible over GF(2) with
/// nonzero constant term.
fn smallest_irreducible(n: u32) -> u128 {
    let mut r = 1u128;
    loop {
        if is_irreducible(n, r) {
            return r;
        }
        r += 2;
    }
}

/// Rabin's test for `x^n + r`.
fn is_irreducible(n: u32, r: u128) -> bool {
    let ring = GaloisField {
        bits: n,
        modulus: r,
        mask: mask_for(n),
        tables: None,
    };
    let x = if n == 1 { r & 1 } else { 2u128 };
    let frob = |mut a: u128, k: u32| {
        for _ in 0..k {
            a = ring.mul_slow(a, a);
        }
        a
    };
    if frob(x, n) != x {
        return false;
    }
    let f = Poly256::with_leading(n, r);
    for p in prime_factors(n as u64) {
        let h = frob(x, n / p as u32) ^ x;
        if Poly256::from_u128(h).gcd(f).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// GF(2)[x] polynomials of degree < 256, used only for irreducibility tests.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Poly256 {
    hi: u128,
    lo: u128,
}

impl Poly256 {
    fn from_u128(v: u128) -> Self {
        Poly256 { hi: 0, lo: v }
    }

    fn with_leading(n: u32, r: u128) -> Self {
        let mut p = Poly256::from_u128(r);
        if n == 128 {
            p.hi |= 1;
        } else {
            p.lo |= 1u128 << n;
        }
        p
    }

    fn degree(&self) -> Option<u32> {
        if self.hi != 0 {
            Some(255 - self.hi.leading_zeros())
        } else if self.lo != 0 {
            Some(127 - self.lo.leading_zeros())
        } else {
            None
        }
    }

    fn shl(&self, s: u32) -> Self {
        if s == 0 {
            *self
        } else if s >= 128 {
            Poly256 {
                hi: self.lo << (s - 128),
                lo: 0,
            }
        } else {
            Poly256 {
                hi: (self.hi << s) | (self.lo >> (128 - s)),
                lo: self.lo << s,
            }
        }
    }

    fn xor(&self, o: &Self) -> Self {
        Poly256 {
            hi: self.hi ^ o.hi,
            lo: self.lo ^ o.lo,
        }
    }

    fn rem(mut self, b: &Self) -> Self {
        let db = b.degree().expect("division by zero polynomial");
        while let Some(da) = self.degree() {
            if da < db {
                break;
            }
            self = self.xor(&b.shl(da - db));
        }
        self
    }

    fn gcd(self, other: Self) -> Self {
        let (mut a, mut b) = (self, other);
        while b.degree().is_some() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

/// Carry-less 64x64 -> 128 multiplication.
#[inline]
pub(crate) fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the feature was detected at runtime.
            return unsafe { clmul64_hw(a, b) };
        }
    }
    clmul64_sw(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn clmul64_hw(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_set_epi64x, _mm_storeu_si128};
    let x = _mm_set_epi64x(0, a as i64);
    let y = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(x, y, 0);
    let mut out = [0u64; 2];
    _mm_storeu_si128(out.as_mut_ptr() as *mut _, r);
    (out[0] as u128) | ((out[1] as u128) << 64)
}

pub(crate) fn clmul64_sw(a: u64, b: u64) -> u128 {
    let a = a as u128;
    let mut table = [0u128; 16];
    for i in 1..16usize {
        let mut v = 0u128;
        for j in 0..4 {
            if i >> j & 1 == 1 {
                v ^= a << j;
            }
        }
        table[i] = v;
    }
    let mut r = 0u128;
    for i in (0..16).rev() {
        r <<= 4;
        r ^= table[((b >> (4 * i)) & 0xf) as usize];
    }
    r
}

/// Carry-less 128x128 -> 256 multiplication, returned as `(hi, lo)`.
pub(crate) fn clmul128(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let lo = clmul64(a0, b0);
    let hi = clmul64(a1, b1);
    let mid = clmul64(a0, b1) ^ clmul64(a1, b0);
    (hi ^ (mid >> 64), lo ^ (mid << 64))
}

/// An element of some `GF(2^n)`.
#[derive(Clone, Copy)]
pub struct Fe {
    bits: u128,
    field: &'static GaloisField,
}

impl Fe {
    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    /// Coordinates in the polynomial basis, bit `i` = coefficient of `x^i`.
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_one(&self) -> bool {
        self.bits == 1
    }

    pub fn square(self) -> Fe {
        self.field.elem(self.field.square_raw(self.bits))
    }

    pub fn pow(self, e: u128) -> Fe {
        self.field.elem(self.field.pow_raw(self.bits, e))
    }

    pub fn checked_inv(self) -> Option<Fe> {
        self.field.inv_raw(self.bits).map(|b| self.field.elem(b))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self) -> Fe {
        self.checked_inv().expect("inverse of zero")
    }

    /// The unique square root.
    pub fn sqrt(self) -> Fe {
        self.field.elem(self.field.sqrt_raw(self.bits))
    }

    /// `self^(2^k)`.
    pub fn frobenius(self, k: u32) -> Fe {
        let mut b = self.bits;
        for _ in 0..(k % self.field.bits) {
            b = self.field.square_raw(b);
        }
        self.field.elem(b)
    }

    /// The unique `x` with `x^(2^k) = self`.
    pub fn root_2k(self, k: u32) -> Fe {
        let mut b = self.bits;
        for _ in 0..(k % self.field.bits) {
            b = self.field.sqrt_raw(b);
        }
        self.field.elem(b)
    }

    /// Lower-case hexadecimal of the coordinate bits.
    pub fn to_hex(&self) -> String {
        format!("{:x}", self.bits)
    }

    fn check(&self, other: &Fe) {
        debug_assert_eq!(
            self.field.bits, other.field.bits,
            "mixing elements of different fields"
        );
    }
}

impl PartialEq for Fe {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.field.bits == other.field.bits
    }
}

impl Eq for Fe {}

impl Hash for Fe {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.bits.hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for Fe {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fe {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.field.bits, self.bits).cmp(&(other.field.bits, other.bits))
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:x}@GF(2^{})", self.bits, self.field.bits)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.bits)
    }
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        self.field.elem(self.bits ^ rhs.bits)
    }
}

impl Sub for Fe {
    type Output = Fe;
    fn sub(self, rhs: Fe) -> Fe {
        self + rhs
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        self
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        self.field.elem(self.field.mul_raw(self.bits, rhs.bits))
    }
}

impl Div for Fe {
    type Output = Fe;
    fn div(self, rhs: Fe) -> Fe {
        self * rhs.inv()
    }
}

impl AddAssign for Fe {
    fn add_assign(&mut self, rhs: Fe) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fe {
    fn sub_assign(&mut self, rhs: Fe) {
        *self = *self + rhs;
    }
}

impl MulAssign for Fe {
    fn mul_assign(&mut self, rhs: Fe) {
        *self = *self * rhs;
    }
}

/// A field homomorphism `GF(2^a) -> GF(2^b)`, `a | b`, stored as the images
/// of the polynomial basis.
pub struct Embedding {
    from: &'static GaloisField,
    to: &'static GaloisField,
    images: Vec<u128>,
    // echelon of the images: (pivot bit, vector, source combination)
    echelon: Vec<(u32, u128, u128)>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.from, self.to)
    }
}

impl Embedding {
    pub fn source(&self) -> &'static GaloisField {
        self.from
    }

    pub fn target(&self) -> &'static GaloisField {
        self.to
    }

    pub fn apply(&self, a: Fe) -> Fe {
        debug_assert_eq!(a.field.bits, self.from.bits);
        let mut out = 0u128;
        let mut b = a.bits;
        while b != 0 {
            let i = b.trailing_zeros();
            out ^= self.images[i as usize];
            b &= b - 1;
        }
        self.to.elem(out)
    }

    /// The element of the source mapping to `b`, if `b` lies in the image.
    pub fn preimage(&self, b: Fe) -> Option<Fe> {
        debug_assert_eq!(b.field.bits, self.to.bits);
        let mut v = b.bits;
        let mut combo = 0u128;
        for &(bit, row, c) in &self.echelon {
            if v >> bit & 1 == 1 {
                v ^= row;
                combo ^= c;
            }
        }
        (v == 0).then(|| self.from.elem(combo))
    }

    fn new(from: &'static GaloisField, to: &'static GaloisField, images: Vec<u128>) -> Self {
        let mut echelon: Vec<(u32, u128, u128)> = Vec::new();
        for (i, &img) in images.iter().enumerate() {
            let mut v = img;
            let mut c = 1u128 << i;
            for &(bit, row, rc) in &echelon {
                if v >> bit & 1 == 1 {
                    v ^= row;
                    c ^= rc;
                }
            }
            let bit = 127 - v.leading_zeros();
            for e in echelon.iter_mut() {
                if e.1 >> bit & 1 == 1 {
                    e.1 ^= v;
                    e.2 ^= c;
                }
            }
            echelon.push((bit, v, c));
        }
        Embedding {
            from,
            to,
            images,
            echelon,
        }
    }

    fn identity(field: &'static GaloisField) -> Self {
        Self::new(field, field, (0..field.bits).map(|i| 1u128 << i).collect())
    }
}

type EmbeddingCache = Mutex<HashMap<(u32, u32), Arc<Embedding>>>;

fn embedding_cache() -> &'static EmbeddingCache {
    static CACHE: OnceLock<EmbeddingCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The canonical embedding `GF(2^a) -> GF(2^b)`: the generator of the source
/// is sent to the smallest root (as an integer) of its defining polynomial
/// for which the embedding restricts to the canonical embeddings of every
/// subfield. Compositions of canonical embeddings are canonical.
pub fn canonical_embedding(
    from: &'static GaloisField,
    to: &'static GaloisField,
) -> Result<Arc<Embedding>, FieldError> {
    if to.bits % from.bits != 0 {
        return Err(FieldError::NotASubfield {
            from: from.bits,
            to: to.bits,
        });
    }
    let key = (from.bits, to.bits);
    if let Some(e) = embedding_cache().lock().unwrap().get(&key) {
        return Ok(e.clone());
    }
    let emb = if from.bits == to.bits {
        Embedding::identity(from)
    } else {
        let (n, r) = from.defining_polynomial();
        let mut coeffs: Vec<Fe> = (0..n).map(|i| to.elem((r >> i) & 1)).collect();
        coeffs.push(to.one());
        let f = crate::uni::UniPoly::new(to, coeffs);
        let powers = |beta: Fe| {
            let mut images = Vec::with_capacity(n as usize);
            let mut p = to.one();
            for _ in 0..n {
                images.push(p.bits);
                p *= beta;
            }
            images
        };
        let mut subfields = Vec::new();
        for p in prime_factors(from.bits as u64) {
            let sub = gf(from.bits / p as u32)?;
            let g = sub.generator();
            subfields.push((
                canonical_embedding(sub, from)?.apply(g),
                canonical_embedding(sub, to)?.apply(g),
            ));
        }
        let images = f
            .roots_in_field()
            .into_iter()
            .map(powers)
            .find(|images| {
                subfields.iter().all(|&(x, y)| {
                    let mut out = 0u128;
                    let mut b = x.bits;
                    while b != 0 {
                        out ^= images[b.trailing_zeros() as usize];
                        b &= b - 1;
                    }
                    out == y.bits
                })
            })
            .expect("a root compatible with all subfields exists");
        Embedding::new(from, to, images)
    };
    let emb = Arc::new(emb);
    embedding_cache().lock().unwrap().insert(key, emb.clone());
    Ok(emb)
}

/// The tower `GF(2^m) ⊂ GF(2^(2m)) ⊂ ...`; level `d` is `GF(2^(m·d))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldTower {
    m: u32,
}

impl FieldTower {
    pub fn new(m: u32) -> Result<Self, FieldError> {
        if !(1..=32).contains(&m) {
            return Err(FieldError::TowerExponent(m));
        }
        Ok(FieldTower { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn base(&self) -> &'static GaloisField {
        gf(self.m).expect("validated exponent")
    }

    /// Highest level representable with the fixed-width element type.
    pub fn max_level(&self) -> u32 {
        MAX_FIELD_BITS / self.m
    }

    pub fn level(&self, d: u32) -> Result<&'static GaloisField, FieldError> {
        if d == 0 || d > self.max_level() {
            return Err(FieldError::LevelTooLarge {
                m: self.m,
                level: d,
            });
        }
        gf(self.m * d)
    }

    /// Level of a field belonging to this tower.
    pub fn level_of(&self, field: &GaloisField) -> Option<u32> {
        (field.bits % self.m == 0).then_some(field.bits / self.m)
    }

    /// Canonical embedding from level `from` into level `to` (`from | to`).
    pub fn embedding(&self, from: u32, to: u32) -> Result<Arc<Embedding>, FieldError> {
        if to % from != 0 {
            return Err(FieldError::NotASubfield {
                from: self.m * from,
                to: self.m * to,
            });
        }
        canonical_embedding(self.level(from)?, self.level(to)?)
    }

    /// Frobenius of the base field, `x -> x^(2^m)`.
    pub fn base_frobenius(&self, a: Fe) -> Fe {
        a.frobenius(self.m)
    }

    /// Number of distinct conjugates of `a` over the base field.
    pub fn orbit_size(&self, a: Fe) -> u32 {
        let mut k = 1;
        let mut b = a.frobenius(self.m);
        while b != a {
            b = b.frobenius(self.m);
            k += 1;
        }
        k
    }

    /// Rewrites a vector of elements of one level in the smallest level
    /// containing all of them.
    pub fn descend(&self, v: &[Fe]) -> Option<(u32, Vec<Fe>)> {
        let level = self.level_of(v.first()?.field())?;
        let mut e = 1;
        for &c in v {
            let k = self.orbit_size(c);
            e = e * k / gcd(e, k);
        }
        let emb = self.embedding(e, level).ok()?;
        let out = v
            .iter()
            .map(|&c| emb.preimage(c))
            .collect::<Option<Vec<_>>>()?;
        Some((e, out))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
