//! Dense exact linear algebra over `GF(2^n)`.
//!
//! Entries are stored as raw coordinate words so the inner loops can use the
//! field's table or carry-less kernels directly.

use crate::field::{Fe, GaloisField};
use crate::uni::UniPoly;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: &'static GaloisField,
    rows: usize,
    cols: usize,
    data: Vec<u128>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over {:?}",
            self.rows, self.cols, self.field
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{:x}", v)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &'static GaloisField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &'static GaloisField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &'static GaloisField, rows: &[Vec<Fe>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, v) in r.iter().enumerate() {
                m.data[i * cols + j] = v.bits();
            }
        }
        m
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.field.elem(self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v.bits();
    }

    pub(crate) fn row(&self, i: usize) -> &[u128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u128] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn set_raw(&mut self, i: usize, j: usize, v: u128) {
        self.data[i * self.cols + j] = v;
    }

    pub(crate) fn get_raw(&self, i: usize, j: usize) -> u128 {
        self.data[i * self.cols + j]
    }

    pub fn embed(&self, emb: &crate::field::Embedding) -> Matrix {
        Matrix {
            field: emb.target(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&v| emb.apply(self.field.elem(v)).bits())
                .collect(),
        }
    }

    pub fn add_scalar_identity(&self, c: Fe) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] ^= c.bits();
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(field: &'static GaloisField, cols: &[Vec<Fe>]) -> Matrix {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    let (src, dst) = (other.row(k).to_vec(), out.row_mut(i));
                    self.field.axpy_raw(dst, a, &src);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, x) in v.iter().enumerate() {
                    acc += self.get(i, j) * *x;
                }
                acc
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get_raw(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv_raw(self.get_raw(r, c)).unwrap();
            f.scale_raw(self.row_mut(r), inv);
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let v = self.get_raw(i, c);
                    if v != 0 {
                        f.axpy_raw(&mut self.row_mut(i)[c..], v, &pivot_row[c..]);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : self · v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, fc);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for i in 0..n {
            aug.row_mut(i)[..n].copy_from_slice(self.row(i));
            aug.data[i * 2 * n + n + i] = 1;
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(self.field, n, n);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&aug.row(i)[n..]);
        }
        Some(out)
    }

    pub fn det(&self) -> Fe {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m.get_raw(i, c) != 0) else {
                return f.zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
            }
            let pv = m.get_raw(c, c);
            det = det * f.elem(pv);
            let inv = f.inv_raw(pv).unwrap();
            let prow = m.row(c).to_vec();
            for i in (c + 1)..n {
                let v = m.get_raw(i, c);
                if v != 0 {
                    f.axpy_raw(&mut m.row_mut(i)[c..], f.mul_raw(v, inv), &prow[c..]);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(t·I - self)` via Hessenberg reduction.
    pub fn charpoly(&self) -> UniPoly {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let n = self.rows;
        let mut h = self.clone();
        // similarity transform to upper Hessenberg form
        for c in 0..n.saturating_sub(2) {
            let Some(p) = ((c + 1)..n).find(|&i| h.get_raw(i, c) != 0) else {
                continue;
            };
            if p != c + 1 {
                for j in 0..n {
                    h.data.swap(p * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = f.inv_raw(h.get_raw(c + 1, c)).unwrap();
            for i in (c + 2)..n {
                let v = h.get_raw(i, c);
                if v == 0 {
                    continue;
                }
                let u = f.mul_raw(v, inv);
                // row_i -= u row_{c+1}; col_{c+1} += u col_i
                let src = h.row(c + 1).to_vec();
                f.axpy_raw(h.row_mut(i), u, &src);
                for r in 0..n {
                    let add = f.mul_raw(u, h.get_raw(r, i));
                    let cur = h.get_raw(r, c + 1);
                    h.set_raw(r, c + 1, cur ^ add);
                }
            }
        }
        // recurrence on leading principal minors
        let mut polys: Vec<UniPoly> = vec![UniPoly::one(f)];
        for k in 0..n {
            let t_minus = UniPoly::new(f, vec![h.get(k, k), f.one()]);
            let mut pk = t_minus.mul(&polys[k]);
            let mut prod = f.one();
            for i in (0..k).rev() {
                prod *= h.get(i + 1, i);
                if prod.is_zero() {
                    break;
                }
                let c = prod * h.get(i, k);
                pk = pk.add(&polys[i].scale(c));
            }
            polys.push(pk);
        }
        polys.pop().unwrap()
    }
}

/// Incrementally built row echelon basis; pivots are the first nonzero
/// column of each row, normalized to one.
pub struct Echelon {
    field: &'static GaloisField,
    ncols: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<Vec<u128>>,
}

impl Echelon {
    pub fn new(field: &'static GaloisField, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            pivot_row: vec![None; ncols],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Eliminates every pivot column of `v`, left to right.
    pub fn reduce(&self, v: &mut [u128]) {
        let f = self.field;
        for j in 0..self.ncols {
            let c = v[j];
            if c == 0 {
                continue;
            }
            if let Some(r) = self.pivot_row[j] {
                f.axpy_raw(&mut v[j..], c, &self.rows[r][j..]);
            }
        }
    }

    /// Adds a row; returns whether it was independent.
    pub fn insert(&mut self, mut v: Vec<u128>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let f = self.field;
        let mut j = 0;
        while j < self.ncols {
            let c = v[j];
            if c != 0 {
                match self.pivot_row[j] {
                    Some(r) => f.axpy_raw(&mut v[j..], c, &self.rows[r][j..]),
                    None => {
                        let inv = f.inv_raw(c).unwrap();
                        f.scale_raw(&mut v[j..], inv);
                        self.pivot_row[j] = Some(self.rows.len());
                        self.rows.push(v);
                        return true;
                    }
                }
            }
            j += 1;
        }
        false
    }

    /// Number of pivots among columns `lo..hi`.
    pub fn pivots_in(&self, lo: usize, hi: usize) -> usize {
        self.pivot_row[lo..hi]
            .iter()
            .filter(|p| p.is_some())
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(k: &'static GaloisField, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let rows: Vec<Vec<Fe>> = (0..n)
            .map(|_| (0..n).map(|_| k.random(rng)).collect())
            .collect();
        Matrix::from_rows(k, &rows)
    }

    #[test]
    fn inverse_roundtrip() {
        let k = gf(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(k, 7, &mut rng);
        let inv = a
            .inverse()
            .expect("random matrix is invertible with high probability");
        assert_eq!(a.mul(&inv), Matrix::identity(k, 7));
    }

    #[test]
    fn kernel_is_annihilated() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<Fe>> = (0..3)
            .map(|_| (0..6).map(|_| k.random(&mut rng)).collect())
            .collect();
        let m = Matrix::from_rows(k, &rows);
        let ker = m.kernel();
        assert_eq!(ker.len() + m.rank(), 6);
        for v in ker {
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn charpoly_vanishes_on_matrix_and_matches_det() {
        let k = gf(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..7 {
            let a = random_matrix(k, n, &mut rng);
            let cp = a.charpoly();
            assert_eq!(cp.degree(), Some(n));
            assert_eq!(cp.coeff(0), a.det());
            // Cayley-Hamilton
            let mut acc = Matrix::zeros(k, n, n);
            let mut pw = Matrix::identity(k, n);
            for i in 0..=n {
                let c = cp.coeff(i);
                for r in 0..n {
                    for s in 0..n {
                        let v = acc.get(r, s) + c * pw.get(r, s);
                        acc.set(r, s, v);
                    }
                }
                pw = pw.mul(&a);
            }
            assert_eq!(acc, Matrix::zeros(k, n, n));
        }
    }

    #[test]
    fn echelon_rank_matches_rref() {
        let k = gf(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows: Vec<Vec<Fe>> = (0..8)
            .map(|_| (0..5).map(|_| k.random(&mut rng)).collect())
            .collect();
        let mut e = Echelon::new(k, 5);
        for r in &rows {
            e.insert(r.iter().map(|x| x.bits()).collect());
        }
        assert_eq!(e.rank(), Matrix::from_rows(k, &rows).rank());
    }
}
