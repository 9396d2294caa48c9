//! Degree accounting for the Gauss map, the dual-plane test, and incidence
//! combinatorics of singular point sets.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, FieldError, Result};
use crate::field::{Fe, FieldTower, GaloisField};
use crate::linalg::Matrix;
use crate::poly::monomials_of_degree;
use crate::singularities::{QuarticSurface, SingularLocusReport};
use crate::solve::lcm;

/// Bézout mass of `(F, F_1, F_2)` for a quartic.
pub const BEZOUT_MASS: i64 = 36;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeLedger {
    pub defect_sum: i64,
    /// `deg(γ)·deg(X∨) = 36 − defect_sum`.
    pub product: i64,
    pub nu: i64,
    pub b: i64,
    pub u: i64,
    /// `product <= 36 − (2ν + b + 6u)`.
    pub bound_ok: bool,
    /// Transversality of the auxiliary lines is assumed, never certified.
    pub transversality_certified: bool,
}

pub fn degree_ledger(report: &SingularLocusReport) -> Result<DegreeLedger> {
    if !report.complete {
        return Err(Error::Certification(
            "singular locus report is incomplete".into(),
        ));
    }
    let defect_sum = report
        .defect_sum()
        .ok_or_else(|| Error::Certification("a Gaussian defect is infinite".into()))?
        as i64;
    let (nu, b, u) = (report.nu as i64, report.b as i64, report.u as i64);
    let product = BEZOUT_MASS - defect_sum;
    Ok(DegreeLedger {
        defect_sum,
        product,
        nu,
        b,
        u,
        bound_ok: product <= BEZOUT_MASS - (2 * nu + b + 6 * u),
        transversality_certified: false,
    })
}

/// Basis of `{c ∈ K^4 : Σ c_i ∂_i F = 0}`.
pub fn dual_plane_kernel(x: &QuarticSurface) -> Vec<Vec<Fe>> {
    let f = x.equation();
    let field = x.field();
    let cubics = monomials_of_degree(4, 3);
    let cols: Vec<Vec<Fe>> = f
        .gradient()
        .iter()
        .map(|g| cubics.iter().map(|e| g.coeff(e)).collect())
        .collect();
    Matrix::from_columns(field, &cols).kernel()
}

/// `deg γ` when the dual is contained in a plane, i.e. `deg X∨ = 1`.
pub fn gauss_degree_if_dual_plane(ledger: &DegreeLedger, kernel_dim: usize) -> Option<i64> {
    (kernel_dim == 1).then_some(ledger.product)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineIncidence {
    /// Indices of the points on the line.
    pub points: Vec<usize>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigurationReport {
    pub num_points: usize,
    pub lines: Vec<LineIncidence>,
    pub max_collinear: usize,
    pub max_coplanar: usize,
    /// Pairs whose joining line contains no third point.
    pub companion_pairs: Vec<(usize, usize)>,
    pub has_point_with_two_companions: bool,
    pub four_collinear: bool,
    pub seven_coplanar: bool,
}

impl ConfigurationReport {
    /// No 4 collinear points and at most 6 in a plane.
    pub fn violations_free(&self) -> bool {
        !self.four_collinear && !self.seven_coplanar
    }
}

fn rank_of(points: &[&Vec<Fe>]) -> usize {
    let field = points[0][0].field();
    let rows: Vec<Vec<Fe>> = points.iter().map(|p| (*p).clone()).collect();
    Matrix::from_rows(field, &rows).rank()
}

/// Incidence structure of a set of distinct points of `P^3`, all given in
/// one field.
pub fn configuration_report(points: &[Vec<Fe>]) -> Result<ConfigurationReport> {
    if let Some(p) = points.first() {
        let field = p[0].field();
        if points
            .iter()
            .any(|q| q.len() != 4 || q.iter().any(|c| c.field() != field))
        {
            return Err(Error::Incompatible);
        }
    }
    incidence(points.len(), |idx, s| {
        let rows: Vec<&Vec<Fe>> = idx.iter().map(|&i| &points[i]).collect();
        Ok(rank_of(&rows) <= s)
    })
}

/// Like [`configuration_report`], for points whose coordinates lie in
/// different levels of `tower`. No common field is needed.
pub fn configuration_report_in(
    tower: &FieldTower,
    points: &[Vec<Fe>],
) -> Result<ConfigurationReport> {
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let level = p
            .first()
            .and_then(|c| tower.level_of(c.field()))
            .ok_or(Error::Incompatible)?;
        if p.len() != 4 || p.iter().any(|c| c.field() != p[0].field()) {
            return Err(Error::Incompatible);
        }
        rows.push((level, p.clone()));
    }
    let common = rows.iter().fold(1, |l, r| lcm(l, r.0));
    if common <= tower.max_level() {
        let mut embedded = Vec::with_capacity(rows.len());
        for (level, p) in &rows {
            let emb = tower.embedding(*level, common)?;
            embedded.push(p.iter().map(|&c| emb.apply(c)).collect());
        }
        return configuration_report(&embedded);
    }
    incidence(rows.len(), |idx, s| {
        rank_at_most(
            tower,
            tower.max_level(),
            idx.iter().map(|&i| rows[i].clone()).collect(),
            s,
        )
    })
}

/// Whether rows from several tower levels span at most `s` dimensions over
/// their compositum.
fn rank_at_most(tower: &FieldTower, cap: u32, rows: Vec<(u32, Vec<Fe>)>, s: usize) -> Result<bool> {
    let common = rows.iter().fold(1, |l, r| lcm(l, r.0));
    if common <= cap {
        let field = tower.level(common)?;
        let mut m = Vec::with_capacity(rows.len());
        for (level, p) in &rows {
            let emb = tower.embedding(*level, common)?;
            m.push(p.iter().map(|&c| emb.apply(c)).collect::<Vec<_>>());
        }
        return Ok(Matrix::from_rows(field, &m).rank() <= s);
    }
    let k = s + 1;
    let width = rows.first().map_or(0, |r| r.1.len());
    let perms = permutations(k);
    for rs in subsets(rows.len(), k) {
        for cs in subsets(width, k) {
            // no signs in characteristic 2
            let terms = perms
                .iter()
                .map(|perm| {
                    rs.iter()
                        .zip(perm)
                        .map(|(&r, &c)| (rows[r].0, rows[r].1[cs[c]]))
                        .collect()
                })
                .collect();
            if !vanishes(tower, cap, terms)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..k {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Whether a sum of products of elements from several tower levels is zero
/// in their compositum.
fn vanishes(tower: &FieldTower, cap: u32, terms: Vec<Vec<(u32, Fe)>>) -> Result<bool> {
    let levels: BTreeSet<u32> = terms.iter().flatten().map(|f| f.0).collect();
    let common = levels.iter().fold(1, |l, &d| lcm(l, d));
    if common <= cap {
        let field = tower.level(common)?;
        let mut sum = field.zero();
        for t in &terms {
            let mut p = field.one();
            for &(d, x) in t {
                p = p * tower.embedding(d, common)?.apply(x);
            }
            sum = sum + p;
        }
        return Ok(sum.is_zero());
    }
    for &d in &levels {
        let rest = levels
            .iter()
            .filter(|&&e| e != d)
            .fold(1, |l, &e| lcm(l, e));
        if rest == common {
            continue;
        }
        // level d and the rest are linearly disjoint over their meet
        let g = d * rest / lcm(d, rest);
        let basis = SubfieldBasis::new(tower, d, g)?;
        let one = tower.level(d)?.one();
        let mut parts: Vec<Vec<Vec<(u32, Fe)>>> = vec![Vec::new(); basis.t];
        for t in &terms {
            let x = t.iter().filter(|f| f.0 == d).fold(one, |p, f| p * f.1);
            let others: Vec<(u32, Fe)> = t.iter().filter(|f| f.0 != d).copied().collect();
            for (l, y) in basis.coords(x)?.into_iter().enumerate() {
                if !y.is_zero() {
                    let mut nt = others.clone();
                    nt.push((g, y));
                    parts[l].push(nt);
                }
            }
        }
        for part in parts {
            if !vanishes(tower, cap, part)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    Err(FieldError::LevelTooLarge {
        m: tower.m(),
        level: common,
    }
    .into())
}

/// Basis `1, α, …, α^{t−1}` of level `d` over level `g`, `α` the generator
/// of level `d`.
struct SubfieldBasis {
    small: &'static GaloisField,
    t: usize,
    sb: usize,
    // echelon rows over GF(2), with the basis combination giving each
    reduced: Vec<(u128, u128)>,
}

impl SubfieldBasis {
    fn new(tower: &FieldTower, d: u32, g: u32) -> Result<Self> {
        let big = tower.level(d)?;
        let small = tower.level(g)?;
        let emb = tower.embedding(g, d)?;
        let t = (d / g) as usize;
        let sb = small.bits() as usize;
        let alpha = big.generator();
        let mut reduced: Vec<(u128, u128)> = Vec::new();
        for l in 0..t {
            let a = alpha.pow(l as u128);
            for j in 0..sb {
                let mut v = (emb.apply(small.from_bits(1u128 << j)?) * a).bits();
                let mut combo = 1u128 << (l * sb + j);
                for &(rv, rc) in &reduced {
                    if v & (1u128 << (127 - rv.leading_zeros())) != 0 {
                        v ^= rv;
                        combo ^= rc;
                    }
                }
                debug_assert!(v != 0);
                reduced.push((v, combo));
                reduced.sort_by_key(|&(rv, _)| rv.leading_zeros());
            }
        }
        Ok(SubfieldBasis {
            small,
            t,
            sb,
            reduced,
        })
    }

    fn coords(&self, x: Fe) -> Result<Vec<Fe>> {
        let mut b = x.bits();
        let mut sol = 0u128;
        for &(rv, rc) in &self.reduced {
            if b & (1u128 << (127 - rv.leading_zeros())) != 0 {
                b ^= rv;
                sol ^= rc;
            }
        }
        debug_assert_eq!(b, 0);
        let mask = if self.sb == 128 {
            u128::MAX
        } else {
            (1u128 << self.sb) - 1
        };
        (0..self.t)
            .map(|l| Ok(self.small.from_bits((sol >> (l * self.sb)) & mask)?))
            .collect()
    }
}

/// Incidence counts from a rank oracle: `at_most(idx, s)` tells whether the
/// points `idx` span at most `s` dimensions.
fn incidence<F>(n: usize, at_most: F) -> Result<ConfigurationReport>
where
    F: Fn(&[usize], usize) -> Result<bool> + Sync,
{
    for i in 0..n {
        for j in i + 1..n {
            if at_most(&[i, j], 1)? {
                return Err(Error::InvalidInput(format!("points {i} and {j} coincide")));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let lines: Result<Vec<Option<Vec<usize>>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut on = Vec::new();
            for k in 0..n {
                if k == i || k == j || at_most(&[i, j, k], 2)? {
                    on.push(k);
                }
            }
            // keep each line once, from its two smallest points
            Ok((on[0] == i && on[1] == j).then_some(on))
        })
        .collect();
    let mut lines: Vec<Vec<usize>> = lines?.into_iter().flatten().collect();
    lines.sort();
    let max_collinear = lines.iter().map(Vec::len).max().unwrap_or(n.min(1));
    let triples: Vec<(usize, usize, usize)> = pairs
        .iter()
        .flat_map(|&(i, j)| (j + 1..n).map(move |k| (i, j, k)))
        .collect();
    let planes: Result<Vec<usize>> = triples
        .par_iter()
        .map(|&(i, j, k)| {
            if at_most(&[i, j, k], 2)? {
                return Ok(0);
            }
            let mut count = 0;
            for l in 0..n {
                if l == i || l == j || l == k || at_most(&[i, j, k, l], 3)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect();
    let max_coplanar = planes?
        .into_iter()
        .max()
        .filter(|&c| c > 0)
        .unwrap_or(max_collinear);
    let companion_pairs: Vec<(usize, usize)> = lines
        .iter()
        .filter(|l| l.len() == 2)
        .map(|l| (l[0], l[1]))
        .collect();
    let mut companions = vec![0usize; n];
    for &(i, j) in &companion_pairs {
        companions[i] += 1;
        companions[j] += 1;
    }
    Ok(ConfigurationReport {
        num_points: n,
        lines: lines
            .into_iter()
            .map(|l| LineIncidence {
                count: l.len(),
                points: l,
            })
            .collect(),
        max_collinear,
        max_coplanar,
        has_point_with_two_companions: companions.iter().any(|&c| c >= 2),
        companion_pairs,
        four_collinear: max_collinear >= 4,
        seven_coplanar: max_coplanar >= 7,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf;
    use crate::poly::{Exp, MultiPoly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(rows: &[[u128; 4]]) -> Vec<Vec<Fe>> {
        let k = gf(3).unwrap();
        rows.iter()
            .map(|r| r.iter().map(|&b| k.from_bits(b).unwrap()).collect())
            .collect()
    }

    fn random_point(tower: &FieldTower, level: u32, rng: &mut ChaCha8Rng) -> (u32, Vec<Fe>) {
        let k = tower.level(level).unwrap();
        (level, (0..4).map(|_| k.random(rng)).collect())
    }

    #[test]
    fn expansion_reassembles() {
        let tower = FieldTower::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big = tower.level(6).unwrap();
        let basis = SubfieldBasis::new(&tower, 6, 2).unwrap();
        let emb = tower.embedding(2, 6).unwrap();
        for _ in 0..20 {
            let x = big.random(&mut rng);
            let ys = basis.coords(x).unwrap();
            assert_eq!(ys.len(), 3);
            let mut acc = big.zero();
            for (l, &y) in ys.iter().enumerate() {
                acc = acc + big.generator().pow(l as u128) * emb.apply(y);
            }
            assert_eq!(acc, x);
        }
    }

    #[test]
    fn rank_by_expansion_matches_direct() {
        let tower = FieldTower::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..40 {
            let levels: &[u32] = [&[2, 3, 3][..], &[4, 6, 6], &[3, 4, 2]][trial % 3];
            let mut rows: Vec<(u32, Vec<Fe>)> = levels
                .iter()
                .map(|&d| random_point(&tower, d, &mut rng))
                .collect();
            if trial % 2 == 0 {
                // force a dependency: last row = (1 + x) first row, over the base
                let k = tower.level(rows[0].0).unwrap();
                let c = k.from_bits(3).unwrap();
                let dep: Vec<Fe> = rows[0].1.iter().map(|&a| a * c).collect();
                rows.push((rows[0].0, dep));
            }
            for s in 1..=rows.len() {
                let direct = rank_at_most(&tower, tower.max_level(), rows.clone(), s).unwrap();
                let split = rank_at_most(&tower, 2, rows.clone(), s).unwrap();
                assert_eq!(direct, split, "trial {trial}, s = {s}");
            }
        }
        let stuck: Vec<(u32, Vec<Fe>)> = [2, 3, 6]
            .iter()
            .map(|&d| random_point(&tower, d, &mut rng))
            .collect();
        assert!(rank_at_most(&tower, 2, stuck, 2).is_err());
    }

    #[test]
    fn general_position_triangle() {
        let c = configuration_report(&pts(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])).unwrap();
        assert_eq!(c.max_collinear, 2);
        assert_eq!(c.max_coplanar, 3);
        assert_eq!(c.companion_pairs.len(), 3);
        assert!(c.violations_free());
        assert!(c.has_point_with_two_companions);
    }

    #[test]
    fn four_collinear_flagged() {
        let c = configuration_report(&pts(&[
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [1, 1, 0, 0],
            [1, 2, 0, 0],
        ]))
        .unwrap();
        assert_eq!(c.max_collinear, 4);
        assert!(c.four_collinear);
        assert_eq!(c.lines.len(), 1);
        assert!(c.companion_pairs.is_empty());
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(configuration_report(&pts(&[[1, 0, 0, 0], [2, 0, 0, 0]])).is_err());
    }

    #[test]
    fn kernel_dimensions() {
        let k = gf(2).unwrap();
        let mk = |terms: &[&[u16]]| {
            let f =
                MultiPoly::from_terms(k, 4, terms.iter().map(|e| (Exp::from_slice(e), k.one())))
                    .unwrap();
            QuarticSurface::new(f).unwrap()
        };
        // z^4 + z^2 x1^2 + Klein, with z = x0
        let x = mk(&[
            &[4, 0, 0, 0],
            &[2, 2, 0, 0],
            &[0, 3, 1, 0],
            &[0, 0, 3, 1],
            &[0, 1, 0, 3],
        ]);
        let ker = dual_plane_kernel(&x);
        assert_eq!(ker.len(), 1);
        assert!(ker[0][1..].iter().all(Fe::is_zero));
        // no partials in x2, x3 vanish identically
        let y = mk(&[&[3, 1, 0, 0], &[1, 3, 0, 0], &[0, 0, 2, 2], &[2, 0, 0, 2]]);
        assert_eq!(dual_plane_kernel(&y).len(), 2);
    }
}
