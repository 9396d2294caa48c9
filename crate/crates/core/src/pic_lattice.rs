//! Integral lattices spanned by the hyperplane class, exceptional curves of
//! rational double points and lines, with reflection reduction of
//! isotropic classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibrations::{fiber_table, KodairaType};
use crate::singularities::{SingularLocusReport, SingularityKind};

pub const REFLECTION_CAP: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdeType {
    A(u32),
    D(u32),
    E(u32),
}

impl AdeType {
    pub fn rank(&self) -> usize {
        match *self {
            AdeType::A(n) | AdeType::D(n) | AdeType::E(n) => n as usize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AdeType::A(n) => n >= 1,
            AdeType::D(n) => n >= 4,
            AdeType::E(n) => (6..=8).contains(&n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{self} is not a Dynkin type")))
        }
    }

    /// Edges of the Dynkin diagram, nodes numbered from 0.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank();
        match self {
            AdeType::A(_) => (1..n).map(|i| (i - 1, i)).collect(),
            AdeType::D(_) => {
                let mut e: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
                e.push((n - 3, n - 1));
                e
            }
            AdeType::E(_) => {
                let mut e: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
                e.push((2, n - 1));
                e
            }
        }
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(n) => write!(f, "A{n}"),
            AdeType::D(n) => write!(f, "D{n}"),
            AdeType::E(n) => write!(f, "E{n}"),
        }
    }
}

impl FromStr for AdeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("unknown ADE type {s:?}"));
        let n: u32 = s.get(1..).and_then(|d| d.parse().ok()).ok_or_else(bad)?;
        let t = match s.chars().next() {
            Some('A') => AdeType::A(n),
            Some('D') => AdeType::D(n),
            Some('E') => AdeType::E(n),
            _ => return Err(bad()),
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBasis {
    labels: Vec<String>,
    gram: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    pub coords: Vec<i64>,
}

impl DivisorClass {
    pub fn add_scaled(&self, c: i64, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }
}

impl LatticeBasis {
    pub fn from_gram(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = labels.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "gram matrix shape does not match labels".into(),
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "gram matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if !labels.iter().all(|l| seen.insert(l)) {
            return Err(Error::InvalidInput("duplicate labels".into()));
        }
        Ok(LatticeBasis { labels, gram })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown label {label:?}")))
    }

    pub fn basis_class(&self, i: usize) -> DivisorClass {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1;
        DivisorClass { coords }
    }

    /// `Σ c·[label]`.
    pub fn class(&self, terms: &[(&str, i64)]) -> Result<DivisorClass> {
        let mut coords = vec![0; self.rank()];
        for (l, c) in terms {
            coords[self.index_of(l)?] += c;
        }
        Ok(DivisorClass { coords })
    }

    fn check(&self, d: &DivisorClass) -> Result<()> {
        if d.coords.len() != self.rank() {
            return Err(Error::Incompatible);
        }
        Ok(())
    }

    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
        self.check(a)?;
        self.check(b)?;
        Ok((0..self.rank())
            .flat_map(|i| (0..self.rank()).map(move |j| (i, j)))
            .map(|(i, j)| a.coords[i] * self.gram[i][j] * b.coords[j])
            .sum())
    }

    pub fn self_int(&self, d: &DivisorClass) -> Result<i64> {
        self.pair(d, d)
    }

    /// Sub-Gram matrix on the given basis indices.
    pub fn restrict(&self, idx: &[usize]) -> Vec<Vec<i64>> {
        idx.iter()
            .map(|&i| idx.iter().map(|&j| self.gram[i][j]).collect())
            .collect()
    }

    pub fn is_negative_definite_on(&self, idx: &[usize]) -> bool {
        let neg: Vec<Vec<i64>> = self
            .restrict(idx)
            .into_iter()
            .map(|r| r.into_iter().map(|x| -x).collect())
            .collect();
        leading_minors(&neg).iter().all(|&m| m > 0)
    }

    pub fn determinant(&self) -> i128 {
        determinant(&self.gram)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: LatticeBasis = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        LatticeBasis::from_gram(b.labels, b.gram)
    }
}

/// Determinant by fraction-free elimination with row pivoting.
pub fn determinant(g: &[Vec<i64>]) -> i128 {
    let n = g.len();
    let mut a: Vec<Vec<i128>> = g
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Leading principal minors, smallest first.
pub fn leading_minors(g: &[Vec<i64>]) -> Vec<i128> {
    (1..=g.len())
        .map(|k| {
            let block: Vec<Vec<i64>> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
            determinant(&block)
        })
        .collect()
}

/// Incremental construction of a lattice from `H`, ADE configurations and
/// lines.
#[derive(Clone, Debug)]
pub struct LatticeBuilder {
    labels: Vec<String>,
    entries: BTreeMap<(usize, usize), i64>,
}

impl LatticeBuilder {
    /// Starts with `H` of the given square.
    pub fn new(h_square: i64) -> Self {
        let mut b = LatticeBuilder {
            labels: Vec::new(),
            entries: BTreeMap::new(),
        };
        b.push("H".into(), h_square);
        b
    }

    fn push(&mut self, label: String, square: i64) -> usize {
        self.labels.push(label);
        let i = self.labels.len() - 1;
        self.entries.insert((i, i), square);
        i
    }

    /// Adds the exceptional curves of a rational double point, labelled
    /// `name.1, name.2, …`, orthogonal to `H`.
    pub fn add_ade(&mut self, name: &str, kind: AdeType) -> Result<Vec<usize>> {
        kind.validate()?;
        let idx: Vec<usize> = (1..=kind.rank())
            .map(|k| self.push(format!("{name}.{k}"), -2))
            .collect();
        for (a, b) in kind.edges() {
            self.set(idx[a], idx[b], 1)?;
        }
        Ok(idx)
    }

    /// A line: `L^2 = -2`, `H·L = 1`.
    pub fn add_line(&mut self, name: &str) -> Result<usize> {
        let i = self.push(name.into(), -2);
        self.set(0, i, 1)?;
        Ok(i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) -> Result<()> {
        let n = self.labels.len();
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!(
                "index out of range for {n} generators"
            )));
        }
        self.entries.insert((i.min(j), i.max(j)), v);
        Ok(())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown label {label:?}")))
    }

    pub fn build(self) -> Result<LatticeBasis> {
        let n = self.labels.len();
        let mut gram = vec![vec![0; n]; n];
        for (&(i, j), &v) in &self.entries {
            gram[i][j] = v;
            gram[j][i] = v;
        }
        LatticeBasis::from_gram(self.labels, gram)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub class: DivisorClass,
    pub steps: usize,
}

/// Numerical shadow of the reduction of an isotropic class: effectivity and
/// fixed parts are not tracked.
///
/// Reflects `d` in `(-2)`-classes `c` with `d·c < 0` until `d` is
/// nonnegative on all of them: `d ↦ d + (d·c) c`.
pub fn reflect_reduce(
    basis: &LatticeBasis,
    d: &DivisorClass,
    curves: &[DivisorClass],
    cap: usize,
) -> Result<Reduction> {
    for c in curves {
        if basis.self_int(c)? != -2 {
            return Err(Error::InvalidInput(
                "reflection classes must have square -2".into(),
            ));
        }
    }
    if basis.self_int(d)? != 0 {
        return Err(Error::InvalidInput(
            "reflection reduction needs an isotropic class".into(),
        ));
    }
    let mut cur = d.clone();
    for steps in 0..=cap {
        let mut hit = None;
        for c in curves {
            let p = basis.pair(&cur, c)?;
            if p < 0 {
                hit = Some((p, c));
                break;
            }
        }
        match hit {
            None => return Ok(Reduction { class: cur, steps }),
            Some((p, c)) => cur = cur.add_scaled(p, c),
        }
    }
    Err(Error::Certification(format!(
        "reflection reduction exceeded {cap} steps"
    )))
}

/// Lower bound `2 + Σ (m_v − 1)` for the Picard number of an elliptic
/// fibration with a section; `0` when there is no section.
pub fn shioda_tate_lower(fibers: &[KodairaType], has_section: bool) -> i64 {
    if !has_section {
        return 0;
    }
    2 + fibers
        .iter()
        .map(|&k| fiber_table(k).m_v as i64 - 1)
        .sum::<i64>()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceLattice {
    pub basis: LatticeBasis,
    /// Singular points with a known ADE type, one entry per geometric point.
    pub configurations: Vec<String>,
    /// Geometric singular points whose type is unknown.
    pub skipped: usize,
    pub exceptional_negative_definite: bool,
    /// Classes `H − D_i − D_j` for pairs of nodes, all isotropic.
    pub isotropic_node_pairs: usize,
}

/// Lattice spanned by `H` and the exceptional curves of the singular
/// points of known ADE type (nodes and biplanar `A_n` points).
pub fn surface_lattice(report: &SingularLocusReport) -> Result<SurfaceLattice> {
    let mut b = LatticeBuilder::new(4);
    let mut configurations = Vec::new();
    let mut nodes = Vec::new();
    let mut skipped = 0;
    let mut k = 0;
    for p in &report.points {
        let kind = match (p.kind, p.an_index) {
            (SingularityKind::Node, _) => Some(AdeType::A(1)),
            (SingularityKind::Biplanar, Some(n)) => Some(AdeType::A(n)),
            _ => None,
        };
        for _ in 0..p.orbit_size {
            match kind {
                Some(t) => {
                    k += 1;
                    let idx = b.add_ade(&format!("P{k}"), t)?;
                    if t == AdeType::A(1) {
                        nodes.push(idx[0]);
                    }
                    configurations.push(t.to_string());
                }
                None => skipped += 1,
            }
        }
    }
    let basis = b.build()?;
    let exc: Vec<usize> = (1..basis.rank()).collect();
    let exceptional_negative_definite = basis.is_negative_definite_on(&exc);
    let mut isotropic_node_pairs = 0;
    let h = basis.basis_class(0);
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let e = h
                .add_scaled(-1, &basis.basis_class(i))
                .add_scaled(-1, &basis.basis_class(j));
            if basis.self_int(&e)? == 0 {
                isotropic_node_pairs += 1;
            }
        }
    }
    Ok(SurfaceLattice {
        basis,
        configurations,
        skipped,
        exceptional_negative_definite,
        isotropic_node_pairs,
    })
}
