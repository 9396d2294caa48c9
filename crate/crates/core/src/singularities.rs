//! Singular points of quartic surfaces in `P^3`: location, classification by
//! the tangent quadric, Gaussian defect and local length.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower, GaloisField};
use crate::ideal::{local_colength, Colength, IdealPresentation, DEFAULT_COLENGTH_CAP};
use crate::poly::MultiPoly;
use crate::solve::{solve_zero_dim, SolveOptions, SolvedPoint};

/// A quartic surface `{F = 0} ⊂ P^3` over the base field of a tower.
#[derive(Clone, Debug)]
pub struct QuarticSurface {
    f: MultiPoly,
    tower: FieldTower,
}

impl QuarticSurface {
    pub fn new(f: MultiPoly) -> Result<Self> {
        if f.nvars() != 4 {
            return Err(Error::InvalidSurface(format!(
                "expected 4 variables, got {}",
                f.nvars()
            )));
        }
        if f.is_zero() {
            return Err(Error::InvalidSurface("zero polynomial".into()));
        }
        if f.homogeneous_degree() != Some(4) {
            return Err(Error::InvalidSurface("not a homogeneous quartic".into()));
        }
        if f.sqrt().is_some() {
            return Err(Error::InvalidSurface(
                "square of a quadric: the surface is not reduced".into(),
            ));
        }
        let tower = FieldTower::new(f.field().bits())?;
        Ok(QuarticSurface { f, tower })
    }

    pub fn equation(&self) -> &MultiPoly {
        &self.f
    }

    pub fn tower(&self) -> FieldTower {
        self.tower
    }

    pub fn field(&self) -> &'static GaloisField {
        self.f.field()
    }

    /// The ideal `(F, F_0, F_1, F_2, F_3)` of the singular scheme.
    pub fn singular_ideal(&self) -> IdealPresentation {
        let mut gens = vec![self.f.clone()];
        gens.extend(self.f.gradient());
        IdealPresentation::homogeneous(self.field(), 4, gens).expect("homogeneous generators")
    }

    /// `F` and its partials evaluated at a point given in some tower level.
    pub fn is_singular_at(&self, point: &[Fe]) -> Result<bool> {
        let f = self.lift_to(point[0].field())?;
        Ok(f.eval(point).is_zero() && f.gradient().iter().all(|g| g.eval(point).is_zero()))
    }

    fn lift_to(&self, field: &'static GaloisField) -> Result<MultiPoly> {
        let level = self.tower.level_of(field).ok_or(Error::Incompatible)?;
        let emb = self.tower.embedding(1, level)?;
        Ok(self.f.embed(&emb))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SingularityKind {
    Node,
    Biplanar,
    Uniplanar,
    TripleOrWorse,
}

impl SingularityKind {
    pub fn is_double_point(self) -> bool {
        self != SingularityKind::TripleOrWorse
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RdpStatus {
    #[serde(rename = "RDP")]
    Rdp,
    #[serde(rename = "RDP_BY_DEFECT")]
    RdpByDefect,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularPointRecord {
    #[serde(serialize_with = "crate::json::ser_fe_vec")]
    pub point: Vec<Fe>,
    /// Tower level of the point's field of definition.
    pub ext_degree: u32,
    /// Number of geometric points in the Galois orbit.
    pub orbit_size: u32,
    pub kind: SingularityKind,
    pub an_index: Option<u32>,
    pub defect: Colength,
    /// False when the trials disagreed.
    pub defect_stable: bool,
    pub local_length: Colength,
    pub rdp_status: RdpStatus,
}

impl SingularPointRecord {
    pub fn defect_value(&self) -> Option<usize> {
        self.defect.finite()
    }

    /// RDP certified by type or by a defect of at most 9.
    pub fn rdp_certified(&self) -> bool {
        self.rdp_status != RdpStatus::Unknown
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularLocusReport {
    pub points: Vec<SingularPointRecord>,
    pub total_length: usize,
    pub complete: bool,
    /// Geometric number of singular points.
    pub count: usize,
    pub nu: usize,
    pub b: usize,
    pub u: usize,
    pub triple: usize,
}

impl SingularLocusReport {
    pub fn defect_sum(&self) -> Option<usize> {
        self.points
            .iter()
            .map(|r| r.defect.finite().map(|d| d * r.orbit_size as usize))
            .sum()
    }

    pub fn all_nodes(&self) -> bool {
        self.points.iter().all(|r| r.kind == SingularityKind::Node)
    }

    /// Every geometric point, all stored in the smallest level containing
    /// the fields of definition of all orbits.
    pub fn geometric_points(&self, tower: &FieldTower) -> Result<Vec<Vec<Fe>>> {
        let level = self
            .points
            .iter()
            .fold(1, |l, r| crate::solve::lcm(l, r.ext_degree));
        let target = tower.level(level)?;
        let mut out = Vec::new();
        for r in &self.points {
            let emb = tower.embedding(r.ext_degree, level)?;
            let mut p = r.point.clone();
            for _ in 0..r.orbit_size {
                out.push(p.iter().map(|&c| emb.apply(c)).collect());
                p = p.iter().map(|c| c.frobenius(tower.m())).collect();
            }
            debug_assert!(out
                .last()
                .map_or(true, |q: &Vec<Fe>| q[0].field() == target));
        }
        Ok(out)
    }

    /// Every geometric point, each conjugate left in the level of its orbit.
    pub fn conjugate_points(&self, tower: &FieldTower) -> Vec<Vec<Fe>> {
        let mut out = Vec::new();
        for r in &self.points {
            let mut p = r.point.clone();
            for _ in 0..r.orbit_size {
                out.push(p.clone());
                p = p.iter().map(|c| c.frobenius(tower.m())).collect();
            }
        }
        out
    }

    /// Geometric count of points of the given kind.
    pub fn count_kind(&self, kind: SingularityKind) -> usize {
        self.points
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.orbit_size as usize)
            .sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    pub max_ext: u32,
    pub trials: usize,
    pub cap: usize,
    pub seed: u64,
    pub d_max: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            max_ext: 24,
            trials: 3,
            cap: DEFAULT_COLENGTH_CAP,
            seed: 0,
            d_max: 16,
        }
    }
}

/// All geometric singular points over levels `<= max_ext`, one record per
/// Galois orbit.
pub fn find_singular_points(
    x: &QuarticSurface,
    opts: &AnalysisOptions,
) -> Result<SingularLocusReport> {
    let tower = x.tower();
    let sol = solve_zero_dim(
        &x.singular_ideal(),
        &tower,
        &SolveOptions {
            max_ext: opts.max_ext.min(tower.max_level()),
            d_max: opts.d_max,
            seed: opts.seed,
        },
    )?;
    let records = sol
        .points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let seed = opts
                .seed
                .wrapping_mul(0x2545_f491_4f6c_dd1d)
                .wrapping_add(i as u64);
            classify_point(x, p, opts, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let total_length = sol.length;
    let lengths: Option<usize> = records
        .iter()
        .map(|r| r.local_length.finite().map(|l| l * r.orbit_size as usize))
        .sum();
    let complete = lengths == Some(total_length);
    let geo = |pred: &dyn Fn(&SingularPointRecord) -> bool| -> usize {
        records
            .iter()
            .filter(|r| pred(r))
            .map(|r| r.orbit_size as usize)
            .sum()
    };
    Ok(SingularLocusReport {
        count: geo(&|_| true),
        nu: geo(&|r| r.kind.is_double_point()),
        b: geo(&|r| r.kind == SingularityKind::Biplanar),
        u: geo(&|r| r.kind == SingularityKind::Uniplanar),
        triple: geo(&|r| r.kind == SingularityKind::TripleOrWorse),
        points: records,
        total_length,
        complete,
    })
}

fn classify_point(
    x: &QuarticSurface,
    p: &SolvedPoint,
    opts: &AnalysisOptions,
    seed: u64,
) -> Result<SingularPointRecord> {
    let kind = classify_quadric_part(x, &p.coords)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (defect, defect_stable) =
        match gaussian_defect(x, &p.coords, opts.trials, opts.cap, &mut rng) {
            Ok(d) => (Colength::Finite(d.value), d.stable),
            Err(Error::InfiniteDefect) => (Colength::Infinite, true),
            Err(e) => return Err(e),
        };
    let local_length = local_length(x, &p.coords, opts.cap)?;
    let an_index = match (kind, defect) {
        (SingularityKind::Node, _) => Some(1),
        (SingularityKind::Biplanar, Colength::Finite(d)) => Some(d.saturating_sub(1) as u32),
        _ => None,
    };
    Ok(SingularPointRecord {
        point: p.coords.clone(),
        ext_degree: p.level,
        orbit_size: p.orbit_size(),
        kind,
        an_index,
        defect,
        defect_stable,
        local_length,
        rdp_status: rdp_status(kind, defect),
    })
}

pub fn rdp_status(kind: SingularityKind, defect: Colength) -> RdpStatus {
    match kind {
        SingularityKind::Node | SingularityKind::Biplanar => RdpStatus::Rdp,
        SingularityKind::Uniplanar if matches!(defect, Colength::Finite(d) if d <= 9) => {
            RdpStatus::RdpByDefect
        }
        _ => RdpStatus::Unknown,
    }
}

/// Index of the first nonzero coordinate.
fn chart_of(point: &[Fe]) -> Result<usize> {
    point
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::InvalidInput("zero vector is not a projective point".into()))
}

/// `G(P + y)` in the affine chart of `P`, as a polynomial in the remaining
/// coordinates.
pub fn local_equation(g: &MultiPoly, point: &[Fe]) -> Result<MultiPoly> {
    let c = chart_of(point)?;
    let field = g.field();
    let inv = point[c].inv();
    let n = point.len();
    if g.nvars() != n {
        return Err(Error::Incompatible);
    }
    let mut subs = Vec::with_capacity(n);
    let mut k = 0;
    for (i, &pi) in point.iter().enumerate() {
        if i == c {
            subs.push(MultiPoly::one(field, n - 1));
        } else {
            subs.push(MultiPoly::var(field, n - 1, k).add(&MultiPoly::constant(pi * inv, n - 1)));
            k += 1;
        }
    }
    Ok(g.compose(&subs))
}

/// Classification of a singular point by its tangent quadric.
pub fn classify_quadric_part(x: &QuarticSurface, point: &[Fe]) -> Result<SingularityKind> {
    if !x.is_singular_at(point)? {
        return Err(Error::NotSingular);
    }
    let f = local_equation(&x.lift_to(point[0].field())?, point)?;
    Ok(classify_quadric(&f.homogeneous_part(2)))
}

/// Decision on a ternary quadratic form in characteristic 2.
pub fn classify_quadric(q: &MultiPoly) -> SingularityKind {
    if q.is_zero() {
        return SingularityKind::TripleOrWorse;
    }
    let b = |i: usize, j: usize| {
        let mut e = [0u16; 3];
        e[i] = 1;
        e[j] = 1;
        q.coeff(&e)
    };
    let (b12, b13, b23) = (b(0, 1), b(0, 2), b(1, 2));
    if b12.is_zero() && b13.is_zero() && b23.is_zero() {
        return SingularityKind::Uniplanar;
    }
    let s = [b23, b13, b12];
    if q.eval(&s).is_zero() {
        SingularityKind::Biplanar
    } else {
        SingularityKind::Node
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectEstimate {
    pub value: usize,
    pub stable: bool,
    pub trials: Vec<Colength>,
}

/// Smallest field level used for random choices at a point of level `k`.
fn generic_level(tower: &FieldTower, k: u32) -> u32 {
    let m = tower.m();
    let mut level = k;
    while m * level < 16 && level * 2 <= tower.max_level() {
        level *= 2;
    }
    level
}

/// `dim O_P / (F, D_v F, D_w F)` for random directions `v, w`, minimized over
/// `trials` draws.
pub fn gaussian_defect(
    x: &QuarticSurface,
    point: &[Fe],
    trials: usize,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DefectEstimate> {
    if !x.is_singular_at(point)? {
        return Err(Error::NotSingular);
    }
    let tower = x.tower();
    let k = tower
        .level_of(point[0].field())
        .ok_or(Error::Incompatible)?;
    let level = generic_level(&tower, k);
    let up = tower.embedding(k, level)?;
    let field = tower.level(level)?;
    let pt: Vec<Fe> = point.iter().map(|&c| up.apply(c)).collect();
    let f = x.lift_to(field)?;
    let grad = f.gradient();
    let local_f = local_equation(&f, &pt)?;
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials.max(1) {
        let mut gens = vec![local_f.clone()];
        for _ in 0..2 {
            let mut d = MultiPoly::zero(field, 4);
            for g in &grad {
                d = d.add(&g.scale(field.random(rng)));
            }
            gens.push(local_equation(&d, &pt)?);
        }
        let ideal = IdealPresentation::affine_at_origin(field, 3, gens)?;
        values.push(local_colength(&ideal, cap)?);
    }
    let best = values.iter().min().copied().unwrap();
    match best {
        Colength::Infinite => Err(Error::InfiniteDefect),
        Colength::Finite(v) => Ok(DefectEstimate {
            value: v,
            stable: values.iter().all(|&c| c == best),
            trials: values,
        }),
    }
}

/// Colength of the full singular-scheme ideal `(F, F_0, .., F_3)` at `P`.
pub fn local_length(x: &QuarticSurface, point: &[Fe], cap: usize) -> Result<Colength> {
    let f = x.lift_to(point[0].field())?;
    let mut gens = vec![local_equation(&f, point)?];
    for g in f.gradient() {
        gens.push(local_equation(&g, point)?);
    }
    let ideal = IdealPresentation::affine_at_origin(f.field(), 3, gens).map_err(|e| match e {
        Error::NotAtOrigin => Error::NotSingular,
        e => e,
    })?;
    local_colength(&ideal, cap)
}

/// `A_n` index of a node or biplanar point: defect − 1.
pub fn an_index(record: &SingularPointRecord) -> Result<u32> {
    match (record.kind, record.defect) {
        (SingularityKind::Node | SingularityKind::Biplanar, Colength::Finite(d)) if d >= 2 => {
            Ok(d as u32 - 1)
        }
        _ => Err(Error::InvalidInput(format!(
            "A_n index needs a node or biplanar point with finite defect, got {:?}",
            record.kind
        ))),
    }
}

/// Checks of the structural statements about singular points of normal
/// quartics, evaluated on a computed report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TheoremChecks {
    /// Points with unknown RDP status or triple points have defect ≥ 10.
    pub large_defect_ok: bool,
    /// At most 14 singular points, and exactly 14 only if all are nodes.
    pub fourteen_nodes_ok: bool,
    /// Many double points force all singularities to be RDPs.
    pub rdp_forcing_ok: bool,
    /// ν ≥ 13 forces every point to be RDP-certified.
    pub thirteen_ok: bool,
    /// ν = 14 forces nodes or biplanar points.
    pub fourteen_double_ok: bool,
    /// Local length at most defect at every point.
    pub length_le_defect_ok: bool,
    /// Defect bounds by kind: node 2, biplanar ≥ 3, uniplanar ≥ 8, triple ≥ 12.
    pub kind_defects_ok: bool,
}

impl TheoremChecks {
    pub fn all(&self) -> bool {
        self.large_defect_ok
            && self.fourteen_nodes_ok
            && self.rdp_forcing_ok
            && self.thirteen_ok
            && self.fourteen_double_ok
            && self.length_le_defect_ok
            && self.kind_defects_ok
    }
}

pub fn theorem_checks(report: &SingularLocusReport) -> TheoremChecks {
    let defect_at_least = |r: &SingularPointRecord, n: usize| match r.defect {
        Colength::Infinite => true,
        Colength::Finite(d) => d >= n,
    };
    let large_defect_ok = report.points.iter().all(|r| {
        if r.rdp_status == RdpStatus::Unknown || r.kind == SingularityKind::TripleOrWorse {
            defect_at_least(r, 10)
        } else {
            true
        }
    });
    let fourteen_nodes_ok = report.count <= 14 && (report.count < 14 || report.all_nodes());
    let rdp_forcing_ok = match report.defect_sum() {
        Some(sum) if 2 * report.nu + 36 > 28 + sum => {
            report.points.iter().all(|r| r.rdp_certified())
        }
        _ => true,
    };
    let thirteen_ok = report.nu < 13 || report.points.iter().all(|r| r.rdp_certified());
    let fourteen_double_ok = report.nu != 14
        || report
            .points
            .iter()
            .all(|r| matches!(r.kind, SingularityKind::Node | SingularityKind::Biplanar));
    let length_le_defect_ok = report.points.iter().all(|r| r.local_length <= r.defect);
    let kind_defects_ok = report.points.iter().all(|r| match r.kind {
        SingularityKind::Node => r.defect == Colength::Finite(2),
        SingularityKind::Biplanar => defect_at_least(r, 3) && r.defect != Colength::Infinite,
        SingularityKind::Uniplanar => defect_at_least(r, 8),
        SingularityKind::TripleOrWorse => defect_at_least(r, 12),
    });
    TheoremChecks {
        large_defect_ok,
        fourteen_nodes_ok,
        rdp_forcing_ok,
        thirteen_ok,
        fourteen_double_ok,
        length_le_defect_ok,
        kind_defects_ok,
    }
}
