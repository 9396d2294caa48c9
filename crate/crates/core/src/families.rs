//! Plane curves of even degree, their strange points, and quartic surfaces
//! of the form `a z^4 + z^2 Q(x) + B(x)` built from them.
//!
//! Surface coordinates are ordered `(x1, x2, x3, z)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower, GaloisField};
use crate::gauss_dual::{degree_ledger, dual_plane_kernel, DegreeLedger};
use crate::ideal::{local_colength, scheme_length, Colength, IdealPresentation};
use crate::linalg::Matrix;
use crate::poly::{monomials_of_degree, Exp, MultiPoly};
use crate::singularities::{
    find_singular_points, local_equation, theorem_checks, AnalysisOptions, QuarticSurface,
    SingularLocusReport, SingularityKind, TheoremChecks,
};
use crate::solve::{solve_zero_dim, SolveOptions};

const PLANE_D_MAX: usize = 24;

/// A nonzero form of even degree in `x1, x2, x3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    b: MultiPoly,
}

impl PlaneCurve {
    pub fn new(b: MultiPoly) -> Result<Self> {
        if b.nvars() != 3 {
            return Err(Error::InvalidInput("plane curve needs 3 variables".into()));
        }
        if b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        match b.homogeneous_degree() {
            Some(d) if d % 2 == 0 => Ok(PlaneCurve { b }),
            Some(d) => Err(Error::InvalidInput(format!("degree {d} is odd"))),
            None => Err(Error::NotHomogeneous),
        }
    }

    pub fn form(&self) -> &MultiPoly {
        &self.b
    }

    pub fn degree(&self) -> usize {
        self.b.homogeneous_degree().unwrap()
    }

    pub fn field(&self) -> &'static GaloisField {
        self.b.field()
    }

    /// `B + q^2`, which has the same gradient as `B`.
    pub fn add_square(&self, q: &MultiPoly) -> Result<PlaneCurve> {
        PlaneCurve::new(self.b.add(&q.square()))
    }
}

/// `x1^(2m-1) x2 + x2^(2m-1) x3 + x3^(2m-1) x1`.
pub fn klein_form(m: u16, field: &'static GaloisField) -> Result<PlaneCurve> {
    if m == 0 {
        return Err(Error::InvalidInput("Klein form needs m >= 1".into()));
    }
    let e = 2 * m - 1;
    let terms = [[e, 1, 0], [0, e, 1], [1, 0, e]];
    let mut b = MultiPoly::zero(field, 3);
    for t in terms {
        b.add_term(Exp::from_slice(&t), field.one());
    }
    PlaneCurve::new(b)
}

/// Form of degree `d` in `n` variables with uniformly random coefficients.
pub fn random_form(
    field: &'static GaloisField,
    n: usize,
    d: usize,
    rng: &mut impl Rng,
) -> MultiPoly {
    let mut p = MultiPoly::zero(field, n);
    for e in monomials_of_degree(n, d) {
        p.add_term(e, field.random(rng));
    }
    p
}

/// Klein quartic plus the square of a random quadratic form.
pub fn general_quartic_curve(
    field: &'static GaloisField,
    rng: &mut impl Rng,
) -> Result<PlaneCurve> {
    klein_form(2, field)?.add_square(&random_form(field, 3, 2, rng))
}

/// `B = q^2 + B'` where `B'` has no monomial with all exponents even.
pub fn decompose_square(b: &PlaneCurve) -> (MultiPoly, MultiPoly) {
    let f = b.form();
    let mut even = MultiPoly::zero(f.field(), f.nvars());
    let mut rest = MultiPoly::zero(f.field(), f.nvars());
    for (e, &c) in f.terms() {
        if e.iter().all(|k| k % 2 == 0) {
            even.add_term(e.clone(), c);
        } else {
            rest.add_term(e.clone(), c);
        }
    }
    (even.sqrt().expect("all exponents even"), rest)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrangePoint {
    #[serde(serialize_with = "crate::json::ser_fe_vec")]
    pub point: Vec<Fe>,
    pub multiplicity: usize,
    pub ext_degree: u32,
    /// Whether the point lies on `B = 0` (then it is not strange in the
    /// strict sense).
    pub on_curve: bool,
}

/// Lengths of the complete intersection `{B1 = B2 = 0}` and of its part on
/// the line `x3 = 0`, in coordinates where that line misses the critical
/// locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitCertificate {
    pub ci_length: usize,
    pub line_length: usize,
    pub disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrangeLocus {
    pub degree: usize,
    pub points: Vec<StrangePoint>,
    /// Length of `{∇B = 0}`, `None` when not finite.
    pub length: Option<usize>,
    pub finite: bool,
    /// Whether the listed points account for the whole length.
    pub points_complete: bool,
    pub certificate: Option<SplitCertificate>,
    /// Certificate present with `ci_length − line_length = length`.
    pub certified: bool,
    /// `(d−1)(d−2)+1`.
    pub expected: usize,
}

impl StrangeLocus {
    pub fn geometric_count(&self) -> usize {
        self.points.iter().map(|p| p.ext_degree as usize).sum()
    }

    pub fn reduced(&self) -> bool {
        self.finite && self.points_complete && self.points.iter().all(|p| p.multiplicity == 1)
    }
}

fn plane_ideal(field: &'static GaloisField, gens: Vec<MultiPoly>) -> Result<IdealPresentation> {
    let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
    IdealPresentation::homogeneous(field, 3, gens)
}

fn finite_length(ideal: &IdealPresentation) -> Result<Option<usize>> {
    match scheme_length(ideal, PLANE_D_MAX) {
        Ok(l) => Ok(Some(l)),
        Err(Error::NotZeroDimensional) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The critical locus `{∇B = 0}` with multiplicities, and a length
/// certificate from the split of `{B1 = B2 = 0}` along a line.
pub fn strange_points(b: &PlaneCurve, max_ext: u32, seed: u64) -> Result<StrangeLocus> {
    let field = b.field();
    let tower = FieldTower::new(field.bits())?;
    let d = b.degree();
    let expected = (d - 1) * (d - 2) + 1;
    let grad = b.form().gradient();
    let ideal = plane_ideal(field, grad)?;
    let length = if ideal.gens().is_empty() {
        None
    } else {
        finite_length(&ideal)?
    };
    let Some(length) = length else {
        return Ok(StrangeLocus {
            degree: d,
            points: vec![],
            length: None,
            finite: false,
            points_complete: false,
            certificate: None,
            certified: false,
            expected,
        });
    };
    let opts = SolveOptions {
        max_ext: max_ext.min(tower.max_level()),
        d_max: PLANE_D_MAX,
        seed,
    };
    let (points, points_complete) = match solve_zero_dim(&ideal, &tower, &opts) {
        Ok(sol) => {
            let complete = sol.complete();
            let pts = sol
                .points
                .iter()
                .map(|p| {
                    let bl = lift(b.form(), &tower, p.level)?;
                    Ok(StrangePoint {
                        on_curve: bl.eval(&p.coords).is_zero(),
                        point: p.coords.clone(),
                        multiplicity: p.multiplicity,
                        ext_degree: p.level,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (pts, complete)
        }
        Err(Error::Certification(_)) => (vec![], false),
        Err(e) => return Err(e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_11e5);
    let certificate = split_certificate(b, &tower, max_ext, &mut rng)?;
    let certified = certificate.as_ref().is_some_and(|c| {
        c.disjoint && c.ci_length == (d - 1) * (d - 1) && c.ci_length - c.line_length == length
    });
    Ok(StrangeLocus {
        degree: d,
        points,
        length: Some(length),
        finite: true,
        points_complete,
        certificate,
        certified,
        expected,
    })
}

fn lift(p: &MultiPoly, tower: &FieldTower, level: u32) -> Result<MultiPoly> {
    let from = tower.level_of(p.field()).ok_or(Error::Incompatible)?;
    let emb = tower.embedding(from, level)?;
    Ok(p.embed(&emb))
}

fn linear_change(p: &MultiPoly, a: &Matrix) -> MultiPoly {
    let field = p.field();
    let n = p.nvars();
    let subs: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let mut l = MultiPoly::zero(field, n);
            for j in 0..n {
                let mut e = Exp::from_elem(0, n);
                e[j] = 1;
                l.add_term(e, a.get(i, j));
            }
            l
        })
        .collect();
    p.compose(&subs)
}

fn split_certificate(
    b: &PlaneCurve,
    tower: &FieldTower,
    max_ext: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Option<SplitCertificate>> {
    let field = b.field();
    let x3 = MultiPoly::var(field, 3, 2);
    for _ in 0..32 {
        let mut a = Matrix::zeros(field, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, field.random(rng));
            }
        }
        if a.det().is_zero() {
            continue;
        }
        let g = linear_change(b.form(), &a).gradient();
        if g[0].is_zero() || g[1].is_zero() {
            continue;
        }
        let mut on_line = g.clone();
        on_line.push(x3.clone());
        if finite_length(&plane_ideal(field, on_line)?)? != Some(0) {
            continue;
        }
        let ci = plane_ideal(field, vec![g[0].clone(), g[1].clone()])?;
        let Some(ci_length) = finite_length(&ci)? else {
            continue;
        };
        let meet = plane_ideal(field, vec![g[0].clone(), g[1].clone(), x3.clone()])?;
        let opts = SolveOptions {
            max_ext: max_ext.min(tower.max_level()),
            d_max: PLANE_D_MAX,
            seed: rng.gen(),
        };
        let sol = match solve_zero_dim(&meet, tower, &opts) {
            Ok(s) if s.complete() => s,
            Ok(_) | Err(Error::Certification(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut line_length = 0;
        for p in &sol.points {
            let gens = vec![
                local_equation(&lift(&g[0], tower, p.level)?, &p.coords)?,
                local_equation(&lift(&g[1], tower, p.level)?, &p.coords)?,
            ];
            let local = IdealPresentation::affine_at_origin(gens[0].field(), 2, gens)?;
            match local_colength(&local, ci_length + 1)? {
                Colength::Finite(l) => line_length += l * p.level as usize,
                Colength::Infinite => return Ok(None),
            }
        }
        return Ok(Some(SplitCertificate {
            ci_length,
            line_length,
            disjoint: true,
        }));
    }
    Ok(None)
}

fn to_space(p: &MultiPoly) -> MultiPoly {
    p.insert_vars(3, 1)
}

fn z_power(field: &'static GaloisField, k: u16) -> MultiPoly {
    MultiPoly::monomial(field.one(), Exp::from_slice(&[0, 0, 0, k]))
}

fn require_quartic(b: &PlaneCurve) -> Result<()> {
    if b.degree() != 4 {
        return Err(Error::InvalidInput(format!(
            "expected a plane quartic, got degree {}",
            b.degree()
        )));
    }
    Ok(())
}

/// `z^4 + B(x)`.
pub fn family_a3(b: &PlaneCurve) -> Result<QuarticSurface> {
    require_quartic(b)?;
    QuarticSurface::new(z_power(b.field(), 4).add(&to_space(b.form())))
}

/// `z^4 + z^2 x1^2 + B(x)`.
pub fn family_special(b: &PlaneCurve) -> Result<QuarticSurface> {
    require_quartic(b)?;
    let k = b.field();
    let zx = MultiPoly::monomial(k.one(), Exp::from_slice(&[2, 0, 0, 2]));
    QuarticSurface::new(z_power(k, 4).add(&zx).add(&to_space(b.form())))
}

fn insep_conic(k: &'static GaloisField, lambda: Fe, nvars: usize) -> MultiPoly {
    let mut q = MultiPoly::zero(k, nvars);
    let mut e = Exp::from_elem(0, nvars);
    e[0] = 1;
    e[1] = 1;
    q.add_term(e, k.one());
    let mut e = Exp::from_elem(0, nvars);
    e[2] = 2;
    q.add_term(e, lambda);
    q
}

/// `z^2 (x1 x2 + x3^2) + B(x)`.
pub fn family_insep(b: &PlaneCurve) -> Result<QuarticSurface> {
    require_quartic(b)?;
    let k = b.field();
    let q = insep_conic(k, k.one(), 4);
    QuarticSurface::new(z_power(k, 2).mul(&q).add(&to_space(b.form())))
}

/// `z^4 + z^2 (x1 x2 + λ x3^2) + B(x)`.
pub fn family_dual_plane(lambda: Fe, b: &PlaneCurve) -> Result<QuarticSurface> {
    require_quartic(b)?;
    let k = b.field();
    if lambda.field() != k {
        return Err(Error::Incompatible);
    }
    let q = insep_conic(k, lambda, 4);
    QuarticSurface::new(
        z_power(k, 4)
            .add(&z_power(k, 2).mul(&q))
            .add(&to_space(b.form())),
    )
}

/// Splits `F = Σ z^k G_k(x)` and returns `G_0` as a plane form together
/// with the remaining part `F − G_0`.
fn split_plane_part(x: &QuarticSurface) -> Result<(PlaneCurve, MultiPoly)> {
    let f = x.equation();
    let k = f.field();
    let mut g0 = MultiPoly::zero(k, 3);
    let mut rest = MultiPoly::zero(k, 4);
    for (e, &c) in f.terms() {
        if e[3] == 0 {
            g0.add_term(Exp::from_slice(&e[..3]), c);
        } else {
            rest.add_term(e.clone(), c);
        }
    }
    Ok((PlaneCurve::new(g0)?, rest))
}

fn expect_shape(rest: &MultiPoly, expected: &MultiPoly, name: &str) -> Result<()> {
    if rest != expected {
        return Err(Error::InvalidInput(format!(
            "surface is not of the {name} shape"
        )));
    }
    Ok(())
}

/// Singular points grouped by their projection to the `x`-plane.
fn vertical_fibers(
    report: &SingularLocusReport,
    tower: &FieldTower,
) -> Result<Vec<(Vec<Fe>, usize)>> {
    let mut groups: BTreeMap<(u32, Vec<Fe>), usize> = BTreeMap::new();
    for p in report.conjugate_points(tower) {
        let x = &p[..3];
        let c = x
            .iter()
            .find(|c| !c.is_zero())
            .copied()
            .ok_or_else(|| Error::InvalidInput("singular point at the vertex".into()))?;
        let inv = c.inv();
        let x: Vec<Fe> = x.iter().map(|&v| v * inv).collect();
        let key = tower.descend(&x).ok_or(Error::Incompatible)?;
        *groups.entry(key).or_default() += 1;
    }
    Ok(groups.into_iter().map(|((_, x), n)| (x, n)).collect())
}

fn on_critical_locus(b: &PlaneCurve, tower: &FieldTower, x: &[Fe]) -> Result<bool> {
    let level = tower.level_of(x[0].field()).ok_or(Error::Incompatible)?;
    let bl = lift(b.form(), tower, level)?;
    Ok(bl.gradient().iter().all(|g| g.eval(x).is_zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct A3Report {
    pub strange: StrangeLocus,
    pub singular: SingularLocusReport,
    pub ledger: Option<DegreeLedger>,
    pub bijection: bool,
    pub all_a3: bool,
    pub verified: bool,
    pub diagnostics: Vec<String>,
}

pub fn verify_a3(x: &QuarticSurface, opts: &AnalysisOptions) -> Result<A3Report> {
    let (b, rest) = split_plane_part(x)?;
    expect_shape(&rest, &z_power(x.field(), 4), "z^4 + B")?;
    let tower = x.tower();
    let strange = strange_points(&b, opts.max_ext, opts.seed)?;
    let singular = find_singular_points(x, opts)?;
    let mut diagnostics = Vec::new();
    if !strange.reduced() {
        diagnostics.push(format!(
            "critical locus is not finite and reduced (length {:?}, {} geometric points)",
            strange.length,
            strange.geometric_count()
        ));
    }
    let fibers = vertical_fibers(&singular, &tower)?;
    let mut bijection =
        fibers.len() == strange.geometric_count() && fibers.iter().all(|f| f.1 == 1);
    for (xp, _) in &fibers {
        if !on_critical_locus(&b, &tower, xp)? {
            bijection = false;
        }
    }
    if !bijection {
        diagnostics.push("singular points do not biject with the critical locus".into());
    }
    let all_a3 = singular
        .points
        .iter()
        .all(|r| r.kind == SingularityKind::Biplanar && r.defect == Colength::Finite(4));
    if !all_a3 {
        diagnostics.push("not every singular point is an A3 point".into());
    }
    let ledger = degree_ledger(&singular).ok();
    let verified = strange.reduced() && bijection && all_a3 && singular.count == 7;
    if singular.count != 7 {
        diagnostics.push(format!("{} singular points instead of 7", singular.count));
    }
    Ok(A3Report {
        strange,
        singular,
        ledger,
        bijection,
        all_a3,
        verified,
        diagnostics,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialReport {
    pub strange: StrangeLocus,
    pub singular: SingularLocusReport,
    pub ledger: Option<DegreeLedger>,
    /// Critical locus reduced with 7 points, none on `x1 = 0`.
    pub hypotheses_ok: bool,
    /// Two singular points over each critical point off `x1 = 0`, one over
    /// those on it.
    pub vertical_pairs_ok: bool,
    pub all_nodes: bool,
    pub verified: bool,
    pub diagnostics: Vec<String>,
}

pub fn verify_special(x: &QuarticSurface, opts: &AnalysisOptions) -> Result<SpecialReport> {
    let k = x.field();
    let (b, rest) = split_plane_part(x)?;
    let shape = z_power(k, 4).add(&MultiPoly::monomial(
        k.one(),
        Exp::from_slice(&[2, 0, 0, 2]),
    ));
    expect_shape(&rest, &shape, "z^4 + z^2 x1^2 + B")?;
    let tower = x.tower();
    let strange = strange_points(&b, opts.max_ext, opts.seed)?;
    let singular = find_singular_points(x, opts)?;
    let mut diagnostics = Vec::new();
    let meets_line = strange.points.iter().any(|p| p.point[0].is_zero());
    let hypotheses_ok = strange.reduced() && strange.geometric_count() == 7 && !meets_line;
    if !strange.reduced() || strange.geometric_count() != 7 {
        diagnostics.push("critical locus is not 7 reduced points".into());
    }
    if meets_line {
        diagnostics.push("the line x1 = 0 meets the critical locus".into());
    }
    let fibers = vertical_fibers(&singular, &tower)?;
    let mut vertical_pairs_ok = fibers.len() == strange.geometric_count();
    for (xp, n) in &fibers {
        let expected = if xp[0].is_zero() { 1 } else { 2 };
        if *n != expected || !on_critical_locus(&b, &tower, xp)? {
            vertical_pairs_ok = false;
        }
    }
    if !vertical_pairs_ok {
        diagnostics.push("singular points are not vertical pairs over the critical locus".into());
    }
    let all_nodes = singular.all_nodes();
    let ledger = degree_ledger(&singular).ok();
    let defect_sum = ledger.as_ref().map(|l| l.defect_sum);
    if singular.count != 14 || !all_nodes || defect_sum != Some(28) {
        diagnostics.push(format!(
            "{} singular points, all nodes: {all_nodes}, defect sum {defect_sum:?}",
            singular.count
        ));
    }
    let verified = hypotheses_ok
        && vertical_pairs_ok
        && singular.count == 14
        && all_nodes
        && defect_sum == Some(28);
    Ok(SpecialReport {
        strange,
        singular,
        ledger,
        hypotheses_ok,
        vertical_pairs_ok,
        all_nodes,
        verified,
        diagnostics,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InsepReport {
    /// `{Q = B = 0}`.
    pub base_locus_length: usize,
    /// `{x3 = q^2 = 0}`.
    pub line_scheme_length: usize,
    /// `{x3 = B x2 + B1 Q = B x1 + B2 Q = 0}`, expected to equal the above.
    pub line_scheme_direct: usize,
    /// Maximal minors of the rows `(x1, x2, Q)`, `(B2, B1, B)`.
    pub hilbert_burch_length: usize,
    /// Hilbert–Burch length minus the line scheme length.
    pub residual_length: usize,
    pub disjoint: bool,
    /// `2 (25 − base − residual)`.
    pub gauss_product: i64,
    pub node_at_vertex: bool,
    pub singular: SingularLocusReport,
    pub ledger: Option<DegreeLedger>,
    pub checks: TheoremChecks,
    pub verified: bool,
    pub diagnostics: Vec<String>,
}

impl InsepReport {
    pub fn lengths(&self) -> (usize, usize, usize, usize) {
        (
            self.base_locus_length,
            self.line_scheme_length,
            self.hilbert_burch_length,
            self.residual_length,
        )
    }
}

fn length_or_err(ideal: &IdealPresentation, what: &str) -> Result<usize> {
    finite_length(ideal)?.ok_or_else(|| Error::InvalidInput(format!("{what} is not finite")))
}

pub fn verify_insep(x: &QuarticSurface, opts: &AnalysisOptions) -> Result<InsepReport> {
    let k = x.field();
    let (b, rest) = split_plane_part(x)?;
    let q4 = insep_conic(k, k.one(), 4);
    expect_shape(&rest, &z_power(k, 2).mul(&q4), "z^2 (x1 x2 + x3^2) + B")?;
    let bf = b.form();
    let conic = insep_conic(k, k.one(), 3);
    let g = bf.gradient();
    let x1 = MultiPoly::var(k, 3, 0);
    let x2 = MultiPoly::var(k, 3, 1);
    let x3 = MultiPoly::var(k, 3, 2);
    let h1 = bf.mul(&x2).add(&g[0].mul(&conic));
    let h2 = bf.mul(&x1).add(&g[1].mul(&conic));
    let (q, _) = decompose_square(&b);

    let base_locus_length = length_or_err(
        &plane_ideal(k, vec![conic.clone(), bf.clone()])?,
        "base locus",
    )?;
    let line_scheme_length = length_or_err(
        &plane_ideal(k, vec![x3.clone(), q.square()])?,
        "line scheme",
    )?;
    let line_scheme_direct = length_or_err(
        &plane_ideal(k, vec![x3.clone(), h1.clone(), h2.clone()])?,
        "line scheme",
    )?;
    let hb = plane_ideal(k, vec![h1.clone(), h2.clone(), x3.mul(&g[2])])?;
    let hilbert_burch_length = length_or_err(&hb, "Hilbert–Burch scheme")?;
    let meet = plane_ideal(k, vec![x3.clone(), q.clone(), h1, h2, g[2].clone()])?;
    let disjoint = finite_length(&meet)? == Some(0);
    let residual_length = hilbert_burch_length.saturating_sub(line_scheme_length);
    let gauss_product = 2 * (25 - base_locus_length as i64 - residual_length as i64);

    let singular = find_singular_points(x, opts)?;
    let vertex = [k.zero(), k.zero(), k.zero(), k.one()];
    let node_at_vertex = singular
        .points
        .iter()
        .any(|r| r.point == vertex && r.kind == SingularityKind::Node);
    let ledger = degree_ledger(&singular).ok();
    let checks = theorem_checks(&singular);
    let mut diagnostics = Vec::new();
    let lengths_ok = (
        base_locus_length,
        line_scheme_length,
        hilbert_burch_length,
        residual_length,
    ) == (8, 4, 17, 13)
        && line_scheme_direct == line_scheme_length;
    if !lengths_ok {
        diagnostics.push(format!(
            "scheme lengths ({base_locus_length}, {line_scheme_length}, {hilbert_burch_length}, {residual_length}), direct line scheme {line_scheme_direct}"
        ));
    }
    if !disjoint {
        diagnostics.push("line scheme meets the residual scheme".into());
    }
    if !node_at_vertex {
        diagnostics.push("no node at (0:0:0:1)".into());
    }
    let product_ok = ledger.as_ref().is_some_and(|l| l.product == gauss_product);
    if !product_ok {
        diagnostics.push(format!(
            "ledger product {:?} differs from {gauss_product}",
            ledger.as_ref().map(|l| l.product)
        ));
    }
    let verified = lengths_ok
        && disjoint
        && node_at_vertex
        && singular.count <= 14
        && (singular.count < 14 || singular.all_nodes())
        && product_ok
        && checks.all();
    Ok(InsepReport {
        base_locus_length,
        line_scheme_length,
        line_scheme_direct,
        hilbert_burch_length,
        residual_length,
        disjoint,
        gauss_product,
        node_at_vertex,
        singular,
        ledger,
        checks,
        verified,
        diagnostics,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DualPlaneReport {
    #[serde(serialize_with = "crate::json::ser_fe")]
    pub lambda: Fe,
    pub kernel_dim: usize,
    pub singular: SingularLocusReport,
    pub ledger: Option<DegreeLedger>,
    pub all_nodes: bool,
    /// `(sqrt(b31) : 0 : sqrt(b13))`, with `b_ij` the coefficient of
    /// `x_i^3 x_j` in `B`.
    #[serde(serialize_with = "ser_opt_point")]
    pub p_prime: Option<Vec<Fe>>,
    /// Intersection multiplicity of `B3` and `B1^2 + B1 x2 Q + B x2^2` at `P'`.
    pub p_prime_multiplicity: Option<Colength>,
    /// `18 −` that multiplicity.
    pub bezout_count: Option<i64>,
    pub checks: TheoremChecks,
    pub verified: bool,
    pub diagnostics: Vec<String>,
}

fn ser_opt_point<S: serde::Serializer>(
    p: &Option<Vec<Fe>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(v) => s.collect_seq(v.iter().map(|c| c.to_hex())),
        None => s.serialize_none(),
    }
}

pub fn verify_dual_plane(x: &QuarticSurface, opts: &AnalysisOptions) -> Result<DualPlaneReport> {
    let k = x.field();
    let (b, rest) = split_plane_part(x)?;
    let lambda = rest.coeff(&[0, 0, 2, 2]);
    let shape = z_power(k, 4).add(&z_power(k, 2).mul(&insep_conic(k, lambda, 4)));
    expect_shape(&rest, &shape, "z^4 + z^2 (x1 x2 + λ x3^2) + B")?;
    let kernel_dim = dual_plane_kernel(x).len();
    let singular = find_singular_points(x, opts)?;
    let ledger = degree_ledger(&singular).ok();
    let checks = theorem_checks(&singular);
    let bf = b.form();
    let b31 = bf.coeff(&[1, 0, 3]);
    let b13 = bf.coeff(&[3, 0, 1]);
    let (p_prime, p_prime_multiplicity) = if b31.is_zero() && b13.is_zero() {
        (None, None)
    } else {
        let p = vec![b31.sqrt(), k.zero(), b13.sqrt()];
        let g = bf.gradient();
        let conic = insep_conic(k, lambda, 3);
        let x2 = MultiPoly::var(k, 3, 1);
        let h = g[0]
            .square()
            .add(&g[0].mul(&x2).mul(&conic))
            .add(&bf.mul(&x2.square()));
        let gens = vec![local_equation(&g[2], &p)?, local_equation(&h, &p)?];
        let mult = if gens.iter().all(|g| g.coeff(&[0, 0]).is_zero()) {
            let local = IdealPresentation::affine_at_origin(k, 2, gens)?;
            Some(local_colength(&local, opts.cap)?)
        } else {
            Some(Colength::Finite(0))
        };
        (Some(p), mult)
    };
    let bezout_count = p_prime_multiplicity
        .and_then(Colength::finite)
        .map(|m| 18 - m as i64);
    let all_nodes = singular.all_nodes();
    let mut diagnostics = Vec::new();
    if kernel_dim != 1 {
        diagnostics.push(format!("dual-plane kernel has dimension {kernel_dim}"));
    }
    if singular.count > 14 {
        diagnostics.push(format!("{} singular points", singular.count));
    }
    if !checks.all() {
        diagnostics.push(format!("theorem checks failed: {checks:?}"));
    }
    let verified = singular.count <= 14 && kernel_dim == 1 && checks.all();
    Ok(DualPlaneReport {
        lambda,
        kernel_dim,
        singular,
        ledger,
        all_nodes,
        p_prime,
        p_prime_multiplicity,
        bezout_count,
        checks,
        verified,
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    A3,
    Special,
    Insep,
    DualPlane,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a3" => Ok(FamilyKind::A3),
            "special" => Ok(FamilyKind::Special),
            "insep" => Ok(FamilyKind::Insep),
            "dualplane" => Ok(FamilyKind::DualPlane),
            _ => Err(Error::InvalidInput(format!(
                "unknown family {s:?}; expected a3, special, insep or dualplane"
            ))),
        }
    }
}

/// Klein quartic plus `q^2` with `q` drawn from the seed.
pub fn seeded_curve(field: &'static GaloisField, seed: u64) -> Result<PlaneCurve> {
    general_quartic_curve(field, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Family member over `field` built on [`seeded_curve`]; `lambda` is only
/// used by the dual-plane family and defaults to 0.
pub fn build_family(
    kind: FamilyKind,
    field: &'static GaloisField,
    seed: u64,
    lambda: Option<Fe>,
) -> Result<QuarticSurface> {
    let b = seeded_curve(field, seed)?;
    match kind {
        FamilyKind::A3 => family_a3(&b),
        FamilyKind::Special => family_special(&b),
        FamilyKind::Insep => family_insep(&b),
        FamilyKind::DualPlane => family_dual_plane(lambda.unwrap_or_else(|| field.zero()), &b),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum FamilyReport {
    A3(A3Report),
    Special(SpecialReport),
    Insep(InsepReport),
    DualPlane(DualPlaneReport),
}

impl FamilyReport {
    pub fn verified(&self) -> bool {
        match self {
            FamilyReport::A3(r) => r.verified,
            FamilyReport::Special(r) => r.verified,
            FamilyReport::Insep(r) => r.verified,
            FamilyReport::DualPlane(r) => r.verified,
        }
    }

    pub fn singular(&self) -> &SingularLocusReport {
        match self {
            FamilyReport::A3(r) => &r.singular,
            FamilyReport::Special(r) => &r.singular,
            FamilyReport::Insep(r) => &r.singular,
            FamilyReport::DualPlane(r) => &r.singular,
        }
    }

    pub fn diagnostics(&self) -> &[String] {
        match self {
            FamilyReport::A3(r) => &r.diagnostics,
            FamilyReport::Special(r) => &r.diagnostics,
            FamilyReport::Insep(r) => &r.diagnostics,
            FamilyReport::DualPlane(r) => &r.diagnostics,
        }
    }
}

pub fn verify_family(
    kind: FamilyKind,
    x: &QuarticSurface,
    opts: &AnalysisOptions,
) -> Result<FamilyReport> {
    Ok(match kind {
        FamilyKind::A3 => FamilyReport::A3(verify_a3(x, opts)?),
        FamilyKind::Special => FamilyReport::Special(verify_special(x, opts)?),
        FamilyKind::Insep => FamilyReport::Insep(verify_insep(x, opts)?),
        FamilyKind::DualPlane => FamilyReport::DualPlane(verify_dual_plane(x, opts)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf;

    fn plane(k: &'static GaloisField, terms: &[[u16; 3]]) -> PlaneCurve {
        let mut b = MultiPoly::zero(k, 3);
        for t in terms {
            b.add_term(Exp::from_slice(t), k.one());
        }
        PlaneCurve::new(b).unwrap()
    }

    #[test]
    fn klein_forms() {
        let k = gf(1).unwrap();
        assert_eq!(
            klein_form(2, k).unwrap(),
            plane(k, &[[3, 1, 0], [0, 3, 1], [1, 0, 3]])
        );
        assert_eq!(
            klein_form(1, k).unwrap(),
            plane(k, &[[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        );
        assert_eq!(
            klein_form(3, k).unwrap(),
            plane(k, &[[5, 1, 0], [0, 5, 1], [1, 0, 5]])
        );
        assert!(klein_form(0, k).is_err());
    }

    #[test]
    fn square_decomposition() {
        let k = gf(2).unwrap();
        let (q, r) = decompose_square(&plane(k, &[[4, 0, 0]]));
        assert_eq!(q, MultiPoly::monomial(k.one(), Exp::from_slice(&[2, 0, 0])));
        assert!(r.is_zero());
        let (q, r) = decompose_square(&plane(k, &[[3, 1, 0]]));
        assert!(q.is_zero());
        assert_eq!(r, MultiPoly::monomial(k.one(), Exp::from_slice(&[3, 1, 0])));
        let (q, r) = decompose_square(&plane(k, &[[2, 2, 0]]));
        assert_eq!(q, MultiPoly::monomial(k.one(), Exp::from_slice(&[1, 1, 0])));
        assert!(r.is_zero());
    }

    #[test]
    fn conic_has_one_strange_point() {
        let k = gf(1).unwrap();
        let s = strange_points(&plane(k, &[[1, 1, 0], [0, 0, 2]]), 4, 0).unwrap();
        assert_eq!(s.length, Some(1));
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].point, vec![k.zero(), k.zero(), k.one()]);
        assert!(s.certified);
    }

    #[test]
    fn klein_strange_points() {
        let k = gf(1).unwrap();
        let s = strange_points(&klein_form(2, k).unwrap(), 6, 0).unwrap();
        assert_eq!(s.length, Some(7));
        assert_eq!(s.geometric_count(), 7);
        assert!(s.reduced() && s.certified);
        assert!(s.points.iter().all(|p| !p.on_curve));
    }

    fn general(m: u32, seed: u64) -> PlaneCurve {
        let k = gf(m).unwrap();
        general_quartic_curve(k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn a3_family_on_klein() {
        let b = general(3, 0);
        let r = verify_a3(&family_a3(&b).unwrap(), &AnalysisOptions::default()).unwrap();
        assert!(r.verified, "{:?}", r.diagnostics);
        assert_eq!(r.ledger.unwrap().product, 8);
    }

    #[test]
    fn special_family_on_klein() {
        let k = gf(3).unwrap();
        let r = verify_special(
            &family_special(&klein_form(2, k).unwrap()).unwrap(),
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert!(r.verified, "{:?}", r.diagnostics);
        assert_eq!(r.ledger.unwrap().product, 8);
    }

    #[test]
    fn insep_family_lengths() {
        let b = general(4, 1);
        let r = verify_insep(&family_insep(&b).unwrap(), &AnalysisOptions::default()).unwrap();
        assert_eq!(r.lengths(), (8, 4, 17, 13), "{:?}", r.diagnostics);
        assert!(r.verified, "{:?}", r.diagnostics);
        assert_eq!(r.singular.count, 14);
    }

    #[test]
    fn dual_plane_special_instance() {
        let b = general(3, 2);
        let k = b.field();
        let r = verify_dual_plane(
            &family_dual_plane(k.zero(), &b).unwrap(),
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert!(r.verified, "{:?}", r.diagnostics);
        assert_eq!(r.singular.count, 14);
        assert!(r.all_nodes);
        assert_eq!(r.p_prime_multiplicity, Some(Colength::Finite(4)));
    }

    #[test]
    fn non_reduced_critical_locus_fails_a3() {
        let k = gf(3).unwrap();
        let b = plane(k, &[[3, 1, 0], [0, 3, 1]]);
        let s = strange_points(&b, 6, 0).unwrap();
        assert_eq!(s.length, Some(7));
        assert_eq!(s.geometric_count(), 1);
        let r = verify_a3(&family_a3(&b).unwrap(), &AnalysisOptions::default()).unwrap();
        assert!(!r.verified);
        assert!(!r.diagnostics.is_empty());
    }

    #[test]
    fn line_through_strange_point_fails_special() {
        // Klein form in coordinates moving the strange point (1:1:1) to (0:1:1)
        let k = gf(3).unwrap();
        let klein = klein_form(2, k).unwrap();
        let mut shift = Matrix::identity(k, 3);
        shift.set(0, 1, k.one());
        let b = PlaneCurve::new(linear_change(klein.form(), &shift)).unwrap();
        let r = verify_special(&family_special(&b).unwrap(), &AnalysisOptions::default()).unwrap();
        assert!(!r.hypotheses_ok);
        assert!(!r.verified);
        assert!(r.singular.count < 14);
    }
}
