//! Weierstrass models over `k[t]` in characteristic 2, Tate's algorithm, and
//! the Euler number bookkeeping of elliptic K3 fibrations.
//!
//! A model is `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with
//! `deg a_i <= 2i`. The chart at infinity is `s = 1/t`,
//! `a_i ↦ s^(2i) a_i(1/s)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower, GaloisField};
use crate::json::{parse_fe, uni_from_hex, uni_to_hex, FieldSpec};
use crate::poly::{Exp, MultiPoly};
use crate::roots::{root_count, uni_roots};
use crate::uni::UniPoly;

/// Weights of `a1, a2, a3, a4, a6`.
pub const WEIGHTS: [usize; 5] = [1, 2, 3, 4, 6];

/// Degree of the discriminant of a K3 model.
pub const K3_DISC_DEGREE: usize = 24;

const MINIMALIZATION_CAP: u32 = 10;

/// Moduli dimensions of the square-discriminant families with `a1 = t^2`,
/// keyed by the additive fibre at `t = 0`. Documented values only, not
/// computed.
pub const DOCUMENTED_MODULI: [(&str, u32); 4] = [("I*0", 7), ("I*1", 6), ("IV*", 5), ("none", 8)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IStar(n) => write!(f, "I*{n}"),
            KodairaType::IVStar => f.write_str("IV*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IIStar => f.write_str("II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown Kodaira type {s:?}"));
        let index = |d: &str| d.parse::<u32>().map_err(|_| bad());
        Ok(match s.trim() {
            "II" => KodairaType::II,
            "III" => KodairaType::III,
            "IV" => KodairaType::IV,
            "IV*" => KodairaType::IVStar,
            "III*" => KodairaType::IIIStar,
            "II*" => KodairaType::IIStar,
            t if t.starts_with("I*") => KodairaType::IStar(index(&t[2..])?),
            t if t.starts_with('I') => KodairaType::I(index(&t[1..])?),
            _ => return Err(bad()),
        })
    }
}

impl Serialize for KodairaType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Row of the fibre table: number of components, minimal wild
/// conductor, Euler number of the fibre, and the maximal number of
/// disjoint `(-2)`-curves supported on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberTableRow {
    pub m_v: u32,
    pub delta_min: u32,
    pub e_v: u32,
    pub n_v: u32,
}

pub fn fiber_table(k: KodairaType) -> FiberTableRow {
    let row = |m_v, delta_min, e_v, n_v| FiberTableRow {
        m_v,
        delta_min,
        e_v,
        n_v,
    };
    match k {
        KodairaType::I(0) => row(1, 0, 0, 0),
        KodairaType::I(n) => row(n, 0, n, n / 2),
        KodairaType::II => row(1, 2, 2, 0),
        KodairaType::III => row(2, 1, 3, 1),
        KodairaType::IV => row(3, 0, 4, 1),
        KodairaType::IStar(1) => row(6, 1, 7, 4),
        KodairaType::IStar(n) => row(n + 5, 2, n + 6, 4 + n / 2),
        KodairaType::IVStar => row(7, 0, 8, 4),
        KodairaType::IIIStar => row(8, 1, 9, 5),
        KodairaType::IIStar => row(9, 1, 10, 5),
    }
}

/// Types that can occur when the maximal number 12 of disjoint
/// `(-2)`-curves in fibres is reached.
pub fn extremal_type_allowed(k: KodairaType) -> bool {
    match k {
        KodairaType::I(n) => n > 0 && n % 2 == 0,
        KodairaType::IStar(_) => true,
        KodairaType::IVStar | KodairaType::IIIStar => true,
        _ => false,
    }
}

/// Fibre types of quasi-elliptic fibrations.
pub fn quasi_elliptic_types() -> Vec<&'static str> {
    vec!["II", "III", "I*2n", "III*", "II*"]
}

pub fn quasi_elliptic_allowed(k: KodairaType) -> bool {
    match k {
        KodairaType::IStar(n) => n % 2 == 0,
        KodairaType::II | KodairaType::III | KodairaType::IIIStar | KodairaType::IIStar => true,
        _ => false,
    }
}

/// Whether the quasi-elliptic fibre of this type is reduced.
pub fn quasi_elliptic_reduced(k: KodairaType) -> bool {
    matches!(k, KodairaType::II | KodairaType::III)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    field: &'static GaloisField,
    a: [UniPoly; 5],
}

impl WeierstrassModel {
    /// `a = [a1, a2, a3, a4, a6]`.
    pub fn new(a: [UniPoly; 5]) -> Result<Self> {
        let field = a[0].field();
        for (i, ai) in a.iter().enumerate() {
            if ai.field() != field {
                return Err(Error::Incompatible);
            }
            if ai.degree().map_or(false, |d| d > 2 * WEIGHTS[i]) {
                return Err(Error::InvalidInput(format!(
                    "deg a{} = {} exceeds {}",
                    WEIGHTS[i],
                    ai.degree().unwrap(),
                    2 * WEIGHTS[i]
                )));
            }
        }
        Ok(WeierstrassModel { field, a })
    }

    pub fn field(&self) -> &'static GaloisField {
        self.field
    }

    pub fn coefficients(&self) -> &[UniPoly; 5] {
        &self.a
    }

    pub fn a1(&self) -> &UniPoly {
        &self.a[0]
    }
    pub fn a2(&self) -> &UniPoly {
        &self.a[1]
    }
    pub fn a3(&self) -> &UniPoly {
        &self.a[2]
    }
    pub fn a4(&self) -> &UniPoly {
        &self.a[3]
    }
    pub fn a6(&self) -> &UniPoly {
        &self.a[4]
    }

    pub fn discriminant(&self) -> UniPoly {
        discriminant_of(&self.a)
    }

    pub fn is_quasi_elliptic(&self) -> bool {
        self.a[0].is_zero() && self.a[2].is_zero()
    }

    /// Coefficients in the chart at infinity.
    pub fn at_infinity(&self) -> [UniPoly; 5] {
        std::array::from_fn(|i| self.a[i].reverse(2 * WEIGHTS[i]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&WeierstrassJson {
            field: FieldSpec {
                m: self.field.bits(),
            },
            a: self.a.iter().map(uni_to_hex).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wj: WeierstrassJson =
            serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        if wj.a.len() != 5 {
            return Err(Error::Json(format!(
                "expected 5 coefficient lists, got {}",
                wj.a.len()
            )));
        }
        let field = FieldTower::new(wj.field.m)?.base();
        let mut a = Vec::with_capacity(5);
        for c in &wj.a {
            a.push(uni_from_hex(field, c)?);
        }
        WeierstrassModel::new(a.try_into().expect("five entries"))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct WeierstrassJson {
    field: FieldSpec,
    a: Vec<Vec<String>>,
}

fn discriminant_of(a: &[UniPoly; 5]) -> UniPoly {
    let [a1, a2, a3, a4, a6] = a;
    let a1_2 = a1.square();
    let a1_4 = a1_2.square();
    let a3_2 = a3.square();
    a3_2.square()
        .add(&a1_2.mul(a1).mul(&a3_2).mul(a3))
        .add(&a1_4.mul(&a4.square()))
        .add(&a1_4.mul(a2).mul(&a3_2))
        .add(&a1_4.mul(a1).mul(a3).mul(a4))
        .add(&a1_4.mul(&a1_2).mul(a6))
}

/// Change of coordinates `x = u^2 x' + r`, `y = u^3 y' + u^2 s x' + w`.
pub fn admissible_transform(
    m: &WeierstrassModel,
    u: Fe,
    r: &UniPoly,
    s: &UniPoly,
    w: &UniPoly,
) -> Result<WeierstrassModel> {
    let ui = u
        .checked_inv()
        .ok_or_else(|| Error::InvalidInput("u must be a unit".into()))?;
    let b = transform(&m.a, r, s, w);
    let scaled: [UniPoly; 5] = std::array::from_fn(|i| b[i].scale(ui.pow(WEIGHTS[i] as u128)));
    WeierstrassModel::new(scaled)
}

fn transform(a: &[UniPoly; 5], r: &UniPoly, s: &UniPoly, w: &UniPoly) -> [UniPoly; 5] {
    let [a1, a2, a3, a4, a6] = a;
    let r2 = r.square();
    [
        a1.clone(),
        a2.add(&s.mul(a1)).add(r).add(&s.square()),
        a3.add(&r.mul(a1)),
        a4.add(&s.mul(a3)).add(&w.add(&r.mul(s)).mul(a1)).add(&r2),
        a6.add(&r.mul(a4))
            .add(&r2.mul(a2))
            .add(&r2.mul(r))
            .add(&w.mul(a3))
            .add(&w.square())
            .add(&r.mul(w).mul(a1)),
    ]
}

/// A closed point of `P^1`: a monic irreducible `π` over the base field
/// together with one of its roots, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Finite { pi: UniPoly, root: Fe },
    Infinity,
}

impl Place {
    pub fn finite(pi: &UniPoly) -> Result<Place> {
        let d = pi
            .degree()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::InvalidInput("place polynomial must be non-constant".into()))?;
        if !pi.leading().unwrap().is_one() {
            return Err(Error::InvalidInput("place polynomial must be monic".into()));
        }
        let tower = FieldTower::new(pi.field().bits())?;
        let orbits = uni_roots(pi, &tower, d as u32)?;
        match orbits.as_slice() {
            [o] if o.ext_degree as usize == d && o.multiplicity == 1 => Ok(Place::Finite {
                pi: pi.clone(),
                root: o.root,
            }),
            _ => Err(Error::InvalidInput(
                "place polynomial is not irreducible".into(),
            )),
        }
    }

    /// Number of geometric points over the place.
    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite { pi, .. } => pi.degree().unwrap() as u32,
            Place::Infinity => 1,
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct FinitePlace {
            pi: Vec<String>,
            root: String,
            degree: u32,
        }
        match self {
            Place::Finite { pi, root } => FinitePlace {
                pi: uni_to_hex(pi),
                root: root.to_hex(),
                degree: pi.degree().unwrap() as u32,
            }
            .serialize(s),
            Place::Infinity => s.serialize_str("INFINITY"),
        }
    }
}

fn minimal_polynomial(root: Fe, base: &'static GaloisField, tower: &FieldTower) -> Result<UniPoly> {
    let level = tower.level_of(root.field()).ok_or(Error::Incompatible)?;
    let mut conj = vec![root];
    let mut r = root.frobenius(base.bits());
    while r != root {
        conj.push(r);
        r = r.frobenius(base.bits());
    }
    let big = UniPoly::from_roots(root.field(), &conj);
    let emb = tower.embedding(1, level)?;
    let coeffs = big
        .coeffs()
        .iter()
        .map(|&c| emb.preimage(c).ok_or(Error::Incompatible))
        .collect::<Result<Vec<_>>>()?;
    Ok(UniPoly::new(base, coeffs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub place: Place,
    /// Geometric points over the place, all with this fibre.
    pub degree: u32,
    pub kodaira: KodairaType,
    pub m_v: u32,
    pub e_v: u32,
    /// Valuation of the discriminant of the minimal model.
    pub v_delta: u32,
    pub delta_v: i64,
    pub n_v: u32,
    pub delta_min_ok: bool,
    /// `N_v <= floor((e_v + δ_v)/2)`.
    pub n_v_bound_ok: bool,
    pub minimalizations: u32,
}

/// Tate's algorithm at a place, over the splitting field of the place.
pub fn tate_fiber(m: &WeierstrassModel, place: &Place) -> Result<FiberReport> {
    if m.is_quasi_elliptic() {
        return Err(Error::InvalidInput("model is quasi-elliptic".into()));
    }
    if m.discriminant().is_zero() {
        return Err(Error::InvalidInput(
            "discriminant vanishes identically".into(),
        ));
    }
    let local: [UniPoly; 5] = match place {
        Place::Infinity => m.at_infinity(),
        Place::Finite { root, .. } => {
            let tower = FieldTower::new(m.field.bits())?;
            let level = tower.level_of(root.field()).ok_or(Error::Incompatible)?;
            let emb = tower.embedding(1, level)?;
            std::array::from_fn(|i| m.a[i].embed(&emb).translate(*root))
        }
    };
    let (kodaira, v_delta, minimalizations) = tate_at_zero(local)?;
    let row = fiber_table(kodaira);
    let delta_v = v_delta as i64 - row.e_v as i64;
    Ok(FiberReport {
        place: place.clone(),
        degree: place.degree(),
        kodaira,
        m_v: row.m_v,
        e_v: row.e_v,
        v_delta,
        delta_v,
        n_v: row.n_v,
        delta_min_ok: delta_v >= row.delta_min as i64,
        n_v_bound_ok: 2 * row.n_v as i64 <= row.e_v as i64 + delta_v,
        minimalizations,
    })
}

fn val(p: &UniPoly) -> usize {
    p.valuation().unwrap_or(usize::MAX)
}

fn constant(f: &'static GaloisField, c: Fe) -> UniPoly {
    UniPoly::new(f, vec![c])
}

fn unexpected(step: &str) -> Error {
    Error::Certification(format!("Tate's algorithm: divisibility failed at {step}"))
}

/// Kodaira type at `t = 0`, the valuation of the minimal discriminant and
/// the number of minimalization steps.
fn tate_at_zero(mut a: [UniPoly; 5]) -> Result<(KodairaType, u32, u32)> {
    let f = a[0].field();
    let zero = UniPoly::zero(f);
    let tt = UniPoly::t(f);
    for steps in 0..=MINIMALIZATION_CAP {
        let disc = discriminant_of(&a);
        let vd = disc.valuation().ok_or(Error::ZeroPolynomial)? as u32;
        let done = |k| Ok((k, vd, steps));
        if vd == 0 {
            return done(KodairaType::I(0));
        }
        // move the singular point of the reduction to (0, 0)
        let c: Vec<Fe> = a.iter().map(|p| p.coeff(0)).collect();
        let (x0, y0) = if !c[0].is_zero() {
            let x0 = c[2] / c[0];
            (x0, (x0.square() + c[3]) / c[0])
        } else {
            let x0 = c[3].sqrt();
            (
                x0,
                (x0.square() * x0 + c[1] * x0.square() + c[3] * x0 + c[4]).sqrt(),
            )
        };
        a = transform(&a, &constant(f, x0), &zero, &constant(f, y0));
        if val(&a[2]) < 1 || val(&a[3]) < 1 || val(&a[4]) < 1 {
            return Err(unexpected("singular point"));
        }
        if val(&a[0]) == 0 {
            return done(KodairaType::I(vd));
        }
        if val(&a[4]) < 2 {
            return done(KodairaType::II);
        }
        let [a1, a2, a3, a4, a6] = &a;
        let b8 = a1
            .square()
            .mul(a6)
            .add(&a1.mul(a3).mul(a4))
            .add(&a2.mul(&a3.square()))
            .add(&a4.square());
        if val(&b8) < 3 {
            return done(KodairaType::III);
        }
        if val(&a3.square()) < 3 {
            return done(KodairaType::IV);
        }
        let s = constant(f, a[1].coeff(0).sqrt());
        a = transform(&a, &zero, &s, &zero);
        let w = tt.scale(a[4].coeff(2).sqrt());
        a = transform(&a, &zero, &zero, &w);
        if val(&a[0]) < 1 || val(&a[1]) < 1 || val(&a[2]) < 2 || val(&a[3]) < 2 || val(&a[4]) < 3 {
            return Err(unexpected("step 6"));
        }
        // P(T) = T^3 + a21 T^2 + a42 T + a63; a repeated root is sqrt(a42)
        let (p2, p1, p0) = (a[1].coeff(1), a[3].coeff(2), a[4].coeff(3));
        let alpha = p1.sqrt();
        let p_alpha = alpha.square() * alpha + p2 * alpha.square() + p1 * alpha + p0;
        if !p_alpha.is_zero() {
            return done(KodairaType::IStar(0));
        }
        let triple = p2 == alpha;
        a = transform(&a, &tt.scale(alpha), &zero, &zero);
        if !triple {
            if val(&a[3]) < 3 || val(&a[4]) < 4 {
                return Err(unexpected("step 7"));
            }
            let a21 = a[1].coeff(1);
            for n in 1..=vd.max(1) {
                if n % 2 == 1 {
                    let k = ((n + 3) / 2) as usize;
                    if !a[2].coeff(k).is_zero() {
                        return done(KodairaType::IStar(n));
                    }
                    let beta = a[4].coeff(n as usize + 3).sqrt();
                    a = transform(&a, &zero, &zero, &UniPoly::monomial(beta, k));
                } else {
                    if !a[3].coeff(((n + 4) / 2) as usize).is_zero() {
                        return done(KodairaType::IStar(n));
                    }
                    let gamma = (a[4].coeff(n as usize + 3) / a21).sqrt();
                    a = transform(
                        &a,
                        &UniPoly::monomial(gamma, ((n + 2) / 2) as usize),
                        &zero,
                        &zero,
                    );
                }
            }
            return Err(Error::Certification(
                "Tate's algorithm: I*_n loop did not terminate".into(),
            ));
        }
        if val(&a[1]) < 2 || val(&a[3]) < 3 || val(&a[4]) < 4 {
            return Err(unexpected("step 8"));
        }
        if !a[2].coeff(2).is_zero() {
            return done(KodairaType::IVStar);
        }
        let beta = a[4].coeff(4).sqrt();
        a = transform(&a, &zero, &zero, &UniPoly::monomial(beta, 2));
        if val(&a[2]) < 3 || val(&a[4]) < 5 {
            return Err(unexpected("step 9"));
        }
        if val(&a[3]) < 4 {
            return done(KodairaType::IIIStar);
        }
        if val(&a[4]) < 6 {
            return done(KodairaType::IIStar);
        }
        a = std::array::from_fn(|i| a[i].shift_down(WEIGHTS[i]));
    }
    Err(Error::Certification(format!(
        "model is not minimal after {MINIMALIZATION_CAP} steps"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerLedger {
    pub fibers: Vec<FiberReport>,
    /// `Σ deg(v)·(e_v + δ_v)`.
    pub total: u32,
    /// No place needed a minimalization step.
    pub minimal: bool,
    pub k3: bool,
}

/// Singular fibres at all places, including infinity.
pub fn euler_ledger(m: &WeierstrassModel, max_ext: u32) -> Result<EulerLedger> {
    if m.is_quasi_elliptic() {
        return Err(Error::InvalidInput("model is quasi-elliptic".into()));
    }
    let disc = m.discriminant();
    if disc.is_zero() {
        return Err(Error::InvalidInput(
            "discriminant vanishes identically".into(),
        ));
    }
    let tower = FieldTower::new(m.field.bits())?;
    let orbits = uni_roots(&disc, &tower, max_ext)?;
    let deg = disc.degree().unwrap();
    if root_count(&orbits) != deg {
        return Err(Error::Certification(format!(
            "discriminant roots beyond extension degree {max_ext}"
        )));
    }
    let mut places = orbits
        .iter()
        .map(|o| {
            Ok(Place::Finite {
                pi: minimal_polynomial(o.root, m.field, &tower)?,
                root: o.root,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if deg < K3_DISC_DEGREE {
        places.push(Place::Infinity);
    }
    let fibers = places
        .par_iter()
        .map(|p| tate_fiber(m, p))
        .collect::<Result<Vec<_>>>()?;
    let total = fibers.iter().map(|f| f.degree * f.v_delta).sum();
    let minimal = fibers.iter().all(|f| f.minimalizations == 0);
    Ok(EulerLedger {
        total,
        minimal,
        k3: minimal && total as usize == K3_DISC_DEGREE,
        fibers,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointSum {
    /// `Σ deg(v)·N_v`.
    pub sum: u32,
    pub bound_ok: bool,
    /// At the maximum 12, every singular fibre has an admissible type and
    /// minimal `δ_v`.
    pub extremal_ok: bool,
}

pub fn max_disjoint_sum(ledger: &EulerLedger) -> DisjointSum {
    let sum = ledger.fibers.iter().map(|f| f.degree * f.n_v).sum();
    let extremal_ok = sum < 12
        || ledger.fibers.iter().all(|f| {
            extremal_type_allowed(f.kodaira) && f.delta_v == fiber_table(f.kodaira).delta_min as i64
        });
    DisjointSum {
        sum,
        bound_ok: sum <= 12,
        extremal_ok,
    }
}

pub fn is_square_poly(p: &UniPoly) -> bool {
    p.is_square()
}

/// Shapes of local normal forms at `t = 0` with `a1 = t^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdditiveForm {
    /// Type `I*_{2n}`.
    IStarEven(u32),
    IStarOne,
    IVStar,
    IIIStar,
}

/// Builds the model from the primed coefficients `a2', a3', a4', a6'`.
pub fn normal_form(
    form: AdditiveForm,
    a2p: &UniPoly,
    a3p: &UniPoly,
    a4p: &UniPoly,
    a6p: &UniPoly,
) -> Result<WeierstrassModel> {
    let f = a2p.field();
    let unit = |p: &UniPoly, name: &str| {
        if p.coeff(0).is_zero() {
            Err(Error::InvalidInput(format!(
                "{name} must not vanish at t = 0"
            )))
        } else {
            Ok(())
        }
    };
    // shifts of a2, a3, a4, a6
    let shifts: [usize; 4] = match form {
        AdditiveForm::IStarEven(n) => {
            unit(a2p, "a2'")?;
            unit(a4p, "a4'")?;
            let n = n as usize;
            [1, n + 2, n + 2, 2 * n + 4]
        }
        AdditiveForm::IStarOne => {
            unit(a2p, "a2'")?;
            unit(a3p, "a3'")?;
            [1, 2, 3, 4]
        }
        AdditiveForm::IVStar => {
            unit(a3p, "a3'")?;
            [2, 2, 3, 4]
        }
        AdditiveForm::IIIStar => {
            unit(a4p, "a4'")?;
            [2, 3, 3, 5]
        }
    };
    WeierstrassModel::new([
        UniPoly::monomial(f.one(), 2),
        a2p.shift_up(shifts[0]),
        a3p.shift_up(shifts[1]),
        a4p.shift_up(shifts[2]),
        a6p.shift_up(shifts[3]),
    ])
}

/// Normal form with an `I*_{2n}` fibre at `t = 0`.
pub fn normal_form_istar(
    n: u32,
    a2p: &UniPoly,
    a3p: &UniPoly,
    a4p: &UniPoly,
    a6p: &UniPoly,
) -> Result<WeierstrassModel> {
    normal_form(AdditiveForm::IStarEven(n), a2p, a3p, a4p, a6p)
}

/// `S = a3'^3 + t a2' a3'^2 + t^2 a3' a4' + t^4 a6'`; for the `I*_0` form
/// `Δ = t^8 (a3'^4 + t^4 a4'^2) + t^12 S`.
fn square_part(a2: &UniPoly, a3: &UniPoly, a4: &UniPoly, a6: &UniPoly) -> UniPoly {
    let a3_2 = a3.square();
    a3_2.mul(a3)
        .add(&a2.mul(&a3_2).shift_up(1))
        .add(&a3.mul(a4).shift_up(2))
        .add(&a6.shift_up(4))
}

/// Degree bounds of `a2', a3', a4', a6'` in the `I*_0` form.
pub const ISTAR0_BOUNDS: [usize; 4] = [3, 4, 6, 8];

/// Adjusts `a2'(0)`, the linear coefficient of `a4'` and the odd
/// coefficients of `a6'` so that the discriminant of the `I*_0` normal form
/// becomes a square. Requires `a3'(0) != 0`.
pub fn square_disc_constraints_istar0(
    a2p: &UniPoly,
    a3p: &UniPoly,
    a4p: &UniPoly,
    a6p: &UniPoly,
) -> Result<[UniPoly; 4]> {
    let f = a2p.field();
    if a3p.coeff(0).is_zero() {
        return Err(Error::InvalidInput("a3'(0) must be nonzero".into()));
    }
    let mut c: Vec<Vec<Fe>> = [a2p, a3p, a4p, a6p]
        .iter()
        .zip(ISTAR0_BOUNDS)
        .map(|(p, b)| {
            if p.degree().map_or(false, |d| d > b) {
                return Err(Error::InvalidInput(format!("degree exceeds {b}")));
            }
            Ok((0..=b).map(|i| p.coeff(i)).collect())
        })
        .collect::<Result<_>>()?;
    let s_coeff = |c: &Vec<Vec<Fe>>, j: usize| {
        let p: Vec<UniPoly> = c.iter().map(|v| UniPoly::new(f, v.clone())).collect();
        square_part(&p[0], &p[1], &p[2], &p[3]).coeff(j)
    };
    // (coefficient of S, which polynomial, which coefficient)
    let plan = [
        (1, 0, 0),
        (3, 2, 1),
        (5, 3, 1),
        (7, 3, 3),
        (9, 3, 5),
        (11, 3, 7),
    ];
    for (j, poly, idx) in plan {
        c[poly][idx] = f.zero();
        let c0 = s_coeff(&c, j);
        c[poly][idx] = f.one();
        let slope = s_coeff(&c, j) + c0;
        if slope.is_zero() {
            return Err(Error::Certification(format!(
                "coefficient {j} is not solvable"
            )));
        }
        c[poly][idx] = c0 / slope;
    }
    Ok(std::array::from_fn(|i| UniPoly::new(f, c[i].clone())))
}

/// Symbolic form of the two lowest square constraints, over `GF(2)` with
/// the coefficients of `a2', a3', a4', a6'` as indeterminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicConstraints {
    /// `[t^1] S = a'30^2 (a'20 + a'31)`, so `a'20 = a'31`.
    pub a20_equals_a31: bool,
    /// With `a'20 = a'31`, `[t^3] S = a'30 a'41 + a'22 a'30^2 + a'30^2 a'33 + a'31 a'40`.
    pub a41_formula: bool,
}

pub fn square_disc_symbolic() -> Result<SymbolicConstraints> {
    let f = crate::field::gf(1)?;
    let offsets = [0usize, 4, 9, 16];
    let nvars = 26;
    let tvar = 25;
    let var = |i: usize| MultiPoly::var(f, nvars, i);
    let coef = |p: usize, j: usize| var(offsets[p] + j);
    let poly = |p: usize| {
        (0..=ISTAR0_BOUNDS[p]).fold(MultiPoly::zero(f, nvars), |acc, j| {
            acc.add(&coef(p, j).mul(&var(tvar).pow(j as u32)))
        })
    };
    let (a2, a3, a4, a6) = (poly(0), poly(1), poly(2), poly(3));
    let t = var(tvar);
    let a3_2 = a3.square();
    let s = a3_2
        .mul(&a3)
        .add(&t.mul(&a2).mul(&a3_2))
        .add(&t.square().mul(&a3).mul(&a4))
        .add(&t.pow(4).mul(&a6));
    let t_coeff = |p: &MultiPoly, k: u16| {
        MultiPoly::from_terms(
            f,
            nvars,
            p.terms().filter(|(e, _)| e[tvar] == k).map(|(e, c)| {
                let mut e: Exp = e.clone();
                e[tvar] = 0;
                (e, *c)
            }),
        )
    };
    let s1 = t_coeff(&s, 1)?;
    let a30_2 = coef(1, 0).square();
    let a20_equals_a31 = s1 == a30_2.mul(&coef(0, 0).add(&coef(1, 1)));
    let subs: Vec<MultiPoly> = (0..nvars)
        .map(|i| if i == offsets[0] { coef(1, 1) } else { var(i) })
        .collect();
    let s3 = t_coeff(&s, 3)?.compose(&subs);
    let expected = coef(1, 0)
        .mul(&coef(2, 1))
        .add(&coef(0, 2).mul(&a30_2))
        .add(&a30_2.mul(&coef(1, 3)))
        .add(&coef(1, 1).mul(&coef(2, 0)));
    Ok(SymbolicConstraints {
        a20_equals_a31,
        a41_formula: s3 == expected,
    })
}

/// Uniform random model with `deg a_i <= 2i`.
pub fn random_model<R: Rng + ?Sized>(field: &'static GaloisField, rng: &mut R) -> WeierstrassModel {
    let a = std::array::from_fn(|i| {
        UniPoly::new(
            field,
            (0..=2 * WEIGHTS[i]).map(|_| field.random(rng)).collect(),
        )
    });
    WeierstrassModel::new(a).expect("degrees within bounds")
}

/// Model with two `I*_4` fibres, at `t = 0` and at infinity.
pub fn two_istar4_model(c: Fe) -> Result<WeierstrassModel> {
    let f = c.field();
    if c.is_zero() {
        return Err(Error::InvalidInput("c must be nonzero".into()));
    }
    let one = f.one();
    WeierstrassModel::new([
        UniPoly::monomial(one, 1),
        UniPoly::monomial(one, 1).add(&UniPoly::monomial(one, 3)),
        UniPoly::zero(f),
        UniPoly::zero(f),
        UniPoly::monomial(c, 6),
    ])
}

pub fn parse_place(field: &'static GaloisField, s: &str) -> Result<Place> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(Place::Infinity);
    }
    let coeffs = s
        .split(',')
        .map(|h| parse_fe(field, h.trim()))
        .collect::<Result<Vec<_>>>()?;
    Place::finite(&UniPoly::new(field, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn up(f: &'static GaloisField, bits: &[u128]) -> UniPoly {
        UniPoly::from_bits(f, bits)
    }

    #[test]
    fn table_rows() {
        assert_eq!(
            fiber_table(KodairaType::IStar(0)),
            FiberTableRow {
                m_v: 5,
                delta_min: 2,
                e_v: 6,
                n_v: 4
            }
        );
        assert_eq!(
            fiber_table(KodairaType::II),
            FiberTableRow {
                m_v: 1,
                delta_min: 2,
                e_v: 2,
                n_v: 0
            }
        );
        assert_eq!(
            fiber_table(KodairaType::IVStar),
            FiberTableRow {
                m_v: 7,
                delta_min: 0,
                e_v: 8,
                n_v: 4
            }
        );
        assert_eq!(fiber_table(KodairaType::IStar(1)).delta_min, 1);
        assert_eq!(fiber_table(KodairaType::IStar(4)).n_v, 6);
        assert_eq!(fiber_table(KodairaType::I(7)).n_v, 3);
    }

    #[test]
    fn kodaira_names_roundtrip() {
        for k in [
            KodairaType::I(0),
            KodairaType::I(12),
            KodairaType::II,
            KodairaType::III,
            KodairaType::IV,
            KodairaType::IStar(0),
            KodairaType::IStar(3),
            KodairaType::IVStar,
            KodairaType::IIIStar,
            KodairaType::IIStar,
        ] {
            assert_eq!(k.to_string().parse::<KodairaType>().unwrap(), k);
        }
        assert!("V".parse::<KodairaType>().is_err());
    }

    #[test]
    fn discriminant_matches_b_invariants() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = random_model(k, &mut rng);
            let [a1, a2, a3, a4, a6] = m.coefficients();
            let b2 = a1.square();
            let b4 = a1.mul(a3);
            let b6 = a3.square();
            let b8 = a1
                .square()
                .mul(a6)
                .add(&a1.mul(a3).mul(a4))
                .add(&a2.mul(&a3.square()))
                .add(&a4.square());
            let oracle = b2
                .square()
                .mul(&b8)
                .add(&b6.square())
                .add(&b2.mul(&b4).mul(&b6));
            assert_eq!(m.discriminant(), oracle);
        }
    }

    #[test]
    fn discriminant_examples() {
        let k = gf(1).unwrap();
        let z = UniPoly::zero(k);
        let m =
            WeierstrassModel::new([up(k, &[0, 1]), z.clone(), up(k, &[1]), z.clone(), z.clone()])
                .unwrap();
        assert_eq!(m.discriminant(), up(k, &[1, 0, 0, 1]));
        let m =
            WeierstrassModel::new([up(k, &[1]), z.clone(), up(k, &[0, 1]), z.clone(), z.clone()])
                .unwrap();
        assert_eq!(m.discriminant(), up(k, &[0, 0, 0, 1, 1]));
        assert!(is_square_poly(&up(k, &[1, 0, 1])));
        assert!(!is_square_poly(&up(k, &[0, 0, 0, 1])));
        assert!(!is_square_poly(&up(k, &[0, 0, 0, 1, 1])));
    }

    #[test]
    fn a1_equal_t_low_order_terms() {
        let k = gf(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let r = random_model(k, &mut rng);
            let mut a = r.coefficients().clone();
            a[0] = up(k, &[0, 1]);
            let m = WeierstrassModel::new(a).unwrap();
            let c = m.a3().coeff(0);
            let d = m.discriminant();
            assert_eq!(d.coeff(0), c.pow(4));
            assert!(d.coeff(1).is_zero() && d.coeff(2).is_zero());
            assert_eq!(d.coeff(3), c.pow(3));
        }
    }

    #[test]
    fn multiplicative_places() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut seen = 0;
        for _ in 0..5 {
            let l = euler_ledger(&random_model(k, &mut rng), 24).unwrap();
            for f in &l.fibers {
                if let KodairaType::I(n) = f.kodaira {
                    assert_eq!(n, f.v_delta);
                    assert_eq!(f.delta_v, 0);
                    seen += 1;
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn istar0_form() {
        let k = gf(4).unwrap();
        let m = normal_form_istar(
            0,
            &up(k, &[1, 2]),
            &up(k, &[1]),
            &up(k, &[3, 1]),
            &up(k, &[5]),
        )
        .unwrap();
        let r = tate_fiber(&m, &Place::finite(&up(k, &[0, 1])).unwrap()).unwrap();
        assert_eq!(r.kodaira, KodairaType::IStar(0));
        assert_eq!(r.v_delta, 8);
        assert_eq!(r.delta_v, 2);
        assert!(r.delta_min_ok);
    }

    #[test]
    fn istar2_form_has_large_defect() {
        let k = gf(4).unwrap();
        let m = normal_form_istar(
            1,
            &up(k, &[1, 2]),
            &up(k, &[1, 1]),
            &up(k, &[3, 1]),
            &up(k, &[5]),
        )
        .unwrap();
        let r = tate_fiber(&m, &Place::finite(&up(k, &[0, 1])).unwrap()).unwrap();
        assert_eq!(r.kodaira, KodairaType::IStar(2));
        assert!(r.delta_v >= 4, "{r:?}");
    }

    #[test]
    fn star_forms() {
        let k = gf(4).unwrap();
        let origin = Place::finite(&up(k, &[0, 1])).unwrap();
        let cases = [
            (AdditiveForm::IStarOne, KodairaType::IStar(1)),
            (AdditiveForm::IVStar, KodairaType::IVStar),
            (AdditiveForm::IIIStar, KodairaType::IIIStar),
        ];
        for (form, kind) in cases {
            let m = normal_form(
                form,
                &up(k, &[1, 1]),
                &up(k, &[1, 2]),
                &up(k, &[1, 3]),
                &up(k, &[7, 1]),
            )
            .unwrap();
            let r = tate_fiber(&m, &origin).unwrap();
            assert_eq!(r.kodaira, kind);
            assert!(r.delta_min_ok);
            if kind == KodairaType::IIIStar {
                assert!(r.delta_v >= 3);
            }
        }
    }

    #[test]
    fn forms_reject_bad_units() {
        let k = gf(2).unwrap();
        let z = up(k, &[0, 1]);
        let one = up(k, &[1]);
        assert!(normal_form_istar(0, &z, &one, &one, &one).is_err());
        assert!(normal_form(AdditiveForm::IIIStar, &one, &one, &z, &one).is_err());
        assert!(normal_form_istar(3, &one, &up(k, &[1, 1, 1]), &one, &one).is_err());
    }

    #[test]
    fn random_models_sum_to_24() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let m = random_model(k, &mut rng);
            let l = euler_ledger(&m, 24).unwrap();
            assert!(l.minimal);
            assert_eq!(l.total, 24);
            for f in &l.fibers {
                assert!(f.delta_min_ok && f.n_v_bound_ok, "{f:?}");
            }
            assert!(max_disjoint_sum(&l).bound_ok);
        }
    }

    #[test]
    fn two_istar4() {
        let k = gf(2).unwrap();
        let m = two_istar4_model(k.one()).unwrap();
        let l = euler_ledger(&m, 8).unwrap();
        let kinds: Vec<KodairaType> = l.fibers.iter().map(|f| f.kodaira).collect();
        assert_eq!(kinds, vec![KodairaType::IStar(4), KodairaType::IStar(4)]);
        assert_eq!(l.total, 24);
        let d = max_disjoint_sum(&l);
        assert_eq!(d.sum, 12);
        assert!(d.extremal_ok);
    }

    #[test]
    fn square_discriminant_istar0() {
        let k = gf(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rnd = |rng: &mut ChaCha8Rng, d: usize| {
            UniPoly::new(k, (0..=d).map(|_| k.random_nonzero(rng)).collect())
        };
        let [a2, a3, a4, a6] = square_disc_constraints_istar0(
            &rnd(&mut rng, 3),
            &rnd(&mut rng, 4),
            &rnd(&mut rng, 6),
            &rnd(&mut rng, 8),
        )
        .unwrap();
        assert_eq!(a2.coeff(0), a3.coeff(1));
        let a30 = a3.coeff(0);
        let a41 =
            (a2.coeff(2) * a30.square() + a30.square() * a3.coeff(3) + a3.coeff(1) * a4.coeff(0))
                / a30;
        assert_eq!(a4.coeff(1), a41);
        let m = normal_form_istar(0, &a2, &a3, &a4, &a6).unwrap();
        assert!(is_square_poly(&m.discriminant()));
        let l = euler_ledger(&m, 24).unwrap();
        assert_eq!(l.total, 24);
        for f in &l.fibers {
            assert!(f.v_delta % 2 == 0);
        }
    }

    #[test]
    fn symbolic_constraints() {
        let s = square_disc_symbolic().unwrap();
        assert!(s.a20_equals_a31);
        assert!(s.a41_formula);
    }

    #[test]
    fn square_preserved_by_admissible_transform() {
        let k = gf(3).unwrap();
        let m = normal_form_istar(0, &up(k, &[1]), &up(k, &[1]), &up(k, &[1]), &up(k, &[0, 1]))
            .unwrap();
        let u = k.generator();
        let r = up(k, &[0, 0, 3]);
        let s = up(k, &[0, 5]).scale(u.pow(4).inv());
        let w = up(k, &[0, 0, 1]);
        let n = admissible_transform(&m, u.square(), &r, &s, &w).unwrap();
        assert_eq!(n.discriminant(), m.discriminant().scale(u.pow(24).inv()));
    }

    #[test]
    fn quasi_elliptic_rejected() {
        let k = gf(2).unwrap();
        let z = UniPoly::zero(k);
        let m =
            WeierstrassModel::new([z.clone(), z.clone(), z.clone(), up(k, &[1]), up(k, &[0, 1])])
                .unwrap();
        assert!(m.is_quasi_elliptic());
        assert!(euler_ledger(&m, 4).is_err());
        assert!(quasi_elliptic_allowed(KodairaType::IStar(2)));
        assert!(!quasi_elliptic_allowed(KodairaType::IStar(1)));
        assert!(quasi_elliptic_reduced(KodairaType::III));
        assert!(!quasi_elliptic_reduced(KodairaType::IIStar));
    }

    #[test]
    fn json_roundtrip() {
        let k = gf(4).unwrap();
        let m = random_model(k, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(WeierstrassModel::from_json(&m.to_json()).unwrap(), m);
        assert!(WeierstrassModel::from_json(
            r#"{"field":{"m":2},"a":[["1","1","1","1"],[],[],[],[]]}"#
        )
        .is_err());
    }

    #[test]
    fn place_validation() {
        let k = gf(1).unwrap();
        assert!(Place::finite(&up(k, &[1, 1, 1])).is_ok());
        assert!(Place::finite(&up(k, &[1, 0, 1])).is_err());
        assert_eq!(parse_place(k, "inf").unwrap(), Place::Infinity);
    }
}
