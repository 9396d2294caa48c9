//! Acceptance criteria. Every check is exact (tolerance 0); each criterion
//! prints one PASS/FAIL line.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quartic_core::error::Error;
use quartic_core::families::{
    build_family, family_a3, family_special, klein_form, random_form, strange_points,
    verify_dual_plane, verify_insep, FamilyKind, PlaneCurve,
};
use quartic_core::fibrations::{
    euler_ledger, fiber_table, is_square_poly, max_disjoint_sum, normal_form, normal_form_istar,
    random_model, square_disc_constraints_istar0, square_disc_symbolic, tate_fiber,
    two_istar4_model, AdditiveForm, KodairaType, Place, WeierstrassModel, ISTAR0_BOUNDS,
};
use quartic_core::field::{gf, Fe, FieldTower, GaloisField};
use quartic_core::gauss_dual::{configuration_report_in, degree_ledger, dual_plane_kernel};
use quartic_core::pic_lattice::{
    reflect_reduce, shioda_tate_lower, AdeType, LatticeBuilder, REFLECTION_CAP,
};
use quartic_core::poly::MultiPoly;
use quartic_core::singularities::{
    find_singular_points, theorem_checks, AnalysisOptions, QuarticSurface, SingularLocusReport,
    SingularityKind,
};
use quartic_core::uni::UniPoly;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn opts() -> AnalysisOptions {
    AnalysisOptions::default()
}

fn up(f: &'static GaloisField, bits: &[u128]) -> UniPoly {
    UniPoly::from_bits(f, bits)
}

fn random_poly(f: &'static GaloisField, deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    UniPoly::new(f, (0..=deg).map(|_| f.random(rng)).collect())
}

fn random_unit_poly(f: &'static GaloisField, deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    let mut c: Vec<Fe> = (0..=deg).map(|_| f.random(rng)).collect();
    c[0] = f.random_nonzero(rng);
    UniPoly::new(f, c)
}

fn c1_klein_strange_points() -> Check {
    let k = gf(1).map_err(e)?;
    let s = strange_points(&klein_form(2, k).map_err(e)?, 6, 0).map_err(e)?;
    ensure(
        s.reduced() && s.certified,
        "critical locus not certified reduced",
    )?;
    ensure(
        s.geometric_count() == 7,
        format!("{} points", s.geometric_count()),
    )?;
    let tower = FieldTower::new(1).map_err(e)?;
    let mut seen = Vec::new();
    for p in &s.points {
        ensure(!p.on_curve, "strange point on the curve")?;
        ensure(
            3 % p.ext_degree == 0,
            format!("point needs degree {}", p.ext_degree),
        )?;
        let emb = tower.embedding(p.ext_degree, 3).map_err(e)?;
        let mut q: Vec<Fe> = p.point.iter().map(|&c| emb.apply(c)).collect();
        for _ in 0..p.ext_degree {
            let inv = q[1].checked_inv().ok_or("x2 = 0")?;
            let n: Vec<Fe> = q.iter().map(|&c| c * inv).collect();
            let eps = n[0];
            ensure(
                eps.pow(7).is_one() && n[2] == eps.pow(3),
                format!("{n:?} not (ε, 1, ε³)"),
            )?;
            seen.push(eps);
            q = q.iter().map(|c| c.frobenius(1)).collect();
        }
    }
    seen.sort();
    seen.dedup();
    ensure(seen.len() == 7, "ε values not distinct")?;
    Ok("7 reduced points (ε, 1, ε³), ε⁷ = 1, over GF(8)".into())
}

fn c2_even_degree_counts() -> Check {
    let k = gf(3).map_err(e)?;
    let mut out = Vec::new();
    for (d, s) in [(2usize, 1usize), (4, 7), (6, 21)] {
        let mut certified = 0;
        for seed in 0..3u64 {
            let b = random_form(k, 3, d, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = PlaneCurve::new(b).map_err(e)?;
            let l = strange_points(&b, 24, seed).map_err(e)?;
            ensure(
                l.expected == s,
                format!("expected count {} for d = {d}", l.expected),
            )?;
            if l.certified {
                certified += 1;
                ensure(
                    l.length == Some(s),
                    format!("d = {d}, seed {seed}: length {:?}", l.length),
                )?;
            }
        }
        ensure(certified > 0, format!("no certified member of degree {d}"))?;
        out.push(format!("d={d}: {s} ({certified}/3 certified)"));
    }
    Ok(out.join(", "))
}

fn c3_a3_family() -> Check {
    let k = gf(1).map_err(e)?;
    let x = family_a3(&klein_form(2, k).map_err(e)?).map_err(e)?;
    let r = find_singular_points(&x, &opts()).map_err(e)?;
    ensure(
        r.complete && r.count == 7,
        format!("{} singular points", r.count),
    )?;
    for p in &r.points {
        ensure(
            p.kind == SingularityKind::Biplanar
                && p.defect.finite() == Some(4)
                && p.an_index == Some(3),
            format!("point {:?}: {:?} defect {:?}", p.point, p.kind, p.defect),
        )?;
    }
    let l = degree_ledger(&r).map_err(e)?;
    ensure(l.product == 8, format!("product {}", l.product))?;
    Ok("7 biplanar A3 points, defect 4 each, product 8".into())
}

fn c4_special_family() -> Check {
    let k = gf(1).map_err(e)?;
    let x = family_special(&klein_form(2, k).map_err(e)?).map_err(e)?;
    let r = find_singular_points(&x, &opts()).map_err(e)?;
    ensure(
        r.complete && r.count == 14 && r.all_nodes(),
        format!("{} points, all nodes {}", r.count, r.all_nodes()),
    )?;
    let l = degree_ledger(&r).map_err(e)?;
    ensure(l.defect_sum == 28 && l.product == 8, format!("{l:?}"))?;
    let kd = dual_plane_kernel(&x).len();
    ensure(kd == 1, format!("kernel dimension {kd}"))?;
    Ok("14 nodes, defect sum 28, product 8, kernel dimension 1".into())
}

fn c5_insep_family() -> Check {
    let k = gf(4).map_err(e)?;
    let x = build_family(FamilyKind::Insep, k, 1, None).map_err(e)?;
    let r = verify_insep(&x, &opts()).map_err(e)?;
    ensure(
        r.lengths() == (8, 4, 17, 13),
        format!("lengths {:?}", r.lengths()),
    )?;
    ensure(r.node_at_vertex, "no node at x = 0")?;
    ensure(
        r.singular.count == 14 && r.singular.all_nodes(),
        format!("{} points", r.singular.count),
    )?;
    let p = r.ledger.as_ref().map(|l| l.product);
    ensure(p == Some(8), format!("product {p:?}"))?;
    Ok("lengths (8, 4, 17, 13), 14 nodes incl. the vertex, product 8".into())
}

fn c6_dual_plane_family() -> Check {
    let k = gf(3).map_err(e)?;
    let x = build_family(FamilyKind::DualPlane, k, 2, Some(k.zero())).map_err(e)?;
    let r = verify_dual_plane(&x, &opts()).map_err(e)?;
    ensure(
        r.singular.count == 14 && r.all_nodes,
        format!("{} points", r.singular.count),
    )?;
    let m = r.p_prime_multiplicity.and_then(|c| c.finite());
    ensure(m == Some(4), format!("multiplicity at P' {m:?}"))?;
    Ok("λ = 0: 14 nodes, multiplicity 4 at P'".into())
}

/// Seeded surfaces: every family over GF(8) and GF(16), random quartics and
/// quartics singular at (0:0:0:1).
fn corpus() -> Vec<(String, std::result::Result<QuarticSurface, Error>)> {
    let mut out = Vec::new();
    for m in [3u32, 4] {
        let k = gf(m).unwrap();
        for kind in [
            FamilyKind::A3,
            FamilyKind::Special,
            FamilyKind::Insep,
            FamilyKind::DualPlane,
        ] {
            for seed in 0..10u64 {
                let lambda = (kind == FamilyKind::DualPlane && seed % 2 == 1)
                    .then(|| k.random(&mut ChaCha8Rng::seed_from_u64(seed)));
                out.push((
                    format!("{kind:?} m={m} seed={seed}"),
                    build_family(kind, k, seed, lambda),
                ));
            }
        }
        for seed in 0..30u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let f = random_form(k, 4, 4, &mut rng);
            out.push((format!("random m={m} seed={seed}"), QuarticSurface::new(f)));
            let g = random_form(k, 4, 4, &mut rng);
            let g = MultiPoly::from_terms(
                k,
                4,
                g.terms()
                    .filter(|(e, _)| e[3] < 3)
                    .map(|(e, c)| (e.clone(), *c)),
            )
            .unwrap();
            out.push((
                format!("vertex-singular m={m} seed={seed}"),
                QuarticSurface::new(g),
            ));
        }
    }
    out
}

struct CorpusRun {
    size: usize,
    analyzed: Vec<(String, QuarticSurface, SingularLocusReport)>,
    excluded: usize,
}

fn analyze_corpus() -> CorpusRun {
    let all = corpus();
    let size = all.len();
    let mut analyzed = Vec::new();
    let mut excluded = 0;
    for (name, x) in all {
        let Ok(x) = x else {
            excluded += 1;
            continue;
        };
        match find_singular_points(&x, &opts()) {
            Ok(r) => analyzed.push((name, x, r)),
            Err(Error::NotZeroDimensional) => excluded += 1,
            Err(err) => panic!("{name}: {err}"),
        }
    }
    CorpusRun {
        size,
        analyzed,
        excluded,
    }
}

fn c7_theorem_predicates(run: &CorpusRun) -> Check {
    ensure(run.size >= 200, format!("corpus has {} members", run.size))?;
    let mut ledgers = 0;
    let mut fourteen = 0;
    for (name, _, r) in &run.analyzed {
        ensure(r.complete, format!("{name}: incomplete singular locus"))?;
        ensure(r.nu <= 14, format!("{name}: ν = {}", r.nu))?;
        if r.nu == 14 {
            fourteen += 1;
            ensure(
                r.all_nodes(),
                format!("{name}: 14 double points, not all nodes"),
            )?;
        }
        if r.nu >= 13 {
            ensure(
                r.points.iter().all(|p| p.rdp_certified()),
                format!("{name}: uncertified point"),
            )?;
        }
        let c = theorem_checks(r);
        ensure(c.all(), format!("{name}: {c:?}"))?;
        if let Ok(l) = degree_ledger(r) {
            ledgers += 1;
            ensure(l.bound_ok, format!("{name}: {l:?}"))?;
        }
    }
    Ok(format!(
        "{} surfaces ({} analyzed, {} non-normal excluded), {fourteen} with ν = 14, {ledgers} complete ledgers",
        run.size,
        run.analyzed.len(),
        run.excluded
    ))
}

fn c8_configurations(run: &CorpusRun) -> Check {
    let mut with_companions = 0;
    for (name, x, r) in &run.analyzed {
        let tower = x.tower();
        let pts = r.conjugate_points(&tower);
        if pts.is_empty() {
            continue;
        }
        let c = configuration_report_in(&tower, &pts).map_err(|err| format!("{name}: {err:?}"))?;
        ensure(
            c.violations_free(),
            format!(
                "{name}: {} collinear, {} coplanar",
                c.max_collinear, c.max_coplanar
            ),
        )?;
        if r.nu >= 9 {
            ensure(
                c.has_point_with_two_companions,
                format!("{name}: no point with two companions"),
            )?;
            with_companions += 1;
        }
    }
    Ok(format!(
        "no 4 collinear, at most 6 coplanar; {with_companions} members with ν ≥ 9 have a point with two companions"
    ))
}

fn c9_discriminant_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let k = gf(rng.gen_range(1..=6)).map_err(e)?;
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
        ensure(m.discriminant() == oracle, format!("model {i} disagrees"))?;
    }
    Ok("1000 random models agree exactly".into())
}

fn c10_tate() -> Check {
    let k = gf(4).map_err(e)?;
    let origin = Place::finite(&up(k, &[0, 1])).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut multiplicative = 0;
    for _ in 0..20 {
        let m = normal_form_istar(
            0,
            &random_unit_poly(k, 3, &mut rng),
            &random_poly(k, 4, &mut rng),
            &random_unit_poly(k, 6, &mut rng),
            &random_poly(k, 8, &mut rng),
        )
        .map_err(e)?;
        let has_a3 = !m.a3().coeff(2).is_zero();
        let r = tate_fiber(&m, &origin).map_err(e)?;
        ensure(
            r.kodaira == KodairaType::IStar(0),
            format!("n = 0 gave {}", r.kodaira),
        )?;
        if has_a3 {
            ensure(
                r.v_delta == 8 && r.delta_v == 2,
                format!("n = 0: vΔ {} δ {}", r.v_delta, r.delta_v),
            )?;
        }
        let m = normal_form_istar(
            1,
            &random_unit_poly(k, 3, &mut rng),
            &random_poly(k, 3, &mut rng),
            &random_unit_poly(k, 5, &mut rng),
            &random_poly(k, 6, &mut rng),
        )
        .map_err(e)?;
        let r = tate_fiber(&m, &origin).map_err(e)?;
        ensure(
            r.kodaira == KodairaType::IStar(2) && r.delta_v >= 4,
            format!("n = 1: {} δ {}", r.kodaira, r.delta_v),
        )?;
        let m = normal_form(
            AdditiveForm::IIIStar,
            &random_poly(k, 2, &mut rng),
            &random_poly(k, 3, &mut rng),
            &random_unit_poly(k, 5, &mut rng),
            &random_poly(k, 7, &mut rng),
        )
        .map_err(e)?;
        let r = tate_fiber(&m, &origin).map_err(e)?;
        ensure(
            r.kodaira == KodairaType::IIIStar && r.delta_v >= 3,
            format!("III*: {} δ {}", r.kodaira, r.delta_v),
        )?;
        let l = euler_ledger(&random_model(k, &mut rng), 24).map_err(e)?;
        for f in &l.fibers {
            if let KodairaType::I(n) = f.kodaira {
                multiplicative += 1;
                ensure(n == f.v_delta && f.delta_v == 0, format!("{f:?}"))?;
            }
        }
    }
    // n = 2 gives I*_4
    let m = normal_form_istar(
        2,
        &up(k, &[1, 1]),
        &up(k, &[3, 1]),
        &up(k, &[2, 1]),
        &up(k, &[5]),
    )
    .map_err(e)?;
    let r = tate_fiber(&m, &origin).map_err(e)?;
    ensure(
        r.kodaira == KodairaType::IStar(4),
        format!("n = 2 gave {}", r.kodaira),
    )?;
    Ok(format!(
        "I*0 vΔ=8 δ=2; n=1 δ≥4; III* δ≥3; {multiplicative} multiplicative places with δ=0"
    ))
}

fn square_family_member(seed: u64) -> std::result::Result<WeierstrassModel, String> {
    let k = gf(4).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [b2, b3, b4, b6] = ISTAR0_BOUNDS;
    let mut a3 = random_unit_poly(k, b3, &mut rng).coeffs().to_vec();
    a3[1] = k.random_nonzero(&mut rng);
    let [a2, a3, a4, a6] = square_disc_constraints_istar0(
        &random_poly(k, b2, &mut rng),
        &UniPoly::new(k, a3),
        &random_unit_poly(k, b4, &mut rng),
        &random_poly(k, b6, &mut rng),
    )
    .map_err(e)?;
    normal_form_istar(0, &a2, &a3, &a4, &a6).map_err(e)
}

fn c11_euler_ledger() -> Check {
    let k = gf(4).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut models: Vec<WeierstrassModel> = (0..40).map(|_| random_model(k, &mut rng)).collect();
    for seed in 0..20 {
        if let Ok(m) = square_family_member(seed) {
            models.push(m);
        }
    }
    let mut k3 = 0;
    for (i, m) in models.iter().enumerate() {
        let l = euler_ledger(m, 24).map_err(e)?;
        let d = max_disjoint_sum(&l);
        ensure(d.bound_ok, format!("model {i}: Σ N_v = {}", d.sum))?;
        for f in &l.fibers {
            ensure(
                f.delta_min_ok && f.n_v == fiber_table(f.kodaira).n_v,
                format!("model {i}: {f:?}"),
            )?;
        }
        if l.minimal {
            k3 += 1;
            ensure(l.total == 24, format!("model {i}: total {}", l.total))?;
        }
    }
    ensure(
        k3 == models.len(),
        format!("{} of {} models minimal", k3, models.len()),
    )?;

    let l = euler_ledger(&two_istar4_model(k.one()).map_err(e)?, 24).map_err(e)?;
    let d = max_disjoint_sum(&l);
    let kinds: Vec<KodairaType> = l.fibers.iter().map(|f| f.kodaira).collect();
    ensure(
        kinds == vec![KodairaType::IStar(4); 2] && l.total == 24 && d.sum == 12 && d.extremal_ok,
        format!("two-I*4: {kinds:?} total {} sum {}", l.total, d.sum),
    )?;

    let mut found = None;
    for seed in 0..50 {
        let Ok(m) = square_family_member(seed) else {
            continue;
        };
        let l = euler_ledger(&m, 24).map_err(e)?;
        let i2: u32 = l
            .fibers
            .iter()
            .filter(|f| f.kodaira == KodairaType::I(2))
            .map(|f| f.degree)
            .sum();
        let istar0 = l
            .fibers
            .iter()
            .any(|f| f.kodaira == KodairaType::IStar(0) && f.delta_v == 2);
        if i2 == 8
            && istar0
            && l.fibers.len() as u32
                == 1 + l
                    .fibers
                    .iter()
                    .filter(|f| f.kodaira == KodairaType::I(2))
                    .count() as u32
        {
            let d = max_disjoint_sum(&l);
            ensure(
                d.sum == 12 && d.extremal_ok && l.total == 24,
                format!("seed {seed}: {d:?}"),
            )?;
            found = Some(seed);
            break;
        }
    }
    let seed = found.ok_or("no 8 I2 + I*0 member among 50 seeds")?;
    Ok(format!(
        "{} models sum to 24; two I*4 and 8 I2 + I*0 (seed {seed}) reach Σ N_v = 12",
        models.len()
    ))
}

fn c12_square_discriminant() -> Check {
    let mut ok = 0;
    for seed in 0..100 {
        let m = square_family_member(seed)?;
        ensure(
            is_square_poly(&m.discriminant()),
            format!("seed {seed}: Δ not a square"),
        )?;
        ok += 1;
    }
    let s = square_disc_symbolic().map_err(e)?;
    ensure(s.a20_equals_a31 && s.a41_formula, format!("{s:?}"))?;
    Ok(format!(
        "{ok} members with square Δ; both constraints reproduced symbolically"
    ))
}

fn c13_lattice() -> Check {
    let mut b = LatticeBuilder::new(4);
    let d1 = b.add_ade("D1", AdeType::A(1)).map_err(e)?[0];
    let d2 = b.add_ade("D2", AdeType::A(1)).map_err(e)?[0];
    let l = b.add_line("L").map_err(e)?;
    b.set(d1, l, 1).map_err(e)?;
    b.set(d2, l, 1).map_err(e)?;
    let lat = b.build().map_err(e)?;
    let iso = lat
        .class(&[("H", 1), ("D1.1", -1), ("D2.1", -1)])
        .map_err(e)?;
    let curves = [lat.basis_class(l), lat.basis_class(d1), lat.basis_class(d2)];
    ensure(lat.pair(&iso, &curves[0]).map_err(e)? == -1, "E·L != -1")?;
    let r = reflect_reduce(&lat, &iso, &curves, REFLECTION_CAP).map_err(e)?;
    ensure(
        r.class == iso.add_scaled(-1, &curves[0]),
        "reduction is not E − L",
    )?;
    ensure(
        lat.self_int(&r.class).map_err(e)? == 0,
        "reduced class not isotropic",
    )?;
    for c in &curves {
        ensure(
            lat.pair(&r.class, c).map_err(e)? >= 0,
            "negative pairing remains",
        )?;
    }
    let mut f = vec![KodairaType::I(2); 8];
    f.push(KodairaType::IStar(0));
    let a = shioda_tate_lower(&f, true);
    let b = shioda_tate_lower(&[KodairaType::I(2); 12], true);
    ensure(a == 14 && b == 14, format!("Shioda–Tate {a}, {b}"))?;
    Ok("E − L isotropic and nef on the list; Shioda–Tate 14 and 14".into())
}

#[test]
fn acceptance_criteria() {
    let run = analyze_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        (
            "strange points of the Klein quartic",
            Box::new(c1_klein_strange_points),
        ),
        (
            "even-degree strange counts",
            Box::new(c2_even_degree_counts),
        ),
        ("A3 family", Box::new(c3_a3_family)),
        ("special family", Box::new(c4_special_family)),
        ("inseparable family", Box::new(c5_insep_family)),
        ("dual-plane family", Box::new(c6_dual_plane_family)),
        (
            "main predicates on corpus",
            Box::new(|| c7_theorem_predicates(&run)),
        ),
        (
            "configurations on corpus",
            Box::new(|| c8_configurations(&run)),
        ),
        ("discriminant oracle", Box::new(c9_discriminant_oracle)),
        ("Tate normal forms", Box::new(c10_tate)),
        ("Euler ledger", Box::new(c11_euler_ledger)),
        ("square discriminant", Box::new(c12_square_discriminant)),
        ("lattice reduction", Box::new(c13_lattice)),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let line = match &result {
            Ok(msg) => format!("[PASS] {:>2} {name} (exact): {msg}", i + 1),
            Err(msg) => {
                failed.push(i + 1);
                format!("[FAIL] {:>2} {name} (exact): {msg}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
