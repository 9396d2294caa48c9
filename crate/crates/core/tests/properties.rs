use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quartic_core::families::random_form;
use quartic_core::fibrations::{
    admissible_transform, euler_ledger, is_square_poly, max_disjoint_sum, random_model, KodairaType,
};
use quartic_core::field::{gf, Fe, GaloisField};
use quartic_core::pic_lattice::determinant;
use quartic_core::uni::UniPoly;

fn elem(k: &'static GaloisField, bits: u128) -> Fe {
    let mask = if k.bits() == 128 {
        u128::MAX
    } else {
        (1u128 << k.bits()) - 1
    };
    k.from_bits(bits & mask).unwrap()
}

fn poly(k: &'static GaloisField, deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    UniPoly::new(k, (0..=deg).map(|_| k.random(rng)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_and_frobenius_are_ring_maps(m in 1u32..=128, a in any::<u128>(), b in any::<u128>(), j in 0u32..8) {
        let k = gf(m).unwrap();
        let (a, b) = (elem(k, a), elem(k, b));
        prop_assert_eq!((a * b).sqrt(), a.sqrt() * b.sqrt());
        prop_assert_eq!(a.sqrt().square(), a);
        prop_assert_eq!((a + b).frobenius(j), a.frobenius(j) + b.frobenius(j));
        prop_assert_eq!((a * b).frobenius(j), a.frobenius(j) * b.frobenius(j));
        if !a.is_zero() {
            prop_assert!((a * a.inv()).is_one());
        }
    }

    #[test]
    fn gradient_ignores_squares(m in 1u32..=6, seed in any::<u64>()) {
        let k = gf(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_form(k, 3, 4, &mut rng);
        let q = random_form(k, 3, 2, &mut rng);
        prop_assert_eq!(b.add(&q.square()).gradient(), b.gradient());
    }

    #[test]
    fn discriminant_scales_under_transforms(m in 1u32..=6, seed in any::<u64>()) {
        let k = gf(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_model(k, &mut rng);
        let u = k.random_nonzero(&mut rng);
        let (r, s, t) = (poly(k, 4, &mut rng), poly(k, 2, &mut rng), poly(k, 6, &mut rng));
        let v = admissible_transform(&w, u, &r, &s, &t).unwrap();
        prop_assert_eq!(v.discriminant(), w.discriminant().scale(u.inv().pow(12)));
        prop_assert_eq!(v.is_quasi_elliptic(), w.is_quasi_elliptic());
    }

    #[test]
    fn squares_are_squares(m in 1u32..=8, seed in any::<u64>(), deg in 0usize..20) {
        let k = gf(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = poly(k, deg, &mut rng);
        prop_assert!(is_square_poly(&p.square()));
        let t = UniPoly::from_bits(k, &[0, 1]);
        let odd = p.square().mul(&t);
        prop_assert_eq!(is_square_poly(&odd), p.is_zero());
    }

    #[test]
    fn determinant_is_unimodular_invariant(
        entries in proptest::collection::vec(-4i64..=4, 16),
        ops in proptest::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..6),
    ) {
        let mut g: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| entries[4 * i.min(j) + i.max(j)]).collect()).collect();
        let d = determinant(&g);
        for (i, j, c) in ops {
            if i == j {
                continue;
            }
            for col in 0..4 {
                g[j][col] += c * g[i][col];
            }
            for row in g.iter_mut() {
                row[j] += c * row[i];
            }
        }
        prop_assert_eq!(determinant(&g), d);
    }

    #[test]
    fn kodaira_names_roundtrip(n in 0u32..40, star in any::<bool>()) {
        let t = if star { KodairaType::IStar(n) } else { KodairaType::I(n) };
        prop_assert_eq!(t.to_string().parse::<KodairaType>().unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn minimal_models_have_euler_number_24(seed in any::<u64>()) {
        let k = gf(4).unwrap();
        let w = random_model(k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(!w.discriminant().is_zero() && !w.is_quasi_elliptic());
        let l = euler_ledger(&w, 24).unwrap();
        prop_assume!(l.minimal);
        prop_assert_eq!(l.total, 24);
        prop_assert!(max_disjoint_sum(&l).bound_ok);
    }
}
