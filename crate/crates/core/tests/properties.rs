use proptest::prelude::*;
use rug::{Float, Integer, Rational};

use cubesum::eisenstein::{chi_eval, cube_roots_of_unity_mod, cubic_symbol, prime_above, CubeRoot, EisInt, SignedMonomial};
use cubesum::ellcurve::{canonical_height, CurveK, PeriodLattice, RatPoint};
use cubesum::local::{self, KType, LocalPair, RepType, Verdict};
use cubesum::numeric::{agm, recognize_rational, MPComplex};
use cubesum::quadforms::{compose, enumerate_classes, Mat2};
use cubesum::x36;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn recognize_recovers_small_rationals(p in -100_000i64..100_000, q in 1i64..100_000) {
        let h = Integer::from(100_000);
        let prec = 4 * 17 + 64;
        let r = Rational::from((p, q));
        let x = MPComplex::from_rat(prec, &r, &Rational::new());
        prop_assert_eq!(recognize_rational(&x, &h), Some(r));
    }

    #[test]
    fn agm_is_symmetric(a in 0.1f64..10.0, b in 0.1f64..10.0, ai in -3.0f64..3.0) {
        let x = MPComplex::from_f64(128, a, ai);
        let y = MPComplex::from_f64(128, b, 0.0);
        let d = (&agm(&x, &y).unwrap() - &agm(&y, &x).unwrap()).abs();
        prop_assert!(d < Float::with_val(128, 1e-30));
    }

    #[test]
    fn cubic_symbol_is_a_cube_root_and_detects_cubes(li in 0usize..14, a in 1i64..1000, b in -1000i64..1000) {
        // split primes l ≡ 1 mod 3 below 200
        let ls = [7u64, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97, 103, 109, 127];
        let l = Integer::from(ls[li]);
        let (r, _) = cube_roots_of_unity_mod(&l).unwrap();
        let pi = prime_above(&l, &r);
        let alpha = EisInt::new(a, b);
        prop_assume!(EisInt::gcd(&alpha, &pi).is_unit());
        let s = cubic_symbol(&alpha, &pi).unwrap();
        prop_assert_eq!(s.pow(3), CubeRoot::ONE);
        // Z[ω]/π ≅ Z/l with ω ↦ r
        let m = ls[li] as i64;
        let rr = r.to_i64().unwrap();
        let red = (a + b * rr).rem_euclid(m);
        let is_cube = (1..m).any(|t| (t * t % m) * t % m == red);
        prop_assert_eq!(s == CubeRoot::ONE, is_cube);
    }

    #[test]
    fn hasse_and_supersingular(k in prop::sample::select(vec![1i64, 2, -7, 11, 121, 25, 625, 14641, -432])) {
        let e = CurveK::new(k).unwrap();
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            if e.bad_primes().contains(&p) {
                continue;
            }
            let a = e.ap(p).unwrap();
            prop_assert!((a * a) as u64 <= 4 * p);
            if p % 3 == 2 {
                prop_assert_eq!(a, 0);
            }
        }
    }

    #[test]
    fn torsion_contains_three_torsion(n in 2i64..60) {
        let e = CurveK::new(n * n).unwrap();
        let t = e.torsion();
        prop_assert!(t.contains(&RatPoint::Infinity));
        prop_assert!(t.contains(&RatPoint::new(0, n)));
        prop_assert!(t.contains(&RatPoint::new(0, -n)));
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn weierstrass_ode(k in prop::sample::select(vec![1i64, 121, 625, -7]), s in 0.01f64..0.99, t in 0.01f64..0.99) {
        let prec = 192;
        let lat = PeriodLattice::new(&CurveK::new(k).unwrap(), prec).unwrap();
        let z = lat.from_coords(&Float::with_val(prec, s), &Float::with_val(prec, t));
        let (p, dp) = lat.wp(&z).unwrap();
        let (g2, g3) = lat.invariants();
        let rhs = &(&(&p.square() * &p).scale(&Float::with_val(prec, 4)) - &(&g2 * &p)) - &g3;
        let res = (&dp.square() - &rhs).abs();
        let scale = Float::with_val(prec, p.abs().max(&Float::with_val(prec, 1))).square() * p.abs().max(&Float::with_val(prec, 1));
        let rel = Float::with_val(prec, &res / &scale);
        prop_assert!(rel < Float::with_val(prec, Float::u_exp(1, -(prec as i32) + 16)), "residual {}", rel.to_f64());
    }

    #[test]
    fn cusp_class_is_gamma0_invariant(word in prop::collection::vec(0usize..33, 1..6), p in -50i64..50, q in 0i64..60) {
        prop_assume!(p != 0 || q != 0);
        let gens = x36::gamma0_generators().generators;
        let g = word.iter().fold(local::rmat(1, 0, 0, 1), |acc, &i| x36::mat_mul(&acc, &gens[i % gens.len()]));
        let before = x36::cusp_classify(&Integer::from(p), &Integer::from(q)).unwrap();
        let after = x36::act_on_cusp(&g, &Integer::from(p), &Integer::from(q)).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn intersection_invariant_under_units(word in prop::collection::vec(0usize..33, 1..4), ni in 0usize..4) {
        let n = [1u64, 5, 11, 55][ni];
        let gens = x36::gamma0_generators().generators;
        let g = word.iter().fold(local::rmat(1, 0, 0, 1), |acc, &i| x36::mat_mul(&acc, &gens[i % gens.len()]));
        let rho = local::rho_omega(n);
        let base = local::order_intersection(&rho, &local::r0_36(), None).unwrap();
        let moved: Vec<_> = local::r0_36().iter().map(|b| local::conj(&g, b)).collect();
        let r = local::order_intersection(&local::conj(&g, &rho), &moved, None).unwrap();
        prop_assert_eq!(base.conductor, r.conductor);
    }

    #[test]
    fn dichotomy_hypotheses_give_split(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 9, 25]), n in 0u32..6, c in 0u32..6, ki in 0usize..2) {
        let kind = [KType::Inert, KType::Ramified][ki];
        let lp = LocalPair::new(q, n, c, kind).unwrap();
        let hyp = c as i64 - n as i64 + lp.e as i64 > 0 && (c >= n || n >= 3);
        if hyp {
            for rep in [RepType::PrincipalSeries, RepType::Supercuspidal, RepType::Unknown] {
                prop_assert_eq!(local::epsilon_dichotomy(&lp, rep).verdict, Verdict::Split);
            }
        }
    }

    #[test]
    fn coset_totals(qi in 0usize..4, c in 1u32..3) {
        let q = [2u64, 3, 4, 5][qi];
        let s = local::coset_char_sums(q, c).unwrap();
        prop_assert_eq!(1 + s.strata_sizes.iter().sum::<u64>() + s.s_prime_size, s.group_order);
        prop_assert_eq!(s.group_order, 2 * q.pow(c));
    }

    #[test]
    fn chi_is_a_class_function(i in 0usize..1000, a in -3i64..4, b in -3i64..4) {
        let n = 5u64;
        let c = Integer::from(6 * n);
        let grp = enumerate_classes(&(Integer::from(&c * &c) * -3)).unwrap();
        let f = &grp.forms[i % grp.order()];
        let m: Mat2 = [[Integer::from(1), Integer::from(a)], [Integer::from(b), Integer::from(1 + a * b)]];
        let g = f.transform(&m);
        let bad = Integer::from(3 * n) * &c;
        let (f1, _) = f.coprime_representative(&bad).unwrap();
        let (g1, _) = g.coprime_representative(&bad).unwrap();
        let d = SignedMonomial::new(false, vec![(n, 1)]);
        prop_assert_eq!(chi_eval(&d, &f1.to_eis_ideal().unwrap()).unwrap(), chi_eval(&d, &g1.to_eis_ideal().unwrap()).unwrap());
    }
}

#[test]
fn composition_is_commutative_with_finite_orders() {
    let c = Integer::from(30);
    let grp = enumerate_classes(&(Integer::from(&c * &c) * -3)).unwrap();
    let h = grp.order();
    for i in 0..h {
        assert_eq!(h % grp.element_order(i), 0);
        for j in 0..h {
            assert_eq!(grp.compose(i, j), grp.compose(j, i));
        }
    }
    let (f, g) = (&grp.forms[1], &grp.forms[h - 1]);
    assert_eq!(compose(f, g).unwrap().reduce(), compose(g, f).unwrap().reduce());
}

#[test]
fn height_is_quadratic() {
    let e = CurveK::new(121).unwrap();
    let p = RatPoint::new(12, 43);
    let h1 = canonical_height(&e, &p, 192).unwrap();
    for m in 2..=5i64 {
        let hm = canonical_height(&e, &e.mul(&p, m), 192).unwrap();
        let d = Float::with_val(192, &hm - Float::with_val(192, &h1 * (m * m))).abs();
        assert!(d < 1e-12, "m = {}: {}", m, d.to_f64());
    }
    // translation by 3-torsion does not change ĥ
    let t = RatPoint::new(0, 11);
    let ht = canonical_height(&e, &e.add(&p, &t), 192).unwrap();
    assert!(Float::with_val(192, &ht - &h1).abs() < 1e-12);
}
