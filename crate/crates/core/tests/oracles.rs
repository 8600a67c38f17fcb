use std::collections::BTreeMap;

use rug::{Float, Integer};

use cubesum::cache::ApCache;
use cubesum::eisenstein::SignedMonomial;
use cubesum::ellcurve::{ap_cm, ap_count, CurveK, PeriodLattice};
use cubesum::gz::{self, Certificate};
use cubesum::lseries::{LOptions, LSeries};
use cubesum::quadforms::{class_number_formula, enumerate_classes};

/// ∫_{e}^{∞} dx/√(x³ + k) with x = e + tan²θ, by composite Simpson.
fn period_by_quadrature(k: f64) -> f64 {
    let e = -k.cbrt();
    let f = |th: f64| -> f64 {
        if th >= std::f64::consts::FRAC_PI_2 {
            return 2.0;
        }
        let t = th.tan();
        let x = e + t * t;
        let q = x * x + e * x + e * e;
        2.0 / (th.cos().powi(2) * q.sqrt())
    };
    let n = 200_000;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let mut s = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn real_period_against_quadrature() {
    for k in [1.0f64, 121.0, 625.0, 14641.0] {
        let lat = PeriodLattice::new(&CurveK::new(k as i64).unwrap(), 128).unwrap();
        let agm_side = lat.real_period().to_f64();
        let quad = period_by_quadrature(k);
        assert!((agm_side / quad - 1.0).abs() < 1e-11, "k = {}: {} vs {}", k, agm_side, quad);
    }
}

#[test]
fn class_numbers_against_formula() {
    for c in [6u64, 30, 66, 138, 6 * 5 * 11 * 23] {
        let cc = Integer::from(c);
        let g = enumerate_classes(&(Integer::from(&cc * &cc) * -3)).unwrap();
        assert_eq!(g.order() as u64, class_number_formula(c), "c = {}", c);
    }
}

#[test]
fn sextic_symbol_against_point_count() {
    let k = Integer::from(145475u64 * 145475);
    for p in [100_003u64, 100_057, 250_027, 499_903, 1_000_003] {
        assert_eq!(p % 3, 1);
        assert_eq!(ap_cm(&k, p), ap_count(&k, p), "p = {}", p);
    }
}

#[test]
fn point_counts_for_x036() {
    let e = CurveK::new(1).unwrap();
    assert_eq!(e.ap(5).unwrap(), 0);
    assert_eq!(e.ap(7).unwrap(), -4);
}

fn l_of(n: &Integer, prec: u32) -> (LSeries, CurveK) {
    let curve = CurveK::new(Integer::from(n * n)).unwrap();
    (LSeries::new(&curve, &LOptions { prec, ..LOptions::default() }).unwrap(), curve)
}

/// All d with every exponent nonzero, over subsets of `primes` whose size is in `sizes`.
fn grid(primes: &[u64], sizes: &[usize]) -> Vec<(SignedMonomial, usize, i64)> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << primes.len()) {
        let sub: Vec<u64> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        if !sizes.contains(&sub.len()) {
            continue;
        }
        for signs in 0u32..(1 << sub.len()) {
            let eps: Vec<i8> = (0..sub.len()).map(|i| if signs >> i & 1 == 1 { 1 } else { -1 }).collect();
            let d = gz::monomial_from_signs(&sub, &eps).unwrap();
            out.push((d, sub.len(), eps.iter().map(|&e| e as i64).sum()));
        }
    }
    out
}

/// Root number of x³ + y³ = A as a product of local signs, A cube-free and prime to 3.
fn root_number_cube_sum(a: &Integer) -> i32 {
    let mut w = -1;
    let mut m = Integer::from(a.abs_ref());
    let mut p = 2u32;
    while m > 1 {
        if m.is_divisible_u(p) {
            while m.is_divisible_u(p) {
                m /= p;
            }
            if p % 3 == 2 {
                w = -w;
            }
        }
        p += 1;
    }
    let r = a.mod_u(9);
    if r == 1 || r == 8 {
        w = -w;
    }
    w
}

fn sign_of(d: &SignedMonomial) -> i32 {
    let (n, _) = d.integral();
    let (l, curve) = l_of(&n, 128);
    let (_, _, stab) = l.two_cutoff(&curve).unwrap();
    assert!(stab < 1e-15, "d = {}: two-cutoff difference {:e}", d, stab);
    l.sign
}

fn check_parity(primes: &[u64], sizes: &[usize]) {
    let rows = grid(primes, sizes);
    let signs: BTreeMap<String, i32> = rows.iter().map(|(d, _, _)| (d.to_string(), sign_of(d))).collect();
    for (d, k, total) in &rows {
        let (n, _) = d.integral();
        let s = signs[&d.to_string()];
        assert_eq!(s, root_number_cube_sum(&(n * 2u32)), "d = {}", d);
        let s_inv = signs[&d.inverse().to_string()];
        // Σε ≡ (-1)^(k+1) exactly when ε(E^(d)) = -1 and ε(E^(d)) ε(E^(1/d)) = -1
        let target = if k % 2 == 1 { 1 } else { 2 };
        assert_eq!(total.rem_euclid(3) == target, s == -1 && s * s_inv == -1, "d = {}", d);
    }
}

#[test]
fn sign_parity_single_primes() {
    check_parity(&[5, 11, 23, 29], &[1]);
}

#[test]
fn sign_parity_two_primes() {
    check_parity(&[5, 11, 23, 29], &[2]);
}

#[test]
#[ignore]
fn sign_parity_three_primes() {
    check_parity(&[5, 11, 23, 29], &[3]);
}

#[test]
fn gz_ratio_stable_under_precision_doubling() {
    let lo = gz::gz_verify(&[11], &[1], &LOptions { prec: 192, ..LOptions::default() }).unwrap();
    let hi = gz::gz_verify(&[11], &[1], &LOptions { prec: 384, ..LOptions::default() }).unwrap();
    let a: f64 = lo.ratio.unwrap().parse().unwrap();
    let b: f64 = hi.ratio.unwrap().parse().unwrap();
    assert!((a - b).abs() < 1e-8);
    assert!(hi.pass);
}

#[test]
fn certificates_reverify_after_round_trip() {
    let opts = LOptions { prec: 192, ..LOptions::default() };
    for n in [11u32, 121] {
        let c = gz::certify(&Integer::from(n), &opts).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert!(back.verify().unwrap(), "{}", text);
    }
    let forged = r#"{"n":"11","sign":-1,"verdict":"cube_sum","a":"1","b":"2","point":null}"#;
    let c: Certificate = serde_json::from_str(forged).unwrap();
    assert!(!c.verify().unwrap());
}

#[test]
fn cache_does_not_change_values() {
    let dir = tempfile::tempdir().unwrap();
    let curve = CurveK::new(121).unwrap();
    let plain = LSeries::new(&curve, &LOptions { prec: 128, ..LOptions::default() }).unwrap();
    let cached_opts = LOptions { prec: 128, cache: Some(ApCache::new(dir.path())), ..LOptions::default() };
    let first = LSeries::new(&curve, &cached_opts).unwrap();
    let second = LSeries::new(&curve, &cached_opts).unwrap();
    let v = |l: &LSeries| -> (Float, Float) { l.value_and_derivative().unwrap() };
    assert_eq!(v(&plain), v(&first));
    assert_eq!(v(&first), v(&second));
    assert_eq!(plain.coefficients(), second.coefficients());
}

#[test]
fn reports_are_deterministic() {
    let a = serde_json::to_value(cubesum::x36::verify_normalizer_table().unwrap()).unwrap();
    let b = serde_json::to_value(cubesum::x36::verify_normalizer_table().unwrap()).unwrap();
    assert_eq!(a, b);
    let opts = LOptions { prec: 128, ..LOptions::default() };
    let c1 = serde_json::to_value(gz::certify(&Integer::from(11), &opts).unwrap()).unwrap();
    let c2 = serde_json::to_value(gz::certify(&Integer::from(11), &opts).unwrap()).unwrap();
    assert_eq!(c1, c2);
}

#[test]
fn two_prime_sweeps_and_height_identity() {
    for primes in [[5u64, 11], [5, 23], [11, 23]] {
        let r = gz::vanishing_sweep(&primes, 192).unwrap();
        let points: Vec<&Vec<i8>> = r.rows.iter().filter(|row| row.status == cubesum::heegner::Status::Point).map(|row| &row.signs).collect();
        assert_eq!(points, vec![&vec![1i8, 1]], "{:?}", primes);
        assert!(r.pass);
    }
    let g = gz::gz_verify(&[5, 11], &[1, 1], &LOptions { prec: 192, ..LOptions::default() }).unwrap();
    assert!(g.ratio_error.unwrap() < 1e-8 && g.pass);
}
