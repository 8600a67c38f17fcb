//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its line. Criterion 8 runs with `--include-ignored`,
//! `--ignored` or `CUBESUM_SLOW=1`.

use std::collections::BTreeMap;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use cubesum::eisenstein::SignedMonomial;
use cubesum::ellcurve::{canonical_height, CurveK, PeriodLattice, RatPoint};
use cubesum::gz::{self, Expected, Verdict};
use cubesum::heegner::Status;
use cubesum::local;
use cubesum::lseries::{LOptions, LSeries};
use cubesum::x36;

const LIMIT_1_S: f64 = 10.0;
const LIMIT_2_S: f64 = 5.0;
const LIMIT_3_S: f64 = 60.0;
const LIMIT_5_S: f64 = 900.0;
const LIMIT_6_S: f64 = 1200.0;
const LIMIT_7_S: f64 = 300.0;
const LIMIT_8_S: f64 = 7200.0;

const NORM_SAMPLES: usize = 256;
const NORM_SEED: u64 = 36;
const RATIO_TOL: f64 = 1e-8;
const PERIOD_TOL: f64 = 1e-20;
const HEIGHT_TOL: f64 = 1e-12;
const ODE_PREC: u32 = 192;
const ODE_LOG2_TOL: i32 = -176;
const STABILITY_TOL: f64 = 1e-15;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn timed(limit: f64, start: Instant) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    check(t < limit, format!("took {:.1} s, limit {} s", t, limit))?;
    Ok(t)
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let curve = CurveK::new(1).map_err(e)?;
    let g = RatPoint::new(2, 3);
    let tors = curve.torsion();
    let multiples: Vec<RatPoint> = (0..6).map(|m| curve.mul(&g, m)).collect();
    check(tors.len() == 6, format!("torsion has {} points", tors.len()))?;
    check(curve.torsion_order(&g) == Some(6), "(2,3) does not have order 6")?;
    check(tors.iter().all(|p| multiples.contains(p)), "(2,3) does not generate")?;
    let cusps = x36::all_cusps();
    check(cusps.len() == 12, format!("{} cusps", cusps.len()))?;
    let table = x36::verify_normalizer_table().map_err(e)?;
    check(table.rows.len() == 12, format!("{} normalizer rows", table.rows.len()))?;
    check(table.pass, format!("normalizer table: {:?}", table.group_law_failures))?;
    let t = timed(LIMIT_1_S, start)?;
    Ok(format!("torsion Z/6 = <(2,3)>, 12 cusps, 12 normalizer rows ({:.2} s)", t))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut got = Vec::new();
    for n in [1u64, 5, 11, 55] {
        let r = local::order_intersection(&local::rho_omega(n), &local::r0_36(), None).map_err(e)?;
        check(r.conductor == (6 * n).to_string(), format!("N = {}: conductor {}", n, r.conductor))?;
        got.push(r.conductor);
    }
    let m2 = local::order_intersection(&local::rho_omega(5), &local::m2z(), Some(3)).map_err(e)?;
    check(m2.conductor == "3", format!("M2(Z_3): 3-part {}", m2.conductor))?;
    let rpp = local::order_intersection(&local::rho_omega(5), &local::r_double_prime(), Some(3)).map_err(e)?;
    check(rpp.conductor == "1", format!("R'': 3-part {}", rpp.conductor))?;
    let t = timed(LIMIT_2_S, start)?;
    Ok(format!("conductors {} and 3-parts 3, 1 ({:.2} s)", got.join(", "), t))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for q in [3u64, 5, 9] {
        for c in 1..=3 {
            let s = local::coset_char_sums(q, c).map_err(e)?;
            // 0 on S_0..S_{c-2}, -1 on S_{c-1}, 0 on S′
            let mut want = vec![0i64; c as usize - 1];
            want.push(-1);
            let ok = s.pass && s.s_sums == want && s.s_prime_sum == 0;
            check(ok, format!("q = {}, c = {}: sums {:?}, S′ {}", q, c, s.s_sums, s.s_prime_sum))?;
        }
    }
    let b = local::beta0(3, 1).map_err(e)?;
    check(b.pass && b.value == "1/4", format!("beta0 = {}", b.value))?;
    let mut main_term = Vec::new();
    for p in [5u64, 11] {
        let r = local::norm_congruence_check(p, NORM_SAMPLES, NORM_SEED).map_err(e)?;
        check(r.samples >= 200, format!("p = {}: {} samples", p, r.samples))?;
        check(r.pass, format!("p = {}: {} norm, {} congruence failures", p, r.norm_failures, r.congruence_failures))?;
        main_term.push(r.main_term_failures);
    }
    let t = timed(LIMIT_3_S, start)?;
    Ok(format!("coset sums 0 / -1 / 0 on S_<c-1 / S_c-1 / S′ for 9 (q, c), beta0 = 1/4, {} norm samples per prime, main term outside 3O₃ in {:?} ({:.2} s)", NORM_SAMPLES, main_term, t))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    for p in [5u64, 11, 23] {
        let r = gz::vanishing_sweep(&[p], 192).map_err(e)?;
        let by_sign: BTreeMap<i8, Status> = r.rows.iter().map(|row| (row.signs[0], row.status)).collect();
        let want = [(0, Status::Zero), (-1, Status::Zero), (1, Status::Point)];
        for (s, st) in want {
            check(by_sign.get(&s) == Some(&st), format!("p = {}, ε = {}: {:?}", p, s, by_sign.get(&s)))?;
        }
        check(r.pass, format!("p = {}: divisor sum residual {:e}", p, r.divisor_sum_residual))?;
    }
    let t = start.elapsed().as_secs_f64();
    Ok(format!("(z_1, z_(p*^-1), z_p*) = (0, 0, nonzero) and Σ z_d = 3 z_0 for p = 5, 11, 23 ({:.2} s)", t))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for p in [11u64, 5] {
        let start = Instant::now();
        let r = gz::gz_verify(&[p], &[1], &LOptions { prec: 192, ..LOptions::default() }).map_err(e)?;
        let err = r.ratio_error.ok_or(format!("p = {}: no ratio", p))?;
        check(err < RATIO_TOL, format!("p = {}: |ratio - 1| = {:e}", p, err))?;
        check(r.period_relation_error < PERIOD_TOL, format!("p = {}: period relation {:e}", p, r.period_relation_error))?;
        check(r.pass, format!("p = {}: report does not pass", p))?;
        let t = timed(LIMIT_5_S, start)?;
        parts.push(format!("n = {}: |ratio - 1| = {:.1e}, period {:.1e}, {:.1} s", r.n, err, r.period_relation_error, t));
    }
    Ok(parts.join("; "))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let opts = LOptions { prec: 192, ..LOptions::default() };
    let c11 = gz::certify(&Integer::from(11), &opts).map_err(e)?;
    let (a, b) = match &c11.verdict {
        Verdict::CubeSum { a, b, .. } => (a.parse::<Rational>().map_err(e)?, b.parse::<Rational>().map_err(e)?),
        v => return Err(format!("certify 11: {:?}", v)),
    };
    let total = a.clone().pow(3) + b.clone().pow(3);
    check(total == 22, format!("a³ + b³ = {}", total))?;
    check(c11.verify().map_err(e)?, "certify 11 does not re-verify")?;
    let c121 = gz::certify(&Integer::from(121), &opts).map_err(e)?;
    let l = match &c121.verdict {
        Verdict::NotACubeSum { l_value, stability, .. } => {
            let l: f64 = l_value.parse().map_err(e)?;
            check(l > 0.0 && *stability < STABILITY_TOL, format!("L(1) = {}, stability {:e}", l, stability))?;
            l
        }
        v => return Err(format!("certify 121: {:?}", v)),
    };
    check(c121.verify().map_err(e)?, "certify 121 does not re-verify")?;
    let t = timed(LIMIT_6_S, start)?;
    Ok(format!("22 = a³ + b³ with {}-digit a; 242 not a cube sum, L(1) = {:.12} ({:.1} s)", a.numer().to_string().len(), l, t))
}

fn sign_of(d: &SignedMonomial) -> Result<i32, String> {
    let (n, _) = d.integral();
    let curve = CurveK::new(Integer::from(&n * &n)).map_err(e)?;
    let l = LSeries::new(&curve, &LOptions { prec: 128, ..LOptions::default() }).map_err(e)?;
    let (_, _, stab) = l.two_cutoff(&curve).map_err(e)?;
    check(stab < STABILITY_TOL, format!("d = {}: two-cutoff difference {:e}", d, stab))?;
    Ok(l.sign)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    // heights
    let curve = CurveK::new(121).map_err(e)?;
    let p = RatPoint::new(12, 43);
    let h1 = canonical_height(&curve, &p, 192).map_err(e)?;
    for m in 2..=4i64 {
        let hm = canonical_height(&curve, &curve.mul(&p, m), 192).map_err(e)?;
        let d = Float::with_val(192, &hm - Float::with_val(192, &h1 * (m * m))).abs().to_f64();
        check(d < HEIGHT_TOL, format!("ĥ({}P) - {}ĥ(P) = {:e}", m, m * m, d))?;
    }
    // ℘′² = 4℘³ - g₂℘ - g₃, relative to max(1, |℘|)³
    let tol = Float::with_val(ODE_PREC, Float::u_exp(1, ODE_LOG2_TOL));
    let mut worst = 0f64;
    for k in [1i64, 121] {
        let lat = PeriodLattice::new(&CurveK::new(k).map_err(e)?, ODE_PREC).map_err(e)?;
        let (g2, g3) = lat.invariants();
        for (s, t) in [(0.1, 0.2), (0.37, 0.61), (0.5, 0.05), (0.83, 0.44)] {
            let z = lat.from_coords(&Float::with_val(ODE_PREC, s), &Float::with_val(ODE_PREC, t));
            let (wp, dwp) = lat.wp(&z).map_err(e)?;
            let rhs = &(&(&wp.square() * &wp).scale(&Float::with_val(ODE_PREC, 4)) - &(&g2 * &wp)) - &g3;
            let one = Float::with_val(ODE_PREC, 1);
            let scale = Float::with_val(ODE_PREC, wp.abs().max(&one)).pow(3u32);
            let rel = Float::with_val(ODE_PREC, (&dwp.square() - &rhs).abs() / &scale);
            check(rel < tol, format!("k = {}: residual {:e}", k, rel.to_f64()))?;
            worst = worst.max(rel.to_f64());
        }
    }
    // signs over the grid, also two-cutoff stable
    let primes = [5u64, 11, 23];
    let mut signs = BTreeMap::new();
    for mask in 1u32..8 {
        let sub: Vec<u64> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        for bits in 0u32..(1 << sub.len()) {
            let eps: Vec<i8> = (0..sub.len()).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
            let d = gz::monomial_from_signs(&sub, &eps).map_err(e)?;
            signs.insert(d.to_string(), (d.clone(), eps, sign_of(&d)?));
        }
    }
    let mut literal_misses = Vec::new();
    for (d, eps, s) in signs.values() {
        let total: i64 = eps.iter().map(|&x| x as i64).sum();
        let s_inv = signs[&d.inverse().to_string()].2;
        let rule = total.rem_euclid(3) == 1;
        if eps.len() % 2 == 1 {
            // Σε ≡ 1 exactly when ε(E^(d)) = ε(E^(d)) ε(E^(1/d)) = -1
            check(rule == (*s == -1 && s * s_inv == -1), format!("d = {}: signs {}, {}", d, s, s_inv))?;
            if rule != (*s == -1) {
                literal_misses.push(d.to_string());
            }
        }
    }
    let t = timed(LIMIT_7_S, start)?;
    Ok(format!(
        "height to {:.0e}, ODE residual {:.1e} < 2^{}, {} signs stable to {:.0e}; for odd k, Σε ≡ 1 iff ε(E^(d)) = -1 with ε(E,χ_d) = -1; ε(E^(d)) = -1 also at 3 | Σε for d in [{}] ({:.1} s)",
        HEIGHT_TOL,
        worst,
        ODE_LOG2_TOL,
        signs.len(),
        STABILITY_TOL,
        literal_misses.join(", "),
        t
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let r = gz::vanishing_sweep(&[5, 11, 23], 192).map_err(e)?;
    check(r.rows.len() == 27, format!("{} d-values", r.rows.len()))?;
    let bad: Vec<&str> = r.rows.iter().filter(|row| !row.ok).map(|row| row.d.as_str()).collect();
    check(bad.is_empty(), format!("misclassified: {:?}", bad))?;
    check(r.pass, format!("Σ z_d - 27 z_0 = {:e}", r.divisor_sum_residual))?;
    let points = r.rows.iter().filter(|row| row.expected == Expected::Point).count();
    let t = timed(LIMIT_8_S, start)?;
    Ok(format!("27 d-values classified ({} points), Σ z_d = 27 z_0 to {:.1e} ({:.1} s)", points, r.divisor_sum_residual, t))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        for i in 1..=8 {
            println!("criterion_{}: test", i);
        }
        return;
    }
    let filter = args.iter().skip(1).find(|a| !a.starts_with('-'));
    let slow = args.iter().any(|a| a == "--include-ignored" || a == "--ignored") || std::env::var("CUBESUM_SLOW").is_ok_and(|v| v == "1");
    let criteria: [(u32, fn() -> Outcome); 8] =
        [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5), (6, criterion_6), (7, criterion_7), (8, criterion_8)];
    let mut failed = 0;
    for (i, f) in criteria {
        let name = format!("criterion_{}", i);
        if filter.is_some_and(|s| !name.contains(s.as_str())) {
            continue;
        }
        if i == 8 && !slow {
            println!("criterion 8: SKIP (slow; pass --include-ignored or set CUBESUM_SLOW=1)");
            continue;
        }
        match f() {
            Ok(msg) => println!("criterion {}: PASS {}", i, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {}", i, msg)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
