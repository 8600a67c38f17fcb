//! Structure of X₀(36): cusps, generators of Γ₀(36), the translation part of
//! its normalizer and the local conditions cutting out U.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::fmod;
use crate::eisenstein::EisInt;
use crate::error::{Error, Result};
use crate::local::{rmat, LocalRing, RMat, TruncPadic};

pub const LEVEL: i64 = 36;

// ---------------------------------------------------------------------------
// matrices

pub fn mat_mul(x: &RMat, y: &RMat) -> RMat {
    let e = |i: usize, j: usize| Rational::from(&x[i][0] * &y[0][j]) + Rational::from(&x[i][1] * &y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_det(m: &RMat) -> Rational {
    Rational::from(&m[0][0] * &m[1][1]) - Rational::from(&m[0][1] * &m[1][0])
}

pub fn mat_inv(m: &RMat) -> RMat {
    let d = mat_det(m);
    [
        [Rational::from(&m[1][1] / &d), -Rational::from(&m[0][1] / &d)],
        [-Rational::from(&m[1][0] / &d), Rational::from(&m[0][0] / &d)],
    ]
}

pub fn mat_pow(m: &RMat, e: u32) -> RMat {
    (0..e).fold(rmat(1, 0, 0, 1), |acc, _| mat_mul(&acc, m))
}

pub fn mat_string(m: &RMat) -> String {
    format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
}

pub fn in_gamma0(m: &RMat) -> bool {
    m.iter().flatten().all(|x| *x.denom() == 1) && mat_det(m) == 1 && m[1][0].numer().is_divisible(&Integer::from(LEVEL))
}

/// Whether m ∈ Q^×Γ₀(36).
pub fn in_scaled_gamma0(m: &RMat) -> bool {
    let mut den = Integer::from(1);
    for x in m.iter().flatten() {
        den.lcm_mut(x.denom());
    }
    let ints: Vec<Integer> = m.iter().flatten().map(|x| Integer::from((x * Rational::from(den.clone())).numer())).collect();
    let g = ints.iter().fold(Integer::new(), |acc, x| acc.gcd(x));
    if g == 0 {
        return false;
    }
    let prim: Vec<Rational> = ints.iter().map(|x| Rational::from(Integer::from(x / &g))).collect();
    let p = [[prim[0].clone(), prim[1].clone()], [prim[2].clone(), prim[3].clone()]];
    in_gamma0(&p)
}

// ---------------------------------------------------------------------------
// cusps

/// A cusp of X₀(36), stored canonically as a/d with d | 36 and a reduced
/// modulo gcd(d, 36/d); d = 36 is ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cusp {
    pub num: i64,
    pub den: i64,
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            LEVEL => write!(f, "∞"),
            1 => write!(f, "0"),
            d => write!(f, "{}/{}", self.num, d),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    num_gcd(a.abs(), b.abs())
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// Γ₀(36)-class of p/q (q = 0 for ∞).
pub fn cusp_classify(p: &Integer, q: &Integer) -> Result<Cusp> {
    if *p == 0 && *q == 0 {
        return Err(Error::Domain("0/0 is not a point of P¹(Q)".into()));
    }
    let g = Integer::from(p.gcd_ref(q));
    let (mut p, mut q) = (Integer::from(p / &g), Integer::from(q / &g));
    if q < 0 {
        p = -p;
        q = -q;
    }
    let n = Integer::from(LEVEL);
    let d = Integer::from(q.gcd_ref(&n)).to_i64().unwrap();
    let m = gcd(d, LEVEL / d);
    let qd = Integer::from(&q / d);
    let r = fmod(&Integer::from(&p * &qd), &Integer::from(m)).to_i64().unwrap();
    let num = (0..).find(|a: &i64| gcd(*a, d) == 1 && (a - r).rem_euclid(m) == 0).unwrap();
    Ok(Cusp { num, den: d })
}

pub fn cusp_of_rational(r: &Rational) -> Cusp {
    cusp_classify(r.numer(), r.denom()).expect("nonzero pair")
}

pub fn cusp_infinity() -> Cusp {
    cusp_classify(&Integer::from(1), &Integer::new()).unwrap()
}

/// Image of the cusp p/q under m.
pub fn act_on_cusp(m: &RMat, p: &Integer, q: &Integer) -> Result<Cusp> {
    let (p, q) = (Rational::from(p.clone()), Rational::from(q.clone()));
    let np = Rational::from(&m[0][0] * &p) + Rational::from(&m[0][1] * &q);
    let nq = Rational::from(&m[1][0] * &p) + Rational::from(&m[1][1] * &q);
    let den = Integer::from(np.denom().lcm_ref(nq.denom()));
    let a = Integer::from((np * Rational::from(den.clone())).numer());
    let b = Integer::from((nq * Rational::from(den)).numer());
    cusp_classify(&a, &b)
}

pub fn act_on_infinity(m: &RMat) -> Result<Cusp> {
    act_on_cusp(m, &Integer::from(1), &Integer::new())
}

/// All cusp classes, by enumeration of (d, a mod gcd(d, 36/d)).
pub fn all_cusps() -> Vec<Cusp> {
    let mut out = Vec::new();
    for d in (1..=LEVEL).filter(|d| LEVEL % d == 0) {
        let m = gcd(d, LEVEL / d);
        for r in 0..m {
            if gcd(r, m) == 1 {
                let a = (0..).find(|a: &i64| gcd(*a, d) == 1 && (a - r).rem_euclid(m) == 0).unwrap();
                out.push(cusp_classify(&Integer::from(a), &Integer::from(d)).unwrap());
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The twelve representatives as usually listed.
pub const LISTED_CUSPS: [(i64, i64); 12] = [
    (0, 1),
    (1, 2),
    (1, 3),
    (-1, 3),
    (-1, 16),
    (1, 6),
    (-1, 6),
    (-4, 9),
    (13, 48),
    (29, 48),
    (-1, 18),
    (1, 0),
];

// ---------------------------------------------------------------------------
// Γ₀(36) generators

fn p1_normalize(c: i64, d: i64) -> (i64, i64) {
    let (c, d) = (c.rem_euclid(LEVEL), d.rem_euclid(LEVEL));
    (1..LEVEL)
        .filter(|u| gcd(*u, LEVEL) == 1)
        .map(|u| ((u * c) % LEVEL, (u * d) % LEVEL))
        .min()
        .unwrap()
}

/// Right cosets Γ₀(36)\SL₂(Z) (via bottom rows in P¹(Z/36)) with
/// representatives, and the Schreier generators of Γ₀(36).
pub struct CosetGraph {
    pub reps: HashMap<(i64, i64), RMat>,
    pub generators: Vec<RMat>,
}

pub fn gamma0_generators() -> CosetGraph {
    let s = rmat(0, -1, 1, 0);
    let t = rmat(1, 1, 0, 1);
    let bottom = |m: &RMat| -> (i64, i64) { p1_normalize(m[1][0].numer().to_i64().unwrap(), m[1][1].numer().to_i64().unwrap()) };
    let id = rmat(1, 0, 0, 1);
    let mut reps = HashMap::new();
    reps.insert(bottom(&id), id.clone());
    let mut queue = VecDeque::from([id]);
    let mut gens: Vec<RMat> = vec![rmat(-1, 0, 0, -1)];
    while let Some(r) = queue.pop_front() {
        for g in [&s, &t] {
            let y = mat_mul(&r, g);
            let key = bottom(&y);
            match reps.get(&key) {
                None => {
                    reps.insert(key, y.clone());
                    queue.push_back(y);
                }
                Some(ry) => {
                    let h = mat_mul(&y, &mat_inv(ry));
                    if h != rmat(1, 0, 0, 1) && !gens.contains(&h) {
                        gens.push(h);
                    }
                }
            }
        }
    }
    CosetGraph { reps, generators: gens }
}

/// m Γ₀(36) m⁻¹ = Γ₀(36), checked on the generators in both directions.
pub fn normalizes(m: &RMat, gens: &[RMat]) -> bool {
    let mi = mat_inv(m);
    gens.iter().all(|g| in_gamma0(&mat_mul(&mat_mul(m, g), &mi)) && in_gamma0(&mat_mul(&mat_mul(&mi, g), m)))
}

// ---------------------------------------------------------------------------
// torsion and the translation table

/// Points of y² = x³ + 1 over Z[ω]; None is the origin.
pub type EisPoint = Option<(EisInt, EisInt)>;

pub fn eis_add(p: &EisPoint, q: &EisPoint) -> EisPoint {
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return if p.is_none() { q.clone() } else { p.clone() };
    };
    let lambda = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return None;
        }
        let three = EisInt::from_int(3);
        let two = EisInt::from_int(2);
        (&(&three * x1) * x1).exact_div(&(&two * y1))
    } else {
        (y2 - y1).exact_div(&(x2 - x1))
    };
    let x3 = &(&(&lambda * &lambda) - x1) - x2;
    let y3 = -&(&(&lambda * &(&x3 - x1)) + y1);
    Some((x3, y3))
}

pub fn eis_neg(p: &EisPoint) -> EisPoint {
    p.as_ref().map(|(x, y)| (x.clone(), -y))
}

/// [ω](x, y) = (ωx, y).
pub fn eis_omega(p: &EisPoint) -> EisPoint {
    p.as_ref().map(|(x, y)| (&EisInt::omega() * x, y.clone()))
}

/// α·(2, 3) for α ∈ Z[ω].
pub fn torsion_point(alpha: &EisInt) -> EisPoint {
    let base: EisPoint = Some((EisInt::from_int(2), EisInt::from_int(3)));
    let mul_int = |p: &EisPoint, n: &Integer| -> EisPoint {
        let n6 = fmod(n, &Integer::from(6)).to_u32().unwrap();
        (0..n6).fold(None, |acc, _| eis_add(&acc, p))
    };
    eis_add(&mul_int(&base, &alpha.a), &mul_int(&eis_omega(&base), &alpha.b))
}

pub fn modulus_2sqrt3() -> EisInt {
    EisInt::new(2, 4)
}

pub fn congruent_mod(a: &EisInt, b: &EisInt) -> bool {
    modulus_2sqrt3().divides(&(a - b))
}

fn eis(a: i64, b: i64) -> EisInt {
    EisInt::new(a, b)
}

/// τ: Z[ω]/(2√-3) → cusps, as tabulated.
pub fn tau_table() -> Vec<(EisInt, Cusp)> {
    let c = |p: i64, q: i64| cusp_classify(&Integer::from(p), &Integer::from(q)).unwrap();
    vec![
        (eis(0, 0), c(1, 0)),
        (eis(1, 0), c(0, 1)),
        (eis(-1, 0), c(-1, 2)),
        (eis(0, 1), c(1, 3)),
        (eis(-1, -1), c(-1, 3)),
        (eis(3, 0), c(-1, 16)),
        (eis(0, -1), c(-1, 6)),
        (eis(1, 1), c(1, 6)),
        (eis(4, 0), c(-4, 9)),
        (eis(0, 3), c(13, 48)),
        (eis(-3, -3), c(29, 48)),
        (eis(2, 0), c(-1, 18)),
    ]
}

pub fn tau(alpha: &EisInt) -> Cusp {
    tau_table().into_iter().find(|(a, _)| congruent_mod(a, alpha)).map(|x| x.1).unwrap()
}

/// Label of a torsion point as printed in the table, with x, y in Z[ω].
#[derive(Clone, Debug)]
pub struct NormalizerRow {
    pub label: &'static str,
    pub point: EisPoint,
    pub matrix: RMat,
}

pub fn normalizer_table() -> Vec<NormalizerRow> {
    let pt = |x: EisInt, y: i64| Some((x, EisInt::from_int(y)));
    let w = eis(0, 1);
    let w2 = eis(-1, -1);
    let sc = |k: i64, e: &EisInt| &EisInt::from_int(k) * e;
    vec![
        NormalizerRow { label: "O", point: None, matrix: rmat(1, 0, 0, 1) },
        NormalizerRow { label: "(0,1)", point: pt(eis(0, 0), 1), matrix: rmat(-2, -1, 36, 16) },
        NormalizerRow { label: "(0,-1)", point: pt(eis(0, 0), -1), matrix: rmat(16, 1, -36, -2) },
        NormalizerRow { label: "(-1,0)", point: pt(eis(-1, 0), 0), matrix: rmat(9, 4, -144, -63) },
        NormalizerRow { label: "(-ω,0)", point: pt(-&w, 0), matrix: rmat(39, 4, 144, 15) },
        NormalizerRow { label: "(-ω²,0)", point: pt(-&w2, 0), matrix: rmat(87, -20, 144, -33) },
        NormalizerRow { label: "(2,3)", point: pt(eis(2, 0), 3), matrix: rmat(0, 1, -36, -18) },
        NormalizerRow { label: "(2ω,3)", point: pt(sc(2, &w), 3), matrix: rmat(12, 1, 36, 6) },
        NormalizerRow { label: "(2ω²,3)", point: pt(sc(2, &w2), 3), matrix: rmat(12, 11, -36, -30) },
        NormalizerRow { label: "(2,-3)", point: pt(eis(2, 0), -3), matrix: rmat(-18, -1, 36, 0) },
        NormalizerRow { label: "(2ω,-3)", point: pt(sc(2, &w), -3), matrix: rmat(-6, 1, 36, -12) },
        NormalizerRow { label: "(2ω²,-3)", point: pt(sc(2, &w2), -3), matrix: rmat(6, 1, 36, 12) },
    ]
}

/// A = [[1, 1/6], [0, 1]].
pub fn matrix_a() -> RMat {
    rmat(1, Rational::from((1, 6)), 0, 1)
}

/// B = [[0, 1], [-36, 0]].
pub fn matrix_b() -> RMat {
    rmat(0, 1, -36, 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub label: String,
    pub alpha: String,
    pub normalizes: bool,
    pub infinity_to: String,
    pub expected_cusp: String,
    pub cusp_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizerReport {
    pub generators: usize,
    pub cosets: usize,
    pub rows: Vec<RowCheck>,
    pub group_law_failures: Vec<String>,
    pub a6_in_gamma0: bool,
    pub a_order: u32,
    pub a_normalizes: bool,
    pub b_normalizes: bool,
    pub ba3_infinity_to: String,
    /// u with A t_α A⁻¹ ≡ t_{uα}, if one unit works for every α.
    pub a_acts_by_unit: Option<String>,
    pub tau_bijective: bool,
    pub pass: bool,
}

fn alpha_of(point: &EisPoint) -> Result<EisInt> {
    tau_table()
        .into_iter()
        .map(|(a, _)| a)
        .find(|a| torsion_point(a) == *point)
        .ok_or_else(|| Error::Structure("point is not in E[2√-3]".into()))
}

fn row_for(rows: &[NormalizerRow], alpha: &EisInt) -> usize {
    rows.iter().position(|r| torsion_point(alpha) == r.point).expect("every class has a row")
}

pub fn verify_normalizer_table() -> Result<NormalizerReport> {
    let graph = gamma0_generators();
    let gens = &graph.generators;
    let table = normalizer_table();
    let mut rows = Vec::new();
    let mut alphas = Vec::new();
    for r in &table {
        let alpha = alpha_of(&r.point)?;
        let to = act_on_infinity(&r.matrix)?;
        let expected = tau(&alpha);
        rows.push(RowCheck {
            label: r.label.to_string(),
            alpha: alpha.to_string(),
            normalizes: normalizes(&r.matrix, gens),
            infinity_to: to.to_string(),
            expected_cusp: expected.to_string(),
            cusp_ok: to == expected,
        });
        alphas.push(alpha);
    }
    let mut failures = Vec::new();
    for (i, a) in alphas.iter().enumerate() {
        for (j, b) in alphas.iter().enumerate() {
            let k = row_for(&table, &(a + b));
            let prod = mat_mul(&table[i].matrix, &table[j].matrix);
            if !in_scaled_gamma0(&mat_mul(&prod, &mat_inv(&table[k].matrix))) {
                failures.push(format!("t{} t{} != t{}", table[i].label, table[j].label, table[k].label));
            }
        }
    }
    let a = matrix_a();
    let a_order = (1..=12).find(|&e| in_scaled_gamma0(&mat_pow(&a, e))).unwrap_or(0);
    let a_inv = mat_inv(&a);
    let mut acts = None;
    for u in EisInt::units() {
        let ok = alphas.iter().enumerate().all(|(i, al)| {
            let k = row_for(&table, &(&u * al));
            let conj = mat_mul(&mat_mul(&a, &table[i].matrix), &a_inv);
            in_scaled_gamma0(&mat_mul(&conj, &mat_inv(&table[k].matrix)))
        });
        if ok {
            acts = Some(u.to_string());
            break;
        }
    }
    let ba3 = mat_mul(&matrix_b(), &mat_pow(&a, 3));
    let ba3_to = act_on_infinity(&ba3)?;
    let mut images: Vec<Cusp> = tau_table().into_iter().map(|x| x.1).collect();
    images.sort();
    let tau_bijective = images == all_cusps();
    let a6 = in_scaled_gamma0(&mat_pow(&a, 6));
    let zero = cusp_classify(&Integer::new(), &Integer::from(1))?;
    let pass = rows.iter().all(|r| r.normalizes && r.cusp_ok)
        && failures.is_empty()
        && a6
        && a_order == 6
        && normalizes(&a, gens)
        && normalizes(&matrix_b(), gens)
        && ba3_to == zero
        && acts.is_some()
        && tau_bijective;
    Ok(NormalizerReport {
        generators: gens.len(),
        cosets: graph.reps.len(),
        rows,
        group_law_failures: failures,
        a6_in_gamma0: a6,
        a_order,
        a_normalizes: normalizes(&a, gens),
        b_normalizes: normalizes(&matrix_b(), gens),
        ba3_infinity_to: ba3_to.to_string(),
        a_acts_by_unit: acts,
        tau_bijective,
        pass,
    })
}

// ---------------------------------------------------------------------------
// U

pub type PMat = [[TruncPadic; 2]; 2];

pub fn pmat(m: &RMat, p: u64, prec: u32) -> PMat {
    let t = |x: &Rational| TruncPadic::from_rational(p, x, prec);
    [[t(&m[0][0]), t(&m[0][1])], [t(&m[1][0]), t(&m[1][1])]]
}

/// Membership in U_v: GL₂(Z_v) with 36 | c at v, and a ≡ d mod 3 at v = 3.
pub fn u_membership(g: &PMat, v: u64) -> Result<bool> {
    let p = g[0][0].p();
    if p != v || g.iter().flatten().any(|x| x.p() != v || x.ring() != LocalRing::Zp) {
        return Err(Error::Domain(format!("matrix is not over Z_{}", v)));
    }
    for x in g.iter().flatten() {
        if !x.is_integral()? {
            return Ok(false);
        }
    }
    let det = g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0]));
    if det.abs_prec() < 1 {
        return Err(Error::Precision("determinant unknown modulo v".into()));
    }
    if !det.is_unit()? {
        return Ok(false);
    }
    let k = crate::arith::valuation(&Integer::from(LEVEL), v);
    if k > 0 && g[1][0].residue(k)?[0] != 0 {
        return Ok(false);
    }
    if v == 3 && g[0][0].sub(&g[1][1]).residue(1)?[0] != 0 {
        return Ok(false);
    }
    Ok(true)
}

/// g·∏ h_v ∈ U, with each h_v supported at its place v; decided at 2, 3, the
/// twisted places and the primes of the denominators and determinant.
pub fn adelic_membership(g: &RMat, twists: &[(u64, RMat)], prec: u32) -> Result<bool> {
    let mut places: Vec<u64> = vec![2, 3];
    let mut bad = Integer::from(1);
    let d = mat_det(g);
    for x in g.iter().flatten().chain([&d]) {
        bad.lcm_mut(x.denom());
    }
    bad *= d.numer().clone().abs();
    places.extend(twists.iter().map(|t| t.0));
    for (q, _) in crate::arith::factor(&bad) {
        places.push(q.to_u64().ok_or_else(|| Error::Domain("huge prime".into()))?);
    }
    places.sort();
    places.dedup();
    for v in places {
        let local = match twists.iter().find(|(w, _)| *w == v) {
            Some((_, h)) => mat_mul(g, h),
            None => g.clone(),
        };
        if !u_membership(&pmat(&local, v, prec), v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// ε = diag(1, -1).
pub fn epsilon() -> RMat {
    rmat(1, 0, 0, -1)
}

/// w = [[1, -N/2], [0, -1]].
pub fn w_matrix(n: u64) -> RMat {
    rmat(1, Rational::from((-(n as i64), 2)), 0, -1)
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCheck {
    pub label: String,
    pub member: bool,
}

/// The memberships used for the Galois action on the Heegner point attached
/// to N.
pub fn heegner_memberships(n: u64) -> Result<Vec<MembershipCheck>> {
    let rho = crate::local::rho_omega(n);
    let mut out = Vec::new();
    let g2 = rmat(1, Rational::from((1, 2)), 18, 10);
    out.push(MembershipCheck { label: "[[1, 1/2], [18, 10]]·ω₂".into(), member: adelic_membership(&g2, &[(2, rho.clone())], 16)? });
    if n % 3 == 2 {
        let g3 = rmat(1, Rational::from((1, 3)), 36, 13);
        out.push(MembershipCheck { label: "[[1, 1/3], [36, 13]]·ω₃".into(), member: adelic_membership(&g3, &[(3, rho.clone())], 16)? });
    }
    let t = rmat(1, Rational::from((n as i64, 2)), 0, 1);
    let we = mat_mul(&mat_mul(&t, &w_matrix(n)), &epsilon());
    out.push(MembershipCheck { label: "[[1, N/2], [0, 1]]·w·ε".into(), member: adelic_membership(&we, &[], 16)? });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: i64, q: i64) -> Cusp {
        cusp_classify(&Integer::from(p), &Integer::from(q)).unwrap()
    }

    #[test]
    fn twelve_cusps() {
        assert_eq!(all_cusps().len(), 12);
        let mut listed: Vec<Cusp> = LISTED_CUSPS.iter().map(|&(p, q)| c(p, q)).collect();
        listed.sort();
        listed.dedup();
        assert_eq!(listed, all_cusps());
        assert_eq!(c(-1, 2), c(1, 2));
        assert_eq!(c(1, 36), cusp_infinity());
    }

    #[test]
    fn coset_graph() {
        let g = gamma0_generators();
        assert_eq!(g.reps.len(), 72);
        assert!(g.generators.iter().all(in_gamma0));
    }

    #[test]
    fn torsion_is_cyclic_mod_2sqrt3() {
        assert_eq!(torsion_point(&eis(6, 0)), None);
        assert_eq!(torsion_point(&eis(2, 4)), None);
        assert_eq!(torsion_point(&eis(2, 0)), Some((eis(0, 0), eis(1, 0))));
        assert_eq!(torsion_point(&eis(3, 0)), Some((eis(-1, 0), eis(0, 0))));
    }

    #[test]
    fn table_verifies() {
        let r = verify_normalizer_table().unwrap();
        assert!(r.pass, "{:#?}", r);
        assert_eq!(r.cosets, 72);
    }

    #[test]
    fn memberships() {
        let id = pmat(&rmat(1, 0, 0, 1), 3, 8);
        assert!(u_membership(&id, 3).unwrap());
        assert!(!u_membership(&pmat(&rmat(1, 0, 0, 2), 3, 8), 3).unwrap());
        let g2 = rmat(1, Rational::from((1, 2)), 18, 10);
        assert!(!adelic_membership(&g2, &[], 16).unwrap());
        let g3 = rmat(1, Rational::from((1, 3)), 36, 13);
        assert!(!adelic_membership(&g3, &[(3, crate::local::rho_omega(7))], 16).unwrap());
        for n in [5u64, 11, 23, 55] {
            for m in heegner_memberships(n).unwrap() {
                assert!(m.member, "N = {}: {}", n, m.label);
            }
        }
    }

    #[test]
    fn low_precision_is_an_error() {
        let one = TruncPadic::from_int(3, 1, 1);
        let fuzzy_zero = one.sub(&one);
        let g = [[one.clone(), TruncPadic::from_int(3, 0, 1)], [fuzzy_zero, one]];
        assert!(u_membership(&g, 3).is_err());
    }
}
