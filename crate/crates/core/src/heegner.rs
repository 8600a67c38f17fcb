//! CM points of conductor 6N on X₀(36), their Galois orbits, χ_d-twisted
//! Heegner divisors in C/Λ and reconstruction of rational points.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{hnf2, xgcd};
use crate::eisenstein::{chi_eval, CubeRoot, SignedMonomial};
use crate::ellcurve::{canonical_height, CurveK, PeriodLattice, PointRecord, RatPoint};
use crate::error::{Error, Result};
use crate::lseries::{coefficients, local_factors};
use crate::numeric::{eps, pi, recognize_rational, MPComplex};
use crate::quadforms::{enumerate_classes, PicGroup, QuadForm};

/// Orientation of the twisted sum: z_d = Σ_σ [ω^{-s·e_d(σ)}] z_σ with s = ORIENTATION.
/// Calibrated by `orientation_reproduces_vanishing_pattern` in the tests.
pub const ORIENTATION: i64 = 1;

/// Threshold for "zero mod Λ", relative to the real period.
pub const ZERO_TOL: f64 = 1e-20;

/// z(τ) = -Σ a_n/n e^{2πinτ} for the weight-two newform of level 36, written
/// in the variable τ' = 6τ where the newform is η(τ')⁴. The sign sends the
/// cusp [0] to (2, 3) rather than (2, -3).
#[derive(Clone, Debug)]
pub struct ModularParam {
    lat: PeriodLattice,
    coeffs: Vec<Rational>,
    /// Image of the cusp [0]; Z(-1/τ') = -Z(τ') + c₀.
    c0: MPComplex,
    prec: u32,
}

fn zeta6_pow(e: i64, prec: u32) -> MPComplex {
    let e = e.rem_euclid(6);
    let th = Float::with_val(prec, pi(prec) * e) / 3u32;
    MPComplex::cis(&th)
}

impl ModularParam {
    pub fn new(prec: u32) -> Result<Self> {
        let wp = prec + 32;
        let e = CurveK::new(1)?;
        let lat = PeriodLattice::new(&e, wp)?;
        // |Q| ≤ exp(-π√3/6) on the reduced domain.
        let m = ((wp as f64 + 16.0) * std::f64::consts::LN_2 / 0.906).ceil() as usize + 8;
        let a = coefficients(&local_factors(&e, m as u64), m);
        let coeffs = a.iter().enumerate().map(|(n, &v)| if n == 0 { Rational::new() } else { Rational::from((-v, n as i64)) }).collect();
        let mut mp = ModularParam { lat, coeffs, c0: MPComplex::zero(wp), prec };
        let i = MPComplex::i(wp);
        mp.c0 = mp.series(&i).scale_i(2);
        Ok(mp)
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lat
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn c0(&self) -> &MPComplex {
        &self.c0
    }

    fn series(&self, t: &MPComplex) -> MPComplex {
        let wp = self.lat.prec();
        let arg = MPComplex::new(Float::new(wp), Float::with_val(wp, pi(wp) * 2u32) / 6u32);
        let q = (&arg * t).exp();
        let mut qn = q.clone();
        let mut s = MPComplex::zero(wp);
        for c in self.coeffs.iter().skip(1) {
            if *c != 0 {
                let cf = Float::with_val(wp, c);
                s = &s + &qn.scale(&cf);
            }
            qn = &qn * &q;
        }
        s
    }

    /// Z(τ') for τ' in the upper half plane, via SL₂(Z) reduction.
    pub fn eval6(&self, tau6: &MPComplex) -> Result<MPComplex> {
        let wp = self.lat.prec();
        if tau6.im <= 0 {
            return Err(Error::Domain("τ must lie in the upper half plane".into()));
        }
        let mut t = tau6.with_prec(wp);
        let mut e = 0i64;
        let mut b = MPComplex::zero(wp);
        for _ in 0..10_000 {
            let n = t.re.clone().round();
            let ni = n.to_integer().unwrap().to_i64().unwrap();
            t = MPComplex::new(Float::with_val(wp, &t.re - &n), t.im.clone());
            e += ni;
            if t.norm_sqr() < 1 {
                b = &b + &(&zeta6_pow(e, wp) * &self.c0);
                e += 3;
                t = -t.recip();
            } else {
                let z = &(&zeta6_pow(e, wp) * &self.series(&t)) + &b;
                return Ok(self.lat.reduce(&z));
            }
        }
        Err(Error::Numeric("SL₂(Z) reduction did not terminate".into()))
    }

    /// z(τ) for τ on X₀(36), reduced mod Λ.
    pub fn eval(&self, tau: &MPComplex) -> Result<MPComplex> {
        self.eval6(&tau.scale_i(6))
    }
}

/// CM point with class label and the form [A, B, C] (36 | A) it is a root of.
#[derive(Clone, Debug, Serialize)]
pub struct CMPoint {
    pub class: usize,
    pub form: QuadForm,
    #[serde(skip)]
    pub tau: MPComplex,
}

fn root_in_h(f: &QuadForm, prec: u32) -> MPComplex {
    let d = Float::with_val(prec, -f.disc()).sqrt();
    let two_a = Float::with_val(prec, Integer::from(&f.a * 2u32));
    MPComplex::new(Float::with_val(prec, -Float::with_val(prec, &f.b)) / &two_a, d / two_a)
}

/// Integer matrix [[p, q], [r, s]].
type M2 = [[Integer; 2]; 2];

fn rho_6n_omega(n: &Integer) -> M2 {
    [
        [Integer::from(n * 24u32), -Integer::from(n * n) * 7u32],
        [Integer::from(108), -Integer::from(n * 30u32)],
    ]
}

fn row_times(v: &[Integer; 2], m: &M2) -> [Integer; 2] {
    [
        Integer::from(&v[0] * &m[0][0]) + Integer::from(&v[1] * &m[1][0]),
        Integer::from(&v[0] * &m[0][1]) + Integer::from(&v[1] * &m[1][1]),
    ]
}

/// Form of the CM point 𝔞·P₀ where 𝔞 = Za + Z(-b + √Δ)/2 for a form f = [a, b, c]
/// of discriminant -108N² with gcd(a, 6N) = 1.
///
/// P₀ corresponds to the lattice pair (Z h₀ + Z, 36Z h₀ + Z); in row coordinates
/// these are Z² ⊃ 36Z ⊕ Z with O_{6N} acting on the right through ρ.
pub fn translate_form(n: &Integer, f: &QuadForm) -> Result<QuadForm> {
    let six_n = Integer::from(n * 6u32);
    if f.a.clone().gcd(&six_n) != 1 {
        return Err(Error::Domain(format!("{} is not coprime to {}", f, six_n)));
    }
    let r6 = rho_6n_omega(n);
    let half = Integer::from(&six_n - &f.b) / 2u32;
    let beta: M2 = [
        [Integer::from(&r6[0][0] + &half), r6[0][1].clone()],
        [r6[1][0].clone(), Integer::from(&r6[1][1] + &half)],
    ];
    let alpha: M2 = [[f.a.clone(), Integer::new()], [Integer::new(), f.a.clone()]];
    let big = |vs: &[[Integer; 2]]| -> Vec<[Integer; 2]> {
        let mut out = Vec::new();
        for v in vs {
            out.push(row_times(v, &alpha));
            out.push(row_times(v, &beta));
        }
        out
    };
    let l = big(&[[Integer::from(1), Integer::new()], [Integer::new(), Integer::from(1)]]);
    let l36 = big(&[[Integer::from(36), Integer::new()], [Integer::new(), Integer::from(1)]]);
    let h = hnf2(&l);
    // basis b1 = (h00, 0), b2 = (h01, h11)
    let (b1, b2) = ([h[0][0].clone(), Integer::new()], [h[0][1].clone(), h[1][1].clone()]);
    let coords = |w: &[Integer; 2]| -> Result<[Integer; 2]> {
        let (y, r) = w[1].clone().div_rem(b2[1].clone());
        let x0 = &w[0] - Integer::from(&y * &b2[0]);
        let (x, r2) = x0.div_rem(b1[0].clone());
        if r != 0 || r2 != 0 {
            return Err(Error::Structure("sublattice vector outside the lattice".into()));
        }
        Ok([x, y])
    };
    let sub: Vec<[Integer; 2]> = l36.iter().map(coords).collect::<Result<_>>()?;
    let hs = hnf2(&sub);
    let (sa, sb, sd) = (hs[0][0].clone(), hs[0][1].clone(), hs[1][1].clone());
    if Integer::from(&sa * &sd) != 36 {
        return Err(Error::Structure(format!("index of 𝔞L″ in 𝔞L is {} not 36", Integer::from(&sa * &sd))));
    }
    // primitive vector x(sa, 0) + y(sb, sd) of the sublattice
    let mut g2 = None;
    'search: for x in -40i64..=40 {
        for y in -40i64..=40 {
            let u = Integer::from(&sa * x) + Integer::from(&sb * y);
            let v = Integer::from(&sd * y);
            if u.clone().gcd(&v) == 1 {
                g2 = Some([u, v]);
                break 'search;
            }
        }
    }
    let g2 = g2.ok_or_else(|| Error::Structure("quotient 𝔞L/𝔞L″ is not cyclic".into()))?;
    let (_, s, t) = xgcd(&g2[0], &g2[1]);
    // s·u + t·v = 1, so g1 = (t, -s) gives det [[g1],[g2]] = t·v + s·u = 1
    let g1 = [t, -s];
    let to_std = |c: &[Integer; 2]| -> [Integer; 2] {
        [Integer::from(&c[0] * &b1[0]) + Integer::from(&c[1] * &b2[0]), Integer::from(&c[1] * &b2[1])]
    };
    let mut r1 = to_std(&g1);
    let r2 = to_std(&g2);
    let mut det = Integer::from(&r1[0] * &r2[1]) - Integer::from(&r1[1] * &r2[0]);
    if det < 0 {
        r1 = [-r1[0].clone(), -r1[1].clone()];
        det = -det;
    }
    // ρ' = G ρ G⁻¹ with G = [[r1], [r2]]; G⁻¹ = adj(G)/det.
    let g: M2 = [r1.clone(), r2.clone()];
    let adj: M2 = [[r2[1].clone(), -r1[1].clone()], [-r2[0].clone(), r1[0].clone()]];
    let mul = |x: &M2, y: &M2| -> M2 {
        let e = |i: usize, j: usize| Integer::from(&x[i][0] * &y[0][j]) + Integer::from(&x[i][1] * &y[1][j]);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    };
    let m = mul(&mul(&g, &r6), &adj);
    let mut ent = Vec::new();
    for row in &m {
        for v in row {
            let (q, r) = v.clone().div_rem(det.clone());
            if r != 0 {
                return Err(Error::Structure("conjugated embedding is not integral".into()));
            }
            ent.push(q);
        }
    }
    let (p, q, r, s) = (&ent[0], &ent[1], &ent[2], &ent[3]);
    let mut form = QuadForm::new(r.clone(), Integer::from(s - p), -q.clone());
    if form.a < 0 {
        form = QuadForm::new(-form.a, -form.b, -form.c);
    }
    if !form.a.is_divisible_u(36) || form.disc() != Integer::from(n * n) * -108 {
        return Err(Error::Structure(format!("translated form {} is not a level-36 CM form", form)));
    }
    Ok(form)
}

/// P₀ = h₀ = (1 + √-3/9)·N/4, the root of [108, -54N, 7N²].
pub fn base_cm_point(n: u64, prec: u32) -> CMPoint {
    let ni = Integer::from(n);
    let form = QuadForm::new(108, Integer::from(&ni * -54), Integer::from(&ni * &ni) * 7u32);
    CMPoint { class: 0, tau: root_in_h(&form, prec), form }
}

/// One CM point per class of Pic(O_{6N}); class i carries the point 𝔞_i⁻¹·P₀.
pub fn galois_orbit(n: u64, group: &PicGroup, prec: u32) -> Result<Vec<CMPoint>> {
    let ni = Integer::from(n);
    let six_n = Integer::from(6 * n);
    (0..group.order())
        .into_par_iter()
        .map(|i| {
            let inv = group.forms[i].inverse();
            let (rep, _) = inv.coprime_representative(&six_n)?;
            let form = translate_form(&ni, &rep)?;
            Ok(CMPoint { class: i, tau: root_in_h(&form, prec), form })
        })
        .collect()
}

/// Cubic character exponents e_p(σ_𝔞) for each prime p | N and class 𝔞.
pub fn character_table(n: u64, group: &PicGroup) -> Result<BTreeMap<u64, Vec<u8>>> {
    let six_n = Integer::from(6 * n);
    let primes: Vec<u64> = crate::arith::factor_u64(n).into_iter().map(|(p, _)| p).collect();
    let ideals: Vec<_> = group
        .forms
        .iter()
        .map(|f| {
            let (rep, _) = f.coprime_representative(&six_n)?;
            rep.to_eis_ideal()
        })
        .collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for p in primes {
        let d = SignedMonomial::new(false, vec![(p, 1)]);
        let v: Vec<u8> = ideals.iter().map(|id| chi_eval(&d, id).map(|c| c.exponent())).collect::<Result<_>>()?;
        out.insert(p, v);
    }
    Ok(out)
}

/// Everything needed to form z_d for d supported on the primes of N.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub n: u64,
    pub group: PicGroup,
    pub points: Vec<CMPoint>,
    pub z: Vec<MPComplex>,
    pub chars: BTreeMap<u64, Vec<u8>>,
    pub param: ModularParam,
}

impl Orbit {
    pub fn new(n: u64, param: &ModularParam) -> Result<Self> {
        if n.is_multiple_of(2) || n.is_multiple_of(3) {
            return Err(Error::Domain(format!("N = {} must be prime to 6", n)));
        }
        let c = Integer::from(6 * n);
        let group = enumerate_classes(&(Integer::from(&c * &c) * -3)).map_err(|e| e.at("class group"))?;
        let points = galois_orbit(n, &group, param.lattice().prec()).map_err(|e| e.at("galois orbit"))?;
        let z: Vec<MPComplex> = points.par_iter().map(|p| param.eval(&p.tau)).collect::<Result<_>>()?;
        let chars = character_table(n, &group).map_err(|e| e.at("characters"))?;
        Ok(Orbit { n, group, points, z, chars, param: param.clone() })
    }

    /// e_d(σ) = Σ ε_p e_p(σ) mod 3.
    pub fn chi_exponent(&self, d: &SignedMonomial, class: usize) -> Result<i64> {
        let mut e = 0i64;
        for &(p, eps_p) in &d.factors {
            let t = self
                .chars
                .get(&p)
                .ok_or_else(|| Error::Domain(format!("{} does not divide N = {}", p, self.n)))?;
            e += eps_p as i64 * t[class] as i64;
        }
        Ok(e.rem_euclid(3))
    }

    /// z_d = Σ_σ [χ_d(σ)^{-1}] z_σ, reduced mod Λ.
    pub fn twisted_sum(&self, d: &SignedMonomial) -> Result<MPComplex> {
        self.twisted_sum_oriented(d, ORIENTATION)
    }

    /// Twisted sum with an explicit orientation s = ±1.
    pub fn twisted_sum_oriented(&self, d: &SignedMonomial, orientation: i64) -> Result<MPComplex> {
        let wp = self.param.lattice().prec();
        let w = MPComplex::omega(wp);
        let powers = [MPComplex::one(wp), w.clone(), w.square()];
        let mut s = MPComplex::zero(wp);
        for (i, z) in self.z.iter().enumerate() {
            let e = (-orientation * self.chi_exponent(d, i)?).rem_euclid(3) as usize;
            s = &s + &(&powers[e] * z);
        }
        Ok(self.param.lattice().reduce(&s))
    }

    /// Classes on which every χ_p is trivial.
    pub fn genus_kernel(&self) -> Vec<usize> {
        (0..self.group.order()).filter(|&i| self.chars.values().all(|t| t[i] == 0)).collect()
    }

    /// z₀: trace of f(P₀) down to the genus field.
    pub fn genus_point(&self) -> MPComplex {
        let wp = self.param.lattice().prec();
        let mut s = MPComplex::zero(wp);
        for i in self.genus_kernel() {
            s = &s + &self.z[i];
        }
        self.param.lattice().reduce(&s)
    }

    /// All 3^k monomials d = ∏ p_i^{ε_i}.
    pub fn all_d(&self) -> Vec<SignedMonomial> {
        let primes: Vec<u64> = self.chars.keys().copied().collect();
        let mut out = vec![Vec::new()];
        for p in primes {
            let mut next = Vec::new();
            for f in &out {
                for e in [-1i8, 0, 1] {
                    let mut g: Vec<(u64, i8)> = f.clone();
                    g.push((p, e));
                    next.push(g);
                }
            }
            out = next;
        }
        out.into_iter().map(|f| SignedMonomial::new(false, f)).collect()
    }

    /// |Σ_d z_d - 3^k z₀| mod Λ relative to the real period.
    pub fn divisor_sum_residual(&self) -> Result<f64> {
        let wp = self.param.lattice().prec();
        let mut s = MPComplex::zero(wp);
        for d in self.all_d() {
            s = &s + &self.twisted_sum(&d)?;
        }
        let k = self.chars.len() as i64;
        let z0 = self.genus_point().scale_i(3i64.pow(k as u32));
        Ok(self.param.lattice().dist_to_lattice(&(&s - &z0)).to_f64())
    }

    pub fn divisor(&self, d: &SignedMonomial) -> Result<HeegnerDivisor> {
        let z = self.twisted_sum(d)?;
        let lat = self.param.lattice();
        let status = classify(lat, &z);
        Ok(HeegnerDivisor { n: self.n, d: d.clone(), z, status })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Zero,
    Torsion,
    Point,
}

/// Zero, a point of E[2√-3] = E(K)_tors, or of infinite order.
pub fn classify(lat: &PeriodLattice, z: &MPComplex) -> Status {
    let tol = Float::with_val(lat.prec(), ZERO_TOL);
    if lat.dist_to_lattice(z) < tol {
        return Status::Zero;
    }
    // (2√-3) z ∈ Λ
    let wp = lat.prec();
    let s3 = MPComplex::new(Float::new(wp), Float::with_val(wp, 3).sqrt() * 2u32);
    if lat.dist_to_lattice(&(&s3 * z)) < tol {
        return Status::Torsion;
    }
    Status::Point
}

#[derive(Clone, Debug)]
pub struct HeegnerDivisor {
    pub n: u64,
    pub d: SignedMonomial,
    pub z: MPComplex,
    pub status: Status,
}

/// Rational point P on y² = x³ + n² with z = μ·P + t (t torsion) under the
/// real isomorphism C/Λ₁ → C/Λ_{n²}, z ↦ n^{-1/3} z.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub n: Integer,
    pub point: RatPoint,
    /// μ as a + bω.
    pub mu: (i64, i64),
    pub mu_norm: u64,
    pub height_point: Float,
    /// ĥ of the transported z, N(μ)·ĥ(P).
    pub height_z: Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeegnerReport {
    #[serde(rename = "N")]
    pub n_level: u64,
    pub d: String,
    pub z_re: String,
    pub z_im: String,
    pub status: Status,
    pub point: Option<PointRecord>,
    pub height: Option<f64>,
}

/// Eisenstein integers up to associates (one per unit orbit), by norm.
fn mu_candidates(max_norm: i64) -> Vec<(i64, i64)> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let r = (2.0 * (max_norm as f64).sqrt()) as i64 + 2;
    let mut all = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let nrm = a * a - a * b + b * b;
            if nrm >= 1 && nrm <= max_norm {
                all.push((nrm, a, b));
            }
        }
    }
    all.sort();
    for (_, a, b) in all {
        // associates: multiply by -ω repeatedly: (a + bω)(-ω) = b + (b - a)ω
        let mut orbit = vec![(a, b)];
        let (mut x, mut y) = (a, b);
        for _ in 0..5 {
            let nx = y;
            let ny = y - x;
            x = nx;
            y = ny;
            orbit.push((x, y));
        }
        let key = *orbit.iter().min().unwrap();
        if seen.insert(key) {
            out.push((a, b));
        }
    }
    out
}

/// Searches μ by increasing norm, torsion t and λ ∈ Λ/μΛ with
/// u = (z - t + λ)/μ on the real locus and ℘(u) rational.
pub fn reconstruct(z1: &MPComplex, n: &Integer, param: &ModularParam, max_norm: i64) -> Result<Reconstruction> {
    let wp = param.lattice().prec();
    let prec = param.prec();
    let k = Integer::from(n * n);
    let curve = CurveK::new(Rational::from(k.clone()))?;
    let lat = PeriodLattice::new(&curve, wp)?;
    let scale = Float::with_val(wp, n).cbrt().recip();
    let z = lat.reduce(&z1.scale(&scale));
    let tors: Vec<MPComplex> = curve
        .torsion()
        .iter()
        .map(|t| if t.is_infinity() { Ok(MPComplex::zero(wp)) } else { lat.elliptic_log(t) })
        .collect::<Result<_>>()?;
    let bound = Integer::from(1) << ((wp - 32) / 4);
    let w = MPComplex::omega(wp);
    // E(R) is connected: u is real mod Λ iff m2·s - m1·t ∈ Z for (s, t) = coords(u).
    let (o1, o2) = lat.coords(&lat.omega1);
    let m1 = o1.round().to_f64();
    let m2 = o2.round().to_f64();
    let line = |c: (Float, Float)| m2 * c.0.to_f64() - m1 * c.1.to_f64();
    // Up to sign only: P and ζP are not both real.
    let mut mus = Vec::new();
    for (a, b) in mu_candidates(max_norm) {
        mus.extend([(a, b), (-b, a - b), (b - a, -a)]);
    }
    for (a, b) in mus {
        let mu = &MPComplex::from_f64(wp, a as f64, 0.0) + &w.scale(&Float::with_val(wp, b));
        let nm = a * a - a * b + b * b;
        let g1 = line(lat.coords(&lat.v1.div(&mu)));
        let g2 = line(lat.coords(&lat.v2.div(&mu)));
        for t in &tors {
            let base = (&z - t).div(&mu);
            let g0 = line(lat.coords(&base));
            // nm·Λ ⊂ μΛ, so 0 ≤ i, j < N(μ) covers Λ/μΛ.
            for i in 0..nm {
                for j in 0..nm {
                    let g = g0 + i as f64 * g1 + j as f64 * g2;
                    if (g - g.round()).abs() > 1e-8 {
                        continue;
                    }
                    let lam = &lat.v1.scale_i(i) + &lat.v2.scale_i(j);
                    let u = &base + &lam.div(&mu);
                    if lat.is_lattice_point(&u, 40) {
                        continue;
                    }
                    let Ok((x, yp)) = lat.wp(&u) else { continue };
                    let Some(xr) = recognize_rational(&x, &bound) else { continue };
                    let rhs = (xr.clone() * &xr * &xr) + Rational::from(k.clone());
                    if rhs < 0 || !rhs.numer().is_perfect_square() || !rhs.denom().is_perfect_square() {
                        continue;
                    }
                    let yr = Rational::from((rhs.numer().clone().sqrt(), rhs.denom().clone().sqrt()));
                    let yr = if yp.re < 0 { -yr } else { yr };
                    let pt = RatPoint::Affine { x: xr, y: yr };
                    if !curve.contains(&pt) || curve.torsion_order(&pt).is_some() {
                        continue;
                    }
                    let hp = canonical_height(&curve, &pt, prec)?;
                    let hz = Float::with_val(prec, &hp * nm);
                    return Ok(Reconstruction {
                        n: n.clone(),
                        point: pt,
                        mu: (a, b),
                        mu_norm: nm as u64,
                        height_point: hp,
                        height_z: hz,
                    });
                }
            }
        }
    }
    Err(Error::Recognition(format!(
        "no rational point found for z = {:?} on y² = x³ + {}",
        z.to_f64(),
        k
    )))
}

/// Reconstruction with precision doubling (up to 4 rounds).
pub fn reconstruct_escalating(
    n_level: u64,
    d: &SignedMonomial,
    n: &Integer,
    prec: u32,
    max_norm: i64,
) -> Result<(HeegnerDivisor, Reconstruction)> {
    let mut p = prec;
    let mut last = None;
    for _ in 0..4 {
        let param = ModularParam::new(p)?;
        let orbit = Orbit::new(n_level, &param)?;
        let hd = orbit.divisor(d)?;
        if hd.status != Status::Point {
            return Err(Error::Domain(format!("z_{} is {:?}, nothing to reconstruct", d, hd.status)));
        }
        match reconstruct(&hd.z, n, &param, max_norm) {
            Ok(r) => return Ok((hd, r)),
            Err(e) => {
                log::info!("reconstruction at {} bits failed: {}", p, e);
                last = Some(e);
                p *= 2;
            }
        }
    }
    Err(last.unwrap_or_else(|| Error::Recognition("no attempt made".into())))
}

pub fn report(hd: &HeegnerDivisor, rec: Option<&Reconstruction>) -> HeegnerReport {
    HeegnerReport {
        n_level: hd.n,
        d: hd.d.to_string(),
        z_re: hd.z.re.to_string_radix(10, Some(30)),
        z_im: hd.z.im.to_string_radix(10, Some(30)),
        status: hd.status,
        point: rec.and_then(|r| Option::<PointRecord>::from(&r.point)),
        height: rec.map(|r| r.height_z.to_f64()),
    }
}

/// Tolerance helper used by callers comparing complex points mod Λ.
pub fn zero_tol(prec: u32) -> Float {
    Float::with_val(prec, ZERO_TOL).max(&eps(prec, prec as i32 / 2))
}

/// χ_d on a class as a cube root of unity.
pub fn chi_value(orbit: &Orbit, d: &SignedMonomial, class: usize) -> Result<CubeRoot> {
    Ok(CubeRoot::new(orbit.chi_exponent(d, class)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::ComplexPoint;
    use std::sync::OnceLock;

    fn param() -> &'static ModularParam {
        static P: OnceLock<ModularParam> = OnceLock::new();
        P.get_or_init(|| ModularParam::new(128).unwrap())
    }

    fn d(p: u64, e: i8) -> SignedMonomial {
        SignedMonomial::new(false, vec![(p, e)])
    }

    fn close(a: &MPComplex, b: &MPComplex, tol: f64) -> bool {
        (a - b).abs().to_f64() < tol
    }

    #[test]
    fn cusp_zero_is_two_three() {
        let lat = param().lattice();
        match lat.elliptic_exp(param().c0()) {
            ComplexPoint::Affine { x, y } => {
                assert!(close(&x, &MPComplex::from_f64(lat.prec(), 2.0, 0.0), 1e-30));
                assert!(close(&y, &MPComplex::from_f64(lat.prec(), 3.0, 0.0), 1e-30));
            }
            ComplexPoint::Infinity => panic!("cusp [0] went to O"),
        }
        // c₀ = -L(E, 1) = -Ω/6
        let om = lat.real_period().to_f64();
        assert!((param().c0().re.to_f64() + om / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fricke_relation_against_direct_series() {
        let p = param();
        let wp = p.lattice().prec();
        let t = MPComplex::from_f64(wp, 0.1, 1.1);
        let s = -t.recip();
        let direct = p.lattice().reduce(&p.series(&s));
        let via = p.eval6(&s).unwrap();
        assert!(p.lattice().dist_to_lattice(&(&direct - &via)).to_f64() < 1e-30);
        let shifted = p.eval6(&(&t + &MPComplex::from_f64(wp, 6.0, 0.0))).unwrap();
        assert!(p.lattice().dist_to_lattice(&(&shifted - &p.eval6(&t).unwrap())).to_f64() < 1e-30);
    }

    #[test]
    fn orbit_size_and_pattern_n5() {
        let o = Orbit::new(5, param()).unwrap();
        assert_eq!(o.points.len(), 18);
        assert_eq!(o.divisor(&d(5, 0)).unwrap().status, Status::Zero);
        assert_eq!(o.divisor(&d(5, 1)).unwrap().status, Status::Zero);
        assert_eq!(o.divisor(&d(5, -1)).unwrap().status, Status::Point);
        assert!(o.divisor_sum_residual().unwrap() < 1e-30);
    }

    #[test]
    fn orientation_reproduces_vanishing_pattern() {
        let o = Orbit::new(11, param()).unwrap();
        let lat = param().lattice();
        let zero = |z: &MPComplex| lat.dist_to_lattice(z).to_f64() < ZERO_TOL;
        let s = ORIENTATION;
        assert!(!zero(&o.twisted_sum_oriented(&d(11, 1), s).unwrap()));
        assert!(zero(&o.twisted_sum_oriented(&d(11, -1), s).unwrap()));
        // the opposite orientation exchanges d and 1/d
        assert!(zero(&o.twisted_sum_oriented(&d(11, 1), -s).unwrap()));
        assert!(!zero(&o.twisted_sum_oriented(&d(11, -1), -s).unwrap()));
    }

    #[test]
    fn conjugation_negates_orbit() {
        let o = Orbit::new(11, param()).unwrap();
        let lat = param().lattice();
        for z in &o.z {
            let c = z.conj();
            assert!(o.z.iter().any(|w| lat.dist_to_lattice(&(&c + w)).to_f64() < 1e-30));
        }
    }

    #[test]
    fn mu_candidates_are_unit_classes() {
        let m = mu_candidates(12);
        let norms: Vec<i64> = m.iter().map(|&(a, b)| a * a - a * b + b * b).collect();
        assert_eq!(norms, vec![1, 3, 4, 7, 7, 9, 12]);
    }

    #[test]
    fn reconstruct_n11() {
        let o = Orbit::new(11, param()).unwrap();
        let hd = o.divisor(&d(11, 1)).unwrap();
        let r = reconstruct(&hd.z, &Integer::from(11), param(), 400).unwrap();
        let e = CurveK::new(121).unwrap();
        assert!(e.contains(&r.point));
        assert!(r.height_point > 1e-3);
        // ĥ(12, 43) = 2.28295...; z has height 108 times that
        let base = canonical_height(&e, &RatPoint::new(12, 43), 128).unwrap();
        assert!((r.height_z.to_f64() / base.to_f64() - 108.0).abs() < 1e-9);
    }
}
