//! Local computations at a single prime: truncated p-adic numbers, the
//! quaternion-algebra dichotomy table, coset character sums for the toric
//! integral, the β⁰ closed form, lattice intersections of embedded orders,
//! and the 3-adic norm congruences for K(∛p)/K.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{fmod, hnf2, valuation, valuation_rat};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Truncated p-adics

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalRing {
    /// Z_p.
    Zp,
    /// Z_p[ω], ω² + ω + 1 = 0.
    Eisenstein,
}

/// p^shift · (c₀ + c₁ω) with c₀, c₁ known modulo p^prec.
///
/// Nonzero values are kept with p ∤ gcd(c₀, c₁); a value with prec = 0 is
/// zero to absolute precision `shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncPadic {
    p: u64,
    ring: LocalRing,
    shift: i64,
    c: [Integer; 2],
    prec: u32,
}

fn pk(p: u64, k: u32) -> Integer {
    Integer::from(Integer::u_pow_u(p as u32, k))
}

impl TruncPadic {
    fn raw(p: u64, ring: LocalRing, shift: i64, c: [Integer; 2], prec: u32) -> Self {
        let mut x = TruncPadic { p, ring, shift, c, prec };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        let m = pk(self.p, self.prec);
        for c in self.c.iter_mut() {
            *c = fmod(c, &m);
        }
        while self.prec > 0 && self.c.iter().all(|c| c.is_divisible_u(self.p as u32)) {
            for c in self.c.iter_mut() {
                *c /= self.p as u32;
            }
            self.shift += 1;
            self.prec -= 1;
        }
    }

    pub fn zero(p: u64, ring: LocalRing, abs_prec: i64) -> Self {
        TruncPadic { p, ring, shift: abs_prec, c: [Integer::new(), Integer::new()], prec: 0 }
    }

    pub fn from_rational(p: u64, r: &Rational, prec: u32) -> Self {
        Self::from_eis(p, LocalRing::Zp, r, &Rational::new(), prec)
    }

    /// a + bω with rational a, b, at relative precision `prec`.
    pub fn from_eis(p: u64, ring: LocalRing, a: &Rational, b: &Rational, prec: u32) -> Self {
        if *a == 0 && *b == 0 {
            return Self::zero(p, ring, i64::MAX / 4);
        }
        let v = [a, b].iter().filter(|r| ***r != 0).map(|r| valuation_rat(r, p)).min().unwrap();
        let m = pk(p, prec);
        let scaled = |r: &Rational| -> Integer {
            if *r == 0 {
                return Integer::new();
            }
            // r / p^v as a p-adic integer modulo p^prec
            let mut num = r.numer().clone();
            let mut den = r.denom().clone();
            if v >= 0 {
                den *= pk(p, v as u32);
            } else {
                num *= pk(p, (-v) as u32);
            }
            let g = Integer::from(num.gcd_ref(&den));
            num /= &g;
            den /= &g;
            let inv = den.invert(&m).expect("unit denominator after scaling");
            fmod(&(num * inv), &m)
        };
        Self::raw(p, ring, v, [scaled(a), scaled(b)], prec)
    }

    pub fn from_int(p: u64, n: i64, prec: u32) -> Self {
        Self::from_rational(p, &Rational::from(n), prec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ring(&self) -> LocalRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Absolute precision: the value is known modulo p^abs_prec.
    pub fn abs_prec(&self) -> i64 {
        self.shift + self.prec as i64
    }

    /// min(v(c₀), v(c₁)); None when the value is zero at this precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.shift)
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
        assert_eq!(self.ring, o.ring, "mixed rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let a = self.abs_prec().min(o.abs_prec());
        let s = if self.is_zero() {
            o.shift.min(a)
        } else if o.is_zero() {
            self.shift.min(a)
        } else {
            self.shift.min(o.shift)
        };
        if a <= s {
            return Self::zero(self.p, self.ring, self.shift + o.shift);
        }
        let lift = |x: &Self, i: usize| -> Integer {
            if x.is_zero() {
                Integer::new()
            } else {
                &x.c[i] * pk(self.p, (x.shift - s) as u32)
            }
        };
        let c = [lift(self, 0) + lift(o, 0), lift(self, 1) + lift(o, 1)];
        Self::raw(self.p, self.ring, s, c, (a - s) as u32)
    }

    pub fn neg(&self) -> Self {
        let c = [-self.c[0].clone(), -self.c[1].clone()];
        Self::raw(self.p, self.ring, self.shift, c, self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p, self.ring, self.shift + o.shift);
        }
        let (a, b) = (&self.c[0], &self.c[1]);
        let (c, d) = (&o.c[0], &o.c[1]);
        let bd = Integer::from(b * d);
        let c0 = Integer::from(a * c) - &bd;
        let c1 = Integer::from(a * d) + Integer::from(b * c) - bd;
        Self::raw(self.p, self.ring, self.shift + o.shift, [c0, c1], self.prec.min(o.prec))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int(self.p, 1, self.prec.max(1)).with_ring(self.ring);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn with_ring(mut self, ring: LocalRing) -> Self {
        self.ring = ring;
        self
    }

    /// c₀² - c₀c₁ + c₁² (or c₀ for Z_p), unscaled.
    fn unit_norm(&self) -> Integer {
        match self.ring {
            LocalRing::Zp => self.c[0].clone(),
            LocalRing::Eisenstein => {
                let (a, b) = (&self.c[0], &self.c[1]);
                Integer::from(a * a) - Integer::from(a * b) + Integer::from(b * b)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Precision("inverse of a value indistinguishable from 0".into()));
        }
        let nrm = self.unit_norm();
        let k = valuation(&nrm, self.p);
        if k >= self.prec {
            return Err(Error::Precision("norm vanishes at this precision".into()));
        }
        let prec = self.prec - k;
        let m = pk(self.p, prec);
        let u = (&nrm / pk(self.p, k)).invert(&m).map_err(|_| Error::Numeric("non-invertible unit".into()))?;
        let conj = match self.ring {
            LocalRing::Zp => [Integer::from(1), Integer::new()],
            LocalRing::Eisenstein => [Integer::from(&self.c[0] - &self.c[1]), -self.c[1].clone()],
        };
        let c = [Integer::from(&conj[0] * &u), Integer::from(&conj[1] * &u)];
        Ok(Self::raw(self.p, self.ring, -self.shift - k as i64, c, prec))
    }

    pub fn is_integral(&self) -> Result<bool> {
        if self.is_zero() {
            if self.shift < 0 {
                return Err(Error::Precision("zero only known modulo a negative power".into()));
            }
            return Ok(true);
        }
        Ok(self.shift >= 0)
    }

    pub fn is_unit(&self) -> Result<bool> {
        if !self.is_integral()? {
            return Ok(false);
        }
        if self.is_zero() {
            return Ok(false);
        }
        Ok(self.shift == 0 && !self.unit_norm().is_divisible_u(self.p as u32))
    }

    /// Coordinates (a, b) of an integral value modulo p^k.
    pub fn residue(&self, k: u32) -> Result<[Integer; 2]> {
        if !self.is_integral()? {
            return Err(Error::Domain("residue of a non-integral value".into()));
        }
        if self.abs_prec() < k as i64 {
            return Err(Error::Precision(format!(
                "value known modulo p^{}, asked for p^{}",
                self.abs_prec(),
                k
            )));
        }
        let m = pk(self.p, k);
        if self.is_zero() {
            return Ok([Integer::new(), Integer::new()]);
        }
        let s = pk(self.p, self.shift as u32);
        Ok([
            fmod(&Integer::from(&self.c[0] * &s), &m),
            fmod(&Integer::from(&self.c[1] * &s), &m),
        ])
    }
}

// ---------------------------------------------------------------------------
// ε-dichotomy

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KType {
    Split,
    Inert,
    Ramified,
}

/// Local data of (π, χ): residue size q, conductor exponents n and c, the
/// type of K/F and its ramification index e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LocalPair {
    pub q: u64,
    pub n: u32,
    pub c: u32,
    pub kind: KType,
    pub e: u32,
}

impl LocalPair {
    pub fn new(q: u64, n: u32, c: u32, kind: KType) -> Result<Self> {
        let e = if kind == KType::Ramified { 2 } else { 1 };
        if q < 2 {
            return Err(Error::Domain(format!("residue field of size {}", q)));
        }
        Ok(LocalPair { q, n, c, kind, e })
    }
}

/// Shape of π, where the table needs it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepType {
    PrincipalSeries,
    /// sp(2) ⊗ μ with μ of the given conductor exponent.
    Steinberg { twist_conductor: u32 },
    Supercuspidal,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Split,
    Nonsplit,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct Dichotomy {
    pub verdict: Verdict,
    pub rule: &'static str,
}

pub fn epsilon_dichotomy(lp: &LocalPair, rep: RepType) -> Dichotomy {
    let d = |verdict, rule| Dichotomy { verdict, rule };
    if lp.kind == KType::Split {
        return d(Verdict::Undetermined, "K split: outside the table");
    }
    if lp.c as i64 - lp.n as i64 + lp.e as i64 - 1 < 0 {
        return d(Verdict::Undetermined, "c - n + e - 1 < 0");
    }
    if lp.c >= lp.n {
        return d(Verdict::Split, "c >= n");
    }
    if lp.n >= 3 {
        return d(Verdict::Split, "n >= 3");
    }
    if lp.kind == KType::Ramified && lp.n == 2 && lp.c == 1 {
        return match rep {
            RepType::Steinberg { twist_conductor: 1 } => d(Verdict::Split, "sp(2) ⊗ μ, μ quadratic of conductor 1: μ_K unramified"),
            RepType::Steinberg { .. } => d(Verdict::Undetermined, "Steinberg twist of conductor != 1 cannot have n = 2"),
            RepType::Supercuspidal => d(Verdict::Split, "supercuspidal: ramified characters occur in π"),
            RepType::PrincipalSeries => d(Verdict::Split, "principal series: no division-algebra form"),
            RepType::Unknown => d(Verdict::Split, "every shape with n = 2 is split"),
        };
    }
    d(Verdict::Undetermined, "no rule applies")
}

// ---------------------------------------------------------------------------
// Coset character sums

/// Arithmetic in O/p^m for O unramified of degree f over Z_p, presented as
/// (Z/p^m)[θ]/(g(θ)) with g monic and irreducible mod p.
#[derive(Clone, Debug)]
struct ResidueRing {
    p: u64,
    f: usize,
    modulus: u64,
    /// g(θ) = θ^f + Σ g_i θ^i: reduction θ^f = -Σ g_i θ^i.
    g: Vec<u64>,
}

impl ResidueRing {
    fn new(p: u64, f: usize, m: u32) -> Result<Self> {
        let modulus = p.pow(m);
        let g = match f {
            1 => vec![0],
            2 | 3 => find_irreducible(p, f).ok_or_else(|| Error::Domain(format!("no irreducible of degree {} mod {}", f, p)))?,
            _ => return Err(Error::Domain(format!("residue degree {} not supported", f))),
        };
        Ok(ResidueRing { p, f, modulus, g })
    }

    fn size(&self) -> u64 {
        self.modulus.pow(self.f as u32)
    }

    fn decode(&self, mut i: u64) -> Vec<u64> {
        let mut v = vec![0; self.f];
        for c in v.iter_mut() {
            *c = i % self.modulus;
            i /= self.modulus;
        }
        v
    }

    fn encode(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.modulus + c)
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.modulus).collect()
    }

    fn scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        a.iter().map(|x| (*x as u128 * s as u128 % self.modulus as u128) as u64).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        let mut prod = vec![0u128; 2 * self.f - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + *x as u128 * *y as u128) % m;
            }
        }
        for k in (self.f..prod.len()).rev() {
            let top = prod[k];
            prod[k] = 0;
            for (i, gi) in self.g.iter().enumerate() {
                let idx = k - self.f + i;
                prod[idx] = (prod[idx] + m - top * *gi as u128 % m) % m;
            }
        }
        prod.truncate(self.f);
        prod.into_iter().map(|x| x as u64).collect()
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.f];
        v[0] = 1 % self.modulus;
        v
    }

    fn val(&self, a: &[u64]) -> u32 {
        a.iter().map(|&x| if x == 0 { u32::MAX } else { valuation(&Integer::from(x), self.p) }).min().unwrap()
    }

    fn is_unit(&self, a: &[u64]) -> bool {
        self.val(a) == 0
    }

    fn inv(&self, a: &[u64]) -> Vec<u64> {
        // |(O/p^m)^×| = q^m - q^{m-1}
        let q = self.p.pow(self.f as u32);
        let order = self.size() - self.size() / q;
        let mut e = order - 1;
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

fn find_irreducible(p: u64, f: usize) -> Option<Vec<u64>> {
    // degree ≤ 3: irreducible iff no roots mod p
    let total = p.pow(f as u32);
    for idx in 0..total {
        let mut g = Vec::with_capacity(f);
        let mut t = idx;
        for _ in 0..f {
            g.push(t % p);
            t /= p;
        }
        let has_root = (0..p).any(|x| {
            let mut acc = 1u64;
            for i in (0..f).rev() {
                acc = (acc * x + g[i]) % p;
            }
            acc == 0
        });
        if !has_root {
            return Some(g);
        }
    }
    None
}

/// H = O_K^×/O_c^× for K = F(τ), τ² = p, realised on classes of 1 + xτ.
struct CosetGroup {
    ring: ResidueRing,
    p: u64,
    c: u32,
    /// element index -> x
    elems: Vec<Vec<u64>>,
}

impl CosetGroup {
    fn new(p: u64, f: usize, c: u32) -> Result<Self> {
        let ring = ResidueRing::new(p, f, c)?;
        let elems = (0..ring.size()).map(|i| ring.decode(i)).collect();
        Ok(CosetGroup { ring, p, c, elems })
    }

    fn order(&self) -> usize {
        self.elems.len()
    }

    fn index(&self, x: &[u64]) -> usize {
        self.ring.encode(x) as usize
    }

    /// (1 + xτ)(1 + yτ) = (1 + pxy) + (x + y)τ, renormalised.
    fn op(&self, i: usize, j: usize) -> usize {
        let (x, y) = (&self.elems[i], &self.elems[j]);
        let a = self.ring.add(&self.ring.one(), &self.ring.scale(&self.ring.mul(x, y), self.p));
        let b = self.ring.add(x, y);
        self.index(&self.ring.mul(&b, &self.ring.inv(&a)))
    }

    fn pow(&self, g: usize, mut e: u64) -> usize {
        let mut acc = 0usize;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        acc
    }

    /// Basis (g_j, n_j) of the abelian p-group and the coordinate map.
    fn decompose(&self) -> (Vec<(usize, u64)>, Vec<Vec<u64>>) {
        let n = self.order();
        let mut span: Vec<usize> = vec![0];
        let mut in_span = vec![false; n];
        in_span[0] = true;
        let mut basis: Vec<(usize, u64)> = Vec::new();
        while span.len() < n {
            // coset of largest order in H/span
            let ord_mod = |g: usize| -> u64 {
                let mut k = 1;
                let mut h = g;
                while !in_span[h] {
                    h = self.op(h, g);
                    k += 1;
                }
                k
            };
            let (g, m) = (0..n).filter(|&g| !in_span[g]).map(|g| (g, ord_mod(g))).max_by_key(|x| x.1).unwrap();
            // a representative of that coset with g^m = 1
            let rep = span
                .iter()
                .map(|&s| self.op(g, s))
                .find(|&h| self.pow(h, m) == 0)
                .expect("maximal-order coset has a lift of the same order");
            let mut new_span = Vec::with_capacity(span.len() * m as usize);
            let mut h = 0usize;
            for _ in 0..m {
                for &s in &span {
                    new_span.push(self.op(h, s));
                }
                h = self.op(h, rep);
            }
            for &s in &new_span {
                in_span[s] = true;
            }
            span = new_span;
            basis.push((rep, m));
        }
        let mut coords = vec![Vec::new(); n];
        let mut stack: Vec<(usize, Vec<u64>)> = vec![(0, Vec::new())];
        for &(g, m) in &basis {
            let mut next = Vec::new();
            for (h, v) in stack {
                let mut x = h;
                for k in 0..m {
                    let mut w = v.clone();
                    w.push(k);
                    next.push((x, w));
                    x = self.op(x, g);
                }
            }
            stack = next;
        }
        for (h, v) in stack {
            coords[h] = v;
        }
        (basis, coords)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetSums {
    pub q: u64,
    pub c: u32,
    /// #K^×/F^×O_c^× by enumeration of (O_K/p^c)^× modulo (O/p^c)^×, doubled for τ.
    pub group_order: u64,
    pub strata_sizes: Vec<u64>,
    pub s_prime_size: u64,
    pub characters: usize,
    /// Σ_{S_i} χ, i = 0..c-1 (identical across all characters tested).
    pub s_sums: Vec<i64>,
    pub s_prime_sum: i64,
    pub expected: Vec<i64>,
    pub pass: bool,
}

fn round_sum(re: f64, im: f64) -> Result<i64> {
    let r = re.round();
    if (re - r).abs() > 1e-8 || im.abs() > 1e-8 {
        return Err(Error::Numeric(format!("character sum {} + {}i is not an integer", re, im)));
    }
    Ok(r as i64)
}

/// Enumerates every χ on K^×/F^×O_c^× of exact conductor c and sums it over
/// the strata {1} ⊔ S_0 ⊔ … ⊔ S_{c-1} ⊔ S′.
pub fn coset_char_sums(q: u64, c: u32) -> Result<CosetSums> {
    if c == 0 || c > 4 || q > 27 {
        return Err(Error::Domain(format!("(q, c) = ({}, {}) is outside the enumeration range", q, c)));
    }
    let fs = crate::arith::factor_u64(q);
    if fs.len() != 1 {
        return Err(Error::Domain(format!("q = {} is not a prime power", q)));
    }
    let (p, f) = (fs[0].0, fs[0].1 as usize);
    let grp = CosetGroup::new(p, f, c)?;
    let ring = &grp.ring;

    // brute-force order of (O_K/p^c)^× / (O/p^c)^×
    let mut classes = HashSet::new();
    for a in 0..ring.size() {
        let av = ring.decode(a);
        if !ring.is_unit(&av) {
            continue;
        }
        let ainv = ring.inv(&av);
        for b in 0..ring.size() {
            classes.insert(ring.encode(&ring.mul(&ring.decode(b), &ainv)));
        }
    }
    let group_order = 2 * classes.len() as u64;

    let strata: Vec<Vec<usize>> = (0..c)
        .map(|i| (0..grp.order()).filter(|&j| ring.val(&grp.elems[j]) == i).collect())
        .collect();
    let strata_sizes: Vec<u64> = strata.iter().map(|s| s.len() as u64).collect();
    let s_prime_size = grp.order() as u64;

    let (basis, coords) = grp.decompose();
    // O_{c-1}^× image: x with v(x) ≥ c - 1
    let deep: Vec<usize> = (0..grp.order()).filter(|&j| ring.val(&grp.elems[j]) >= c - 1).collect();
    let mut s_sums: Option<Vec<i64>> = None;
    let mut s_prime_sum: Option<i64> = None;
    let mut consistent = true;
    let mut count = 0usize;
    let total: u64 = basis.iter().map(|b| b.1).product();
    for k in 0..total {
        let mut ks = Vec::with_capacity(basis.len());
        let mut t = k;
        for &(_, m) in &basis {
            ks.push(t % m);
            t /= m;
        }
        let phase = |j: usize| -> f64 {
            coords[j].iter().zip(&ks).zip(&basis).map(|((x, k), (_, m))| (x * k) as f64 / *m as f64).sum::<f64>()
        };
        let chi = |j: usize| -> (f64, f64) {
            let th = 2.0 * std::f64::consts::PI * phase(j);
            (th.cos(), th.sin())
        };
        let trivial_on_deep = deep.iter().all(|&j| (phase(j) - phase(j).round()).abs() < 1e-12);
        if trivial_on_deep {
            continue;
        }
        for tau_sign in [1.0f64, -1.0] {
            count += 1;
            let mut sums = Vec::with_capacity(c as usize);
            for s in &strata {
                let (re, im) = s.iter().map(|&j| chi(j)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
                sums.push(round_sum(re, im)?);
            }
            // S′ = {aϖ + τ} = τ·(1 + aτ)
            let (re, im) = (0..grp.order()).map(chi).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            let sp = round_sum(tau_sign * re, tau_sign * im)?;
            match (&s_sums, s_prime_sum) {
                (None, _) => {
                    s_sums = Some(sums);
                    s_prime_sum = Some(sp);
                }
                (Some(prev), Some(prev_sp)) => {
                    if *prev != sums || prev_sp != sp {
                        consistent = false;
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let s_sums = s_sums.ok_or_else(|| Error::Structure(format!("no character of conductor {} for q = {}", c, q)))?;
    let s_prime_sum = s_prime_sum.unwrap_or(0);
    let mut expected = vec![0i64; c as usize];
    expected[c as usize - 1] = -1;
    let total_reps = 1 + strata_sizes.iter().sum::<u64>() + s_prime_size;
    let pass = consistent && s_sums == expected && s_prime_sum == 0 && total_reps == group_order;
    let _ = grp.c;
    Ok(CosetSums {
        q,
        c,
        group_order,
        strata_sizes,
        s_prime_size,
        characters: count,
        s_sums,
        s_prime_sum,
        expected,
        pass,
    })
}

// ---------------------------------------------------------------------------
// β⁰

/// Polynomial in q with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn c(v: i64) -> Self {
        Poly(vec![Rational::from(v)])
    }

    pub fn q() -> Self {
        Poly(vec![Rational::new(), Rational::from(1)])
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && *self.0.last().unwrap() == 0 {
            self.0.pop();
        }
        self
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let get = |v: &Vec<Rational>, i: usize| v.get(i).cloned().unwrap_or_default();
        Poly((0..n).map(|i| get(&self.0, i) + get(&o.0, i)).collect()).trim()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![Rational::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly(out).trim()
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|a| -a.clone()).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::c(1), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::new(), |acc, a| acc * q + a)
    }
}

/// num/den in Q(q).
#[derive(Clone, Debug)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::c(1) }
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        RatFn { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn inv(&self) -> RatFn {
        RatFn { num: self.den.clone(), den: self.num.clone() }
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn same(&self, o: &RatFn) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.num.eval(q) / self.den.eval(q)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Beta0Report {
    pub q: u64,
    pub c: u32,
    /// β⁰ / Vol(K^×/F^×) at this q.
    pub value: String,
    pub group_order: u64,
    pub symbolic_match: bool,
    pub pass: bool,
}

/// L(1, 1_F) = (1 - q⁻¹)⁻¹.
fn l_one() -> RatFn {
    RatFn { num: Poly::q(), den: Poly::q().add(&Poly::c(-1)) }
}

/// (1 - Ψ_{c-1}) / #(K^×/F^×O_c^×) with Ψ_{c-1} = -q⁻¹L(1, 1_F), against
/// 2⁻¹q^{-c}L(1, 1_F), both per unit volume.
pub fn beta0(q: u64, c: u32) -> Result<Beta0Report> {
    if c == 0 {
        return Err(Error::Domain("β⁰ needs c ≥ 1 (c + 1 = n with cn ≠ 0)".into()));
    }
    let qi = RatFn { num: Poly::c(1), den: Poly::q() };
    let psi = qi.mul(&l_one()).neg();
    let order = RatFn::poly(Poly::c(2).mul(&Poly::q().pow(c)));
    let assembled = RatFn::poly(Poly::c(1)).add(&psi.neg()).mul(&order.inv());
    let closed = RatFn { num: Poly::c(1), den: Poly::c(2).mul(&Poly::q().pow(c)) }.mul(&l_one());
    let symbolic_match = assembled.same(&closed);
    let sums = coset_char_sums(q, c)?;
    let qr = Rational::from(q);
    let order_ok = order.eval(&qr) == sums.group_order;
    let value = closed.eval(&qr);
    Ok(Beta0Report {
        q,
        c,
        value: value.to_string(),
        group_order: sums.group_order,
        symbolic_match,
        pass: symbolic_match && order_ok && sums.pass,
    })
}

// ---------------------------------------------------------------------------
// Order intersections

/// 2×2 rational matrix [[a, b], [c, d]].
pub type RMat = [[Rational; 2]; 2];

pub fn rmat(a: impl Into<Rational>, b: impl Into<Rational>, c: impl Into<Rational>, d: impl Into<Rational>) -> RMat {
    [[a.into(), b.into()], [c.into(), d.into()]]
}

/// ρ(ω) = [[4, -7N/6], [18/N, -5]].
pub fn rho_omega(n: u64) -> RMat {
    let n = n as i64;
    rmat(4, Rational::from((-7 * n, 6)), Rational::from((18, n)), -5)
}

/// R₀(36) as a Z-basis.
pub fn r0_36() -> Vec<RMat> {
    vec![rmat(1, 0, 0, 0), rmat(0, 1, 0, 0), rmat(0, 0, 36, 0), rmat(0, 0, 0, 1)]
}

/// [[Z, 9⁻¹Z], [9Z, Z]].
pub fn r_double_prime() -> Vec<RMat> {
    vec![rmat(1, 0, 0, 0), rmat(0, Rational::from((1, 9)), 0, 0), rmat(0, 0, 9, 0), rmat(0, 0, 0, 1)]
}

pub fn m2z() -> Vec<RMat> {
    vec![rmat(1, 0, 0, 0), rmat(0, 1, 0, 0), rmat(0, 0, 1, 0), rmat(0, 0, 0, 1)]
}

fn flat(m: &RMat) -> [Rational; 4] {
    [m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()]
}

/// Inverse of a 4×4 rational matrix by Gauss–Jordan.
fn inv4(m: &[[Rational; 4]; 4]) -> Result<[[Rational; 4]; 4]> {
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..4).map(|i| (0..4).map(|j| Rational::from((i == j) as i32)).collect()).collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| a[r][col] != 0).ok_or_else(|| Error::Structure("order basis is degenerate".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for j in 0..4 {
            a[col][j] /= &d;
            inv[col][j] /= &d;
        }
        for r in 0..4 {
            if r != col && a[r][col] != 0 {
                let f = a[r][col].clone();
                for j in 0..4 {
                    let t = Rational::from(&f * &a[col][j]);
                    a[r][j] -= t;
                    let t = Rational::from(&f * &inv[col][j]);
                    inv[r][j] -= t;
                }
            }
        }
    }
    let mut out: [[Rational; 4]; 4] = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = inv[i][j].clone();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Intersection {
    /// Conductor c with ρ(K) ∩ R = Z + cZ[ω]; with a prime given, only its p-part.
    pub conductor: String,
    /// Basis of ρ⁻¹(R) in (x, y) ↔ x + yω coordinates: (x₀, 0), (a, b).
    pub basis: [[String; 2]; 2],
}

/// ρ(K) ∩ R for R given by a Z-basis; with `at = Some(p)` the result is read
/// in R ⊗ Z_(p).
pub fn order_intersection(rho: &RMat, order: &[RMat], at: Option<u64>) -> Result<Intersection> {
    if order.len() != 4 {
        return Err(Error::Domain("an order in M₂(Q) needs a basis of four matrices".into()));
    }
    let mut b: [[Rational; 4]; 4] = Default::default();
    for (j, m) in order.iter().enumerate() {
        for (i, v) in flat(m).into_iter().enumerate() {
            b[i][j] = v;
        }
    }
    let binv = inv4(&b)?;
    let id = flat(&rmat(1, 0, 0, 1));
    let w = flat(rho);
    // rows r_i with coords_i(x + yρ) = r_i · (x, y)
    let rows: Vec<[Rational; 2]> = (0..4)
        .map(|i| {
            let mut r = [Rational::new(), Rational::new()];
            for k in 0..4 {
                r[0] += Rational::from(&binv[i][k] * &id[k]);
                r[1] += Rational::from(&binv[i][k] * &w[k]);
            }
            r
        })
        .collect();
    // ρ⁻¹(R) is the dual of the row lattice.
    let mut den = Integer::from(1);
    for r in &rows {
        for x in r {
            den.lcm_mut(x.denom());
        }
    }
    let cols: Vec<[Integer; 2]> = rows
        .iter()
        .map(|r| [Rational::from(&r[0] * &den).numer().clone(), Rational::from(&r[1] * &den).numer().clone()])
        .collect();
    let cols: Vec<[Integer; 2]> = cols.into_iter().filter(|v| *v != [Integer::new(), Integer::new()]).collect();
    let h = hnf2(&cols);
    if h[0][0] == 0 || h[1][1] == 0 {
        return Err(Error::Structure("embedding meets the order in rank < 2".into()));
    }
    // W (rows w1, w2) spans the row lattice; ρ⁻¹(R) = W⁻¹ Z².
    let wmat = [
        [Rational::from((h[0][0].clone(), den.clone())), Rational::new()],
        [Rational::from((h[0][1].clone(), den.clone())), Rational::from((h[1][1].clone(), den.clone()))],
    ];
    let det = Rational::from(&wmat[0][0] * &wmat[1][1]);
    // W⁻¹ columns
    let inv = [
        [Rational::from(&wmat[1][1] / &det), Rational::new()],
        [-Rational::from(&wmat[1][0] / &det), Rational::from(&wmat[0][0] / &det)],
    ];
    // columns (inv[0][0], inv[1][0]) and (0, inv[1][1]) in (x, y); put in HNF w.r.t. y
    let v1 = [inv[0][0].clone(), inv[1][0].clone()];
    let v2 = [Rational::new(), inv[1][1].clone()];
    let mut dd = Integer::from(1);
    for x in v1.iter().chain(v2.iter()) {
        dd.lcm_mut(x.denom());
    }
    let to_i = |x: &Rational| Integer::from((x * Rational::from(dd.clone())).numer());
    let hh = hnf2(&[[to_i(&v1[0]), to_i(&v1[1])], [to_i(&v2[0]), to_i(&v2[1])]]);
    let x0 = Rational::from((hh[0][0].clone(), dd.clone()));
    let a = Rational::from((hh[0][1].clone(), dd.clone()));
    let bq = Rational::from((hh[1][1].clone(), dd.clone()));
    let basis = [[x0.to_string(), "0".into()], [a.to_string(), bq.to_string()]];
    let conductor = match at {
        None => {
            if x0 != 1 || *a.denom() != 1 || *bq.denom() != 1 {
                return Err(Error::Structure(format!("ρ(K) ∩ R = Z{} + Z({} + {}ω) is not an order O_c", x0, a, bq)));
            }
            bq.numer().to_string()
        }
        Some(p) => {
            if valuation_rat(&x0, p) != 0 || valuation_rat(&a, p) < 0 || valuation_rat(&bq, p) < 0 {
                return Err(Error::Structure(format!("ρ(K) ∩ R ⊗ Z_({}) is not an order O_c", p)));
            }
            let e = valuation_rat(&bq, p);
            Integer::from(Integer::u_pow_u(p as u32, e as u32)).to_string()
        }
    };
    Ok(Intersection { conductor, basis })
}

pub fn conj(g: &RMat, m: &RMat) -> RMat {
    let mul = |x: &RMat, y: &RMat| -> RMat {
        let e = |i: usize, j: usize| Rational::from(&x[i][0] * &y[0][j]) + Rational::from(&x[i][1] * &y[1][j]);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    };
    let det = Rational::from(&g[0][0] * &g[1][1]) - Rational::from(&g[0][1] * &g[1][0]);
    let ginv = [
        [Rational::from(&g[1][1] / &det), -Rational::from(&g[0][1] / &det)],
        [-Rational::from(&g[1][0] / &det), Rational::from(&g[0][0] / &det)],
    ];
    mul(&mul(g, m), &ginv)
}

// ---------------------------------------------------------------------------
// 3-adic norm congruences

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub p: u64,
    pub samples: usize,
    pub precision: u32,
    /// norms outside Z₃^×(1 + 3O₃)
    pub norm_failures: usize,
    /// residuals of the congruence formula outside Z₃ + 3O₃
    pub congruence_failures: usize,
    /// samples with √-3·β(α² - β²) ∉ 3O₃
    pub main_term_failures: usize,
    pub pass: bool,
}

/// N_{L₃/K₃}(α + βϖ + γϖ²) for ϖ = √-3/(1 + v), v³ = p.
///
/// With x(1 + v)² = c₀ + c₁v + c₂v² the norm is
/// (c₀³ + c₁³p + c₂³p² - 3p c₀c₁c₂)/(1 + p)².
pub fn norm_l3(p: u64, alpha: &TruncPadic, beta: &TruncPadic, gamma: &TruncPadic) -> Result<TruncPadic> {
    let prec = alpha.prec.max(beta.prec).max(gamma.prec).max(1);
    let e = |a: i64, b: i64| TruncPadic::from_eis(3, LocalRing::Eisenstein, &Rational::from(a), &Rational::from(b), prec + 4);
    let s3 = e(1, 2);
    let three = e(3, 0);
    let c0 = alpha.add(&beta.mul(&s3)).sub(&gamma.mul(&three));
    let c1 = alpha.mul(&e(2, 0)).add(&beta.mul(&s3));
    let c2 = alpha.clone();
    let pp = e(p as i64, 0);
    let cube = |x: &TruncPadic| x.mul(x).mul(x);
    let num = cube(&c0)
        .add(&cube(&c1).mul(&pp))
        .add(&cube(&c2).mul(&pp).mul(&pp))
        .sub(&c0.mul(&c1).mul(&c2).mul(&pp).mul(&three));
    let den = e((1 + p as i64).pow(2), 0);
    Ok(num.mul(&den.inv()?))
}

/// For random units x = α + βϖ + γϖ² checks N(x) ∈ Z₃^×(1 + 3O₃) and the
/// congruence N(x) ≡ ±√-3·β(α² - β²) mod Z₃ + 3O₃ (+ for p ≡ 2 mod 9).
pub fn norm_congruence_check(p: u64, samples: usize, seed: u64) -> Result<NormCheck> {
    if !crate::arith::is_prime(p) || (p % 9 != 2 && p % 9 != 5) {
        return Err(Error::Domain(format!("{} is not a prime ≡ 2, 5 mod 9", p)));
    }
    let prec = 12u32;
    let sign: i64 = if p % 9 == 2 { 1 } else { -1 };
    let m = 3i64.pow(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = |a: i64, b: i64| TruncPadic::from_eis(3, LocalRing::Eisenstein, &Rational::from(a), &Rational::from(b), prec);
    let (mut nf, mut cf, mut mf) = (0, 0, 0);
    let mut done = 0;
    while done < samples {
        let alpha = e(rng.gen_range(0..m), rng.gen_range(0..m));
        if !alpha.is_unit()? {
            continue;
        }
        let beta = e(rng.gen_range(0..m), rng.gen_range(0..m));
        let gamma = e(rng.gen_range(0..m), rng.gen_range(0..m));
        done += 1;
        let n = norm_l3(p, &alpha, &beta, &gamma)?;
        let r = n.residue(1)?;
        if !n.is_unit()? || r[1] != 0 {
            nf += 1;
        }
        let main = e(1, 2).mul(&beta).mul(&alpha.mul(&alpha).sub(&beta.mul(&beta))).mul(&e(sign, 0));
        if main.residue(1)? != [Integer::new(), Integer::new()] {
            mf += 1;
        }
        let d = n.sub(&main);
        if d.residue(1)?[1] != 0 {
            cf += 1;
        }
    }
    Ok(NormCheck { p, samples, precision: prec, norm_failures: nf, congruence_failures: cf, main_term_failures: mf, pass: nf == 0 && cf == 0 && mf == 0 })
}
