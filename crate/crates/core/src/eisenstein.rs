//! Arithmetic in Z[ω], ω² + ω + 1 = 0, cubic residue symbols, and the
//! cubic characters χ_d.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::arith::{factor, fmod};
use crate::error::{Error, Result};

/// a + bω.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisInt {
    pub a: Integer,
    pub b: Integer,
}

impl EisInt {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>) -> Self {
        EisInt { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        EisInt::new(0, 0)
    }

    pub fn one() -> Self {
        EisInt::new(1, 0)
    }

    pub fn omega() -> Self {
        EisInt::new(0, 1)
    }

    /// 1 - ω, the prime above 3.
    pub fn lambda() -> Self {
        EisInt::new(1, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn norm(&self) -> Integer {
        Integer::from(&self.a * &self.a) - Integer::from(&self.a * &self.b) + Integer::from(&self.b * &self.b)
    }

    pub fn conj(&self) -> Self {
        EisInt::new(Integer::from(&self.a - &self.b), -self.b.clone())
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn units() -> [EisInt; 6] {
        [
            EisInt::new(1, 0),
            EisInt::new(-1, 0),
            EisInt::new(0, 1),
            EisInt::new(0, -1),
            EisInt::new(-1, -1),
            EisInt::new(1, 1),
        ]
    }

    /// Euclidean division with nearest rounding in the (1, ω) coordinates.
    pub fn div_rem(&self, m: &EisInt) -> (EisInt, EisInt) {
        let n = m.norm();
        assert!(n != 0, "division by zero in Z[ω]");
        let t = self * &m.conj();
        let round = |x: &Integer| -> Integer {
            let twice = Integer::from(x * 2) + &n;
            crate::arith::fdiv(&twice, &Integer::from(&n * 2))
        };
        let q = EisInt::new(round(&t.a), round(&t.b));
        let r = self - &(&q * m);
        (q, r)
    }

    pub fn rem(&self, m: &EisInt) -> EisInt {
        self.div_rem(m).1
    }

    pub fn divides(&self, x: &EisInt) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.rem(self).is_zero()
    }

    /// Exact quotient; panics when not divisible.
    pub fn exact_div(&self, m: &EisInt) -> EisInt {
        let (q, r) = self.div_rem(m);
        assert!(r.is_zero(), "inexact division in Z[ω]");
        q
    }

    pub fn gcd(a: &EisInt, b: &EisInt) -> EisInt {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x
    }

    pub fn pow(&self, mut e: u64) -> EisInt {
        let mut base = self.clone();
        let mut acc = EisInt::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn pow_mod(&self, e: &Integer, m: &EisInt) -> EisInt {
        let mut base = self.rem(m);
        let mut acc = EisInt::one().rem(m);
        let bits = e.significant_bits();
        for i in (0..bits).rev() {
            acc = (&acc * &acc).rem(m);
            if e.get_bit(i) {
                acc = (&acc * &base).rem(m);
            }
        }
        base = acc;
        base
    }

    /// The associate congruent to 2 mod 3, for primes not above 3.
    pub fn primary(&self) -> Result<EisInt> {
        for u in EisInt::units() {
            let c = &u * self;
            if fmod(&c.a, &Integer::from(3)) == 2 && fmod(&c.b, &Integer::from(3)) == 0 {
                return Ok(c);
            }
        }
        Err(Error::Domain(format!("{} has no primary associate", self)))
    }

    pub fn from_int(n: impl Into<Integer>) -> Self {
        EisInt::new(n, 0)
    }
}

impl fmt::Display for EisInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}ω)", self.a, self.b)
    }
}

impl<'a> Add<&'a EisInt> for &'a EisInt {
    type Output = EisInt;
    fn add(self, o: &EisInt) -> EisInt {
        EisInt::new(Integer::from(&self.a + &o.a), Integer::from(&self.b + &o.b))
    }
}

impl<'a> Sub<&'a EisInt> for &'a EisInt {
    type Output = EisInt;
    fn sub(self, o: &EisInt) -> EisInt {
        EisInt::new(Integer::from(&self.a - &o.a), Integer::from(&self.b - &o.b))
    }
}

impl<'a> Mul<&'a EisInt> for &'a EisInt {
    type Output = EisInt;
    fn mul(self, o: &EisInt) -> EisInt {
        let ac = Integer::from(&self.a * &o.a);
        let bd = Integer::from(&self.b * &o.b);
        let ad = Integer::from(&self.a * &o.b);
        let bc = Integer::from(&self.b * &o.a);
        EisInt::new(ac - &bd, ad + bc - bd)
    }
}

impl Neg for &EisInt {
    type Output = EisInt;
    fn neg(self) -> EisInt {
        EisInt::new(-self.a.clone(), -self.b.clone())
    }
}

/// ω^exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeRoot(u8);

impl CubeRoot {
    pub const ONE: CubeRoot = CubeRoot(0);

    pub fn new(e: i64) -> Self {
        CubeRoot(e.rem_euclid(3) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, o: CubeRoot) -> CubeRoot {
        CubeRoot::new(self.0 as i64 + o.0 as i64)
    }

    pub fn inv(self) -> CubeRoot {
        CubeRoot::new(-(self.0 as i64))
    }

    pub fn pow(self, e: i64) -> CubeRoot {
        CubeRoot::new(self.0 as i64 * e)
    }

    pub fn as_eis(self) -> EisInt {
        match self.0 {
            0 => EisInt::new(1, 0),
            1 => EisInt::new(0, 1),
            _ => EisInt::new(-1, -1),
        }
    }
}

/// Square root of a modulo an odd prime p (Tonelli–Shanks).
pub fn sqrt_mod(a: &Integer, p: &Integer) -> Option<Integer> {
    let a = fmod(a, p);
    if a == 0 {
        return Some(Integer::new());
    }
    let pm1 = Integer::from(p - 1);
    let half = Integer::from(&pm1 >> 1);
    if a.clone().pow_mod(&half, p).unwrap() != 1 {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = Integer::from(2);
    while z.clone().pow_mod(&half, p).unwrap() != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.pow_mod(&q, p).unwrap();
    let mut t = a.clone().pow_mod(&q, p).unwrap();
    let mut r = a.pow_mod(&(Integer::from(&q + 1u32) >> 1), p).unwrap();
    while t != 1 {
        let mut i = 0;
        let mut tt = t.clone();
        while tt != 1 {
            tt = Integer::from(&tt * &tt) % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = Integer::from(&b * &b) % p;
        }
        m = i;
        c = Integer::from(&b * &b) % p;
        t = Integer::from(&t * &c) % p;
        r = Integer::from(&r * &b) % p;
    }
    Some(r)
}

/// Both roots of x² + x + 1 mod a prime ℓ ≡ 1 mod 3.
pub fn cube_roots_of_unity_mod(l: &Integer) -> Result<(Integer, Integer)> {
    let s = sqrt_mod(&Integer::from(-3), l)
        .ok_or_else(|| Error::Domain(format!("-3 is not a square mod {}", l)))?;
    let inv2 = Integer::from(2).invert(l).map_err(|_| Error::Domain("2 not invertible".into()))?;
    let r1 = fmod(&(Integer::from(&s - 1) * &inv2), l);
    let r2 = fmod(&((-1 - s) * &inv2), l);
    Ok((r1, r2))
}

/// Prime of Z[ω] containing ℓ and ω - r.
pub fn prime_above(l: &Integer, r: &Integer) -> EisInt {
    EisInt::gcd(&EisInt::from_int(l.clone()), &EisInt::new(-r.clone(), 1))
}

/// Factorization into primes (up to a unit), primes above ℓ ≡ 1 mod 3 listed
/// separately for both conjugates.
pub fn factor_eis(x: &EisInt) -> Vec<(EisInt, u32)> {
    let mut out = Vec::new();
    let mut rest = x.clone();
    for (l, _) in factor(&x.norm()) {
        let cands: Vec<EisInt> = if l == 3 {
            vec![EisInt::lambda()]
        } else if fmod(&l, &Integer::from(3)) == 2 {
            vec![EisInt::from_int(l.clone())]
        } else {
            let (r1, r2) = cube_roots_of_unity_mod(&l).expect("split prime");
            vec![prime_above(&l, &r1), prime_above(&l, &r2)]
        };
        for p in cands {
            let mut e = 0;
            while p.divides(&rest) {
                rest = rest.exact_div(&p);
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
    }
    out
}

fn symbol_at_prime(alpha: &EisInt, pi: &EisInt) -> Result<CubeRoot> {
    let n = pi.norm();
    let e = Integer::from(&n - 1) / 3u32;
    let t = alpha.pow_mod(&e, pi);
    for k in 0..3 {
        let w = CubeRoot::new(k).as_eis();
        if pi.divides(&(&t - &w)) {
            return Ok(CubeRoot::new(k));
        }
    }
    Err(Error::Domain(format!("{} is not a unit mod {}", alpha, pi)))
}

/// Cubic residue symbol (α / m)₃, multiplicative in m.
pub fn cubic_symbol(alpha: &EisInt, modulus: &EisInt) -> Result<CubeRoot> {
    if modulus.is_zero() {
        return Err(Error::Domain("zero modulus".into()));
    }
    if modulus.norm().is_divisible_u(3) {
        return Err(Error::Domain("modulus divisible by √-3".into()));
    }
    if !EisInt::gcd(alpha, modulus).is_unit() {
        return Err(Error::Domain(format!("{} and {} are not coprime", alpha, modulus)));
    }
    let mut acc = CubeRoot::ONE;
    for (p, e) in factor_eis(modulus) {
        let pi = p.primary()?;
        acc = acc.mul(symbol_at_prime(alpha, &pi)?.pow(e as i64));
    }
    Ok(acc)
}

/// Signed product ± ∏ p_i^{ε_i}, ε_i ∈ {-1, 0, 1} after cube reduction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedMonomial {
    pub negative: bool,
    pub factors: Vec<(u64, i8)>,
}

impl SignedMonomial {
    pub fn one() -> Self {
        SignedMonomial { negative: false, factors: vec![] }
    }

    pub fn new(negative: bool, factors: Vec<(u64, i8)>) -> Self {
        let mut fs: Vec<(u64, i8)> = Vec::new();
        for (p, e) in factors {
            if let Some(x) = fs.iter_mut().find(|x| x.0 == p) {
                x.1 += e;
            } else {
                fs.push((p, e));
            }
        }
        let fs = fs
            .into_iter()
            .map(|(p, e)| {
                let r = (e as i64).rem_euclid(3);
                (p, if r == 2 { -1 } else { r as i8 })
            })
            .filter(|x| x.1 != 0)
            .collect::<Vec<_>>();
        let mut fs = fs;
        fs.sort();
        SignedMonomial { negative, factors: fs }
    }

    /// Cube-free reduction of a nonzero rational; None if it has a
    /// prime factor outside the trial-division range.
    pub fn from_rational(r: &Rational) -> Result<Self> {
        if *r == 0 {
            return Err(Error::Domain("zero is not a monomial".into()));
        }
        let mut fs = Vec::new();
        for (p, e) in factor(r.numer()) {
            fs.push((p.to_u64().unwrap(), (e % 3) as i8));
        }
        for (p, e) in factor(r.denom()) {
            fs.push((p.to_u64().unwrap(), -((e % 3) as i8)));
        }
        Ok(SignedMonomial::new(*r < 0, fs))
    }

    pub fn to_rational(&self) -> Rational {
        let mut r = Rational::from(if self.negative { -1 } else { 1 });
        for &(p, e) in &self.factors {
            if e > 0 {
                r *= Integer::from(p);
            } else {
                r /= Integer::from(p);
            }
        }
        r
    }

    pub fn is_cube(&self) -> bool {
        self.factors.is_empty()
    }

    /// Integral cube-free representative n·m³ (p⁻¹ ↦ p²) and the scale m.
    pub fn integral(&self) -> (Integer, Integer) {
        let mut n = Integer::from(if self.negative { -1 } else { 1 });
        let mut m = Integer::from(1);
        for &(p, e) in &self.factors {
            if e > 0 {
                n *= p;
            } else {
                n *= p * p;
                m *= p;
            }
        }
        (n, m)
    }

    pub fn exponent(&self, p: u64) -> i8 {
        self.factors.iter().find(|x| x.0 == p).map(|x| x.1).unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        SignedMonomial::new(self.negative, self.factors.iter().map(|&(p, e)| (p, -e)).collect())
    }

    pub fn radical(&self) -> Integer {
        self.factors.iter().fold(Integer::from(1), |a, &(p, _)| a * p)
    }
}

impl fmt::Display for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Ideal of Z[ω], stored by a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisIdeal {
    pub gen: EisInt,
}

impl EisIdeal {
    pub fn new(gen: EisInt) -> Self {
        EisIdeal { gen }
    }

    pub fn norm(&self) -> Integer {
        self.gen.norm()
    }
}

/// χ_d(σ_𝔞) = ∏ (p/𝔞)₃^{ε_p}.
pub fn chi_eval(d: &SignedMonomial, ideal: &EisIdeal) -> Result<CubeRoot> {
    let bad = Integer::from(3) * d.radical();
    if !EisInt::gcd(&ideal.gen, &EisInt::from_int(bad)).is_unit() {
        return Err(Error::Domain(format!(
            "ideal {} not coprime to 3·rad({}); choose another representative",
            ideal.gen, d
        )));
    }
    let mut acc = CubeRoot::ONE;
    for &(p, e) in &d.factors {
        let s = cubic_symbol(&EisInt::from_int(p), &ideal.gen)?;
        acc = acc.mul(s.pow(e as i64));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_and_units() {
        for u in EisInt::units() {
            assert!(u.is_unit());
        }
        assert_eq!(EisInt::new(2, 1).norm(), 3);
        let w = EisInt::omega();
        assert_eq!(&(&w * &w) * &w, EisInt::one());
    }

    #[test]
    fn symbol_omega_mod_two() {
        let s = cubic_symbol(&EisInt::omega(), &EisInt::from_int(2)).unwrap();
        assert_eq!(s, CubeRoot::new(1));
    }

    #[test]
    fn symbol_one() {
        assert_eq!(cubic_symbol(&EisInt::one(), &EisInt::new(5, 3)).unwrap(), CubeRoot::ONE);
    }

    #[test]
    fn symbol_errors() {
        assert!(cubic_symbol(&EisInt::from_int(2), &EisInt::from_int(3)).is_err());
        assert!(cubic_symbol(&EisInt::from_int(7), &EisInt::new(3, 1)).is_err());
    }

    #[test]
    fn primary_associate() {
        let p = EisInt::new(3, 1).primary().unwrap();
        assert_eq!(p.norm(), 7);
        assert_eq!(fmod(&p.a, &Integer::from(3)), 2);
        assert_eq!(fmod(&p.b, &Integer::from(3)), 0);
    }

    #[test]
    fn factor_roundtrip() {
        let x = EisInt::new(17, -40);
        let fs = factor_eis(&x);
        let mut prod = EisInt::one();
        for (p, e) in &fs {
            prod = &prod * &p.pow(*e as u64);
        }
        assert_eq!(prod.norm(), x.norm());
        assert!(x.exact_div(&prod).is_unit());
    }

    #[test]
    fn monomial_normalization() {
        let m = SignedMonomial::from_rational(&Rational::from((1, 11))).unwrap();
        assert_eq!(m.factors, vec![(11, -1)]);
        assert_eq!(m.integral(), (Integer::from(121), Integer::from(11)));
        let c = SignedMonomial::from_rational(&Rational::from(-8)).unwrap();
        assert!(c.is_cube());
    }
}
