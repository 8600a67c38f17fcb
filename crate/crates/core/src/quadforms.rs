//! Positive definite binary quadratic forms of discriminant -3c²,
//! Gauss composition, and Pic(O_c).

use rug::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::{fdiv, fmod, xgcd};
use crate::eisenstein::{cube_roots_of_unity_mod, prime_above, EisIdeal, EisInt};
use crate::error::{Error, Result};

/// a x² + b xy + c y².
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    #[serde(with = "int_str")]
    pub a: Integer,
    #[serde(with = "int_str")]
    pub b: Integer,
    #[serde(with = "int_str")]
    pub c: Integer,
}

pub(crate) mod int_str {
    use rug::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Integer>().map_err(serde::de::Error::custom)
    }
}

/// 2×2 integer matrix [[p, q], [r, s]].
pub type Mat2 = [[Integer; 2]; 2];

impl QuadForm {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Self {
        QuadForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn disc(&self) -> Integer {
        Integer::from(&self.b * &self.b) - Integer::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        Integer::from(&self.a * x) * x + Integer::from(&self.b * x) * y + Integer::from(&self.c * y) * y
    }

    pub fn is_primitive(&self) -> bool {
        self.a.clone().gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let ab = self.b.clone().abs();
        if ab > self.a || self.a > self.c {
            return false;
        }
        if (ab == self.a || self.a == self.c) && self.b < 0 {
            return false;
        }
        true
    }

    /// Substitution f(px + qy, rx + sy).
    pub fn transform(&self, m: &Mat2) -> QuadForm {
        let [[p, q], [r, s]] = m;
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = self.eval(&Integer::from(p + q), &Integer::from(r + s)) - &a - &c;
        QuadForm { a, b, c }
    }

    /// Reduction; also returns U ∈ SL₂(Z) with self∘U = reduced.
    pub fn reduce_with_matrix(&self) -> (QuadForm, Mat2) {
        let mut f = self.clone();
        let mut u: Mat2 = [[Integer::from(1), Integer::new()], [Integer::new(), Integer::from(1)]];
        loop {
            // translate b into (-a, a]
            let two_a = Integer::from(&f.a * 2);
            let k = fdiv(&(Integer::from(&f.a - &f.b)), &two_a);
            if k != 0 {
                let t: Mat2 = [[Integer::from(1), k.clone()], [Integer::new(), Integer::from(1)]];
                f = f.transform(&t);
                u = mat_mul(&u, &t);
            }
            if f.a > f.c || (f.a == f.c && f.b < 0) {
                let s: Mat2 = [[Integer::new(), Integer::from(-1)], [Integer::from(1), Integer::new()]];
                f = f.transform(&s);
                u = mat_mul(&u, &s);
                continue;
            }
            break;
        }
        (f, u)
    }

    pub fn reduce(&self) -> QuadForm {
        self.reduce_with_matrix().0
    }

    pub fn inverse(&self) -> QuadForm {
        QuadForm::new(self.a.clone(), -self.b.clone(), self.c.clone()).reduce()
    }

    pub fn principal(disc: &Integer) -> QuadForm {
        let b = if disc.is_odd() { Integer::from(1) } else { Integer::new() };
        let c = (Integer::from(&b * &b) - disc) / 4u32;
        QuadForm::new(1, b, c)
    }

    /// Equivalent form whose first coefficient is coprime to m, with the
    /// transforming matrix.
    pub fn coprime_representative(&self, m: &Integer) -> Result<(QuadForm, Mat2)> {
        let mut bound = 50i64;
        while bound <= 800 {
            let mut best: Option<(Integer, Integer, Integer)> = None;
            for x in -bound..=bound {
                for y in 0..=bound {
                    let (xi, yi) = (Integer::from(x), Integer::from(y));
                    if xi.clone().gcd(&yi) != 1 {
                        continue;
                    }
                    let v = self.eval(&xi, &yi);
                    if v.clone().gcd(m) != 1 {
                        continue;
                    }
                    if best.as_ref().is_none_or(|b| v < b.0) {
                        best = Some((v, xi, yi));
                    }
                }
            }
            if let Some((_, x, y)) = best {
                let (_, s, r) = xgcd(&x, &y);
                // x·s + y·r = 1, column (x, y) completed by (-r, s).
                let mat: Mat2 = [[x, -r], [y, s]];
                let g = self.transform(&mat);
                return Ok((g, mat));
            }
            bound *= 2;
        }
        Err(Error::Domain(format!("no value of {} coprime to {} in search range", self, m)))
    }

    /// The O-ideal Za + Z(-b + √Δ)/2 generates 𝔞·O_K; returns a generator
    /// of that O_K-ideal. Requires a coprime to the conductor.
    pub fn to_eis_ideal(&self) -> Result<EisIdeal> {
        let disc = self.disc();
        let c2 = Integer::from(-&disc) / 3u32;
        let cond = c2.clone().sqrt();
        if Integer::from(&cond * &cond) != c2 || !Integer::from(-&disc).is_divisible_u(3) {
            return Err(Error::Domain(format!("discriminant {} is not -3c²", disc)));
        }
        if self.a.clone().gcd(&Integer::from(&cond * 3)) != 1 {
            return Err(Error::Domain(format!("leading coefficient of {} not coprime to 3c", self)));
        }
        // (-b + c√-3)/2 = (-b + c)/2 + cω  (√-3 = 1 + 2ω)
        let mut gen = EisInt::one();
        for (l, e) in crate::arith::factor(&self.a) {
            if fmod(&l, &Integer::from(3)) != 1 {
                return Err(Error::Domain(format!("{} has inert prime {} in its norm", self, l)));
            }
            let (r1, r2) = cube_roots_of_unity_mod(&l)?;
            let target = |r: &Integer| {
                let v = Integer::from(&cond - &self.b) / 2u32 + Integer::from(&cond * r);
                fmod(&v, &l) == 0
            };
            let r = if target(&r1) {
                r1
            } else if target(&r2) {
                r2
            } else {
                return Err(Error::Domain(format!("no prime of {} divides the ideal", l)));
            };
            gen = &gen * &prime_above(&l, &r).pow(e as u64);
        }
        Ok(EisIdeal::new(gen))
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| Integer::from(&x[i][0] * &y[0][j]) + Integer::from(&x[i][1] * &y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Gauss composition followed by reduction.
pub fn compose(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm> {
    if f1.disc() != f2.disc() {
        return Err(Error::Domain(format!("discriminants differ: {} vs {}", f1, f2)));
    }
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let (a1, b1) = (&f1.a, &f1.b);
    let (a2, b2, c2) = (&f2.a, &f2.b, &f2.c);
    let s = Integer::from(b1 + b2) / 2u32;
    let n = Integer::from(b2 - &s);
    let (d, y1) = if a2.is_divisible(a1) {
        (a1.clone(), Integer::new())
    } else {
        let (d, u, _v) = xgcd(a2, a1);
        (d, u)
    };
    let (d1, x2, y2) = if s.is_divisible(&d) {
        (d.clone(), Integer::new(), Integer::from(-1))
    } else {
        let (d1, u, v) = xgcd(&s, &d);
        (d1, u, -v)
    };
    let v1 = Integer::from(a1 / &d1);
    let v2 = Integer::from(a2 / &d1);
    let r = fmod(&(Integer::from(&y1 * &y2) * &n - Integer::from(&x2 * c2)), &v1);
    let b3 = b2 + Integer::from(&v2 * &r) * 2u32;
    let a3 = Integer::from(&v1 * &v2);
    let c3 = (Integer::from(c2 * &d1) + (&r * (b2 + Integer::from(&v2 * &r)))) / &v1;
    let f = QuadForm { a: a3, b: b3, c: c3 };
    debug_assert_eq!(f.disc(), f1.disc());
    Ok(f.reduce())
}

pub fn pow(f: &QuadForm, mut e: u64) -> Result<QuadForm> {
    let mut acc = QuadForm::principal(&f.disc());
    let mut base = f.reduce();
    while e > 0 {
        if e & 1 == 1 {
            acc = compose(&acc, &base)?;
        }
        base = compose(&base, &base)?;
        e >>= 1;
    }
    Ok(acc)
}

/// Pic(O) for discriminant Δ, principal form first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicGroup {
    #[serde(with = "int_str")]
    pub disc: Integer,
    pub forms: Vec<QuadForm>,
}

impl PicGroup {
    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> &QuadForm {
        &self.forms[0]
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        let r = f.reduce();
        self.forms.iter().position(|g| *g == r)
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        let f = compose(&self.forms[i], &self.forms[j]).expect("same discriminant");
        self.index_of(&f).expect("closed under composition")
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index_of(&self.forms[i].inverse()).expect("closed under inversion")
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut cur = i;
        while cur != 0 {
            cur = self.compose(cur, i);
            k += 1;
        }
        k
    }
}

/// All reduced primitive forms of discriminant Δ < 0.
pub fn enumerate_classes(disc: &Integer) -> Result<PicGroup> {
    if *disc >= 0 {
        return Err(Error::Domain(format!("discriminant {} is not negative", disc)));
    }
    let m4 = fmod(disc, &Integer::from(4));
    if m4 != 0 && m4 != 1 {
        return Err(Error::Domain(format!("{} is not a discriminant", disc)));
    }
    let d = Integer::from(-disc);
    let amax = (Integer::from(&d / 3u32)).sqrt() + 1u32;
    let mut forms = Vec::new();
    let mut a = Integer::from(1);
    while a <= amax {
        let mut b = Integer::from(-&a) + 1u32;
        while b <= a {
            let num = Integer::from(&b * &b) - disc;
            let den = Integer::from(&a * 4u32);
            if num.is_divisible(&den) {
                let c = num / den;
                let f = QuadForm { a: a.clone(), b: b.clone(), c };
                if f.is_reduced() && f.is_primitive() {
                    forms.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    forms.sort();
    Ok(PicGroup { disc: disc.clone(), forms })
}

/// h(O_c) for orders of Q(√-3) by the analytic class-number formula.
pub fn class_number_formula(c: u64) -> u64 {
    if c == 1 {
        return 1;
    }
    let mut num = c as i64;
    let mut den = 1i64;
    for (p, _) in crate::arith::factor_u64(c) {
        let chi = if p == 3 { 0 } else if p % 3 == 1 { 1 } else { -1 };
        num *= p as i64 - chi;
        den *= p as i64;
    }
    (num / den / 3) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_class_groups() {
        assert_eq!(enumerate_classes(&Integer::from(-3)).unwrap().order(), 1);
        assert_eq!(enumerate_classes(&Integer::from(-108)).unwrap().order(), 3);
        assert_eq!(enumerate_classes(&Integer::from(-2700)).unwrap().order(), 18);
        assert!(enumerate_classes(&Integer::from(5)).is_err());
    }

    #[test]
    fn formula_matches() {
        for c in [6u64, 30, 66, 138] {
            let g = enumerate_classes(&Integer::from(-3 * (c * c) as i64)).unwrap();
            assert_eq!(g.order() as u64, class_number_formula(c), "c = {}", c);
        }
    }

    #[test]
    fn identity_and_inverse() {
        let g = enumerate_classes(&Integer::from(-2700)).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.compose(0, i), i);
            assert_eq!(g.compose(i, g.inverse(i)), 0);
        }
    }

    #[test]
    fn reduction_matrix() {
        let f = QuadForm::new(108, -270, 175);
        let (r, u) = f.reduce_with_matrix();
        assert_eq!(f.transform(&u), r);
        assert!(r.is_reduced());
    }
}
