//! Tate's algorithm for integral Weierstrass models.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{fmod, valuation};

/// y² + a1xy + a3y = x³ + a2x² + a4x + a6 with integral coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weierstrass {
    pub a: [Integer; 5],
}

/// Change of variables x = u²x' + r, y = u³y' + su²x' + t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Urst {
    pub u: Integer,
    pub r: Integer,
    pub s: Integer,
    pub t: Integer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

#[derive(Clone, Debug)]
pub struct LocalData {
    pub p: u64,
    pub conductor_exponent: u32,
    pub kodaira: Kodaira,
    pub tamagawa: u32,
    /// Minimal model at p and the transformations leading to it.
    pub minimal: Weierstrass,
    pub steps: Vec<Urst>,
    /// v_p of the minimal discriminant.
    pub disc_valuation: u32,
    /// 1 split multiplicative, -1 nonsplit, 0 otherwise.
    pub split: i8,
}

impl Weierstrass {
    pub fn new(a1: Integer, a2: Integer, a3: Integer, a4: Integer, a6: Integer) -> Self {
        Weierstrass { a: [a1, a2, a3, a4, a6] }
    }

    pub fn short(a6: Integer) -> Self {
        Weierstrass::new(Integer::new(), Integer::new(), Integer::new(), Integer::new(), a6)
    }

    pub fn b_invariants(&self) -> [Integer; 4] {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = Integer::from(a1 * a1) + Integer::from(a2 * 4u32);
        let b4 = Integer::from(a1 * a3) + Integer::from(a4 * 2u32);
        let b6 = Integer::from(a3 * a3) + Integer::from(a6 * 4u32);
        let b8 = Integer::from(a1 * a1) * a6 + Integer::from(a2 * a6) * 4u32 - Integer::from(a1 * a3) * a4
            + Integer::from(a2 * a3) * a3
            - Integer::from(a4 * a4);
        [b2, b4, b6, b8]
    }

    pub fn c4c6(&self) -> (Integer, Integer) {
        let [b2, b4, b6, _] = self.b_invariants();
        let c4 = Integer::from(&b2 * &b2) - Integer::from(&b4 * 24u32);
        let c6 = -Integer::from(&b2 * &b2) * &b2 + Integer::from(&b2 * &b4) * 36u32 - Integer::from(&b6 * 216u32);
        (c4, c6)
    }

    pub fn discriminant(&self) -> Integer {
        let [b2, b4, b6, b8] = self.b_invariants();
        -Integer::from(&b2 * &b2) * &b8 - Integer::from(&b4 * &b4) * &b4 * 8u32 - Integer::from(&b6 * &b6) * 27u32
            + Integer::from(&b2 * &b4) * &b6 * 9u32
    }

    /// Model after x = x' + r, y = y' + sx' + t.
    pub fn rst(&self, r: &Integer, s: &Integer, t: &Integer) -> Weierstrass {
        let [a1, a2, a3, a4, a6] = &self.a;
        let na1 = a1 + Integer::from(s * 2u32);
        let na2 = (a2 - Integer::from(s * a1)) + Integer::from(r * 3u32) - Integer::from(s * s);
        let na3 = (a3 + Integer::from(r * a1)) + Integer::from(t * 2u32);
        let na4 = (a4 - Integer::from(s * a3)) + Integer::from(r * a2) * 2u32
            - (t + Integer::from(r * s)) * a1
            + Integer::from(r * r) * 3u32
            - Integer::from(s * t) * 2u32;
        let na6 = (a6 + Integer::from(r * a4)) + Integer::from(r * r) * a2 + Integer::from(r * r) * r
            - Integer::from(t * a3)
            - Integer::from(t * t)
            - Integer::from(r * t) * a1;
        Weierstrass::new(na1, na2, na3, na4, na6)
    }

    /// Divide a_i by u^i.
    pub fn scale_down(&self, u: &Integer) -> Weierstrass {
        let mut out = self.a.clone();
        let pw = [1u32, 2, 3, 4, 6];
        for i in 0..5 {
            let d = u.clone().pow(pw[i]);
            assert!(out[i].is_divisible(&d), "non-integral scaling");
            out[i] /= d;
        }
        Weierstrass { a: out }
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        let lhs = Rational::from(y * y) + Rational::from(a1 * x) * y + Rational::from(a3 * y);
        let rhs = Rational::from(x * x) * x + Rational::from(a2 * x) * x + Rational::from(a4 * x) + a6;
        lhs == rhs
    }
}

impl Urst {
    /// Image of an affine point under the inverse substitution.
    pub fn apply(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        let u2 = Rational::from(Integer::from(&self.u * &self.u));
        let u3 = Rational::from(Integer::from(&self.u * &self.u) * &self.u);
        let xp = Rational::from(x - &self.r) / &u2;
        let yp = (Rational::from(y - &self.t) - Rational::from(&self.s * &u2) * &xp) / u3;
        (xp, yp)
    }
}

fn v(x: &Integer, p: u64) -> u32 {
    valuation(x, p)
}

fn pmod(x: &Integer, p: u64) -> Integer {
    fmod(x, &Integer::from(p))
}

fn inv_mod(x: &Integer, m: u64) -> Integer {
    x.clone().invert(&Integer::from(m)).expect("invertible mod p")
}

fn quad_roots(a: &Integer, b: &Integer, c: &Integer, p: u64) -> bool {
    let (a, b, c) = (pmod(a, p), pmod(b, p), pmod(c, p));
    if p == 2 {
        if c == 0 {
            return true;
        }
        return (Integer::from(&a + &b) + &c).is_divisible_u(2);
    }
    let d = pmod(&(Integer::from(&b * &b) - Integer::from(&a * &c) * 4u32), p);
    d == 0 || crate::arith::legendre(d.to_i64().unwrap(), p) == 1
}

fn cubic_root_count(b: &Integer, c: &Integer, d: &Integer, p: u64) -> u32 {
    let mut n = 0;
    for x in 0..p {
        let x = Integer::from(x);
        let val = Integer::from(&x * &x) * &x + Integer::from(&x * &x) * b + Integer::from(&x * c) + d;
        if pmod(&val, p) == 0 {
            n += 1;
        }
    }
    n
}

fn div(x: &Integer, d: &Integer) -> Integer {
    debug_assert!(x.is_divisible(d));
    Integer::from(x / d)
}

/// Tate's algorithm at p.
pub fn local_data(model: &Weierstrass, p: u64) -> LocalData {
    let pi = Integer::from(p);
    let pi2 = Integer::from(p * p);
    let half = if p == 2 { Integer::new() } else { inv_mod(&Integer::from(2), p) };
    let mut c = model.clone();
    let mut steps: Vec<Urst> = Vec::new();
    let push = |steps: &mut Vec<Urst>, u: Integer, r: Integer, s: Integer, t: Integer| {
        steps.push(Urst { u, r, s, t });
    };
    loop {
        let [b2, b4, b6, _] = c.b_invariants();
        let (c4, c6) = c.c4c6();
        let disc = c.discriminant();
        let vd = v(&disc, p);
        let done = |c: &Weierstrass, steps: Vec<Urst>, f: u32, k: Kodaira, cp: u32, split: i8| LocalData {
            p,
            conductor_exponent: f,
            kodaira: k,
            tamagawa: cp,
            minimal: c.clone(),
            steps,
            disc_valuation: vd,
            split,
        };
        if vd == 0 {
            return done(&c, steps, 0, Kodaira::I0, 1, 0);
        }
        let [a1, a2, a3, a4, a6] = c.a.clone();
        let (r, t) = if p == 2 {
            if v(&b2, p) > 0 {
                let r = pmod(&a4, 2);
                let t = pmod(&((&r * (Integer::from(1) + &a2 + &a4)) + &a6), 2);
                (r, t)
            } else {
                let r = pmod(&a3, 2);
                let t = pmod(&(Integer::from(&r + &a4)), 2);
                (r, t)
            }
        } else if p == 3 {
            let r = if v(&b2, p) > 0 { pmod(&-b6.clone(), 3) } else { pmod(&-(Integer::from(&b2 * &b4)), 3) };
            let t = pmod(&(Integer::from(&a1 * &r) + &a3), 3);
            (r, t)
        } else {
            let r = if v(&c4, p) > 0 {
                pmod(&(-(&b2 * inv_mod(&Integer::from(12), p))), p)
            } else {
                let num = -(&c6 + Integer::from(&b2 * &c4));
                pmod(&(num * inv_mod(&Integer::from(&c4 * 12u32), p)), p)
            };
            let t = pmod(&(-(Integer::from(&a1 * &r) + &a3) * &half), p);
            (r, t)
        };
        if r != 0 || t != 0 {
            c = c.rst(&r, &Integer::new(), &t);
            push(&mut steps, Integer::from(1), r, Integer::new(), t);
        }
        let [_, _, b6, b8] = c.b_invariants();
        let [a1, a2, a3, _, a6] = c.a.clone();
        if v(&c4, p) == 0 {
            let split = quad_roots(&Integer::from(1), &a1, &-a2.clone(), p);
            let cp = if split { vd } else if vd.is_multiple_of(2) { 2 } else { 1 };
            return done(&c, steps, 1, Kodaira::In(vd), cp, if split { 1 } else { -1 });
        }
        if v(&a6, p) < 2 {
            return done(&c, steps, vd, Kodaira::II, 1, 0);
        }
        if v(&b8, p) < 3 {
            return done(&c, steps, vd - 1, Kodaira::III, 2, 0);
        }
        if v(&b6, p) < 3 {
            let cp = if quad_roots(&Integer::from(1), &div(&a3, &pi), &-div(&a6, &pi2), p) { 3 } else { 1 };
            return done(&c, steps, vd - 2, Kodaira::IV, cp, 0);
        }
        let (s, t) = if p == 2 {
            (pmod(&a2, 2), Integer::from(2) * pmod(&div(&a6, &Integer::from(4)), 2))
        } else {
            (pmod(&(-Integer::from(&a1 * &half)), p), fmod(&(-Integer::from(&a3 * &half)), &pi2))
        };
        c = c.rst(&Integer::new(), &s, &t);
        push(&mut steps, Integer::from(1), Integer::new(), s, t);
        let [_, a2, _, a4, a6] = c.a.clone();
        let b = div(&a2, &pi);
        let cc = div(&a4, &pi2);
        let d = div(&a6, &Integer::from(&pi2 * &pi));
        let w = Integer::from(&d * &d) * 27u32 - Integer::from(&b * &b) * &cc * &cc + Integer::from(&b * &b) * &b * &d * 4u32
            - Integer::from(&b * &cc) * &d * 18u32
            + Integer::from(&cc * &cc) * &cc * 4u32;
        let x = Integer::from(&cc * 3u32) - Integer::from(&b * &b);
        if v(&w, p) == 0 {
            let cp = 1 + cubic_root_count(&b, &cc, &d, p);
            return done(&c, steps, vd - 4, Kodaira::I0Star, cp, 0);
        }
        if v(&x, p) == 0 {
            let r0 = if p == 2 {
                cc.clone()
            } else if p == 3 {
                Integer::from(&b * &cc)
            } else {
                (Integer::from(&b * &cc) - Integer::from(&d * 9u32)) * inv_mod(&Integer::from(&x * 2u32), p)
            };
            let r = &pi * pmod(&r0, p);
            c = c.rst(&r, &Integer::new(), &Integer::new());
            push(&mut steps, Integer::from(1), r, Integer::new(), Integer::new());
            let (mut ix, mut iy) = (3u32, 3u32);
            let mut mx = pi2.clone();
            let mut my = pi2.clone();
            let cp;
            loop {
                let [_, _, a3, _, a6] = c.a.clone();
                let a3t = div(&a3, &my);
                let a6t = div(&a6, &Integer::from(&mx * &my));
                if v(&(Integer::from(&a3t * &a3t) + Integer::from(&a6t * 4u32)), p) == 0 {
                    cp = if quad_roots(&Integer::from(1), &a3t, &-a6t.clone(), p) { 4 } else { 2 };
                    break;
                }
                let t = if p == 2 {
                    &my * pmod(&a6t, 2)
                } else {
                    &my * pmod(&(-Integer::from(&a3t * &half)), p)
                };
                c = c.rst(&Integer::new(), &Integer::new(), &t);
                push(&mut steps, Integer::from(1), Integer::new(), Integer::new(), t);
                my *= &pi;
                iy += 1;
                let [_, a2, _, a4, a6] = c.a.clone();
                let a2t = div(&a2, &pi);
                let a4t = div(&a4, &Integer::from(&pi * &mx));
                let a6t = div(&a6, &Integer::from(&mx * &my));
                if v(&(Integer::from(&a4t * &a4t) - Integer::from(&a6t * &a2t) * 4u32), p) == 0 {
                    cp = if quad_roots(&a2t, &a4t, &a6t, p) { 4 } else { 2 };
                    break;
                }
                let r = if p == 2 {
                    &mx * pmod(&Integer::from(&a6t * &a2t), 2)
                } else {
                    &mx * pmod(&(-(&a4t * inv_mod(&Integer::from(&a2t * 2u32), p))), p)
                };
                c = c.rst(&r, &Integer::new(), &Integer::new());
                push(&mut steps, Integer::from(1), r, Integer::new(), Integer::new());
                mx *= &pi;
                ix += 1;
            }
            return done(&c, steps, vd - ix - iy + 1, Kodaira::InStar(ix + iy - 5), cp, 0);
        }
        // triple root
        let r0 = if p == 2 {
            b.clone()
        } else if p == 3 {
            -d.clone()
        } else {
            -(&b * inv_mod(&Integer::from(3), p))
        };
        let r = &pi * pmod(&r0, p);
        c = c.rst(&r, &Integer::new(), &Integer::new());
        push(&mut steps, Integer::from(1), r, Integer::new(), Integer::new());
        let [_, _, a3, _, a6] = c.a.clone();
        let x3t = div(&a3, &pi2);
        let x6t = div(&a6, &Integer::from(&pi2 * &pi2));
        if v(&(Integer::from(&x3t * &x3t) + Integer::from(&x6t * 4u32)), p) == 0 {
            let cp = if quad_roots(&Integer::from(1), &x3t, &-x6t.clone(), p) { 3 } else { 1 };
            return done(&c, steps, vd - 6, Kodaira::IVStar, cp, 0);
        }
        let t0 = if p == 2 { x6t.clone() } else { Integer::from(&x3t * &half) };
        let t = -(&pi2 * pmod(&t0, p));
        c = c.rst(&Integer::new(), &Integer::new(), &t);
        push(&mut steps, Integer::from(1), Integer::new(), Integer::new(), t);
        let [_, _, _, a4, a6] = c.a.clone();
        if v(&a4, p) < 4 {
            return done(&c, steps, vd - 7, Kodaira::IIIStar, 2, 0);
        }
        if v(&a6, p) < 6 {
            return done(&c, steps, vd - 8, Kodaira::IIStar, 1, 0);
        }
        c = c.scale_down(&pi);
        push(&mut steps, pi.clone(), Integer::new(), Integer::new(), Integer::new());
    }
}

pub fn conductor(model: &Weierstrass) -> Integer {
    let disc = model.discriminant();
    let mut n = Integer::from(1);
    for (p, _) in crate::arith::factor(&disc) {
        let p = p.to_u64().unwrap();
        let ld = local_data(model, p);
        n *= Integer::from(p).pow(ld.conductor_exponent);
    }
    n
}

trait PowU {
    fn pow(self, e: u32) -> Integer;
}

impl PowU for Integer {
    fn pow(self, e: u32) -> Integer {
        rug::ops::Pow::pow(self, e)
    }
}
