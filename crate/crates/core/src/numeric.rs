//! Multiprecision reals and complexes, AGM, and rational recognition.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exact rationals; rug keeps them canonical (coprime, positive denominator).
pub type BigRat = Rational;

pub const DEFAULT_PREC: u32 = 192;
pub const MIN_PREC: u32 = 64;

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn fl(prec: u32, v: impl Into<f64>) -> Float {
    Float::with_val(prec, v.into())
}

pub fn rat_to_float(prec: u32, r: &Rational) -> Float {
    Float::with_val(prec, r)
}

/// 2^-bits as a Float.
pub fn eps(prec: u32, bits: i32) -> Float {
    Float::with_val(prec, 1) >> bits
}

#[derive(Clone, Debug, PartialEq)]
pub struct MPComplex {
    pub re: Float,
    pub im: Float,
}

impl MPComplex {
    pub fn new(re: Float, im: Float) -> Self {
        MPComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        MPComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        MPComplex::from_real(Float::with_val(prec, 1))
    }

    pub fn i(prec: u32) -> Self {
        MPComplex::new(Float::new(prec), Float::with_val(prec, 1))
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        MPComplex::new(re, Float::new(p))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        MPComplex::new(fl(prec, re), fl(prec, im))
    }

    pub fn from_rat(prec: u32, re: &Rational, im: &Rational) -> Self {
        MPComplex::new(rat_to_float(prec, re), rat_to_float(prec, im))
    }

    /// e^{2πi/3}.
    pub fn omega(prec: u32) -> Self {
        let half = Float::with_val(prec, -0.5);
        let s = Float::with_val(prec, 3).sqrt() / 2u32;
        MPComplex::new(half, s)
    }

    /// e^{iθ}.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        MPComplex::new(c, s)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        MPComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn conj(&self) -> Self {
        MPComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Float) -> Self {
        MPComplex::new(Float::with_val(self.prec(), &self.re * s), Float::with_val(self.prec(), &self.im * s))
    }

    pub fn scale_i(&self, s: i64) -> Self {
        MPComplex::new(self.re.clone() * s, self.im.clone() * s)
    }

    pub fn mul_i(&self) -> Self {
        MPComplex::new(-self.im.clone(), self.re.clone())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        MPComplex::new(Float::with_val(self.prec(), &self.re / &n), -Float::with_val(self.prec(), &self.im / &n))
    }

    pub fn div(&self, o: &MPComplex) -> Self {
        self * &o.recip()
    }

    /// Principal square root: Re ≥ 0, and Im ≥ 0 on the imaginary axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return MPComplex::zero(p);
        }
        let r = self.abs();
        let mut t = (Float::with_val(p, &r + &self.re.clone().abs()) / 2u32).sqrt();
        if self.re >= 0 {
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            MPComplex::new(t, im)
        } else {
            let re = Float::with_val(p, self.im.clone().abs() / &t) / 2u32;
            if self.im < 0 {
                t = -t;
            }
            MPComplex::new(re, t)
        }
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        let c = MPComplex::cis(&self.im);
        c.scale(&m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        MPComplex::new(self.abs().ln(), self.arg())
    }

    pub fn powi(&self, mut e: i64) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        e = e.abs();
        let mut acc = MPComplex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Approximate f64 pair, for logging.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a MPComplex> for &'a MPComplex {
    type Output = MPComplex;
    fn add(self, o: &MPComplex) -> MPComplex {
        let p = self.prec();
        MPComplex::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }
}

impl<'a> Sub<&'a MPComplex> for &'a MPComplex {
    type Output = MPComplex;
    fn sub(self, o: &MPComplex) -> MPComplex {
        let p = self.prec();
        MPComplex::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }
}

impl<'a> Mul<&'a MPComplex> for &'a MPComplex {
    type Output = MPComplex;
    fn mul(self, o: &MPComplex) -> MPComplex {
        let p = self.prec();
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        MPComplex::new(ac - bd, ad + bc)
    }
}

impl Neg for &MPComplex {
    type Output = MPComplex;
    fn neg(self) -> MPComplex {
        MPComplex::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<MPComplex> for MPComplex {
            type Output = MPComplex;
            fn $m(self, o: MPComplex) -> MPComplex { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a MPComplex> for MPComplex {
            type Output = MPComplex;
            fn $m(self, o: &MPComplex) -> MPComplex { (&self).$m(o) }
        }
        impl<'a> $tr<MPComplex> for &'a MPComplex {
            type Output = MPComplex;
            fn $m(self, o: MPComplex) -> MPComplex { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for MPComplex {
    type Output = MPComplex;
    fn neg(self) -> MPComplex {
        -&self
    }
}

/// Arithmetic-geometric mean with the principal square-root branch.
pub fn agm(a: &MPComplex, b: &MPComplex) -> Result<MPComplex> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Numeric("agm of zero argument".into()));
    }
    let p = a.prec();
    let tol = eps(p, p as i32 - 4);
    let mut x = a.clone();
    let mut y = b.clone();
    for _ in 0..(10 * p as usize) {
        let d = (&x - &y).abs();
        if d <= Float::with_val(p, &tol * x.abs()) {
            return Ok(x);
        }
        let m = (&x + &y).scale(&fl(p, 0.5));
        let g = (&x * &y).sqrt();
        x = m;
        y = g;
    }
    Err(Error::Numeric("agm did not converge".into()))
}

pub fn agm_real(a: &Float, b: &Float) -> Result<Float> {
    Ok(agm(&MPComplex::from_real(a.clone()), &MPComplex::from_real(b.clone()))?.re)
}

/// Best rational approximation with max(|p|, q) ≤ bound, accepted only when
/// |x - p/q| < 2^(-prec/2) and no larger admissible convergent also fits.
pub fn recognize_rational(x: &MPComplex, height_bound: &Integer) -> Option<Rational> {
    let p = x.prec();
    let tol = eps(p, (p / 2) as i32);
    let scale = Float::with_val(p, x.re.clone().abs().max(&fl(p, 1.0)));
    if x.im.clone().abs() > Float::with_val(p, &tol * &scale) {
        return None;
    }
    let conv = convergents(&x.re, height_bound, 2 * p as usize);
    let fits = |r: &Rational| {
        let d = Float::with_val(p, &x.re - r).abs();
        d < Float::with_val(p, &tol * &scale)
    };
    let mut found: Option<Rational> = None;
    for c in conv {
        if fits(&c) {
            match &found {
                None => found = Some(c),
                Some(f) if *f != c => return None,
                _ => {}
            }
        }
    }
    found
}

/// Continued-fraction convergents of x with max(|num|, den) ≤ bound.
pub fn convergents(x: &Float, bound: &Integer, max_terms: usize) -> Vec<Rational> {
    let p = x.prec();
    let mut out = Vec::new();
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut t = x.clone();
    let tiny = eps(p, p as i32 - 8);
    for _ in 0..max_terms {
        let a = match t.clone().floor().to_integer() {
            Some(a) => a,
            None => break,
        };
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if h2.clone().abs() > *bound || k2 > *bound {
            break;
        }
        out.push(Rational::from((h2.clone(), k2.clone())));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = Float::with_val(p, &t - &a);
        if frac.clone().abs() < tiny {
            break;
        }
        t = frac.recip();
    }
    out
}

/// Float with `x` digits of (2^bits)-relative scale, for residual checks.
pub fn rel_err(a: &Float, b: &Float) -> Float {
    let p = a.prec().max(b.prec());
    let d = Float::with_val(p, a - b).abs();
    let s = a.clone().abs().max(&b.clone().abs());
    if s.is_zero() {
        d
    } else {
        d / s
    }
}

pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        x.clone().abs().log2().to_f64()
    }
}

pub fn int_pow(base: &Integer, e: u32) -> Integer {
    base.clone().pow(e)
}
