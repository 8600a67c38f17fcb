//! L(s, E) at s = 1 for y² = x³ + k: value, derivative and root number.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use crate::arith::{factor, primes_up_to};
use crate::cache::ApCache;
use crate::ellcurve::tate::{conductor, local_data};
use crate::ellcurve::{ap_cm, ap_count_general, CurveK};
use crate::error::{Error, Result};
use crate::numeric::{eps, pi};

/// Residual below which a sign is accepted, and above which the other one must lie.
pub const SIGN_ACCEPT: f64 = 1e-10;
pub const SIGN_REJECT: f64 = 1e-2;

const THETA_POINTS: [f64; 2] = [1.2, 1.45];

#[derive(Clone, Debug)]
pub struct LOptions {
    pub prec: u32,
    pub cutoff_factor: f64,
    pub cache: Option<ApCache>,
}

impl Default for LOptions {
    fn default() -> Self {
        LOptions { prec: crate::numeric::DEFAULT_PREC, cutoff_factor: 1.0, cache: None }
    }
}

#[derive(Clone, Debug)]
pub struct LSeries {
    pub tag: String,
    pub conductor: u64,
    pub sign: i32,
    /// Residuals of the theta relation for the chosen and rejected sign.
    pub residuals: (f64, f64),
    /// a_n for 0 ≤ n ≤ cutoff; a_0 unused.
    coeffs: Vec<i64>,
    prec: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct LValues {
    pub tag: String,
    pub conductor: u64,
    pub sign: i32,
    pub value: String,
    pub derivative: String,
    pub cutoff: usize,
    pub stability: f64,
}

/// Local data of the L-function at one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalFactor {
    Good(i64),
    Multiplicative(i64),
    Additive,
}

/// Local factors at the primes dividing the discriminant of the integral model.
pub fn bad_factors(curve: &CurveK) -> BTreeMap<u64, LocalFactor> {
    let w = curve.weierstrass();
    factor(&w.discriminant())
        .into_iter()
        .map(|(p, _)| {
            let p = p.to_u64().unwrap();
            let ld = local_data(&w, p);
            let f = match ld.conductor_exponent {
                0 => LocalFactor::Good(ap_count_general(&ld.minimal, p)),
                1 => LocalFactor::Multiplicative(ld.split as i64),
                _ => LocalFactor::Additive,
            };
            (p, f)
        })
        .collect()
}

/// a_p for all p ≤ bound, with bad primes resolved by Tate's algorithm.
pub fn local_factors(curve: &CurveK, bound: u64) -> BTreeMap<u64, LocalFactor> {
    load_or_compute(curve, bound, None)
}

/// a_n for n ≤ m from local factors by multiplicativity.
pub fn coefficients(factors: &BTreeMap<u64, LocalFactor>, m: usize) -> Vec<i64> {
    let mut spf = vec![0u32; m + 1];
    for i in 2..=m {
        if spf[i] == 0 {
            let mut j = i;
            while j <= m {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut a = vec![0i64; m + 1];
    if m >= 1 {
        a[1] = 1;
    }
    for n in 2..=m {
        let p = spf[n] as usize;
        let mut q = n;
        let mut r = 0u32;
        while q % p == 0 {
            q /= p;
            r += 1;
        }
        if q > 1 {
            a[n] = a[n / q] * a[q];
            continue;
        }
        let f = factors[&(p as u64)];
        a[n] = match f {
            LocalFactor::Good(ap) => {
                if r == 1 {
                    ap
                } else {
                    let prev = n / p;
                    ap * a[prev] - (p as i64) * a[prev / p]
                }
            }
            LocalFactor::Multiplicative(ap) => ap.pow(r),
            LocalFactor::Additive => 0,
        };
    }
    a
}

/// Exponential integral E₁(x) for x > 0: power series up to 1, continued fraction beyond.
pub fn e1(x: &Float) -> Float {
    let p = x.prec();
    let wp = p + 32;
    let x = Float::with_val(wp, x);
    let tol = eps(wp, wp as i32);
    let out = if x <= 1 {
        let euler = Float::with_val(wp, rug::float::Constant::Euler);
        let mut sum = Float::new(wp);
        let mut term = Float::with_val(wp, 1);
        let mut k = 1u32;
        loop {
            term *= &x;
            term /= k;
            let t = Float::with_val(wp, &term / k);
            if k % 2 == 1 {
                sum += &t;
            } else {
                sum -= &t;
            }
            if t.clone().abs() < tol {
                break;
            }
            k += 1;
        }
        -euler - x.clone().ln() + sum
    } else {
        // Modified Lentz on e^{-x}/(x + 1 - 1²/(x + 3 - 2²/(x + 5 - ...))).
        let tiny = eps(wp, 4 * wp as i32);
        let mut b = Float::with_val(wp, &x + 1u32);
        let mut c = Float::with_val(wp, 1) / &tiny;
        let mut d = Float::with_val(wp, 1) / &b;
        let mut h = d.clone();
        for i in 1..1_000_000u32 {
            let an = -Float::with_val(wp, i) * i;
            b += 2u32;
            d = Float::with_val(wp, &an * &d) + &b;
            if d.clone().abs() < tiny {
                d = tiny.clone();
            }
            c = Float::with_val(wp, &an / &c) + &b;
            if c.clone().abs() < tiny {
                c = tiny.clone();
            }
            d = Float::with_val(wp, 1) / d;
            let del = Float::with_val(wp, &c * &d);
            h *= &del;
            if Float::with_val(wp, del - 1u32).abs() < tol {
                break;
            }
        }
        h * (-x).exp()
    };
    Float::with_val(p, out)
}

fn needed_terms(prec: u32, conductor: u64, stretch: f64) -> usize {
    let sq = (conductor as f64).sqrt();
    ((prec as f64 + 24.0) * std::f64::consts::LN_2 * sq * stretch / (2.0 * std::f64::consts::PI)).ceil() as usize + 8
}

fn theta(coeffs: &[i64], conductor: u64, t: &Float) -> Float {
    let p = t.prec();
    let sq = Float::with_val(p, conductor).sqrt();
    let q = Float::with_val(p, -(pi(p) * 2u32) * t / sq).exp();
    let mut qn = q.clone();
    let mut s = Float::new(p);
    for &a in coeffs.iter().skip(1) {
        if a != 0 {
            s += Float::with_val(p, &qn * a);
        }
        qn *= &q;
    }
    s
}

/// |F(1/t) - ε t² F(t)| / |F(t)| maximised over the test points, for ε = +1 and -1.
pub fn theta_residuals(coeffs: &[i64], conductor: u64, prec: u32) -> (f64, f64) {
    let mut worst = (0f64, 0f64);
    for &tv in THETA_POINTS.iter() {
        let t = Float::with_val(prec, tv);
        let ft = theta(coeffs, conductor, &t);
        let fi = theta(coeffs, conductor, &(Float::with_val(prec, 1) / &t));
        let t2f = Float::with_val(prec, &t * &t) * &ft;
        let den = ft.clone().abs().max(&Float::with_val(prec, 1e-300));
        let rp = (Float::with_val(prec, &fi - &t2f).abs() / &den).to_f64();
        let rm = (Float::with_val(prec, &fi + &t2f).abs() / &den).to_f64();
        worst.0 = worst.0.max(rp);
        worst.1 = worst.1.max(rm);
    }
    worst
}

fn divisors_in(base: u64, e2: u32, e3: u32) -> Vec<u64> {
    let mut out = Vec::new();
    for a in 0..=e2 {
        for b in 0..=e3 {
            out.push(base * 2u64.pow(a) * 3u64.pow(b));
        }
    }
    out
}

impl LSeries {
    pub fn new(curve: &CurveK, opts: &LOptions) -> Result<Self> {
        let tag = curve.tag();
        let w = curve.weierstrass();
        let tate_n = conductor(&w).to_u64().ok_or_else(|| Error::Domain("conductor too large".into()))?;
        let prec = opts.prec;
        let factor = opts.cutoff_factor.max(1.0);
        let build = |n: u64| -> Result<Vec<i64>> {
            let m = (needed_terms(prec, n, THETA_POINTS[1]) as f64 * factor) as usize;
            let facs = load_or_compute(curve, m as u64, opts.cache.as_ref());
            Ok(coefficients(&facs, m))
        };
        let mut coeffs = build(tate_n)?;
        let (rp, rm) = theta_residuals(&coeffs, tate_n, prec);
        let mut chosen = pick_sign(rp, rm).map(|(s, r)| (tate_n, s, r));
        if chosen.is_none() {
            // Search divisors of 2⁸·3⁵·(odd part) agreeing with Tate away from 6.
            let mut odd = tate_n;
            while odd % 2 == 0 {
                odd /= 2;
            }
            while odd % 3 == 0 {
                odd /= 3;
            }
            for n in divisors_in(odd, 8, 5) {
                if n == tate_n {
                    continue;
                }
                let c = build(n)?;
                let (rp, rm) = theta_residuals(&c, n, prec);
                if let Some((s, r)) = pick_sign(rp, rm) {
                    log::warn!("{}: conductor {} from Tate rejected, {} fits", tag, tate_n, n);
                    chosen = Some((n, s, r));
                    coeffs = c;
                    break;
                }
            }
        }
        let (n, sign, residuals) = chosen.ok_or_else(|| {
            Error::Numeric(format!("{}: no conductor candidate satisfies the functional equation ({:.2e}, {:.2e})", tag, rp, rm))
        })?;
        Ok(LSeries { tag, conductor: n, sign, residuals, coeffs, prec })
    }

    /// Series with given coefficients; the sign comes from the theta relation.
    pub fn from_coefficients(tag: &str, conductor: u64, coeffs: Vec<i64>, prec: u32) -> Result<Self> {
        let (rp, rm) = theta_residuals(&coeffs, conductor, prec);
        let (sign, residuals) = pick_sign(rp, rm)
            .ok_or_else(|| Error::Numeric(format!("{}: functional equation fails ({:.2e}, {:.2e})", tag, rp, rm)))?;
        Ok(LSeries { tag: tag.to_string(), conductor, sign, residuals, coeffs, prec })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    /// Number of terms needed at s = 1 for the working precision.
    pub fn cutoff(&self) -> usize {
        needed_terms(self.prec, self.conductor, 1.0).min(self.coeffs.len() - 1)
    }

    /// (L(1), L'(1)) truncated at m terms; L(1) = 0 exactly when ε = -1 and L'(1) = 0 when ε = +1.
    pub fn value_and_derivative_at(&self, m: usize) -> Result<(Float, Float)> {
        let p = self.prec;
        if m >= self.coeffs.len() {
            return Err(Error::Precision(format!("{} terms requested, {} available", m, self.coeffs.len() - 1)));
        }
        let sq = Float::with_val(p, self.conductor).sqrt();
        let step = Float::with_val(p, pi(p) * 2u32) / &sq;
        let last = Float::with_val(p, -Float::with_val(p, &step * m as u32)).exp();
        if last > eps(p, p as i32 - 8) {
            return Err(Error::Precision(format!("cutoff {} too small: tail ~ {:.3e}", m, last.to_f64())));
        }
        if self.sign == 1 {
            let q = Float::with_val(p, -&step).exp();
            let mut qn = q.clone();
            let mut s = Float::new(p);
            for n in 1..=m {
                let a = self.coeffs[n];
                if a != 0 {
                    s += Float::with_val(p, &qn * a) / n as u32;
                }
                qn *= &q;
            }
            Ok((s * 2u32, Float::new(p)))
        } else {
            let terms: Vec<Float> = (1..=m)
                .into_par_iter()
                .filter(|&n| self.coeffs[n] != 0)
                .map(|n| {
                    let x = Float::with_val(p, &step * n as u32);
                    e1(&x) * self.coeffs[n] / n as u32
                })
                .collect();
            let mut s = Float::new(p);
            for t in terms {
                s += t;
            }
            Ok((Float::new(p), s * 2u32))
        }
    }

    pub fn value_and_derivative(&self) -> Result<(Float, Float)> {
        self.value_and_derivative_at(self.cutoff())
    }

    /// Values at cutoffs M and 2M (coefficients extended as needed) and their difference.
    pub fn two_cutoff(&self, curve: &CurveK) -> Result<((Float, Float), (Float, Float), f64)> {
        let m = self.cutoff();
        let lo = self.value_and_derivative_at(m)?;
        let wide = if 2 * m < self.coeffs.len() {
            self.clone()
        } else {
            let facs = local_factors(curve, 2 * m as u64);
            LSeries { coeffs: coefficients(&facs, 2 * m), ..self.clone() }
        };
        let hi = wide.value_and_derivative_at(2 * m)?;
        let d = Float::with_val(self.prec, &lo.0 - &hi.0).abs().max(&Float::with_val(self.prec, &lo.1 - &hi.1).abs());
        Ok((lo, hi, d.to_f64()))
    }

    pub fn report(&self, curve: &CurveK) -> Result<LValues> {
        let (lo, _, stab) = self.two_cutoff(curve)?;
        Ok(LValues {
            tag: self.tag.clone(),
            conductor: self.conductor,
            sign: self.sign,
            value: lo.0.to_string_radix(10, Some(40)),
            derivative: lo.1.to_string_radix(10, Some(40)),
            cutoff: self.cutoff(),
            stability: stab,
        })
    }
}

fn pick_sign(rp: f64, rm: f64) -> Option<(i32, (f64, f64))> {
    if rp < SIGN_ACCEPT && rm > SIGN_REJECT {
        Some((1, (rp, rm)))
    } else if rm < SIGN_ACCEPT && rp > SIGN_REJECT {
        Some((-1, (rm, rp)))
    } else {
        None
    }
}

fn load_or_compute(curve: &CurveK, bound: u64, cache: Option<&ApCache>) -> BTreeMap<u64, LocalFactor> {
    let tag = curve.tag();
    let bad = bad_factors(curve);
    let (model, _) = curve.integral_model();
    let k = model.k().numer().clone();
    let stored = cache.and_then(|c| c.load(&tag)).map(|r| r.records).unwrap_or_default();
    let primes = primes_up_to(bound);
    let computed: Vec<(u64, i64)> = primes
        .par_iter()
        .filter(|p| !bad.contains_key(p) && !stored.contains_key(p))
        .map(|&p| (p, if p % 3 == 2 { 0 } else { ap_cm(&k, p) }))
        .collect();
    let mut good = stored;
    let fresh = !computed.is_empty();
    good.extend(computed);
    if let (Some(c), true) = (cache, fresh) {
        if let Err(e) = c.store(&tag, &good) {
            log::warn!("could not write a_p cache: {}", e);
        }
    }
    primes
        .into_iter()
        .map(|p| (p, bad.get(&p).copied().unwrap_or_else(|| LocalFactor::Good(good[&p]))))
        .collect()
}

/// Integer helper for callers holding rug values.
pub fn conductor_of(curve: &CurveK) -> Integer {
    conductor(&curve.weierstrass())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_values() {
        // E₁(1) = 0.21938393439552027368...; E₁(2) = 0.04890051070806111957...
        let a = e1(&Float::with_val(128, 1)).to_f64();
        let b = e1(&Float::with_val(128, 2)).to_f64();
        assert!((a - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((b - 0.048_900_510_708_061_12).abs() < 1e-15);
        let c = e1(&Float::with_val(128, 0.5)).to_f64();
        assert!((c - 0.559_773_594_776_160_8).abs() < 1e-15);
    }

    #[test]
    fn coefficients_k1() {
        let c = CurveK::new(1).unwrap();
        let f = local_factors(&c, 100);
        let a = coefficients(&f, 100);
        assert_eq!(a[7], -4);
        assert_eq!(a[49], 16 - 7);
        assert_eq!(a[2], 0);
        assert_eq!(a[3], 0);
        // eta(6τ)^4 has support on n ≡ 1 mod 6.
        for (n, v) in a.iter().enumerate().skip(1) {
            if n % 6 != 1 {
                assert_eq!(*v, 0, "a_{}", n);
            }
        }
    }

    #[test]
    fn sign_k1_plus() {
        let c = CurveK::new(1).unwrap();
        let ls = LSeries::new(&c, &LOptions { prec: 96, ..Default::default() }).unwrap();
        assert_eq!(ls.conductor, 36);
        assert_eq!(ls.sign, 1);
        let (l1, _) = ls.value_and_derivative().unwrap();
        assert!(l1 > 0);
    }
}
