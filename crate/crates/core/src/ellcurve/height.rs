//! Néron–Tate canonical height as a sum of local heights.

use rug::{Float, Integer, Rational};

use super::tate::{local_data, LocalData, Weierstrass};
use super::{CurveK, PeriodLattice, RatPoint};
use crate::arith::{factor, valuation_rat};
use crate::error::{Error, Result};
use crate::numeric::{pi, MPComplex};

/// log max(|num|, den) of the x-coordinate.
pub fn naive_height(p: &RatPoint, prec: u32) -> Float {
    match p {
        RatPoint::Infinity => Float::new(prec),
        RatPoint::Affine { x, .. } => {
            let m = x.numer().clone().abs().max(x.denom().clone());
            Float::with_val(prec, &m).ln()
        }
    }
}

fn bernoulli2(t: &Float) -> Float {
    let p = t.prec();
    Float::with_val(p, t * t) - t + Float::with_val(p, 1) / 6u32
}

/// Archimedean local height (Silverman normalization) at z ∉ Λ.
pub fn lambda_infinity(lat: &PeriodLattice, z: &MPComplex) -> Result<Float> {
    let p = lat.prec();
    let (s, t) = lat.coords(z);
    let s = Float::with_val(p, &s - s.clone().floor());
    let t = Float::with_val(p, &t - t.clone().floor());
    let x = &MPComplex::from_real(s) + &lat.tau.scale(&t);
    let twopi_i = MPComplex::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
    let q = (&twopi_i * &lat.tau).exp();
    let u = (&twopi_i * &x).exp();
    let one = MPComplex::one(p);
    let d0 = (&one - &u).abs();
    if d0.is_zero() {
        return Err(Error::Numeric("local height at the origin".into()));
    }
    let log_q = q.abs().ln();
    let mut lam = -Float::with_val(p, bernoulli2(&t) * &log_q) / 2u32 - d0.ln();
    let uinv = u.recip();
    let mut qn = q.clone();
    let tol = crate::numeric::eps(p, p as i32 + 8);
    for _ in 0..100_000 {
        let a = (&one - &(&qn * &u)).abs();
        let b = (&one - &(&qn * &uinv)).abs();
        lam -= Float::with_val(p, a * b).ln();
        if Float::with_val(p, qn.abs() * uinv.abs().max(&u.abs())) < tol {
            break;
        }
        qn = &qn * &q;
    }
    Ok(lam)
}

fn nonsingular_at(model: &Weierstrass, x: &Rational, y: &Rational, p: u64) -> bool {
    if valuation_rat(x, p) < 0 {
        return true;
    }
    let [a1, a2, a3, a4, _] = &model.a;
    let fx = Rational::from(a1 * y) - Rational::from(x * x) * 3u32 - Rational::from(a2 * x) * 2u32 - Rational::from(a4.clone());
    let fy = Rational::from(y * 2u32) + Rational::from(a1 * x) + Rational::from(a3.clone());
    let vx = if fx == 0 { i64::MAX } else { valuation_rat(&fx, p) };
    let vy = if fy == 0 { i64::MAX } else { valuation_rat(&fy, p) };
    vx == 0 || vy == 0
}

fn to_minimal(ld: &LocalData, x: &Rational, y: &Rational) -> (Rational, Rational) {
    let (mut x, mut y) = (x.clone(), y.clone());
    for st in &ld.steps {
        let r = st.apply(&x, &y);
        x = r.0;
        y = r.1;
    }
    (x, y)
}

/// Canonical height in the normalization ĥ(P) = lim h(x(nP))/n²; the
/// Silverman normalization is half of this.
pub fn canonical_height(curve: &CurveK, pt: &RatPoint, prec: u32) -> Result<Float> {
    let (model, u) = curve.integral_model();
    let p0 = CurveK::map_scaled(pt, &u);
    if model.torsion_order(&p0).is_some() {
        return Ok(Float::new(prec));
    }
    let w = model.weierstrass();
    let disc = w.discriminant();
    let bad: Vec<LocalData> = factor(&disc).into_iter().map(|(p, _)| local_data(&w, p.to_u64().unwrap())).collect();
    let mut chosen = None;
    for m in [1i64, 2, 3, 4, 6, 12] {
        let q = model.mul(&p0, m);
        let (x, y) = match &q {
            RatPoint::Affine { x, y } => (x.clone(), y.clone()),
            RatPoint::Infinity => continue,
        };
        let ok = bad.iter().all(|ld| {
            let (xm, ym) = to_minimal(ld, &x, &y);
            nonsingular_at(&ld.minimal, &xm, &ym, ld.p)
        });
        if ok {
            chosen = Some((m, q, x, y));
            break;
        }
    }
    let (m, q, x, y) = chosen.ok_or_else(|| Error::Numeric("no multiple with everywhere good reduction".into()))?;
    let lat = PeriodLattice::new(&model, prec)?;
    let z = lat.elliptic_log(&q)?;
    let mut h = lambda_infinity(&lat, &z)?;
    // Finite places. Good primes: the given model is minimal there.
    let mut den_good = x.denom().clone();
    for ld in &bad {
        let p = ld.p;
        let (xm, _) = to_minimal(ld, &x, &y);
        let vp = -valuation_rat(&xm, p);
        let pp = Integer::from(p);
        while den_good.is_divisible(&pp) {
            den_good /= &pp;
        }
        let lp = Float::with_val(prec, p).ln();
        if vp > 0 {
            h += Float::with_val(prec, &lp * vp) / 2u32;
        }
        h += Float::with_val(prec, &lp * ld.disc_valuation) / 12u32;
    }
    h += Float::with_val(prec, &den_good).ln() / 2u32;
    Ok(Float::with_val(prec, h * 2u32) / (m * m) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_has_zero_height() {
        let c = CurveK::new(1).unwrap();
        assert_eq!(canonical_height(&c, &RatPoint::new(2, 3), 128).unwrap(), 0);
    }

    #[test]
    fn doubling_oracle() {
        // y² = x³ + 2 has the point (-1, 1) of infinite order.
        let c = CurveK::new(2).unwrap();
        let p = RatPoint::new(-1, 1);
        let h = canonical_height(&c, &p, 128).unwrap().to_f64();
        let mut q = p.clone();
        for _ in 0..8 {
            q = c.double(&q);
        }
        let approx = naive_height(&q, 128).to_f64() / 4f64.powi(8);
        assert!((h - approx).abs() < 1e-3 * h, "{} vs {}", h, approx);
    }
}
