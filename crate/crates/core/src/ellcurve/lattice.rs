//! Period lattices of y² = x³ + k, Weierstrass ℘ and elliptic logarithms.
//!
//! Normalization: x = ℘(z), y = ℘'(z)/2, so g₂ = 0, g₃ = -4k and dx/2y = dz.

use rug::{Float, Integer, Rational};

use super::{CurveK, RatPoint};
use crate::error::{Error, Result};
use crate::numeric::{agm_real, eps, fl, pi, rat_to_float, MPComplex};

#[derive(Clone, Debug)]
pub struct PeriodLattice {
    /// Real period (positive real).
    pub omega1: MPComplex,
    pub omega2: MPComplex,
    /// Reduced basis (v1, v2) with τ = v2/v1 in the standard fundamental domain.
    pub v1: MPComplex,
    pub v2: MPComplex,
    pub tau: MPComplex,
    pub k: Rational,
}

#[derive(Clone, Debug)]
pub enum ComplexPoint {
    Infinity,
    Affine { x: MPComplex, y: MPComplex },
}

impl ComplexPoint {
    pub fn x(&self) -> Option<&MPComplex> {
        match self {
            ComplexPoint::Affine { x, .. } => Some(x),
            _ => None,
        }
    }
    pub fn y(&self) -> Option<&MPComplex> {
        match self {
            ComplexPoint::Affine { y, .. } => Some(y),
            _ => None,
        }
    }
}

fn two_pi_i_over(v: &MPComplex) -> MPComplex {
    let p = v.prec();
    let tpi = MPComplex::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
    tpi.div(v)
}

impl PeriodLattice {
    pub fn new(curve: &CurveK, prec: u32) -> Result<Self> {
        let k = curve.k().clone();
        let kf = rat_to_float(prec, &k);
        let e1 = -kf.clone().cbrt();
        let a = Float::with_val(prec, &e1 * 3u32);
        let b = Float::with_val(prec, 3).sqrt() * e1.clone().abs();
        let two_sqrt_b = Float::with_val(prec, b.clone().sqrt() * 2u32);
        let plus = Float::with_val(prec, Float::with_val(prec, &b * 2u32) + &a).sqrt();
        let minus = Float::with_val(prec, Float::with_val(prec, &b * 2u32) - &a).sqrt();
        let pip = pi(prec);
        let w1 = Float::with_val(prec, &pip * 2u32) / agm_real(&two_sqrt_b, &plus)?;
        let w2_im = Float::with_val(prec, &pip / agm_real(&two_sqrt_b, &minus)?);
        let omega1 = MPComplex::from_real(w1.clone());
        let omega2 = MPComplex::new(-w1 / 2u32, w2_im);
        let (v1, v2) = gauss_reduce(&omega1, &omega2);
        let tau = v2.div(&v1);
        Ok(PeriodLattice { omega1, omega2, v1, v2, tau, k })
    }

    pub fn prec(&self) -> u32 {
        self.omega1.prec()
    }

    /// Real period of the identity component (Δ < 0: the only component).
    pub fn real_period(&self) -> Float {
        self.omega1.re.clone()
    }

    /// Real coordinates (s, t) with z = s·v1 + t·v2.
    pub fn coords(&self, z: &MPComplex) -> (Float, Float) {
        let w = z.div(&self.v1);
        let t = Float::with_val(self.prec(), &w.im / &self.tau.im);
        let s = Float::with_val(self.prec(), &w.re - Float::with_val(self.prec(), &t * &self.tau.re));
        (s, t)
    }

    pub fn from_coords(&self, s: &Float, t: &Float) -> MPComplex {
        &self.v1.scale(s) + &self.v2.scale(t)
    }

    /// Representative with coordinates in [-1/2, 1/2).
    pub fn reduce(&self, z: &MPComplex) -> MPComplex {
        let (s, t) = self.coords(z);
        let s = Float::with_val(self.prec(), &s - s.clone().round());
        let t = Float::with_val(self.prec(), &t - t.clone().round());
        self.from_coords(&s, &t)
    }

    /// Distance of z to the lattice, in units of |v1|.
    pub fn dist_to_lattice(&self, z: &MPComplex) -> Float {
        let r = self.reduce(z);
        let mut best = r.abs();
        for (i, j) in [(1i64, 0i64), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1), (1, -1), (-1, 1)] {
            let w = &(&r + &self.v1.scale_i(i)) + &self.v2.scale_i(j);
            let d = w.abs();
            if d < best {
                best = d;
            }
        }
        best / self.v1.abs()
    }

    pub fn is_lattice_point(&self, z: &MPComplex, tol_bits: i32) -> bool {
        self.dist_to_lattice(z) < eps(self.prec(), tol_bits)
    }

    /// (℘(z), ℘'(z)) by the q-expansion in the reduced basis.
    pub fn wp(&self, z: &MPComplex) -> Result<(MPComplex, MPComplex)> {
        let p = self.prec();
        let zr = self.reduce(z);
        if zr.abs() < eps(p, p as i32 - 16) * self.v1.abs() {
            return Err(Error::Numeric("℘ evaluated at a lattice point".into()));
        }
        let c = two_pi_i_over(&self.v1);
        let x = zr.div(&self.v1);
        let twopi_i = MPComplex::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
        let q = (&twopi_i * &self.tau).exp();
        let u = (&twopi_i * &x).exp();
        let uinv = u.recip();
        let one = MPComplex::one(p);
        let f = |w: &MPComplex| -> MPComplex {
            let d = &one - w;
            w.div(&d.square())
        };
        let g = |w: &MPComplex| -> MPComplex {
            let d = &one - w;
            (w * &(&one + w)).div(&(&d.square() * &d))
        };
        let mut s_p = f(&u);
        let mut s_d = g(&u);
        let mut s_e = MPComplex::zero(p);
        let mut qn = q.clone();
        let tol = eps(p, p as i32 + 8);
        let bigu = u.abs().max(&uinv.abs());
        for _ in 0..100_000 {
            let a = &qn * &u;
            let b = &qn * &uinv;
            s_p = &(&s_p + &f(&a)) + &f(&b);
            s_d = &(&s_d + &g(&a)) - &g(&b);
            s_e = &s_e + &f(&qn);
            if Float::with_val(p, qn.abs() * &bigu) < tol {
                break;
            }
            qn = &qn * &q;
        }
        let twelfth = MPComplex::from_real(Float::with_val(p, 1) / 12u32);
        let bracket = &(&twelfth + &s_p) - &s_e.scale(&fl(p, 2.0));
        let c2 = c.square();
        let wp = &c2 * &bracket;
        let wpd = &(&c2 * &c) * &s_d;
        Ok((wp, wpd))
    }

    pub fn elliptic_exp(&self, z: &MPComplex) -> ComplexPoint {
        let p = self.prec();
        if self.is_lattice_point(z, p as i32 - 24) {
            return ComplexPoint::Infinity;
        }
        match self.wp(z) {
            Ok((x, d)) => ComplexPoint::Affine { x, y: d.scale(&fl(p, 0.5)) },
            Err(_) => ComplexPoint::Infinity,
        }
    }

    /// Elliptic logarithm of a complex point (x, y) on y² = x³ + k.
    pub fn elliptic_log_complex(&self, x: &MPComplex, y: &MPComplex) -> Result<MPComplex> {
        let target = self.prec();
        // Half-periods for 2-torsion.
        if y.abs() < eps(target, target as i32 - 20) * (x.abs() + fl(target, 1.0)) {
            let halves = [
                self.v1.scale(&fl(target, 0.5)),
                self.v2.scale(&fl(target, 0.5)),
                (&self.v1 + &self.v2).scale(&fl(target, 0.5)),
            ];
            let mut best = None;
            let mut bd = Float::with_val(target, f64::INFINITY);
            for h in halves {
                let (w, _) = self.wp(&h)?;
                let d = (&w - x).abs();
                if d < bd {
                    bd = d;
                    best = Some(h);
                }
            }
            return Ok(best.unwrap());
        }
        // Coarse grid start at low precision.
        let lo = 64u32;
        let low = self.with_prec(lo);
        let xl = x.with_prec(lo);
        let yl = y.with_prec(lo).scale(&fl(lo, 2.0));
        let n = 24;
        let mut best: Option<MPComplex> = None;
        let mut bd = f64::INFINITY;
        let v1n = low.v1.norm_sqr().to_f64();
        if xl.abs().to_f64() * v1n > 400.0 {
            // Near the origin ℘ ≈ z⁻², ℘' ≈ -2z⁻³.
            let r = xl.sqrt().recip();
            let c1 = MPComplex::from_f64(lo, -2.0, 0.0).div(&r.powi(3));
            bd = 0.0;
            best = Some(if (&c1 - &yl).abs() <= (&c1 + &yl).abs() { r } else { -r });
        }
        for i in 0..if bd == 0.0 { 0 } else { n } {
            for j in 0..n {
                let s = fl(lo, (i as f64 + 0.5) / n as f64 - 0.5);
                let t = fl(lo, (j as f64 + 0.5) / n as f64 - 0.5);
                let z = low.from_coords(&s, &t);
                if let Ok((w, wd)) = low.wp(&z) {
                    let scale = 1.0 + xl.abs().to_f64();
                    let d = (&w - &xl).abs().to_f64() / scale
                        + (&wd - &yl).abs().to_f64() / (scale.powf(1.5) + 1.0);
                    if d < bd {
                        bd = d;
                        best = Some(z);
                    }
                }
            }
        }
        let mut z = best.ok_or_else(|| Error::Numeric("elliptic log grid search failed".into()))?;
        let mut prec = lo;
        loop {
            let lat = if prec == target { self.clone() } else { self.with_prec(prec) };
            z = z.with_prec(prec);
            let xp = x.with_prec(prec);
            let iters = if prec == lo { 60 } else { 6 };
            for _ in 0..iters {
                let (w, wd) = lat.wp(&z)?;
                let step = (&w - &xp).div(&wd);
                z = &z - &step;
                if step.abs() < eps(prec, prec as i32 - 4) * lat.v1.abs() {
                    break;
                }
            }
            if prec == target {
                break;
            }
            prec = (prec * 2).min(target);
        }
        // Sign: ℘'(z) must match 2y.
        let (_, wd) = self.wp(&z)?;
        let y2 = y.scale(&fl(target, 2.0));
        if (&wd + &y2).abs() < (&wd - &y2).abs() {
            z = -z;
        }
        Ok(self.reduce(&z))
    }

    pub fn elliptic_log(&self, p: &RatPoint) -> Result<MPComplex> {
        match p {
            RatPoint::Infinity => Ok(MPComplex::zero(self.prec())),
            RatPoint::Affine { x, y } => {
                let pr = self.prec();
                let xc = MPComplex::from_real(rat_to_float(pr, x));
                let yc = MPComplex::from_real(rat_to_float(pr, y));
                self.elliptic_log_complex(&xc, &yc)
            }
        }
    }

    pub fn with_prec(&self, prec: u32) -> PeriodLattice {
        PeriodLattice {
            omega1: self.omega1.with_prec(prec),
            omega2: self.omega2.with_prec(prec),
            v1: self.v1.with_prec(prec),
            v2: self.v2.with_prec(prec),
            tau: self.tau.with_prec(prec),
            k: self.k.clone(),
        }
    }

    /// g₂, g₃ from Eisenstein series in the reduced basis.
    pub fn invariants(&self) -> (MPComplex, MPComplex) {
        let p = self.prec();
        let twopi_i = MPComplex::new(Float::new(p), Float::with_val(p, pi(p) * 2u32));
        let q = (&twopi_i * &self.tau).exp();
        let mut e4 = MPComplex::one(p);
        let mut e6 = MPComplex::one(p);
        let mut qn = q.clone();
        let tol = eps(p, p as i32 + 8);
        let mut n = 1i64;
        let one = MPComplex::one(p);
        while qn.abs() * fl(p, (n as f64).powi(6)) > tol {
            let den = &one - &qn;
            let t = qn.div(&den);
            e4 = &e4 + &t.scale(&fl(p, 240.0 * (n as f64).powi(3)));
            e6 = &e6 - &t.scale(&fl(p, 504.0 * (n as f64).powi(5)));
            qn = &qn * &q;
            n += 1;
        }
        let c = two_pi_i_over(&self.v1);
        let c4 = c.square().square();
        let c6 = &c4 * &c.square();
        let g2 = (&c4 * &e4).scale(&(Float::with_val(p, 1) / 12u32));
        let g3 = (&c6 * &e6).scale(&(Float::with_val(p, -1) / 216u32));
        (g2, g3)
    }

    /// Lattice of the twist k·m⁶ is m⁻¹ times this one.
    pub fn scaled(&self, m: &Float) -> PeriodLattice {
        let inv = Float::with_val(self.prec(), m.clone().recip());
        PeriodLattice {
            omega1: self.omega1.scale(&inv),
            omega2: self.omega2.scale(&inv),
            v1: self.v1.scale(&inv),
            v2: self.v2.scale(&inv),
            tau: self.tau.clone(),
            k: self.k.clone(),
        }
    }

    /// Nearest lattice vector to z as integer coordinates.
    pub fn nearest(&self, z: &MPComplex) -> (Integer, Integer) {
        let (s, t) = self.coords(z);
        (s.round().to_integer().unwrap(), t.round().to_integer().unwrap())
    }
}

/// Lagrange–Gauss reduction of a lattice basis, oriented with Im(v2/v1) > 0.
pub fn gauss_reduce(a: &MPComplex, b: &MPComplex) -> (MPComplex, MPComplex) {
    let (mut u, mut v) = (a.clone(), b.clone());
    for _ in 0..1000 {
        if v.norm_sqr() < u.norm_sqr() {
            std::mem::swap(&mut u, &mut v);
        }
        let m = v.div(&u).re.round();
        if m.is_zero() {
            break;
        }
        v = &v - &u.scale(&m);
    }
    if v.div(&u).im < 0 {
        v = -v;
    }
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_period_k1() {
        let l = PeriodLattice::new(&CurveK::new(1).unwrap(), 128).unwrap();
        assert!((l.real_period().to_f64() - 4.2065463).abs() < 1e-6);
    }

    #[test]
    fn invariants_match_model() {
        for k in [1i64, -7, 121] {
            let l = PeriodLattice::new(&CurveK::new(k).unwrap(), 160).unwrap();
            let (g2, g3) = l.invariants();
            assert!(g2.abs() < eps(160, 140));
            let want = MPComplex::from_f64(160, -4.0 * k as f64, 0.0);
            assert!((&g3 - &want).abs() < eps(160, 130) * fl(160, 4.0 * k.abs() as f64));
        }
    }

    #[test]
    fn half_period_is_two_torsion() {
        let l = PeriodLattice::new(&CurveK::new(1).unwrap(), 128).unwrap();
        let (x, _) = l.wp(&l.omega1.scale(&fl(128, 0.5))).unwrap();
        assert!((&x + &MPComplex::one(128)).abs() < eps(128, 110));
    }

    #[test]
    fn log_exp_roundtrip() {
        let c = CurveK::new(1).unwrap();
        let l = PeriodLattice::new(&c, 192).unwrap();
        let z = l.elliptic_log(&RatPoint::new(2, 3)).unwrap();
        match l.elliptic_exp(&z) {
            ComplexPoint::Affine { x, y } => {
                assert!((&x - &MPComplex::from_f64(192, 2.0, 0.0)).abs() < eps(192, 170));
                assert!((&y - &MPComplex::from_f64(192, 3.0, 0.0)).abs() < eps(192, 170));
            }
            _ => panic!("infinity"),
        }
    }
}
