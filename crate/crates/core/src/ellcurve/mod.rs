//! The family y² = x³ + k over Q: exact group law, torsion, a_p, periods,
//! ℘ and elliptic logarithms, canonical heights, and the cube-sum map.

pub mod cubesum;
pub mod height;
pub mod lattice;
pub mod tate;

pub use cubesum::cube_sum_extract;
pub use height::{canonical_height, naive_height};
pub use lattice::{ComplexPoint, PeriodLattice};

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::{factor, legendre, pow_mod_u64};
use crate::eisenstein::{cube_roots_of_unity_mod, prime_above, EisInt};
use crate::error::{Error, Result};


/// y² = x³ + k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveK {
    k: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RatPoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl RatPoint {
    pub fn new(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        RatPoint::Affine { x: x.into(), y: y.into() }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RatPoint::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            RatPoint::Affine { x, .. } => Some(x),
            RatPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            RatPoint::Affine { y, .. } => Some(y),
            RatPoint::Infinity => None,
        }
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatPoint::Infinity => write!(f, "O"),
            RatPoint::Affine { x, y } => write!(f, "({}, {})", x, y),
        }
    }
}

/// JSON-friendly point.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointRecord {
    pub x: String,
    pub y: String,
}

impl From<&RatPoint> for Option<PointRecord> {
    fn from(p: &RatPoint) -> Self {
        match p {
            RatPoint::Infinity => None,
            RatPoint::Affine { x, y } => Some(PointRecord { x: x.to_string(), y: y.to_string() }),
        }
    }
}

impl CurveK {
    pub fn new(k: impl Into<Rational>) -> Result<Self> {
        let k = k.into();
        if k == 0 {
            return Err(Error::Domain("y² = x³ is singular".into()));
        }
        Ok(CurveK { k })
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    pub fn discriminant(&self) -> Rational {
        Rational::from(-432) * Rational::from(&self.k * &self.k)
    }

    pub fn tag(&self) -> String {
        format!("k={}/{}", self.k.numer(), self.k.denom())
    }

    pub fn contains(&self, p: &RatPoint) -> bool {
        match p {
            RatPoint::Infinity => true,
            RatPoint::Affine { x, y } => {
                Rational::from(y * y) == x.clone().pow(3) + &self.k
            }
        }
    }

    pub fn neg(&self, p: &RatPoint) -> RatPoint {
        match p {
            RatPoint::Infinity => RatPoint::Infinity,
            RatPoint::Affine { x, y } => RatPoint::Affine { x: x.clone(), y: -y.clone() },
        }
    }

    pub fn add(&self, p: &RatPoint, q: &RatPoint) -> RatPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RatPoint::Infinity, _) => return q.clone(),
            (_, RatPoint::Infinity) => return p.clone(),
            (RatPoint::Affine { x: x1, y: y1 }, RatPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lam = if x1 == x2 {
            if *y1 != *y2 || *y1 == 0 {
                return RatPoint::Infinity;
            }
            Rational::from(x1 * x1) * 3u32 / Rational::from(y1 * 2u32)
        } else {
            Rational::from(y2 - y1) / Rational::from(x2 - x1)
        };
        let x3 = Rational::from(&lam * &lam) - x1 - x2;
        let y3 = lam * Rational::from(x1 - &x3) - y1;
        RatPoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &RatPoint) -> RatPoint {
        self.add(p, p)
    }

    pub fn mul(&self, p: &RatPoint, m: i64) -> RatPoint {
        let mut base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = RatPoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            e >>= 1;
        }
        acc
    }

    /// Order if ≤ 12, else None (Mazur bound).
    pub fn torsion_order(&self, p: &RatPoint) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=12 {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }

    /// Integral model: k·u⁶ integral and sixth-power free, with (x, y) ↦ (u²x, u³y).
    pub fn integral_model(&self) -> (CurveK, Rational) {
        let mut u = Rational::from(1);
        let mut k = self.k.clone();
        for (p, e) in factor(self.k.denom()) {
            let m = e.div_ceil(6);
            let pm = Integer::from(&p).pow(m);
            u *= &pm;
            k *= Rational::from(pm.pow(6));
        }
        let num = k.numer().clone();
        for (p, e) in factor(&num) {
            if e >= 6 {
                let m = e / 6;
                let pm = Integer::from(&p).pow(m);
                u /= Rational::from(pm.clone());
                k /= Rational::from(pm.pow(6));
            }
        }
        (CurveK { k }, u)
    }

    pub fn map_scaled(p: &RatPoint, u: &Rational) -> RatPoint {
        match p {
            RatPoint::Infinity => RatPoint::Infinity,
            RatPoint::Affine { x, y } => RatPoint::Affine {
                x: Rational::from(u * u) * x,
                y: u.clone().pow(3) * y,
            },
        }
    }

    /// Rational torsion subgroup via Lutz–Nagell on the integral model.
    pub fn torsion(&self) -> Vec<RatPoint> {
        let (model, u) = self.integral_model();
        let k = model.k.numer().clone();
        let bound = Integer::from(&k * &k) * 27u32;
        let mut pts = vec![RatPoint::Infinity];
        let mut ys: Vec<Integer> = vec![Integer::new()];
        // y² | 27k²: enumerate divisors d with d² | bound.
        let fs = factor(&bound);
        let mut divs = vec![Integer::from(1)];
        for (p, e) in fs {
            let mut next = Vec::new();
            for d in &divs {
                let mut pk = Integer::from(1);
                for _ in 0..=(e / 2) {
                    next.push(Integer::from(d * &pk));
                    pk *= &p;
                }
            }
            divs = next;
        }
        ys.extend(divs);
        for y in ys {
            let t = Integer::from(&y * &y) - &k;
            let (root, rem) = t.clone().root_rem(Integer::new(), 3);
            if rem != 0 {
                continue;
            }
            for s in [1i32, -1] {
                if y == 0 && s == -1 {
                    continue;
                }
                let pt = RatPoint::new(root.clone(), Integer::from(&y * s));
                if model.contains(&pt) && model.torsion_order(&pt).is_some() && !pts.contains(&pt) {
                    pts.push(pt);
                }
            }
        }
        let uinv = Rational::from(1) / u;
        pts.iter().map(|p| CurveK::map_scaled(p, &uinv)).collect()
    }

    /// Bad primes of the integral model.
    pub fn bad_primes(&self) -> Vec<u64> {
        let (m, _) = self.integral_model();
        let mut ps = vec![2u64, 3];
        for (p, _) in factor(m.k.numer()) {
            let p = p.to_u64().unwrap();
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
        ps.sort();
        ps
    }

    /// p + 1 - #E(F_p) for primes of good reduction.
    pub fn ap(&self, p: u64) -> Result<i64> {
        let (m, _) = self.integral_model();
        let k = m.k.numer();
        if p == 2 || p == 3 || k.is_divisible_u(p as u32) {
            return Err(Error::Domain(format!("{} is a bad prime for {}", p, self.tag())));
        }
        if p % 3 == 2 {
            return Ok(0);
        }
        Ok(ap_cm(k, p))
    }

    /// The integral model as a general Weierstrass equation.
    pub fn weierstrass(&self) -> tate::Weierstrass {
        let (m, _) = self.integral_model();
        tate::Weierstrass::short(m.k.numer().clone())
    }
}

/// -Σ_x (x³ + k | p).
pub fn ap_count(k: &Integer, p: u64) -> i64 {
    let km = k.mod_u(p as u32) as u64;
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..p {
        chi[(y * y % p) as usize] = 1;
    }
    let mut s = 0i64;
    for x in 0..p {
        s += chi[((x * x % p * x + km) % p) as usize] as i64;
    }
    -s
}

/// a_p for p ≡ 1 mod 3, p ∤ 6k, from the primary π | p and the sextic symbol (4k/π)₆.
pub fn ap_cm(k: &Integer, p: u64) -> i64 {
    let pz = Integer::from(p);
    let (r, _) = cube_roots_of_unity_mod(&pz).expect("p ≡ 1 mod 3");
    let pi = prime_above(&pz, &r).primary().expect("p ≠ 3");
    let k4 = (k.mod_u(p as u32) as u128 * 4 % p as u128) as u64;
    let t = pow_mod_u64(k4, (p - 1) / 6, p);
    // ζ₆ = 1 + ω ↦ 1 + r
    let z = (r.to_u64().unwrap() + 1) % p;
    let mut acc = 1u64;
    let mut j = 0;
    while acc != t {
        acc = (acc as u128 * z as u128 % p as u128) as u64;
        j += 1;
        assert!(j < 6, "(4k)^((p-1)/6) is not a sixth root of unity");
    }
    let v = &EisInt::new(1, 1).pow(j).conj() * &pi;
    -(Integer::from(&v.a * 2) - &v.b).to_i64().unwrap()
}

/// p + 1 - #E(F_p) for a general integral model, by direct count.
pub fn ap_count_general(w: &tate::Weierstrass, p: u64) -> i64 {
    let a: Vec<u64> = w.a.iter().map(|c| c.mod_u(p as u32) as u64).collect();
    let mut n = 1u64;
    if p == 2 {
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = (y * y + a[0] * x * y + a[2] * y) % 2;
                let rhs = (x * x * x + a[1] * x * x + a[3] * x + a[4]) % 2;
                if lhs == rhs {
                    n += 1;
                }
            }
        }
        return 3 - n as i64;
    }
    for x in 0..p {
        let f = (x * x % p * x + a[1] * x % p * x + a[3] * x + a[4]) % p;
        let h = (a[0] * x + a[2]) % p;
        let d = ((4 * f + h * h) % p) as i64;
        n += (1 + legendre(d, p)) as u64;
    }
    p as i64 + 1 - n as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cm_formula_matches_point_count() {
        for k in [1i64, 2, -7, 121, 625, -432, 13915 * 13915] {
            let kz = Integer::from(k);
            for p in crate::arith::primes_up_to(2000) {
                if p % 3 == 1 && !kz.is_divisible_u(p as u32) {
                    assert_eq!(ap_cm(&kz, p), ap_count(&kz, p), "k = {}, p = {}", k, p);
                }
            }
        }
    }

    fn e() -> CurveK {
        CurveK::new(1).unwrap()
    }

    #[test]
    fn group_law_on_x036() {
        let p = RatPoint::new(2, 3);
        assert_eq!(e().mul(&p, 2), RatPoint::new(0, 1));
        assert_eq!(e().mul(&p, 3), RatPoint::new(-1, 0));
        assert_eq!(e().mul(&p, 6), RatPoint::Infinity);
        assert_eq!(e().add(&p, &RatPoint::Infinity), p);
    }

    #[test]
    fn torsion_k1() {
        let t = e().torsion();
        assert_eq!(t.len(), 6);
        assert!(t.contains(&RatPoint::new(2, -3)));
    }

    #[test]
    fn torsion_twists() {
        let t = CurveK::new(121).unwrap().torsion();
        assert_eq!(t.len(), 3);
        assert!(t.contains(&RatPoint::new(0, 11)));
        assert_eq!(CurveK::new(2).unwrap().torsion(), vec![RatPoint::Infinity]);
    }

    #[test]
    fn ap_small() {
        assert_eq!(e().ap(5).unwrap(), 0);
        assert_eq!(e().ap(7).unwrap(), -4);
        let a13 = e().ap(13).unwrap();
        assert!(a13.abs() as f64 <= 2.0 * 13f64.sqrt());
        assert_eq!((13 + 1 - a13).rem_euclid(6), 0);
        assert!(e().ap(3).is_err());
    }

    #[test]
    fn integral_model_scales() {
        let c = CurveK::new(Rational::from((1, 121))).unwrap();
        let (m, u) = c.integral_model();
        assert_eq!(*m.k(), Rational::from(11i64.pow(4)));
        assert_eq!(u, Rational::from(11));
        let big = CurveK::new(64 * 5).unwrap();
        assert_eq!(*big.integral_model().0.k(), Rational::from(5));
    }
}
