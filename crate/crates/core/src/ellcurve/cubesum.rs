//! From points on y² = x³ + n² to solutions of a³ + b³ = 2n.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::{CurveK, RatPoint};
use crate::error::{Error, Result};

/// 3-isogeny y² = x³ + k → y² = x³ - 27k with kernel {O, (0, ±√k)}.
pub fn three_isogeny(k: &Rational, p: &RatPoint) -> RatPoint {
    match p {
        RatPoint::Infinity => RatPoint::Infinity,
        RatPoint::Affine { x, y } => {
            if *x == 0 {
                return RatPoint::Infinity;
            }
            let x3 = x.clone().pow(3);
            let x2 = Rational::from(x * x);
            let nx = (&x3 + Rational::from(k * 4u32)) / x2;
            let ny = (y * (&x3 - Rational::from(k * 8u32))) / x3;
            RatPoint::Affine { x: nx, y: ny }
        }
    }
}

/// (X, Y) on Y² = X³ - 432A² to (a, b) with a³ + b³ = A.
pub fn weierstrass_to_cubic(a_const: &Rational, x: &Rational, y: &Rational) -> Option<(Rational, Rational)> {
    if *x == 0 {
        return None;
    }
    let t = Rational::from(a_const * 36u32);
    let den = Rational::from(x * 6u32);
    let a = Rational::from(&t + y) / &den;
    let b = Rational::from(&t - y) / den;
    Some((a, b))
}

pub fn is_cube_sum_witness(a: &Rational, b: &Rational, target: &Rational) -> bool {
    *a != 0 && *b != 0 && a.clone().pow(3) + b.clone().pow(3) == *target
}

/// (a, b) with a³ + b³ = 2n from a non-torsion point on y² = x³ + n².
pub fn cube_sum_extract(n: &Integer, p: &RatPoint) -> Result<(Rational, Rational)> {
    let k = Rational::from(Integer::from(n * n));
    let curve = CurveK::new(k.clone())?;
    if !curve.contains(p) {
        return Err(Error::Domain(format!("{} is not on y² = x³ + {}", p, k)));
    }
    let target = Rational::from(Integer::from(n * 2u32));
    for m in 1..=3i64 {
        let q = curve.mul(p, m);
        let img = three_isogeny(&k, &q);
        if let RatPoint::Affine { x, y } = img {
            let big_x = Rational::from(&x * 4u32);
            let big_y = Rational::from(&y * 8u32);
            if let Some((a, b)) = weierstrass_to_cubic(&target, &big_x, &big_y) {
                if is_cube_sum_witness(&a, &b, &target) {
                    return Ok((a, b));
                }
            }
        }
    }
    Err(Error::Domain(format!("{}, 2P, 3P all map to the exceptional locus", p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isogeny_lands_on_target() {
        let k = Rational::from(2);
        let img = three_isogeny(&k, &RatPoint::new(-1, 1));
        assert!(CurveK::new(-54).unwrap().contains(&img));
    }

    #[test]
    fn classical_witness_for_250() {
        // 2·125 = 5³ + 5³; here n = 125 and 2n = 250 on the curve side.
        let a = Rational::from(5);
        assert!(is_cube_sum_witness(&a, &a, &Rational::from(250)));
    }

    #[test]
    fn known_point_gives_witness() {
        // y² = x³ + 9 contains (-2, 1); 6 = (17/21)³ + (37/21)³.
        let n = Integer::from(3);
        let (a, b) = cube_sum_extract(&n, &RatPoint::new(-2, 1)).unwrap();
        assert!(is_cube_sum_witness(&a, &b, &Rational::from(6)));
    }
}
