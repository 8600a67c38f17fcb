//! Small integer helpers shared across modules.

use rug::{Integer, Rational};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    Integer::from(n).is_probably_prime(30) != rug::integer::IsPrime::No
}

/// Trial-division factorization; fine for the desk-scale inputs used here.
pub fn factor(n: &Integer) -> Vec<(Integer, u32)> {
    let mut n = n.clone().abs();
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= n {
        if n.is_divisible(&p) {
            let mut e = 0;
            while n.is_divisible(&p) {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(&Integer::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor fits u64"), e))
        .collect()
}

pub fn valuation(n: &Integer, p: u64) -> u32 {
    if *n == 0 {
        return u32::MAX;
    }
    let mut n = n.clone();
    let mut v = 0;
    while n.is_divisible_u(p as u32) {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_rat(r: &Rational, p: u64) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let m128 = m as u128;
    let mut b128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// Legendre symbol (a|p) for odd prime p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Extended gcd: returns (g, x, y) with a·x + b·y = g ≥ 0.
pub fn xgcd(a: &Integer, b: &Integer) -> (Integer, Integer, Integer) {
    let (g, x, y) = a.clone().extended_gcd(b.clone(), Integer::new());
    (g, x, y)
}

/// Floor division.
pub fn fdiv(a: &Integer, b: &Integer) -> Integer {
    let (q, _) = a.clone().div_rem_floor(b.clone());
    q
}

pub fn fmod(a: &Integer, b: &Integer) -> Integer {
    let (_, r) = a.clone().div_rem_euc(b.clone());
    r
}

/// Hermite normal form of the lattice spanned by integer columns in Z^2.
/// Output is upper triangular [[a, b], [0, d]] with a, d > 0 and 0 ≤ b < a.
pub fn hnf2(cols: &[[Integer; 2]]) -> [[Integer; 2]; 2] {
    // Reduce second coordinates to a single generator d.
    let mut vs: Vec<[Integer; 2]> = cols.to_vec();
    let mut d_vec: Option<[Integer; 2]> = None;
    let mut rest: Vec<[Integer; 2]> = Vec::new();
    for v in vs.drain(..) {
        match d_vec.take() {
            None => d_vec = Some(v),
            Some(w) => {
                let (g, x, y) = xgcd(&w[1], &v[1]);
                if g == 0 {
                    rest.push(v);
                    d_vec = Some(w);
                    continue;
                }
                let new = [
                    Integer::from(&x * &w[0]) + Integer::from(&y * &v[0]),
                    g.clone(),
                ];
                let wq = Integer::from(&w[1] / &g);
                let vq = Integer::from(&v[1] / &g);
                // Kernel combination has zero second coordinate.
                let k0 = Integer::from(&vq * &w[0]) - Integer::from(&wq * &v[0]);
                rest.push([k0, Integer::new()]);
                d_vec = Some(new);
            }
        }
    }
    let mut dv = d_vec.expect("nonempty lattice");
    let mut a = Integer::new();
    for v in rest {
        a = a.gcd(&v[0]);
    }
    if dv[1] == 0 {
        a = a.gcd(&dv[0]);
        dv[0] = Integer::new();
    }
    if dv[1] < 0 {
        dv[0] = -dv[0].clone();
        dv[1] = -dv[1].clone();
    }
    let b = if a == 0 { dv[0].clone() } else { fmod(&dv[0], &a) };
    [[a, b], [Integer::new(), dv[1].clone()]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(97), vec![(97, 1)]);
    }

    #[test]
    fn hnf_basic() {
        let cols = [
            [Integer::from(4), Integer::from(0)],
            [Integer::from(0), Integer::from(6)],
            [Integer::from(2), Integer::from(3)],
        ];
        let h = hnf2(&cols);
        assert_eq!(h[1][1], 3);
        // index = 4·6/ (lattice index) : lattice generated has index 12
        assert_eq!(Integer::from(&h[0][0] * &h[1][1]), 12);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
    }
}
