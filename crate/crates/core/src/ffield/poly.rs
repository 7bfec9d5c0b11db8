//! Dense univariate polynomials over F_p, coefficients stored low to high.
//!
//! Only what the base-field factorisation and eliminant root counting need:
//! Euclidean arithmetic, modular powering, distinct-degree and equal-degree
//! factorisation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Poly = Vec<u64>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn reduce(a: &[i64], p: u64) -> Poly {
    trim(a.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let r = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(r)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let r = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(r)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    trim(r)
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr] * lead_inv % p;
        let shift = dr - db;
        q[shift] = c;
        for (i, &bc) in b[..=db].iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bc % p) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = inv_mod(a[d], p);
            a[..=d].iter().map(|&c| c * inv % p).collect()
        }
    }
}

/// Monic gcd.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub fn derivative(a: &[u64], p: u64) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

/// `base^e mod m`.
pub fn pow_poly(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
    let mut r = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(&mul(&r, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

pub fn is_squarefree(a: &[u64], p: u64) -> bool {
    let d = derivative(a, p);
    if d.is_empty() {
        return degree(a).map_or(false, |n| n == 0);
    }
    degree(&gcd(a, &d, p)) == Some(0)
}

/// Number of distinct roots in F_p, as deg gcd(x^p - x, a).
pub fn count_roots(a: &[u64], p: u64) -> usize {
    let a = monic(a, p);
    match degree(&a) {
        None => panic!("zero polynomial has every element as a root"),
        Some(0) => 0,
        Some(_) => {
            let xp = pow_poly(&[0, 1], p, &a, p);
            let g = gcd(&a, &sub(&xp, &[0, 1], p), p);
            degree(&g).unwrap_or(0)
        }
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test.
pub fn is_irreducible(a: &[u64], p: u64) -> bool {
    let a = monic(a, p);
    let n = match degree(&a) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let x = vec![0, 1];
    // x^(p^i) mod a for i = 0..=n
    let mut frob = vec![rem(&x, &a, p)];
    for i in 1..=n {
        let next = pow_poly(&frob[i - 1], p, &a, p);
        frob.push(next);
    }
    if frob[n] != frob[0] {
        return false;
    }
    for r in prime_divisors(n as u64) {
        let k = n / r as usize;
        let g = gcd(&a, &sub(&frob[k], &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Distinct-degree factorisation of a monic squarefree polynomial:
/// pairs (product of all irreducible factors of degree d, d).
pub fn distinct_degree(a: &[u64], p: u64) -> Vec<(Poly, usize)> {
    let mut f = monic(a, p);
    let mut out = Vec::new();
    let x = vec![0, 1];
    let mut h = rem(&x, &f, p);
    let mut d = 0;
    while let Some(df) = degree(&f) {
        if df < 2 * (d + 1) {
            if df > 0 {
                out.push((f.clone(), df));
            }
            break;
        }
        d += 1;
        h = pow_poly(&h, p, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if degree(&g).unwrap_or(0) > 0 {
            out.push((g.clone(), d));
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
        }
    }
    out
}

/// Splits a product of distinct irreducibles of common degree `d`.
/// Deterministic: the randomness is seeded from the input.
pub fn equal_degree(a: &[u64], d: usize, p: u64) -> Vec<Poly> {
    let a = monic(a, p);
    let n = degree(&a).unwrap_or(0);
    if n <= d {
        return vec![a];
    }
    let seed = a.iter().fold(p, |h, &c| h.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r: Poly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let h = if p == 2 {
            // trace map r + r^2 + ... + r^(2^(d-1))
            let mut acc = r.clone();
            let mut t = rem(&r, &a, p);
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), &a, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            let e = (p.pow(d as u32) - 1) / 2;
            sub(&pow_poly(&r, e, &a, p), &[1], p)
        };
        let g = gcd(&a, &h, p);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let other = divrem(&a, &g, p).0;
            let mut out = equal_degree(&g, d, p);
            out.extend(equal_degree(&other, d, p));
            return out;
        }
    }
}

/// Full factorisation of a squarefree polynomial into monic irreducibles.
pub fn factor_squarefree(a: &[u64], p: u64) -> Vec<Poly> {
    let mut out = Vec::new();
    for (g, d) in distinct_degree(a, p) {
        out.extend(equal_degree(&g, d, p));
    }
    out
}
