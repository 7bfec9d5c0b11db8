//! Brute-force oracles shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use k3lab::counting::FieldSextic;
use k3lab::ffield::{ExtField, FieldElem, FiniteField};
use k3lab::models::Monomial;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn monomials(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

pub fn random_sextic(k: &ExtField, shape: &[u32], rng: &mut ChaCha8Rng) -> FieldSextic<FieldElem> {
    let q = k.order();
    FieldSextic {
        constant: k.element(rng.gen_range(1..q)),
        factors: shape
            .iter()
            .map(|&d| monomials(d).into_iter().map(|m| (k.element(rng.gen_range(0..q)), m)).collect())
            .collect(),
    }
}

fn square_roots<F: FiniteField>(k: &F) -> Vec<u64> {
    let q = k.order();
    let mut roots = vec![0u64; q as usize];
    for w in 0..q {
        let e = k.element(w);
        roots[k.index(k.mul(e, e)) as usize] += 1;
    }
    roots
}

/// #{(x,y,z,w) != 0 : w^2 = f(x,y,z)} / (q - 1): points of the weighted model.
pub fn weighted_count<F: FiniteField>(k: &F, f: &FieldSextic<F::Elem>) -> u64 {
    let q = k.order();
    let roots = square_roots(k);
    let mut total = 0u64;
    for x in 0..q {
        for y in 0..q {
            for z in 0..q {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let v = f.eval(k, [k.element(x), k.element(y), k.element(z)]);
                total += roots[k.index(v) as usize];
            }
        }
    }
    assert_eq!(total % (q - 1), 0);
    total / (q - 1)
}

/// Points of y^2 = g(x), g of odd degree, by trying every (x, y).
pub fn exhaustive_curve_count<F: FiniteField>(k: &F, g: &[i64]) -> u64 {
    let coeffs: Vec<F::Elem> = g.iter().map(|&c| k.from_int(c)).collect();
    let q = k.order();
    let mut n = 1;
    for xi in 0..q {
        let x = k.element(xi);
        let v = coeffs.iter().rev().fold(k.zero(), |a, &c| k.add(k.mul(a, x), c));
        for yi in 0..q {
            let y = k.element(yi);
            if k.mul(y, y) == v {
                n += 1;
            }
        }
    }
    n
}

pub fn cofactor_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::from_integer(BigInt::from(1));
    }
    let mut total = BigRational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn random_rational_matrix(n: usize, hi: i64, rng: &mut ChaCha8Rng) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|_| {
            (0..n)
                .map(|_| BigRational::new(BigInt::from(rng.gen_range(-hi..=hi)), BigInt::from(rng.gen_range(1..=7))))
                .collect()
        })
        .collect()
}

pub fn odd_prime_powers(bound: u64) -> Vec<(u64, u32)> {
    let mut v = Vec::new();
    for p in k3lab::ffield::prime_sieve(bound).into_iter().skip(1) {
        let mut f = 1;
        while p.pow(f) <= bound {
            v.push((p, f));
            f += 1;
        }
    }
    v
}

pub const SEXTIC_SHAPES: [&[u32]; 5] = [&[1, 1, 1, 1, 1, 1], &[2, 2, 2], &[3, 3], &[6], &[1, 2, 3]];
