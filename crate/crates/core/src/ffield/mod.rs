//! Finite fields of odd characteristic with a precomputed quadratic-character table.
//!
//! Two concrete fields implement [`FiniteField`]: [`PrimeField`] (elements are
//! plain residues) and [`ExtField`] (polynomial basis over F_p, degree at most
//! [`MAX_DEGREE`]). Both are immutable after construction and can be shared
//! between counting threads.

pub mod poly;

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 4;

/// Default limit on the number of field elements (one `i8` table entry each).
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 26;

/// Common interface of the counting fields.
pub trait FiniteField: Sync + Send {
    type Elem: Copy + Eq + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    fn order(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Quadratic character with χ(0) = 0.
    fn quad_char(&self, x: Self::Elem) -> i8;
    /// Element with the given index; indices run over `0..order()`.
    fn element(&self, index: u64) -> Self::Elem;
    fn index(&self, x: Self::Elem) -> u64;
    /// Interprets a coefficient vector in this field's basis.
    fn from_field_elem(&self, e: FieldElem) -> Self::Elem;

    fn neg(&self, a: Self::Elem) -> Self::Elem {
        self.sub(self.zero(), a)
    }

    fn pow(&self, x: Self::Elem, mut e: u64) -> Self::Elem {
        let mut r = self.one();
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, x: Self::Elem) -> Option<Self::Elem> {
        if x == self.zero() {
            None
        } else {
            Some(self.pow(x, self.order() - 2))
        }
    }
}

/// Quadratic character of `x` in `k`.
pub fn quad_char<F: FiniteField>(k: &F, x: F::Elem) -> i8 {
    k.quad_char(x)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes `<= bound`, ascending.
pub fn prime_sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
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

/// Fills a character table by walking the powers of a multiplicative
/// generator: even exponents are squares.
fn character_table<F: FiniteField>(k: &F) -> Vec<i8> {
    let q = k.order();
    let mut table = vec![0i8; q as usize];
    let factors = distinct_prime_factors(q - 1);
    let one = k.one();
    let g = (1..q)
        .map(|i| k.element(i))
        .find(|&g| factors.iter().all(|&r| k.pow(g, (q - 1) / r) != one))
        .expect("multiplicative group of a finite field is cyclic");
    let mut x = one;
    for e in 0..q - 1 {
        table[k.index(x) as usize] = if e % 2 == 0 { 1 } else { -1 };
        x = k.mul(x, g);
    }
    table
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    Ok(())
}

/// F_p for an odd prime p.
#[derive(Clone)]
pub struct PrimeField {
    p: u32,
    chars: Vec<i8>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_budget(p, DEFAULT_TABLE_BUDGET)
    }

    pub fn with_budget(p: u64, budget: usize) -> Result<Self> {
        check_prime(p)?;
        if p as usize > budget || p > u32::MAX as u64 {
            return Err(Error::TableBudget { p, f: 1, budget });
        }
        let mut k = PrimeField {
            p: p as u32,
            chars: Vec::new(),
        };
        k.chars = character_table(&k);
        Ok(k)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    /// The raw character table indexed by residue.
    pub fn chars(&self) -> &[i8] {
        &self.chars
    }
}

impl FiniteField for PrimeField {
    type Elem = u32;

    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn order(&self) -> u64 {
        self.p as u64
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
    #[inline]
    fn quad_char(&self, x: u32) -> i8 {
        self.chars[x as usize]
    }
    fn element(&self, index: u64) -> u32 {
        index as u32
    }
    fn index(&self, x: u32) -> u64 {
        x as u64
    }
    fn from_field_elem(&self, e: FieldElem) -> u32 {
        e.coeffs[0] % self.p
    }
}

/// Element of an [`ExtField`]: coefficients of 1, t, t^2, ... reduced mod p.
/// Unused high coefficients are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElem {
    pub coeffs: [u32; MAX_DEGREE],
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

/// F_{p^f} = F_p[t]/(modulus).
#[derive(Clone)]
pub struct ExtField {
    p: u32,
    degree: usize,
    modulus: Vec<u32>,
    q: u64,
    chars: Vec<i8>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.degree, self.modulus)
    }
}

/// Builds F_{p^f} using the lexicographically smallest monic irreducible
/// modulus, comparing coefficient tuples (c_{f-1}, ..., c_0).
pub fn ext_field_build(p: u64, f: u32) -> Result<ExtField> {
    ext_field_build_with_budget(p, f, DEFAULT_TABLE_BUDGET)
}

pub fn ext_field_build_with_budget(p: u64, f: u32, budget: usize) -> Result<ExtField> {
    check_prime(p)?;
    let q = check_size(p, f, budget)?;
    let fu = f as usize;
    let modulus = (0..q)
        .map(|n| {
            let mut m: Vec<u64> = (0..fu).map(|i| n / p.pow(i as u32) % p).collect();
            m.push(1);
            m
        })
        .find(|m| poly::is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree");
    Ok(ExtField::assemble(p, &modulus))
}

fn check_size(p: u64, f: u32, budget: usize) -> Result<u64> {
    if f == 0 || f as usize > MAX_DEGREE {
        return Err(Error::Degree(f));
    }
    match p.checked_pow(f) {
        Some(q) if q as u128 <= budget as u128 && p < 1 << 30 => Ok(q),
        _ => Err(Error::TableBudget { p, f, budget }),
    }
}

impl ExtField {
    /// F_p[t]/(modulus) for a given monic irreducible `modulus` (low to high).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        Self::with_modulus_budget(p, modulus, DEFAULT_TABLE_BUDGET)
    }

    pub fn with_modulus_budget(p: u64, modulus: &[u64], budget: usize) -> Result<Self> {
        check_prime(p)?;
        let m = poly::reduce(
            &modulus.iter().map(|&c| c as i64).collect::<Vec<_>>(),
            p,
        );
        let f = poly::degree(&m).unwrap_or(0) as u32;
        check_size(p, f, budget)?;
        if m[f as usize] != 1 || !poly::is_irreducible(&m, p) {
            return Err(Error::Invalid(format!(
                "modulus {:?} is not monic irreducible mod {}",
                modulus, p
            )));
        }
        Ok(Self::assemble(p, &m))
    }

    fn assemble(p: u64, modulus: &[u64]) -> Self {
        let degree = modulus.len() - 1;
        let mut k = ExtField {
            p: p as u32,
            degree,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            q: p.pow(degree as u32),
            chars: Vec::new(),
        };
        k.chars = character_table(&k);
        k
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus, coefficients low to high.
    pub fn modulus(&self) -> Vec<u64> {
        self.modulus.iter().map(|&c| c as u64).collect()
    }

    pub fn chars(&self) -> &[i8] {
        &self.chars
    }

    /// The class of t.
    pub fn generator_t(&self) -> FieldElem {
        if self.degree == 1 {
            // t = -c_0 in F_p[t]/(t + c_0)
            self.from_int(-(self.modulus[0] as i64))
        } else {
            let mut e = FieldElem::default();
            e.coeffs[1] = 1;
            e
        }
    }

    pub fn from_coeffs(&self, c: &[i64]) -> FieldElem {
        let mut acc = self.zero();
        let mut pw = self.one();
        let t = self.generator_t();
        for &ci in c {
            acc = self.add(acc, self.mul(self.from_int(ci), pw));
            pw = self.mul(pw, t);
        }
        acc
    }
}

impl FiniteField for ExtField {
    type Elem = FieldElem;

    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn order(&self) -> u64 {
        self.q
    }
    fn zero(&self) -> FieldElem {
        FieldElem::default()
    }
    fn one(&self) -> FieldElem {
        let mut e = FieldElem::default();
        e.coeffs[0] = 1;
        e
    }
    fn from_int(&self, v: i64) -> FieldElem {
        let mut e = FieldElem::default();
        e.coeffs[0] = v.rem_euclid(self.p as i64) as u32;
        e
    }
    #[inline]
    fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut r = a;
        // slots past the degree are zero on both sides
        for i in 0..MAX_DEGREE {
            let s = a.coeffs[i] + b.coeffs[i];
            r.coeffs[i] = if s >= self.p { s - self.p } else { s };
        }
        r
    }
    #[inline]
    fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut r = a;
        for i in 0..MAX_DEGREE {
            r.coeffs[i] = if a.coeffs[i] >= b.coeffs[i] {
                a.coeffs[i] - b.coeffs[i]
            } else {
                a.coeffs[i] + self.p - b.coeffs[i]
            };
        }
        r
    }
    #[inline]
    fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let f = self.degree;
        let p = self.p as u64;
        // q <= budget keeps every unreduced sum well inside u64
        let mut t = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..f {
            let ai = a.coeffs[i] as u64;
            for j in 0..f {
                t[i + j] += ai * b.coeffs[j] as u64;
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = t[k] % p;
            if c == 0 {
                continue;
            }
            // t^k = t^(k-f) * t^f and t^f = -(c_0 + ... + c_{f-1} t^(f-1))
            for i in 0..f {
                t[k - f + i] += (p - c) * self.modulus[i] as u64;
            }
        }
        let mut r = FieldElem::default();
        for i in 0..f {
            r.coeffs[i] = (t[i] % p) as u32;
        }
        r
    }
    #[inline]
    fn quad_char(&self, x: FieldElem) -> i8 {
        self.chars[self.index(x) as usize]
    }
    fn element(&self, index: u64) -> FieldElem {
        let mut e = FieldElem::default();
        let mut n = index;
        for i in 0..self.degree {
            e.coeffs[i] = (n % self.p as u64) as u32;
            n /= self.p as u64;
        }
        e
    }
    #[inline]
    fn index(&self, x: FieldElem) -> u64 {
        let p = self.p as u64;
        let mut n = 0u64;
        for i in (0..self.degree).rev() {
            n = n * p + x.coeffs[i] as u64;
        }
        n
    }
    fn from_field_elem(&self, e: FieldElem) -> FieldElem {
        e
    }
}
