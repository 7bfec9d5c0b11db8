//! Base number fields k = Q[t]/(m(t)) with small integer minimal polynomial:
//! prime factorisation, residue fields, and Kronecker symbols over Q.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ffield::{self, poly, ExtField, FieldElem, MAX_DEGREE};
use crate::monodromy::det_exact_int;

/// Integer polynomial, coefficients low to high.
pub type IntPoly = Vec<i64>;

/// k = Q[t]/(m). `m = t` describes Q itself.
#[derive(Clone, PartialEq, Eq)]
pub struct NumberFieldDesc {
    modulus: IntPoly,
}

impl fmt::Debug for NumberFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[t]/({})", format_poly(&self.modulus, "t"))
    }
}

impl fmt::Display for NumberFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "Q")
        } else {
            write!(f, "Q[t]/({})", format_poly(&self.modulus, "t"))
        }
    }
}

/// Renders an integer polynomial, highest degree first.
pub fn format_poly(c: &[i64], var: &str) -> String {
    let mut out = String::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else { "+" };
        if out.is_empty() {
            if a < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {} ", sign));
        }
        let m = a.unsigned_abs();
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{}^{}", var, i),
        };
        if m != 1 || i == 0 {
            out.push_str(&m.to_string());
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl NumberFieldDesc {
    /// The rationals, presented as Q[t]/(t).
    pub fn rationals() -> Self {
        NumberFieldDesc { modulus: vec![0, 1] }
    }

    /// Accepts a monic polynomial of degree 1..=3 without rational roots.
    pub fn new(modulus: IntPoly) -> Result<Self> {
        let m = trim_int(modulus);
        let n = m.len().saturating_sub(1);
        if n == 0 || n > 3 || m[n] != 1 {
            return Err(Error::Invalid(format!(
                "minimal polynomial must be monic of degree 1..=3, got {:?}",
                m
            )));
        }
        if n > 1 && has_integer_root(&m) {
            return Err(Error::Invalid(format!("{:?} is reducible over Q", m)));
        }
        Ok(NumberFieldDesc { modulus: m })
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Discriminant of the minimal polynomial.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        if n == 1 {
            return BigInt::from(1);
        }
        let m = &self.modulus;
        let dm: IntPoly = m.iter().enumerate().skip(1).map(|(i, &c)| i as i64 * c).collect();
        let res = resultant(m, &dm);
        if (n * (n - 1) / 2) % 2 == 1 {
            -res
        } else {
            res
        }
    }
}

fn trim_int(mut a: IntPoly) -> IntPoly {
    while a.len() > 1 && a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn has_integer_root(m: &[i64]) -> bool {
    let c0 = m[0];
    if c0 == 0 {
        return true;
    }
    let eval = |x: i64| m.iter().rev().fold(0i128, |acc, &c| acc * x as i128 + c as i128);
    let a = c0.unsigned_abs();
    (1..=a)
        .filter(|d| a % d == 0)
        .any(|d| eval(d as i64) == 0 || eval(-(d as i64)) == 0)
}

/// Resultant via the Sylvester determinant.
pub fn resultant(a: &[i64], b: &[i64]) -> BigInt {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    let mut s = vec![vec![0i64; n]; n];
    for i in 0..db {
        for (j, &c) in a.iter().rev().enumerate() {
            s[i][i + j] = c;
        }
    }
    for i in 0..da {
        for (j, &c) in b.iter().rev().enumerate() {
            s[db + i][i + j] = c;
        }
    }
    det_exact_int(&s)
}

/// A prime of k: one irreducible factor of m mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeSlot {
    pub p: u64,
    pub f: u32,
    pub index: usize,
    pub norm: u64,
    /// Monic factor of m mod p, low to high; the residue field is F_p[t]/(factor).
    pub factor: Vec<u64>,
}

impl PrimeSlot {
    /// The slot over p of the rationals.
    pub fn rational(p: u64) -> Self {
        PrimeSlot {
            p,
            f: 1,
            index: 0,
            norm: p,
            factor: vec![0, 1],
        }
    }

    /// Residue field O_k/𝔭 with t mapped to the class of t.
    pub fn residue_field(&self) -> Result<ExtField> {
        ExtField::with_modulus(self.p, &self.factor)
    }

    /// Image of t in the residue field.
    pub fn local_root(&self) -> FieldElem {
        let mut e = FieldElem::default();
        if self.f == 1 {
            e.coeffs[0] = ((self.p - self.factor[0] % self.p) % self.p) as u32;
        } else {
            e.coeffs[1] = 1;
        }
        e
    }

    /// Sort key (norm, p, index).
    pub fn key(&self) -> (u64, u64, usize) {
        (self.norm, self.p, self.index)
    }
}

fn cmp_factor(a: &[u64], b: &[u64]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

/// Prime ideals above p, ordered by residue degree then factor.
pub fn factor_prime(k: &NumberFieldDesc, p: u64) -> Result<Vec<PrimeSlot>> {
    if !ffield::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k.degree() == 1 {
        return Ok(vec![PrimeSlot::rational(p)]);
    }
    if (k.discriminant() % BigInt::from(p)).is_zero() {
        return Err(Error::Ramified(p));
    }
    let m = poly::reduce(k.modulus(), p);
    let mut factors = poly::factor_squarefree(&m, p);
    factors.sort_by(|a, b| cmp_factor(a, b));
    let slots: Vec<PrimeSlot> = factors
        .into_iter()
        .enumerate()
        .map(|(index, factor)| {
            let f = (factor.len() - 1) as u32;
            PrimeSlot {
                p,
                f,
                index,
                norm: p.pow(f),
                factor,
            }
        })
        .collect();
    debug_assert_eq!(slots.iter().map(|s| s.f as usize).sum::<usize>(), k.degree());
    Ok(slots)
}

/// Element of k: numerator polynomial in t over a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NfElem {
    num: IntPoly,
    den: i64,
}

impl NfElem {
    pub fn new(num: IntPoly, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.iter().fold(den.abs(), |g, &c| g.gcd(&c));
        let s = if den < 0 { -1 } else { 1 };
        NfElem {
            num: trim_int(num.iter().map(|&c| s * c / g).collect()),
            den: s * den / g,
        }
    }

    pub fn int(v: i64) -> Self {
        NfElem::new(vec![v], 1)
    }

    pub fn num(&self) -> &[i64] {
        &self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&c| c == 0)
    }

    pub fn is_rational(&self) -> bool {
        self.num.len() <= 1
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = format_poly(&self.num, "t");
        if self.den == 1 {
            write!(f, "{}", n)
        } else if self.num.iter().filter(|&&c| c != 0).count() > 1 {
            write!(f, "({})/{}", n, self.den)
        } else {
            write!(f, "{}/{}", n, self.den)
        }
    }
}

/// numerator(local root) / denominator in the residue field of `slot`.
pub fn residue_reduce(x: &NfElem, slot: &PrimeSlot) -> Result<FieldElem> {
    let p = slot.p;
    if x.den.rem_euclid(p as i64) == 0 {
        return Err(Error::BadPrime(p));
    }
    let num = poly::rem(&poly::reduce(&x.num, p), &slot.factor, p);
    let inv = poly::pow_mod(x.den.rem_euclid(p as i64) as u64, p - 2, p);
    let mut e = FieldElem::default();
    for (i, &c) in num.iter().enumerate().take(MAX_DEGREE) {
        e.coeffs[i] = (c * inv % p) as u32;
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
        })
    }
}

/// Behaviour of the slot in k(i)/k: split iff -1 is a square mod the slot.
pub fn splits_in_gaussian_ext(slot: &PrimeSlot) -> Splitting {
    if slot.norm % 4 == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    }
}

/// Kronecker symbol (d/n).
pub fn kronecker(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    let mut n = n;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= tz;
    }
    // Jacobi symbol (d mod n / n) for odd n
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(m % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Prime divisors of a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if (&n % &bd).is_zero() {
            out.push(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::from(1) {
        out.push(n.to_u64().expect("cofactor fits in u64"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;

    fn x5_field() -> NumberFieldDesc {
        NumberFieldDesc::new(vec![1, -4, -1, 1]).unwrap()
    }

    #[test]
    fn discriminant_of_cubic() {
        assert_eq!(x5_field().discriminant(), BigInt::from(321));
        // t^3 - 3t + 1 has discriminant 81
        assert_eq!(
            NumberFieldDesc::new(vec![1, -3, 0, 1]).unwrap().discriminant(),
            BigInt::from(81)
        );
        assert!(NumberFieldDesc::new(vec![-1, 0, 1]).is_err());
    }

    #[test]
    fn factor_examples() {
        let k = x5_field();
        let s2 = factor_prime(&k, 2).unwrap();
        assert_eq!(s2.len(), 1);
        assert_eq!(s2[0].f, 3);
        let s29 = factor_prime(&k, 29).unwrap();
        assert_eq!(s29.iter().map(|s| s.f).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(s29[0].norm, 29);
        assert!(matches!(factor_prime(&k, 107), Err(Error::Ramified(107))));
        assert_eq!(factor_prime(&NumberFieldDesc::rationals(), 7).unwrap(), vec![PrimeSlot::rational(7)]);
    }

    #[test]
    fn local_roots_are_roots() {
        let k = x5_field();
        for p in ffield::prime_sieve(60).into_iter().skip(1) {
            let Ok(slots) = factor_prime(&k, p) else { continue };
            for s in slots {
                let field = s.residue_field().unwrap();
                let r = s.local_root();
                let v = k
                    .modulus()
                    .iter()
                    .rev()
                    .fold(field.zero(), |acc, &c| field.add(field.mul(acc, r), field.from_int(c)));
                assert_eq!(v, field.zero(), "slot {:?}", s);
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let s7 = PrimeSlot::rational(7);
        assert_eq!(residue_reduce(&NfElem::int(5), &s7).unwrap().coeffs[0], 5);
        assert!(matches!(
            residue_reduce(&NfElem::new(vec![1], 2), &PrimeSlot::rational(2)),
            Err(Error::BadPrime(2))
        ));
        let k = x5_field();
        let slot = factor_prime(&k, 29).unwrap().remove(0);
        let root = slot.local_root().coeffs[0] as i64;
        let alpha = NfElem::new(vec![16, -23, -26], 9);
        let inv9 = 13; // 9 * 13 = 117 = 4*29 + 1
        let expect = ((16 - 23 * root - 26 * root * root) * inv9).rem_euclid(29);
        assert_eq!(residue_reduce(&alpha, &slot).unwrap().coeffs[0] as i64, expect);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-1, 5), 1);
        assert_eq!(kronecker(-1, 7), -1);
        let f5 = ffield::PrimeField::new(5).unwrap();
        assert_eq!(kronecker(-1974, 5), f5.quad_char(f5.from_int(-1974)));
        assert_eq!(kronecker(2, 8), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(3, 9), 0);
        assert_eq!(kronecker(2, 9), 1);
    }

    #[test]
    fn gaussian_splitting() {
        let slot = |norm| PrimeSlot { p: norm, f: 1, index: 0, norm, factor: vec![0, 1] };
        assert_eq!(splits_in_gaussian_ext(&slot(13)), Splitting::Split);
        assert_eq!(splits_in_gaussian_ext(&slot(7)), Splitting::Inert);
        assert_eq!(splits_in_gaussian_ext(&slot(29)), Splitting::Split);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_poly(&[1, -4, -1, 1], "t"), "t^3 - t^2 - 4t + 1");
        assert_eq!(NfElem::new(vec![16, -23, -26], 9).to_string(), "(-26t^2 - 23t + 16)/9");
        assert_eq!(NfElem::new(vec![2], -4).to_string(), "-1/2");
    }
}
