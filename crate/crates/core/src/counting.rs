//! Point counts over finite fields: double covers of P^2 branched along a
//! sextic, odd-degree hyperelliptic curves, elliptic a_p, and node-resolved
//! surface counts.
//!
//! All sums walk an affine line in cosets x0 + {0, 1, ..., p-1}, updating each
//! factor's value by forward differences, so a point costs one addition per
//! factor degree and one table lookup per factor.

use crate::error::{Error, Result};
use crate::ffield::{poly, ExtField, FieldElem, FiniteField, PrimeField};
use crate::models::{self, Monomial, ReducedSextic, SurfaceSpec};
use crate::numfield::PrimeSlot;

/// Sextic with coefficients in a concrete counting field: constant · Π factors.
#[derive(Clone, Debug)]
pub struct FieldSextic<E> {
    pub constant: E,
    pub factors: Vec<Vec<(E, Monomial)>>,
}

impl<E: Copy> FieldSextic<E> {
    pub fn from_reduced<F: FiniteField<Elem = E>>(k: &F, s: &ReducedSextic) -> Self {
        FieldSextic {
            constant: k.from_field_elem(s.constant),
            factors: s
                .factors
                .iter()
                .map(|f| f.terms.iter().map(|&(c, m)| (k.from_field_elem(c), m)).collect())
                .collect(),
        }
    }

    fn homogeneous_degree(&self) -> Option<u32> {
        let mut total = 0;
        for f in &self.factors {
            let mut degs = f.iter().map(|(_, m)| m.iter().sum::<u32>());
            let d = degs.next()?;
            if !degs.all(|e| e == d) {
                return None;
            }
            total += d;
        }
        Some(total)
    }

    /// Direct evaluation at (x, y, z).
    pub fn eval<F: FiniteField<Elem = E>>(&self, k: &F, pt: [E; 3]) -> E {
        self.factors.iter().fold(self.constant, |acc, f| {
            let v = f.iter().fold(k.zero(), |s, &(c, m)| {
                let mono = (0..3).fold(c, |t, i| k.mul(t, k.pow(pt[i], m[i] as u64)));
                k.add(s, mono)
            });
            k.mul(acc, v)
        })
    }
}

/// Forward-difference walker over x0, x0+1, ..., x0+p-1 for a set of
/// univariate polynomials; yields Σ Π χ(g_i(x)).
struct DifferenceWalk<E> {
    // per polynomial: degree+1 table entries, flattened
    tables: Vec<E>,
    offsets: Vec<usize>,
}

impl<E: Copy + Eq> DifferenceWalk<E> {
    fn new<F: FiniteField<Elem = E>>(k: &F, polys: &[Vec<E>], x0: E) -> Self {
        let mut tables = Vec::new();
        let mut offsets = Vec::with_capacity(polys.len() + 1);
        for g in polys {
            offsets.push(tables.len());
            let d = g.len().saturating_sub(1);
            let mut vals: Vec<E> = (0..=d)
                .map(|j| {
                    let x = k.add(x0, k.from_int(j as i64));
                    g.iter().rev().fold(k.zero(), |acc, &c| k.add(k.mul(acc, x), c))
                })
                .collect();
            // vals[i] becomes Δ^i g(x0)
            for i in 1..=d {
                for j in (i..=d).rev() {
                    vals[j] = k.sub(vals[j], vals[j - 1]);
                }
            }
            tables.extend(vals);
        }
        offsets.push(tables.len());
        DifferenceWalk { tables, offsets }
    }

    #[inline]
    fn step<F: FiniteField<Elem = E>>(&mut self, k: &F) {
        for w in self.offsets.windows(2) {
            let t = &mut self.tables[w[0]..w[1]];
            for i in 0..t.len().saturating_sub(1) {
                t[i] = k.add(t[i], t[i + 1]);
            }
        }
    }

    #[inline]
    fn char_product<F: FiniteField<Elem = E>>(&self, k: &F) -> i32 {
        let mut prod = 1i32;
        for w in self.offsets.windows(2) {
            let c = k.quad_char(self.tables[w[0]]);
            if c == 0 {
                return 0;
            }
            prod *= c as i32;
        }
        prod
    }
}

/// Σ_{x ∈ K} Π_i χ(g_i(x)).
pub fn univariate_char_sum<F: FiniteField>(k: &F, polys: &[Vec<F::Elem>]) -> i64 {
    let p = k.characteristic();
    let cosets = k.order() / p;
    let mut total = 0i64;
    for c in 0..cosets {
        let x0 = k.element(c * p);
        let mut walk = DifferenceWalk::new(k, polys, x0);
        for step in 0..p {
            total += walk.char_product(k) as i64;
            if step + 1 < p {
                walk.step(k);
            }
        }
    }
    total
}

/// Restricts each factor to the line through (x, y0, z0) as a polynomial in x.
fn restrict<F: FiniteField>(k: &F, s: &FieldSextic<F::Elem>, y0: F::Elem, z0: F::Elem) -> Vec<Vec<F::Elem>> {
    s.factors
        .iter()
        .map(|f| {
            let dx = f.iter().map(|(_, m)| m[0] as usize).max().unwrap_or(0);
            let mut g = vec![k.zero(); dx + 1];
            for &(c, m) in f {
                let v = k.mul(c, k.mul(k.pow(y0, m[1] as u64), k.pow(z0, m[2] as u64)));
                g[m[0] as usize] = k.add(g[m[0] as usize], v);
            }
            g
        })
        .collect()
}

/// Σ over P^2(K) of (1 + χ(f(P))).
pub fn count_double_cover_raw<F: FiniteField>(f: &FieldSextic<F::Elem>, k: &F) -> Result<u64> {
    if f.homogeneous_degree() != Some(6) {
        return Err(Error::NotHomogeneous);
    }
    let q = k.order();
    let cc = k.quad_char(f.constant) as i64;
    if cc == 0 {
        return Ok(q * q + q + 1);
    }
    // character sums of the product of factors; the constant is applied last
    let mut sum = 0i64;
    // chart z = 1
    for yi in 0..q {
        let polys = restrict(k, f, k.element(yi), k.one());
        sum += univariate_char_sum(k, &polys);
    }
    // line z = 0, y = 1
    sum += univariate_char_sum(k, &restrict(k, f, k.one(), k.zero()));
    // point (1:0:0)
    let at_x = f.eval(k, [k.one(), k.zero(), k.zero()]);
    sum += (k.quad_char(at_x) as i64) * cc;
    Ok(((q * q + q + 1) as i64 + sum * cc) as u64)
}

/// 1 + Σ_{x ∈ K} (1 + χ(g(x))) for odd-degree g squarefree mod p.
pub fn count_hyperelliptic_odd<F: FiniteField>(g: &[i64], k: &F) -> Result<u64> {
    let p = k.characteristic();
    let r = poly::reduce(g, p);
    let deg = r.len().saturating_sub(1);
    if deg % 2 == 0 || r.len() != g.len() {
        return Err(Error::Invalid(format!("degree of {:?} is not odd mod {}", g, p)));
    }
    if !poly::is_squarefree(&r, p) {
        return Err(Error::NotSquarefree(p));
    }
    let coeffs: Vec<F::Elem> = g.iter().map(|&c| k.from_int(c)).collect();
    let s = univariate_char_sum(k, &[coeffs]);
    Ok((1 + k.order() as i64 + s) as u64)
}

/// a_p = p + 1 - #E(F_p) for y^2 = cubic.
pub fn ap_elliptic(cubic: &[i64], p: u64) -> Result<i64> {
    let k = PrimeField::new(p).map_err(|_| Error::BadPrime(p))?;
    ap_elliptic_in(cubic, &k)
}

/// a_p using a prebuilt F_p.
pub fn ap_elliptic_in(cubic: &[i64], k: &PrimeField) -> Result<i64> {
    let p = k.p();
    let n = count_hyperelliptic_odd(cubic, k).map_err(|e| match e {
        Error::NotSquarefree(_) | Error::Invalid(_) => Error::BadPrime(p),
        other => other,
    })?;
    Ok(p as i64 + 1 - n as i64)
}

/// Raw count of the singular double cover at a slot.
pub fn raw_count(spec: &SurfaceSpec, slot: &PrimeSlot) -> Result<u64> {
    let sextic = spec
        .sextic()
        .ok_or_else(|| Error::NoNodeModel(spec.name.clone()))?;
    let reduced = sextic.reduce(slot)?;
    if slot.f == 1 {
        let k = PrimeField::new(slot.p)?;
        count_double_cover_raw(&FieldSextic::from_reduced(&k, &reduced), &k)
    } else {
        let k = ExtField::with_modulus(slot.p, &slot.factor)?;
        count_double_cover_raw(&FieldSextic::from_reduced(&k, &reduced), &k)
    }
}

/// Frobenius-fixed nodes at a good slot.
pub fn fixed_nodes(spec: &SurfaceSpec, slot: &PrimeSlot) -> Result<u32> {
    let census = models::node_census(spec)?;
    if census.eliminants.is_empty() {
        return Ok(census.rational_node_count);
    }
    if slot.f != 1 {
        return Err(Error::NoNodeModel(format!(
            "{} at a slot of residue degree {}",
            spec.name, slot.f
        )));
    }
    Ok(census.fixed_nodes(slot.p))
}

/// Count of the minimal resolution: raw + q · (fixed nodes).
pub fn count_resolved(spec: &SurfaceSpec, slot: &PrimeSlot) -> Result<u64> {
    if !models::good_prime(spec, slot) {
        return Err(Error::BadPrime(slot.p));
    }
    let raw = raw_count(spec, slot)?;
    Ok(raw + slot.norm * fixed_nodes(spec, slot)? as u64)
}

/// The sextic coefficients of a catalog double cover reduced into `k`
/// (used by oracles and diagnostics).
pub fn field_sextic_ext(spec: &SurfaceSpec, slot: &PrimeSlot, k: &ExtField) -> Result<FieldSextic<FieldElem>> {
    let s = spec
        .sextic()
        .ok_or_else(|| Error::NoNodeModel(spec.name.clone()))?;
    Ok(FieldSextic::from_reduced(k, &s.reduce(slot)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::ext_field_build;

    fn z6<F: FiniteField>(k: &F, c: i64) -> FieldSextic<F::Elem> {
        FieldSextic {
            constant: k.from_int(c),
            factors: vec![vec![(k.one(), [0, 0, 6])]],
        }
    }

    #[test]
    fn z_sixth_examples() {
        for p in [3u64, 5, 7, 11] {
            let k = PrimeField::new(p).unwrap();
            assert_eq!(count_double_cover_raw(&z6(&k, 1), &k).unwrap(), 2 * p * p + p + 1);
            let nonres = (1..p as i64).find(|&c| k.quad_char(k.from_int(c)) == -1).unwrap();
            assert_eq!(count_double_cover_raw(&z6(&k, nonres), &k).unwrap(), p + 1);
        }
        let k = ext_field_build(3, 2).unwrap();
        assert_eq!(count_double_cover_raw(&z6(&k, 1), &k).unwrap(), 2 * 81 + 9 + 1);
    }

    #[test]
    fn non_homogeneous_rejected() {
        let k = PrimeField::new(7).unwrap();
        let f = FieldSextic {
            constant: 1,
            factors: vec![vec![(1, [0, 0, 5]), (1, [1, 0, 0])]],
        };
        assert!(matches!(count_double_cover_raw(&f, &k), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn hyperelliptic_examples() {
        let k = PrimeField::new(3).unwrap();
        assert_eq!(count_hyperelliptic_odd(&[-1, 0, 0, 0, 0, 1], &k).unwrap(), 4);
        assert!(matches!(
            count_hyperelliptic_odd(&[0, 0, 0, 1], &PrimeField::new(7).unwrap()),
            Err(Error::NotSquarefree(7))
        ));
    }

    #[test]
    fn elliptic_examples() {
        assert_eq!(ap_elliptic(&[0, 1, 0, 1], 3).unwrap(), 0);
        assert_eq!(ap_elliptic(&[0, 1, 0, 1], 5).unwrap(), 2);
        assert!(matches!(ap_elliptic(&[0, 1, 0, 1], 2), Err(Error::BadPrime(2))));
    }

    #[test]
    fn char_sum_matches_direct_loop() {
        let k = ext_field_build(5, 2).unwrap();
        let g: Vec<_> = [3i64, 0, 2, 1].iter().map(|&c| k.from_int(c)).collect();
        let direct: i64 = (0..k.order())
            .map(|i| {
                let x = k.element(i);
                let v = g.iter().rev().fold(k.zero(), |a, &c| k.add(k.mul(a, x), c));
                k.quad_char(v) as i64
            })
            .sum();
        assert_eq!(univariate_char_sum(&k, &[g]), direct);
    }
}
