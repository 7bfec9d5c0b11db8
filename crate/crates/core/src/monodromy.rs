//! Signed permutations (Z/2)^d ⋊ S_d acting on d eigenspace pairs, the
//! block Gram form they preserve, exact determinants, and the jump-character
//! and component-group predictors for CM endomorphism fields.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::{EndoFieldDesc, EndoKind};
use crate::numfield::{kronecker, PrimeSlot};

/// (π, a) with π a permutation of 0..d and a ∈ (Z/2)^d. Acts on pair
/// members by (i, s) ↦ (π(i), s + a_i).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    pi: Vec<usize>,
    a: Vec<u8>,
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.pi, self.a)
    }
}

impl SignedPermutation {
    pub fn new(pi: Vec<usize>, a: Vec<u8>) -> Result<Self> {
        let d = pi.len();
        let mut seen = vec![false; d];
        for &x in &pi {
            if x >= d || seen[x] {
                return Err(Error::Invalid(format!("{:?} is not a permutation", pi)));
            }
            seen[x] = true;
        }
        if a.len() != d || a.iter().any(|&b| b > 1) {
            return Err(Error::Invalid(format!("{:?} is not a bit vector of length {}", a, d)));
        }
        Ok(SignedPermutation { pi, a })
    }

    pub fn identity(d: usize) -> Self {
        SignedPermutation {
            pi: (0..d).collect(),
            a: vec![0; d],
        }
    }

    /// (id, 1...1): flips every pair.
    pub fn conjugation(d: usize) -> Self {
        SignedPermutation {
            pi: (0..d).collect(),
            a: vec![1; d],
        }
    }

    pub fn d(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn a(&self) -> &[u8] {
        &self.a
    }

    /// self · other = (π∘π′, a′ + a∘π′).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.d(), other.d());
        let pi = other.pi.iter().map(|&j| self.pi[j]).collect();
        let a = other
            .a
            .iter()
            .zip(&other.pi)
            .map(|(&b, &j)| b ^ self.a[j])
            .collect();
        SignedPermutation { pi, a }
    }

    /// The image in S_{2d}: pair i occupies points 2i, 2i+1.
    pub fn to_s2d(&self) -> Vec<usize> {
        let mut img = vec![0; 2 * self.d()];
        for i in 0..self.d() {
            for s in 0..2 {
                img[2 * i + s] = 2 * self.pi[i] + (s ^ self.a[i] as usize);
            }
        }
        img
    }

    /// Sign of the image in S_{2d}. Moving whole pairs is even, so only
    /// the flips count.
    pub fn sgn_2d(&self) -> i8 {
        if self.a.iter().map(|&b| b as u32).sum::<u32>() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All 2^d · d! elements.
    pub fn all(d: usize) -> Vec<Self> {
        let mut perms = Vec::new();
        permutations(&mut (0..d).collect(), 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << d);
        for pi in perms {
            for bits in 0..(1u32 << d) {
                let a = (0..d).map(|i| ((bits >> i) & 1) as u8).collect();
                out.push(SignedPermutation { pi: pi.clone(), a });
            }
        }
        out
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Subgroup generated by `gens` (all of the same d).
pub fn group_closure(gens: &[SignedPermutation]) -> Vec<SignedPermutation> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let mut seen = BTreeSet::new();
    let id = SignedPermutation::identity(first.d());
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Symmetric form with d diagonal blocks [[0, I_b], [I_b, 0]]. Basis order
/// within pair i: v_{i,1..b} then v*_{i,1..b}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockGram {
    pub d: usize,
    pub b: usize,
}

impl BlockGram {
    pub fn dim(&self) -> usize {
        2 * self.d * self.b
    }

    fn basis(&self, pair: usize, member: usize, j: usize) -> usize {
        pair * 2 * self.b + member * self.b + j
    }

    pub fn matrix(&self) -> IntMatrix {
        let n = self.dim();
        let mut g = vec![vec![0; n]; n];
        for i in 0..self.d {
            for j in 0..self.b {
                let u = self.basis(i, 0, j);
                let v = self.basis(i, 1, j);
                g[u][v] = 1;
                g[v][u] = 1;
            }
        }
        g
    }
}

/// The 0/1 matrix sending v_{i,j} to v_{π(i),j} or v*_{π(i),j} as a_i is 0 or 1
/// (and v*_{i,j} to the other member).
pub fn block_matrix(s: &SignedPermutation, b: usize) -> IntMatrix {
    let g = BlockGram { d: s.d(), b };
    let n = g.dim();
    let mut m = vec![vec![0; n]; n];
    for i in 0..s.d() {
        for member in 0..2 {
            for j in 0..b {
                let src = g.basis(i, member, j);
                let dst = g.basis(s.pi[i], member ^ s.a[i] as usize, j);
                m[dst][src] = 1;
            }
        }
    }
    m
}

pub fn mat_mul_int(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![0; m]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn det_exact_int(m: &[Vec<i64>]) -> BigInt {
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    det_bigint(&big)
}

/// Exact determinant of a rational matrix: rows are scaled to integers,
/// then Bareiss elimination.
pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    assert!(m.iter().all(|r| r.len() == m.len()), "matrix must be square");
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    BigRational::new(det_bigint(&rows), scale)
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                c[i][j] += aik * &b[k][j];
            }
        }
    }
    c
}

/// Inverse by Gauss-Jordan; `None` if singular.
pub fn mat_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, piv);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..2 * n {
                    let v = &f * &m[c][j];
                    m[r][j] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Mᵀ G M = G.
pub fn is_gram_orthogonal(m: &RatMatrix, g: &RatMatrix) -> bool {
    mat_mul(&transpose(m), &mat_mul(g, m)) == *g
}

#[derive(Clone, Debug, Default)]
pub struct NormalizerReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl NormalizerReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every (π, a): M is Gram-orthogonal and det M = sgn_2d^b.
pub fn verify_normalizer_det(d: usize, b: usize) -> NormalizerReport {
    let gram = BlockGram { d, b }.matrix();
    let mut report = NormalizerReport::default();
    for s in SignedPermutation::all(d) {
        let m = block_matrix(&s, b);
        report.checked += 1;
        if mat_mul_int(&transpose(&m), &mat_mul_int(&gram, &m)) != gram {
            report.violations.push(format!("{:?}: not orthogonal", s));
        }
        let det = det_exact_int(&m);
        let expect = BigInt::from(s.sgn_2d()).pow(b as u32);
        if det != expect {
            report
                .violations
                .push(format!("{:?}: det {} != sgn^b {}", s, det, expect));
        }
    }
    report
}

/// Block-diagonal map acting as G_i on v_i and as (G_i^T)^{-1} on v*_i.
pub fn centralizer_element(blocks: &[RatMatrix]) -> Option<RatMatrix> {
    let b = blocks.first()?.len();
    let d = blocks.len();
    let n = 2 * d * b;
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (i, g) in blocks.iter().enumerate() {
        let partner = transpose(&mat_inverse(g)?);
        let base = 2 * i * b;
        for r in 0..b {
            for c in 0..b {
                m[base + r][base + c] = g[r][c].clone();
                m[base + b + r][base + b + c] = partner[r][c].clone();
            }
        }
    }
    Some(m)
}

#[derive(Clone, Debug, Default)]
pub struct CentralizerReport {
    pub trials: usize,
    pub passed: usize,
    /// Perturbed partners that were correctly rejected.
    pub negatives_detected: usize,
}

impl CentralizerReport {
    pub fn ok(&self) -> bool {
        self.passed == self.trials && self.negatives_detected == self.trials
    }
}

fn random_block(rng: &mut ChaCha8Rng, b: usize) -> RatMatrix {
    (0..b)
        .map(|_| {
            (0..b)
                .map(|_| BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
                .collect()
        })
        .collect()
}

/// Random invertible blocks with inverse-transpose partners preserve the
/// Gram form; perturbing one partner breaks it.
pub fn verify_centralizer(d: usize, b: usize, trials: usize, seed: u64) -> CentralizerReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gram = to_rational(&BlockGram { d, b }.matrix());
    let mut report = CentralizerReport::default();
    for _ in 0..trials {
        let blocks: Vec<RatMatrix> = (0..d)
            .map(|_| loop {
                let g = random_block(&mut rng, b);
                if !det_exact(&g).is_zero() {
                    break g;
                }
            })
            .collect();
        let mut m = centralizer_element(&blocks).expect("blocks are invertible");
        report.trials += 1;
        if is_gram_orthogonal(&m, &gram) {
            report.passed += 1;
        }
        // perturb the first partner block
        m[b][b] += BigRational::one();
        if !is_gram_orthogonal(&m, &gram) {
            report.negatives_detected += 1;
        }
    }
    report
}

/// A ±1-valued character of the absolute Galois group of the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterDesc {
    Trivial,
    /// (D/·)
    Kronecker(i64),
    /// Character of the unique quadratic subfield, not resolved to a discriminant.
    QuadraticSubfield(String),
    /// Sign of the permutation action on the 2d embeddings; `resolved` is a
    /// D such that the character equals (D/N𝔭).
    SignOfAction { group: String, resolved: Option<i64> },
}

impl CharacterDesc {
    /// Value at an unramified slot, when it can be evaluated.
    pub fn evaluate(&self, slot: &PrimeSlot) -> Option<i8> {
        match self {
            CharacterDesc::Trivial => Some(1),
            CharacterDesc::Kronecker(d) => Some(kronecker(*d, slot.norm)),
            CharacterDesc::SignOfAction { resolved: Some(d), .. } => Some(kronecker(*d, slot.norm)),
            _ => None,
        }
    }
}

impl fmt::Display for CharacterDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterDesc::Trivial => write!(f, "trivial"),
            CharacterDesc::Kronecker(d) => write!(f, "({}/.)", d),
            CharacterDesc::QuadraticSubfield(s) => write!(f, "quadratic subfield of {}", s),
            CharacterDesc::SignOfAction { group, resolved: None } => {
                write!(f, "sign of action of {}", group)
            }
            CharacterDesc::SignOfAction { group, resolved: Some(d) } => {
                write!(f, "sign of action of {} = ({}/N.)", group, d)
            }
        }
    }
}

/// Predicted det∘ϱ on the transcendental part for a CM endomorphism field.
pub fn jump_character_predict(e: &EndoFieldDesc, rho: u32) -> Result<CharacterDesc> {
    if let EndoKind::RmRealQuadratic { .. } = e.kind {
        return Err(Error::NotCm(e.name.clone()));
    }
    let r = 22u32
        .checked_sub(rho)
        .ok_or_else(|| Error::Invalid(format!("Picard rank {} exceeds 22", rho)))?;
    if e.degree == 0 || r % e.degree != 0 {
        return Err(Error::Invalid(format!(
            "[E:Q] = {} does not divide 22 - rho = {}",
            e.degree, r
        )));
    }
    if (r / e.degree) % 2 == 0 {
        return Ok(CharacterDesc::Trivial);
    }
    Ok(match &e.kind {
        EndoKind::CmImagQuadratic { delta } => CharacterDesc::Kronecker(-delta),
        EndoKind::CmCyclic {
            quadratic_subfield,
            subfield_disc,
        } => match subfield_disc {
            Some(d) => CharacterDesc::Kronecker(*d),
            None => CharacterDesc::QuadraticSubfield(quadratic_subfield.clone()),
        },
        EndoKind::CmGeneral { sign_resolved } => {
            let group = group_closure(&e.galois_action);
            if group.iter().all(|g| g.sgn_2d() == 1) {
                CharacterDesc::Trivial
            } else {
                CharacterDesc::SignOfAction {
                    group: format!("order-{} subgroup of (Z/2)^{} x S_{}", group.len(), e.d(), e.d()),
                    resolved: *sign_resolved,
                }
            }
        }
        EndoKind::RmRealQuadratic { .. } => unreachable!(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderFlag {
    Exact,
    LowerBoundDivisor,
}

impl fmt::Display for OrderFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderFlag::Exact => "exact",
            OrderFlag::LowerBoundDivisor => "lower-bound-divisor",
        })
    }
}

/// |G/G⁰| = [kE:k] for CM fields; otherwise only known to be a multiple.
pub fn component_group_order(e: &EndoFieldDesc, ke_over_k: u32) -> (u32, OrderFlag) {
    match e.kind {
        EndoKind::RmRealQuadratic { .. } => (ke_over_k, OrderFlag::LowerBoundDivisor),
        _ => (ke_over_k, OrderFlag::Exact),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(pi: &[usize], a: &[u8]) -> SignedPermutation {
        SignedPermutation::new(pi.to_vec(), a.to_vec()).unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sp(&[0], &[1]).sgn_2d(), -1);
        assert_eq!(sp(&[1, 0], &[0, 0]).sgn_2d(), 1);
    }

    #[test]
    fn block_matrix_examples() {
        let id = block_matrix(&SignedPermutation::identity(3), 1);
        let i6: IntMatrix = (0..6).map(|i| (0..6).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(id, i6);
        assert_eq!(block_matrix(&sp(&[0], &[1]), 1), vec![vec![0, 1], vec![1, 0]]);
        let m = block_matrix(&sp(&[1, 0], &[1, 0]), 2);
        assert_eq!(m.len(), 8);
        // v_{0,j} goes to v*_{1,j}
        assert_eq!(m[6][0], 1);
        assert_eq!(m[7][1], 1);
        // v_{1,j} goes to v_{0,j}
        assert_eq!(m[0][4], 1);
        let gram = BlockGram { d: 2, b: 2 }.matrix();
        assert_eq!(mat_mul_int(&transpose(&m), &mat_mul_int(&gram, &m)), gram);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_exact_int(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        let half = BigRational::new(1.into(), 2.into());
        let m = vec![vec![half.clone(), BigRational::one()], vec![BigRational::zero(), half]];
        assert_eq!(det_exact(&m), BigRational::new(1.into(), 4.into()));
        assert_eq!(det_exact_int(&[vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn gram_determinant() {
        for d in 1..=3 {
            for b in 1..=3 {
                let det = det_exact_int(&BlockGram { d, b }.matrix());
                let expect = if (d * b) % 2 == 0 { 1 } else { -1 };
                assert_eq!(det, BigInt::from(expect));
            }
        }
    }

    #[test]
    fn normalizer_examples() {
        let r = verify_normalizer_det(1, 3);
        assert_eq!((r.checked, r.passed()), (2, true));
        assert_eq!(det_exact_int(&block_matrix(&sp(&[0], &[1]), 3)), BigInt::from(-1));
        assert_eq!(verify_normalizer_det(2, 1).checked, 8);
        let r = verify_normalizer_det(3, 2);
        assert_eq!((r.checked, r.passed()), (48, true));
    }

    #[test]
    fn centralizer_examples() {
        let two = vec![vec![BigRational::from_integer(2.into())]];
        let m = centralizer_element(&[two]).unwrap();
        assert_eq!(m[1][1], BigRational::new(1.into(), 2.into()));
        let gram = to_rational(&BlockGram { d: 1, b: 1 }.matrix());
        assert!(is_gram_orthogonal(&m, &gram));
        assert!(verify_centralizer(2, 2, 5, 1).ok());
    }

    #[test]
    fn closure_orders() {
        assert_eq!(group_closure(&[sp(&[1, 0], &[0, 1])]).len(), 4);
        assert_eq!(group_closure(&[sp(&[1, 2, 0], &[1, 1, 1])]).len(), 6);
        assert_eq!(SignedPermutation::all(3).len(), 48);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = to_rational(&vec![vec![2, 1], vec![7, 4]]);
        let inv = mat_inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), to_rational(&vec![vec![1, 0], vec![0, 1]]));
        assert!(mat_inverse(&to_rational(&vec![vec![1, 2], vec![2, 4]])).is_none());
    }
}
