//! The surface and curve catalog, bad-prime detection and node censuses.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ffield::{poly, ExtField, FieldElem, FiniteField};
use crate::monodromy::SignedPermutation;
use crate::numfield::{format_poly, residue_reduce, IntPoly, NfElem, NumberFieldDesc, PrimeSlot};

/// Exponents of x, y, z.
pub type Monomial = [u32; 3];

/// Homogeneous form in x, y, z over the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub terms: Vec<(NfElem, Monomial)>,
}

impl Form {
    pub fn linear(a: NfElem, b: NfElem, c: NfElem) -> Self {
        let terms = [(a, [1, 0, 0]), (b, [0, 1, 0]), (c, [0, 0, 1])]
            .into_iter()
            .filter(|(c, _)| !c.is_zero())
            .collect();
        Form { terms }
    }

    pub fn linear_int(a: i64, b: i64, c: i64) -> Self {
        Form::linear(NfElem::int(a), NfElem::int(b), NfElem::int(c))
    }

    pub fn from_int_terms(terms: &[(i64, Monomial)]) -> Self {
        Form {
            terms: terms.iter().map(|&(c, m)| (NfElem::int(c), m)).collect(),
        }
    }

    /// Total degree if every term has the same degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.iter().map(|(_, m)| m.iter().sum::<u32>());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Coefficients (a, b, c) when the form is linear.
    pub fn linear_coeffs(&self) -> Option<[NfElem; 3]> {
        if self.homogeneous_degree()? != 1 {
            return None;
        }
        let mut out = [NfElem::int(0), NfElem::int(0), NfElem::int(0)];
        for (c, m) in &self.terms {
            let i = m.iter().position(|&e| e == 1)?;
            out[i] = c.clone();
        }
        Some(out)
    }

    pub fn denominators(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.iter().map(|(c, _)| c.den())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, m) in &self.terms {
            let mono: String = ["x", "y", "z"]
                .iter()
                .zip(m)
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { v.to_string() } else { format!("{}^{}", v, e) })
                .collect();
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if c.is_rational() => (true, rest.to_string()),
                _ => (false, cs),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if body == "1" && !mono.is_empty() {
                f.write_str(&mono)?;
            } else if !c.is_rational() {
                write!(f, "{}*{}", body, mono)?;
            } else {
                write!(f, "{}{}", body, mono)?;
            }
        }
        Ok(())
    }
}

/// constant · Π factors, a homogeneous sextic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sextic {
    pub constant: NfElem,
    pub factors: Vec<Form>,
}

impl Sextic {
    pub fn degree(&self) -> Option<u32> {
        self.factors
            .iter()
            .map(|f| f.homogeneous_degree())
            .sum::<Option<u32>>()
    }

    pub fn is_homogeneous_sextic(&self) -> bool {
        self.degree() == Some(6)
    }

    pub fn scaled(&self, d: i64) -> Sextic {
        let c = &self.constant;
        let num = c.num().iter().map(|&a| a * d).collect();
        Sextic {
            constant: NfElem::new(num, c.den()),
            factors: self.factors.clone(),
        }
    }

    /// Every factor is linear.
    pub fn is_line_arrangement(&self) -> bool {
        self.factors.iter().all(|f| f.homogeneous_degree() == Some(1))
    }

    /// Expanded coefficients, when all coefficients are rational.
    pub fn expand_rational(&self) -> Option<BTreeMap<Monomial, BigRational>> {
        let to_q = |e: &NfElem| -> Option<BigRational> {
            e.is_rational().then(|| {
                BigRational::new(
                    BigInt::from(e.num().first().copied().unwrap_or(0)),
                    BigInt::from(e.den()),
                )
            })
        };
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        acc.insert([0, 0, 0], to_q(&self.constant)?);
        for form in &self.factors {
            let mut next: BTreeMap<Monomial, BigRational> = BTreeMap::new();
            for (m1, c1) in &acc {
                for (c2, m2) in &form.terms {
                    let m = [m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]];
                    *next.entry(m).or_insert_with(BigRational::zero) += c1 * to_q(c2)?;
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        Some(acc)
    }
}

impl fmt::Display for Sextic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.constant.to_string();
        if c != "1" {
            write!(f, "{}", c)?;
            if !self.factors.is_empty() {
                f.write_str(" ")?;
            }
        }
        for form in &self.factors {
            if form.terms.len() == 1 {
                write!(f, "{}", form)?;
            } else {
                write!(f, "({})", form)?;
            }
        }
        Ok(())
    }
}

/// Form reduced into a residue field.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    pub terms: Vec<(FieldElem, Monomial)>,
}

#[derive(Clone, Debug)]
pub struct ReducedSextic {
    pub constant: FieldElem,
    pub factors: Vec<ReducedForm>,
}

impl Sextic {
    pub fn reduce(&self, slot: &PrimeSlot) -> Result<ReducedSextic> {
        let constant = residue_reduce(&self.constant, slot)?;
        let factors = self
            .factors
            .iter()
            .map(|form| {
                Ok(ReducedForm {
                    terms: form
                        .terms
                        .iter()
                        .map(|(c, m)| Ok((residue_reduce(c, slot)?, *m)))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ReducedSextic { constant, factors })
    }
}

/// Fixed-point data for the 15 nodes of a branch sextic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCensus {
    pub rational_node_count: u32,
    /// Squarefree integer polynomials; each root mod p is one Frobenius-fixed
    /// non-rational node.
    pub eliminants: Vec<IntPoly>,
}

impl NodeCensus {
    pub fn total_nodes(&self) -> u32 {
        self.rational_node_count + self.eliminants.iter().map(|e| (e.len() - 1) as u32).sum::<u32>()
    }

    /// Nodes fixed by Frobenius at a slot of degree one over Q.
    pub fn fixed_nodes(&self, p: u64) -> u32 {
        self.rational_node_count
            + self
                .eliminants
                .iter()
                .map(|e| poly::count_roots(&poly::reduce(e, p), p) as u32)
                .sum::<u32>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    DoubleCover,
    KummerProduct,
    KummerJacobian,
    Twist,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::DoubleCover => "double-cover",
            SurfaceKind::KummerProduct => "kummer-product",
            SurfaceKind::KummerJacobian => "kummer-jacobian",
            SurfaceKind::Twist => "twist",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    DoubleCover { sextic: Sextic },
    KummerProduct { e1: String, e2: String },
    KummerJacobian { curve: String },
    /// Quadratic twist of `base` by `d`; `sextic` is the twisted branch sextic.
    Twist { base: String, d: i64, sextic: Sextic },
}

/// How the trace of Frobenius on Pic is obtained for a double cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgTraceModel {
    /// Hyperplane plus 15 rational exceptional curves: trace 16.
    RationalNodes16,
    /// Hyperplane plus 15 exceptional curves permuted by Frobenius:
    /// trace 1 + (number of fixed nodes).
    PermutedNodes16,
    /// Hyperplane, fixed exceptional curves, and `extra` further classes
    /// assumed Frobenius-fixed. Not calibrated.
    Experimental { extra: u32 },
    NotApplicable,
}

impl fmt::Display for AlgTraceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgTraceModel::RationalNodes16 => write!(f, "rational-nodes-16"),
            AlgTraceModel::PermutedNodes16 => write!(f, "permuted-nodes-16"),
            AlgTraceModel::Experimental { extra } => write!(f, "experimental(+{})", extra),
            AlgTraceModel::NotApplicable => write!(f, "n/a"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndoKind {
    /// Q(√-δ)
    CmImagQuadratic { delta: i64 },
    /// Cyclic CM field; `subfield_disc` resolves its quadratic subfield.
    CmCyclic {
        quadratic_subfield: String,
        subfield_disc: Option<i64>,
    },
    /// Any other CM field; the sign of the action, if it is a known
    /// quadratic character (D/N𝔭), is recorded as D.
    CmGeneral { sign_resolved: Option<i64> },
    RmRealQuadratic { d: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoFieldDesc {
    pub name: String,
    /// [E:Q]
    pub degree: u32,
    pub kind: EndoKind,
    /// Generators of the Galois action on the 2d embeddings (CM only).
    pub galois_action: Vec<SignedPermutation>,
    /// E/Q is Galois.
    pub normal: bool,
    pub conjectural: bool,
}

impl EndoFieldDesc {
    /// Number of conjugate pairs.
    pub fn d(&self) -> usize {
        self.galois_action
            .first()
            .map(|g| g.d())
            .unwrap_or((self.degree / 2).max(1) as usize)
    }

    pub fn is_cm(&self) -> bool {
        !matches!(self.kind, EndoKind::RmRealQuadratic { .. })
    }
}

impl fmt::Display for EndoFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.is_cm() { "CM" } else { "RM" };
        write!(f, "{} ({})", self.name, tag)?;
        if self.conjectural {
            f.write_str(" conjectural")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub name: String,
    pub kind: SurfaceKind,
    pub base_field: NumberFieldDesc,
    pub model: Model,
    pub picard_rank: u32,
    pub endo: EndoFieldDesc,
    pub alg_trace_model: AlgTraceModel,
    /// [kE:k]
    pub ke_over_k: u32,
    /// Stored census for branch curves that are not rational line arrangements.
    pub stored_census: Option<NodeCensus>,
    /// Primes at which the branch configuration degenerates, when not
    /// derived from line determinants.
    pub degeneracy_primes: Vec<u64>,
}

impl SurfaceSpec {
    pub fn transcendental_dim(&self) -> u32 {
        22 - self.picard_rank
    }

    /// Branch sextic of a double cover or twist.
    pub fn sextic(&self) -> Option<&Sextic> {
        match &self.model {
            Model::DoubleCover { sextic } | Model::Twist { sextic, .. } => Some(sextic),
            _ => None,
        }
    }

    pub fn equation(&self) -> String {
        match &self.model {
            Model::DoubleCover { sextic } | Model::Twist { sextic, .. } => format!("w^2 = {}", sextic),
            Model::KummerProduct { e1, e2 } => format!("Km({} x {})", e1, e2),
            Model::KummerJacobian { curve } => format!("Km(J({}))", curve),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Elliptic,
    Hyperelliptic,
}

/// y^2 = rhs(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub name: String,
    pub kind: CurveKind,
    pub rhs: IntPoly,
    pub genus: u32,
}

impl CurveSpec {
    pub fn equation(&self) -> String {
        format!("y^2 = {}", format_poly(&self.rhs, "x"))
    }

    /// Good reduction: p odd and rhs squarefree of unchanged degree mod p.
    pub fn good_prime(&self, p: u64) -> bool {
        if p == 2 {
            return false;
        }
        let r = poly::reduce(&self.rhs, p);
        r.len() == self.rhs.len() && poly::is_squarefree(&r, p)
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub surfaces: Vec<SurfaceSpec>,
    pub curves: Vec<CurveSpec>,
}

impl Catalog {
    pub fn surface(&self, name: &str) -> Result<&SurfaceSpec> {
        self.surfaces
            .iter()
            .find(|s| s.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownEntry(name.to_string()))
    }

    pub fn curve(&self, name: &str) -> Result<&CurveSpec> {
        self.curves
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownEntry(name.to_string()))
    }
}

fn nf(num: &[i64], den: i64) -> NfElem {
    NfElem::new(num.to_vec(), den)
}

fn sp(pi: &[usize], a: &[u8]) -> SignedPermutation {
    SignedPermutation::new(pi.to_vec(), a.to_vec()).expect("catalog permutations are valid")
}

fn xyz_times(cubic: Form) -> Vec<Form> {
    vec![
        Form::linear_int(1, 0, 0),
        Form::linear_int(0, 1, 0),
        Form::linear_int(0, 0, 1),
        cubic,
    ]
}

fn cubic_x4() -> Form {
    // x^3 - 3x^2z - 3xy^2 - 3xyz + y^3 + 9y^2z + 6yz^2 + z^3
    Form::from_int_terms(&[
        (1, [3, 0, 0]),
        (-3, [2, 0, 1]),
        (-3, [1, 2, 0]),
        (-3, [1, 1, 1]),
        (1, [0, 3, 0]),
        (9, [0, 2, 1]),
        (6, [0, 1, 2]),
        (1, [0, 0, 3]),
    ])
}

fn cubic_x6() -> Form {
    // x^3 - 14x^2z + 11xy^2 - xz^2 + 12y^3 - 14y^2z - 12yz^2 + 14z^3
    Form::from_int_terms(&[
        (1, [3, 0, 0]),
        (-14, [2, 0, 1]),
        (11, [1, 2, 0]),
        (-1, [1, 0, 2]),
        (12, [0, 3, 0]),
        (-14, [0, 2, 1]),
        (-12, [0, 1, 2]),
        (14, [0, 0, 3]),
    ])
}

/// The fixed catalog.
pub fn catalog() -> Catalog {
    let q = NumberFieldDesc::rationals();
    let k5 = NumberFieldDesc::new(vec![1, -4, -1, 1]).expect("cubic is irreducible");

    let x1 = SurfaceSpec {
        name: "X1".into(),
        kind: SurfaceKind::DoubleCover,
        base_field: q.clone(),
        model: Model::DoubleCover {
            sextic: Sextic {
                constant: NfElem::int(1),
                factors: vec![
                    Form::linear_int(1, 0, 0),
                    Form::linear_int(0, 1, 0),
                    Form::linear_int(0, 0, 1),
                    Form::linear_int(1, 1, 1),
                    Form::linear_int(1, 2, 3),
                    Form::linear_int(5, 8, 20),
                ],
            },
        },
        picard_rank: 16,
        endo: EndoFieldDesc {
            name: "Q(i)".into(),
            degree: 2,
            kind: EndoKind::CmImagQuadratic { delta: 1 },
            galois_action: vec![sp(&[0], &[1])],
            normal: true,
            conjectural: false,
        },
        alg_trace_model: AlgTraceModel::RationalNodes16,
        ke_over_k: 2,
        stored_census: None,
        degeneracy_primes: Vec::new(),
    };

    let x2 = SurfaceSpec {
        name: "X2".into(),
        kind: SurfaceKind::KummerJacobian,
        base_field: q.clone(),
        model: Model::KummerJacobian { curve: "C".into() },
        picard_rank: 18,
        endo: EndoFieldDesc {
            name: "Q(zeta5)".into(),
            degree: 4,
            kind: EndoKind::CmCyclic {
                quadratic_subfield: "Q(sqrt5)".into(),
                subfield_disc: Some(5),
            },
            galois_action: vec![sp(&[1, 0], &[0, 1])],
            normal: true,
            conjectural: false,
        },
        alg_trace_model: AlgTraceModel::NotApplicable,
        ke_over_k: 4,
        stored_census: None,
        degeneracy_primes: Vec::new(),
    };

    let x3 = SurfaceSpec {
        name: "X3".into(),
        kind: SurfaceKind::KummerProduct,
        base_field: q.clone(),
        model: Model::KummerProduct {
            e1: "E1".into(),
            e2: "E2".into(),
        },
        picard_rank: 18,
        endo: EndoFieldDesc {
            name: "Q(sqrt2,i)".into(),
            degree: 4,
            kind: EndoKind::CmGeneral { sign_resolved: None },
            galois_action: vec![sp(&[1, 0], &[1, 1]), sp(&[1, 0], &[0, 0])],
            normal: true,
            conjectural: false,
        },
        alg_trace_model: AlgTraceModel::NotApplicable,
        ke_over_k: 4,
        stored_census: None,
        degeneracy_primes: Vec::new(),
    };

    let x4 = SurfaceSpec {
        name: "X4".into(),
        kind: SurfaceKind::DoubleCover,
        base_field: q.clone(),
        model: Model::DoubleCover {
            sextic: Sextic {
                constant: NfElem::int(1),
                factors: xyz_times(cubic_x4()),
            },
        },
        picard_rank: 16,
        endo: EndoFieldDesc {
            name: "Q(zeta9+zeta9^-1,i)".into(),
            degree: 6,
            kind: EndoKind::CmCyclic {
                quadratic_subfield: "Q(i)".into(),
                subfield_disc: Some(-1),
            },
            galois_action: vec![sp(&[1, 2, 0], &[1, 1, 1])],
            normal: true,
            conjectural: true,
        },
        alg_trace_model: AlgTraceModel::PermutedNodes16,
        ke_over_k: 6,
        // The cubic splits into three lines conjugate over Q(θ), θ^3 - 3θ + 1 = 0.
        // Nodes: three coordinate vertices, three on each coordinate line, and
        // the three vertices of the conjugate triangle.
        stored_census: Some(NodeCensus {
            rational_node_count: 3,
            eliminants: vec![
                vec![1, 6, 9, 1],   // on x = 0, s = y/z
                vec![1, 0, -3, 1],  // on y = 0, s = x/z
                vec![1, -3, 0, 1],  // on z = 0, s = x/y
                vec![-1, -3, 0, 1], // triangle vertices, y-coordinate at z = 1
            ],
        }),
        degeneracy_primes: vec![2, 3],
    };

    let a = nf(&[16, -23, -26], 9);
    let b = nf(&[95, 125, -61], 121);
    let c = nf(&[11, -4, -1], 9);
    let d = nf(&[149, 5, -46], 121);
    let x5 = SurfaceSpec {
        name: "X5".into(),
        kind: SurfaceKind::DoubleCover,
        base_field: k5,
        model: Model::DoubleCover {
            sextic: Sextic {
                constant: NfElem::int(1),
                factors: vec![
                    Form::linear_int(1, 0, 0),
                    Form::linear_int(0, 1, 0),
                    Form::linear_int(0, 0, 1),
                    Form::linear_int(1, 1, 1),
                    Form::linear(NfElem::int(1), a, b),
                    Form::linear(NfElem::int(1), c, d),
                ],
            },
        },
        picard_rank: 16,
        endo: EndoFieldDesc {
            name: "k(i)".into(),
            degree: 6,
            kind: EndoKind::CmGeneral {
                sign_resolved: Some(-1),
            },
            // S_3 on the three real embeddings of k, times complex conjugation
            galois_action: vec![sp(&[1, 0, 2], &[0, 0, 0]), sp(&[1, 2, 0], &[0, 0, 0]), sp(&[0, 1, 2], &[1, 1, 1])],
            normal: false,
            conjectural: true,
        },
        alg_trace_model: AlgTraceModel::RationalNodes16,
        ke_over_k: 2,
        stored_census: None,
        degeneracy_primes: Vec::new(),
    };

    let x6t_sextic = Sextic {
        constant: NfElem::int(1),
        factors: xyz_times(cubic_x6()),
    };
    let rm = EndoFieldDesc {
        name: "Q(sqrt3)".into(),
        degree: 2,
        kind: EndoKind::RmRealQuadratic { d: 3 },
        galois_action: Vec::new(),
        normal: true,
        conjectural: true,
    };
    // Ten rational nodes: three coordinate vertices, three on x = 0, three on
    // y = 0, one on z = 0; the remaining two lie on z = 0 at s^2 - s + 12 = 0.
    let x6_census = NodeCensus {
        rational_node_count: 10,
        eliminants: vec![vec![12, -1, 1]],
    };
    let x6_bad = vec![2, 3, 5, 7, 11, 13, 17, 47];
    let x6t = SurfaceSpec {
        name: "X6t".into(),
        kind: SurfaceKind::DoubleCover,
        base_field: q.clone(),
        model: Model::DoubleCover {
            sextic: x6t_sextic.clone(),
        },
        picard_rank: 16,
        endo: rm.clone(),
        alg_trace_model: AlgTraceModel::Experimental { extra: 3 },
        ke_over_k: 2,
        stored_census: Some(x6_census.clone()),
        degeneracy_primes: x6_bad.clone(),
    };
    let x6 = SurfaceSpec {
        name: "X6".into(),
        kind: SurfaceKind::Twist,
        base_field: q,
        model: Model::Twist {
            base: "X6t".into(),
            d: -1974,
            sextic: x6t_sextic.scaled(-1974),
        },
        picard_rank: 16,
        endo: rm,
        alg_trace_model: AlgTraceModel::Experimental { extra: 3 },
        ke_over_k: 2,
        stored_census: Some(x6_census),
        degeneracy_primes: x6_bad,
    };

    let curves = vec![
        CurveSpec {
            name: "C".into(),
            kind: CurveKind::Hyperelliptic,
            rhs: vec![-1, 0, 0, 0, 0, 1],
            genus: 2,
        },
        CurveSpec {
            name: "E1".into(),
            kind: CurveKind::Elliptic,
            rhs: vec![0, 1, 0, 1],
            genus: 1,
        },
        CurveSpec {
            name: "E2".into(),
            kind: CurveKind::Elliptic,
            rhs: vec![0, 2, 4, 1],
            genus: 1,
        },
    ];

    Catalog {
        surfaces: vec![x1, x2, x3, x4, x5, x6, x6t],
        curves,
    }
}

fn det3<F: FiniteField>(k: &F, m: [[F::Elem; 3]; 3]) -> F::Elem {
    let t = |a, b| k.mul(a, b);
    let pos = k.add(
        k.add(t(m[0][0], t(m[1][1], m[2][2])), t(m[0][1], t(m[1][2], m[2][0]))),
        t(m[0][2], t(m[1][0], m[2][1])),
    );
    let neg = k.add(
        k.add(t(m[0][2], t(m[1][1], m[2][0])), t(m[0][0], t(m[1][2], m[2][1]))),
        t(m[0][1], t(m[1][0], m[2][2])),
    );
    k.sub(pos, neg)
}

/// Whether all triple determinants of a line arrangement are nonzero in the
/// residue field.
fn lines_in_general_position(sextic: &Sextic, slot: &PrimeSlot) -> Result<bool> {
    let k = ExtField::with_modulus(slot.p, &slot.factor)?;
    let lines: Vec<[FieldElem; 3]> = sextic
        .factors
        .iter()
        .map(|f| {
            let c = f.linear_coeffs().expect("line arrangement");
            Ok([
                residue_reduce(&c[0], slot)?,
                residue_reduce(&c[1], slot)?,
                residue_reduce(&c[2], slot)?,
            ])
        })
        .collect::<Result<_>>()?;
    let n = lines.len();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if det3(&k, [lines[i], lines[j], lines[l]]) == k.zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn curve_by_name<'a>(cat: &'a Catalog, name: &str) -> &'a CurveSpec {
    cat.curve(name).expect("catalog curve exists")
}

/// Good reduction of `spec` at `slot`, judged conservatively.
pub fn good_prime(spec: &SurfaceSpec, slot: &PrimeSlot) -> bool {
    let p = slot.p;
    if p == 2 {
        return false;
    }
    if spec.base_field.degree() > 1 && (spec.base_field.discriminant() % BigInt::from(p)).is_zero() {
        return false;
    }
    if spec.degeneracy_primes.contains(&p) {
        return false;
    }
    let cat;
    match &spec.model {
        Model::KummerProduct { e1, e2 } => {
            cat = catalog();
            curve_by_name(&cat, e1).good_prime(p) && curve_by_name(&cat, e2).good_prime(p)
        }
        Model::KummerJacobian { curve } => {
            cat = catalog();
            curve_by_name(&cat, curve).good_prime(p)
        }
        Model::DoubleCover { sextic } | Model::Twist { sextic, .. } => {
            let dens = std::iter::once(sextic.constant.den())
                .chain(sextic.factors.iter().flat_map(|f| f.denominators()));
            if dens.into_iter().any(|d| d.rem_euclid(p as i64) == 0) {
                return false;
            }
            match residue_reduce(&sextic.constant, slot) {
                Ok(c) if c != FieldElem::default() => {}
                _ => return false,
            }
            if sextic.is_line_arrangement() {
                lines_in_general_position(sextic, slot).unwrap_or(false)
            } else {
                true
            }
        }
    }
}

/// Node data for a double cover (or twist of one).
pub fn node_census(spec: &SurfaceSpec) -> Result<NodeCensus> {
    let sextic = spec
        .sextic()
        .ok_or_else(|| Error::NoNodeModel(spec.name.clone()))?;
    if sextic.is_line_arrangement() && sextic.factors.len() == 6 {
        return Ok(NodeCensus {
            rational_node_count: 15,
            eliminants: Vec::new(),
        });
    }
    spec.stored_census
        .clone()
        .ok_or_else(|| Error::NoNodeModel(spec.name.clone()))
}
