//! Normalised Frobenius traces on the transcendental lattice and the
//! resumable, parallel survey over prime slots.

pub mod cache;
pub mod checks;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use log::{debug, info};
use num_integer::Integer;
use rayon::prelude::*;

use crate::counting::{self, ap_elliptic_in, count_hyperelliptic_odd};
use crate::error::{Error, Result};
use crate::ffield::{ext_field_build, prime_sieve, PrimeField};
use crate::models::{self, catalog, AlgTraceModel, EndoKind, Model, SurfaceSpec};
use crate::numfield::{factor_prime, kronecker, splits_in_gaussian_ext, PrimeSlot};

/// Identity of a slot inside a survey; ordered by (norm, p, index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlotKey {
    pub p: u64,
    pub f: u32,
    pub index: usize,
    pub norm: u64,
}

impl SlotKey {
    pub fn of(slot: &PrimeSlot) -> Self {
        SlotKey {
            p: slot.p,
            f: slot.f,
            index: slot.index,
            norm: slot.norm,
        }
    }

    fn order_key(&self) -> (u64, u64, usize) {
        (self.norm, self.p, self.index)
    }
}

impl PartialOrd for SlotKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SlotKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

/// One slot's trace τ = num/den, reduced, with classification tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub surface: String,
    pub slot: SlotKey,
    pub tags: BTreeSet<String>,
    pub num: i64,
    pub den: i64,
}

impl TraceRecord {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.iter().find_map(|t| {
            let (k, v) = t.split_once('=')?;
            (k == key).then_some(v)
        })
    }

    pub fn tags_joined(&self) -> String {
        self.tags.iter().cloned().collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} p={} f={} idx={} N={} trace={}/{} [{}]",
            self.surface,
            self.slot.p,
            self.slot.f,
            self.slot.index,
            self.slot.norm,
            self.num,
            self.den,
            self.tags_joined()
        )
    }
}

/// Reduced fraction with positive denominator.
pub fn reduce_fraction(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den).max(1);
    let s = if den < 0 { -1 } else { 1 };
    (s * num / g, s * den / g)
}

/// e_2 of Frobenius on H^1 of a genus-2 curve from #C(F_p) and #C(F_{p^2}).
pub fn e2_from_counts(n1: u64, n2: u64, p: u64) -> Result<i64> {
    let s1 = p as i64 + 1 - n1 as i64;
    let s2 = (p * p) as i64 + 1 - n2 as i64;
    let d = s1 * s1 - s2;
    if d % 2 != 0 {
        return Err(Error::Parity);
    }
    Ok(d / 2)
}

/// Trace of Frobenius on Pic(X)(1) for a double cover, given fixed nodes.
fn algebraic_trace(model: AlgTraceModel, fixed_nodes: u32) -> Option<i64> {
    match model {
        AlgTraceModel::RationalNodes16 => Some(16),
        AlgTraceModel::PermutedNodes16 => Some(1 + fixed_nodes as i64),
        AlgTraceModel::Experimental { extra } => Some(1 + fixed_nodes as i64 + extra as i64),
        AlgTraceModel::NotApplicable => None,
    }
}

fn tag(k: &str, v: impl fmt::Display) -> String {
    format!("{}={}", k, v)
}

fn split_word(c: i8) -> &'static str {
    if c == 1 {
        "split"
    } else {
        "inert"
    }
}

/// Classification tags for a slot of a catalog surface.
pub fn tags_for(spec: &SurfaceSpec, slot: &PrimeSlot) -> BTreeSet<String> {
    let p = slot.p;
    let mut t = BTreeSet::new();
    match spec.name.as_str() {
        "X1" => {
            t.insert(tag("mod4", p % 4));
            t.insert(tag("gauss", splits_in_gaussian_ext(slot)));
        }
        "X2" => {
            t.insert(tag("mod5", p % 5));
        }
        "X3" => {
            t.insert(tag("mod8", p % 8));
        }
        "X4" => {
            t.insert(tag("mod4", p % 4));
            t.insert(tag("mod9", p % 9));
            t.insert(tag("e", split_word(if matches!(p % 36, 1 | 17) { 1 } else { -1 })));
        }
        "X5" => {
            t.insert(tag("deg", slot.f));
            t.insert(tag("mod4", slot.norm % 4));
            t.insert(tag("gauss", splits_in_gaussian_ext(slot)));
        }
        _ => {
            t.insert(tag("mod12", p % 12));
            if let Model::Twist { d, .. } = spec.model {
                t.insert(tag("kron", kronecker(d, p)));
            }
        }
    }
    if matches!(spec.alg_trace_model, AlgTraceModel::Experimental { .. }) {
        t.insert("uncalibrated".to_string());
    }
    t
}

fn record(spec: &SurfaceSpec, slot: &PrimeSlot, num: i64, den: i64) -> TraceRecord {
    let (num, den) = reduce_fraction(num, den);
    TraceRecord {
        surface: spec.name.clone(),
        slot: SlotKey::of(slot),
        tags: tags_for(spec, slot),
        num,
        den,
    }
}

/// τ·q as an integer together with q, before reduction.
fn trace_parts(spec: &SurfaceSpec, slot: &PrimeSlot) -> Result<(i64, i64)> {
    if !models::good_prime(spec, slot) {
        return Err(Error::BadPrime(slot.p));
    }
    let p = slot.p;
    let cat = catalog();
    match &spec.model {
        Model::KummerProduct { e1, e2 } => {
            let k = PrimeField::new(p)?;
            let a1 = ap_elliptic_in(&cat.curve(e1)?.rhs, &k)?;
            let a2 = ap_elliptic_in(&cat.curve(e2)?.rhs, &k)?;
            Ok((a1 * a2, p as i64))
        }
        Model::KummerJacobian { curve } => {
            let g = &cat.curve(curve)?.rhs;
            let n1 = count_hyperelliptic_odd(g, &PrimeField::new(p)?)?;
            let n2 = count_hyperelliptic_odd(g, &ext_field_build(p, 2)?)?;
            let e2 = e2_from_counts(n1, n2, p)?;
            // NS of the Jacobian: the polarisation and a class defined over
            // the real quadratic subfield of E.
            let d = match spec.endo.kind {
                EndoKind::CmCyclic {
                    subfield_disc: Some(d),
                    ..
                } => d,
                _ => return Err(Error::Invalid(format!("{}: NS character unknown", spec.name))),
            };
            let ns = p as i64 * (1 + kronecker(d, p) as i64);
            Ok((e2 - ns, p as i64))
        }
        Model::DoubleCover { .. } => {
            let q = slot.norm as i64;
            let n = counting::count_resolved(spec, slot)? as i64;
            let fixed = counting::fixed_nodes(spec, slot)?;
            let alg = algebraic_trace(spec.alg_trace_model, fixed)
                .ok_or_else(|| Error::Invalid(format!("{}: no algebraic trace model", spec.name)))?;
            Ok((n - 1 - q * q - q * alg, q))
        }
        Model::Twist { base, d, .. } => {
            let (num, den) = trace_parts(cat.surface(base)?, slot)?;
            Ok((kronecker(*d, p) as i64 * num, den))
        }
    }
}

/// Normalised transcendental trace at a good slot.
pub fn trace_transcendental(spec: &SurfaceSpec, slot: &PrimeSlot) -> Result<TraceRecord> {
    let (num, den) = trace_parts(spec, slot)?;
    Ok(record(spec, slot, num, den))
}

/// Good slots of norm at most `norm_bound`, ascending; bad or ramified slots
/// are logged and left out.
pub fn good_slots(spec: &SurfaceSpec, norm_bound: u64) -> Vec<PrimeSlot> {
    let mut out = Vec::new();
    for p in prime_sieve(norm_bound) {
        let slots = match factor_prime(&spec.base_field, p) {
            Ok(s) => s,
            Err(e) => {
                debug!("{}: skipping p={}: {}", spec.name, p, e);
                continue;
            }
        };
        for s in slots {
            if s.norm > norm_bound {
                continue;
            }
            if models::good_prime(spec, &s) {
                out.push(s);
            } else {
                debug!("{}: skipping bad slot p={} f={} index={}", spec.name, s.p, s.f, s.index);
            }
        }
    }
    out.sort_by_key(|s| s.key());
    out
}

/// Result of a survey run.
#[derive(Clone, Debug)]
pub struct SurveyOutcome {
    /// Every record with norm <= the bound, ascending.
    pub records: Vec<TraceRecord>,
    /// Records computed in this run.
    pub new_records: usize,
}

/// Computes records for `slots` using `workers` threads, in input order.
pub fn compute_records(spec: &SurfaceSpec, slots: &[PrimeSlot], workers: usize) -> Result<Vec<TraceRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {}", e)))?;
    pool.install(|| slots.par_iter().map(|s| trace_transcendental(spec, s)).collect())
}

/// Survey of all good slots of norm <= `norm_bound`. With a cache path, an
/// existing cache is validated and extended; only slots beyond its last key
/// are computed.
pub fn survey(spec: &SurfaceSpec, norm_bound: u64, workers: usize, cache_path: Option<&Path>) -> Result<SurveyOutcome> {
    if norm_bound < 3 {
        return Err(Error::Invalid(format!("norm bound {} < 3", norm_bound)));
    }
    let slots = good_slots(spec, norm_bound);
    let Some(path) = cache_path else {
        let records = compute_records(spec, &slots, workers)?;
        let n = records.len();
        return Ok(SurveyOutcome {
            records,
            new_records: n,
        });
    };
    let mut writer = cache::CacheWriter::open(path, &spec.name)?;
    let last = writer.last_key();
    let todo: Vec<PrimeSlot> = slots
        .into_iter()
        .filter(|s| last.map_or(true, |l| SlotKey::of(s) > l))
        .collect();
    info!("{}: {} cached records, {} new slots", spec.name, writer.records().len(), todo.len());
    let batch = (workers.max(1) * 8).max(16);
    let mut new_records = 0;
    for chunk in todo.chunks(batch) {
        let recs = compute_records(spec, chunk, workers)?;
        writer.append(&recs)?;
        new_records += recs.len();
    }
    let records = writer
        .into_records()
        .into_iter()
        .filter(|r| r.slot.norm <= norm_bound)
        .collect();
    Ok(SurveyOutcome { records, new_records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e2_examples() {
        assert_eq!(e2_from_counts(8, 50, 7).unwrap(), 0);
        assert!(matches!(e2_from_counts(8, 51, 7), Err(Error::Parity)));
    }

    #[test]
    fn fraction_reduction() {
        assert_eq!(reduce_fraction(0, 7), (0, 1));
        assert_eq!(reduce_fraction(-14, 7), (-2, 1));
        assert_eq!(reduce_fraction(3, -9), (-1, 3));
    }

    #[test]
    fn slot_order() {
        let a = SlotKey { p: 29, f: 1, index: 0, norm: 29 };
        let b = SlotKey { p: 5, f: 3, index: 0, norm: 125 };
        assert!(a < b);
    }
}
