//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use k3lab::counting::{ap_elliptic, count_double_cover_raw, count_hyperelliptic_odd, count_resolved, raw_count};
use k3lab::ffield::{ext_field_build, poly, prime_sieve, PrimeField};
use k3lab::models::catalog;
use k3lab::monodromy::{component_group_order, det_exact, jump_character_predict, verify_normalizer_det, OrderFlag};
use k3lab::numfield::{kronecker, PrimeSlot};
use k3lab::stats::{density_mass, ks_distance, DensityModel};
use k3lab::traces::{survey, TraceRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn records(name: &str, bound: u64) -> Result<Vec<TraceRecord>, String> {
    let cat = catalog();
    let spec = cat.surface(name).map_err(|e| e.to_string())?;
    survey(spec, bound, workers(), None)
        .map(|o| o.records)
        .map_err(|e| e.to_string())
}

fn fail_list(bad: Vec<String>) -> Result<(), String> {
    if bad.is_empty() {
        Ok(())
    } else {
        Err(format!("{} violations, first: {}", bad.len(), bad[0]))
    }
}

fn nu(mut n: i64, p: i64) -> i64 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn c1(x3: &[TraceRecord]) -> Outcome {
    let mut checked = 0;
    let bad = x3
        .iter()
        .filter(|r| r.slot.p % 8 != 1)
        .inspect(|_| checked += 1)
        .filter(|r| !r.is_zero())
        .map(|r| r.to_string())
        .collect();
    fail_list(bad)?;
    Ok(format!("{} primes p <= 1e5 with p != 1 mod 8 have trace 0", checked))
}

fn c2(x2: &[TraceRecord]) -> Outcome {
    let mut bad = Vec::new();
    for r in x2 {
        let p = r.slot.p as i64;
        if p % 5 != 1 {
            if !r.is_zero() {
                bad.push(r.to_string());
            }
        } else if r.num.abs() > 4 * r.den || p % r.den != 0 {
            bad.push(r.to_string());
        }
    }
    fail_list(bad)?;
    Ok(format!("{} good primes p <= 3000", x2.len()))
}

fn c3() -> Outcome {
    let cat = catalog();
    let x1 = cat.surface("X1").map_err(|e| e.to_string())?;
    let mut n = 0;
    let mut bad = Vec::new();
    for p in prime_sieve(300) {
        let slot = PrimeSlot::rational(p);
        if !k3lab::models::good_prime(x1, &slot) {
            continue;
        }
        n += 1;
        let pi = p as i64;
        let resolved = count_resolved(x1, &slot).map_err(|e| e.to_string())? as i64;
        let raw = raw_count(x1, &slot).map_err(|e| e.to_string())? as i64;
        if resolved != raw + 15 * pi {
            bad.push(format!("p={}: resolved count is not raw + 15p", p));
        }
        // τ·p = N' - 1 - p² - 16p
        let tp = resolved - 1 - pi * pi - 16 * pi;
        if tp.abs() > 6 * pi {
            bad.push(format!("p={}: |tau| > 6", p));
        }
        if p % 4 == 3 && tp != 0 {
            bad.push(format!("p={}: tau*p = {} at an inert prime", p, tp));
        }
    }
    fail_list(bad)?;
    Ok(format!("{} good primes p <= 300", n))
}

fn c4() -> Outcome {
    let x5 = records("X5", 2000)?;
    let mut bad = Vec::new();
    let (mut split, mut inert) = (0, 0);
    for r in &x5 {
        let (p, f) = (r.slot.p as i64, r.slot.f as i64);
        if r.slot.norm % 4 == 3 {
            inert += 1;
            if !r.is_zero() {
                bad.push(r.to_string());
            }
        } else {
            split += 1;
            // Tr = τ·q
            let v = if r.is_zero() { i64::MAX } else { nu(r.num, p) - nu(r.den, p) + f };
            if v != f - 1 {
                bad.push(format!("{} (nu = {})", r, v));
            }
        }
    }
    fail_list(bad)?;
    Ok(format!("{} split slots with nu_p(Tr) = f - 1, {} inert slots with Tr = 0", split, inert))
}

fn c5() -> Outcome {
    let cat = catalog();
    let x6 = cat.surface("X6").map_err(|e| e.to_string())?;
    let base = cat.surface("X6t").map_err(|e| e.to_string())?;
    let mut n = 0;
    let mut bad = Vec::new();
    for p in prime_sieve(500) {
        let slot = PrimeSlot::rational(p);
        if !k3lab::models::good_prime(x6, &slot) {
            continue;
        }
        n += 1;
        let t = raw_count(x6, &slot).map_err(|e| e.to_string())?;
        let b = raw_count(base, &slot).map_err(|e| e.to_string())?;
        let expect = if kronecker(-1974, p) == 1 { b } else { 2 * (p * p + p + 1) - b };
        if t != expect {
            bad.push(format!("p={}: {} != {}", p, t, expect));
        }
    }
    fail_list(bad)?;
    Ok(format!("{} good primes p <= 500", n))
}

fn c6() -> Outcome {
    let mut checked = 0;
    for d in 1..=3 {
        for b in 1..=3 {
            let r = verify_normalizer_det(d, b);
            checked += r.checked;
            if !r.passed() {
                return Err(format!("d={} b={}: {}", d, b, r.violations[0]));
            }
        }
    }
    Ok(format!("{} signed permutations over d, b <= 3", checked))
}

fn c7() -> Outcome {
    let cat = catalog();
    let expect = [
        ("X1", Some("(-1/.)"), 2),
        ("X2", Some("(5/.)"), 4),
        ("X3", Some("trivial"), 4),
        ("X4", Some("(-1/.)"), 6),
        ("X5", None, 2),
    ];
    let mut got = Vec::new();
    for (name, chr, order) in expect {
        let s = cat.surface(name).map_err(|e| e.to_string())?;
        if let Some(chr) = chr {
            let c = jump_character_predict(&s.endo, s.picard_rank)
                .map_err(|e| e.to_string())?
                .to_string();
            if c != chr {
                return Err(format!("{}: character {} != {}", name, c, chr));
            }
        }
        let (o, flag) = component_group_order(&s.endo, s.ke_over_k);
        if o != order || flag != OrderFlag::Exact {
            return Err(format!("{}: order {} ({}) != {}", name, o, flag, order));
        }
        got.push(format!("{}:{}", name, o));
    }
    Ok(format!("characters match; orders {}", got.join(" ")))
}

fn c8() -> Outcome {
    let cm = density_mass(DensityModel::Cm4);
    let rm = density_mass(DensityModel::Rm);
    let detail = format!("CM4 {:.9}, RM {:.9}", cm, rm);
    if (cm - 0.25).abs() <= 1e-6 && (rm - 0.5).abs() <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c9(x3: &[TraceRecord], x2: &[TraceRecord]) -> Outcome {
    let d = ks_distance(x3, DensityModel::Cm4).map_err(|e| e.to_string())?;
    let nonzero = x3.iter().filter(|r| !r.is_zero()).count();
    let spike = x2.iter().filter(|r| r.is_zero()).count() as f64 / x2.len() as f64;
    let detail = format!("X3 KS {:.4} over {} samples; X2 spike {:.4}", d, nonzero, spike);
    if d <= 0.05 && (spike - 0.75).abs() <= 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut n_cover = 0;
    for (p, f) in odd_prime_powers(49) {
        let k = ext_field_build(p, f).map_err(|e| e.to_string())?;
        for shape in SEXTIC_SHAPES {
            let s = random_sextic(&k, shape, &mut rng);
            let fast = count_double_cover_raw(&s, &k).map_err(|e| e.to_string())?;
            let slow = weighted_count(&k, &s);
            if fast != slow {
                return Err(format!("q={}^{} shape {:?}: {} != {}", p, f, shape, fast, slow));
            }
            n_cover += 1;
        }
    }
    let mut n_curve = 0;
    for p in prime_sieve(50).into_iter().skip(1) {
        let k = PrimeField::new(p).map_err(|e| e.to_string())?;
        for deg in [3usize, 5] {
            for _ in 0..4 {
                let mut g: Vec<i64> = (0..deg).map(|_| rng.gen_range(-20..20)).collect();
                g.push(1);
                if !poly::is_squarefree(&poly::reduce(&g, p), p) {
                    continue;
                }
                let n = exhaustive_curve_count(&k, &g);
                let fast = count_hyperelliptic_odd(&g, &k).map_err(|e| e.to_string())?;
                let ap_ok = deg != 3 || ap_elliptic(&g, p).map_err(|e| e.to_string())? == p as i64 + 1 - n as i64;
                if fast != n || !ap_ok {
                    return Err(format!("p={} g={:?}", p, g));
                }
                n_curve += 1;
            }
        }
    }
    let mut n_det = 0;
    for n in 1..=6 {
        for trial in 0..10 {
            let m = random_rational_matrix(n, if trial % 3 == 0 { 2 } else { 30 }, &mut rng);
            if det_exact(&m) != cofactor_det(&m) {
                return Err(format!("det mismatch at n={}", n));
            }
            n_det += 1;
        }
    }
    Ok(format!("{} double covers, {} curves, {} determinants", n_cover, n_curve, n_det))
}

fn report(n: u32, title: &str, elapsed: Duration, outcome: Outcome, failed: &mut bool) {
    let secs = elapsed.as_secs_f64();
    match outcome {
        Ok(detail) => println!("PASS {:>2} {}: {} [{:.1}s]", n, title, detail, secs),
        Err(detail) => {
            *failed = true;
            println!("FAIL {:>2} {}: {} [{:.1}s]", n, title, detail, secs);
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() -> ExitCode {
    let mut failed = false;
    let (x3, x3_time) = timed(|| records("X3", 100_000));
    let (x2, x2_time) = timed(|| records("X2", 3000));

    let (out, dt) = timed(|| x3.as_deref().map_err(Clone::clone).and_then(c1));
    report(1, "X3 zero-trace law", x3_time + dt, out, &mut failed);
    let (out, dt) = timed(|| x2.as_deref().map_err(Clone::clone).and_then(c2));
    report(2, "X2 zero-trace law", x2_time + dt, out, &mut failed);
    let (out, dt) = timed(c3);
    report(3, "X1 full pipeline", dt, out, &mut failed);
    let (out, dt) = timed(c4);
    report(4, "X5 valuation table", dt, out, &mut failed);
    let (out, dt) = timed(c5);
    report(5, "X6 twist identity", dt, out, &mut failed);
    let (out, dt) = timed(c6);
    report(6, "component-group determinants", dt, out, &mut failed);
    let (out, dt) = timed(c7);
    report(7, "jump characters and orders", dt, out, &mut failed);
    let (out, dt) = timed(c8);
    report(8, "density masses", dt, out, &mut failed);
    let (out, dt) = timed(|| match (&x3, &x2) {
        (Ok(a), Ok(b)) => c9(a, b),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    });
    report(9, "distributional check", dt, out, &mut failed);
    let (out, dt) = timed(c10);
    report(10, "oracle equivalence", dt, out, &mut failed);

    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
