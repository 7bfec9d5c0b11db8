//! Sato–Tate densities built from complete elliptic integrals, histograms
//! of trace records, and a Kolmogorov–Smirnov distance.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::traces::TraceRecord;

const AGM_GAP: f64 = 1e-15;

fn agm(mut a: f64, mut b: f64, mut step: impl FnMut(f64, f64)) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= AGM_GAP * a {
            break;
        }
        step(a, b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    a
}

/// K as a function of the complementary modulus k' = sqrt(1 - m) > 0.
fn k_of_kprime(kp: f64) -> f64 {
    PI / (2.0 * agm(1.0, kp, |_, _| {}))
}

/// E as a function of k' >= 0.
fn e_of_kprime(kp: f64) -> f64 {
    if kp == 0.0 {
        return 1.0;
    }
    let mut sum = 0.5 * (1.0 - kp * kp); // 2^{-1} c_0^2
    let mut pow2 = 0.5;
    let a = agm(1.0, kp, |a, b| {
        let c = 0.5 * (a - b);
        pow2 *= 2.0;
        sum += pow2 * c * c;
    });
    PI / (2.0 * a) * (1.0 - sum)
}

/// K(m) = ∫_0^{π/2} (1 - m sin²θ)^{-1/2} dθ via the arithmetic-geometric mean.
pub fn agm_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(m));
    }
    Ok(k_of_kprime((1.0 - m).sqrt()))
}

/// E(m) = ∫_0^{π/2} (1 - m sin²θ)^{1/2} dθ via the AGM companion sequence.
pub fn agm_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(m));
    }
    Ok(e_of_kprime((1.0 - m).sqrt()))
}

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol || b - a < 1e-12 {
            return left + right + delta / 15.0;
        }
        let tol = (0.5 * tol).max(1e-15);
        rec(f, a, m, fa, flm, fm, left, tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    rec(f, a, b, fa, fm, fb, whole, tol, 30)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityModel {
    /// K(1 - t²/16)/(8π²) on (-4, 4), spike 3/4.
    Cm4,
    /// ((2-t)K(1-(t-2)²/16) + 4E(1-(t-2)²/16))/(8π²) on (-2, 6), spike 1/2.
    Rm,
}

impl fmt::Display for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl DensityModel {
    pub fn name(&self) -> &'static str {
        match self {
            DensityModel::Cm4 => "cm4",
            DensityModel::Rm => "rm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cm4" => Some(DensityModel::Cm4),
            "rm" => Some(DensityModel::Rm),
            _ => None,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            DensityModel::Cm4 => (-4.0, 4.0),
            DensityModel::Rm => (-2.0, 6.0),
        }
    }

    /// Interior point where the density has a logarithmic singularity.
    pub fn singular_point(&self) -> f64 {
        match self {
            DensityModel::Cm4 => 0.0,
            DensityModel::Rm => 2.0,
        }
    }

    pub fn spike_mass(&self) -> f64 {
        match self {
            DensityModel::Cm4 => 0.75,
            DensityModel::Rm => 0.5,
        }
    }

    pub fn continuous_mass(&self) -> f64 {
        1.0 - self.spike_mass()
    }

    fn raw(&self, t: f64) -> f64 {
        // 1 - m = ((t - s)/4)^2 in both models
        let kp = ((t - self.singular_point()) / 4.0).abs();
        if kp == 0.0 {
            return f64::INFINITY;
        }
        let k = k_of_kprime(kp);
        match self {
            DensityModel::Cm4 => k / (8.0 * PI * PI),
            DensityModel::Rm => ((2.0 - t) * k + 4.0 * e_of_kprime(kp)) / (8.0 * PI * PI),
        }
    }
}

/// Density of the continuous part at t (closed support minus the singular point).
pub fn density_eval(model: DensityModel, t: f64) -> Result<f64> {
    let (a, b) = model.support();
    if !(a..=b).contains(&t) || t == model.singular_point() || t.is_nan() {
        return Err(Error::OutsideSupport {
            model: model.name(),
            value: t,
        });
    }
    Ok(model.raw(t).max(0.0))
}

const V_MAX: f64 = 50.0;

/// ∫ from the singular point s to t (signed), substituting u = s + (t-s)e^{-v}.
fn integral_from_singular(model: DensityModel, t: f64, tol: f64) -> f64 {
    let s = model.singular_point();
    let h = t - s;
    if h == 0.0 {
        return 0.0;
    }
    let g = |v: f64| {
        let w = (-v).exp();
        let u = s + h * w;
        if u == s {
            0.0
        } else {
            model.raw(u).max(0.0) * h.abs() * w
        }
    };
    h.signum() * adaptive_simpson(&g, 0.0, V_MAX, tol)
}

/// ∫_lo^hi of the density, lo <= hi within the support.
pub fn integrate(model: DensityModel, lo: f64, hi: f64, tol: f64) -> f64 {
    integral_from_singular(model, hi, tol) - integral_from_singular(model, lo, tol)
}

/// Integral of the continuous part over the whole support.
pub fn density_mass(model: DensityModel) -> f64 {
    let (a, b) = model.support();
    integrate(model, a, b, 1e-12)
}

/// Model CDF of the continuous part normalised to mass 1.
pub fn model_cdf(model: DensityModel, t: f64) -> f64 {
    let (a, b) = model.support();
    let t = t.clamp(a, b);
    let mass = density_mass(model);
    integrate(model, a, t, 1e-12) / mass
}

#[derive(Clone, Debug)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    /// count / total records, per bin.
    pub masses: Vec<f64>,
    pub theoretical: Option<Vec<f64>>,
    pub spike_fraction: f64,
    pub sample_count: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.bins() as f64;
        (self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.spike_fraction
    }
}

/// Bins nonzero values uniformly; zeros form the spike. With a model, the
/// support fixes the range and a value outside it is an anomaly.
pub fn build_histogram_values(values: &[f64], bins: usize, model: Option<DensityModel>) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::Invalid(format!("need at least 10 bins, got {}", bins)));
    }
    let nonzero: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    let (lo, hi) = match model {
        Some(m) => m.support(),
        None => {
            let lo = nonzero.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = nonzero.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if nonzero.is_empty() {
                (-1.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        }
    };
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in &nonzero {
        if v < lo || v > hi {
            return Err(Error::OutsideSupport {
                model: model.map_or("data", |m| m.name()),
                value: v,
            });
        }
        // ties at an edge go to the lower bin
        let i = (((v - lo) / w).ceil() as isize - 1).clamp(0, bins as isize - 1) as usize;
        counts[i] += 1;
    }
    let n = values.len();
    let masses = counts
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect();
    let theoretical = model.map(|m| {
        (0..bins)
            .map(|i| integrate(m, lo + w * i as f64, lo + w * (i + 1) as f64, 1e-10))
            .collect()
    });
    Ok(Histogram {
        lo,
        hi,
        counts,
        masses,
        theoretical,
        spike_fraction: if n == 0 { 0.0 } else { (n - nonzero.len()) as f64 / n as f64 },
        sample_count: n,
    })
}

/// Histogram of the traces of one surface.
pub fn build_histogram(records: &[TraceRecord], bins: usize, model: Option<DensityModel>) -> Result<Histogram> {
    if let Some(first) = records.first() {
        if let Some(r) = records.iter().find(|r| r.surface != first.surface) {
            return Err(Error::Invalid(format!(
                "records from {} and {} mixed",
                first.surface, r.surface
            )));
        }
    }
    let values: Vec<f64> = records.iter().map(|r| r.value()).collect();
    build_histogram_values(&values, bins, model)
}

/// sup |F_emp - F_model| over nonzero samples, model normalised to mass 1.
pub fn ks_distance_values(values: &[f64], model: DensityModel) -> Result<f64> {
    let mut xs: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    if xs.len() < 100 {
        return Err(Error::TooFewSamples {
            need: 100,
            got: xs.len(),
        });
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let (a, b) = model.support();
    let mass = density_mass(model);
    let n = xs.len() as f64;
    let mut cum = 0.0;
    let mut prev = a;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i].clamp(a, b);
        cum += integrate(model, prev, x, 1e-11);
        prev = x;
        let f = cum / mass;
        // ties: advance over equal values
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        d = d.max((f - i as f64 / n).abs()).max((f - j as f64 / n).abs());
        i = j;
    }
    Ok(d)
}

pub fn ks_distance(records: &[TraceRecord], model: DensityModel) -> Result<f64> {
    let values: Vec<f64> = records.iter().map(|r| r.value()).collect();
    ks_distance_values(&values, model)
}

pub fn write_histogram_csv<W: Write>(h: &Histogram, mut w: W) -> io::Result<()> {
    match &h.theoretical {
        Some(_) => writeln!(w, "bin_lo,bin_hi,empirical,theoretical")?,
        None => writeln!(w, "bin_lo,bin_hi,empirical")?,
    }
    for i in 0..h.bins() {
        let (lo, hi) = h.edges(i);
        match &h.theoretical {
            Some(t) => writeln!(w, "{:.6},{:.6},{:.8},{:.8}", lo, hi, h.masses[i], t[i])?,
            None => writeln!(w, "{:.6},{:.6},{:.8}", lo, hi, h.masses[i])?,
        }
    }
    writeln!(w, "#spike={:.6}", h.spike_fraction)?;
    writeln!(w, "#n={}", h.sample_count)
}

/// `points` evenly spaced samples of the density, skipping the singular point.
pub fn write_density_csv<W: Write>(model: DensityModel, points: usize, mut w: W) -> io::Result<()> {
    let (a, b) = model.support();
    writeln!(w, "t,density")?;
    for i in 0..=points {
        let t = a + (b - a) * i as f64 / points as f64;
        if let Ok(v) = density_eval(model, t) {
            writeln!(w, "{:.6},{:.10}", t, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_special_values() {
        assert!((agm_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((agm_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(agm_e(1.0).unwrap(), 1.0);
        assert!(agm_k(1.0).is_err());
        assert!(agm_e(1.5).is_err());
        assert!(agm_k(1.0 - 1e-8).unwrap() > agm_k(1.0 - 1e-4).unwrap());
    }

    #[test]
    fn density_examples() {
        let a = density_eval(DensityModel::Cm4, 3.9).unwrap();
        let b = density_eval(DensityModel::Cm4, -3.9).unwrap();
        assert_eq!(a, b);
        assert!(density_eval(DensityModel::Cm4, 1e-9).unwrap() > density_eval(DensityModel::Cm4, 1e-3).unwrap());
        assert!(density_eval(DensityModel::Rm, 6.0).unwrap().abs() < 1e-15);
        assert!(density_eval(DensityModel::Cm4, 0.0).is_err());
        assert!(density_eval(DensityModel::Rm, 6.5).is_err());
    }

    #[test]
    fn masses() {
        assert!((density_mass(DensityModel::Cm4) - 0.25).abs() < 1e-6);
        assert!((density_mass(DensityModel::Rm) - 0.5).abs() < 1e-6);
        let m = DensityModel::Rm;
        let halves = integrate(m, -2.0, 1.0, 1e-12) + integrate(m, 1.0, 6.0, 1e-12);
        assert!((halves - density_mass(m)).abs() < 1e-9);
    }

    #[test]
    fn histogram_edges_and_mass() {
        let vals = [0.0, 0.0, 0.0, -4.0, 0.8, 4.0, 1.6];
        let h = build_histogram_values(&vals, 10, Some(DensityModel::Cm4)).unwrap();
        // 0.8 sits on the edge between bins 5 and 6
        assert_eq!(h.counts[5], 1);
        assert_eq!(h.counts[6], 1);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[9], 1);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert!((h.spike_fraction - 3.0 / 7.0).abs() < 1e-15);
        let all_zero = build_histogram_values(&[0.0; 5], 10, None).unwrap();
        assert_eq!(all_zero.spike_fraction, 1.0);
        assert!(all_zero.counts.iter().all(|&c| c == 0));
        assert!(build_histogram_values(&[4.5], 10, Some(DensityModel::Cm4)).is_err());
        assert!(build_histogram_values(&[1.0], 5, None).is_err());
    }

    #[test]
    fn ks_needs_samples() {
        assert!(matches!(
            ks_distance_values(&[1.0; 50], DensityModel::Cm4),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn csv_footer() {
        let h = build_histogram_values(&[0.0, 1.0, 2.0, -1.0], 10, Some(DensityModel::Cm4)).unwrap();
        let mut out = Vec::new();
        write_histogram_csv(&h, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("bin_lo,bin_hi,empirical,theoretical\n"));
        assert!(s.contains("#spike=0.250000\n"));
        assert!(s.ends_with("#n=4\n"));
    }
}
