//! `k3lab`: catalog, trace surveys, verification, histograms and predictions.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use k3lab::models::{catalog, EndoFieldDesc, EndoKind, Model, SurfaceSpec};
use k3lab::monodromy::{component_group_order, jump_character_predict, SignedPermutation};
use k3lab::stats::{build_histogram, write_density_csv, write_histogram_csv, DensityModel};
use k3lab::traces::cache::read_cache;
use k3lab::traces::checks::{run_check, run_checks, CheckReport};
use k3lab::traces::{survey, TraceRecord};

const CURVE_CEILING: u64 = 1_000_000;
const SURFACE_CEILING: u64 = 10_000;
const DENSITY_POINTS: usize = 400;

#[derive(Parser)]
#[command(name = "k3lab", version, about = "Frobenius traces and monodromy data for a catalog of K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the surfaces and curves of the catalog.
    Catalog,
    /// Compute (or extend) the trace cache of a surface.
    Survey(SurveyArgs),
    /// Run named checks against a trace cache.
    Verify(VerifyArgs),
    /// Histogram of cached traces, with an optional density overlay.
    Hist(HistArgs),
    /// Predicted jump character and component-group order.
    Predict(PredictArgs),
}

#[derive(Args)]
struct CacheArgs {
    /// Surface name, e.g. X3.
    #[arg(long)]
    surface: String,
    /// Cache file; defaults to $K3LAB_CACHE_DIR/<surface>.csv.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    #[command(flatten)]
    target: CacheArgs,
    /// Largest residue-field norm to survey.
    #[arg(long)]
    max_norm: u64,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Allow norm bounds above the safety ceiling.
    #[arg(long)]
    i_know_this_is_big: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    target: CacheArgs,
    /// Comma-separated check names (default: all that apply).
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
}

#[derive(Args)]
struct HistArgs {
    #[command(flatten)]
    target: CacheArgs,
    #[arg(long, default_value_t = 24)]
    bins: usize,
    /// cm4, rm or none.
    #[arg(long, default_value = "none")]
    density: String,
    /// Histogram CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the density curve as `t,density` rows.
    #[arg(long)]
    density_table: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long, conflicts_with_all = ["e", "rank"])]
    surface: Option<String>,
    /// Endomorphism field: imagquad:<delta>, cyclic:<degree>:<disc> or rm:<d>.
    #[arg(long = "E", requires = "rank")]
    e: Option<String>,
    /// Picard rank.
    #[arg(long)]
    rank: Option<u32>,
}

/// Error carrying its process exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn usage(err: anyhow::Error) -> Self {
        Failure { code: 2, err }
    }
    fn verification(err: anyhow::Error) -> Self {
        Failure { code: 1, err }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = match err.downcast_ref::<k3lab::Error>() {
            Some(k3lab::Error::Io { .. } | k3lab::Error::CorruptCache { .. }) => 3,
            Some(k3lab::Error::UnknownEntry(_) | k3lab::Error::Invalid(_)) => 2,
            _ if err.downcast_ref::<io::Error>().is_some() => 3,
            _ => 1,
        };
        Failure { code, err }
    }
}

impl From<k3lab::Error> for Failure {
    fn from(e: k3lab::Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 3, err: e.into() }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catalog => cmd_catalog(),
        Command::Survey(a) => cmd_survey(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Hist(a) => cmd_hist(a),
        Command::Predict(a) => cmd_predict(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("k3lab: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn surface(name: &str) -> Result<SurfaceSpec, Failure> {
    Ok(catalog().surface(name)?.clone())
}

fn cache_path(args: &CacheArgs, spec: &SurfaceSpec) -> PathBuf {
    if let Some(p) = &args.cache {
        return p.clone();
    }
    let dir = std::env::var_os("K3LAB_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("k3lab-cache"));
    dir.join(format!("{}.csv", spec.name))
}

fn load_cache(path: &Path) -> Result<Vec<TraceRecord>, Failure> {
    if !path.exists() {
        return Err(Failure {
            code: 3,
            err: anyhow!("no trace cache at {} (run `k3lab survey` first)", path.display()),
        });
    }
    Ok(read_cache(path)?)
}

fn prediction_cells(spec: &SurfaceSpec) -> (String, String) {
    let chr = match jump_character_predict(&spec.endo, spec.picard_rank) {
        Ok(c) => c.to_string(),
        Err(k3lab::Error::NotCm(_)) => "n/a (RM)".to_string(),
        Err(e) => format!("error: {}", e),
    };
    let (order, flag) = component_group_order(&spec.endo, spec.ke_over_k);
    (chr, format!("{} ({})", order, flag))
}

fn cmd_catalog() -> CmdResult {
    let cat = catalog();
    let out = io::stdout();
    let mut w = out.lock();
    let rows: Vec<[String; 8]> = cat
        .surfaces
        .iter()
        .map(|s| {
            let (chr, order) = prediction_cells(s);
            [
                s.name.clone(),
                s.kind.to_string(),
                s.base_field.to_string(),
                s.picard_rank.to_string(),
                s.endo.to_string(),
                chr,
                order,
                s.equation(),
            ]
        })
        .collect();
    let header = ["surface", "kind", "base field", "rho", "E", "jump character", "G/G0", "equation"];
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| -> String {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                s.push_str(&format!("{:<w$}  ", c, w = widths[i]));
            }
        }
        s
    };
    writeln!(w, "{}", line(&header))?;
    for r in &rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        writeln!(w, "{}", line(&cells))?;
    }
    writeln!(w)?;
    writeln!(w, "curve  genus  equation")?;
    for c in &cat.curves {
        writeln!(w, "{:<5}  {:<5}  {}", c.name, c.genus, c.equation())?;
    }
    Ok(())
}

fn ceiling(spec: &SurfaceSpec) -> u64 {
    match spec.model {
        Model::KummerProduct { .. } | Model::KummerJacobian { .. } => CURVE_CEILING,
        Model::DoubleCover { .. } | Model::Twist { .. } => SURFACE_CEILING,
    }
}

fn tag_summary(records: &[TraceRecord]) -> BTreeMap<String, (usize, usize)> {
    let mut by_tag: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in records {
        for t in &r.tags {
            let e = by_tag.entry(t.clone()).or_default();
            if r.is_zero() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    by_tag
}

fn cmd_survey(a: SurveyArgs) -> CmdResult {
    let spec = surface(&a.target.surface)?;
    let limit = ceiling(&spec);
    if a.max_norm > limit && !a.i_know_this_is_big {
        return Err(Failure::usage(anyhow!(
            "--max-norm {} exceeds the ceiling {} for {}; pass --i-know-this-is-big to override",
            a.max_norm,
            limit,
            spec.name
        )));
    }
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Failure::usage(anyhow!("--workers must be positive")));
    }
    let path = cache_path(&a.target, &spec);
    let out = survey(&spec, a.max_norm, workers, Some(&path))
        .with_context(|| format!("survey of {} into {}", spec.name, path.display()))?;
    let zeros = out.records.iter().filter(|r| r.is_zero()).count();
    println!(
        "{}: {} records up to norm {} ({} new slots), {} zero, {} nonzero; cache {}",
        spec.name,
        out.records.len(),
        a.max_norm,
        out.new_records,
        zeros,
        out.records.len() - zeros,
        path.display()
    );
    for (tag, (z, nz)) in tag_summary(&out.records) {
        println!("  {:<16} {:>8} zero {:>8} nonzero", tag, z, nz);
    }
    let weil = run_check("weil-bound", &spec, &out.records)?;
    if !weil.passed() {
        print_report(&weil);
        if !weil.experimental {
            return Err(Failure::verification(anyhow!("Weil bound violated")));
        }
    }
    Ok(())
}

fn print_report(r: &CheckReport) {
    println!("{}", r);
    for c in r.counterexamples.iter().take(10) {
        println!("    {}", c);
    }
    if r.counterexamples.len() > 10 {
        println!("    ... {} more", r.counterexamples.len() - 10);
    }
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let spec = surface(&a.target.surface)?;
    let path = cache_path(&a.target, &spec);
    let records = load_cache(&path)?;
    if let Some(r) = records.first().filter(|r| r.surface != spec.name) {
        return Err(Failure::usage(anyhow!("{} holds records for {}", path.display(), r.surface)));
    }
    let reports = run_checks(&spec, &records, &a.checks)?;
    for r in &reports {
        print_report(r);
    }
    let hard = reports.iter().filter(|r| !r.experimental && !r.passed()).count();
    if hard > 0 {
        return Err(Failure::verification(anyhow!("{} check(s) failed", hard)));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_hist(a: HistArgs) -> CmdResult {
    let model = match a.density.to_ascii_lowercase().as_str() {
        "none" => None,
        other => Some(
            DensityModel::parse(other)
                .ok_or_else(|| Failure::usage(anyhow!("unknown density {:?} (cm4, rm, none)", other)))?,
        ),
    };
    if a.bins < 10 {
        return Err(Failure::usage(anyhow!("--bins must be at least 10")));
    }
    if a.density_table.is_some() && model.is_none() {
        return Err(Failure::usage(anyhow!("--density-table needs --density cm4 or rm")));
    }
    let spec = surface(&a.target.surface)?;
    // open outputs before reading data so an unwritable path fails early
    let mut out: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut table = a.density_table.as_deref().map(create).transpose()?;
    let records = load_cache(&cache_path(&a.target, &spec))?;
    let nonzero = records.iter().filter(|r| !r.is_zero()).count();
    if model.is_some() && nonzero < a.bins {
        return Err(Failure::verification(anyhow!(
            "{} nonzero traces, need at least {} for a density overlay",
            nonzero,
            a.bins
        )));
    }
    let h = build_histogram(&records, a.bins, model)?;
    write_histogram_csv(&h, &mut out)?;
    out.flush()?;
    if let (Some(w), Some(m)) = (table.as_mut(), model) {
        write_density_csv(m, DENSITY_POINTS, &mut *w)?;
        w.flush()?;
    }
    Ok(())
}

fn parse_endo(s: &str) -> Result<EndoFieldDesc, Failure> {
    let bad = || Failure::usage(anyhow!("cannot parse --E {:?} (imagquad:<delta>, cyclic:<degree>:<disc>, rm:<d>)", s));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<i64, Failure> { parts.get(i).and_then(|v| v.parse().ok()).ok_or_else(bad) };
    let (name, degree, kind) = match parts[0] {
        "imagquad" if parts.len() == 2 => {
            let delta = num(1)?;
            if delta <= 0 {
                return Err(bad());
            }
            (format!("Q(sqrt-{})", delta), 2, EndoKind::CmImagQuadratic { delta })
        }
        "cyclic" if parts.len() == 3 => {
            let degree = num(1)?;
            if degree < 2 || degree % 2 != 0 {
                return Err(bad());
            }
            let disc = num(2)?;
            (
                format!("cyclic CM field of degree {}", degree),
                degree as u32,
                EndoKind::CmCyclic {
                    quadratic_subfield: format!("Q(sqrt{})", disc),
                    subfield_disc: Some(disc),
                },
            )
        }
        "rm" if parts.len() == 2 => {
            let d = num(1)?;
            (format!("Q(sqrt{})", d), 2, EndoKind::RmRealQuadratic { d })
        }
        _ => return Err(bad()),
    };
    let d = (degree / 2).max(1) as usize;
    Ok(EndoFieldDesc {
        name,
        degree,
        galois_action: vec![SignedPermutation::conjugation(d)],
        kind,
        normal: true,
        conjectural: false,
    })
}

fn cmd_predict(a: PredictArgs) -> CmdResult {
    let (label, endo, rho, ke) = match (&a.surface, &a.e, a.rank) {
        (Some(name), None, None) => {
            let s = surface(name)?;
            (s.name.clone(), s.endo.clone(), s.picard_rank, Some(s.ke_over_k))
        }
        (None, Some(e), Some(rank)) => (format!("E = {}", e), parse_endo(e)?, rank, None),
        _ => return Err(Failure::usage(anyhow!("give either --surface or both --E and --rank"))),
    };
    println!("{}: E = {}, rho = {}", label, endo, rho);
    let r = 22u32.saturating_sub(rho);
    match jump_character_predict(&endo, rho) {
        Ok(chr) => {
            let q = r / endo.degree;
            println!(
                "parity: (22 - rho)/[E:Q] = {}/{} = {} ({})",
                r,
                endo.degree,
                q,
                if q % 2 == 0 { "even" } else { "odd" }
            );
            println!("character: {}", chr);
        }
        Err(k3lab::Error::NotCm(name)) => {
            if let Some(ke) = ke {
                let (order, flag) = component_group_order(&endo, ke);
                println!("component group order: {} ({})", order, flag);
            }
            return Err(Failure::verification(anyhow!(
                "{} has real multiplication; the jump-character predictor covers CM endomorphism fields only",
                name
            )));
        }
        Err(e) => return Err(Failure::usage(e.into())),
    }
    if let Some(ke) = ke {
        let (order, flag) = component_group_order(&endo, ke);
        println!("component group order: {} ({})", order, flag);
    }
    Ok(())
}
