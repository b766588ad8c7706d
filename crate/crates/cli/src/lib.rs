//! Command-line front end for the `bianchi` library.
//!
//! [`run`] parses an argument vector, dispatches one subcommand and returns
//! the process exit status:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | every assertion passed |
//! | 1 | at least one assertion failed |
//! | 2 | usage or configuration error, nothing written |
//! | 3 | a numerical routine failed |

mod config;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bianchi::eisenstein::{coset_sum_certified, EisensteinEvaluator, SpectralParam};
use bianchi::field::CLASS_NUMBER_ONE;
use bianchi::hyperbolic::{fundamental_volume, PointH3};
use bianchi::lfunctions::{find_critical_zeros, zero_count_argument_principle};
use bianchi::que::{
    lemma_cont_check, selftest, theorem1_sweep, theorem2_sweep, theorem3_sweep, ScheduleKind, SweepResult,
};
use bianchi::testfn::TestFunction;
use bianchi::FieldContext;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use config::{RegionConfig, RunConfig, ScheduleConfig, ScheduleParams};
pub use report::{Assertion, Report};

/// Environment variable naming the default directory for result files.
pub const OUTPUT_DIR_ENV: &str = "BIANCHI_OUTPUT_DIR";

pub mod exit {
    pub const OK: i32 = 0;
    pub const ASSERTION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(bianchi::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<bianchi::Error> for CliError {
    fn from(e: bianchi::Error) -> Self {
        use bianchi::Error::*;
        match e {
            // bad input rather than a numerical breakdown
            UnsupportedField(_) | InvalidArgument(_) | UncertifiedRegion => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::USAGE,
            _ => exit::NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bianchi", version, about = "Eisenstein series and quantum limits on Bianchi manifolds")]
struct Cli {
    /// Worker threads; defaults to all cores. 1 gives the reference path.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for result files [default: $BIANCHI_OUTPUT_DIR, else .]
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate E(p, σ + it) by its Fourier expansion.
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        field: i64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// x1,x2,y
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        point: Point,
        /// Compare with the coset sum (needs σ > 2).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// List zeros of the Dedekind zeta function on the critical line as CSV.
    Zeros {
        #[arg(long, allow_negative_numbers = true)]
        field: i64,
        #[arg(long)]
        tmax: f64,
    },
    /// Identity self-tests; all nine fields unless --field is given.
    Selftest {
        #[arg(long, allow_negative_numbers = true)]
        field: Option<i64>,
    },
    /// Convergence sweep for one of the three limit theorems.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        theorem: u8,
        /// Overrides the field in the config file.
        #[arg(long, allow_negative_numbers = true)]
        field: Option<i64>,
        #[arg(long)]
        config: PathBuf,
        /// CSV path; overrides the config and the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Whole-manifold integral of F_h |E|² against its main term.
    LemmaCont {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Volume of the fundamental domain by quadrature and in closed form.
    Volume {
        #[arg(long, allow_negative_numbers = true)]
        field: i64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Point([f64; 3]);

fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x1, x2, y] if y > 0.0 => Ok(Point([x1, x2, y])),
        [_, _, _] => Err("y must be positive".into()),
        _ => Err(format!("expected x1,x2,y, got {} values", parts.len())),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(cli) {
        Ok(report) => report.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<Report, CliError> {
    let out_dir = cli
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    // configs are read before any pool is built so bad input fails fast
    let config = match &cli.command {
        Command::Sweep { config, field, .. } => {
            let mut cfg = RunConfig::load(config)?;
            if let Some(d) = field {
                cfg.field = *d;
            }
            check_subcommand(&cfg, "sweep")?;
            cfg.validate()?;
            Some(cfg)
        }
        Command::LemmaCont { config, .. } => {
            let cfg = RunConfig::load(config)?;
            check_subcommand(&cfg, "lemma-cont")?;
            Some(cfg)
        }
        _ => None,
    };
    let threads = cli.threads.or(config.as_ref().and_then(|c| c.threads));
    match threads {
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(&cli.command, config.as_ref(), &out_dir)),
        None => dispatch(&cli.command, config.as_ref(), &out_dir),
    }
}

fn check_subcommand(cfg: &RunConfig, name: &str) -> Result<(), CliError> {
    match &cfg.subcommand {
        Some(s) if s != name => Err(CliError::Config(format!("config is for {s:?}, not {name:?}"))),
        _ => Ok(()),
    }
}

fn dispatch(command: &Command, config: Option<&RunConfig>, out_dir: &Path) -> Result<Report, CliError> {
    match command {
        Command::Eval {
            field,
            sigma,
            t,
            point,
            oracle,
            eps,
        } => eval(*field, *sigma, *t, *point, *oracle, *eps),
        Command::Zeros { field, tmax } => zeros(*field, *tmax),
        Command::Selftest { field } => self_tests(*field),
        Command::Volume { field } => volume(*field),
        Command::Sweep { theorem, output, .. } => {
            let cfg = config.expect("config loaded");
            let ctx = FieldContext::new(cfg.field)?;
            let (rows, report) = match theorem {
                1 => sweep_critical_line(&ctx, cfg)?,
                2 => sweep_approach_one(&ctx, cfg)?,
                _ => sweep_constant_sigma(&ctx, cfg)?,
            };
            let default_name = format!("sweep_theorem{theorem}_D{}.csv", cfg.field);
            let path = output_path(output.as_deref(), cfg, out_dir, &default_name);
            write_artifacts(&path, &rows, cfg, &format!("sweep --theorem {theorem}"), &report)?;
            Ok(report)
        }
        Command::LemmaCont { output, .. } => {
            let cfg = config.expect("config loaded");
            let ctx = FieldContext::new(cfg.field)?;
            let (rows, report) = lemma(&ctx, cfg)?;
            let path = output_path(output.as_deref(), cfg, out_dir, &format!("lemma_cont_D{}.csv", cfg.field));
            write_artifacts(&path, &rows, cfg, "lemma-cont", &report)?;
            Ok(report)
        }
    }
}

fn output_path(flag: Option<&Path>, cfg: &RunConfig, out_dir: &Path, default_name: &str) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| out_dir.join(default_name))
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    assertions: &'a [Assertion],
}

/// Writes the CSV and, next to it, a JSON summary of config and assertions.
fn write_artifacts(
    path: &Path,
    rows: &[SweepResult],
    cfg: &RunConfig,
    command: &str,
    report: &Report,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    let summary = Summary {
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        assertions: &report.assertions,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(path.with_extension("json"), json + "\n")?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

fn eval(field: i64, sigma: f64, t: f64, point: Point, oracle: bool, eps: f64) -> Result<Report, CliError> {
    let ctx = FieldContext::new(field)?;
    let [x1, x2, y] = point.0;
    let p = PointH3::new(x1, x2, y)?;
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(CliError::Config(format!("eps must lie in (0, 1e-3], got {eps}")));
    }
    let ev = EisensteinEvaluator::new(&ctx, SpectralParam::new(sigma, t, "eval")?, (y, y), eps)?;
    let e = ev.eval(&p)?;
    println!("real {:.17e}", e.re);
    println!("imag {:.17e}", e.im);
    println!("abs2 {:.17e}", e.norm_sqr());
    let mut report = Report::default();
    if oracle {
        if sigma.is_nan() || sigma <= 2.0 {
            return Err(CliError::Config("--oracle needs σ > 2".into()));
        }
        let o = coset_sum_certified(&ctx, &p, Complex64::new(sigma, t), 100, 1e-8, 1 << 14)?;
        let diff = (e - o.value).norm();
        println!("oracle real {:.17e}", o.value.re);
        println!("oracle imag {:.17e}", o.value.im);
        report.check("fourier_vs_coset", diff < 1e-6, format!("|difference| = {diff:.3e} < 1e-6"));
    }
    Ok(report)
}

#[derive(Serialize)]
struct ZeroRow {
    gamma: f64,
    source: &'static str,
    bracket_lo: f64,
    bracket_hi: f64,
}

fn zeros(field: i64, tmax: f64) -> Result<Report, CliError> {
    let ctx = FieldContext::new(field)?;
    let found = find_critical_zeros(&ctx, tmax)?;
    let counted = zero_count_argument_principle(&ctx, tmax)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for z in &found {
        w.serialize(ZeroRow {
            gamma: z.gamma,
            source: z.source.as_str(),
            bracket_lo: z.bracket.0,
            bracket_hi: z.bracket.1,
        })?;
    }
    w.flush()?;
    let mut report = Report::default();
    report.check(
        "zeros_on_critical_line",
        found.len() == counted,
        format!("{} sign changes, argument principle counts {counted} up to t = {tmax}", found.len()),
    );
    Ok(report)
}

fn self_tests(field: Option<i64>) -> Result<Report, CliError> {
    let fields = match field {
        Some(d) => vec![d],
        None => CLASS_NUMBER_ONE.to_vec(),
    };
    let mut report = Report::default();
    for d in fields {
        let ctx = FieldContext::new(d)?;
        for c in selftest(&ctx)? {
            report.check(
                format!("D={d} {}", c.name),
                c.passed,
                format!("{:.3e} < {:.0e}", c.value, c.tolerance),
            );
        }
    }
    Ok(report)
}

fn volume(field: i64) -> Result<Report, CliError> {
    let ctx = FieldContext::new(field)?;
    let quad = fundamental_volume(&ctx, 48, 8);
    let closed = ctx.manifold_volume();
    let gap = (quad / closed - 1.0).abs();
    println!("quadrature  {quad:.15}");
    println!("closed form {closed:.15}");
    let mut report = Report::default();
    report.check("volume", gap < 1e-3, format!("relative gap {gap:.3e} < 1e-3"));
    Ok(report)
}

fn deviations<'a>(rows: impl Iterator<Item = &'a SweepResult>) -> Vec<f64> {
    rows.map(SweepResult::deviation).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn inconclusive_note(rows: &[&SweepResult]) -> String {
    match rows.iter().filter(|r| r.inconclusive).count() {
        0 => String::new(),
        n => format!(", {n} rows numerically inconclusive"),
    }
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Constant `σ_∞ ∈ (1, 1.9]`: deviation decreasing and at most 10% at the end.
fn sweep_constant_sigma(ctx: &FieldContext, cfg: &RunConfig) -> Result<(Vec<SweepResult>, Report), CliError> {
    let spec = cfg.schedule_spec()?;
    let mut rows = Vec::new();
    let mut report = Report::default();
    for (id, region) in cfg.certified_regions(ctx)? {
        let got = theorem3_sweep(ctx, &region, &id, &spec, cfg.eps)?;
        let main: Vec<&SweepResult> = got.iter().filter(|r| r.region == id).collect();
        let dev = deviations(main.iter().copied());
        let last = *dev.last().expect("non-empty grid");
        report.check(
            format!("theorem3 {id}"),
            strictly_decreasing(&dev) && last <= 0.1,
            format!("deviations [{}]{}", fmt_list(&dev), inconclusive_note(&main)),
        );
        rows.extend(got);
    }
    Ok((rows, report))
}

/// Approach-one schedule on the first two regions: the volume ratio within
/// 10% at the last `t`, each normalized ratio in `[0.6, 1.4]` with
/// decreasing deviation.
fn sweep_approach_one(ctx: &FieldContext, cfg: &RunConfig) -> Result<(Vec<SweepResult>, Report), CliError> {
    let spec = cfg.schedule_spec()?;
    let regions = cfg.certified_regions(ctx)?;
    let [(ida, a), (idb, b), ..] = &regions[..] else {
        return Err(CliError::Config("this sweep needs two regions".into()));
    };
    let ratio_id = format!("{ida}/{idb}");
    let mut rows = theorem2_sweep(ctx, a, b, &spec, cfg.eps)?;
    for r in &mut rows {
        r.region = match r.region.as_str() {
            "A" => ida.clone(),
            "B" => idb.clone(),
            _ => ratio_id.clone(),
        };
    }
    let mut report = Report::default();
    let pick = |id: &str| -> Vec<&SweepResult> { rows.iter().filter(|r| r.region == id).collect() };
    let ab = pick(&ratio_id);
    let last = ab.last().expect("non-empty grid").ratio;
    report.check(
        format!("theorem2 {ratio_id}"),
        (last - 1.0).abs() <= 0.1,
        format!(
            "ratios [{}]{}",
            fmt_list(&ab.iter().map(|r| r.ratio).collect::<Vec<_>>()),
            inconclusive_note(&ab)
        ),
    );
    for id in [ida, idb] {
        let sel = pick(id);
        let ratios: Vec<f64> = sel.iter().map(|r| r.ratio).collect();
        let dev = deviations(sel.iter().copied());
        let last = *ratios.last().expect("non-empty grid");
        report.check(
            format!("theorem2 {id} normalized"),
            (0.6..=1.4).contains(&last) && strictly_decreasing(&dev),
            format!("ratios [{}]{}", fmt_list(&ratios), inconclusive_note(&sel)),
        );
    }
    let hyp: Vec<f64> = ab.iter().filter_map(|r| r.hypothesis).collect();
    report.check(
        "hypothesis_decreasing",
        strictly_decreasing(&hyp),
        format!("(σ_t − 1) log t = [{}]", fmt_list(&hyp)),
    );
    Ok((rows, report))
}

/// Along critical zeros: every sign change accounted for by the argument
/// principle, deviation trending down and at most 15% at the last zero.
fn sweep_critical_line(ctx: &FieldContext, cfg: &RunConfig) -> Result<(Vec<SweepResult>, Report), CliError> {
    let want = cfg.zeros.unwrap_or(8);
    let mut t_max = 30.0;
    let mut zeros = find_critical_zeros(ctx, t_max)?;
    while zeros.len() < want && t_max < 120.0 {
        t_max = (2.0 * t_max).min(120.0);
        zeros = find_critical_zeros(ctx, t_max)?;
    }
    if zeros.len() < want {
        return Err(CliError::Config(format!("only {} zeros up to t = 120", zeros.len())));
    }
    let mut report = Report::default();
    let counted = zero_count_argument_principle(ctx, t_max)?;
    report.check(
        "zeros_on_critical_line",
        zeros.len() == counted,
        format!("{} sign changes, argument principle counts {counted} up to t = {t_max}", zeros.len()),
    );
    let mut rows = Vec::new();
    for (id, region) in cfg.certified_regions(ctx)? {
        let got = theorem1_sweep(ctx, &region, &id, &zeros[..want], cfg.eps)?;
        let refs: Vec<&SweepResult> = got.iter().collect();
        let gammas: Vec<f64> = got.iter().map(|r| r.t).collect();
        let dev = deviations(got.iter());
        let trend = slope(&gammas, &dev);
        let last = *dev.last().expect("at least one zero");
        report.check(
            format!("theorem1 {id}"),
            trend < 0.0 && last <= 0.15,
            format!("deviations [{}], slope {trend:.2e}{}", fmt_list(&dev), inconclusive_note(&refs)),
        );
        rows.extend(got);
    }
    Ok((rows, report))
}

/// Constant `σ > 1`: deviation decreasing and at most 10% at the end.
/// Approach-one: deviation decreasing.
fn lemma(ctx: &FieldContext, cfg: &RunConfig) -> Result<(Vec<SweepResult>, Report), CliError> {
    let spec = cfg.schedule_spec()?;
    let h = TestFunction::by_name(cfg.test_function.as_deref().unwrap_or("bump23"))?;
    let region = format!("manifold:{}", h.name);
    let approach_one = matches!(spec.kind, ScheduleKind::ApproachOne { .. });
    let mut rows = Vec::new();
    for &t in &spec.t_grid {
        let sp = spec.param(t)?;
        let r = lemma_cont_check(ctx, &h, &sp)?;
        let mut row = SweepResult {
            field: ctx.d(),
            t,
            sigma_t: sp.sigma,
            region: region.clone(),
            mu_st: r.lhs,
            predicted: r.rhs_main,
            ratio: r.ratio,
            quad_delta: r.quad_delta,
            trunc_eps: r.trunc_eps,
            hypothesis: approach_one.then(|| spec.hypothesis(t)),
            inconclusive: false,
        };
        row.inconclusive = row.deviation() < 10.0 * row.quad_delta.max(row.trunc_eps);
        rows.push(row);
    }
    let refs: Vec<&SweepResult> = rows.iter().collect();
    let dev = deviations(rows.iter());
    let last = *dev.last().expect("non-empty grid");
    let passed = strictly_decreasing(&dev) && (approach_one || last <= 0.1);
    let mut report = Report::default();
    report.check(
        format!("lemma {}", spec.tag()),
        passed,
        format!("deviations [{}]{}", fmt_list(&dev), inconclusive_note(&refs)),
    );
    Ok((rows, report))
}
