//! Command-line front end for the set calculator.
//!
//! Every library operation is reachable from at least one subcommand
//! (see [`DISPATCH`], audited by a test), reports are byte-deterministic
//! for identical invocations, and exit codes follow one rule: 0 when all
//! checks pass, 1 when a check fails, 2 on usage or parse errors (which
//! go to standard error).

pub mod examples;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use synd::density::{
    adaptive_gap_check, banach_profile, minimal_m_search, prefix_profile, prefix_profile_at,
    saturation_search, schnirelmann, witness_table, EstimateKind, SaturationMode,
};
use synd::families::{generate, FamilyOutput, FamilySpec};
use synd::morph::{block_fill, block_quotient, dilate_block, erode_block, interior_mask};
use synd::setlang::{evaluate, parse};
use synd::verify::{
    besicovitch_select, covering_bound_check, covering_exhaustive, inputs_digest, mann_check,
    mann_exhaustive, mann_sigma_sum, mann_sum_set, syndetic_point_fraction,
    two_scale_density_fraction, CoverInstance, Cube, TwoScaleConfig, Verdict,
};
use synd::{q, LatticeSet, Point, Q, Window};

/// Operation names from the library modules; the coverage test checks
/// every one of them appears in [`DISPATCH`].
pub const MODULE_OPS: &[&str] = &[
    "lattice::build_set",
    "lattice::boolean_op",
    "lattice::translate",
    "morph::sumset",
    "morph::dilate_cube",
    "morph::erode_cube",
    "morph::block_quotient",
    "morph::block_fill",
    "density::prefix_profile",
    "density::tail_estimates",
    "density::schnirelmann",
    "density::banach_profile",
    "density::witness_table",
    "density::minimal_m_search",
    "density::saturation_search",
    "density::adaptive_gap_check",
    "families::gen_upper_pair",
    "families::gen_epsilon_set",
    "families::gen_optimal_c",
    "families::gen_big_pair",
    "families::gen_non_pws",
    "verify::mann_sigma_sum",
    "verify::mann_check",
    "verify::mann_exhaustive",
    "verify::covering_bound_check",
    "verify::besicovitch_select",
    "verify::two_scale_density_fraction",
    "verify::syndetic_point_fraction",
    "setlang::parse",
    "setlang::evaluate",
];

/// Subcommand -> operations it invokes. Expression sources make the
/// whole evaluator (and through `family(...)` references, every
/// generator) reachable from any subcommand that takes `--expr`; the
/// table lists the direct, load-bearing uses.
pub const DISPATCH: &[(&str, &[&str])] = &[
    (
        "eval",
        &[
            "setlang::parse",
            "setlang::evaluate",
            "lattice::build_set",
            "lattice::boolean_op",
            "lattice::translate",
            "morph::sumset",
            "morph::dilate_cube",
            "morph::erode_cube",
            "morph::block_quotient",
            "morph::block_fill",
        ],
    ),
    (
        "density",
        &[
            "density::prefix_profile",
            "density::tail_estimates",
            "density::schnirelmann",
            "density::banach_profile",
        ],
    ),
    ("witness", &["density::witness_table"]),
    (
        "search-m",
        &[
            "density::minimal_m_search",
            "density::saturation_search",
            "density::adaptive_gap_check",
        ],
    ),
    (
        "mann",
        &["verify::mann_check", "verify::mann_sigma_sum", "verify::mann_exhaustive"],
    ),
    (
        "cover",
        &["verify::covering_bound_check", "verify::besicovitch_select"],
    ),
    (
        "two-scale",
        &["verify::two_scale_density_fraction", "verify::syndetic_point_fraction"],
    ),
    (
        "family",
        &[
            "families::gen_upper_pair",
            "families::gen_epsilon_set",
            "families::gen_optimal_c",
            "families::gen_big_pair",
            "families::gen_non_pws",
        ],
    ),
    (
        "verify-example",
        &[
            "families::gen_upper_pair",
            "families::gen_epsilon_set",
            "families::gen_optimal_c",
            "families::gen_big_pair",
            "families::gen_non_pws",
            "morph::sumset",
            "morph::dilate_cube",
            "morph::erode_cube",
            "density::witness_table",
        ],
    ),
];

#[derive(Parser)]
#[command(
    name = "synd",
    version,
    about = "Exact finite-scale computations on integer sets",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Worker threads for parallel kernels (default: one per core)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Evaluate a set expression and emit the set
    Eval(EvalArgs),
    /// Prefix-density profile, with optional exact density lines
    Density(DensityArgs),
    /// Witness-set density table over dilation/erosion radii
    Witness(WitnessArgs),
    /// Search dilation radii: minimal witness level, saturation, gap check
    #[command(name = "search-m")]
    SearchM(SearchMArgs),
    /// Superadditivity checks: one pair, exhaustive, or randomized
    Mann(MannArgs),
    /// Covering-bound and cube-selection checks
    Cover(CoverArgs),
    /// Two-scale density-point experiment
    #[command(name = "two-scale")]
    TwoScale(TwoScaleArgs),
    /// Emit a named set construction
    Family(FamilyArgs),
    /// Run the bundled checks for one worked example
    #[command(name = "verify-example")]
    VerifyExample(VerifyExampleArgs),
}

#[derive(Args)]
pub struct SourceArgs {
    /// Window spec: `1d:N` for [1, N], or `cN:d` for [-N, N]^d
    #[arg(long)]
    pub window: Option<String>,
    /// Set expression (repeat for operations taking two sets)
    #[arg(long, action = ArgAction::Append)]
    pub expr: Vec<String>,
    /// File holding an expression, or a serialized set (`window` header)
    #[arg(long, action = ArgAction::Append)]
    pub file: Vec<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Replace the set by its size-n block quotient
    #[arg(long)]
    pub quotient: Option<i64>,
    /// Replace the set by its size-n block fill
    #[arg(long)]
    pub fill: Option<i64>,
    /// Grow by the one-sided block [0, n-1]^d
    #[arg(long)]
    pub dilate_block: Option<i64>,
    /// Shrink to anchors of fully covered one-sided blocks
    #[arg(long)]
    pub erode_block: Option<i64>,
    /// Intersect with the k-interior of the window
    #[arg(long)]
    pub interior: Option<i64>,
    /// Translate by `dx` or `dx,dy,dz`
    #[arg(long)]
    pub translate: Option<String>,
    #[arg(long, value_enum, default_value_t = SetFormat::Rle)]
    pub format: SetFormat,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Geometric sample count for the profile
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Explicit comma-separated sample positions (overrides --samples)
    #[arg(long)]
    pub at: Option<String>,
    /// Append the exact prefix-minimum density
    #[arg(long)]
    pub schnirelmann: bool,
    /// Append sliding-window maxima at these comma-separated radii
    #[arg(long)]
    pub banach: Option<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 4)]
    pub m_max: i64,
    #[arg(long, default_value_t = 4)]
    pub k_max: i64,
    /// Comma-separated window sizes for the strong estimate
    #[arg(long)]
    pub strong: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    /// Minimal m whose lower witness estimates reach the level
    Lower,
    /// Minimal m whose upper witness estimates reach the level
    Upper,
    /// Minimal m with schnirelmann(A ∪ [1, m]) near the upper tail
    SatSchnirelmann,
    /// Minimal m whose m-dilation nearly fills a sliding window
    SatBanach,
    /// Union-of-witnesses estimate against a level, with radii f(m)
    Adaptive,
}

#[derive(Args)]
pub struct SearchMArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub mode: SearchMode,
    /// Target level as `a/b`, integer, or decimal
    #[arg(long)]
    pub level: Option<String>,
    /// Slack epsilon as `a/b`, integer, or decimal
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub m_max: i64,
    #[arg(long, default_value_t = 8)]
    pub k_max: i64,
    /// Comma-separated values f(0),f(1),... for the adaptive mode
    #[arg(long)]
    pub adaptive_f: Option<String>,
}

#[derive(Args)]
pub struct MannArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Check every subset pair of [1, n]
    #[arg(long)]
    pub exhaustive: Option<u32>,
    /// Check this many random pairs on the given window
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct CoverArgs {
    /// JSON file holding a covering-bound instance
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Sweep every covering instance on a ground set of up to n cells
    #[arg(long)]
    pub exhaustive: Option<u32>,
    /// Audit random cube selections instead
    #[arg(long)]
    pub besicovitch: bool,
    #[arg(long, default_value_t = 1)]
    pub dim: u8,
    #[arg(long, default_value_t = 100)]
    pub count: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TwoScaleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Inner radius (the smaller of the two scales)
    #[arg(long)]
    pub inner: i64,
    /// Smear radius applied before counting
    #[arg(long, default_value_t = 1)]
    pub smear: i64,
    /// Density defect delta as `a/b` or decimal
    #[arg(long)]
    pub delta: String,
    /// Report cube-witness fractions of the sumset of two sources
    #[arg(long)]
    pub syndetic: bool,
    #[arg(long, default_value_t = 3)]
    pub m_max: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FamilyArgs {
    /// Construction name (upper_pair, epsilon_set, optimal_C, big_pair, non_pws)
    #[arg(long)]
    pub family: String,
    /// Construction parameter, repeatable: --param n0=6
    #[arg(long, action = ArgAction::Append)]
    pub param: Vec<String>,
    /// Window spec: `1d:N` or `cN:d`
    #[arg(long)]
    pub window: String,
    #[arg(long, value_enum, default_value_t = SetFormat::Rle)]
    pub format: SetFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyExampleArgs {
    /// Example bundle to run
    #[arg(value_enum)]
    pub name: ExampleName,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    #[value(name = "upper-42")]
    Upper42,
    #[value(name = "epsilon-28")]
    Epsilon28,
    #[value(name = "optimal-41")]
    Optimal41,
    #[value(name = "big-44")]
    Big44,
    #[value(name = "nonpws-12")]
    Nonpws12,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetFormat {
    Rle,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// A failed invocation: usage problems exit 2, failed checks exit 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Library errors are parameter problems (bad radii, bad windows) except
/// the two verdict-like outcomes, which are check failures.
fn classify(e: synd::Error) -> Failure {
    match e {
        synd::Error::HypothesisFailed { .. } | synd::Error::NotCoverable { .. } => {
            Failure::Check(e.to_string())
        }
        other => Failure::Usage(other.to_string()),
    }
}

pub fn parse_window(spec: &str) -> CliResult<Window> {
    if let Some(rest) = spec.strip_prefix("1d:") {
        let n: i64 = rest
            .parse()
            .map_err(|_| Failure::Usage(format!("bad window bound in '{spec}'")))?;
        return Window::classical(n).map_err(classify);
    }
    if let Some(rest) = spec.strip_prefix('c')
        && let Some((n, d)) = rest.split_once(':')
    {
        let n: i64 = n
            .parse()
            .map_err(|_| Failure::Usage(format!("bad window radius in '{spec}'")))?;
        let d: u8 = d
            .parse()
            .map_err(|_| Failure::Usage(format!("bad window dimension in '{spec}'")))?;
        return Window::centered(n, d).map_err(classify);
    }
    usage(format!("window spec '{spec}' is neither '1d:N' nor 'cN:d'"))
}

/// Exact ratio from `a/b`, an integer, or a short decimal like `0.02`.
pub fn parse_ratio(text: &str) -> CliResult<Q> {
    let bad = || Failure::Usage(format!("'{text}' is not a ratio (use a/b, n, or a decimal)"));
    if let Some((a, b)) = text.split_once('/') {
        let n: i128 = a.trim().parse().map_err(|_| bad())?;
        let d: i128 = b.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return usage(format!("zero denominator in '{text}'"));
        }
        return Ok(q(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let w: i128 = whole.trim().parse().map_err(|_| bad())?;
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| bad())?;
        return Ok(q(w * scale + sign * f, scale));
    }
    let n: i128 = text.trim().parse().map_err(|_| bad())?;
    Ok(q(n, 1))
}

fn parse_i64_list(text: &str, what: &str) -> CliResult<Vec<i64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad {what} entry '{}'", t.trim())))
        })
        .collect()
}

fn fmt_q(x: &Q) -> String {
    synd::qfmt::to_string(x)
}

impl SourceArgs {
    fn window(&self) -> CliResult<Window> {
        match &self.window {
            Some(spec) => parse_window(spec),
            None => usage("--window is required to evaluate a set"),
        }
    }

    /// Loads exactly `want` sets from `--expr` and `--file` sources, in
    /// that order. Expressions are parsed before the window is needed,
    /// so malformed text reports its position even without `--window`.
    fn sets(&self, want: usize) -> CliResult<Vec<LatticeSet>> {
        let mut exprs = Vec::new();
        for text in &self.expr {
            exprs.push((parse(text).map_err(classify)?, None));
        }
        for path in &self.file {
            let body = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            if body.starts_with("window ") {
                exprs.push((parse("interval(1, 1)").map_err(classify)?, Some(body)));
            } else {
                exprs.push((parse(body.trim_end()).map_err(classify)?, None));
            }
        }
        if exprs.len() != want {
            return usage(format!(
                "expected {want} set source(s) via --expr/--file, got {}",
                exprs.len()
            ));
        }
        let mut out = Vec::with_capacity(want);
        for (expr, serialized) in exprs {
            match serialized {
                Some(body) => {
                    let s = LatticeSet::from_rle(&body).map_err(classify)?;
                    if let Some(spec) = &self.window {
                        let w = parse_window(spec)?;
                        if s.window() != w {
                            return usage(format!(
                                "serialized set window {} does not match --window {}",
                                s.window(),
                                w
                            ));
                        }
                    }
                    out.push(s);
                }
                None => {
                    let w = self.window()?;
                    out.push(evaluate(&expr, w).map_err(classify)?);
                }
            }
        }
        Ok(out)
    }

    fn digest_parts(&self) -> Vec<String> {
        let mut parts = vec![self.window.clone().unwrap_or_default()];
        parts.extend(self.expr.iter().cloned());
        for p in &self.file {
            parts.push(fs::read_to_string(p).unwrap_or_default());
        }
        parts
    }
}

fn parse_translate(text: &str) -> CliResult<Point> {
    let v = parse_i64_list(text, "translate")?;
    match v.as_slice() {
        [dx] => Ok([*dx, 0, 0]),
        [dx, dy] => Ok([*dx, *dy, 0]),
        [dx, dy, dz] => Ok([*dx, *dy, *dz]),
        _ => usage("--translate takes 1 to 3 comma-separated offsets"),
    }
}

fn set_report(s: &LatticeSet, format: SetFormat, digest: String) -> String {
    match format {
        SetFormat::Rle => s.to_rle(),
        SetFormat::Json => {
            let v = serde_json::json!({
                "window": s.window().to_string(),
                "cardinality": s.cardinality(),
                "clipped": s.clipped(),
                "rle": s.to_rle(),
                "inputs_digest": digest,
            });
            let mut out = serde_json::to_string_pretty(&v).expect("static shape");
            out.push('\n');
            out
        }
    }
}

fn run_eval(a: &EvalArgs) -> CliResult<(String, bool)> {
    let mut s = a.source.sets(1)?.remove(0);
    if let Some(n) = a.dilate_block {
        s = dilate_block(&s, n).map_err(classify)?;
    }
    if let Some(n) = a.erode_block {
        s = erode_block(&s, n).map_err(classify)?;
    }
    if let Some(n) = a.quotient {
        s = block_quotient(&s, n).map_err(classify)?;
    }
    if let Some(n) = a.fill {
        s = block_fill(&s, n).map_err(classify)?;
    }
    if let Some(k) = a.interior {
        let mask = interior_mask(s.window(), k).map_err(classify)?;
        s = s.intersect(&mask).map_err(classify)?;
    }
    if let Some(t) = &a.translate {
        s = s.translate(parse_translate(t)?);
    }
    let digest = inputs_digest(&a.source.digest_parts());
    Ok((set_report(&s, a.format, digest), true))
}

fn run_density(a: &DensityArgs) -> CliResult<(String, bool)> {
    let s = a.source.sets(1)?.remove(0);
    let profile = match &a.at {
        Some(list) => prefix_profile_at(&s, &parse_i64_list(list, "--at")?).map_err(classify)?,
        None => prefix_profile(&s, a.samples).map_err(classify)?,
    };
    let schn = if a.schnirelmann {
        Some(schnirelmann(&s).map_err(classify)?)
    } else {
        None
    };
    let banach = match &a.banach {
        Some(list) => Some(banach_profile(&s, &parse_i64_list(list, "--banach")?).map_err(classify)?),
        None => None,
    };
    let report = match a.format {
        ReportFormat::Csv => {
            let mut out = profile.to_csv();
            if let Some(v) = schn {
                out.push_str(&format!("schnirelmann,{}\n", fmt_q(&v)));
            }
            if let Some(rows) = banach {
                for (n, v) in rows {
                    out.push_str(&format!("banach,{n},{}\n", fmt_q(&v)));
                }
            }
            out
        }
        ReportFormat::Json => {
            let (lower, upper) = profile.tail_estimates();
            let v = serde_json::json!({
                "samples": profile
                    .samples
                    .iter()
                    .map(|s| serde_json::json!([s.n, fmt_q(&s.ratio)]))
                    .collect::<Vec<_>>(),
                "tail_lower": fmt_q(&lower),
                "tail_upper": fmt_q(&upper),
                "schnirelmann": schn.map(|v| fmt_q(&v)),
                "banach": banach.map(|rows| {
                    rows.iter()
                        .map(|(n, v)| serde_json::json!([n, fmt_q(v)]))
                        .collect::<Vec<_>>()
                }),
                "inputs_digest": inputs_digest(&a.source.digest_parts()),
            });
            let mut out = serde_json::to_string_pretty(&v).expect("static shape");
            out.push('\n');
            out
        }
    };
    Ok((report, true))
}

fn run_witness(a: &WitnessArgs) -> CliResult<(String, bool)> {
    let s = a.source.sets(1)?.remove(0);
    let strong = match &a.strong {
        Some(list) => parse_i64_list(list, "--strong")?,
        None => Vec::new(),
    };
    let label = a.source.expr.first().cloned().unwrap_or_else(|| "file".into());
    let table =
        witness_table(&s, a.m_max, a.k_max, &strong, a.samples, &label).map_err(classify)?;
    let report = match a.format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(&table).expect("static shape");
            out.push('\n');
            out
        }
    };
    Ok((report, true))
}

fn run_search_m(a: &SearchMArgs) -> CliResult<(String, bool)> {
    let s = a.source.sets(1)?.remove(0);
    let level = match &a.level {
        Some(t) => Some(parse_ratio(t)?),
        None => None,
    };
    let epsilon = match &a.epsilon {
        Some(t) => Some(parse_ratio(t)?),
        None => None,
    };
    match a.mode {
        SearchMode::Lower | SearchMode::Upper => {
            let kind = if a.mode == SearchMode::Lower {
                EstimateKind::Lower
            } else {
                EstimateKind::Upper
            };
            let level = level.ok_or_else(|| Failure::Usage("--level is required".into()))?;
            let eps = epsilon.unwrap_or_else(|| q(0, 1));
            let found = minimal_m_search(&s, level, eps, a.k_max, kind).map_err(classify)?;
            match found {
                Some(m) => Ok((format!("minimal m: {m}\n"), true)),
                None => Ok(("minimal m: none\n".into(), true)),
            }
        }
        SearchMode::SatSchnirelmann | SearchMode::SatBanach => {
            let mode = if a.mode == SearchMode::SatSchnirelmann {
                SaturationMode::SchnirelmannUnion
            } else {
                SaturationMode::BanachDilate
            };
            let eps = epsilon.ok_or_else(|| Failure::Usage("--epsilon is required".into()))?;
            let m = saturation_search(&s, eps, mode).map_err(classify)?;
            Ok((format!("saturation m: {m}\n"), true))
        }
        SearchMode::Adaptive => {
            let f = match &a.adaptive_f {
                Some(list) => parse_i64_list(list, "--adaptive-f")?,
                None => return usage("--adaptive-f is required for the adaptive mode"),
            };
            let level = level.ok_or_else(|| Failure::Usage("--level is required".into()))?;
            let m_f = a.m_max.max(0) as usize;
            let r = adaptive_gap_check(&s, &f, m_f, level).map_err(classify)?;
            let line = format!(
                "estimate {}\nlevel {}\nholds {}\n",
                fmt_q(&r.estimate),
                fmt_q(&r.level),
                r.holds
            );
            Ok((line, r.holds))
        }
    }
}

fn random_set_on(w: Window, rng: &mut impl rand::RngExt, density_pct: u32) -> LatticeSet {
    LatticeSet::from_predicate(w, |_| rng.random_range(0..100) < density_pct)
}

fn run_mann(a: &MannArgs) -> CliResult<(String, bool)> {
    use rand::{RngExt, SeedableRng};
    if let Some(n) = a.exhaustive {
        let (violations, pairs) = mann_exhaustive(n).map_err(classify)?;
        return Ok((
            format!("{violations} violations / {pairs} pairs\n"),
            violations == 0,
        ));
    }
    if let Some(count) = a.random {
        let w = a.source.window()?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
        let mut violations = 0u64;
        for _ in 0..count {
            let da = rng.random_range(5..95u32);
            let db = rng.random_range(5..95u32);
            let x = random_set_on(w, &mut rng, da);
            let y = random_set_on(w, &mut rng, db);
            if !mann_check(&x, &y).map_err(classify)?.holds {
                violations += 1;
            }
        }
        return Ok((
            format!("{violations} violations / {count} pairs\n"),
            violations == 0,
        ));
    }
    let sets = a.source.sets(2)?;
    let (x, y) = (&sets[0], &sets[1]);
    let record = mann_check(x, y).map_err(classify)?;
    let sigma_sum = mann_sigma_sum(x, y).map_err(classify)?;
    let sum = mann_sum_set(x, y).map_err(classify)?;
    let report = format!(
        "sigma_a {}\nsigma_b {}\nsigma_sum {}\nbound {}\nsum_cardinality {}\nholds {}\nfirst_violation {}\n",
        fmt_q(&record.sigma_a),
        fmt_q(&record.sigma_b),
        fmt_q(&sigma_sum),
        fmt_q(&record.bound),
        sum.cardinality(),
        record.holds,
        record
            .first_violation
            .map(|n| n.to_string())
            .unwrap_or_else(|| "none".into()),
    );
    Ok((report, record.holds))
}

fn run_cover(a: &CoverArgs) -> CliResult<(String, bool)> {
    use rand::{RngExt, SeedableRng};
    if let Some(x_max) = a.exhaustive {
        let (violations, checked) = covering_exhaustive(x_max).map_err(classify)?;
        return Ok((
            format!("{violations} violations / {checked} instances\n"),
            violations == 0,
        ));
    }
    if a.besicovitch {
        let w = match a.dim {
            1 => Window::classical(60),
            2 => Window::centered(16, 2),
            3 => Window::centered(6, 3),
            d => return usage(format!("--dim must be 1, 2, or 3, got {d}")),
        }
        .map_err(classify)?;
        let cells: Vec<Point> = w.iter_points().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
        let mut audited = 0u32;
        for _ in 0..a.count {
            let mut pts = std::collections::BTreeSet::new();
            for _ in 0..rng.random_range(1..=12usize) {
                pts.insert(cells[rng.random_range(0..cells.len())]);
            }
            let ground = LatticeSet::from_points(w, pts.iter().copied()).map_err(classify)?;
            let mut cubes: Vec<Cube> = pts
                .iter()
                .map(|&p| Cube { center: p, radius: rng.random_range(1..=3) })
                .collect();
            for _ in 0..15 {
                cubes.push(Cube {
                    center: cells[rng.random_range(0..cells.len())],
                    radius: rng.random_range(1..=3),
                });
            }
            besicovitch_select(&cubes, &ground).map_err(classify)?;
            audited += 1;
        }
        return Ok((
            format!("audited {audited} selections in dim {}: all within multiplicity bounds\n", a.dim),
            true,
        ));
    }
    let Some(path) = &a.file else {
        return usage("cover needs --file, --exhaustive, or --besicovitch");
    };
    let body = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let inst: CoverInstance = serde_json::from_str(&body)
        .map_err(|e| Failure::Usage(format!("bad instance file: {e}")))?;
    let verdict = covering_bound_check(&inst).map_err(classify)?;
    let report = match a.format {
        ReportFormat::Csv => format!(
            "lhs,{}\nrhs,{}\nholds,{}\n",
            fmt_q(&verdict.lhs),
            fmt_q(&verdict.rhs),
            verdict.holds
        ),
        ReportFormat::Json => {
            let v = Verdict {
                check: "covering-bound".into(),
                inputs_digest: inputs_digest(&[body.as_str()]),
                holds: verdict.holds,
                lhs: fmt_q(&verdict.lhs),
                rhs: fmt_q(&verdict.rhs),
                witness: serde_json::Value::Null,
            };
            let mut out = serde_json::to_string_pretty(&v).expect("static shape");
            out.push('\n');
            out
        }
    };
    Ok((report, verdict.holds))
}

fn run_two_scale(a: &TwoScaleArgs) -> CliResult<(String, bool)> {
    let w = a.source.window()?;
    let cfg = TwoScaleConfig {
        outer_radius: w.bound(),
        inner_radius: a.inner,
        smear: a.smear,
        delta: parse_ratio(&a.delta)?,
    };
    if a.syndetic {
        let sets = a.source.sets(2)?;
        let rows = syndetic_point_fraction(&sets[0], &sets[1], &cfg, a.m_max).map_err(classify)?;
        let mut out = String::from("m,fraction\n");
        for (m, v) in rows {
            out.push_str(&format!("{m},{}\n", fmt_q(&v)));
        }
        return Ok((out, true));
    }
    let s = a.source.sets(1)?.remove(0);
    let (fraction, measure) = two_scale_density_fraction(&s, &cfg).map_err(classify)?;
    let diff = if fraction > measure { fraction - measure } else { measure - fraction };
    let out = format!(
        "fraction,{}\nmeasure,{}\nabs_diff,{}\n",
        fmt_q(&fraction),
        fmt_q(&measure),
        fmt_q(&diff)
    );
    Ok((out, true))
}

fn run_family(a: &FamilyArgs) -> CliResult<(String, bool)> {
    let w = parse_window(&a.window)?;
    let name = a
        .family
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown construction '{}'", a.family)))?;
    let mut spec = FamilySpec::new(name);
    for p in &a.param {
        let Some((k, v)) = p.split_once('=') else {
            return usage(format!("--param needs key=value, got '{p}'"));
        };
        let value: i64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad value in --param '{p}'")))?;
        spec = spec.with_param(k.trim(), value);
    }
    let digest = inputs_digest(&[a.window.as_str(), a.family.as_str(), &a.param.join(",")]);
    let report = match generate(&spec, w).map_err(classify)? {
        FamilyOutput::Single(s) => set_report(&s, a.format, digest),
        FamilyOutput::Pair { a: x, b: y } => match a.format {
            SetFormat::Rle => format!("set A\n{}set B\n{}", x.to_rle(), y.to_rle()),
            SetFormat::Json => {
                let v = serde_json::json!({
                    "a": { "cardinality": x.cardinality(), "rle": x.to_rle() },
                    "b": { "cardinality": y.cardinality(), "rle": y.to_rle() },
                    "window": w.to_string(),
                    "inputs_digest": digest,
                });
                let mut out = serde_json::to_string_pretty(&v).expect("static shape");
                out.push('\n');
                out
            }
        },
    };
    Ok((report, true))
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses argv, dispatches, prints the report, and returns the exit
/// code: 0 all checks passed, 1 a check failed, 2 usage/parse error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // A second init in the same process keeps the first pool; that
        // only happens in in-process tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let outcome = match &cli.cmd {
        Cmd::Eval(a) => run_eval(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok)),
        Cmd::Density(a) => run_density(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok)),
        Cmd::Witness(a) => run_witness(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok)),
        Cmd::SearchM(a) => run_search_m(a).and_then(|(r, ok)| emit(&r, None).map(|()| ok)),
        Cmd::Mann(a) => run_mann(a).and_then(|(r, ok)| emit(&r, None).map(|()| ok)),
        Cmd::Cover(a) => run_cover(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok)),
        Cmd::TwoScale(a) => {
            run_two_scale(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok))
        }
        Cmd::Family(a) => run_family(a).and_then(|(r, ok)| emit(&r, a.out.as_ref()).map(|()| ok)),
        Cmd::VerifyExample(a) => {
            let (report, ok) = examples::run_bundle(a.name);
            print!("{report}");
            Ok(ok)
        }
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

/// Every subcommand name used in [`DISPATCH`] must exist, and every
/// operation in [`MODULE_OPS`] must be reachable from some subcommand.
pub fn dispatch_is_complete() -> Result<(), String> {
    let cmd = Cli::command();
    let known: Vec<String> = cmd.get_subcommands().map(|c| c.get_name().to_string()).collect();
    for (name, _) in DISPATCH {
        if !known.iter().any(|k| k == name) {
            return Err(format!("dispatch row '{name}' is not a subcommand"));
        }
    }
    for name in &known {
        if !DISPATCH.iter().any(|(n, _)| n == name) {
            return Err(format!("subcommand '{name}' missing from the dispatch table"));
        }
    }
    for op in MODULE_OPS {
        if !DISPATCH.iter().any(|(_, ops)| ops.contains(op)) {
            return Err(format!("operation '{op}' unreachable from any subcommand"));
        }
    }
    Ok(())
}
