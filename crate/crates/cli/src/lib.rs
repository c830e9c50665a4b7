//! The `cyclemeter` command line, as a library so tests can drive it
//! without spawning processes.

use std::any::Any;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cyclemeter_core::asymptotics::{asymptotic_hn, SingularityClass};
use cyclemeter_core::config::{
    parse_config, parse_k_spec, parse_n_grid, parse_s_grid, Config, Family, FamilyParams, GeneralizedFamily,
    RunDefaults,
};
use cyclemeter_core::catalog::WeightFamily;
use cyclemeter_core::diagnostics::{
    clt_report, large_deviation_report, mod_poisson_report, poisson_k_approx_report, poisson_vector_report,
    reports_to_csv, ComparisonReport, KSelector, LargeDeviationRow, CSV_HEADER, DEFAULT_N_GRID,
};
use cyclemeter_core::format::{format_f64, to_json};
use cyclemeter_core::generalized::{
    brute_force_generalized_pmf, generalized_joint_cycle_pmf, generalized_normalization,
    generalized_total_cycles_pmf,
};
use cyclemeter_core::measure::{joint_cycle_pmf, normalization_constants, total_cycles_pmf};
use cyclemeter_core::partitions::{brute_force_cycle_type_pmf, CycleTypeOracle, Partition};
use cyclemeter_core::sampler::{rng_for, CycleSampler};
use cyclemeter_core::{Error, Pmf, Scalar, Surd};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_TREND: i32 = 4;

/// Pointwise tolerance of `--oracle` under the double backend.
pub const ORACLE_TOL: f64 = 1e-10;

/// Largest `n` for which the exact backend is the default.
pub const EXACT_DEFAULT_MAX_N: usize = 200;

#[derive(Parser, Debug)]
#[command(name = "cyclemeter", version, about = "Cycle statistics of weighted random permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalization constants h_n next to their asymptotic main term.
    Hn(Common),
    /// Exact law of the small-cycle counts or of the number of cycles.
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Target::K)]
        target: Target,
    },
    /// Random permutations, one JSON line each.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long = "cycle-type-only")]
        cycle_type_only: bool,
    },
    /// Exact laws compared with their limits over a grid of sizes.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Points s of the mod-Poisson comparison.
        #[arg(long = "s-grid", allow_hyphen_values = true)]
        s_grid: Option<String>,
        /// Point of the large-deviation comparison: an integer, or auto±<x>sigma.
        #[arg(long, default_value = "auto+3sigma", allow_hyphen_values = true)]
        k: String,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML file of named families and run defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ewens, theta-shift, polylog, exp-weight, alpha-exp, spatial,
    /// exp-polynomial, or a family named in --config.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long = "theta-exp", allow_hyphen_values = true)]
    theta_exp: Option<String>,
    /// One value or a comma-separated sequence; `log(p/q)` is kept exact.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Comma-separated lattice energies; `log(p/q)` is kept exact.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Higher coefficients b_2,…,b_d of an exp-polynomial.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "n-grid")]
    n_grid: Option<String>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to exact when the weights allow it and n ≤ 200.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Cross-check against enumeration of partitions.
    #[arg(long)]
    oracle: bool,
    /// Exit 4 unless the primary distances decrease along the grid.
    #[arg(long = "assert-trends")]
    assert_trends: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Backend {
    Exact,
    Double,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Cycles,
    K,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    PoissonVector,
    ModPoisson,
    Clt,
    PoissonK,
    LargeDev,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub stderr: String,
    pub code: i32,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Degenerate(_) | Error::Convergence(_) => EXIT_MATH,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Output of a command before it is written.
struct Produced {
    body: String,
    /// A warning that changes the exit code after the body is written.
    verdict: Option<Failure>,
}

impl Produced {
    fn ok(body: String) -> Self {
        Produced { body, verdict: None }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    stdout: text.into_bytes(),
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: Vec::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(cli) {
        Ok((produced, output)) => {
            let (stdout, mut stderr, mut code) = (Vec::new(), String::new(), EXIT_OK);
            let mut stdout = stdout;
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, produced.body.as_bytes()) {
                        return Outcome {
                            stdout,
                            stderr: format!("error: cannot write {}: {e}\n", path.display()),
                            code: EXIT_USAGE,
                        };
                    }
                }
                None => stdout = produced.body.into_bytes(),
            }
            if let Some(f) = produced.verdict {
                stderr = format!("error: {}\n", f.message);
                code = f.code;
            }
            Outcome { stdout, stderr, code }
        }
        Err(f) => Outcome {
            stdout: Vec::new(),
            stderr: format!("error: {}\n", f.message),
            code: f.code,
        },
    }
}

/// Flags merged over the config file's `[run]` table.
struct Resolved {
    family: Family,
    run: RunDefaults,
    n_grid: Option<Vec<usize>>,
    backend: Option<Backend>,
    format: Format,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).collect()
}

fn resolve(common: &Common) -> CmdResult<Resolved> {
    let config = match &common.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    let run = config.run.clone();
    let name = common
        .family
        .clone()
        .or_else(|| run.family.clone())
        .unwrap_or_else(|| "ewens".to_string());
    let params = FamilyParams {
        theta: common.theta.clone(),
        delta: common.delta.clone(),
        c: common.c.clone(),
        theta_exp: common.theta_exp.clone(),
        alpha: common.alpha.as_deref().map(split_list),
        eps: common.eps.as_deref().map(split_list),
        poly: common.poly.as_deref().map(split_list),
        truncation_note: None,
    };
    let family = config.resolve(&name, &params)?.build()?;
    let n_grid = match &common.n_grid {
        Some(g) => Some(parse_n_grid(g)?),
        None => run.n_grid.clone(),
    };
    let backend = match (common.backend, run.backend.as_deref()) {
        (Some(b), _) => Some(b),
        (None, None) => None,
        (None, Some("exact")) => Some(Backend::Exact),
        (None, Some("double")) => Some(Backend::Double),
        (None, Some(other)) => return Err(usage(format!("[run] backend must be exact or double, got {other:?}"))),
    };
    let format = match (common.format, run.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("json")) => Format::Json,
        (None, Some("csv")) => Format::Csv,
        (None, Some(other)) => return Err(usage(format!("[run] format must be json or csv, got {other:?}"))),
    };
    Ok(Resolved {
        family,
        run,
        n_grid,
        backend,
        format,
    })
}

fn load_config(path: &Path) -> CmdResult<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

impl Resolved {
    fn exact_possible(&self) -> bool {
        match &self.family {
            Family::Weighted(f) => f.weights.is_exact(),
            Family::Generalized(g) => g.weights.is_exact(),
        }
    }

    fn backend(&self, top_n: usize) -> CmdResult<Backend> {
        match self.backend {
            Some(Backend::Exact) if !self.exact_possible() => Err(usage(format!(
                "{} has no exact weights; use --backend double",
                self.family.name()
            ))),
            Some(b) => Ok(b),
            None if self.exact_possible() && top_n <= EXACT_DEFAULT_MAX_N => Ok(Backend::Exact),
            None => Ok(Backend::Double),
        }
    }

    /// `--n` alone, or the whole grid.
    fn sizes(&self, common: &Common) -> CmdResult<Vec<usize>> {
        if let Some(n) = common.n.or(self.run.n) {
            if n == 0 {
                return Err(usage("n must be at least 1"));
            }
            if common.n.is_some() || self.n_grid.is_none() {
                return Ok(vec![n]);
            }
        }
        self.n_grid.clone().ok_or_else(|| usage("give --n or --n-grid"))
    }

    fn single_n(&self, common: &Common) -> CmdResult<usize> {
        match self.sizes(common)?.as_slice() {
            [n] => Ok(*n),
            _ => Err(usage("this command takes a single --n")),
        }
    }

    fn weighted(&self, what: &str) -> CmdResult<&WeightFamily> {
        match &self.family {
            Family::Weighted(f) => Ok(f),
            Family::Generalized(_) => Err(usage(format!(
                "{what} is available for weighted families only; {} is a generalized family",
                self.family.name()
            ))),
        }
    }

    fn class(&self) -> Option<SingularityClass> {
        match &self.family {
            Family::Weighted(f) => f.class().ok().cloned(),
            Family::Generalized(GeneralizedFamily { class, .. }) => class.clone(),
        }
    }
}

fn execute(cli: Cli) -> CmdResult<(Produced, Option<PathBuf>)> {
    let (common, produced) = match &cli.command {
        Command::Hn(common) => (common, cmd_hn(common)?),
        Command::Dist { common, target } => (common, cmd_dist(common, *target)?),
        Command::Sample {
            common,
            count,
            cycle_type_only,
        } => (common, cmd_sample(common, *count, *cycle_type_only)?),
        Command::Report { common, kind, s_grid, k } => (common, cmd_report(common, *kind, s_grid.as_deref(), k)?),
    };
    Ok((produced, common.output.clone()))
}

fn exact_text<S: Scalar>(x: &S) -> Option<String> {
    (x as &dyn Any).downcast_ref::<Surd>().map(Surd::to_string)
}

fn backend_label(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Double => "double",
    }
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

#[derive(Serialize)]
struct HnRow {
    n: usize,
    h_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_n_exact: Option<String>,
    asymptotic_hn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_rate_value: Option<f64>,
}

#[derive(Serialize)]
struct HnTable<'a> {
    family: &'a str,
    backend: &'static str,
    class: Option<SingularityClass>,
    reference_rate: Option<String>,
    rows: Vec<HnRow>,
}

fn normalizations<S: Scalar>(family: &Family, order: usize) -> CmdResult<Vec<S>> {
    Ok(match family {
        Family::Weighted(f) => normalization_constants::<S>(&f.weights, order)?,
        Family::Generalized(g) => generalized_normalization::<S>(&g.weights, order)?,
    })
}

fn hn_values<S: Scalar>(family: &Family, sizes: &[usize]) -> CmdResult<Vec<(f64, Option<String>)>> {
    let top = *sizes.iter().max().expect("nonempty grid");
    let h = normalizations::<S>(family, top)?;
    Ok(sizes.iter().map(|&n| (h[n].to_f64(), exact_text(&h[n]))).collect())
}

fn cmd_hn(common: &Common) -> CmdResult<Produced> {
    let r = resolve(common)?;
    let sizes = r.sizes(common)?;
    let backend = r.backend(*sizes.iter().max().expect("nonempty grid"))?;
    let values = match backend {
        Backend::Exact => hn_values::<Surd>(&r.family, &sizes)?,
        Backend::Double => hn_values::<f64>(&r.family, &sizes)?,
    };
    let class = r.class();
    let with_ratio = class.as_ref().is_some_and(|c| c.theta > 0.0);
    let mut rows = Vec::new();
    for (&n, (h, exact)) in sizes.iter().zip(values) {
        let asym = class.as_ref().and_then(|c| asymptotic_hn(c, n).ok());
        let ratio = if with_ratio { asym.map(|a| h / a) } else { None };
        rows.push(HnRow {
            n,
            h_n: h,
            h_n_exact: exact,
            asymptotic_hn: asym,
            ratio,
            reference_rate_value: if with_ratio {
                class.as_ref().and_then(|c| c.error_rate.value(n))
            } else {
                None
            },
        });
    }
    let body = match r.format {
        Format::Json => to_json(&HnTable {
            family: r.family.name(),
            backend: backend_label(backend),
            reference_rate: class.as_ref().filter(|_| with_ratio).map(|c| c.error_rate.label()),
            class,
            rows,
        })? + "\n",
        Format::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for row in &rows {
                writeln!(out, "{},h_n,{},", row.n, format_f64(row.h_n)).expect("write to String");
                writeln!(out, "{},asymptotic_hn,{},", row.n, opt_f64(row.asymptotic_hn)).expect("write to String");
                if with_ratio {
                    writeln!(
                        out,
                        "{},ratio,{},{}",
                        row.n,
                        opt_f64(row.ratio),
                        opt_f64(row.reference_rate_value)
                    )
                    .expect("write to String");
                }
            }
            out
        }
    };
    Ok(Produced::ok(body))
}

#[derive(Serialize)]
struct DistEntry<K> {
    key: K,
    mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass_exact: Option<String>,
}

#[derive(Serialize)]
struct DistTable<'a, K> {
    family: &'a str,
    backend: &'static str,
    target: &'static str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'static str>,
    entries: Vec<DistEntry<K>>,
}

fn entries<K: Ord + Clone, S: Scalar>(p: &Pmf<K, S>) -> Vec<DistEntry<K>> {
    p.entries()
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| DistEntry {
            key: k.clone(),
            mass: v.to_f64(),
            mass_exact: exact_text(v),
        })
        .collect()
}

/// Disagreements between two laws: exact equality for the exact backend,
/// [`ORACLE_TOL`] otherwise.
fn mismatches<K: Ord + Clone + std::fmt::Debug, S: Scalar>(got: &Pmf<K, S>, want: &Pmf<K, S>) -> Vec<String> {
    let mut keys: Vec<K> = got.entries().iter().chain(want.entries()).map(|(k, _)| k.clone()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|k| {
            let (a, b) = (got.mass(&k), want.mass(&k));
            let bad = match S::KIND {
                cyclemeter_core::ScalarKind::Exact => a != b,
                cyclemeter_core::ScalarKind::Double => (a.to_f64() - b.to_f64()).abs() > ORACLE_TOL,
            };
            bad.then(|| format!("{k:?}: computed {} vs enumeration {}", a.to_f64(), b.to_f64()))
        })
        .collect()
}

fn cycle_type_oracle<S: Scalar>(family: &Family, n: usize) -> CmdResult<CycleTypeOracle<S>> {
    Ok(match family {
        Family::Weighted(f) => brute_force_cycle_type_pmf::<S>(&f.weights, n)?,
        Family::Generalized(g) => brute_force_generalized_pmf::<S>(&g.weights, n)?,
    })
}

fn head_counts(p: &Partition, b: usize) -> Vec<usize> {
    (1..=b).map(|m| p.multiplicity(m)).collect()
}

fn dist_body<K: Ord + Clone + Serialize + std::fmt::Debug>(
    table: DistTable<'_, K>,
    format: Format,
    key_label: impl Fn(&K) -> String,
) -> CmdResult<String> {
    Ok(match format {
        Format::Json => to_json(&table)? + "\n",
        Format::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for e in &table.entries {
                writeln!(out, "{},P[{}],{},", table.n, key_label(&e.key), format_f64(e.mass)).expect("write to String");
            }
            out
        }
    })
}

fn oracle_verdict(problems: Vec<String>) -> CmdResult<()> {
    if problems.is_empty() {
        return Ok(());
    }
    let shown: Vec<_> = problems.iter().take(5).cloned().collect();
    Err(Failure {
        code: EXIT_MATH,
        message: format!("oracle mismatch at {} points: {}", problems.len(), shown.join("; ")),
    })
}

fn dist_with<S: Scalar>(common: &Common, r: &Resolved, target: Target, backend: Backend) -> CmdResult<String> {
    let n = r.single_n(common)?;
    let oracle = if common.oracle {
        Some(cycle_type_oracle::<S>(&r.family, n)?)
    } else {
        None
    };
    match target {
        Target::K => {
            let law = match &r.family {
                Family::Weighted(f) => total_cycles_pmf::<S>(&f.weights, n)?,
                Family::Generalized(g) => generalized_total_cycles_pmf::<S>(&g.weights, n)?,
            };
            if let Some(o) = &oracle {
                oracle_verdict(mismatches(&law, &o.pmf.map_keys(Partition::len)))?;
            }
            let table = DistTable {
                family: r.family.name(),
                backend: backend_label(backend),
                target: "k",
                n,
                b: None,
                oracle: oracle.as_ref().map(|_| "pass"),
                entries: entries(&law),
            };
            dist_body::<usize>(table, r.format, |k| format!("K={k}"))
        }
        Target::Cycles => {
            let b = common.b.or(r.run.b).unwrap_or(2).min(n);
            let law = match &r.family {
                Family::Weighted(f) => joint_cycle_pmf::<S>(&f.weights, n, b)?,
                Family::Generalized(g) => generalized_joint_cycle_pmf::<S>(&g.weights, n, b)?,
            };
            if let Some(o) = &oracle {
                oracle_verdict(mismatches(&law, &o.pmf.map_keys(|p| head_counts(p, b))))?;
            }
            let table = DistTable {
                family: r.family.name(),
                backend: backend_label(backend),
                target: "cycles",
                n,
                b: Some(b),
                oracle: oracle.as_ref().map(|_| "pass"),
                entries: entries(&law),
            };
            dist_body::<Vec<usize>>(table, r.format, |c| {
                let parts: Vec<String> = c.iter().map(usize::to_string).collect();
                format!("C=({})", parts.join(" "))
            })
        }
    }
}

fn cmd_dist(common: &Common, target: Target) -> CmdResult<Produced> {
    let r = resolve(common)?;
    let backend = r.backend(r.single_n(common)?)?;
    let body = match backend {
        Backend::Exact => dist_with::<Surd>(common, &r, target, backend)?,
        Backend::Double => dist_with::<f64>(common, &r, target, backend)?,
    };
    Ok(Produced::ok(body))
}

#[derive(Serialize)]
struct PermutationLine<'a> {
    permutation: &'a [usize],
}

#[derive(Serialize)]
struct CycleTypeLine<'a> {
    cycle_type: &'a [usize],
}

fn cmd_sample(common: &Common, count: u64, cycle_type_only: bool) -> CmdResult<Produced> {
    let r = resolve(common)?;
    if r.format == Format::Csv {
        return Err(usage("sample writes JSON lines only"));
    }
    let family = r.weighted("sampling")?;
    let n = r.single_n(common)?;
    let seed = common.seed.or(r.run.seed).unwrap_or(0);
    let sampler = CycleSampler::new(&family.weights, n)?;
    let mut out = String::new();
    for i in 0..count {
        let mut rng = rng_for(seed, i);
        let line = if cycle_type_only {
            let p = sampler.sample_cycle_type(&mut rng);
            to_json(&CycleTypeLine { cycle_type: p.parts() })?
        } else {
            let perm = sampler.sample_permutation(&mut rng);
            to_json(&PermutationLine { permutation: &perm })?
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(Produced::ok(out))
}

#[derive(Serialize)]
struct ReportSet<'a> {
    family: &'a str,
    reports: &'a [ComparisonReport],
}

#[derive(Serialize)]
struct LargeDeviationSet<'a> {
    family: &'a str,
    k: KSelector,
    rows: &'a [LargeDeviationRow],
}

/// The first report of each metric is the one `--assert-trends` checks.
fn trend_failures(reports: &[ComparisonReport]) -> Vec<String> {
    let mut seen = Vec::new();
    let mut failures = Vec::new();
    for r in reports {
        if seen.contains(&r.metric) {
            continue;
        }
        seen.push(r.metric);
        if !r.nonincreasing(0.0) {
            failures.push(format!("{} is not nonincreasing over n = {:?}", r.metric_label(), r.n_values));
        }
    }
    failures
}

fn cmd_report(common: &Common, kind: Kind, s_grid: Option<&str>, k: &str) -> CmdResult<Produced> {
    let r = resolve(common)?;
    let family = r.weighted("report")?;
    if kind == Kind::LargeDev {
        let selector = parse_k_spec(k)?;
        let rows = r
            .sizes(common)?
            .into_iter()
            .map(|n| large_deviation_report(family, n, selector))
            .collect::<Result<Vec<_>, _>>()?;
        let body = match r.format {
            Format::Json => {
                to_json(&LargeDeviationSet {
                    family: family.name(),
                    k: selector,
                    rows: &rows,
                })? + "\n"
            }
            Format::Csv => {
                let mut out = format!("{CSV_HEADER}\n");
                for row in &rows {
                    for (metric, value) in [
                        ("k", row.estimate.k as f64),
                        ("exact", row.exact),
                        ("estimate", row.estimate.estimate),
                        ("poisson_pmf", row.estimate.poisson_pmf),
                        ("relative_error", row.relative_error),
                    ] {
                        writeln!(out, "{},{metric},{},", row.n, format_f64(value)).expect("write to String");
                    }
                }
                out
            }
        };
        return Ok(Produced::ok(body));
    }
    let sizes = match common.n_grid.is_some() || r.n_grid.is_some() || common.n.is_some() || r.run.n.is_some() {
        true => r.sizes(common)?,
        false => DEFAULT_N_GRID.to_vec(),
    };
    let reports = match kind {
        Kind::PoissonVector => poisson_vector_report(family, common.b.or(r.run.b).unwrap_or(2), &sizes)?,
        Kind::ModPoisson => {
            let s = match s_grid {
                Some(s) => parse_s_grid(s)?,
                None => vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
            };
            mod_poisson_report(family, &sizes, &s)?
        }
        Kind::Clt => clt_report(family, &sizes)?,
        Kind::PoissonK => poisson_k_approx_report(family, &sizes)?,
        Kind::LargeDev => unreachable!("handled above"),
    };
    let body = match r.format {
        Format::Json => {
            to_json(&ReportSet {
                family: family.name(),
                reports: &reports,
            })? + "\n"
        }
        Format::Csv => reports_to_csv(&reports),
    };
    let verdict = if common.assert_trends {
        let failures = trend_failures(&reports);
        (!failures.is_empty()).then(|| Failure {
            code: EXIT_TREND,
            message: format!("trend assertion failed: {}", failures.join("; ")),
        })
    } else {
        None
    };
    Ok(Produced { body, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_mismatch_is_a_math_failure() {
        let a: Pmf<usize, f64> = Pmf::new(vec![(1, 0.5), (2, 0.5)]);
        let b: Pmf<usize, f64> = Pmf::new(vec![(1, 0.5), (2, 0.4), (3, 0.1)]);
        let problems = mismatches(&a, &b);
        assert_eq!(problems.len(), 2);
        let f = oracle_verdict(problems).unwrap_err();
        assert_eq!(f.code, EXIT_MATH);
        assert!(oracle_verdict(mismatches(&a, &a)).is_ok());

        let x: Pmf<usize, Surd> = Pmf::new(vec![(1, Surd::from_ratio(1, 3))]);
        let y: Pmf<usize, Surd> = Pmf::new(vec![(1, Surd::from_ratio(1, 3) + Surd::from_ratio(1, 1 << 40))]);
        assert_eq!(mismatches(&x, &y).len(), 1);
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::Degenerate("x".into())).code, EXIT_MATH);
        assert_eq!(Failure::from(Error::Config("x".into())).code, EXIT_USAGE);
        assert_eq!(Failure::from(Error::UnsupportedClass("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn in_process_run_matches_binary_contract() {
        let out = run(["cyclemeter", "hn", "--n", "4"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(String::from_utf8(out.stdout).unwrap().contains("\"h_n_exact\":\"1\""));
        let out = run(["cyclemeter", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(!out.stdout.is_empty());
    }
}
